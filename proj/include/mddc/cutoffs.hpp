#pragma once

#include <cstdint>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/matrix.hpp"

namespace mddc {

enum class CutoffScope { per_column, whole_table };

// Per-drug-column thresholds: upper fences for nonzero cells and lower fences
// for zero cells. whole_table scope keeps one pooled fence replicated J times.
struct CutoffSet {
    std::vector<double> upper;       // c+ per column
    std::vector<double> zero_lower;  // c0 per column
    CutoffScope scope = CutoffScope::per_column;
};

// Null-simulation column maxima: one row per drug column, one entry per
// replication. -inf marks replications where no cell of the column had a
// count above 5.
struct NullMaxima {
    std::size_t n_cols = 0;
    int reps = 0;
    std::vector<double> values;  // n_cols x reps, row-major

    double at(std::size_t j, int r) const { return values[j * std::size_t(reps) + std::size_t(r)]; }
};

// Resolves a requested worker count: values < 1 mean "all available".
int resolve_threads(int requested);

// Tukey fences on the observed residuals. coef is a single broadcast value or
// one per column; col_specific groups by column, separate splits nonzero and
// zero cells into their own groups (pooled otherwise). Groups with a single
// finite residual collapse to that value; empty groups give +/-inf fences.
// Both degeneracies record a warning.
CutoffSet boxplot_cutoffs(const LabeledMatrix& res, const ContinTable& t,
                          const std::vector<double>& coef, bool col_specific, bool separate,
                          Warnings* warnings = nullptr);

// Simulates reps independence tables from the observed marginals
// (multinomial over cell probabilities), computes each simulated table's own
// residuals, and records per column the max residual over cells with count
// above 5 (-inf when none). Replication r always uses stream (seed, r), so
// results are identical for every thread count.
NullMaxima mc_null_simulation(const ContinTable& t, int reps, std::uint64_t seed, int threads = 0);

// Upper cutoffs from the finite column maxima at quantile_q; zero-cell fences
// still come from a Tukey boxplot on the observed table's zero cells.
CutoffSet mc_cutoffs(const NullMaxima& null_max, double quantile_q, const LabeledMatrix& res,
                     const ContinTable& t, const std::vector<double>& zero_coef, bool col_specific,
                     Warnings* warnings = nullptr);

// (1 + #{r : m_jr >= e_ij}) / (reps + 1) for cells with count above 5;
// everything else MISSING.
LabeledMatrix mc_pvalues(const NullMaxima& null_max, const LabeledMatrix& res,
                         const ContinTable& t);

// Grid search for the smallest boxplot coefficient (step 0.1 from 1.5) whose
// simulated false discovery rate meets target_fdr. Per column by default; the
// whole_table flag pools all cells and returns one value replicated.
std::vector<double> find_optimal_coef(const ContinTable& t, int reps, double target_fdr,
                                      double step, std::uint64_t seed, bool whole_table = false,
                                      double ceiling = 10.0, int threads = 0);

}  // namespace mddc
