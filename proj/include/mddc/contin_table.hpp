#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mddc/matrix.hpp"

namespace mddc {

// I x J table of AE (row) by drug (column) report counts with marginals.
struct ContinTable {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::int64_t> counts;  // row-major
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;
    std::vector<std::int64_t> row_totals;
    std::vector<std::int64_t> col_totals;
    std::int64_t grand_total = 0;

    std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * n_cols + j]; }
    std::int64_t& at(std::size_t i, std::size_t j) { return counts[i * n_cols + j]; }
    void recompute_totals();
};

// Checks invariants and normalizes a raw labeled matrix into a ContinTable.
// strict rejects non-integral entries and duplicate labels; lenient rounds
// half-to-even, generates missing labels (AE_i / drug_j) and deduplicates,
// recording a warning per repair.
ContinTable validate_and_fix(const LabeledMatrix& raw, bool strict, Warnings* warnings = nullptr);

// E_ij = row_i * col_j / total.
LabeledMatrix expected_counts(const ContinTable& t);

// e_ij = (n_ij - E_ij) / sqrt(E_ij (1 - row_i/total)(1 - col_j/total));
// cells in a zero row or column marginal (or a marginal equal to the grand
// total) have denominator zero and come back MISSING.
LabeledMatrix std_pearson_residuals(const ContinTable& t);

}  // namespace mddc
