#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/matrix.hpp"

namespace mddc {

// Cluster layout for correlated AE rows. Within-cluster correlation is either
// compound symmetry (one rho for all clusters or one per cluster) or a full
// I x I correlation matrix; corr, when nonempty, wins.
struct ClusterSpec {
    std::vector<int> assignment;     // size I; empty = every row its own cluster
    std::vector<double> within_rho;  // size 1 (broadcast) or one per cluster
    std::vector<double> corr;        // optional explicit I x I matrix, row-major
};

struct GenerationRequest {
    std::vector<std::int64_t> row_marginal;
    std::vector<std::int64_t> col_marginal;
    std::vector<std::string> row_names;  // optional
    std::vector<std::string> col_names;  // optional
    LabeledMatrix signal;                // lambda >= 1 per cell; empty = all ones
    ClusterSpec clusters;
    int n_rep = 1;
    std::uint64_t seed = 0;
    double tolerance = 0.0;  // RTD percent cap; used by generate_tables_with_tol
    int retry_ceiling = 1000;
    int threads = 0;
};

// Draws n_rep tables: per table, per column, per cluster a zero-mean
// multivariate normal residual vector; cell value is
// round_half_even(e * sqrt(E*lambda*(1-p_row)(1-p_col)) + E*lambda) for
// nonnegative noise positions and 0 when the noisy value is negative.
// Replication r uses stream (seed, r << 32), so output is identical for any
// worker count.
std::vector<ContinTable> generate_tables(const GenerationRequest& req);

// Same, but tables whose relative total deviation exceeds req.tolerance are
// re-rolled with fresh streams (r << 32 | attempt) until they pass or
// retry_ceiling attempts are spent; accepted tables are never re-rolled.
std::vector<ContinTable> generate_tables_with_tol(const GenerationRequest& req);

// |orig - sim| / orig * 100.
double relative_total_deviation(std::int64_t orig_total, std::int64_t sim_total);

// Pairwise Pearson correlations between residual rows (pairwise-complete);
// degenerate rows get 0 with a warning; unit diagonal. No PSD projection.
std::vector<double> pairwise_row_corr(const LabeledMatrix& res, Warnings* warnings = nullptr);

// pairwise_row_corr of the table's residuals followed by PSD projection
// (negative eigenvalues clipped, unit diagonal restored).
std::vector<double> estimate_cluster_corr(const ContinTable& t, Warnings* warnings = nullptr);

namespace detail {

// Request folded into precomputed per-cell means/scales and cluster noise
// factors; shared by the parallel driver and the serial reference so a table
// is a pure function of (prepared request, stream id).
struct PreparedGeneration;

std::shared_ptr<const PreparedGeneration> prepare_generation(const GenerationRequest& req);
ContinTable generate_one(const PreparedGeneration& prep, std::uint64_t stream_id);

}  // namespace detail

}  // namespace mddc
