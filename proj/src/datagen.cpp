#include "mddc/datagen.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mddc/cutoffs.hpp"
#include "mddc/error.hpp"
#include "mddc/rng.hpp"
#include "mddc/stats.hpp"

namespace mddc {

double relative_total_deviation(std::int64_t orig_total, std::int64_t sim_total) {
    if (orig_total <= 0) fail(errc::invalid_argument, "original total must be positive");
    // multiply first: keeps decimal-friendly percentages exact
    return std::abs(double(orig_total) - double(sim_total)) * 100.0 / double(orig_total);
}

namespace detail {

struct CsCluster {
    std::vector<std::size_t> members;  // row indices
    double a = 1.0;                    // e = a*z + b*sum(z)
    double b = 0.0;
};

struct PreparedGeneration {
    std::size_t I = 0, J = 0;
    std::int64_t orig_total = 0;
    std::vector<double> mean;   // E * lambda per cell
    std::vector<double> scale;  // sqrt(E * lambda * (1-p_row)(1-p_col)) per cell
    std::vector<std::string> row_names, col_names;
    std::vector<CsCluster> clusters;  // compound-symmetry path
    MvnFactor factor;                 // explicit-correlation path
    bool explicit_corr = false;
    std::uint64_t seed = 0;
};

std::shared_ptr<const PreparedGeneration> prepare_generation(const GenerationRequest& req) {
    auto prep = std::make_shared<PreparedGeneration>();
    const std::size_t I = req.row_marginal.size();
    const std::size_t J = req.col_marginal.size();
    if (I == 0 || J == 0) fail(errc::empty_table, "marginals must be nonempty");
    std::int64_t row_sum = 0, col_sum = 0;
    for (std::int64_t v : req.row_marginal) {
        if (v < 0) fail(errc::negative_count, "negative row marginal");
        row_sum += v;
    }
    for (std::int64_t v : req.col_marginal) {
        if (v < 0) fail(errc::negative_count, "negative column marginal");
        col_sum += v;
    }
    if (row_sum != col_sum)
        fail(errc::marginal_mismatch, "row marginals sum to " + std::to_string(row_sum) +
                                          " but column marginals sum to " +
                                          std::to_string(col_sum));
    if (row_sum <= 0) fail(errc::marginal_mismatch, "marginals sum to zero");
    prep->I = I;
    prep->J = J;
    prep->orig_total = row_sum;
    prep->seed = req.seed;

    if (!req.signal.values.empty() &&
        (req.signal.n_rows != I || req.signal.n_cols != J))
        fail(errc::dimension_mismatch, "signal strength matrix does not match the marginals");
    const bool has_signal = !req.signal.values.empty();
    if (has_signal)
        for (double lam : req.signal.values)
            if (!(lam >= 1.0))
                fail(errc::invalid_argument, "signal strengths must be >= 1");

    const double total = double(row_sum);
    prep->mean.resize(I * J);
    prep->scale.resize(I * J);
    for (std::size_t i = 0; i < I; ++i) {
        const double ri = double(req.row_marginal[i]);
        const double p_row = ri / total;
        for (std::size_t j = 0; j < J; ++j) {
            const double cj = double(req.col_marginal[j]);
            const double expected = ri * cj / total;
            const double lam = has_signal ? req.signal.values[i * J + j] : 1.0;
            prep->mean[i * J + j] = expected * lam;
            prep->scale[i * J + j] =
                std::sqrt(expected * lam * (1.0 - p_row) * (1.0 - cj / total));
        }
    }

    prep->row_names = req.row_names;
    prep->col_names = req.col_names;
    if (prep->row_names.empty())
        for (std::size_t i = 0; i < I; ++i) prep->row_names.push_back("AE_" + std::to_string(i + 1));
    if (prep->col_names.empty())
        for (std::size_t j = 0; j < J; ++j)
            prep->col_names.push_back("drug_" + std::to_string(j + 1));
    if (prep->row_names.size() != I || prep->col_names.size() != J)
        fail(errc::dimension_mismatch, "label lists do not match the marginals");

    const ClusterSpec& cs = req.clusters;
    if (!cs.corr.empty()) {
        if (cs.corr.size() != I * I)
            fail(errc::dimension_mismatch, "explicit correlation matrix must be I x I");
        prep->factor = MvnFactor(cs.corr, I);  // NotPSD propagates
        prep->explicit_corr = true;
        return prep;
    }
    std::vector<int> assignment = cs.assignment;
    if (assignment.empty()) {
        assignment.resize(I);
        std::iota(assignment.begin(), assignment.end(), 0);  // every row alone
    }
    if (assignment.size() != I)
        fail(errc::dimension_mismatch, "cluster assignment must have one entry per row");
    // cluster ids normalized in order of first appearance
    std::vector<int> ids;
    std::vector<std::size_t> which(I);
    for (std::size_t i = 0; i < I; ++i) {
        const auto it = std::find(ids.begin(), ids.end(), assignment[i]);
        if (it == ids.end()) {
            which[i] = ids.size();
            ids.push_back(assignment[i]);
        } else {
            which[i] = std::size_t(it - ids.begin());
        }
    }
    std::vector<double> rho;
    if (cs.within_rho.empty()) {
        rho.assign(ids.size(), 0.0);
    } else if (cs.within_rho.size() == 1) {
        rho.assign(ids.size(), cs.within_rho[0]);
    } else if (cs.within_rho.size() == ids.size()) {
        rho = cs.within_rho;
    } else {
        fail(errc::dimension_mismatch, "within_rho must be scalar or one value per cluster");
    }
    for (double r : rho)
        if (!(r >= 0.0 && r <= 1.0))
            fail(errc::invalid_argument, "within-cluster correlation must be in [0, 1]");
    prep->clusters.resize(ids.size());
    for (std::size_t i = 0; i < I; ++i) prep->clusters[which[i]].members.push_back(i);
    for (std::size_t g = 0; g < prep->clusters.size(); ++g) {
        CsCluster& cl = prep->clusters[g];
        const double c = double(cl.members.size());
        const double r = rho[g];
        // L = a*Id + b*Ones gives L L^T = (1-r)*Id + r*Ones; exact at r=1
        cl.a = std::sqrt(1.0 - r);
        cl.b = cl.members.size() == 1 ? 0.0 : (-cl.a + std::sqrt(cl.a * cl.a + c * r)) / c;
    }
    return prep;
}

ContinTable generate_one(const PreparedGeneration& prep, std::uint64_t stream_id) {
    const std::size_t I = prep.I, J = prep.J;
    RngStream stream(prep.seed, stream_id);
    std::vector<double> noise(I);
    std::vector<double> z;
    ContinTable t;
    t.n_rows = I;
    t.n_cols = J;
    t.counts.assign(I * J, 0);
    t.row_names = prep.row_names;
    t.col_names = prep.col_names;
    for (std::size_t j = 0; j < J; ++j) {
        if (prep.explicit_corr) {
            prep.factor.draw(stream, noise.data());
        } else {
            for (const CsCluster& cl : prep.clusters) {
                z.resize(cl.members.size());
                double sum = 0.0;
                for (double& v : z) {
                    v = stream.next_normal();
                    sum += v;
                }
                for (std::size_t m = 0; m < cl.members.size(); ++m)
                    noise[cl.members[m]] = cl.a * z[m] + cl.b * sum;
            }
        }
        for (std::size_t i = 0; i < I; ++i) {
            const std::size_t idx = i * J + j;
            const double x = noise[i] * prep.scale[idx] + prep.mean[idx];
            t.counts[idx] = x >= 0.0 ? round_half_even(x) : 0;
        }
    }
    t.recompute_totals();
    return t;
}

}  // namespace detail

namespace {

std::shared_ptr<const detail::PreparedGeneration> prepare_checked(const GenerationRequest& req) {
    if (req.n_rep < 1) fail(errc::invalid_argument, "n_rep must be at least 1");
    return detail::prepare_generation(req);
}

}  // namespace

std::vector<ContinTable> generate_tables(const GenerationRequest& req) {
    const auto prep = prepare_checked(req);
    std::vector<ContinTable> out(std::size_t(req.n_rep));
    const int nt = resolve_threads(req.threads);
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int r = 0; r < req.n_rep; ++r)
        out[std::size_t(r)] = detail::generate_one(*prep, std::uint64_t(r) << 32);
    return out;
}

std::vector<ContinTable> generate_tables_with_tol(const GenerationRequest& req) {
    if (!(req.tolerance > 0.0)) fail(errc::invalid_argument, "tolerance must be positive");
    if (req.retry_ceiling < 0) fail(errc::invalid_argument, "retry ceiling must be nonnegative");
    const auto prep = prepare_checked(req);
    std::vector<ContinTable> out(std::size_t(req.n_rep));
    std::vector<double> min_rtd(std::size_t(req.n_rep),
                                std::numeric_limits<double>::infinity());
    std::vector<char> ok(std::size_t(req.n_rep), 0);
    const int nt = resolve_threads(req.threads);
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int r = 0; r < req.n_rep; ++r) {
        for (std::int64_t attempt = 0; attempt <= req.retry_ceiling; ++attempt) {
            ContinTable t = detail::generate_one(
                *prep, (std::uint64_t(r) << 32) | std::uint64_t(attempt));
            const double rtd = relative_total_deviation(prep->orig_total, t.grand_total);
            if (rtd < min_rtd[std::size_t(r)]) min_rtd[std::size_t(r)] = rtd;
            if (rtd <= req.tolerance) {
                out[std::size_t(r)] = std::move(t);
                ok[std::size_t(r)] = 1;
                break;
            }
        }
    }
    for (int r = 0; r < req.n_rep; ++r) {
        if (!ok[std::size_t(r)])
            fail(errc::retry_exhausted,
                 "table " + std::to_string(r + 1) + ": best relative total deviation " +
                     std::to_string(min_rtd[std::size_t(r)]) + "% after " +
                     std::to_string(req.retry_ceiling + 1) + " attempts, tolerance " +
                     std::to_string(req.tolerance) + "%");
    }
    return out;
}

std::vector<double> pairwise_row_corr(const LabeledMatrix& res, Warnings* warnings) {
    const std::size_t I = res.n_rows, J = res.n_cols;
    std::vector<double> corr(I * I, 0.0);
    std::vector<char> degenerate(I, 0);
    for (std::size_t i = 0; i < I; ++i) corr[i * I + i] = 1.0;
    for (std::size_t i = 0; i < I; ++i) {
        const double* xi = res.values.data() + i * J;
        for (std::size_t k = i + 1; k < I; ++k) {
            const double* xk = res.values.data() + k * J;
            const PairStats st = pairwise_stats(xi, xk, J);
            const double cor = st.cor();
            if (is_missing(cor)) {
                if (st.n >= 2) {
                    if (st.ss_x <= 0.0) degenerate[i] = 1;
                    if (st.ss_y <= 0.0) degenerate[k] = 1;
                }
                continue;  // stays 0
            }
            corr[i * I + k] = cor;
            corr[k * I + i] = cor;
        }
    }
    if (warnings)
        for (std::size_t i = 0; i < I; ++i)
            if (degenerate[i])
                warnings->push_back("residual row " +
                                    (res.row_names.empty() ? std::to_string(i + 1)
                                                           : res.row_names[i]) +
                                    " has zero variance; its correlations were set to 0");
    return corr;
}

std::vector<double> estimate_cluster_corr(const ContinTable& t, Warnings* warnings) {
    const LabeledMatrix res = std_pearson_residuals(t);
    return nearest_psd_corr(pairwise_row_corr(res, warnings), t.n_rows);
}

}  // namespace mddc
