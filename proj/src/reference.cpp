#include "mddc/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mddc/error.hpp"
#include "mddc/matrix.hpp"
#include "mddc/rng.hpp"
#include "mddc/stats.hpp"

// These mirror the contracts of the parallel kernels using the plain
// high-level primitives (build the simulated table, call the public residual
// routine, reduce). Slower, single-threaded, easy to audit.
namespace mddc::reference {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> null_cell_probs(const ContinTable& t) {
    const double tot = double(t.grand_total);
    std::vector<double> probs(t.n_rows * t.n_cols);
    for (std::size_t i = 0; i < t.n_rows; ++i) {
        const double pr = double(t.row_totals[i]) / tot;
        for (std::size_t j = 0; j < t.n_cols; ++j)
            probs[i * t.n_cols + j] = pr * (double(t.col_totals[j]) / tot);
    }
    return probs;
}

ContinTable simulate_null_table(const ContinTable& t, const std::vector<double>& probs,
                                RngStream& stream) {
    ContinTable sim;
    sim.n_rows = t.n_rows;
    sim.n_cols = t.n_cols;
    sample_multinomial(stream, t.grand_total, probs, sim.counts);
    sim.recompute_totals();
    return sim;
}

}  // namespace

NullMaxima mc_null_simulation(const ContinTable& t, int reps, std::uint64_t seed) {
    if (reps < 1) fail(errc::invalid_argument, "reps must be at least 1");
    const std::vector<double> probs = null_cell_probs(t);
    NullMaxima out;
    out.n_cols = t.n_cols;
    out.reps = reps;
    out.values.assign(t.n_cols * std::size_t(reps), -kInf);
    for (int r = 0; r < reps; ++r) {
        RngStream stream(seed, std::uint64_t(r));
        const ContinTable sim = simulate_null_table(t, probs, stream);
        const LabeledMatrix res = std_pearson_residuals(sim);
        for (std::size_t j = 0; j < t.n_cols; ++j) {
            double m = -kInf;
            for (std::size_t i = 0; i < t.n_rows; ++i) {
                if (sim.at(i, j) <= 5) continue;
                const double e = res.at(i, j);
                if (!is_missing(e) && e > m) m = e;
            }
            out.values[j * std::size_t(reps) + std::size_t(r)] = m;
        }
    }
    return out;
}

std::vector<double> find_optimal_coef(const ContinTable& t, int reps, double target_fdr,
                                      double step, std::uint64_t seed, bool whole_table,
                                      double ceiling) {
    if (reps < 1) fail(errc::invalid_argument, "reps must be at least 1");
    if (!(target_fdr > 0.0 && target_fdr <= 1.0))
        fail(errc::invalid_argument, "target_fdr must be in (0, 1]");
    if (!(step > 0.0)) fail(errc::invalid_argument, "step must be positive");
    const std::vector<double> probs = null_cell_probs(t);
    const std::size_t groups = whole_table ? 1 : t.n_cols;
    const std::size_t R = std::size_t(reps);
    std::vector<double> q3s(groups * R, 0.0), iqrs(groups * R, 0.0), maxes(groups * R, -kInf);
    for (int r = 0; r < reps; ++r) {
        RngStream stream(seed, std::uint64_t(r));
        const ContinTable sim = simulate_null_table(t, probs, stream);
        const LabeledMatrix res = std_pearson_residuals(sim);
        std::vector<std::vector<double>> buf(groups);
        for (std::size_t i = 0; i < t.n_rows; ++i)
            for (std::size_t j = 0; j < t.n_cols; ++j) {
                if (sim.at(i, j) == 0) continue;
                const double e = res.at(i, j);
                if (is_missing(e)) continue;
                buf[whole_table ? 0 : j].push_back(e);
            }
        for (std::size_t g = 0; g < groups; ++g) {
            auto& b = buf[g];
            if (b.empty()) continue;
            std::sort(b.begin(), b.end());
            const std::size_t slot = g * R + std::size_t(r);
            const double q1 = quantile_sorted(b, 0.25);
            const double q3 = quantile_sorted(b, 0.75);
            q3s[slot] = q3;
            iqrs[slot] = q3 - q1;
            maxes[slot] = b.back();
        }
    }
    std::vector<double> found(groups, missing);
    std::vector<std::string> failing;
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t k = 0;; ++k) {
            const double c = 1.5 + double(k) * step;
            if (c > ceiling + 1e-9) break;
            std::int64_t flagged = 0;
            const std::size_t base = g * R;
            for (std::size_t r = 0; r < R; ++r)
                if (maxes[base + r] > q3s[base + r] + c * iqrs[base + r]) ++flagged;
            if (double(flagged) / double(reps) <= target_fdr) {
                found[g] = c;
                break;
            }
        }
        if (is_missing(found[g]))
            failing.push_back(whole_table ? std::string("whole table") : t.col_names[g]);
    }
    if (!failing.empty()) {
        std::string msg = "no coefficient at or below the ceiling met the target for: ";
        for (std::size_t i = 0; i < failing.size(); ++i)
            msg += (i ? ", " : "") + failing[i];
        fail(errc::no_convergence, msg);
    }
    if (whole_table) return std::vector<double>(t.n_cols, found[0]);
    return found;
}

std::vector<ContinTable> generate_tables(const GenerationRequest& req) {
    if (req.n_rep < 1) fail(errc::invalid_argument, "n_rep must be at least 1");
    const auto prep = detail::prepare_generation(req);
    std::vector<ContinTable> out;
    out.reserve(std::size_t(req.n_rep));
    for (int r = 0; r < req.n_rep; ++r)
        out.push_back(detail::generate_one(*prep, std::uint64_t(r) << 32));
    return out;
}

}  // namespace mddc::reference
