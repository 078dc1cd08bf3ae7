#include "mddc/cutoffs.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mddc/error.hpp"
#include "mddc/rng.hpp"
#include "mddc/stats.hpp"

namespace mddc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> broadcast_coef(const std::vector<double>& coef, std::size_t n_cols,
                                   const char* what) {
    std::vector<double> out;
    if (coef.size() == 1) {
        out.assign(n_cols, coef[0]);
    } else if (coef.size() == n_cols) {
        out = coef;
    } else {
        fail(errc::coef_length_mismatch, std::string(what) + " has " +
                                             std::to_string(coef.size()) + " entries for " +
                                             std::to_string(n_cols) + " columns");
    }
    for (double c : out)
        if (!(c > 0.0)) fail(errc::invalid_argument, std::string(what) + " must be positive");
    return out;
}

void check_conformable(const LabeledMatrix& res, const ContinTable& t) {
    if (res.n_rows != t.n_rows || res.n_cols != t.n_cols)
        fail(errc::dimension_mismatch, "residual matrix does not match the table shape");
}

// kind: 0 = zero cells, 1 = nonzero cells, 2 = all cells. col < 0 pools the
// whole table.
std::vector<double> gather_residuals(const LabeledMatrix& res, const ContinTable& t, int col,
                                     int kind) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < t.n_rows; ++i)
        for (std::size_t j = 0; j < t.n_cols; ++j) {
            if (col >= 0 && j != std::size_t(col)) continue;
            const bool zero = t.at(i, j) == 0;
            if (kind == 0 && !zero) continue;
            if (kind == 1 && zero) continue;
            const double e = res.at(i, j);
            if (std::isfinite(e)) vals.push_back(e);
        }
    return vals;
}

struct GroupQuartiles {
    double q1 = 0.0;
    double q3 = 0.0;
    bool empty = true;
    bool single = false;
};

GroupQuartiles group_quartiles(std::vector<double> vals) {
    GroupQuartiles g;
    if (vals.empty()) return g;
    g.empty = false;
    g.single = vals.size() < 2;
    std::sort(vals.begin(), vals.end());
    g.q1 = quantile_sorted(vals, 0.25);
    g.q3 = quantile_sorted(vals, 0.75);
    return g;
}

void warn(Warnings* warnings, const std::string& message) {
    if (warnings) warnings->push_back(message);
}

const std::string& column_name(const ContinTable& t, std::size_t j) { return t.col_names[j]; }

}  // namespace

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    return omp_get_max_threads();
}

CutoffSet boxplot_cutoffs(const LabeledMatrix& res, const ContinTable& t,
                          const std::vector<double>& coef, bool col_specific, bool separate,
                          Warnings* warnings) {
    check_conformable(res, t);
    const std::size_t J = t.n_cols;
    const std::vector<double> coefs = broadcast_coef(coef, J, "coef");
    CutoffSet out;
    out.scope = col_specific ? CutoffScope::per_column : CutoffScope::whole_table;
    out.upper.assign(J, kInf);
    out.zero_lower.assign(J, -kInf);

    const int nonzero_kind = separate ? 1 : 2;
    const int zero_kind = separate ? 0 : 2;
    for (std::size_t j = 0; j < J; ++j) {
        const int col = col_specific ? int(j) : -1;
        const std::string where = col_specific ? "column " + column_name(t, j) : "table";
        if (!col_specific && j > 0 && coefs[j] == coefs[0]) {
            // same pooled group, same coefficient: reuse column 0's fences
            out.upper[j] = out.upper[0];
            out.zero_lower[j] = out.zero_lower[0];
            continue;
        }
        const GroupQuartiles nz = group_quartiles(gather_residuals(res, t, col, nonzero_kind));
        if (nz.empty) {
            if (col_specific || j == 0)
                warn(warnings, where + ": no finite nonzero-cell residuals; upper fence disabled");
        } else {
            if (nz.single && (col_specific || j == 0))
                warn(warnings, where + ": single nonzero-cell residual; fences collapse to it");
            out.upper[j] = nz.q3 + coefs[j] * (nz.q3 - nz.q1);
        }
        const GroupQuartiles zo = separate ? group_quartiles(gather_residuals(res, t, col, zero_kind))
                                           : nz;
        if (zo.empty) {
            if (separate && (col_specific || j == 0))
                warn(warnings, where + ": no finite zero-cell residuals; zero fence disabled");
        } else {
            if (separate && zo.single && (col_specific || j == 0))
                warn(warnings, where + ": single zero-cell residual; fences collapse to it");
            out.zero_lower[j] = zo.q1 - coefs[j] * (zo.q3 - zo.q1);
        }
    }
    return out;
}

namespace {

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

// Per-thread workspace for one simulated table.
struct SimScratch {
    std::vector<std::int64_t> counts, row_tot, col_tot;
    std::vector<double> row_factor, col_factor;

    explicit SimScratch(std::size_t rows, std::size_t cols)
        : counts(rows * cols), row_tot(rows), col_tot(cols), row_factor(rows), col_factor(cols) {}

    void tabulate(std::size_t rows, std::size_t cols, double total) {
        std::fill(row_tot.begin(), row_tot.end(), 0);
        std::fill(col_tot.begin(), col_tot.end(), 0);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                const std::int64_t v = counts[i * cols + j];
                row_tot[i] += v;
                col_tot[j] += v;
            }
        for (std::size_t i = 0; i < rows; ++i) {
            const double rid = double(row_tot[i]);
            row_factor[i] = rid * (1.0 - rid / total) / total;
        }
        for (std::size_t j = 0; j < cols; ++j) {
            const double cj = double(col_tot[j]);
            col_factor[j] = cj * (1.0 - cj / total);
        }
    }
};

}  // namespace

NullMaxima mc_null_simulation(const ContinTable& t, int reps, std::uint64_t seed, int threads) {
    if (reps < 1) fail(errc::invalid_argument, "reps must be at least 1");
    const std::size_t I = t.n_rows, J = t.n_cols;
    const std::int64_t n = t.grand_total;
    const double total = double(n);
    const std::vector<double> probs = null_cell_probs(t);
    NullMaxima out;
    out.n_cols = J;
    out.reps = reps;
    out.values.assign(J * std::size_t(reps), -kInf);
    const int nt = resolve_threads(threads);
#pragma omp parallel num_threads(nt)
    {
        SimScratch s(I, J);
#pragma omp for schedule(static)
        for (int r = 0; r < reps; ++r) {
            RngStream stream(seed, std::uint64_t(r));
            sample_multinomial(stream, n, probs, s.counts);
            s.tabulate(I, J, total);
            for (std::size_t i = 0; i < I; ++i) {
                const std::int64_t ri = s.row_tot[i];
                if (ri == n) continue;  // residual denominator zero
                const double rid = double(ri);
                for (std::size_t j = 0; j < J; ++j) {
                    const std::int64_t v = s.counts[i * J + j];
                    if (v <= 5) continue;
                    if (s.col_tot[j] == n) continue;
                    const double expected = rid * double(s.col_tot[j]) / total;
                    const double e = (double(v) - expected) /
                                     std::sqrt(s.row_factor[i] * s.col_factor[j]);
                    double& slot = out.values[j * std::size_t(reps) + std::size_t(r)];
                    if (e > slot) slot = e;
                }
            }
        }
    }
    return out;
}

CutoffSet mc_cutoffs(const NullMaxima& null_max, double quantile_q, const LabeledMatrix& res,
                     const ContinTable& t, const std::vector<double>& zero_coef, bool col_specific,
                     Warnings* warnings) {
    if (!(quantile_q > 0.0 && quantile_q <= 1.0))
        fail(errc::invalid_argument, "quantile must be in (0, 1]");
    if (null_max.n_cols != t.n_cols)
        fail(errc::dimension_mismatch, "null maxima do not match the table");
    check_conformable(res, t);
    const std::size_t J = t.n_cols;
    const std::vector<double> coefs = broadcast_coef(zero_coef, J, "coef");
    CutoffSet out;
    out.scope = col_specific ? CutoffScope::per_column : CutoffScope::whole_table;
    out.upper.assign(J, kInf);
    out.zero_lower.assign(J, -kInf);
    std::vector<double> finite;
    for (std::size_t j = 0; j < J; ++j) {
        finite.clear();
        for (int r = 0; r < null_max.reps; ++r) {
            const double m = null_max.at(j, r);
            if (std::isfinite(m)) finite.push_back(m);
        }
        if (finite.empty())
            fail(errc::all_infinite, "column " + column_name(t, j) +
                                         ": no simulated cell ever exceeded count 5");
        std::sort(finite.begin(), finite.end());
        out.upper[j] = quantile_sorted(finite, quantile_q);
    }
    for (std::size_t j = 0; j < J; ++j) {
        const int col = col_specific ? int(j) : -1;
        if (!col_specific && j > 0 && coefs[j] == coefs[0]) {
            out.zero_lower[j] = out.zero_lower[0];
            continue;
        }
        const std::string where = col_specific ? "column " + column_name(t, j) : "table";
        const GroupQuartiles zo = group_quartiles(gather_residuals(res, t, col, 0));
        if (zo.empty) {
            if (col_specific || j == 0)
                warn(warnings, where + ": no finite zero-cell residuals; zero fence disabled");
        } else {
            if (zo.single && (col_specific || j == 0))
                warn(warnings, where + ": single zero-cell residual; fences collapse to it");
            out.zero_lower[j] = zo.q1 - coefs[j] * (zo.q3 - zo.q1);
        }
    }
    return out;
}

LabeledMatrix mc_pvalues(const NullMaxima& null_max, const LabeledMatrix& res,
                         const ContinTable& t) {
    check_conformable(res, t);
    if (null_max.n_cols != t.n_cols)
        fail(errc::dimension_mismatch, "null maxima do not match the table");
    LabeledMatrix out = LabeledMatrix::like(res, missing);
    const double denom = double(null_max.reps) + 1.0;
    for (std::size_t j = 0; j < t.n_cols; ++j) {
        const double* row = null_max.values.data() + j * std::size_t(null_max.reps);
        for (std::size_t i = 0; i < t.n_rows; ++i) {
            if (t.at(i, j) <= 5) continue;
            const double e = res.at(i, j);
            if (!std::isfinite(e)) continue;
            std::int64_t above = 0;
            for (int r = 0; r < null_max.reps; ++r)
                if (row[r] >= e) ++above;
            out.at(i, j) = (1.0 + double(above)) / denom;
        }
    }
    return out;
}

std::vector<double> find_optimal_coef(const ContinTable& t, int reps, double target_fdr,
                                      double step, std::uint64_t seed, bool whole_table,
                                      double ceiling, int threads) {
    if (reps < 1) fail(errc::invalid_argument, "reps must be at least 1");
    if (!(target_fdr > 0.0 && target_fdr <= 1.0))
        fail(errc::invalid_argument, "target_fdr must be in (0, 1]");
    if (!(step > 0.0)) fail(errc::invalid_argument, "step must be positive");
    const std::size_t I = t.n_rows, J = t.n_cols;
    const std::int64_t n = t.grand_total;
    const double total = double(n);
    const std::vector<double> probs = null_cell_probs(t);
    const std::size_t groups = whole_table ? 1 : J;
    const std::size_t R = std::size_t(reps);
    std::vector<double> q3s(groups * R, 0.0), iqrs(groups * R, 0.0), maxes(groups * R, -kInf);
    const int nt = resolve_threads(threads);
#pragma omp parallel num_threads(nt)
    {
        SimScratch s(I, J);
        std::vector<std::vector<double>> buf(groups);
#pragma omp for schedule(static)
        for (int r = 0; r < reps; ++r) {
            RngStream stream(seed, std::uint64_t(r));
            sample_multinomial(stream, n, probs, s.counts);
            s.tabulate(I, J, total);
            for (auto& b : buf) b.clear();
            for (std::size_t i = 0; i < I; ++i) {
                const std::int64_t ri = s.row_tot[i];
                if (ri == 0 || ri == n) continue;
                const double rid = double(ri);
                for (std::size_t j = 0; j < J; ++j) {
                    const std::int64_t v = s.counts[i * J + j];
                    if (v == 0) continue;
                    const std::int64_t cj = s.col_tot[j];
                    if (cj == n) continue;
                    const double expected = rid * double(cj) / total;
                    const double e =
                        (double(v) - expected) / std::sqrt(s.row_factor[i] * s.col_factor[j]);
                    buf[whole_table ? 0 : j].push_back(e);
                }
            }
            for (std::size_t g = 0; g < groups; ++g) {
                auto& b = buf[g];
                const std::size_t slot = g * R + std::size_t(r);
                if (b.empty()) continue;  // max stays -inf: never flags
                std::sort(b.begin(), b.end());
                const double q1 = quantile_sorted(b, 0.25);
                const double q3 = quantile_sorted(b, 0.75);
                q3s[slot] = q3;
                iqrs[slot] = q3 - q1;
                maxes[slot] = b.back();
            }
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
            failing.push_back(whole_table ? std::string("whole table") : column_name(t, g));
    }
    if (!failing.empty()) {
        std::string msg = "no coefficient at or below the ceiling met the target for: ";
        for (std::size_t i = 0; i < failing.size(); ++i)
            msg += (i ? ", " : "") + failing[i];
        fail(errc::no_convergence, msg);
    }
    if (whole_table) return std::vector<double>(J, found[0]);
    return found;
}

}  // namespace mddc
