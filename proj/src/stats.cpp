#include "mddc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>

#include "mddc/error.hpp"
#include "mddc/matrix.hpp"

namespace mddc {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) fail(errc::empty_data, "quantile of empty data");
    if (!(q >= 0.0 && q <= 1.0)) fail(errc::invalid_argument, "quantile q outside [0, 1]");
    const double h = double(sorted.size() - 1) * q;
    const std::size_t lo = std::size_t(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double g = h - double(lo);
    return sorted[lo] + g * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> data, double q) {
    data.erase(std::remove_if(data.begin(), data.end(), [](double v) { return !std::isfinite(v); }),
               data.end());
    std::sort(data.begin(), data.end());
    return quantile_sorted(data, q);
}

BoxplotStats boxplot_stats(const std::vector<double>& data, double coef) {
    std::vector<double> finite;
    finite.reserve(data.size());
    for (double v : data)
        if (std::isfinite(v)) finite.push_back(v);
    std::sort(finite.begin(), finite.end());
    const double q1 = quantile_sorted(finite, 0.25);
    const double q3 = quantile_sorted(finite, 0.75);
    return {q1, q3, q3 - q1, coef};
}

Fences boxplot_fences(const std::vector<double>& data, double coef) {
    const BoxplotStats s = boxplot_stats(data, coef);
    return {s.q1 - coef * s.iqr, s.q3 + coef * s.iqr};
}

double normal_upper_tail(double z) {
    return 0.5 * std::erfc(z * 0.7071067811865475244);
}

double log_factorial(std::int64_t k) {
    if (k < 0) fail(errc::invalid_argument, "log_factorial of negative integer");
    static const std::vector<double> table = [] {
        std::vector<double> t(1024);
        t[0] = 0.0;
        long double acc = 0.0L;
        for (int i = 1; i < 1024; ++i) {
            acc += std::log(static_cast<long double>(i));
            t[i] = double(acc);
        }
        return t;
    }();
    if (k < 1024) return table[std::size_t(k)];
    const double kd = double(k);
    const double inv = 1.0 / kd, inv2 = inv * inv;
    return kd * std::log(kd) - kd + 0.5 * std::log(6.283185307179586477 * kd) +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0)));
}

namespace {

// log P(X = k) for X ~ Hypergeometric(N, K, n).
double log_hyper_pmf(std::int64_t N, std::int64_t K, std::int64_t n, std::int64_t k) {
    return log_factorial(K) - log_factorial(k) - log_factorial(K - k) + log_factorial(N - K) -
           log_factorial(n - k) - log_factorial(N - K - n + k) + log_factorial(n) +
           log_factorial(N - n) - log_factorial(N);
}

double log_space_sum(const std::vector<double>& logs) {
    const double peak = *std::max_element(logs.begin(), logs.end());
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - peak);
    return peak + std::log(acc);
}

}  // namespace

double fisher_exact_greater(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    if (a < 0 || b < 0 || c < 0 || d < 0)
        fail(errc::invalid_argument, "fisher_exact_greater needs nonnegative cells");
    const std::int64_t N = a + b + c + d;
    if (N == 0) fail(errc::invalid_argument, "fisher_exact_greater needs a positive grand total");
    const std::int64_t K = a + b;  // row 1 margin
    const std::int64_t n = a + c;  // column 1 margin
    const std::int64_t kmin = std::max<std::int64_t>(0, K + n - N);
    const std::int64_t kmax = std::min(K, n);
    if (a <= kmin) return 1.0;
    // Sum whichever tail has fewer terms; the other follows by complement.
    const std::int64_t lower_terms = a - kmin;
    const std::int64_t upper_terms = kmax - a + 1;
    std::vector<double> logs;
    if (upper_terms <= lower_terms) {
        logs.reserve(std::size_t(upper_terms));
        for (std::int64_t k = a; k <= kmax; ++k) logs.push_back(log_hyper_pmf(N, K, n, k));
        return std::min(1.0, std::exp(log_space_sum(logs)));
    }
    logs.reserve(std::size_t(lower_terms));
    for (std::int64_t k = kmin; k < a; ++k) logs.push_back(log_hyper_pmf(N, K, n, k));
    const double below = std::exp(log_space_sum(logs));
    return std::clamp(1.0 - below, 0.0, 1.0);
}

std::vector<double> bh_adjust(const std::vector<double>& p) {
    std::vector<std::size_t> idx;
    idx.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!is_missing(p[i])) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (p[x] != p[y]) return p[x] < p[y];
        return x < y;
    });
    std::vector<double> out(p);
    const double m = double(idx.size());
    double running = 1.0;
    for (std::size_t k = idx.size(); k-- > 0;) {
        const double val = std::min(1.0, p[idx[k]] * m / double(k + 1));
        running = std::min(running, val);
        out[idx[k]] = running;
    }
    return out;
}

std::int64_t round_half_even(double x) {
    if (!std::isfinite(x)) fail(errc::invalid_argument, "round_half_even of non-finite value");
    const double fl = std::floor(x);
    const double diff = x - fl;
    const std::int64_t base = std::int64_t(fl);
    if (diff > 0.5) return base + 1;
    if (diff < 0.5) return base;
    return (base % 2 == 0) ? base : base + 1;
}

double PairStats::cor() const {
    if (n < 2 || ss_x <= 0.0 || ss_y <= 0.0) return missing;
    return ss_xy / std::sqrt(ss_x * ss_y);
}

PairStats pairwise_stats(const double* x, const double* y, std::size_t len) {
    PairStats s;
    double sum_x = 0.0, sum_y = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        ++s.n;
        sum_x += x[i];
        sum_y += y[i];
    }
    if (s.n == 0) return s;
    s.mean_x = sum_x / double(s.n);
    s.mean_y = sum_y / double(s.n);
    for (std::size_t i = 0; i < len; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        const double dx = x[i] - s.mean_x;
        const double dy = y[i] - s.mean_y;
        s.ss_x += dx * dx;
        s.ss_y += dy * dy;
        s.ss_xy += dx * dy;
    }
    return s;
}

SymEigen sym_eigen(std::vector<double> a, std::size_t n) {
    if (n == 0 || a.size() != n * n) fail(errc::dimension_mismatch, "sym_eigen shape");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = avg;
            a[j * n + i] = avg;
        }
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    auto rotate = [&](std::vector<double>& m, std::size_t i, std::size_t j, std::size_t k,
                      std::size_t l, double s, double tau) {
        const double g = m[i * n + j];
        const double h = m[k * n + l];
        m[i * n + j] = g - s * (h + g * tau);
        m[k * n + l] = h + s * (g - h * tau);
    };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a[p * n + q]);
        if (off == 0.0) break;
        const double thresh = sweep < 3 ? 0.2 * off / double(n * n) : 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(a[p * n + p]) + g == std::abs(a[p * n + p]) &&
                    std::abs(a[q * n + q]) + g == std::abs(a[q * n + q])) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if (std::abs(apq) <= thresh) continue;
                const double h = a[q * n + q] - a[p * n + p];
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                const double tau = sn / (1.0 + cs);
                const double z = t * apq;
                a[p * n + p] -= z;
                a[q * n + q] += z;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (std::size_t r = 0; r < p; ++r) rotate(a, r, p, r, q, sn, tau);
                for (std::size_t r = p + 1; r < q; ++r) rotate(a, p, r, r, q, sn, tau);
                for (std::size_t r = q + 1; r < n; ++r) rotate(a, p, r, q, r, sn, tau);
                for (std::size_t r = 0; r < p; ++r) a[p * n + r] = a[r * n + p];
                for (std::size_t r = p + 1; r < n; ++r) a[r * n + p] = a[p * n + r];
                for (std::size_t r = 0; r < q; ++r) a[q * n + r] = a[r * n + q];
                for (std::size_t r = q + 1; r < n; ++r) a[r * n + q] = a[q * n + r];
                for (std::size_t r = 0; r < n; ++r) rotate(v, r, p, r, q, sn, tau);
            }
        }
    }

    SymEigen out;
    out.n = n;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (out.values[x] != out.values[y]) return out.values[x] > out.values[y];
        return x < y;
    });
    std::vector<double> sorted_vals(n);
    std::vector<double> sorted_vecs(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted_vals[j] = out.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted_vecs[i * n + j] = v[i * n + order[j]];
    }
    out.values = std::move(sorted_vals);
    out.vectors = std::move(sorted_vecs);
    return out;
}

std::vector<double> nearest_psd_corr(std::vector<double> a, std::size_t n) {
    SymEigen eig = sym_eigen(a, n);
    for (double& lam : eig.values)
        if (lam < 0.0) lam = 0.0;
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += eig.vectors[i * n + k] * eig.values[k] * eig.vectors[j * n + k];
            m[i * n + j] = acc;
        }
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i)
        scale[i] = m[i * n + i] > 0.0 ? 1.0 / std::sqrt(m[i * n + i]) : 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] *= scale[i] * scale[j];
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    return m;
}

MvnFactor::MvnFactor(const std::vector<double>& cov, std::size_t dim) : n_(dim) {
    if (dim == 0 || cov.size() != dim * dim) fail(errc::dimension_mismatch, "covariance shape");
    // Work on the symmetrized copy; pivoted Cholesky with clipping so exact
    // and near semidefinite matrices factor without error.
    std::vector<double> a(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            a[i * dim + j] = 0.5 * (cov[i * dim + j] + cov[j * dim + i]);
    std::vector<double> low(dim * dim, 0.0);
    std::vector<std::size_t> perm(dim);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t rank = dim;
    for (std::size_t k = 0; k < dim; ++k) {
        std::size_t piv = k;
        for (std::size_t j = k + 1; j < dim; ++j)
            if (a[j * dim + j] > a[piv * dim + piv]) piv = j;
        const double d = a[piv * dim + piv];
        if (d < -1e-8) fail(errc::not_psd, "covariance has eigenvalue below -1e-8");
        if (d <= 0.0) {
            rank = k;
            break;
        }
        if (piv != k) {
            std::swap(perm[k], perm[piv]);
            for (std::size_t j = 0; j < dim; ++j) std::swap(a[k * dim + j], a[piv * dim + j]);
            for (std::size_t i = 0; i < dim; ++i) std::swap(a[i * dim + k], a[i * dim + piv]);
            for (std::size_t j = 0; j < k; ++j) std::swap(low[k * dim + j], low[piv * dim + j]);
        }
        const double root = std::sqrt(d);
        low[k * dim + k] = root;
        for (std::size_t i = k + 1; i < dim; ++i) low[i * dim + k] = a[i * dim + k] / root;
        for (std::size_t i = k + 1; i < dim; ++i)
            for (std::size_t j = k + 1; j <= i; ++j) {
                const double upd = a[i * dim + j] - low[i * dim + k] * low[j * dim + k];
                a[i * dim + j] = upd;
                a[j * dim + i] = upd;
            }
    }
    // Undo the row permutation; keep only the rank columns that carry mass.
    factor_.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < rank; ++j) factor_[perm[i] * dim + j] = low[i * dim + j];
    rank_ = rank;
}

void MvnFactor::draw(RngStream& rng, double* out) const {
    std::vector<double> z(rank_);
    for (std::size_t j = 0; j < rank_; ++j) z[j] = rng.next_normal();
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        const double* row = factor_.data() + i * n_;
        for (std::size_t j = 0; j < rank_; ++j) acc += row[j] * z[j];
        out[i] = acc;
    }
}

std::vector<double> sample_mvn(RngStream& rng, const std::vector<double>& mean,
                               const std::vector<double>& cov) {
    const std::size_t dim = mean.size();
    MvnFactor factor(cov, dim);
    std::vector<double> out(dim);
    factor.draw(rng, out.data());
    for (std::size_t i = 0; i < dim; ++i) out[i] += mean[i];
    return out;
}

}  // namespace mddc
