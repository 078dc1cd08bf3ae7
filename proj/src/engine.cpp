#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "mddc/error.hpp"
#include "mddc/mddc.hpp"

namespace mddc {

LabeledMatrix transpose(const LabeledMatrix& m) {
    LabeledMatrix out(m.n_cols, m.n_rows);
    out.row_names = m.col_names;
    out.col_names = m.row_names;
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t j = 0; j < m.n_cols; ++j) out.at(j, i) = m.at(i, j);
    return out;
}

UMatrixResult build_u_matrix(const LabeledMatrix& res, const ContinTable& t, const CutoffSet& cut,
                             const LabeledMatrix* signal_override) {
    if (res.n_rows != t.n_rows || res.n_cols != t.n_cols)
        fail(errc::dimension_mismatch, "residual matrix does not match the table shape");
    if (cut.upper.size() != t.n_cols || cut.zero_lower.size() != t.n_cols)
        fail(errc::dimension_mismatch, "cutoff set does not match the table");
    UMatrixResult out;
    out.u = LabeledMatrix::like(res, missing);
    out.univariate_signal = LabeledMatrix::like(res, missing);
    for (std::size_t i = 0; i < t.n_rows; ++i)
        for (std::size_t j = 0; j < t.n_cols; ++j) {
            const double e = res.at(i, j);
            if (is_missing(e)) continue;  // u and signal stay MISSING
            const bool zero_cell = t.at(i, j) == 0;
            bool masked;
            if (zero_cell) {
                masked = e < cut.zero_lower[j];
                out.univariate_signal.at(i, j) = 0.0;  // zero cells never signal
            } else {
                masked = std::abs(e) > cut.upper[j];
                out.univariate_signal.at(i, j) = e > cut.upper[j] ? 1.0 : 0.0;
            }
            if (signal_override) {
                const double s = signal_override->at(i, j);
                out.univariate_signal.at(i, j) = s;
                // flagged cells are masked no matter where the cutoff fell,
                // so a signal can never leak into the correlation steps
                if (s == 1.0) masked = true;
            }
            out.u.at(i, j) = masked ? missing : e;
        }
    return out;
}

namespace {

bool is_other_label(const std::string& name) {
    if (name.size() != 5) return false;
    static const char* lower = "other";
    for (std::size_t i = 0; i < 5; ++i)
        if (std::tolower(static_cast<unsigned char>(name[i])) != lower[i]) return false;
    return true;
}

}  // namespace

FisherResult fisher_screen(const ContinTable& t, const std::vector<std::string>& class_labels,
                           double alpha, bool exclude_same_class, int threads) {
    const std::size_t I = t.n_rows, J = t.n_cols;
    if (!class_labels.empty() && class_labels.size() != J)
        fail(errc::dimension_mismatch, "class labels do not match the number of drug columns");
    std::vector<std::string> classes(J);
    if (!class_labels.empty()) {
        classes = class_labels;
    } else {
        // default layout: named drugs form one class, an "Other" column (any
        // case) is the unrelated comparison pool
        for (std::size_t j = 0; j < J; ++j)
            classes[j] = is_other_label(t.col_names[j]) ? "other" : "drug";
    }
    std::vector<std::vector<std::size_t>> pool(J);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < J; ++k) {
            if (k == j) continue;
            if (exclude_same_class && classes[k] == classes[j]) continue;
            pool[j].push_back(k);
        }
    FisherResult out;
    out.pval = LabeledMatrix(I, J, missing);
    out.pval.row_names = t.row_names;
    out.pval.col_names = t.col_names;
    out.signal = LabeledMatrix::like(out.pval, missing);
    std::vector<std::int64_t> pool_total(J, 0);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k : pool[j]) pool_total[j] += t.col_totals[k];
        bool needed = false;
        for (std::size_t i = 0; i < I && !needed; ++i) {
            const std::int64_t v = t.at(i, j);
            needed = v > 0 && v <= 5;
        }
        if (needed && pool[j].empty())
            fail(errc::no_comparison_columns,
                 "column " + t.col_names[j] + " has no comparison columns left");
    }
    const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            const std::int64_t a = t.at(i, j);
            if (a <= 0 || a > 5) continue;
            std::int64_t b = 0;
            for (std::size_t k : pool[j]) b += t.at(i, k);
            const std::int64_t c = t.col_totals[j] - a;
            const std::int64_t d = pool_total[j] - b;
            const double p = fisher_exact_greater(a, b, c, d);
            out.pval.at(i, j) = p;
            out.signal.at(i, j) = p <= alpha ? 1.0 : 0.0;
        }
    }
    return out;
}

ConnectedAeGraph connect_aes(const LabeledMatrix& u, double c_corr, Orientation orientation) {
    if (!(c_corr >= 0.0 && c_corr <= 1.0))
        fail(errc::invalid_argument, "correlation threshold must be in [0, 1]");
    const LabeledMatrix oriented = orientation == Orientation::column ? transpose(u) : u;
    const std::size_t rows = oriented.n_rows, cols = oriented.n_cols;
    ConnectedAeGraph g;
    g.c_corr = c_corr;
    g.orientation = orientation;
    g.neighbors.assign(rows, {});
    for (std::size_t i = 0; i < rows; ++i) {
        const double* xi = oriented.values.data() + i * cols;
        for (std::size_t k = i + 1; k < rows; ++k) {
            const double* xk = oriented.values.data() + k * cols;
            const PairStats st = pairwise_stats(xk, xi, cols);  // x = donor row k
            if (st.n < 3) continue;
            const double cor = st.cor();
            if (is_missing(cor) || std::abs(cor) < c_corr) continue;
            g.neighbors[i].push_back({k, cor, st});
            // mirrored stats: swap the x/y roles for predicting row k from i
            PairStats rev = st;
            std::swap(rev.mean_x, rev.mean_y);
            std::swap(rev.ss_x, rev.ss_y);
            g.neighbors[k].push_back({i, cor, rev});
        }
    }
    return g;
}

FittedMatrix fit_predictions(const LabeledMatrix& u, const ConnectedAeGraph& g) {
    const LabeledMatrix oriented = g.orientation == Orientation::column ? transpose(u) : u;
    const std::size_t rows = oriented.n_rows, cols = oriented.n_cols;
    if (g.neighbors.size() != rows)
        fail(errc::dimension_mismatch, "graph was built from a different matrix");
    FittedMatrix out;
    out.values = LabeledMatrix::like(oriented, missing);
    for (std::size_t i = 0; i < rows; ++i) {
        if (g.neighbors[i].empty()) continue;
        struct Donor {
            std::size_t k;
            double alpha, beta, weight;
        };
        std::vector<Donor> donors;
        donors.reserve(g.neighbors[i].size());
        for (const AeEdge& edge : g.neighbors[i]) {
            const double beta = edge.stats.slope();
            const double alpha = edge.stats.intercept();
            donors.push_back({edge.k, alpha, beta, std::abs(edge.cor)});
            out.pairs.push_back({i, edge.k, alpha, beta, std::abs(edge.cor)});
        }
        for (std::size_t j = 0; j < cols; ++j) {
            double acc = 0.0, wsum = 0.0;
            for (const Donor& d : donors) {
                const double ukj = oriented.at(d.k, j);
                if (is_missing(ukj)) continue;
                acc += d.weight * (d.alpha + d.beta * ukj);
                wsum += d.weight;
            }
            if (wsum > 0.0) out.values.at(i, j) = acc / wsum;
        }
    }
    if (g.orientation == Orientation::column) out.values = transpose(out.values);
    return out;
}

StandardizeResult standardize_and_test(const LabeledMatrix& res, const FittedMatrix& fit,
                                       bool bh_per_column) {
    const LabeledMatrix& hat = fit.values;
    if (hat.n_rows != res.n_rows || hat.n_cols != res.n_cols)
        fail(errc::dimension_mismatch, "fitted matrix does not match the residuals");
    const std::size_t I = res.n_rows, J = res.n_cols;
    StandardizeResult out;
    out.pval = LabeledMatrix::like(res, missing);
    out.col_shift.assign(J, missing);
    out.col_scale.assign(J, missing);
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<std::size_t> idx;
        std::vector<double> dev;
        for (std::size_t i = 0; i < I; ++i) {
            const double e = res.at(i, j);
            const double h = hat.at(i, j);
            if (is_missing(e) || is_missing(h)) continue;
            idx.push_back(i);
            dev.push_back(e - h);
        }
        const std::string col = res.col_names.empty() ? std::to_string(j + 1) : res.col_names[j];
        if (idx.size() < 2) {
            out.warnings.push_back("column " + col +
                                   ": fewer than 2 usable cells; scores suppressed");
            continue;
        }
        double mean = 0.0;
        for (double d : dev) mean += d;
        mean /= double(dev.size());
        double var = 0.0;
        for (double d : dev) var += (d - mean) * (d - mean);
        var /= double(dev.size());
        out.col_shift[j] = mean;
        const double tiny = 1e-14 * (std::abs(mean) + 1e-14);
        if (var <= tiny * tiny) {
            out.warnings.push_back("column " + col +
                                   ": deviations have zero variance; scores suppressed");
            continue;
        }
        out.col_scale[j] = var;
        const double sd = std::sqrt(var);
        for (std::size_t m = 0; m < idx.size(); ++m)
            out.pval.at(idx[m], j) = normal_upper_tail((dev[m] - mean) / sd);
    }
    if (bh_per_column) {
        out.adj_pval = LabeledMatrix::like(out.pval, missing);
        std::vector<double> col(I);
        for (std::size_t j = 0; j < J; ++j) {
            for (std::size_t i = 0; i < I; ++i) col[i] = out.pval.at(i, j);
            const std::vector<double> adj = bh_adjust(col);
            for (std::size_t i = 0; i < I; ++i) out.adj_pval.at(i, j) = adj[i];
        }
    } else {
        const std::vector<double> adj = bh_adjust(out.pval.values);
        out.adj_pval = LabeledMatrix::like(out.pval, missing);
        out.adj_pval.values = adj;
    }
    return out;
}

MddcResult run_mddc(const ContinTable& t, const MddcOptions& options) {
    const LabeledMatrix res = std_pearson_residuals(t);
    MddcResult out;
    const LabeledMatrix blank = LabeledMatrix::like(res, missing);
    out.fisher_signal = blank;
    out.fisher_pval = blank;
    out.mc_pval = blank;

    UMatrixResult step2;
    if (options.method == Method::boxplot) {
        out.cutoffs = boxplot_cutoffs(res, t, options.coef, options.col_specific,
                                      options.separate, &out.warnings);
        step2 = build_u_matrix(res, t, out.cutoffs);
    } else {
        const NullMaxima null_max =
            mc_null_simulation(t, options.reps, options.seed, options.threads);
        out.cutoffs = mc_cutoffs(null_max, options.quantile_q, res, t, options.coef,
                                 options.col_specific, &out.warnings);
        out.mc_pval = mc_pvalues(null_max, res, t);
        const LabeledMatrix basis = options.adjust_univ_signal
                                        ? [&] {
                                              LabeledMatrix adj = out.mc_pval;
                                              adj.values = bh_adjust(adj.values);
                                              return adj;
                                          }()
                                        : out.mc_pval;
        LabeledMatrix mc_signal = LabeledMatrix::like(res, missing);
        for (std::size_t idx = 0; idx < basis.values.size(); ++idx) {
            const double p = basis.values[idx];
            if (is_missing(p)) continue;
            mc_signal.values[idx] = p <= options.signal_threshold ? 1.0 : 0.0;
        }
        step2 = build_u_matrix(res, t, out.cutoffs, &mc_signal);
        const FisherResult fisher = fisher_screen(t, options.class_labels, options.alpha,
                                                  options.exclude_same_class, options.threads);
        out.fisher_pval = fisher.pval;
        out.fisher_signal = fisher.signal;
    }
    out.univariate_signal = step2.univariate_signal;

    const ConnectedAeGraph graph = connect_aes(step2.u, options.c_corr, options.orientation);
    const FittedMatrix fitted = fit_predictions(step2.u, graph);
    StandardizeResult scored = standardize_and_test(res, fitted, options.bh_per_column);
    out.corr_signal_pval = std::move(scored.pval);
    out.corr_signal_adj_pval = std::move(scored.adj_pval);
    out.col_shift = std::move(scored.col_shift);
    out.col_scale = std::move(scored.col_scale);
    out.warnings.insert(out.warnings.end(), scored.warnings.begin(), scored.warnings.end());
    return out;
}

}  // namespace mddc
