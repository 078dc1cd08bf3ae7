#include "mddc/contin_table.hpp"

#include <cmath>
#include <unordered_set>

#include "mddc/error.hpp"
#include "mddc/stats.hpp"

namespace mddc {

void ContinTable::recompute_totals() {
    row_totals.assign(n_rows, 0);
    col_totals.assign(n_cols, 0);
    grand_total = 0;
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < n_cols; ++j) {
            const std::int64_t v = counts[i * n_cols + j];
            row_totals[i] += v;
            col_totals[j] += v;
            grand_total += v;
        }
}

namespace {

std::vector<std::string> fix_labels(const std::vector<std::string>& given, std::size_t count,
                                    const std::string& prefix, bool strict, Warnings* warnings) {
    std::vector<std::string> labels(count);
    bool generated_any = false;
    for (std::size_t i = 0; i < count; ++i) {
        if (i < given.size() && !given[i].empty()) {
            labels[i] = given[i];
        } else {
            labels[i] = prefix + "_" + std::to_string(i + 1);
            generated_any = true;
        }
    }
    if (generated_any && warnings)
        warnings->push_back("generated missing " + prefix + " labels");
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < count; ++i) {
        if (seen.insert(labels[i]).second) continue;
        if (strict) fail(errc::duplicate_label, "duplicate label \"" + labels[i] + "\"");
        std::size_t k = 2;
        std::string candidate;
        do {
            candidate = labels[i] + "_" + std::to_string(k++);
        } while (seen.count(candidate));
        if (warnings)
            warnings->push_back("renamed duplicate label \"" + labels[i] + "\" to \"" +
                                candidate + "\"");
        labels[i] = candidate;
        seen.insert(labels[i]);
    }
    return labels;
}

}  // namespace

ContinTable validate_and_fix(const LabeledMatrix& raw, bool strict, Warnings* warnings) {
    if (raw.n_rows < 2 || raw.n_cols < 2)
        fail(errc::empty_table, "need at least 2 rows and 2 columns, got " +
                                    std::to_string(raw.n_rows) + "x" + std::to_string(raw.n_cols));
    ContinTable t;
    t.n_rows = raw.n_rows;
    t.n_cols = raw.n_cols;
    t.counts.resize(raw.n_rows * raw.n_cols);
    bool rounded_any = false;
    for (std::size_t idx = 0; idx < raw.values.size(); ++idx) {
        const double v = raw.values[idx];
        if (!std::isfinite(v) || v < 0.0)
            fail(errc::negative_count, "cell " + std::to_string(idx) + " is negative or not a number");
        if (v == std::floor(v)) {
            t.counts[idx] = std::int64_t(v);
        } else if (strict) {
            fail(errc::non_integral_count, "cell " + std::to_string(idx) + " is not an integer");
        } else {
            t.counts[idx] = round_half_even(v);
            rounded_any = true;
        }
    }
    if (rounded_any && warnings) warnings->push_back("rounded non-integral counts half-to-even");
    t.row_names = fix_labels(raw.row_names, t.n_rows, "AE", strict, warnings);
    t.col_names = fix_labels(raw.col_names, t.n_cols, "drug", strict, warnings);
    t.recompute_totals();
    if (t.grand_total <= 0) fail(errc::empty_table, "grand total is zero");
    return t;
}

LabeledMatrix expected_counts(const ContinTable& t) {
    LabeledMatrix e(t.n_rows, t.n_cols);
    e.row_names = t.row_names;
    e.col_names = t.col_names;
    const double total = double(t.grand_total);
    for (std::size_t i = 0; i < t.n_rows; ++i) {
        const double ri = double(t.row_totals[i]);
        for (std::size_t j = 0; j < t.n_cols; ++j)
            e.at(i, j) = ri * double(t.col_totals[j]) / total;
    }
    return e;
}

LabeledMatrix std_pearson_residuals(const ContinTable& t) {
    LabeledMatrix r(t.n_rows, t.n_cols);
    r.row_names = t.row_names;
    r.col_names = t.col_names;
    const double total = double(t.grand_total);
    // Factored so the Monte-Carlo kernels can evaluate the identical
    // expression (same operation order, hence bit-identical results).
    std::vector<double> col_factor(t.n_cols);
    for (std::size_t j = 0; j < t.n_cols; ++j) {
        const double cj = double(t.col_totals[j]);
        col_factor[j] = cj * (1.0 - cj / total);
    }
    for (std::size_t i = 0; i < t.n_rows; ++i) {
        const std::int64_t ri = t.row_totals[i];
        const double rid = double(ri);
        const double row_factor = rid * (1.0 - rid / total) / total;
        for (std::size_t j = 0; j < t.n_cols; ++j) {
            const std::int64_t cj = t.col_totals[j];
            if (ri == 0 || cj == 0 || ri == t.grand_total || cj == t.grand_total) {
                r.at(i, j) = missing;
                continue;
            }
            const double expected = rid * double(cj) / total;
            r.at(i, j) =
                (double(t.at(i, j)) - expected) / std::sqrt(row_factor * col_factor[j]);
        }
    }
    return r;
}

}  // namespace mddc
