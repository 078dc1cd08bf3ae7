#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace mddc {

// Sentinel for entries that carry no value (zero-marginal residuals, cells
// outside a method's domain, unavailable p-values). Propagates through
// arithmetic; serialized as "NA".
inline constexpr double missing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Dense row-major matrix of doubles with optional row/column labels.
struct LabeledMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;
    std::vector<std::string> row_names;  // empty or size n_rows
    std::vector<std::string> col_names;  // empty or size n_cols

    LabeledMatrix() = default;
    LabeledMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : n_rows(rows), n_cols(cols), values(rows * cols, fill) {}

    double& at(std::size_t i, std::size_t j) { return values[i * n_cols + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }

    // Same shape and labels as m, every entry set to fill.
    static LabeledMatrix like(const LabeledMatrix& m, double fill) {
        LabeledMatrix out(m.n_rows, m.n_cols, fill);
        out.row_names = m.row_names;
        out.col_names = m.col_names;
        return out;
    }
};

using Warnings = std::vector<std::string>;

}  // namespace mddc
