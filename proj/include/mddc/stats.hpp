#pragma once

#include <cstdint>
#include <vector>

#include "mddc/rng.hpp"

namespace mddc {

// Type 7 quantile (linear interpolation, h = (n-1)q). Non-finite entries are
// dropped first; EmptyData if nothing remains.
double quantile(std::vector<double> data, double q);
// Same, for data already sorted ascending with no non-finite entries.
double quantile_sorted(const std::vector<double>& sorted, double q);

struct BoxplotStats {
    double q1;
    double q3;
    double iqr;
    double coef;
};

BoxplotStats boxplot_stats(const std::vector<double>& data, double coef);

struct Fences {
    double lower;
    double upper;
};

// Tukey fences: lower = Q1 - coef*IQR, upper = Q3 + coef*IQR.
Fences boxplot_fences(const std::vector<double>& data, double coef);

// P(Z >= z) for standard normal Z.
double normal_upper_tail(double z);

// log(k!), exact-table below 1024, Stirling series above.
double log_factorial(std::int64_t k);

// One-sided ("greater") Fisher exact p-value for the 2x2 table [[a, b], [c, d]]:
// P(X >= a) under the hypergeometric null with the table's margins.
double fisher_exact_greater(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);

// Benjamini-Hochberg step-up adjustment. Missing entries pass through and do
// not count toward the family size.
std::vector<double> bh_adjust(const std::vector<double>& p);

// Round to nearest integer, ties to even.
std::int64_t round_half_even(double x);

// Pairwise-complete moments for two equally indexed sequences. Positions where
// either value is non-finite are skipped.
struct PairStats {
    std::size_t n = 0;        // complete positions
    double mean_x = 0.0, mean_y = 0.0;
    double ss_x = 0.0, ss_y = 0.0, ss_xy = 0.0;  // centered sums of squares

    // Pearson correlation; MISSING when n < 2 or either variance is zero.
    double cor() const;
    // OLS slope/intercept for predicting y from x; caller checks ss_x > 0.
    double slope() const { return ss_xy / ss_x; }
    double intercept() const { return mean_y - slope() * mean_x; }
};

PairStats pairwise_stats(const double* x, const double* y, std::size_t len);

// Eigendecomposition of a symmetric matrix (cyclic Jacobi). vectors is
// row-major with eigenvectors in columns, ordered by descending eigenvalue.
struct SymEigen {
    std::size_t n = 0;
    std::vector<double> values;
    std::vector<double> vectors;
};

SymEigen sym_eigen(std::vector<double> a, std::size_t n);

// Projects a symmetric matrix to the nearest correlation-like PSD matrix:
// negative eigenvalues clipped to 0, then rescaled to unit diagonal.
std::vector<double> nearest_psd_corr(std::vector<double> a, std::size_t n);

// Zero-mean multivariate normal sampler from a covariance matrix. The matrix
// is symmetrized; an eigenvalue below -1e-8 raises NotPSD, small negatives
// are clipped to 0 before factorization.
class MvnFactor {
  public:
    MvnFactor() = default;
    MvnFactor(const std::vector<double>& cov, std::size_t dim);
    std::size_t dim() const { return n_; }
    void draw(RngStream& rng, double* out) const;

  private:
    std::size_t n_ = 0;
    std::size_t rank_ = 0;
    std::vector<double> factor_;  // L with L L^T = clipped covariance
};

std::vector<double> sample_mvn(RngStream& rng, const std::vector<double>& mean,
                               const std::vector<double>& cov);

}  // namespace mddc
