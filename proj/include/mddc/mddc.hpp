#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/cutoffs.hpp"
#include "mddc/matrix.hpp"
#include "mddc/stats.hpp"

namespace mddc {

enum class Method { boxplot, monte_carlo };
enum class Orientation { row, column };

struct MddcOptions {
    Method method = Method::monte_carlo;
    std::vector<double> coef{1.5};  // boxplot coefficient, broadcast or per column
    bool col_specific = true;
    bool separate = true;
    double c_corr = 0.8;
    Orientation orientation = Orientation::row;
    int reps = 10000;
    double quantile_q = 0.95;
    bool exclude_same_class = true;
    std::vector<std::string> class_labels;  // optional, one per drug column
    double alpha = 0.05;               // Fisher screening threshold
    double signal_threshold = 0.05;    // MC univariate signal rule on mc_pval
    bool adjust_univ_signal = false;   // apply BH to mc_pval before thresholding
    bool bh_per_column = false;        // step-5 BH family per column instead of whole table
    std::uint64_t seed = 0;
    int threads = 0;
};

struct UMatrixResult {
    LabeledMatrix u;
    LabeledMatrix univariate_signal;  // {0,1,MISSING}
};

// Masks outlying residuals: nonzero cells with |e| > c+ and zero cells with
// e < c0 become MISSING; everything else keeps e. The default signal rule is
// upper-tail only (nonzero cell, e > c+). signal_override, when given,
// replaces the signal matrix and its 1-cells are additionally masked so that
// a flagged cell is always MISSING in u.
UMatrixResult build_u_matrix(const LabeledMatrix& res, const ContinTable& t, const CutoffSet& cut,
                             const LabeledMatrix* signal_override = nullptr);

struct FisherResult {
    LabeledMatrix pval;    // MISSING except cells with 0 < n <= 5
    LabeledMatrix signal;  // {0,1,MISSING}, same support
};

// One-sided Fisher exact screening of sparse cells (0 < n <= 5) against the
// pooled comparison columns. With exclude_same_class and no explicit labels,
// every named drug column forms one class and any column literally named
// "Other" (case-insensitive) is the comparison pool.
FisherResult fisher_screen(const ContinTable& t, const std::vector<std::string>& class_labels,
                           double alpha, bool exclude_same_class, int threads = 0);

struct AeEdge {
    std::size_t k;    // connected row index (in the oriented matrix)
    double cor;
    PairStats stats;  // pairwise-complete moments behind cor, reused for OLS
};

struct ConnectedAeGraph {
    double c_corr = 0.8;
    Orientation orientation = Orientation::row;
    std::vector<std::vector<AeEdge>> neighbors;  // per oriented row
};

// Pairwise-complete Pearson correlations between rows of u (columns when
// orientation is column); pairs need >= 3 complete positions, nonzero
// variance on both sides, and |cor| >= c_corr.
ConnectedAeGraph connect_aes(const LabeledMatrix& u, double c_corr,
                             Orientation orientation = Orientation::row);

struct PairFit {
    std::size_t row;
    std::size_t k;
    double alpha;
    double beta;
    double weight;  // |cor|, before per-column renormalization
};

struct FittedMatrix {
    LabeledMatrix values;        // predictions, MISSING where no donor is available
    std::vector<PairFit> pairs;  // per-pair regression diagnostics
};

// OLS of each row on its connected rows over their complete positions;
// predictions are |cor|-weighted means, renormalized over the donors actually
// available in each column.
FittedMatrix fit_predictions(const LabeledMatrix& u, const ConnectedAeGraph& g);

struct StandardizeResult {
    LabeledMatrix pval;
    LabeledMatrix adj_pval;
    std::vector<double> col_shift;  // per-column mean of e - prediction
    std::vector<double> col_scale;  // per-column population variance of the same
    Warnings warnings;
};

// Centers and scales e - prediction within each column (population variance),
// turns the scores into upper-tail normal p-values, and BH-adjusts them (one
// family over the whole table unless bh_per_column).
StandardizeResult standardize_and_test(const LabeledMatrix& res, const FittedMatrix& fit,
                                       bool bh_per_column = false);

struct MddcResult {
    LabeledMatrix univariate_signal;
    LabeledMatrix fisher_signal;
    LabeledMatrix fisher_pval;
    LabeledMatrix mc_pval;
    LabeledMatrix corr_signal_pval;
    LabeledMatrix corr_signal_adj_pval;
    std::vector<double> col_shift;
    std::vector<double> col_scale;
    CutoffSet cutoffs;
    Warnings warnings;
};

MddcResult run_mddc(const ContinTable& t, const MddcOptions& options);

LabeledMatrix transpose(const LabeledMatrix& m);

}  // namespace mddc
