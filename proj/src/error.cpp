#include "mddc/error.hpp"

namespace mddc {

const char* errc_name(errc code) {
    switch (code) {
        case errc::negative_count: return "NegativeCount";
        case errc::non_integral_count: return "NonIntegralCount";
        case errc::empty_table: return "EmptyTable";
        case errc::duplicate_label: return "DuplicateLabel";
        case errc::empty_data: return "EmptyData";
        case errc::bad_probability_vector: return "BadProbabilityVector";
        case errc::not_psd: return "NotPSD";
        case errc::coef_length_mismatch: return "CoefLengthMismatch";
        case errc::all_infinite: return "AllInfinite";
        case errc::no_convergence: return "NoConvergence";
        case errc::no_comparison_columns: return "NoComparisonColumns";
        case errc::marginal_mismatch: return "MarginalMismatch";
        case errc::retry_exhausted: return "RetryExhausted";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::parse_error: return "ParseError";
        case errc::io_error: return "IoError";
        case errc::unknown_fixture: return "UnknownFixture";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(errc code, const std::string& message) { throw Error(code, message); }

}  // namespace mddc
