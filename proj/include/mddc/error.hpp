#pragma once

#include <stdexcept>
#include <string>

namespace mddc {

enum class errc {
    negative_count,
    non_integral_count,
    empty_table,
    duplicate_label,
    empty_data,
    bad_probability_vector,
    not_psd,
    coef_length_mismatch,
    all_infinite,
    no_convergence,
    no_comparison_columns,
    marginal_mismatch,
    retry_exhausted,
    dimension_mismatch,
    parse_error,
    io_error,
    unknown_fixture,
    invalid_argument,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& message);
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] void fail(errc code, const std::string& message);

}  // namespace mddc
