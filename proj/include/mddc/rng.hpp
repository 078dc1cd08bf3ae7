#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mddc {

// Counter-based generator (Philox4x32-10). A stream is identified by
// (seed, stream_id); distinct stream ids give independent sequences, so
// parallel replications can each own a stream and results do not depend on
// thread count or scheduling order.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on [0, 1), 53 random bits.
    double next_unit();
    // Uniform on (0, 1).
    double next_open_unit();
    // Standard normal (Marsaglia polar, spare deviate cached).
    double next_normal();
    // Binomial(n, p). Inversion for small n*p, transformed rejection
    // otherwise; exact in distribution for n up to table totals used here.
    std::int64_t next_binomial(std::int64_t n, double p);

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int block_pos_;
    double spare_normal_ = 0.0;
    bool have_spare_ = false;
};

// Multinomial(n, probs) via a chain of conditional binomials. probs must be
// nonnegative and sum to 1 within 1e-9; out receives one count per category
// and sums to n exactly.
void sample_multinomial(RngStream& rng, std::int64_t n, const std::vector<double>& probs,
                        std::vector<std::int64_t>& out);

}  // namespace mddc
