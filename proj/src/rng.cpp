#include "mddc/rng.hpp"

#include <cmath>
#include <cstdlib>

#include "mddc/error.hpp"

namespace mddc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * x[0];
    const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * x[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) philox_round(ctr, key);
    return ctr;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : block_pos_(4) {
    key_ = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
    counter_ = {0, 0, std::uint32_t(stream_id), std::uint32_t(stream_id >> 32)};
}

void RngStream::refill() {
    block_ = philox10(counter_, key_);
    block_pos_ = 0;
    if (++counter_[0] == 0) ++counter_[1];  // 64-bit block index
}

std::uint32_t RngStream::next_u32() {
    if (block_pos_ == 4) refill();
    return block_[block_pos_++];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RngStream::next_unit() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open_unit() {
    for (;;) {
        const double u = next_unit();
        if (u > 0.0) return u;
    }
}

double RngStream::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_unit() - 1.0;
        v = 2.0 * next_unit() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    have_spare_ = true;
    return u * f;
}

namespace {

// Inversion by sequential search, valid while n*q stays small (the caller
// guarantees n*q < 10 so the pmf start never underflows).
std::int64_t binomial_inversion(RngStream& rng, std::int64_t n, double q) {
    const double s = q / (1.0 - q);
    const double f0 = std::pow(1.0 - q, double(n));
    double u = rng.next_unit();
    double f = f0;
    std::int64_t k = 0;
    while (u >= f) {
        u -= f;
        ++k;
        if (k > n) return n;  // fp tail guard
        f *= s * double(n - k + 1) / double(k);
    }
    return k;
}

// Stirling tail: log(k!) - [k log k - k + 0.5 log(2 pi k)].
double stirling_tail(double k) {
    static const double table[] = {
        0.0810614667953272,  0.0413406959554092,  0.0276779256849983,
        0.02079067210376509, 0.0166446911898211,  0.0138761288230707,
        0.0118967099458917,  0.0104112652619720,  0.00925546218271273,
        0.00833056343336287,
    };
    if (k < 10.0) return table[int(k)];
    const double kp1sq = (k + 1.0) * (k + 1.0);
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / kp1sq) / kp1sq) / (k + 1.0);
}

// Transformed rejection with squeeze (BTRS), for n*q >= 10, q <= 0.5.
std::int64_t binomial_btrs(RngStream& rng, std::int64_t n, double q) {
    const double nd = double(n);
    const double stddev = std::sqrt(nd * q * (1.0 - q));
    const double b = 1.15 + 2.53 * stddev;
    const double a = -0.0873 + 0.0248 * b + 0.01 * q;
    const double c = nd * q + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double r = q / (1.0 - q);
    const double alpha = (2.83 + 5.1 / b) * stddev;
    const double m = std::floor((nd + 1.0) * q);
    for (;;) {
        const double u = rng.next_unit() - 0.5;
        double v = rng.next_unit();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > nd) continue;
        if (us >= 0.07 && v <= v_r) return std::int64_t(kd);
        v = std::log(v * alpha / (a / (us * us) + b));
        const double upper =
            (m + 0.5) * std::log((m + 1.0) / (r * (nd - m + 1.0))) +
            (nd + 1.0) * std::log((nd - m + 1.0) / (nd - kd + 1.0)) +
            (kd + 0.5) * std::log(r * (nd - kd + 1.0) / (kd + 1.0)) +
            stirling_tail(m) + stirling_tail(nd - m) - stirling_tail(kd) -
            stirling_tail(nd - kd);
        if (v <= upper) return std::int64_t(kd);
    }
}

}  // namespace

std::int64_t RngStream::next_binomial(std::int64_t n, double p) {
    if (n < 0 || !(p >= 0.0) || p > 1.0)
        fail(errc::invalid_argument, "binomial requires n >= 0 and p in [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flipped = p > 0.5;
    const double q = flipped ? 1.0 - p : p;
    std::int64_t k;
    if (double(n) * q < 10.0)
        k = binomial_inversion(*this, n, q);
    else
        k = binomial_btrs(*this, n, q);
    return flipped ? n - k : k;
}

void sample_multinomial(RngStream& rng, std::int64_t n, const std::vector<double>& probs,
                        std::vector<std::int64_t>& out) {
    if (probs.empty()) fail(errc::bad_probability_vector, "empty probability vector");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) fail(errc::bad_probability_vector, "negative or NaN probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        fail(errc::bad_probability_vector, "probabilities sum to " + std::to_string(total));
    out.assign(probs.size(), 0);
    std::int64_t remaining = n;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
        double cond = mass_left > 0.0 ? probs[i] / mass_left : 1.0;
        if (cond > 1.0) cond = 1.0;
        if (cond < 0.0) cond = 0.0;
        const std::int64_t k = rng.next_binomial(remaining, cond);
        out[i] = k;
        remaining -= k;
        mass_left -= probs[i];
        if (mass_left <= 0.0) mass_left = 0.0;
    }
    out.back() = remaining;
}

}  // namespace mddc
