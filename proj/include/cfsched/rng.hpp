#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cfsched {

// Philox4x32-10 block function (Salmon et al., SC 2011).  A pure function of
// (counter, key), so streams can be split by structuring the counter instead
// of sharing mutable state between workers.
namespace detail {

inline void philox4x32_round(std::array<std::uint32_t, 4>& x,
                             const std::array<std::uint32_t, 2>& k) {
    constexpr std::uint32_t mul_a = 0xD2511F53u;
    constexpr std::uint32_t mul_b = 0xCD9E8D57u;
    const std::uint64_t p0 = std::uint64_t(mul_a) * x[0];
    const std::uint64_t p1 = std::uint64_t(mul_b) * x[2];
    const std::uint32_t lo0 = std::uint32_t(p0), hi0 = std::uint32_t(p0 >> 32);
    const std::uint32_t lo1 = std::uint32_t(p1), hi1 = std::uint32_t(p1 >> 32);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t bump_a = 0x9E3779B9u;
    constexpr std::uint32_t bump_b = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        philox4x32_round(counter, key);
        key[0] += bump_a;
        key[1] += bump_b;
    }
    return counter;
}

}  // namespace detail

// One independent random stream, keyed by (seed, trial, slot, relay).  The
// block index occupies the fourth counter word, so a stream yields 2^32
// blocks of four 32-bit words each, and distinct stream ids never collide.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint32_t trial = 0, std::uint32_t slot = 0,
               std::uint32_t relay = 0)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          stream_{trial, slot, relay} {}

    std::uint64_t next_u64() {
        if (have_half_) {
            have_half_ = false;
            return (std::uint64_t(block_[2]) << 32) | block_[3];
        }
        block_ = detail::philox4x32({stream_[0], stream_[1], stream_[2], block_index_++}, key_);
        have_half_ = true;
        return (std::uint64_t(block_[0]) << 32) | block_[1];
    }

    // Uniform on (0,1]; never returns 0 so log() in Box-Muller is safe.
    double uniform01() {
        return double((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform integer in [0, n) by rejection, bias-free.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_below: n == 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller; draws come in pairs.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 3> stream_;
    std::uint32_t block_index_ = 0;
    std::array<std::uint32_t, 4> block_{};
    bool have_half_ = false;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// L i.i.d. N(0,1) fading gains.
inline std::vector<double> sample_channel(std::size_t n_users, CounterRng& rng) {
    if (n_users < 1) throw std::invalid_argument("sample_channel: n_users < 1");
    std::vector<double> h(n_users);
    for (double& g : h) g = rng.normal();
    return h;
}

}  // namespace cfsched
