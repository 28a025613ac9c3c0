#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace tmom {

namespace detail {

// Philox4x32-10 block cipher (Salmon et al., "Parallel random numbers: as easy
// as 1, 2, 3"). Counter-based, so any block of any stream can be generated
// without sequencing through its predecessors.
struct philox4x32 {
  static constexpr std::uint32_t mult0 = 0xD2511F53u;
  static constexpr std::uint32_t mult1 = 0xCD9E8D57u;
  static constexpr std::uint32_t weyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t weyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0;; ++round) {
      const std::uint64_t p0 = std::uint64_t(mult0) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(mult1) * ctr[2];
      ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
             std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
      if (round == 9) return ctr;
      key[0] += weyl0;
      key[1] += weyl1;
    }
  }
};

}  // namespace detail

/// Deterministic substream of a root seed.
///
/// Addressing scheme (fixed; results must not depend on scheduling):
///   key          = 64-bit root seed
///   counter[0]   = running block index within the substream
///   counter[1,2] = 64-bit substream index (row / realization / resample)
///   counter[3]   = stream kind tag
/// Two streams with different (kind, index) never overlap, so per-row or
/// per-resample generation can run in parallel and still produce exactly
/// the values serial execution would.
class rng_stream {
 public:
  enum class kind : std::uint32_t {
    generic = 0,
    mvln_rows = 1,
    standardized_rows = 2,
    channel_paths = 3,
    channel_noise = 4,
    bootstrap = 5,
  };

  rng_stream(std::uint64_t seed, kind k, std::uint64_t index)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        counter_{0u, std::uint32_t(index), std::uint32_t(index >> 32),
                 std::uint32_t(k)} {}

  explicit rng_stream(std::uint64_t seed) : rng_stream(seed, kind::generic, 0) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform on [0, 1), 53 random bits.
  double next_unit() {
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe as a log() argument.
  double next_unit_open() {
    return double((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Pairs are cached, so draws come in a
  /// fixed order independent of call-site grouping.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  /// Uniform integer in [0, n). Multiply-shift; bias is O(n / 2^64).
  std::uint64_t next_below(std::uint64_t n) {
    return std::uint64_t((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  /// Poisson by Knuth's product-of-uniforms method; fine for modest rates.
  std::uint64_t next_poisson(double rate) {
    const double limit = std::exp(-rate);
    std::uint64_t count = 0;
    double product = next_unit_open();
    while (product > limit) {
      ++count;
      product *= next_unit_open();
    }
    return count;
  }

 private:
  void refill() {
    block_ = detail::philox4x32::block(counter_, key_);
    ++counter_[0];
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tmom
