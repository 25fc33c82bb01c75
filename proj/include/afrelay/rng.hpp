#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace afrelay {

/// Counter-based Philox4x64-10 generator.
///
/// The key is (seed, stream) and the counter carries (block, substream), so
/// independent streams can be derived by value: a Monte Carlo trial gets
/// Philox(seed, trial, substream) and reproduces its draws regardless of the
/// order trials execute in.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0,
                  std::uint64_t substream = 0)
      : key0_(seed), key1_(stream), ctr1_(substream) {}

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      block(ctr0_++, out_);
      pos_ = 0;
    }
    return out_[pos_++];
  }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Circularly-symmetric complex Gaussian with unit total variance:
  /// real and imaginary parts are independent N(0, 1/2).
  std::complex<double> next_cgaussian() {
    const double re = next_gaussian();
    const double im = next_gaussian();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

 private:
  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    const unsigned __int128 p =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  void block(std::uint64_t block_index, std::uint64_t out[4]) const {
    constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    std::uint64_t c0 = block_index, c1 = ctr1_, c2 = 0, c3 = 0;
    std::uint64_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, c0, hi0, lo0);
      mulhilo(kMul1, c2, hi1, lo1);
      const std::uint64_t n0 = hi1 ^ c1 ^ k0;
      const std::uint64_t n1 = lo1;
      const std::uint64_t n2 = hi0 ^ c3 ^ k1;
      const std::uint64_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
  }

  std::uint64_t key0_, key1_;
  std::uint64_t ctr0_ = 0;
  std::uint64_t ctr1_ = 0;
  std::uint64_t out_[4] = {};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace afrelay
