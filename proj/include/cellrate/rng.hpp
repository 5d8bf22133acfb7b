#pragma once

#include <complex>
#include <cstdint>

namespace cellrate {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based random stream: output i is mix64(key + i*golden), so draws
// depend only on (key, counter). Streams are value types; copying one forks
// the sequence deterministically. Keys for substreams come from derive_key,
// which is how the simulator splits a master seed into per-trial,
// per-purpose streams that stay stable across thread counts and platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  static std::uint64_t derive_key(std::uint64_t key, std::uint64_t salt) {
    return mix64(key ^ (mix64(salt + 0x9e3779b97f4a7c15ULL) + 0x632be59bd9b4e019ULL));
  }

  RngStream substream(std::uint64_t salt) const {
    return RngStream(derive_key(key_, salt));
  }

  std::uint64_t next_u64() {
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1); safe under log().
  double next_open_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n); n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t u = next_u64();
      if (u >= threshold) return u % n;
    }
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double next_normal();

  // Circularly symmetric complex Gaussian, unit variance (re/im each N(0,1/2)).
  std::complex<double> next_cgauss() {
    const double re = next_normal();
    const double im = next_normal();
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return {re * inv_sqrt2, im * inv_sqrt2};
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cellrate
