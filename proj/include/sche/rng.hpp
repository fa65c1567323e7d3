#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sche {

/// Derives a 64-bit value from (seed, stream_id) with SplitMix64. Used to
/// build independent, order-reproducible RNG substreams: stream k always
/// yields the same engine regardless of which worker runs it.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t a = splitmix64(seed ^ splitmix64(stream_id));
  const std::uint64_t b = splitmix64(a);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

/// Standard normal draws via Box-Muller on top of mt19937_64. Hand-rolled so
/// the byte stream is pinned by this code, not by the standard library's
/// normal_distribution implementation.
class GaussianStream {
 public:
  explicit GaussianStream(std::mt19937_64 engine) : engine_(std::move(engine)) {}
  GaussianStream(std::uint64_t seed, std::uint64_t stream_id)
      : engine_(make_stream(seed, stream_id)) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so log(u1) is finite; u2 in [0,1).
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sche
