#pragma once

#include <cstdint>

namespace kdq {

/// Deterministic splitmix64 generator. Used instead of <random> engines +
/// distributions because std distribution outputs are implementation-defined
/// and would break cross-platform reproducibility of seeded runs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent substream seed for a numbered stream (e.g. one
/// per sampling chunk), so parallel workers never share generator state.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  mix.next();
  return mix.next();
}

}  // namespace kdq
