#pragma once

#include <cstdint>
#include <limits>

namespace iqmr {

/// splitmix64 generator. Cheap enough to construct at every draw site, which
/// is what makes keyed substreams practical: every stochastic event in the
/// simulator owns a generator derived from (seed, stream, keys...) instead of
/// consuming from one shared sequence. Changing one config knob therefore
/// never perturbs unrelated draws, and parameter sweeps share common random
/// numbers by construction.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(operator()() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return operator()() % n; }

 private:
  std::uint64_t state_;
};

/// Independent stream families. Values are part of the determinism contract:
/// renumbering changes every seeded run.
enum class Stream : std::uint64_t {
  kDeploy = 1,
  kMobility = 2,
  kFading = 3,
  kCoverage = 4,
  kPolicy = 5,
  kReentry = 6,
  kScenario = 7,
  kSteer = 8,
};

namespace detail {
inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  std::uint64_t z = h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Generator for the substream identified by (seed, stream, a, b, c).
inline SplitMix64 substream(std::uint64_t seed, Stream stream,
                            std::uint64_t a = 0, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
  std::uint64_t h = detail::mix(seed, static_cast<std::uint64_t>(stream));
  h = detail::mix(h, a);
  h = detail::mix(h, b);
  h = detail::mix(h, c);
  return SplitMix64(h);
}

}  // namespace iqmr
