#ifndef HYBOWAVE_RANDOM_HPP
#define HYBOWAVE_RANDOM_HPP

#include <cstdint>
#include <random>

namespace hwn {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose raw output sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so every
/// conversion below is written out explicitly:
///   - uniform()       : top 53 bits of one draw scaled by 2^-53, in [0, 1)
///   - below(n)        : rejection sampling on the raw 64-bit draw (unbiased)
///   - normal()        : Box-Muller from two uniform() draws, no caching
///
/// Derived streams (per epoch, per view) are seeded with SplitMix64 mixing of
/// (seed, stream id) so that nearby ids produce unrelated sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent generator for a named sub-stream of a base seed.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer uniformly distributed in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace hwn

#endif  // HYBOWAVE_RANDOM_HPP
