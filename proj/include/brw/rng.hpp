#pragma once

#include <cmath>
#include <cstdint>

namespace brw {

/// Counter-based pseudo-random generator (splitmix64).
///
/// The state is a counter advanced by a fixed odd increment; every output is
/// a finalizing hash of the counter. Substreams are derived by hashing the
/// construction seed together with a salt, so any number of statistically
/// independent streams can be split off deterministically - one stream per
/// (experiment, replica) - without coordination between workers. All
/// variate transformations below are written out explicitly so results are
/// bit-identical across platforms and thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Fair +1/-1 step.
  int fair_sign() { return (next_u64() >> 63) ? 1 : -1; }

  /// Uniform integer in [0, n). Bias is at most n / 2^64.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Independent child stream. Derivation uses the construction seed, not
  /// the current state, so substream(k) is reproducible no matter how many
  /// draws were consumed from this stream.
  Rng substream(std::uint64_t salt) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (2 * salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace brw
