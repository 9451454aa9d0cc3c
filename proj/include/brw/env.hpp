#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

struct Window {
  int lo = 0;
  int hi = 0;

  int size() const { return hi - lo + 1; }
  bool contains(int x) const { return x >= lo && x <= hi; }
  bool contains(const Window& w) const { return w.lo >= lo && w.hi <= hi; }
};

enum class DistKind { two_point, uniform };

/// Law of a single branching rate. two_point puts mass p on es and 1-p on
/// ei; uniform draws from [ei, es]. Both keep rates inside [ei, es], with
/// 0 < ei <= es.
struct DistSpec {
  DistKind kind = DistKind::two_point;
  double ei = 1.0;
  double es = 2.0;
  double p = 0.5;  // P(rate = es), two_point only

  void validate() const;
};

/// Quenched branching-rate field on a finite lattice window. Immutable after
/// creation; safe to share read-only across parallel workers. Reading a rate
/// outside the window is an error, never an implicit extension.
class Environment {
 public:
  Environment(DistSpec dist, Window window, std::uint64_t seed,
              std::vector<double> rates);

  double rate_at(int x) const;
  const std::vector<double>& rates() const { return rates_; }
  const Window& window() const { return window_; }
  double ei() const { return dist_.ei; }
  double es() const { return dist_.es; }
  double delta() const { return dist_.es - dist_.ei; }
  const DistSpec& dist() const { return dist_; }
  std::uint64_t seed() const { return seed_; }

 private:
  DistSpec dist_;
  Window window_;
  std::uint64_t seed_;
  std::vector<double> rates_;
};

/// One independent draw per site; deterministic given (dist, window, seed).
Environment sample_environment(const DistSpec& dist, Window window,
                               std::uint64_t seed);

/// zeta(x) = xi(x) - es in [-delta, 0], and delta = es - ei.
struct ShiftedPotential {
  Window window;
  std::vector<double> zeta;
  double delta = 0.0;
};

ShiftedPotential shifted_potential(const Environment& env);

/// JSON round trip. Files carry a mandatory version field; loading validates
/// every stored rate against [ei, es].
void save_environment(const Environment& env, const std::string& path);
Environment load_environment(const std::string& path);

}  // namespace brw
