#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "brw/env.hpp"
#include "brw/fkpp.hpp"
#include "brw/rng.hpp"

namespace brw {

/// State of the branching random walk at a fixed time: the multiset of
/// particle positions. Binary branching never kills, so the population is
/// non-decreasing; `capped` marks runs that hit the population cap and must
/// be discarded or censored by the caller.
struct ParticleSystem {
  std::vector<int> positions;
  double time = 0.0;
  long cap = 0;
  bool capped = false;

  long population() const { return static_cast<long>(positions.size()); }
};

/// Exact event-driven simulation: every particle jumps at rate 1 and splits
/// in two at rate xi(site); events are processed chronologically through a
/// global queue. Aborts if a particle leaves the environment window. If
/// snapshot_times is nonempty, populations at those times are written to
/// *populations.
ParticleSystem simulate_brwre(const Environment& env, int x0, double t_max,
                              long cap, Rng rng,
                              const std::vector<double>& snapshot_times = {},
                              std::vector<long>* populations = nullptr);

int max_position(const ParticleSystem& sys);

/// (N(t,y), N^>=(t,y)): particles at y and particles at or right of y.
std::pair<long, long> counts(const ParticleSystem& sys, int y);

struct CdfEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
  long capped_runs = 0;  // censored toward {M < y}
};

/// Empirical frequency of {M(t) >= y} from n_runs independent systems.
/// Capped runs are censored toward the miss direction and reported; the
/// call aborts if more than 1% of the runs hit the cap.
CdfEstimate estimate_max_cdf(const Environment& env, int x, int y, double t,
                             long n_runs, long cap, std::uint64_t seed,
                             bool parallel = true);

/// Monte Carlo estimate of 1 - E_x[prod_z (1 - w0(z))^{N(t,z)}], with the
/// convention 0^0 = 1. Solves the F-KPP equation in distribution.
CdfEstimate mckean_functional(const Environment& env, int x,
                              const LatticeField& w0, double t, long n_runs,
                              long cap, std::uint64_t seed,
                              bool parallel = true);

struct GrowthRow {
  double t = 0.0;
  double freq = 0.0;       // empirical P(N(t/2, x) <= t^2)
  double std_error = 0.0;
  long capped_runs = 0;
};

/// Probes the exponential growth of the local population.
std::vector<GrowthRow> growth_check(const Environment& env, int x,
                                    const std::vector<double>& t_grid,
                                    long n_runs, long cap, std::uint64_t seed,
                                    bool parallel = true);

}  // namespace brw
