#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "brw/env.hpp"
#include "brw/rng.hpp"

namespace brw {

/// One move of a continuous-time path: at `time` the walker occupies `site`,
/// or entered the cemetery state when dead = true. After a cemetery event no
/// further events occur.
struct TrajectoryEvent {
  double time = 0.0;
  int site = 0;
  bool dead = false;
};

/// Event-list representation of a piecewise-constant path, so hitting times
/// and path integrals are exact functionals rather than grid samples.
struct Trajectory {
  int start = 0;
  double horizon = 0.0;
  std::vector<TrajectoryEvent> events;

  bool is_dead() const { return !events.empty() && events.back().dead; }
  /// Time of the cemetery event, if any.
  std::optional<double> lifetime() const;
  /// Site occupied just before time t (t <= horizon). Throws if the walk is
  /// already dead at t.
  int site_at(double t) const;
  /// Last lattice site visited (current site for a living path).
  int final_site() const;
};

/// CSV dump, one row per event; the cemetery is written as "DEAD".
void trajectory_to_csv(const Trajectory& traj, const std::string& path);

/// Bounded potential (t, x) -> kappa(t, x) with declared bounds. When the
/// potential is piecewise constant in time, `time_breaks` lists the
/// discontinuities so path integrals stay exact.
class Potential {
 public:
  Potential(std::function<double(double, int)> eval, double lo, double hi,
            std::vector<double> time_breaks = {});

  double operator()(double t, int x) const { return eval_(t, x); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& time_breaks() const { return time_breaks_; }

  static Potential constant(double c);
  /// kappa(t, x) = values[x - window.lo]; out-of-window access throws.
  static Potential site_field(std::vector<double> values, Window window);
  /// kappa(t, x) = xi(x) from the environment.
  static Potential from_environment(const Environment& env);
  /// Piecewise constant in time: epoch k (of length epoch_len) uses
  /// epoch_fields[k] on `window`; times past the last epoch reuse it.
  static Potential time_grid(double epoch_len,
                             std::vector<std::vector<double>> epoch_fields,
                             Window window);

 private:
  std::function<double(double, int)> eval_;
  double lo_;
  double hi_;
  std::vector<double> time_breaks_;
};

/// Exact integral of f(s, X_s) ds over [0, min(t_end, lifetime, horizon)]
/// for the piecewise-constant trajectory; segments are split at the
/// potential's time breaks, so no quadrature error for the supported
/// potential classes.
double path_integral(const Trajectory& traj, const Potential& f, double t_end);

/// Rate-one continuous-time simple random walk up to t_max.
Trajectory simulate_srw(int x0, double t_max, Rng rng);

/// First time the path sits at y; nullopt if not hit before horizon/death.
std::optional<double> hitting_time(const Trajectory& traj, int y);

/// Walk killed at rate kappa(t, x), implemented by thinning against the
/// bound kappa.hi(): kill proposals arrive at rate hi and are accepted with
/// probability kappa(t,x)/hi. Requires kappa.lo() > 0. The jump skeleton is
/// drawn from rng.substream(1) and equals simulate_srw(x0, t_max,
/// rng.substream(1)) event for event; the kill layer uses rng.substream(2).
Trajectory simulate_killed_walk(const Potential& kappa, int x0, double t_max,
                                Rng rng);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};

/// Survival probability P(lifetime > t) estimated two ways from the same
/// replica substreams: the thinned-kill indicator, and the expectation
/// formula exp(-int kappa) evaluated on the shared jump skeletons. The two
/// estimators agree in mean; the weight route is the Rao-Blackwellized one.
struct SurvivalEstimate {
  McEstimate indicator;
  McEstimate weight;
};

SurvivalEstimate survival_mc(const Potential& kappa, int x0, double t,
                             long n_samples, std::uint64_t seed,
                             bool parallel = true);

/// Unbiased estimate of E_x[exp(int_0^t xi(X_s) ds); X_t = y].
McEstimate feynman_kac_mc(const Potential& xi, int x, int y, double t,
                          long n_samples, std::uint64_t seed,
                          bool parallel = true);
McEstimate feynman_kac_mc(const Environment& env, int x, int y, double t,
                          long n_samples, std::uint64_t seed,
                          bool parallel = true);

}  // namespace brw
