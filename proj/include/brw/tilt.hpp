#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brw/env.hpp"
#include "brw/walk.hpp"

namespace brw {

/// Parameters of the exponential tilt: eta <= 0 and the shifted potential
/// zeta(x) = xi(x) - es in [-delta, 0].
struct TiltParams {
  double eta = -1.0;
  Window window;
  std::vector<double> zeta;
  double delta = 0.0;

  void validate() const;
  double zeta_at(int x) const;

  static TiltParams from_environment(const Environment& env, double eta);
  static TiltParams homogeneous(double gamma, double eta, Window window,
                                double delta);
};

/// Closed form for the homogeneous partition value Z_{x,x+1} with
/// zeta == gamma: 1 - gamma - eta - sqrt((gamma+eta)(gamma+eta-2)), in (0,1].
double z_homogeneous(double gamma, double eta);

/// Closed form for the homogeneous speed sqrt((gamma+eta)(gamma+eta-2)).
double speed_homogeneous(double gamma, double eta);

struct ZmcResult {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
  long time_censored = 0;    // paths that missed y before t_cap
  long window_censored = 0;  // paths that left the zeta window
  /// Upper bound on the downward bias from censoring (censored paths
  /// contribute weight 0).
  double censor_bias_bound = 0.0;
};

/// Monte Carlo estimate of E_x[exp(int_0^{H_y} (zeta + eta))] over plain
/// random-walk paths, x <= y.
ZmcResult z_mc(const TiltParams& params, int x, int y, long n_samples,
               double t_cap, std::uint64_t seed, bool parallel = true);

/// Tilted chain on a window: jump rates lambda(x) = 1 - zeta(x) - eta,
/// partition values Z_{x,x+1} from the left-to-right recursion
/// Z_{x,x+1} = 1 / (2 lambda(x) - Z_{x-1,x}) seeded with the homogeneous
/// closed form, and the transition probabilities they induce. The first
/// burn_in sites absorb the seeding error (the recursion is a contraction)
/// and are excluded from the usable window.
class TiltedChain {
 public:
  TiltedChain(const TiltParams& params, int burn_in = 50);

  const Window& usable() const { return usable_; }
  int burn_in() const { return burn_in_; }
  double eta() const { return eta_; }

  double lambda(int x) const;
  double z_right(int x) const;   // Z_{x,x+1}, defined for x in [lo, hi-1]
  double p_right(int x) const;   // usable sites only
  double p_left(int x) const;

 private:
  std::size_t idx(int x) const;
  Window full_;
  Window usable_;
  int burn_in_;
  double eta_;
  std::vector<double> lambda_;
  std::vector<double> z_right_;
};

void chain_to_csv(const TiltedChain& chain, const std::string& path);

/// Holding time Exp(lambda(y)), step +1 with probability p_right(y).
/// Leaving the usable window aborts with diagnostics.
Trajectory simulate_tilted(const TiltedChain& chain, int x0, double t_max,
                           Rng rng);

/// E_x[H_{x+1}] by the first-step recursion
/// e_x = (1/lambda(x) + p_left(x) e_{x-1}) / p_right(x), seeded with the
/// homogeneous value burn_in sites to the left.
double expected_hit_one(const TiltedChain& chain, int x);

struct EtaBarResult {
  double eta_bar = 0.0;
  double residual = 0.0;   // |v * avg(e_x) - 1| at the root
  double avg_e = 0.0;
  double spatial_se = 0.0; // naive sd/sqrt(n) of e_x over the window
};

/// Solves v = 1 / avg(e_x) for eta by bisection, the spatial average over a
/// long environment window standing in for the annealed expectation.
/// Requires v > sqrt(delta (2 + delta)). Monotonicity of eta -> avg(e_x) is
/// asserted along the way.
EtaBarResult solve_eta_bar(const Environment& env, double v, double tol);

struct VelocityConstants {
  double v1 = 0.0;        // es + 2, exact
  double v2 = 0.0;        // inf{v > v1+1 : |eta_bar(v)| >= 2 v1 + 2}
  double vc_upper = 0.0;  // sqrt(delta (2 + delta)), exact
};

VelocityConstants velocity_constants(const Environment& env, double tol);

/// Three discrete walks driven by one shared uniform per step (ordered
/// p_right thresholds) plus one shared exponential sequence feeding the
/// three counting-process clocks, so the pathwise order
/// Y^{0,eta} <= Y^{zeta,eta} <= Y^{-delta,eta} and the clock order are exact
/// sample properties, not statistical ones.
struct CoupledTriple {
  int x0 = 0;
  std::vector<int> y_zero;    // zeta == 0
  std::vector<int> y_env;     // given zeta
  std::vector<int> y_delta;   // zeta == -delta
  // tau[m] = time of the m-th jump of each counting process (tau[0] = 0)
  std::vector<double> tau_zero;
  std::vector<double> tau_env;
  std::vector<double> tau_delta;
};

CoupledTriple coupled_triple(const TiltParams& params, int x0, int n_steps,
                             Rng rng);

/// Continuous-time hitting time of y for one leg of a coupled triple.
std::optional<double> coupled_hitting_time(const std::vector<int>& path,
                                           const std::vector<double>& tau,
                                           int y);

struct HittingOrderReport {
  bool coupled_mode = false;
  long violations = 0;       // coupled mode: samplewise order breaks
  long samples = 0;
  // independent mode: one row per t in the grid
  std::vector<double> t_grid;
  std::vector<double> cdf_zero, cdf_env, cdf_delta;
  std::vector<double> se_zero, se_env, se_delta;
  bool ordered_within_3se = true;
};

/// Checks P_x^{0,eta}(H_y <= t) <= P_x^{zeta,eta}(H_y <= t) <=
/// P_x^{-delta,eta}(H_y <= t): exactly on coupled samples, or within
/// 3 standard errors on independent ensembles.
HittingOrderReport hitting_order_check(const TiltParams& params, int x, int y,
                                       const std::vector<double>& t_grid,
                                       long n_samples, std::uint64_t seed,
                                       bool coupled, bool parallel = true);

}  // namespace brw
