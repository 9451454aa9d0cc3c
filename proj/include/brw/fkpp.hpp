#pragma once

#include <string>
#include <vector>

#include "brw/env.hpp"
#include "brw/walk.hpp"

namespace brw {

/// Real-valued function on a lattice window at a fixed time. Sites outside
/// the window are clamped to bc_left / bc_right when the discrete Laplacian
/// touches them; for front data the natural clamps are 0 on the left and 1
/// on the right, for summable data 0 on both sides.
struct LatticeField {
  Window window;
  std::vector<double> values;
  double time = 0.0;
  double bc_left = 0.0;
  double bc_right = 0.0;

  double at(int x) const;
  double& at(int x);
  /// Value inside the window, boundary clamp outside.
  double clamped(int x) const;
  /// Value inside the window, zero outside.
  double value_or_zero(int x) const;
  double sum() const;
  double max_abs() const;

  static LatticeField zeros(Window w, double bcl = 0.0, double bcr = 0.0);
  static LatticeField constant(Window w, double c);
  static LatticeField delta(int x, Window w);
};

void field_to_csv(const LatticeField& f, const std::string& path);

/// Method-of-lines options. Classic RK4 in time; dt is capped at 0.25 by the
/// spectral bound of the half Laplacian plus bounded reaction. zero_tol is
/// the dead zone used by all downstream sign logic.
struct IntegratorOpts {
  double dt = 0.01;
  int window_margin = 10;
  double zero_tol = 1e-12;
  bool parallel = true;

  void validate() const;
};

/// Integrates d/dt u = 1/2 lap u - kappa(t,x) u from u0.time to u0.time + t.
LatticeField integrate_linear(const LatticeField& u0, const Potential& kappa,
                              double t, const IntegratorOpts& opts);
/// Snapshots at u0.time + each entry of t_grid (ascending, nonnegative).
std::vector<LatticeField> integrate_linear_path(const LatticeField& u0,
                                                const Potential& kappa,
                                                const std::vector<double>& t_grid,
                                                const IntegratorOpts& opts);

/// Integrates the F-KPP equation d/dt w = 1/2 lap w + xi(x) w (1 - w);
/// solutions stay in [0,1] up to integration error.
LatticeField integrate_fkpp(const LatticeField& w0, const Environment& env,
                            double t, const IntegratorOpts& opts);
std::vector<LatticeField> integrate_fkpp_path(const LatticeField& w0,
                                              const Environment& env,
                                              const std::vector<double>& t_grid,
                                              const IntegratorOpts& opts);

/// Indicator of {y, y+1, ...} on the window, clamped 0 left / 1 right.
LatticeField front_indicator_ic(int y, Window window);

/// Largest y with w^y(t, 0) >= eps, where w^y solves F-KPP from the front
/// indicator at y. The search brackets y inside the Chernoff light cone and
/// verifies the defining pair w^{x_t} >= eps > w^{x_t + 1}.
int quantile_x_t(const Environment& env, double t, double eps,
                 const IntegratorOpts& opts);

/// Quantile at eps = 1/2.
int median_m_t(const Environment& env, double t, const IntegratorOpts& opts);

struct TightnessRow {
  double t = 0.0;
  int x_eps = 0;    // upper quantile (small eps)
  int median = 0;
  int x_1meps = 0;  // lower quantile (1 - eps)
  int spread = 0;   // x_eps - x_1meps >= 0
};

std::vector<TightnessRow> tightness_scan(const Environment& env,
                                         const std::vector<double>& t_grid,
                                         double eps,
                                         const IntegratorOpts& opts);

struct WaveTimeRow {
  int y = 0;
  double t = 0.0;
  double w_start = 0.0;   // w^y(t, 0)
  bool qualifies = false; // w_start >= eps
  bool found = false;     // some tested t' reached 1 - eps
  double u = 0.0;         // smallest tested t' with w^y(t+t',0) >= 1-eps
};

struct WaveTimeReport {
  std::vector<WaveTimeRow> rows;
  double max_u = 0.0;   // over qualifying rows that found a wave time
  bool all_found = true;
  double grid_step = 0.0;
};

/// Empirical probe of the uniform wave time: for every tested (y, t) with
/// w^y(t,0) >= eps, records the smallest t' on a grid with
/// w^y(t+t',0) >= 1-eps. Report-only.
WaveTimeReport wave_time_probe(const Environment& env,
                               const std::vector<int>& y_list,
                               const std::vector<double>& t_grid, double eps,
                               double u_budget, const IntegratorOpts& opts);

}  // namespace brw
