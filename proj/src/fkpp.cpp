#include "brw/fkpp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace brw {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Sites-per-row threshold below which the OpenMP site loop is not worth the
// fork/join overhead.
constexpr long kParallelThreshold = 2048;

// One RK4 stage derivative: out = 1/2 lap(v) + reaction(t, i, v[i]).
// Boundary neighbors use the constant clamps. Pure per-site map, so the
// parallel and serial paths produce bit-identical results.
template <class Reaction>
void rhs(const std::vector<double>& v, double bcl, double bcr, double t,
         const Reaction& reaction, std::vector<double>& out, bool parallel) {
  const long n = static_cast<long>(v.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && n >= kParallelThreshold)
#endif
  for (long i = 0; i < n; ++i) {
    const double left = i > 0 ? v[i - 1] : bcl;
    const double right = i + 1 < n ? v[i + 1] : bcr;
    const double lap = left - 2.0 * v[i] + right;
    out[i] = 0.5 * lap + reaction(t, i, v[i]);
  }
#ifndef _OPENMP
  (void)parallel;
#endif
}

template <class Reaction>
class Rk4Integrator {
 public:
  Rk4Integrator(LatticeField state, Reaction reaction, const IntegratorOpts& opts)
      : f_(std::move(state)), reaction_(std::move(reaction)), opts_(opts) {
    opts_.validate();
    const std::size_t n = f_.values.size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
  }

  void advance_to(double t_target) {
    while (f_.time < t_target - 1e-12) {
      step(std::min(opts_.dt, t_target - f_.time));
    }
    f_.time = t_target;
  }

  const LatticeField& field() const { return f_; }

 private:
  void step(double h) {
    auto& v = f_.values;
    const double t = f_.time;
    const std::size_t n = v.size();
    rhs(v, f_.bc_left, f_.bc_right, t, reaction_, k1_, opts_.parallel);
    stage_input(v, k1_, 0.5 * h);
    rhs(tmp_, f_.bc_left, f_.bc_right, t + 0.5 * h, reaction_, k2_, opts_.parallel);
    stage_input(v, k2_, 0.5 * h);
    rhs(tmp_, f_.bc_left, f_.bc_right, t + 0.5 * h, reaction_, k3_, opts_.parallel);
    stage_input(v, k3_, h);
    rhs(tmp_, f_.bc_left, f_.bc_right, t + h, reaction_, k4_, opts_.parallel);
    double bad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
      if (!std::isfinite(v[i])) bad += 1.0;
    }
    if (bad > 0.0)
      fail("integrator: non-finite value at t=" + std::to_string(t + h) +
           " (dt=" + std::to_string(h) + ", window size " +
           std::to_string(n) + "); instability detected");
    f_.time = t + h;
  }

  void stage_input(const std::vector<double>& v, const std::vector<double>& k,
                   double c) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = v[i] + c * k[i];
  }

  LatticeField f_;
  Reaction reaction_;
  IntegratorOpts opts_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

template <class Reaction>
std::vector<LatticeField> run_path(const LatticeField& u0, Reaction reaction,
                                   const std::vector<double>& t_grid,
                                   const IntegratorOpts& opts) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0) fail("integrator: negative time in grid");
    if (i > 0 && t_grid[i] < t_grid[i - 1])
      fail("integrator: time grid must be ascending");
  }
  Rk4Integrator<Reaction> integ(u0, std::move(reaction), opts);
  std::vector<LatticeField> out;
  out.reserve(t_grid.size());
  const double t0 = u0.time;
  for (double t : t_grid) {
    integ.advance_to(t0 + t);
    out.push_back(integ.field());
  }
  return out;
}

// xi values aligned to the field window; the environment must cover it.
std::vector<double> aligned_rates(const Environment& env, const Window& w) {
  if (!env.window().contains(w))
    fail("integrate_fkpp: field window [" + std::to_string(w.lo) + ", " +
         std::to_string(w.hi) + "] exceeds environment window [" +
         std::to_string(env.window().lo) + ", " +
         std::to_string(env.window().hi) + "]");
  std::vector<double> xi(static_cast<std::size_t>(w.size()));
  for (int x = w.lo; x <= w.hi; ++x)
    xi[static_cast<std::size_t>(x - w.lo)] = env.rate_at(x);
  return xi;
}

}  // namespace

double LatticeField::at(int x) const {
  if (!window.contains(x))
    throw std::out_of_range("lattice field: site " + std::to_string(x) +
                            " outside window");
  return values[static_cast<std::size_t>(x - window.lo)];
}

double& LatticeField::at(int x) {
  if (!window.contains(x))
    throw std::out_of_range("lattice field: site " + std::to_string(x) +
                            " outside window");
  return values[static_cast<std::size_t>(x - window.lo)];
}

double LatticeField::clamped(int x) const {
  if (x < window.lo) return bc_left;
  if (x > window.hi) return bc_right;
  return values[static_cast<std::size_t>(x - window.lo)];
}

double LatticeField::value_or_zero(int x) const {
  return window.contains(x) ? values[static_cast<std::size_t>(x - window.lo)]
                            : 0.0;
}

double LatticeField::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double LatticeField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

LatticeField LatticeField::zeros(Window w, double bcl, double bcr) {
  LatticeField f;
  f.window = w;
  f.values.assign(static_cast<std::size_t>(w.size()), 0.0);
  f.bc_left = bcl;
  f.bc_right = bcr;
  return f;
}

LatticeField LatticeField::constant(Window w, double c) {
  LatticeField f = zeros(w, c, c);
  std::fill(f.values.begin(), f.values.end(), c);
  return f;
}

LatticeField LatticeField::delta(int x, Window w) {
  LatticeField f = zeros(w);
  f.at(x) = 1.0;
  return f;
}

void field_to_csv(const LatticeField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("field_to_csv: cannot open " + path);
  out << "site,value\n";
  for (int x = f.window.lo; x <= f.window.hi; ++x)
    out << x << "," << f.at(x) << "\n";
}

void IntegratorOpts::validate() const {
  if (!(dt > 0.0 && dt <= 0.25))
    fail("integrator options: dt must lie in (0, 0.25]");
  if (!(zero_tol > 0.0 && zero_tol <= 1e-6))
    fail("integrator options: zero_tol must lie in (0, 1e-6]");
  if (window_margin < 0) fail("integrator options: negative window margin");
}

LatticeField integrate_linear(const LatticeField& u0, const Potential& kappa,
                              double t, const IntegratorOpts& opts) {
  return integrate_linear_path(u0, kappa, {t}, opts).back();
}

std::vector<LatticeField> integrate_linear_path(const LatticeField& u0,
                                                const Potential& kappa,
                                                const std::vector<double>& t_grid,
                                                const IntegratorOpts& opts) {
  const int lo = u0.window.lo;
  auto reaction = [&kappa, lo](double t, long i, double u) {
    return -kappa(t, lo + static_cast<int>(i)) * u;
  };
  return run_path(u0, reaction, t_grid, opts);
}

LatticeField integrate_fkpp(const LatticeField& w0, const Environment& env,
                            double t, const IntegratorOpts& opts) {
  return integrate_fkpp_path(w0, env, {t}, opts).back();
}

std::vector<LatticeField> integrate_fkpp_path(const LatticeField& w0,
                                              const Environment& env,
                                              const std::vector<double>& t_grid,
                                              const IntegratorOpts& opts) {
  for (double v : w0.values)
    if (v < -1e-12 || v > 1.0 + 1e-12)
      fail("integrate_fkpp: initial condition outside [0,1]");
  auto xi = aligned_rates(env, w0.window);
  auto reaction = [xi = std::move(xi)](double, long i, double w) {
    return xi[static_cast<std::size_t>(i)] * w * (1.0 - w);
  };
  return run_path(w0, reaction, t_grid, opts);
}

LatticeField front_indicator_ic(int y, Window window) {
  if (!window.contains(y))
    fail("front_indicator_ic: front position " + std::to_string(y) +
         " outside window");
  LatticeField f = LatticeField::zeros(window, 0.0, 1.0);
  for (int x = y; x <= window.hi; ++x) f.at(x) = 1.0;
  return f;
}

namespace {

// w^y(t, 0) by integrating the front problem for y on a light-cone window.
class FrontSolver {
 public:
  FrontSolver(const Environment& env, double t, const IntegratorOpts& opts)
      : env_(env), t_(t), opts_(opts) {
    margin_ = static_cast<int>(std::ceil((env.es() + 2.0) * t)) +
              opts.window_margin;
  }

  int margin() const { return margin_; }

  double at_origin(int y) {
    auto it = cache_.find(y);
    if (it != cache_.end()) return it->second;
    Window w{std::min(y, 0) - margin_, std::max(y, 0) + margin_};
    if (!env_.window().contains(w))
      fail("quantile_x_t: environment window too small; integrating the "
           "front at y=" + std::to_string(y) + " at time t=" +
           std::to_string(t_) + " needs [" + std::to_string(w.lo) + ", " +
           std::to_string(w.hi) + "] (Chernoff light cone (es+2)t plus margin)");
    LatticeField w0 = front_indicator_ic(y, w);
    double v = integrate_fkpp(w0, env_, t_, opts_).at(0);
    cache_.emplace(y, v);
    return v;
  }

 private:
  const Environment& env_;
  double t_;
  IntegratorOpts opts_;
  int margin_ = 0;
  std::map<int, double> cache_;
};

}  // namespace

int quantile_x_t(const Environment& env, double t, double eps,
                 const IntegratorOpts& opts) {
  if (!(eps > 0.0 && eps < 1.0))
    fail("quantile_x_t: eps must lie in (0,1)");
  if (t < 0.0) fail("quantile_x_t: negative time");
  // Bracket from the Chernoff bound: P(M(t) >= (es+2)t + pad) <= e^{-t-pad}.
  const int pad =
      std::max(5, static_cast<int>(std::ceil(-std::log(eps))) + 1);
  const int reach = static_cast<int>(std::ceil((env.es() + 2.0) * t)) + pad;

  FrontSolver solver(env, t, opts);
  int lo = -reach;
  int hi = reach;
  if (!(solver.at_origin(lo) >= eps))
    fail("quantile_x_t: bracketing failed at the left end y=" +
         std::to_string(lo));
  if (solver.at_origin(hi) >= eps)
    fail("quantile_x_t: bracketing failed, w^y(t,0) >= eps at y=" +
         std::to_string(hi) + "; widen the environment window beyond " +
         std::to_string(reach + solver.margin()) + " sites");
  // w^y(t,0) is non-increasing in y (comparison principle), so bisect.
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (solver.at_origin(mid) >= eps)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

int median_m_t(const Environment& env, double t, const IntegratorOpts& opts) {
  return quantile_x_t(env, t, 0.5, opts);
}

std::vector<TightnessRow> tightness_scan(const Environment& env,
                                         const std::vector<double>& t_grid,
                                         double eps,
                                         const IntegratorOpts& opts) {
  if (!(eps > 0.0 && eps < 0.5))
    fail("tightness_scan: eps must lie in (0, 1/2)");
  std::vector<TightnessRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    TightnessRow r;
    r.t = t;
    r.x_eps = quantile_x_t(env, t, eps, opts);
    r.median = median_m_t(env, t, opts);
    r.x_1meps = quantile_x_t(env, t, 1.0 - eps, opts);
    r.spread = r.x_eps - r.x_1meps;
    rows.push_back(r);
  }
  return rows;
}

WaveTimeReport wave_time_probe(const Environment& env,
                               const std::vector<int>& y_list,
                               const std::vector<double>& t_grid, double eps,
                               double u_budget, const IntegratorOpts& opts) {
  if (!(eps > 0.0 && eps < 0.5))
    fail("wave_time_probe: eps must lie in (0, 1/2)");
  if (t_grid.empty()) fail("wave_time_probe: empty time grid");
  const double step = 0.25;
  const double t_last = *std::max_element(t_grid.begin(), t_grid.end());
  const double t_total = t_last + u_budget;

  WaveTimeReport report;
  report.grid_step = step;
  const int n_steps = static_cast<int>(std::ceil(t_total / step + 1e-9));
  std::vector<double> snap_times(static_cast<std::size_t>(n_steps) + 1);
  for (int k = 0; k <= n_steps; ++k) snap_times[static_cast<std::size_t>(k)] = k * step;

  const int margin = static_cast<int>(std::ceil((env.es() + 2.0) * t_total)) +
                     opts.window_margin;
  for (int y : y_list) {
    Window w{std::min(y, 0) - margin, std::max(y, 0) + margin};
    if (!env.window().contains(w))
      fail("wave_time_probe: environment window too small for y=" +
           std::to_string(y));
    auto fields = integrate_fkpp_path(front_indicator_ic(y, w), env,
                                      snap_times, opts);
    std::vector<double> origin(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) origin[k] = fields[k].at(0);

    for (double t : t_grid) {
      const int kt = static_cast<int>(std::llround(t / step));
      if (kt < 0 || kt > n_steps || std::abs(kt * step - t) > 1e-9)
        fail("wave_time_probe: grid times must be multiples of " +
             std::to_string(step));
      WaveTimeRow row;
      row.y = y;
      row.t = t;
      row.w_start = origin[static_cast<std::size_t>(kt)];
      row.qualifies = row.w_start >= eps;
      if (row.qualifies) {
        for (int k = kt; k <= n_steps; ++k) {
          if (origin[static_cast<std::size_t>(k)] >= 1.0 - eps) {
            row.found = true;
            row.u = (k - kt) * step;
            break;
          }
        }
        if (row.found)
          report.max_u = std::max(report.max_u, row.u);
        else
          report.all_found = false;
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace brw
