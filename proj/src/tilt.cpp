#include "brw/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "brw/parallel.hpp"

namespace brw {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

McEstimate summarize(const std::vector<double>& v) {
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(v.size());
  const double mean = s / n;
  const double var = std::max(0.0, (s2 - n * mean * mean) / std::max(1.0, n - 1));
  return {mean, std::sqrt(var / n), static_cast<long>(v.size())};
}

}  // namespace

void TiltParams::validate() const {
  if (!(eta <= 0.0)) fail("tilt: eta must be <= 0");
  if (!(delta >= 0.0)) fail("tilt: delta must be >= 0");
  if (static_cast<int>(zeta.size()) != window.size())
    fail("tilt: zeta array does not match window");
  for (double z : zeta)
    if (z < -delta - 1e-12 || z > 1e-12)
      fail("tilt: zeta value " + std::to_string(z) + " outside [-delta, 0]");
}

double TiltParams::zeta_at(int x) const {
  if (!window.contains(x))
    throw std::out_of_range("tilt: site " + std::to_string(x) +
                            " outside zeta window");
  return zeta[static_cast<std::size_t>(x - window.lo)];
}

TiltParams TiltParams::from_environment(const Environment& env, double eta) {
  auto sp = shifted_potential(env);
  TiltParams p;
  p.eta = eta;
  p.window = sp.window;
  p.zeta = std::move(sp.zeta);
  p.delta = sp.delta;
  p.validate();
  return p;
}

TiltParams TiltParams::homogeneous(double gamma, double eta, Window window,
                                   double delta) {
  TiltParams p;
  p.eta = eta;
  p.window = window;
  p.zeta.assign(static_cast<std::size_t>(window.size()), gamma);
  p.delta = delta;
  p.validate();
  return p;
}

double z_homogeneous(double gamma, double eta) {
  if (gamma + eta > 0.0)
    throw std::invalid_argument("z_homogeneous: requires gamma + eta <= 0");
  const double s = gamma + eta;
  return 1.0 - s - std::sqrt(s * (s - 2.0));
}

double speed_homogeneous(double gamma, double eta) {
  if (gamma + eta > 0.0)
    throw std::invalid_argument("speed_homogeneous: requires gamma + eta <= 0");
  const double s = gamma + eta;
  return std::sqrt(s * (s - 2.0));
}

ZmcResult z_mc(const TiltParams& params, int x, int y, long n_samples,
               double t_cap, std::uint64_t seed, bool parallel) {
  params.validate();
  if (x > y) fail("z_mc: requires x <= y");
  if (n_samples < 1) fail("z_mc: n_samples >= 1");
  std::vector<double> w(static_cast<std::size_t>(n_samples), 0.0);
  std::vector<char> tcen(static_cast<std::size_t>(n_samples), 0);
  std::vector<char> wcen(static_cast<std::size_t>(n_samples), 0);
  const double eta = params.eta;
  Rng master(seed);
  parallel_for_index(
      n_samples,
      [&](long i) {
        Rng rng = master.substream(static_cast<std::uint64_t>(i));
        double t = 0.0;
        double integral = 0.0;
        int site = x;
        for (;;) {
          if (site == y) {
            w[static_cast<std::size_t>(i)] = std::exp(integral);
            return;
          }
          if (!params.window.contains(site)) {
            wcen[static_cast<std::size_t>(i)] = 1;
            return;
          }
          const double hold = rng.exponential(1.0);
          if (t + hold > t_cap) {
            tcen[static_cast<std::size_t>(i)] = 1;
            return;
          }
          integral += (params.zeta_at(site) + eta) * hold;
          t += hold;
          site += rng.fair_sign();
        }
      },
      parallel);
  ZmcResult out;
  out.n = n_samples;
  for (long i = 0; i < n_samples; ++i) {
    out.time_censored += tcen[static_cast<std::size_t>(i)];
    out.window_censored += wcen[static_cast<std::size_t>(i)];
  }
  auto est = summarize(w);
  out.mean = est.mean;
  out.std_error = est.std_error;
  // A censored path's weight is at most exp(eta * t_cap) (time cap) or the
  // homogeneous partition value to the window edge (space cap).
  const int edge_dist = std::max(1, x - params.window.lo);
  out.censor_bias_bound =
      std::exp(eta * t_cap) +
      std::pow(z_homogeneous(0.0, std::min(eta, -1e-9)), edge_dist);
  return out;
}

TiltedChain::TiltedChain(const TiltParams& params, int burn_in)
    : full_(params.window), burn_in_(burn_in), eta_(params.eta) {
  params.validate();
  if (burn_in < 0) fail("tilted chain: negative burn-in");
  double zmin = 1e300, zmax = -1e300;
  for (double z : params.zeta) {
    zmin = std::min(zmin, z);
    zmax = std::max(zmax, z);
  }
  // eta = 0 is fine when the chain is exactly the untilted walk (zeta == 0
  // everywhere, the recursion sits at its fixed point Z == 1) or when zeta
  // stays strictly negative; a zeta that merely touches 0 has no margin.
  const bool exactly_untilted =
      params.eta == 0.0 && zmin >= -1e-15 && params.delta == 0.0;
  if (params.eta == 0.0 && zmax > -1e-15 && !exactly_untilted)
    fail("tilted chain: eta = 0 with zeta touching 0 loses the contraction "
         "margin of the partition recursion; use eta < 0");
  if (full_.size() < burn_in + 3)
    fail("tilted chain: window smaller than burn-in region");

  const std::size_t n = static_cast<std::size_t>(full_.size());
  lambda_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    lambda_[i] = 1.0 - params.zeta[i] - params.eta;

  // Z_{x,x+1} for x in [lo, hi-1]; seeded at the left edge with the local
  // homogeneous closed form, then the exact recursion from eq. of the
  // holding-time normalization: Z_{x,x+1} = 1 / (2 lambda(x) - Z_{x-1,x}).
  z_right_.resize(n - 1);
  z_right_[0] = z_homogeneous(params.zeta[0], params.eta);
  for (std::size_t i = 1; i + 1 <= n - 1; ++i)
    z_right_[i] = 1.0 / (2.0 * lambda_[i] - z_right_[i - 1]);

  usable_ = Window{full_.lo + burn_in + 1, full_.hi - 1};
}

std::size_t TiltedChain::idx(int x) const {
  return static_cast<std::size_t>(x - full_.lo);
}

double TiltedChain::lambda(int x) const {
  if (!full_.contains(x))
    throw std::out_of_range("tilted chain: lambda outside window");
  return lambda_[idx(x)];
}

double TiltedChain::z_right(int x) const {
  if (x < full_.lo || x >= full_.hi)
    throw std::out_of_range("tilted chain: z_right outside window");
  return z_right_[idx(x)];
}

double TiltedChain::p_right(int x) const {
  if (!usable_.contains(x))
    throw std::out_of_range("tilted chain: p_right outside usable window");
  // p(x, x+1) = Z_{x+1,x} / (2 lambda(x)) with Z_{x+1,x} = 1 / Z_{x,x+1}
  return 1.0 / (2.0 * lambda_[idx(x)] * z_right_[idx(x)]);
}

double TiltedChain::p_left(int x) const {
  if (!usable_.contains(x))
    throw std::out_of_range("tilted chain: p_left outside usable window");
  return z_right_[idx(x) - 1] / (2.0 * lambda_[idx(x)]);
}

void chain_to_csv(const TiltedChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("chain_to_csv: cannot open " + path);
  out << "site,lambda,z_right,p_right\n";
  for (int x = chain.usable().lo; x < chain.usable().hi; ++x)
    out << x << "," << chain.lambda(x) << "," << chain.z_right(x) << ","
        << chain.p_right(x) << "\n";
}

Trajectory simulate_tilted(const TiltedChain& chain, int x0, double t_max,
                           Rng rng) {
  if (!chain.usable().contains(x0))
    fail("simulate_tilted: start outside usable window");
  Trajectory traj;
  traj.start = x0;
  traj.horizon = t_max;
  double t = 0.0;
  int x = x0;
  for (;;) {
    t += rng.exponential(chain.lambda(x));
    if (t > t_max) break;
    x += rng.bernoulli(chain.p_right(x)) ? 1 : -1;
    if (!chain.usable().contains(x))
      fail("simulate_tilted: walk left the usable window at site " +
           std::to_string(x) + " (t=" + std::to_string(t) +
           "); enlarge the chain window");
    traj.events.push_back({t, x, false});
  }
  return traj;
}

double expected_hit_one(const TiltedChain& chain, int x) {
  const int seed_site = x - chain.burn_in();
  if (seed_site < chain.usable().lo || x + 1 > chain.usable().hi)
    fail("expected_hit_one: insufficient burn-in margin around site " +
         std::to_string(x));
  // homogeneous seed for the local zeta; exact after the burn-in because
  // e_x = a_x + b_x e_{x-1} contracts (b_x = Z_{x-1,x+1} < 1 for eta < 0)
  const double gamma_seed = 1.0 - chain.lambda(seed_site) - chain.eta();
  double e = 1.0 / speed_homogeneous(gamma_seed, chain.eta());
  for (int s = seed_site + 1; s <= x; ++s)
    e = (1.0 / chain.lambda(s) + chain.p_left(s) * e) / chain.p_right(s);
  return e;
}

namespace {

// Average of e_x over the core of the window (two burn-in lengths inside),
// via one left-to-right pass of the first-step recursion.
struct SpatialAverage {
  double avg;
  double se;
  long n;
};

SpatialAverage average_hit_time(const TiltedChain& chain) {
  const Window u = chain.usable();
  const int burn = chain.burn_in();
  const int core_lo = u.lo + burn;
  const int core_hi = u.hi - 1;
  if (core_lo >= core_hi) fail("solve_eta_bar: window too small");

  const double gamma0 = 1.0 - chain.lambda(u.lo) - chain.eta();
  double e = 1.0 / speed_homogeneous(gamma0, chain.eta());
  double s = 0.0, s2 = 0.0;
  long n = 0;
  for (int x = u.lo + 1; x <= core_hi; ++x) {
    e = (1.0 / chain.lambda(x) + chain.p_left(x) * e) / chain.p_right(x);
    if (x >= core_lo) {
      s += e;
      s2 += e * e;
      ++n;
    }
  }
  const double mean = s / static_cast<double>(n);
  const double var =
      std::max(0.0, (s2 - n * mean * mean) / std::max<long>(1, n - 1));
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

}  // namespace

EtaBarResult solve_eta_bar(const Environment& env, double v, double tol) {
  const double delta = env.delta();
  const double vc_upper = std::sqrt(delta * (2.0 + delta));
  if (!(v > vc_upper))
    fail("solve_eta_bar: v must exceed the critical-speed bound " +
         std::to_string(vc_upper));
  if (!(tol > 0.0)) fail("solve_eta_bar: tol must be positive");

  auto avg_at = [&](double eta) {
    TiltParams params = TiltParams::from_environment(env, eta);
    TiltedChain chain(params);
    return average_hit_time(chain);
  };
  // g(eta) = v * avg_e - 1 is continuous and increasing in eta (slower walk
  // near eta = 0). Bracket with the homogeneous inversion as a guide.
  double eta_hi = -1e-9;
  double eta_lo = 1.0 - std::sqrt(1.0 + v * v) - delta - 2.0;
  auto g = [&](double eta) { return v * avg_at(eta).avg - 1.0; };
  double g_hi = g(eta_hi);
  double g_lo = g(eta_lo);
  int expand = 0;
  while (g_lo > 0.0 && expand++ < 60) {
    eta_lo *= 2.0;
    g_lo = g(eta_lo);
  }
  if (!(g_lo <= 0.0 && g_hi >= 0.0))
    fail("solve_eta_bar: failed to bracket the root; scanned eta in [" +
         std::to_string(eta_lo) + ", " + std::to_string(eta_hi) + "]");
  double prev_eta = eta_lo, prev_g = g_lo;
  while (eta_hi - eta_lo > tol) {
    const double mid = 0.5 * (eta_lo + eta_hi);
    const double gm = g(mid);
    // monotonicity of eta -> avg(e) along the scan
    const double slack = 1e-7 * (1.0 + std::abs(gm));
    if ((mid > prev_eta && gm < prev_g - slack) ||
        (mid < prev_eta && gm > prev_g + slack))
      fail("solve_eta_bar: eta -> v*avg(e)-1 not monotone near eta=" +
           std::to_string(mid));
    prev_eta = mid;
    prev_g = gm;
    if (gm >= 0.0)
      eta_hi = mid;
    else
      eta_lo = mid;
  }
  const double root = 0.5 * (eta_lo + eta_hi);
  auto stats = avg_at(root);
  EtaBarResult out;
  out.eta_bar = root;
  out.avg_e = stats.avg;
  out.spatial_se = stats.se;
  out.residual = std::abs(v * stats.avg - 1.0);
  return out;
}

VelocityConstants velocity_constants(const Environment& env, double tol) {
  VelocityConstants out;
  out.v1 = env.es() + 2.0;
  const double delta = env.delta();
  out.vc_upper = std::sqrt(delta * (2.0 + delta));
  const double target = 2.0 * out.v1 + 2.0;

  auto abs_eta = [&](double v) { return std::abs(solve_eta_bar(env, v, tol * 0.01).eta_bar); };
  double lo = out.v1 + 1.0;
  double prev = abs_eta(lo + 1e-6);
  if (prev >= target) {
    out.v2 = lo;  // the infimum is attained at the left end of the range
    return out;
  }
  double hi = lo + 1.0;
  double cur = abs_eta(hi);
  int expand = 0;
  while (cur < target && expand++ < 60) {
    if (cur < prev - 1e-9)
      fail("velocity_constants: |eta_bar(v)| not increasing in v");
    prev = cur;
    hi *= 1.6;
    cur = abs_eta(hi);
  }
  if (cur < target) fail("velocity_constants: could not bracket v2");
  double a = lo, b = hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (abs_eta(mid) >= target)
      b = mid;
    else
      a = mid;
  }
  out.v2 = 0.5 * (a + b);
  return out;
}

CoupledTriple coupled_triple(const TiltParams& params, int x0, int n_steps,
                             Rng rng) {
  params.validate();
  TiltParams p_zero = TiltParams::homogeneous(0.0, params.eta, params.window,
                                              params.delta);
  TiltParams p_delta = TiltParams::homogeneous(-params.delta, params.eta,
                                               params.window, params.delta);
  TiltedChain c_zero(p_zero), c_env(params), c_delta(p_delta);

  CoupledTriple out;
  out.x0 = x0;
  auto init = [&](std::vector<int>& y, std::vector<double>& tau) {
    y.assign(static_cast<std::size_t>(n_steps) + 1, x0);
    tau.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
  };
  init(out.y_zero, out.tau_zero);
  init(out.y_env, out.tau_env);
  init(out.y_delta, out.tau_delta);

  const double rate_zero = 1.0 - params.eta;                 // lambda for zeta=0
  const double rate_delta = 1.0 + params.delta - params.eta; // zeta=-delta
  for (int m = 1; m <= n_steps; ++m) {
    const std::size_t k = static_cast<std::size_t>(m);
    // one uniform drives all three embedded walks
    const double u = rng.uniform01();
    auto step = [&](const TiltedChain& c, std::vector<int>& y) {
      const int prev = y[k - 1];
      if (!c.usable().contains(prev))
        fail("coupled_triple: walk left the usable window; enlarge it");
      y[k] = prev + (u <= c.p_right(prev) ? 1 : -1);
    };
    step(c_zero, out.y_zero);
    step(c_env, out.y_env);
    step(c_delta, out.y_delta);
    // one exponential drives all three clocks
    const double e = rng.exponential(1.0);
    out.tau_zero[k] = out.tau_zero[k - 1] + e / rate_zero;
    out.tau_delta[k] = out.tau_delta[k - 1] + e / rate_delta;
    const double lam_env = c_env.lambda(out.y_env[k - 1]);
    out.tau_env[k] = out.tau_env[k - 1] + e / lam_env;
  }
  return out;
}

std::optional<double> coupled_hitting_time(const std::vector<int>& path,
                                           const std::vector<double>& tau,
                                           int y) {
  for (std::size_t m = 0; m < path.size(); ++m)
    if (path[m] == y) return tau[m];
  return std::nullopt;
}

HittingOrderReport hitting_order_check(const TiltParams& params, int x, int y,
                                       const std::vector<double>& t_grid,
                                       long n_samples, std::uint64_t seed,
                                       bool coupled, bool parallel) {
  if (x > y) fail("hitting_order_check: requires x <= y");
  HittingOrderReport report;
  report.coupled_mode = coupled;
  report.samples = n_samples;
  report.t_grid = t_grid;
  Rng master(seed);

  if (coupled) {
    // generous step budget: rightmost drift covers y - x quickly
    const int n_steps = std::max(200, 20 * (y - x));
    std::vector<char> bad(static_cast<std::size_t>(n_samples), 0);
    parallel_for_index(
        n_samples,
        [&](long i) {
          auto triple = coupled_triple(params, x, n_steps,
                                       master.substream(static_cast<std::uint64_t>(i)));
          auto h0 = coupled_hitting_time(triple.y_zero, triple.tau_zero, y);
          auto hz = coupled_hitting_time(triple.y_env, triple.tau_env, y);
          auto hd = coupled_hitting_time(triple.y_delta, triple.tau_delta, y);
          // order: H^0 >= H^zeta >= H^{-delta} whenever defined
          auto later = [](const std::optional<double>& slow,
                          const std::optional<double>& fast) {
            if (!fast) return !slow ? true : false;  // fast censored => slow must be too
            if (!slow) return true;
            return *slow >= *fast - 1e-12;
          };
          if (!later(h0, hz) || !later(hz, hd))
            bad[static_cast<std::size_t>(i)] = 1;
        },
        parallel);
    for (long i = 0; i < n_samples; ++i)
      report.violations += bad[static_cast<std::size_t>(i)];
    return report;
  }

  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  auto run_law = [&](const TiltParams& p, std::uint64_t salt,
                     std::vector<double>& cdf, std::vector<double>& se) {
    TiltedChain chain(p);
    std::vector<double> hits(static_cast<std::size_t>(n_samples), -1.0);
    Rng stream = master.substream(salt);
    parallel_for_index(
        n_samples,
        [&](long i) {
          auto traj = simulate_tilted(chain, x, t_max,
                                      stream.substream(static_cast<std::uint64_t>(i)));
          auto h = hitting_time(traj, y);
          hits[static_cast<std::size_t>(i)] = h ? *h : -1.0;
        },
        parallel);
    cdf.clear();
    se.clear();
    for (double t : t_grid) {
      double c = 0.0;
      for (double h : hits)
        if (h >= 0.0 && h <= t) c += 1.0;
      const double n = static_cast<double>(n_samples);
      const double pm = c / n;
      cdf.push_back(pm);
      se.push_back(std::sqrt(std::max(0.0, pm * (1.0 - pm)) / n));
    }
  };
  TiltParams p_zero =
      TiltParams::homogeneous(0.0, params.eta, params.window, params.delta);
  TiltParams p_delta = TiltParams::homogeneous(-params.delta, params.eta,
                                               params.window, params.delta);
  run_law(p_zero, 11, report.cdf_zero, report.se_zero);
  run_law(params, 12, report.cdf_env, report.se_env);
  run_law(p_delta, 13, report.cdf_delta, report.se_delta);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double band01 =
        3.0 * std::sqrt(report.se_zero[k] * report.se_zero[k] +
                        report.se_env[k] * report.se_env[k]);
    const double band12 =
        3.0 * std::sqrt(report.se_env[k] * report.se_env[k] +
                        report.se_delta[k] * report.se_delta[k]);
    if (report.cdf_zero[k] > report.cdf_env[k] + band01 ||
        report.cdf_env[k] > report.cdf_delta[k] + band12)
      report.ordered_within_3se = false;
  }
  return report;
}

}  // namespace brw
