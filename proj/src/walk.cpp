#include "brw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "brw/parallel.hpp"

namespace brw {

std::optional<double> Trajectory::lifetime() const {
  if (is_dead()) return events.back().time;
  return std::nullopt;
}

int Trajectory::site_at(double t) const {
  int site = start;
  for (const auto& e : events) {
    if (e.time > t) break;
    if (e.dead)
      throw std::logic_error("trajectory: site_at queried after death");
    site = e.site;
  }
  return site;
}

int Trajectory::final_site() const {
  for (auto it = events.rbegin(); it != events.rend(); ++it)
    if (!it->dead) return it->site;
  return start;
}

void trajectory_to_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("trajectory_to_csv: cannot open " + path);
  out << "time,site\n";
  out << "0," << traj.start << "\n";
  for (const auto& e : traj.events) {
    out << e.time << ",";
    if (e.dead)
      out << "DEAD\n";
    else
      out << e.site << "\n";
  }
}

Potential::Potential(std::function<double(double, int)> eval, double lo,
                     double hi, std::vector<double> time_breaks)
    : eval_(std::move(eval)), lo_(lo), hi_(hi),
      time_breaks_(std::move(time_breaks)) {
  if (!(lo_ <= hi_))
    throw std::invalid_argument("potential: requires lo <= hi");
  std::sort(time_breaks_.begin(), time_breaks_.end());
}

Potential Potential::constant(double c) {
  return Potential([c](double, int) { return c; }, c, c);
}

Potential Potential::site_field(std::vector<double> values, Window window) {
  if (static_cast<int>(values.size()) != window.size())
    throw std::invalid_argument("potential: field size does not match window");
  double lo = values.empty() ? 0.0 : values[0];
  double hi = lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto shared = std::make_shared<std::vector<double>>(std::move(values));
  auto eval = [shared, window](double, int x) {
    if (!window.contains(x))
      throw std::out_of_range("potential: site " + std::to_string(x) +
                              " outside field window");
    return (*shared)[static_cast<std::size_t>(x - window.lo)];
  };
  return Potential(std::move(eval), lo, hi);
}

Potential Potential::from_environment(const Environment& env) {
  return site_field(env.rates(), env.window());
}

Potential Potential::time_grid(double epoch_len,
                               std::vector<std::vector<double>> epoch_fields,
                               Window window) {
  if (epoch_len <= 0.0)
    throw std::invalid_argument("potential: epoch_len must be positive");
  if (epoch_fields.empty())
    throw std::invalid_argument("potential: no epochs given");
  double lo = epoch_fields[0].at(0), hi = lo;
  for (const auto& f : epoch_fields) {
    if (static_cast<int>(f.size()) != window.size())
      throw std::invalid_argument("potential: epoch field size mismatch");
    for (double v : f) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::vector<double> breaks;
  for (std::size_t k = 1; k < epoch_fields.size(); ++k)
    breaks.push_back(epoch_len * static_cast<double>(k));
  auto shared =
      std::make_shared<std::vector<std::vector<double>>>(std::move(epoch_fields));
  auto eval = [shared, epoch_len, window](double t, int x) {
    if (!window.contains(x))
      throw std::out_of_range("potential: site outside time_grid window");
    auto k = static_cast<std::size_t>(std::max(0.0, t / epoch_len));
    if (k >= shared->size()) k = shared->size() - 1;
    return (*shared)[k][static_cast<std::size_t>(x - window.lo)];
  };
  return Potential(std::move(eval), lo, hi, std::move(breaks));
}

double path_integral(const Trajectory& traj, const Potential& f,
                     double t_end) {
  double stop = std::min(t_end, traj.horizon);
  if (auto lt = traj.lifetime()) stop = std::min(stop, *lt);
  const auto& breaks = f.time_breaks();

  double total = 0.0;
  double seg_start = 0.0;
  int site = traj.start;
  auto add_segment = [&](double a, double b, int x) {
    if (b <= a) return;
    // split [a, b) at the potential's time discontinuities
    auto it = std::upper_bound(breaks.begin(), breaks.end(), a);
    double left = a;
    for (; it != breaks.end() && *it < b; ++it) {
      total += f(left, x) * (*it - left);
      left = *it;
    }
    total += f(left, x) * (b - left);
  };
  for (const auto& e : traj.events) {
    if (e.time >= stop) break;
    add_segment(seg_start, e.time, site);
    if (e.dead) return total;
    seg_start = e.time;
    site = e.site;
  }
  add_segment(seg_start, stop, site);
  return total;
}

Trajectory simulate_srw(int x0, double t_max, Rng rng) {
  if (t_max < 0.0)
    throw std::invalid_argument("simulate_srw: t_max must be nonnegative");
  Trajectory traj;
  traj.start = x0;
  traj.horizon = t_max;
  double t = 0.0;
  int x = x0;
  for (;;) {
    t += rng.exponential(1.0);
    if (t > t_max) break;
    x += rng.fair_sign();
    traj.events.push_back({t, x, false});
  }
  return traj;
}

std::optional<double> hitting_time(const Trajectory& traj, int y) {
  if (traj.start == y) return 0.0;
  for (const auto& e : traj.events) {
    if (e.dead) return std::nullopt;
    if (e.site == y) return e.time;
  }
  return std::nullopt;
}

Trajectory simulate_killed_walk(const Potential& kappa, int x0, double t_max,
                                Rng rng) {
  if (!(kappa.lo() > 0.0))
    throw std::invalid_argument(
        "simulate_killed_walk: requires kappa bounded below by a positive "
        "constant (shift the equation upstream if needed)");
  Trajectory skel = simulate_srw(x0, t_max, rng.substream(1));
  Rng kill = rng.substream(2);
  const double hi = kappa.hi();

  double s = 0.0;
  for (;;) {
    s += kill.exponential(hi);
    if (s > t_max) return skel;  // survived the horizon
    const int x = skel.site_at(s);
    if (kill.uniform01() < kappa(s, x) / hi) {
      Trajectory out;
      out.start = skel.start;
      out.horizon = t_max;
      for (const auto& e : skel.events) {
        if (e.time >= s) break;
        out.events.push_back(e);
      }
      out.events.push_back({s, x, true});
      return out;
    }
  }
}

SurvivalEstimate survival_mc(const Potential& kappa, int x0, double t,
                             long n_samples, std::uint64_t seed,
                             bool parallel) {
  if (n_samples < 1)
    throw std::invalid_argument("survival_mc: need n_samples >= 1");
  std::vector<double> ind(static_cast<std::size_t>(n_samples));
  std::vector<double> wgt(static_cast<std::size_t>(n_samples));
  Rng master(seed);
  parallel_for_index(
      n_samples,
      [&](long i) {
        Rng rep = master.substream(static_cast<std::uint64_t>(i));
        Trajectory killed = simulate_killed_walk(kappa, x0, t, rep);
        ind[static_cast<std::size_t>(i)] = killed.is_dead() ? 0.0 : 1.0;
        Trajectory skel = simulate_srw(x0, t, rep.substream(1));
        wgt[static_cast<std::size_t>(i)] =
            std::exp(-path_integral(skel, kappa, t));
      },
      parallel);

  auto summarize = [&](const std::vector<double>& v) {
    double s = 0.0, s2 = 0.0;
    for (double x : v) {
      s += x;
      s2 += x * x;
    }
    const double n = static_cast<double>(v.size());
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / std::max(1.0, n - 1));
    return McEstimate{mean, std::sqrt(var / n), static_cast<long>(v.size())};
  };
  return SurvivalEstimate{summarize(ind), summarize(wgt)};
}

McEstimate feynman_kac_mc(const Potential& xi, int x, int y, double t,
                          long n_samples, std::uint64_t seed, bool parallel) {
  if (n_samples < 1)
    throw std::invalid_argument("feynman_kac_mc: need n_samples >= 1");
  std::vector<double> vals(static_cast<std::size_t>(n_samples));
  Rng master(seed);
  parallel_for_index(
      n_samples,
      [&](long i) {
        Rng rep = master.substream(static_cast<std::uint64_t>(i));
        Trajectory traj = simulate_srw(x, t, rep);
        double v = 0.0;
        if (traj.final_site() == y) v = std::exp(path_integral(traj, xi, t));
        vals[static_cast<std::size_t>(i)] = v;
      },
      parallel);
  double s = 0.0, s2 = 0.0;
  for (double v : vals) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = s / n;
  const double var = std::max(0.0, (s2 - n * mean * mean) / std::max(1.0, n - 1));
  return McEstimate{mean, std::sqrt(var / n), n_samples};
}

McEstimate feynman_kac_mc(const Environment& env, int x, int y, double t,
                          long n_samples, std::uint64_t seed, bool parallel) {
  return feynman_kac_mc(Potential::from_environment(env), x, y, t, n_samples,
                        seed, parallel);
}

}  // namespace brw
