#include "brw/brwre.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "brw/parallel.hpp"

namespace brw {

namespace {

struct PendingEvent {
  double time;
  long particle;
  bool operator>(const PendingEvent& o) const {
    if (time != o.time) return time > o.time;
    return particle > o.particle;  // deterministic tie break
  }
};

}  // namespace

ParticleSystem simulate_brwre(const Environment& env, int x0, double t_max,
                              long cap, Rng rng,
                              const std::vector<double>& snapshot_times,
                              std::vector<long>* populations) {
  if (cap < 1) throw std::invalid_argument("simulate_brwre: cap must be >= 1");
  if (t_max < 0.0)
    throw std::invalid_argument("simulate_brwre: negative horizon");
  if (!env.window().contains(x0))
    throw std::out_of_range("simulate_brwre: start site outside environment");

  ParticleSystem sys;
  sys.cap = cap;
  sys.time = t_max;

  std::vector<int> site{x0};
  std::priority_queue<PendingEvent, std::vector<PendingEvent>,
                      std::greater<PendingEvent>>
      queue;
  auto schedule = [&](long i, double now) {
    const double rate = 1.0 + env.rate_at(site[static_cast<std::size_t>(i)]);
    queue.push({now + rng.exponential(rate), i});
  };
  schedule(0, 0.0);

  std::size_t snap_idx = 0;
  auto record_until = [&](double t) {
    if (!populations) return;
    while (snap_idx < snapshot_times.size() && snapshot_times[snap_idx] <= t) {
      populations->push_back(static_cast<long>(site.size()));
      ++snap_idx;
    }
  };

  while (!queue.empty()) {
    const PendingEvent ev = queue.top();
    if (ev.time > t_max) break;
    queue.pop();
    record_until(ev.time);
    const long i = ev.particle;
    const int x = site[static_cast<std::size_t>(i)];
    const double xi = env.rate_at(x);
    if (rng.uniform01() < 1.0 / (1.0 + xi)) {
      const int nx = x + rng.fair_sign();
      if (!env.window().contains(nx))
        throw std::runtime_error(
            "simulate_brwre: particle left the environment window at site " +
            std::to_string(nx) + "; enlarge the window");
      site[static_cast<std::size_t>(i)] = nx;
      schedule(i, ev.time);
    } else {
      if (static_cast<long>(site.size()) + 1 > cap) {
        sys.capped = true;
        break;
      }
      site.push_back(x);
      schedule(i, ev.time);
      schedule(static_cast<long>(site.size()) - 1, ev.time);
    }
  }
  record_until(t_max);
  sys.positions = std::move(site);
  std::sort(sys.positions.begin(), sys.positions.end());
  return sys;
}

int max_position(const ParticleSystem& sys) {
  if (sys.positions.empty())
    throw std::logic_error("max_position: empty system");
  return sys.positions.back();  // positions kept sorted
}

std::pair<long, long> counts(const ParticleSystem& sys, int y) {
  auto lo = std::lower_bound(sys.positions.begin(), sys.positions.end(), y);
  auto hi = std::upper_bound(sys.positions.begin(), sys.positions.end(), y);
  const long at = static_cast<long>(hi - lo);
  const long geq = static_cast<long>(sys.positions.end() - lo);
  return {at, geq};
}

namespace {

struct BinaryStats {
  double mean, se;
};

BinaryStats freq_stats(double hits, double n) {
  const double p = hits / n;
  return {p, std::sqrt(std::max(0.0, p * (1.0 - p)) / n)};
}

}  // namespace

CdfEstimate estimate_max_cdf(const Environment& env, int x, int y, double t,
                             long n_runs, long cap, std::uint64_t seed,
                             bool parallel) {
  if (n_runs < 1) throw std::invalid_argument("estimate_max_cdf: n_runs >= 1");
  std::vector<char> hit(static_cast<std::size_t>(n_runs), 0);
  std::vector<char> was_capped(static_cast<std::size_t>(n_runs), 0);
  Rng master(seed);
  parallel_for_index(
      n_runs,
      [&](long i) {
        auto sys = simulate_brwre(env, x, t, cap,
                                  master.substream(static_cast<std::uint64_t>(i)));
        if (sys.capped)
          was_capped[static_cast<std::size_t>(i)] = 1;
        else
          hit[static_cast<std::size_t>(i)] = max_position(sys) >= y ? 1 : 0;
      },
      parallel);
  CdfEstimate est;
  est.n = n_runs;
  double hits = 0.0;
  for (long i = 0; i < n_runs; ++i) {
    hits += hit[static_cast<std::size_t>(i)];
    est.capped_runs += was_capped[static_cast<std::size_t>(i)];
  }
  if (est.capped_runs * 100 > n_runs)
    throw std::runtime_error(
        "estimate_max_cdf: more than 1% of runs hit the population cap; "
        "reduce t or raise the cap");
  auto st = freq_stats(hits, static_cast<double>(n_runs));
  est.mean = st.mean;
  est.std_error = st.se;
  return est;
}

CdfEstimate mckean_functional(const Environment& env, int x,
                              const LatticeField& w0, double t, long n_runs,
                              long cap, std::uint64_t seed, bool parallel) {
  if (n_runs < 1) throw std::invalid_argument("mckean_functional: n_runs >= 1");
  for (double v : w0.values)
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("mckean_functional: w0 outside [0,1]");
  std::vector<double> prod(static_cast<std::size_t>(n_runs), 0.0);
  std::vector<char> was_capped(static_cast<std::size_t>(n_runs), 0);
  Rng master(seed);
  parallel_for_index(
      n_runs,
      [&](long i) {
        auto sys = simulate_brwre(env, x, t, cap,
                                  master.substream(static_cast<std::uint64_t>(i)));
        if (sys.capped) {
          was_capped[static_cast<std::size_t>(i)] = 1;
          return;
        }
        double p = 1.0;
        // positions sorted: walk runs of equal sites
        for (std::size_t a = 0; a < sys.positions.size();) {
          std::size_t b = a;
          while (b < sys.positions.size() &&
                 sys.positions[b] == sys.positions[a])
            ++b;
          const double w = w0.value_or_zero(sys.positions[a]);
          if (w >= 1.0)
            p = 0.0;  // (1-w)^k = 0 for k >= 1; k = 0 cannot occur here
          else if (w > 0.0)
            p *= std::pow(1.0 - w, static_cast<double>(b - a));
          a = b;
        }
        prod[static_cast<std::size_t>(i)] = p;
      },
      parallel);
  CdfEstimate est;
  est.n = n_runs;
  double s = 0.0, s2 = 0.0;
  long eff = 0;
  for (long i = 0; i < n_runs; ++i) {
    if (was_capped[static_cast<std::size_t>(i)]) {
      ++est.capped_runs;
      continue;
    }
    const double v = prod[static_cast<std::size_t>(i)];
    s += v;
    s2 += v * v;
    ++eff;
  }
  if (est.capped_runs * 100 > n_runs)
    throw std::runtime_error(
        "mckean_functional: more than 1% of runs hit the population cap");
  const double n = static_cast<double>(eff);
  const double mean = s / n;
  const double var = std::max(0.0, (s2 - n * mean * mean) / std::max(1.0, n - 1));
  est.mean = 1.0 - mean;
  est.std_error = std::sqrt(var / n);
  return est;
}

std::vector<GrowthRow> growth_check(const Environment& env, int x,
                                    const std::vector<double>& t_grid,
                                    long n_runs, long cap, std::uint64_t seed,
                                    bool parallel) {
  std::vector<GrowthRow> rows;
  Rng master(seed);
  std::uint64_t salt = 0;
  for (double t : t_grid) {
    std::vector<char> low(static_cast<std::size_t>(n_runs), 0);
    std::vector<char> was_capped(static_cast<std::size_t>(n_runs), 0);
    Rng stream = master.substream(salt++);
    parallel_for_index(
        n_runs,
        [&](long i) {
          auto sys =
              simulate_brwre(env, x, t / 2.0, cap,
                             stream.substream(static_cast<std::uint64_t>(i)));
          if (sys.capped) {
            was_capped[static_cast<std::size_t>(i)] = 1;
            return;
          }
          low[static_cast<std::size_t>(i)] =
              static_cast<double>(counts(sys, x).first) <= t * t ? 1 : 0;
        },
        parallel);
    GrowthRow row;
    row.t = t;
    double hits = 0.0;
    for (long i = 0; i < n_runs; ++i) {
      hits += low[static_cast<std::size_t>(i)];
      row.capped_runs += was_capped[static_cast<std::size_t>(i)];
    }
    auto st = freq_stats(hits, static_cast<double>(n_runs));
    row.freq = st.mean;
    row.std_error = st.se;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace brw
