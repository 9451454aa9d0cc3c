#include "brw/annihilate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <stdexcept>

namespace brw {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

struct PendingEvent {
  double time;
  int particle;
  bool operator>(const PendingEvent& o) const {
    if (time != o.time) return time > o.time;
    return particle > o.particle;
  }
};

SignSeq sequence_of(const std::vector<SignedParticle>& particles) {
  std::vector<std::pair<int, int>> alive;  // (site, sign)
  for (const auto& p : particles)
    if (p.alive) alive.emplace_back(p.site, p.sign);
  std::sort(alive.begin(), alive.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SignSeq seq;
  seq.reserve(alive.size());
  int prev_site = 0;
  bool have_prev = false;
  int prev_sign = 0;
  for (const auto& [site, sign] : alive) {
    if (have_prev && site == prev_site && sign != prev_sign)
      throw std::logic_error(
          "signed config: alive opposite-sign particles share site " +
          std::to_string(site));
    seq.push_back(sign);
    prev_site = site;
    prev_sign = sign;
    have_prev = true;
  }
  return seq;
}

}  // namespace

SignSeq SignedConfig::sign_sequence() const { return sequence_of(particles); }

long SignedConfig::alive_count() const {
  long n = 0;
  for (const auto& p : particles)
    if (p.alive) ++n;
  return n;
}

SignedConfig init_from_measure(const LatticeField& u0, int n, Rng rng) {
  if (n < 1) throw std::invalid_argument("init_from_measure: n >= 1");
  double total = 0.0;
  for (double v : u0.values) total += std::abs(v);
  if (!(total > 0.0))
    throw std::invalid_argument("init_from_measure: u0 is identically zero");
  std::vector<double> cum(u0.values.size());
  double run = 0.0;
  for (std::size_t i = 0; i < u0.values.size(); ++i) {
    run += std::abs(u0.values[i]) / total;
    cum[i] = run;
  }
  SignedConfig config;
  config.particles.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    const auto k = static_cast<std::size_t>(
        it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin()));
    SignedParticle p;
    p.index = i;
    p.site = u0.window.lo + static_cast<int>(k);
    p.sign = u0.values[k] > 0.0 ? 1 : -1;
    config.particles.push_back(p);
  }
  return config;
}

SignedConfig EvolutionPath::at(double t) const {
  SignedConfig config = initial;
  for (const auto& e : events) {
    if (e.time > t) break;
    auto& p = config.particles[static_cast<std::size_t>(e.particle)];
    switch (e.kind) {
      case EventKind::jump:
        p.site = e.site;
        break;
      case EventKind::death:
        p.alive = false;
        p.in_cemetery = true;
        p.frozen_at = e.time;
        break;
      case EventKind::annihilation: {
        p.site = e.site;
        p.alive = false;
        p.frozen_at = e.time;
        auto& q = config.particles[static_cast<std::size_t>(e.partner)];
        q.alive = false;
        q.frozen_at = e.time;
        break;
      }
    }
  }
  config.time = t;
  return config;
}

void events_to_csv(const EvolutionPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) fail("events_to_csv: cannot open " + file);
  out << "time,particle,kind,site\n";
  for (const auto& e : path.events) {
    const char* kind = e.kind == EventKind::jump ? "jump"
                       : e.kind == EventKind::death ? "death"
                                                    : "annihilation";
    out << e.time << "," << e.particle << "," << kind << "," << e.site << "\n";
  }
}

EvolutionPath evolve(const SignedConfig& init, const Potential& kappa,
                     double t_end, Rng rng) {
  if (!(kappa.lo() > 0.0))
    throw std::invalid_argument("evolve: requires kappa bounded below by a "
                                "positive constant");
  EvolutionPath path;
  path.initial = init;
  auto particles = init.particles;
  const auto n = particles.size();

  // per-site sets of alive particle indices, one per sign
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> occupancy;
  auto insert_at = [&](int site, int idx, int sign) {
    auto& bucket = sign > 0 ? occupancy[site].first : occupancy[site].second;
    bucket.insert(std::lower_bound(bucket.begin(), bucket.end(), idx), idx);
  };
  auto erase_at = [&](int site, int idx, int sign) {
    auto& bucket = sign > 0 ? occupancy[site].first : occupancy[site].second;
    bucket.erase(std::find(bucket.begin(), bucket.end(), idx));
  };
  for (const auto& p : particles)
    if (p.alive) insert_at(p.site, p.index, p.sign);

  const double total_rate = 1.0 + kappa.hi();
  std::priority_queue<PendingEvent, std::vector<PendingEvent>,
                      std::greater<PendingEvent>>
      queue;
  auto schedule = [&](int idx, double now) {
    queue.push({now + rng.exponential(total_rate), idx});
  };
  for (std::size_t i = 0; i < n; ++i)
    if (particles[i].alive) schedule(static_cast<int>(i), init.time);

  double last_event_time = init.time;
  while (!queue.empty()) {
    const PendingEvent ev = queue.top();
    queue.pop();
    if (ev.time > t_end) break;
    auto& p = particles[static_cast<std::size_t>(ev.particle)];
    if (!p.alive) continue;  // stale entry for an annihilated partner

    if (rng.uniform01() < 1.0 / total_rate) {
      // jump
      if (!(ev.time > last_event_time))
        throw std::logic_error("evolve: event times not strictly increasing");
      last_event_time = ev.time;
      const int from = p.site;
      const int to = from + rng.fair_sign();
      erase_at(from, p.index, p.sign);
      p.site = to;
      auto& opposite =
          p.sign > 0 ? occupancy[to].second : occupancy[to].first;
      if (!opposite.empty()) {
        const int j = opposite.front();  // smallest original index
        auto& q = particles[static_cast<std::size_t>(j)];
        erase_at(to, q.index, q.sign);
        p.alive = false;
        p.frozen_at = ev.time;
        q.alive = false;
        q.frozen_at = ev.time;
        path.events.push_back(
            {ev.time, p.index, EventKind::annihilation, to, j});
      } else {
        insert_at(to, p.index, p.sign);
        schedule(ev.particle, ev.time);
        path.events.push_back({ev.time, p.index, EventKind::jump, to, -1});
      }
    } else {
      // kill proposal, thinned against the bound
      if (rng.uniform01() < kappa(ev.time, p.site) / kappa.hi()) {
        if (!(ev.time > last_event_time))
          throw std::logic_error("evolve: event times not strictly increasing");
        last_event_time = ev.time;
        erase_at(p.site, p.index, p.sign);
        p.alive = false;
        p.in_cemetery = true;
        p.frozen_at = ev.time;
        path.events.push_back({ev.time, p.index, EventKind::death, p.site, -1});
      } else {
        schedule(ev.particle, ev.time);
      }
    }
  }
  path.final_config.particles = std::move(particles);
  path.final_config.time = t_end;
  return path;
}

double SignedMeasure::at(int x) const {
  if (!window.contains(x)) return 0.0;
  return mass[static_cast<std::size_t>(x - window.lo)];
}

SignedMeasure empirical_measure(const SignedConfig& config) {
  SignedMeasure mu;
  const double n = static_cast<double>(config.particles.size());
  int lo = 0, hi = -1;
  bool any = false;
  for (const auto& p : config.particles) {
    if (!p.alive) continue;
    if (!any) {
      lo = hi = p.site;
      any = true;
    } else {
      lo = std::min(lo, p.site);
      hi = std::max(hi, p.site);
    }
  }
  if (any) {
    mu.window = Window{lo, hi};
    mu.mass.assign(static_cast<std::size_t>(mu.window.size()), 0.0);
    for (const auto& p : config.particles)
      if (p.alive)
        mu.mass[static_cast<std::size_t>(p.site - lo)] += p.sign / n;
  }
  for (const auto& p : config.particles)
    if (p.in_cemetery) mu.cemetery += p.sign / n;
  return mu;
}

namespace {

double cdf_max_diff(int lo, int hi, const auto& f, const auto& g) {
  double cf = 0.0, cg = 0.0, best = 0.0;
  for (int x = lo; x <= hi; ++x) {
    cf += f(x);
    cg += g(x);
    best = std::max(best, std::abs(cf - cg));
  }
  return best;
}

}  // namespace

double weak_distance(const SignedMeasure& mu, const LatticeField& f) {
  const bool mu_empty = mu.window.lo > mu.window.hi;
  const int lo = mu_empty ? f.window.lo : std::min(mu.window.lo, f.window.lo);
  const int hi = mu_empty ? f.window.hi : std::max(mu.window.hi, f.window.hi);
  return cdf_max_diff(
      lo, hi, [&](int x) { return mu.at(x); },
      [&](int x) { return f.value_or_zero(x); });
}

double weak_distance(const SignedMeasure& mu, const SignedMeasure& nu) {
  const bool me = mu.window.lo > mu.window.hi;
  const bool ne = nu.window.lo > nu.window.hi;
  if (me && ne) return 0.0;
  const int lo = me ? nu.window.lo
               : ne ? mu.window.lo
                    : std::min(mu.window.lo, nu.window.lo);
  const int hi = me ? nu.window.hi
               : ne ? mu.window.hi
                    : std::max(mu.window.hi, nu.window.hi);
  return cdf_max_diff(
      lo, hi, [&](int x) { return mu.at(x); },
      [&](int x) { return nu.at(x); });
}

bool audit_transition(const SignSeq& before, const SignSeq& after,
                      EventKind kind, std::string* why) {
  auto set_why = [&](const std::string& msg) {
    if (why) *why = msg;
  };
  switch (kind) {
    case EventKind::jump:
      if (after != before) {
        set_why("jump changed the sign sequence");
        return false;
      }
      return true;
    case EventKind::death: {
      if (after.size() + 1 != before.size()) {
        set_why("death must remove exactly one sign");
        return false;
      }
      if (!is_substring(after, before)) {
        set_why("sequence after death is not a substring");
        return false;
      }
      return true;
    }
    case EventKind::annihilation: {
      if (after.size() + 2 != before.size()) {
        set_why("annihilation must remove exactly two signs");
        return false;
      }
      // the removed pair must be adjacent and of opposite sign
      std::size_t k = 0;
      while (k < after.size() && after[k] == before[k]) ++k;
      if (before[k] + before[k + 1] != 0) {
        set_why("annihilation removed a non-opposite or non-adjacent pair");
        return false;
      }
      for (std::size_t j = k; j < after.size(); ++j)
        if (after[j] != before[j + 2]) {
          set_why("annihilation removed non-adjacent signs");
          return false;
        }
      return true;
    }
  }
  return false;
}

SubstringAuditReport substring_audit(const EvolutionPath& path) {
  SubstringAuditReport report;
  auto config = path.initial;
  SignSeq prev_seq = config.sign_sequence();
  const SignSeq initial_seq = prev_seq;
  int prev_sigma = count_crossings(prev_seq);

  // occupancy rebuilt per event from the replayed configuration; runs are
  // small enough that the audit favors directness over speed
  auto alive_opposite_at = [&](int site, int sign, int except) {
    std::vector<int> found;
    for (const auto& q : config.particles)
      if (q.alive && q.index != except && q.site == site && q.sign == -sign)
        found.push_back(q.index);
    std::sort(found.begin(), found.end());
    return found;
  };

  double last_time = config.time;
  for (const auto& e : path.events) {
    if (!(e.time > last_time)) {
      report.pass = false;
      report.first_violation = "event times not strictly increasing";
      return report;
    }
    last_time = e.time;
    auto& p = config.particles[static_cast<std::size_t>(e.particle)];
    std::string why;

    if (e.kind == EventKind::jump || e.kind == EventKind::annihilation) {
      auto opp = alive_opposite_at(e.site, p.sign, p.index);
      if (e.kind == EventKind::jump && !opp.empty()) {
        report.pass = false;
        report.first_violation =
            "jump onto alive opposite-sign particles without annihilation";
        return report;
      }
      if (e.kind == EventKind::annihilation &&
          (opp.empty() || opp.front() != e.partner)) {
        report.pass = false;
        report.first_violation =
            "annihilation partner is not the smallest opposite index";
        return report;
      }
    }

    // apply the event on the replayed state
    switch (e.kind) {
      case EventKind::jump:
        p.site = e.site;
        break;
      case EventKind::death:
        p.alive = false;
        p.in_cemetery = true;
        break;
      case EventKind::annihilation: {
        p.site = e.site;
        p.alive = false;
        config.particles[static_cast<std::size_t>(e.partner)].alive = false;
        break;
      }
    }
    SignSeq seq = config.sign_sequence();
    if (!audit_transition(prev_seq, seq, e.kind, &why)) {
      report.pass = false;
      report.first_violation = why + " at t=" + std::to_string(e.time);
      return report;
    }
    const int sigma = count_crossings(seq);
    if (sigma > prev_sigma || !is_substring(seq, initial_seq)) {
      report.pass = false;
      report.first_violation = "crossing number or substring order violated";
      return report;
    }
    prev_seq = std::move(seq);
    prev_sigma = sigma;
    ++report.events_checked;
    if (e.kind == EventKind::annihilation) ++report.annihilations;
    if (e.kind == EventKind::death) ++report.deaths;
  }
  return report;
}

}  // namespace brw
