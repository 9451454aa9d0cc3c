#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brw/annihilate.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace brw;

namespace {

LatticeField two_point_ic() {
  // u0 = delta_0 - delta_5
  LatticeField u0 = LatticeField::zeros({-2, 7});
  u0.at(0) = 1.0;
  u0.at(5) = -1.0;
  return u0;
}

Potential quenched_kappa(std::uint64_t seed, Window w) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(w.size()));
  for (auto& x : v) x = rng.bernoulli(0.5) ? 2.0 : 1.0;
  return Potential::site_field(std::move(v), w);
}

}  // namespace

TEST_SUITE_BEGIN("annihilate");

TEST_CASE("initial sample splits evenly between the two atoms") {
  auto config = init_from_measure(two_point_ic(), 100, Rng(1));
  long at0 = 0, at5 = 0;
  for (const auto& p : config.particles) {
    if (p.site == 0) {
      CHECK(p.sign == 1);
      ++at0;
    } else {
      CHECK(p.site == 5);
      CHECK(p.sign == -1);
      ++at5;
    }
  }
  CHECK(at0 + at5 == 100);
  // binomial(100, 1/2): three sigma is 15
  CHECK(std::abs(at0 - 50) <= 15);
}

TEST_CASE("nonnegative data gives all plus signs") {
  LatticeField u0 = LatticeField::zeros({-3, 3});
  for (int x = -3; x <= 3; ++x) u0.at(x) = 0.1 + 0.1 * (x + 3);
  auto config = init_from_measure(u0, 200, Rng(2));
  for (const auto& p : config.particles) CHECK(p.sign == 1);
}

TEST_CASE("empirical law of the positions concentrates on |u0|") {
  LatticeField u0 = LatticeField::zeros({0, 3});
  u0.at(0) = 0.5;
  u0.at(1) = -0.25;
  u0.at(3) = 0.25;
  const int n = 100000;
  auto config = init_from_measure(u0, n, Rng(3));
  std::vector<long> hits(4, 0);
  for (const auto& p : config.particles) ++hits[static_cast<std::size_t>(p.site)];
  const double probs[4] = {0.5, 0.25, 0.0, 0.25};
  for (int x = 0; x <= 3; ++x) {
    const double p = probs[x];
    const double freq = static_cast<double>(hits[static_cast<std::size_t>(x)]) / n;
    const double se = std::sqrt(p * (1 - p) / n) + 1e-12;
    CHECK(std::abs(freq - p) <= 3.0 * se);
  }
}

TEST_CASE("the zero measure is rejected") {
  CHECK_THROWS(init_from_measure(LatticeField::zeros({-2, 2}), 10, Rng(4)));
}

TEST_CASE("single particle never annihilates and dies at a thinned time") {
  auto kappa = Potential::constant(2.0);
  Rng master(5);
  double s = 0.0;
  const long n = 20000;
  for (long i = 0; i < n; ++i) {
    SignedConfig config;
    config.particles.push_back({0, 0, 1, true, false, -1.0});
    auto path = evolve(config, kappa, 50.0, master.substream(i));
    long deaths = 0;
    for (const auto& e : path.events) {
      CHECK(e.kind != EventKind::annihilation);
      if (e.kind == EventKind::death) ++deaths;
    }
    REQUIRE(deaths == 1);
    const auto& p = path.final_config.particles[0];
    CHECK(!p.alive);
    CHECK(p.in_cemetery);
    s += p.frozen_at;
  }
  // lifetime is exponential(2)
  const double mean = s / n;
  const double se = 0.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - 0.5) <= 3.0 * se);
}

TEST_CASE("same-sign particles pass through each other") {
  auto kappa = Potential::constant(1.0);
  Rng master(6);
  for (long i = 0; i < 500; ++i) {
    SignedConfig config;
    config.particles.push_back({0, 0, 1, true, false, -1.0});
    config.particles.push_back({1, 1, 1, true, false, -1.0});
    auto path = evolve(config, kappa, 20.0, master.substream(i));
    for (const auto& e : path.events)
      CHECK(e.kind != EventKind::annihilation);
  }
}

TEST_CASE("near-instant killing makes annihilation a two-clock race") {
  // (+ at 0, - at 1), kappa == 1000: the first event is a kill with
  // probability 2000/2002, a meeting jump with probability 1/2002
  auto kappa = Potential::constant(1000.0);
  Rng master(7);
  const long n = 100000;
  long annihilated = 0;
  for (long i = 0; i < n; ++i) {
    SignedConfig config;
    config.particles.push_back({0, 0, 1, true, false, -1.0});
    config.particles.push_back({1, 1, -1, true, false, -1.0});
    auto path = evolve(config, kappa, 5.0, master.substream(i));
    for (const auto& e : path.events)
      if (e.kind == EventKind::annihilation) ++annihilated;
  }
  const double p = static_cast<double>(annihilated) / n;
  const double ref = 1.0 / 2002.0;
  const double se = std::sqrt(ref * (1 - ref) / n);
  CHECK(std::abs(p - ref) <= 3.0 * se);
}

TEST_CASE("empirical measure bookkeeping") {
  SUBCASE("everything dead leaves the zero measure") {
    SignedConfig config;
    config.particles.push_back({0, 0, 1, false, true, 0.5});
    config.particles.push_back({1, 2, -1, false, true, 0.7});
    auto mu = empirical_measure(config);
    CHECK(mu.mass.empty());
    CHECK(mu.cemetery == doctest::Approx(0.0));
  }
  SUBCASE("initial sample reproduces its own signed measure") {
    auto config = init_from_measure(two_point_ic(), 1000, Rng(8));
    auto mu = empirical_measure(config);
    double plus = 0.0, minus = 0.0;
    for (const auto& p : config.particles)
      (p.sign > 0 ? plus : minus) += 1.0;
    CHECK(mu.at(0) == doctest::Approx(plus / 1000.0));
    CHECK(mu.at(5) == doctest::Approx(-minus / 1000.0));
  }
}

TEST_CASE("weak distance properties") {
  SignedMeasure a;
  a.window = {0, 2};
  a.mass = {0.5, 0.0, -0.5};
  SUBCASE("identical arguments give zero") {
    CHECK(weak_distance(a, a) == doctest::Approx(0.0));
  }
  SUBCASE("a point mass difference is its mass") {
    SignedMeasure b = a;
    b.mass[1] += 0.25;
    CHECK(weak_distance(a, b) == doctest::Approx(0.25));
  }
  SUBCASE("triangle inequality on random triples") {
    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
      auto draw = [&] {
        SignedMeasure m;
        m.window = {-3, 3};
        m.mass.resize(7);
        for (auto& v : m.mass) v = rng.uniform(-1.0, 1.0);
        return m;
      };
      auto x = draw(), y = draw(), z = draw();
      CHECK(weak_distance(x, z) <=
            weak_distance(x, y) + weak_distance(y, z) + 1e-12);
    }
  }
}

TEST_CASE("substring audit passes on random runs") {
  Window w{-30, 30};
  auto kappa = quenched_kappa(11, w);
  Rng master(10);
  long checked = 0;
  for (long rep = 0; rep < 100; ++rep) {
    LatticeField u0 = LatticeField::zeros(w);
    Rng shape = master.substream(rep);
    for (int x = -8; x <= 8; ++x)
      u0.at(x) = shape.uniform(-1.0, 1.0);
    auto config = init_from_measure(u0, 20, shape.substream(1));
    auto path = evolve(config, kappa, 3.0, shape.substream(2));
    auto report = substring_audit(path);
    CHECK(report.pass);
    checked += report.events_checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("audit flags a hand-built illegal transition") {
  SignSeq before{1, -1};
  SignSeq swapped{-1, 1};
  std::string why;
  CHECK(!audit_transition(before, swapped, EventKind::jump, &why));
  CHECK(!why.empty());
  // removing two non-adjacent signs is illegal too
  SignSeq b2{1, -1, 1, -1};
  SignSeq a2{-1, 1};
  CHECK(audit_transition(b2, a2, EventKind::annihilation) == false);
  // a legal annihilation removes an adjacent opposite pair
  SignSeq a3{1, -1};
  CHECK(audit_transition(b2, a3, EventKind::annihilation));
}

TEST_CASE("exact pairing: alive sign difference changes only at deaths") {
  Window w{-20, 20};
  auto kappa = quenched_kappa(13, w);
  LatticeField u0 = LatticeField::zeros(w);
  for (int x = -5; x <= 5; ++x) u0.at(x) = (x % 2 == 0 ? 1.0 : -1.0) * 0.5;
  auto config = init_from_measure(u0, 30, Rng(14));
  auto path = evolve(config, kappa, 4.0, Rng(15));
  auto diff_of = [](const SignedConfig& c) {
    long d = 0;
    for (const auto& p : c.particles)
      if (p.alive) d += p.sign;
    return d;
  };
  long prev = diff_of(path.initial);
  for (const auto& e : path.events) {
    const long now = diff_of(path.at(e.time));
    if (e.kind == EventKind::death)
      CHECK(std::abs(now - prev) == 1);
    else
      CHECK(now == prev);
    prev = now;
  }
}

TEST_CASE("normalized empirical measure approaches the linear solution") {
  Window w{-18, 23};
  auto kappa = quenched_kappa(17, w);
  LatticeField u0 = LatticeField::zeros(w);
  u0.at(0) = 0.5;
  u0.at(5) = -0.5;  // already normalized: |u0| sums to one
  IntegratorOpts opts;
  auto u = integrate_linear(u0, kappa, 1.0, opts);
  auto median_distance = [&](int n) {
    std::vector<double> d;
    Rng master(18);
    for (int s = 0; s < 9; ++s) {
      auto config = init_from_measure(u0, n, master.substream(100 * n + s));
      auto path = evolve(config, kappa, 1.0,
                         master.substream(100 * n + s).substream(1));
      d.push_back(weak_distance(empirical_measure(path.final_config), u));
    }
    std::sort(d.begin(), d.end());
    return d[d.size() / 2];
  };
  const double d100 = median_distance(100);
  const double d1000 = median_distance(1000);
  CHECK(d1000 < d100);
}

TEST_SUITE_END();
