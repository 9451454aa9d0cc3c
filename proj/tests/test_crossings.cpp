#include <cmath>
#include <stdexcept>

#include "brw/crossings.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace brw;

namespace {

constexpr double kTol = 1e-12;

LatticeField field_from(std::vector<double> values, int lo) {
  LatticeField f;
  f.window = {lo, lo + static_cast<int>(values.size()) - 1};
  f.values = std::move(values);
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("crossings");

TEST_CASE("crossing count basics") {
  CHECK(count_crossings(field_from({0, 0, 0, 0}, -2), kTol) == 0);
  CHECK(count_crossings(field_from({-1, -1, -1, 1, 1, 1}, -3), kTol) == 1);
  // frozen from the enumeration oracle: (+1, 0, -1, 0, +1) has two crossings
  std::vector<double> f{1, 0, -1, 0, 1};
  CHECK(oracles::crossings_by_enumeration(f, kTol) == 2);
  CHECK(count_crossings(field_from(f, 0), kTol) == 2);
}

TEST_CASE("compress produces alternating runs") {
  auto s = compress(std::vector<double>{2, -1, 0, 3}, kTol);
  CHECK(s == SignSeq{1, -1, 1});
  auto all_pos = compress(std::vector<double>{0.5, 1.0, 2.0}, kTol);
  CHECK(all_pos == SignSeq{1});
  CHECK(compress(std::vector<double>{0, 0}, kTol).empty());
}

TEST_CASE("crossing count equals compressed length minus one, exhaustively") {
  // every sign pattern over {-1, 0, +1} up to length 7, against the literal
  // subsequence enumeration; lengths 8..10 against the DP oracle
  for (int n = 1; n <= 10; ++n) {
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (long code = 0; code < total; ++code) {
      long c = code;
      std::vector<double> v(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = static_cast<double>(c % 3 - 1);
        c /= 3;
      }
      const int got = count_crossings(
          std::span<const double>(v.data(), v.size()), kTol);
      const int dp = oracles::crossings_by_dp(v, kTol);
      REQUIRE(got == dp);
      auto comp = compress(std::span<const double>(v.data(), v.size()), kTol);
      REQUIRE(got == (comp.empty() ? 0 : static_cast<int>(comp.size()) - 1));
      if (n <= 7)
        REQUIRE(got == oracles::crossings_by_enumeration(v, kTol));
    }
  }
}

TEST_CASE("substring relation") {
  CHECK(is_substring({1, -1}, {1, -1, 1}));
  CHECK(!is_substring({-1, 1}, {1, -1}));
  CHECK(is_substring({}, {1, -1}));
  CHECK(is_substring({}, {}));
}

TEST_CASE("substring agrees with exhaustive enumeration and is an order") {
  Rng rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    auto draw = [&](int max_len) {
      SignSeq s;
      const int len = static_cast<int>(rng.below(max_len + 1));
      for (int i = 0; i < len; ++i) s.push_back(rng.fair_sign());
      return s;
    };
    SignSeq a = draw(5), b = draw(9), c = draw(9);
    CHECK(is_substring(a, b) == oracles::subsequence_by_enumeration(a, b));
    // reflexivity and transitivity
    CHECK(is_substring(b, b));
    if (is_substring(a, b) && is_substring(b, c)) CHECK(is_substring(a, c));
    // substring implies no more crossings
    if (is_substring(a, b))
      CHECK(count_crossings(a) <= count_crossings(b));
  }
}

TEST_CASE("monotone crossings along the linear flow") {
  IntegratorOpts opts;
  Window w{-40, 40};
  Rng rng(606);
  SUBCASE("random instances never gain a crossing") {
    for (int trial = 0; trial < 20; ++trial) {
      LatticeField u0 = LatticeField::zeros(w);
      // three alternating-sign blocks on [-10, 10]
      int x = -10;
      int sign = rng.fair_sign();
      while (x <= 10) {
        const int len = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < len && x <= 10; ++i, ++x)
          u0.at(x) = sign * rng.uniform(0.2, 1.0);
        sign = -sign;
      }
      std::vector<double> kv(static_cast<std::size_t>(w.size()));
      for (auto& v : kv) v = rng.uniform(-1.5, 1.5);
      auto kappa = Potential::site_field(kv, w);
      auto report = check_monotone_crossings(
          u0, kappa, {0.0, 0.2, 0.5, 1.0, 2.0, 3.0}, opts);
      CHECK(report.pass);
      for (std::size_t k = 1; k < report.sigma.size(); ++k)
        CHECK(report.sigma_robust[k] <= report.sigma[k - 1]);
    }
  }
  SUBCASE("sign-constant data keeps zero crossings") {
    LatticeField u0 = LatticeField::zeros(w);
    for (int x = -5; x <= 5; ++x) u0.at(x) = 0.3;
    auto report = check_monotone_crossings(u0, Potential::constant(0.5),
                                           {0.0, 1.0, 2.0}, opts);
    CHECK(report.pass);
    for (int s : report.sigma) CHECK(s == 0);
  }
  SUBCASE("a single output time passes trivially") {
    LatticeField u0 = LatticeField::delta(0, w);
    auto report =
        check_monotone_crossings(u0, Potential::constant(0.0), {0.0}, opts);
    CHECK(report.pass);
  }
}

TEST_CASE("single interface detector") {
  SUBCASE("negative ray then positive ray") {
    LatticeField u = LatticeField::zeros({-5, 5});
    for (int x = -5; x <= 0; ++x) u.at(x) = -1.0;
    for (int x = 3; x <= 5; ++x) u.at(x) = 1.0;
    auto r = check_single_interface(u, kTol);
    CHECK(r.ok);
    CHECK(*r.a == 0);
    CHECK(*r.b == 3);
  }
  SUBCASE("wrong order fails") {
    LatticeField u = LatticeField::zeros({-5, 5});
    u.at(0) = 1.0;
    u.at(2) = -1.0;
    CHECK(!check_single_interface(u, kTol).ok);
  }
  SUBCASE("hole inside the positive block fails") {
    LatticeField u = LatticeField::zeros({-5, 5});
    u.at(-2) = -1.0;
    u.at(1) = 1.0;
    u.at(2) = 0.0;
    u.at(3) = 1.0;
    CHECK(!check_single_interface(u, kTol).ok);
  }
  SUBCASE("empty field passes") {
    CHECK(check_single_interface(LatticeField::zeros({-3, 3}), kTol).ok);
  }
}

TEST_CASE("difference of two front solutions keeps a single interface") {
  // W(s, x) = w_front_z(s, x) - w_front_y(s + u, x) starts as
  // indicator-minus-cdf data and must stay interface-shaped
  IntegratorOpts opts;
  auto env = sample_environment({DistKind::two_point, 1.0, 2.0, 0.5},
                                {-80, 80}, 23);
  const int z = 0, y = 3;
  const double u = 0.5;
  Window w{-46, 46};
  std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> shifted;
  for (double s : grid) shifted.push_back(s + u);
  auto wz = integrate_fkpp_path(front_indicator_ic(z, w), env, grid, opts);
  LatticeField wy0 = front_indicator_ic(y, w);
  auto wy = integrate_fkpp_path(wy0, env, shifted, opts);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    LatticeField W = LatticeField::zeros(w);
    for (int x = w.lo; x <= w.hi; ++x)
      W.at(x) = wz[k].at(x) - wy[k].at(x);
    auto r = check_single_interface(W, opts.zero_tol);
    CHECK(r.ok);
  }
}

TEST_SUITE_END();
