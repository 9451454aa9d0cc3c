#pragma once

// Independent oracles for the test suites. These deliberately avoid the
// library's own code paths: the heat kernel comes from the Bessel series,
// crossing counts from literal subsequence enumeration, and the subsequence
// relation from full enumeration.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

/// P_0(X_t = y) for the rate-one continuous-time simple random walk:
/// e^{-t} I_{|y|}(t) with the modified Bessel function evaluated by its
/// power series.
inline double srw_kernel(int y, double t) {
  const int nu = y < 0 ? -y : y;
  if (t == 0.0) return nu == 0 ? 1.0 : 0.0;
  const double half = t / 2.0;
  // k = 0 term: (t/2)^nu / nu!
  double term = 1.0;
  for (int j = 1; j <= nu; ++j) term *= half / j;
  double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= half * half / (static_cast<double>(k) * (k + nu));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return std::exp(-t) * sum;
}

/// Literal reading of the crossing number: the largest n admitting indices
/// x_1 < ... < x_{n+1} with strictly alternating signs, found by trying
/// every subsequence. Exponential, for short inputs only.
inline int crossings_by_enumeration(const std::vector<double>& v, double tol) {
  const std::size_t n = v.size();
  int best = 0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    int prev = 0;
    int alternations = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask & (std::size_t{1} << i))) continue;
      int s = v[i] > tol ? 1 : (v[i] < -tol ? -1 : 0);
      if (s == 0) {
        ok = false;
        break;
      }
      if (prev != 0) {
        if (s == prev) {
          ok = false;
          break;
        }
        ++alternations;
      }
      prev = s;
    }
    if (ok && alternations > best) best = alternations;
  }
  return best;
}

/// Longest alternating subsequence by dynamic programming; an independent
/// polynomial-time route to the same quantity.
inline int crossings_by_dp(const std::vector<double>& v, double tol) {
  int up = 0, down = 0;  // lengths of best subsequences ending +/-
  for (double x : v) {
    if (x > tol)
      up = std::max(up, down + 1);
    else if (x < -tol)
      down = std::max(down, up + 1);
  }
  const int len = std::max(up, down);
  return len > 0 ? len - 1 : 0;
}

/// Subsequence relation by exhaustive enumeration of deletions.
inline bool subsequence_by_enumeration(const std::vector<int>& a,
                                       const std::vector<int>& b) {
  if (a.empty()) return true;
  if (b.empty()) return false;
  const std::size_t n = b.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<int> picked;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) picked.push_back(b[i]);
    if (picked == a) return true;
  }
  return false;
}

/// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
