#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brw/fkpp.hpp"

namespace brw {

/// Compressed sign sequence over {+1, -1}; adjacent entries of a compressed
/// field always differ.
using SignSeq = std::vector<int>;

/// Zero-crossing number: the largest n admitting x_1 < ... < x_{n+1} with
/// strictly alternating signs, values within zero_tol of 0 treated as exact
/// zeros. 0 for sign-constant or null input.
int count_crossings(std::span<const double> values, double zero_tol);
int count_crossings(const LatticeField& f, double zero_tol);

/// Signs of maximal nonzero runs, adjacent entries distinct. The crossing
/// number of the input equals (length - 1) when nonempty.
SignSeq compress(std::span<const double> values, double zero_tol);
SignSeq compress(const LatticeField& f, double zero_tol);

int count_crossings(const SignSeq& s);

/// True iff a is a (not necessarily contiguous) subsequence of b.
bool is_substring(const SignSeq& a, const SignSeq& b);

/// Outcome of the crossing-monotonicity check along an integration. Sign
/// decisions use the dead zone: the crossing count is taken both at zero_tol
/// and at 100 * zero_tol, and a step counts as a violation only if even the
/// crossings realized by values above 100 * zero_tol exceed the previous
/// generous count.
struct MonotoneReport {
  std::vector<double> times;
  std::vector<int> sigma;         // threshold zero_tol
  std::vector<int> sigma_robust;  // threshold 100 * zero_tol
  bool pass = true;
  int first_violation = -1;  // index into times, -1 if none
  std::vector<LatticeField> fields_at_violation;  // [before, after]
};

/// Integrates d/dt u = 1/2 lap u - kappa u and checks that the crossing
/// number is non-increasing along t_grid.
MonotoneReport check_monotone_crossings(const LatticeField& u0,
                                        const Potential& kappa,
                                        const std::vector<double>& t_grid,
                                        const IntegratorOpts& opts);

std::string monotone_report_to_json(const MonotoneReport& report);

struct InterfaceResult {
  bool ok = false;
  std::optional<int> a;  // rightmost negative site
  std::optional<int> b;  // leftmost positive site
};

/// True iff the thresholded negatives form one contiguous block with nothing
/// positive left of it and the positives one contiguous block with nothing
/// negative right of it, in that order. Retries at a 100x coarser threshold
/// before declaring failure, matching the dead-zone policy.
InterfaceResult check_single_interface(const LatticeField& u, double zero_tol);

}  // namespace brw
