#include "brw/crossings.hpp"

#include <sstream>

namespace brw {

namespace {

int sign_of(double v, double tol) {
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

InterfaceResult interface_at_threshold(const LatticeField& u, double tol) {
  InterfaceResult r;
  int first_neg = 0, last_neg = 0, first_pos = 0, last_pos = 0;
  bool has_neg = false, has_pos = false;
  for (int x = u.window.lo; x <= u.window.hi; ++x) {
    const int s = sign_of(u.at(x), tol);
    if (s < 0) {
      if (!has_neg) first_neg = x;
      last_neg = x;
      has_neg = true;
    } else if (s > 0) {
      if (!has_pos) first_pos = x;
      last_pos = x;
      has_pos = true;
    }
  }
  if (has_neg) r.a = last_neg;
  if (has_pos) r.b = first_pos;
  if (has_neg && has_pos && !(last_neg < first_pos)) {
    r.ok = false;
    return r;
  }
  // no sub-threshold holes inside either block
  if (has_neg)
    for (int x = first_neg; x <= last_neg; ++x)
      if (sign_of(u.at(x), tol) >= 0) {
        r.ok = false;
        return r;
      }
  if (has_pos)
    for (int x = first_pos; x <= last_pos; ++x)
      if (sign_of(u.at(x), tol) <= 0) {
        r.ok = false;
        return r;
      }
  r.ok = true;
  return r;
}

}  // namespace

int count_crossings(std::span<const double> values, double zero_tol) {
  int crossings = 0;
  int prev = 0;
  for (double v : values) {
    const int s = sign_of(v, zero_tol);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++crossings;
    prev = s;
  }
  return crossings;
}

int count_crossings(const LatticeField& f, double zero_tol) {
  return count_crossings(std::span<const double>(f.values), zero_tol);
}

SignSeq compress(std::span<const double> values, double zero_tol) {
  SignSeq seq;
  for (double v : values) {
    const int s = sign_of(v, zero_tol);
    if (s == 0) continue;
    if (seq.empty() || seq.back() != s) seq.push_back(s);
  }
  return seq;
}

SignSeq compress(const LatticeField& f, double zero_tol) {
  return compress(std::span<const double>(f.values), zero_tol);
}

int count_crossings(const SignSeq& s) {
  int crossings = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] != s[i - 1]) ++crossings;
  return crossings;
}

bool is_substring(const SignSeq& a, const SignSeq& b) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < b.size() && i < a.size(); ++j)
    if (b[j] == a[i]) ++i;
  return i == a.size();
}

MonotoneReport check_monotone_crossings(const LatticeField& u0,
                                        const Potential& kappa,
                                        const std::vector<double>& t_grid,
                                        const IntegratorOpts& opts) {
  MonotoneReport report;
  auto fields = integrate_linear_path(u0, kappa, t_grid, opts);
  const double tol = opts.zero_tol;
  report.times = t_grid;
  report.sigma.reserve(fields.size());
  report.sigma_robust.reserve(fields.size());
  for (const auto& f : fields) {
    report.sigma.push_back(count_crossings(f, tol));
    report.sigma_robust.push_back(count_crossings(f, 100.0 * tol));
  }
  for (std::size_t k = 1; k < fields.size(); ++k) {
    // A robust crossing pattern later may never exceed even the
    // noise-inclusive count earlier.
    if (report.sigma_robust[k] > report.sigma[k - 1]) {
      report.pass = false;
      report.first_violation = static_cast<int>(k);
      report.fields_at_violation = {fields[k - 1], fields[k]};
      break;
    }
  }
  return report;
}

std::string monotone_report_to_json(const MonotoneReport& report) {
  std::ostringstream os;
  os << "{\"pass\":" << (report.pass ? "true" : "false");
  os << ",\"first_violation\":" << report.first_violation;
  os << ",\"times\":[";
  for (std::size_t i = 0; i < report.times.size(); ++i)
    os << (i ? "," : "") << report.times[i];
  os << "],\"sigma\":[";
  for (std::size_t i = 0; i < report.sigma.size(); ++i)
    os << (i ? "," : "") << report.sigma[i];
  os << "],\"sigma_robust\":[";
  for (std::size_t i = 0; i < report.sigma_robust.size(); ++i)
    os << (i ? "," : "") << report.sigma_robust[i];
  os << "]";
  if (!report.fields_at_violation.empty()) {
    os << ",\"violation_fields\":[";
    for (std::size_t j = 0; j < report.fields_at_violation.size(); ++j) {
      const auto& f = report.fields_at_violation[j];
      os << (j ? "," : "") << "{\"time\":" << f.time << ",\"lo\":"
         << f.window.lo << ",\"values\":[";
      for (std::size_t i = 0; i < f.values.size(); ++i)
        os << (i ? "," : "") << f.values[i];
      os << "]}";
    }
    os << "]";
  }
  os << "}";
  return os.str();
}

InterfaceResult check_single_interface(const LatticeField& u,
                                       double zero_tol) {
  InterfaceResult r = interface_at_threshold(u, zero_tol);
  if (r.ok) return r;
  // Forgive patterns whose offending values sit below the dead zone.
  return interface_at_threshold(u, 100.0 * zero_tol);
}

}  // namespace brw
