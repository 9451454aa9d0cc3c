#include "brw/env.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace brw {

namespace {

constexpr int kEnvFileVersion = 1;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

void DistSpec::validate() const {
  if (!(ei > 0.0)) fail("dist: ei must be positive, got " + std::to_string(ei));
  if (!(ei <= es)) fail("dist: requires ei <= es, got ei=" + std::to_string(ei) +
                        " es=" + std::to_string(es));
  if (kind == DistKind::two_point && !(p >= 0.0 && p <= 1.0))
    fail("dist: two_point parameter p must lie in [0,1]");
}

Environment::Environment(DistSpec dist, Window window, std::uint64_t seed,
                         std::vector<double> rates)
    : dist_(dist), window_(window), seed_(seed), rates_(std::move(rates)) {
  dist_.validate();
  if (window_.lo > window_.hi) fail("environment: window_lo > window_hi");
  if (static_cast<int>(rates_.size()) != window_.size())
    fail("environment: rates array size " + std::to_string(rates_.size()) +
         " does not match window size " + std::to_string(window_.size()));
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    const double r = rates_[i];
    if (!(r >= dist_.ei - 1e-12 && r <= dist_.es + 1e-12))
      fail("environment: rate at site " +
           std::to_string(window_.lo + static_cast<int>(i)) + " is " +
           std::to_string(r) + ", outside [ei, es]");
  }
}

double Environment::rate_at(int x) const {
  if (!window_.contains(x))
    throw std::out_of_range("environment: site " + std::to_string(x) +
                            " outside window [" + std::to_string(window_.lo) +
                            ", " + std::to_string(window_.hi) + "]");
  return rates_[static_cast<std::size_t>(x - window_.lo)];
}

Environment sample_environment(const DistSpec& dist, Window window,
                               std::uint64_t seed) {
  dist.validate();
  if (window.lo > window.hi) fail("sample_environment: window_lo > window_hi");
  Rng rng(seed);
  std::vector<double> rates(static_cast<std::size_t>(window.size()));
  for (auto& r : rates) {
    if (dist.kind == DistKind::two_point)
      r = rng.bernoulli(dist.p) ? dist.es : dist.ei;
    else
      r = rng.uniform(dist.ei, dist.es);
  }
  return Environment(dist, window, seed, std::move(rates));
}

ShiftedPotential shifted_potential(const Environment& env) {
  ShiftedPotential out;
  out.window = env.window();
  out.delta = env.delta();
  out.zeta.reserve(env.rates().size());
  for (double r : env.rates()) out.zeta.push_back(r - env.es());
  return out;
}

void save_environment(const Environment& env, const std::string& path) {
  nlohmann::json j;
  j["version"] = kEnvFileVersion;
  j["dist"]["kind"] =
      env.dist().kind == DistKind::two_point ? "two_point" : "uniform";
  j["dist"]["ei"] = env.dist().ei;
  j["dist"]["es"] = env.dist().es;
  if (env.dist().kind == DistKind::two_point) j["dist"]["p"] = env.dist().p;
  j["window"]["lo"] = env.window().lo;
  j["window"]["hi"] = env.window().hi;
  j["seed"] = env.seed();
  j["rates"] = env.rates();

  std::ofstream out(path);
  if (!out) fail("save_environment: cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) fail("save_environment: write to '" + path + "' failed");
}

Environment load_environment(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("load_environment: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    fail("load_environment: malformed file '" + path + "': " + e.what());
  }
  try {
    if (j.at("version").get<int>() != kEnvFileVersion)
      fail("load_environment: unsupported version in '" + path + "'");
    DistSpec dist;
    const auto& jd = j.at("dist");
    const std::string kind = jd.at("kind").get<std::string>();
    if (kind == "two_point")
      dist.kind = DistKind::two_point;
    else if (kind == "uniform")
      dist.kind = DistKind::uniform;
    else
      fail("load_environment: unknown dist kind '" + kind + "'");
    dist.ei = jd.at("ei").get<double>();
    dist.es = jd.at("es").get<double>();
    if (dist.kind == DistKind::two_point) dist.p = jd.at("p").get<double>();
    Window w{j.at("window").at("lo").get<int>(),
             j.at("window").at("hi").get<int>()};
    auto seed = j.at("seed").get<std::uint64_t>();
    auto rates = j.at("rates").get<std::vector<double>>();
    return Environment(dist, w, seed, std::move(rates));
  } catch (const nlohmann::json::exception& e) {
    fail("load_environment: invalid field in '" + path + "': " + e.what());
  }
}

}  // namespace brw
