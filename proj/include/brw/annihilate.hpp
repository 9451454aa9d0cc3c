#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brw/crossings.hpp"
#include "brw/fkpp.hpp"
#include "brw/rng.hpp"
#include "brw/walk.hpp"

namespace brw {

/// One signed particle. An annihilated particle freezes at its annihilation
/// site; a killed one moves to the cemetery. Both stop being alive.
struct SignedParticle {
  int index = 0;       // original index, used for the annihilation tie break
  int site = 0;        // current or frozen site (meaningless in the cemetery)
  int sign = 1;        // +1 or -1
  bool alive = true;
  bool in_cemetery = false;
  double frozen_at = -1.0;  // annihilation or death time, -1 while alive
};

/// State of the annihilating signed-particle system. No two alive particles
/// of opposite sign ever share a site, and annihilations come in (+,-)
/// pairs, so the alive particles carry a well-defined sign sequence.
struct SignedConfig {
  std::vector<SignedParticle> particles;
  double time = 0.0;

  /// Signs of the alive particles in site order.
  SignSeq sign_sequence() const;
  long alive_count() const;
};

/// n particles with i.i.d. positions from |u0| / ||u0||_1 and the sign of u0
/// at the sampled site. Rejects u0 identically zero.
SignedConfig init_from_measure(const LatticeField& u0, int n, Rng rng);

enum class EventKind { jump, annihilation, death };

struct AnnihilationEvent {
  double time = 0.0;
  int particle = 0;
  EventKind kind = EventKind::jump;
  int site = 0;      // landing site (jump/annihilation) or last site (death)
  int partner = -1;  // annihilation partner, else -1
};

/// Piecewise-constant configuration path: the initial configuration plus the
/// chronological event log determine the state at any time.
struct EvolutionPath {
  SignedConfig initial;
  std::vector<AnnihilationEvent> events;
  SignedConfig final_config;

  SignedConfig at(double t) const;
};

void events_to_csv(const EvolutionPath& path, const std::string& file);

/// Evolves every alive particle as an independent killed walk (rate-1 jumps,
/// kill proposals at rate kappa.hi() thinned by kappa(t,x)/hi). A particle
/// jumping onto alive opposite-sign particles annihilates with the
/// smallest-index one; no annihilation in the cemetery. Event times are
/// strictly increasing, which the implementation asserts.
EvolutionPath evolve(const SignedConfig& init, const Potential& kappa,
                     double t_end, Rng rng);

/// Finite signed measure on a window plus separately tracked cemetery mass.
struct SignedMeasure {
  Window window{0, -1};  // empty
  std::vector<double> mass;
  double cemetery = 0.0;

  double at(int x) const;
};

/// (1/n) sum over alive particles of sign * delta_site; the signed cemetery
/// mass is reported separately. Frozen annihilated pairs cancel exactly, so
/// this equals the full signed empirical measure restricted to the lattice.
SignedMeasure empirical_measure(const SignedConfig& config);

/// Kolmogorov-type metric: max over x of the absolute difference of
/// cumulative sums up to x. Both arguments are zero-extended to the union
/// window.
double weak_distance(const SignedMeasure& mu, const LatticeField& f);
double weak_distance(const SignedMeasure& mu, const SignedMeasure& nu);

struct SubstringAuditReport {
  bool pass = true;
  long events_checked = 0;
  long annihilations = 0;
  long deaths = 0;
  std::string first_violation;
};

/// Structural check of one legal transition of the sign sequence:
/// a jump must leave it unchanged, a death removes exactly one sign, an
/// annihilation removes two adjacent opposite signs.
bool audit_transition(const SignSeq& before, const SignSeq& after,
                      EventKind kind, std::string* why = nullptr);

/// Replays an evolution event by event and verifies, exactly: every
/// transition is legal per audit_transition, sign sequences only ever lose
/// signs (substring order), annihilation partners obey the smallest-index
/// rule, jumps never land on an alive opposite-sign particle without
/// annihilating, and the crossing number never increases.
SubstringAuditReport substring_audit(const EvolutionPath& path);

}  // namespace brw
