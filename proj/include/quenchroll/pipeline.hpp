#pragma once
// End-to-end orchestration: build the heteroclinic profile, probe parameter
// continuity, and run the invariant verification suite.

#include <map>

#include "quenchroll/selection.hpp"
#include "quenchroll/simulator.hpp"

namespace quenchroll {

struct SolutionBundle {
  QuenchConfig cfg;
  std::shared_ptr<const EnvelopeProfile> envelope;
  PeriodicProfile rolls;
  CorrectorState corrector;
  SelectionResult selection;
  SpectralField U;          // assembled profile on the fast grid (scaled variable)
  GridSpec grid;
  double omega = 1.0;
  double eps = 0.0;
  std::map<std::string, double> diagnostics;
};

// envelope -> selection (unless Omega pinned) -> reduced fixed point ->
// corrector -> assembly.
SolutionBundle build(double delta, double gamma, const QuenchConfig& cfg,
                     bool pin_omega = false,
                     std::shared_ptr<const EnvelopeProfile> env = nullptr);

struct ContinuityResult {
  double box_distance = 0.0;       // sup over the shared interior window
  double farfield_distance = 0.0;  // sup of the roll far fields over all beat phases
  double beat_window = 0.0;        // 2 pi / |omega_1 - omega_2| (inf if equal)
};

ContinuityResult continuity_probe(const SolutionBundle& a, const SolutionBundle& b);

// sup over the real line of |r_a(omega_a z) - r_b(omega_b z)| for the
// periodic roll far fields, computed over the relative beat phase.
double farfield_beat_distance(const PeriodicProfile& a, const PeriodicProfile& b);

struct VerifyEntry {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

std::vector<VerifyEntry> verify(const QuenchConfig& cfg);

std::shared_ptr<const EnvelopeProfile> make_envelope(const QuenchConfig& cfg);

} // namespace quenchroll
