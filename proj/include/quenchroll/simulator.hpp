#pragma once
// Semi-implicit pseudospectral time integrator for the quenched equation,
// used to cross-check stationarity and reproduce roll invasion.

#include <functional>

#include "quenchroll/field.hpp"

namespace quenchroll {

struct IntegrationError : std::runtime_error {
  double time;
  IntegrationError(const std::string& m, double t) : std::runtime_error(m), time(t) {}
};

struct SimState {
  GridSpec grid;
  std::vector<double> u;
  double t = 0.0;
  double dt = 0.05;
  double omega = 1.0;
  double delta = 0.0;
  std::vector<double> mu;        // +1 on x <= 0, -1 on x > 0
  std::vector<double> lin_denom; // 1 + dt (1 - omega^2 xi^2)^2, per bin

  static SimState make(const GridSpec& g, double delta, double omega, double dt,
                       std::vector<double> u0);
};

// One first-order IMEX step: stiff linear part implicit (exact rational
// factor per mode), nonlinearity explicit. Keeps the field real and guards
// against blow-up (||u||_inf <= 2).
void step(SimState& s);

struct DriftResult {
  double inf = 0.0;
  double l2 = 0.0;
  int steps = 0;
};

// Evolves from U for time T and returns interior-window norms of u(T) - U.
DriftResult steady_drift(const GridSpec& g, double delta, double omega,
                         const std::vector<double>& U, double T, double dt);

struct InvadeResult {
  SimState final_state;
  double left_amplitude = 0.0;   // sqrt(2 <u^2>) over the left interior window
  double right_sup = 0.0;        // sup |u| over the right interior window
  double dominant_freq = 0.0;    // left-half spectral peak
  int snapshots = 0;
};

// Small noise on x < 0, zero on x > 0; emits snapshots through the callback.
InvadeResult invade(const GridSpec& g, double delta, double T, double dt, unsigned long seed,
                    double noise_amp = 0.0,  // 0 = default 0.2 * roll amplitude scale
                    int snap_every = 0,      // 0 = no snapshots
                    const std::function<void(const SimState&)>& on_snapshot = nullptr);

} // namespace quenchroll
