#pragma once
// Periodic roll solutions of the homogeneous equation and their
// reparametrization by amplitude.

#include <complex>
#include <vector>

#include "quenchroll/field.hpp"

namespace quenchroll {

struct PeriodicProfile {
  // modes[m + M] = c_m for m = -M..M; real profile: c_{-m} = conj(c_m)
  std::vector<cplx> modes;
  int mode_count = 0;  // M
  double delta = 0.0;
  double Omega = 0.0;
  double gamma = 0.0;
  double omega = 1.0;  // sqrt(1 + delta*Omega)
  double eps = 0.0;    // amplitude, 2|c_1|
  double residual = 0.0;
  int newton_iterations = 0;

  cplx mode(int m) const { return modes[m + mode_count]; }

  // u and derivatives at arbitrary points by Fourier summation
  double eval(double x, int deriv = 0) const;
  void eval_derivs(const std::vector<double>& x, std::vector<double>& u,
                   std::vector<double>& u1, std::vector<double>& u2,
                   std::vector<double>& u3) const;
};

struct RollsError : std::runtime_error {
  double last_residual;
  RollsError(const std::string& msg, double res)
      : std::runtime_error(msg), last_residual(res) {}
};

// Newton on the Galerkin system with phase condition arg(c_1) = gamma and
// initial amplitude guess eps0 = delta sqrt(4/3 (1 - Omega^2)).
PeriodicProfile solve_rolls(double delta, double Omega, double gamma, int modes = 16,
                            double tol = 1e-12);

// Inverse parametrization: the delta whose roll amplitude equals eps.
double delta_of(double eps, double Omega, double gamma, double tol = 1e-10);

struct HamiltonianValue {
  double mean = 0.0;
  double max_deviation = 0.0;  // pointwise deviation from the mean
};

// H[V; eta] = -(omega^4/2) V''^2 + omega^2 V'^2 + omega^4 V' V''' + (1 - eta + V^2)^2 / 4
// evaluated over one period with spectral derivatives.
HamiltonianValue hamiltonian_of_rolls(const PeriodicProfile& p, double eta);
inline HamiltonianValue hamiltonian_of_rolls(const PeriodicProfile& p) {
  return hamiltonian_of_rolls(p, p.delta * p.delta);
}

// Right-state invariant for the zero profile: (1 + delta^2)^2 / 4.
inline double hamiltonian_right_zero(double delta) {
  const double a = 1.0 + delta * delta;
  return 0.25 * a * a;
}

} // namespace quenchroll
