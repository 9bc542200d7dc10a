#pragma once
// Hamiltonian matching at the quench point and the wavenumber selection loop.

#include "quenchroll/reduced.hpp"

namespace quenchroll {

struct AssembledProfile {
  QuenchContext ctx;
  CorrectorState state;
  std::vector<double> U;  // v_near + v_far + chi u_rolls on the fast grid
  double U0 = 0.0;        // value at the quench point x = 0

  AssembledProfile(QuenchContext c, CorrectorState s);
};

// Runs the reduced fixed point at the configured (delta, Omega, gamma) and
// assembles the profile.
AssembledProfile assemble_profile(const QuenchConfig& cfg,
                                  std::shared_ptr<const EnvelopeProfile> env);

// [-delta^2 U0^2 - delta^2] - [H_left(rolls) - H_right(0)]
double constraint_residual(double delta, double U0, const PeriodicProfile& rolls);

// scaled functional: constraint_residual / delta^2
double scaled_constraint(double delta, double U0, const PeriodicProfile& rolls);

struct SelectionResult {
  double delta = 0.0;
  double gamma = 0.0;
  double Omega_star = 0.0;
  double omega_star = 1.0;
  double constraint_residual = 0.0;  // scaled functional at the root
  double H_left = 0.0;
  double H_right = 0.0;
  int iterations = 0;       // outer root-find evaluations
  double U_at_0 = 0.0;
  double eps = 0.0;
};

struct SelectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Safeguarded secant/bisection on the scaled constraint over Omega in
// (-1/3, 1/3); every evaluation runs the full pipeline at that Omega. When
// out_profile is given it receives the profile assembled at the root.
SelectionResult select_omega(double delta, double gamma, const QuenchConfig& base,
                             std::shared_ptr<const EnvelopeProfile> env,
                             std::unique_ptr<AssembledProfile>* out_profile = nullptr);

struct HamiltonianExpansion {
  double lhs = 0.0;      // H_left(rolls) - H_right(0), computed from profiles
  double rhs = 0.0;      // -delta^2 + (4/3) delta^3 (Omega + Omega^3)
  double rel_err = 0.0;  // |lhs - rhs| / |lhs|
};

HamiltonianExpansion hamiltonian_expansion_check(double delta, double Omega, double gamma);

} // namespace quenchroll
