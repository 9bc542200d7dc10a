#include "quenchroll/selection.hpp"

#include <cmath>

namespace quenchroll {

AssembledProfile::AssembledProfile(QuenchContext c, CorrectorState s)
    : ctx(std::move(c)), state(std::move(s)) {
  const int n = ctx.grid().point_count;
  U.resize(n);
  const auto& vn = state.v_near.samples();
  const auto& vf = state.v_far.samples();
  for (int p = 0; p < n; ++p)
    U[p] = vn[p].real() + vf[p].real() + ctx.chi()[p] * ctx.roll_samples()[p];
  U0 = U[ctx.grid().pos(0)];
}

AssembledProfile assemble_profile(const QuenchConfig& cfg,
                                  std::shared_ptr<const EnvelopeProfile> env) {
  QuenchContext ctx(cfg, std::move(env));
  CorrectorState st = reduced_fixed_point(ctx);
  return AssembledProfile(std::move(ctx), std::move(st));
}

double constraint_residual(double delta, double U0, const PeriodicProfile& rolls) {
  const double lhs = -delta * delta * U0 * U0 - delta * delta;
  const double Hl = hamiltonian_of_rolls(rolls, delta * delta).mean;
  const double Hr = hamiltonian_right_zero(delta);
  return lhs - (Hl - Hr);
}

double scaled_constraint(double delta, double U0, const PeriodicProfile& rolls) {
  if (delta == 0.0) return 0.0;
  return constraint_residual(delta, U0, rolls) / (delta * delta);
}

SelectionResult select_omega(double delta, double gamma, const QuenchConfig& base,
                             std::shared_ptr<const EnvelopeProfile> env,
                             std::unique_ptr<AssembledProfile>* out_profile) {
  SelectionResult res;
  res.delta = delta;
  res.gamma = gamma;
  if (delta == 0.0) {
    res.omega_star = 1.0;
    res.H_left = hamiltonian_right_zero(0.0);
    res.H_right = res.H_left;
    return res;
  }

  QuenchConfig cfg = base;
  cfg.delta = delta;
  cfg.gamma = gamma;
  // pin the discretization across the Omega loop so the functional is smooth
  if (cfg.grid_ell == 0) {
    const double eps0 = delta * std::sqrt(4.0 / 3.0);
    cfg.grid_ell = cfg.auto_ell(eps0);
  }
  if (cfg.grid_N == 0) cfg.grid_N = cfg.auto_N(cfg.grid_ell);

  int evals = 0;
  std::unique_ptr<AssembledProfile> last;
  auto S_of = [&](double Om) {
    cfg.Omega = Om;
    last = std::make_unique<AssembledProfile>(assemble_profile(cfg, env));
    ++evals;
    return scaled_constraint(delta, last->U0, last->ctx.rolls());
  };

  // bracket: the functional increases in Omega at rate ~ (4/3) delta
  double b = std::max(0.25 * delta, 4e-3);
  double a = -b;
  double Sa = S_of(a), Sb = S_of(b);
  int widen = 0;
  while (Sa * Sb > 0.0) {
    if (++widen > 6 || b > 0.33)
      throw SelectionError("select_omega: no sign change of the constraint in (-1/3, 1/3)");
    a *= 2.0;
    b *= 2.0;
    a = std::max(a, -0.33);
    b = std::min(b, 0.33);
    Sa = S_of(a);
    Sb = S_of(b);
  }

  double m = 0.5 * (a + b), Sm = 0.0;
  for (int itr = 0; itr < 60; ++itr) {
    m = b - Sb * (b - a) / (Sb - Sa);  // secant through the bracket
    if (!(m > a && m < b)) m = 0.5 * (a + b);
    Sm = S_of(m);
    if (std::fabs(Sm) < base.select_tol || (b - a) < 1e-9) break;
    if ((Sm > 0.0) == (Sb > 0.0)) {
      b = m;
      Sb = Sm;
    } else {
      a = m;
      Sa = Sm;
    }
  }

  res.Omega_star = m;
  res.omega_star = std::sqrt(1.0 + delta * m);
  res.constraint_residual = Sm;
  res.iterations = evals;
  res.U_at_0 = last->U0;
  res.eps = last->ctx.eps();
  res.H_left = hamiltonian_of_rolls(last->ctx.rolls(), delta * delta).mean;
  res.H_right = hamiltonian_right_zero(delta);
  if (out_profile) *out_profile = std::move(last);
  return res;
}

HamiltonianExpansion hamiltonian_expansion_check(double delta, double Omega, double gamma) {
  HamiltonianExpansion e;
  if (delta == 0.0) return e;
  const PeriodicProfile rolls = solve_rolls(delta, Omega, gamma);
  e.lhs = hamiltonian_of_rolls(rolls, delta * delta).mean - hamiltonian_right_zero(delta);
  e.rhs = -delta * delta +
          (4.0 / 3.0) * delta * delta * delta * (Omega + Omega * Omega * Omega);
  e.rel_err = std::fabs(e.lhs - e.rhs) / std::fabs(e.lhs);
  return e;
}

} // namespace quenchroll
