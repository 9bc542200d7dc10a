#include <doctest.h>

#include <cmath>

#include "quenchroll/pipeline.hpp"
#include "quenchroll/reduced.hpp"

using namespace quenchroll;

namespace {

QuenchConfig cfg_at(double delta, double Omega = 0.0, double gamma = 0.0) {
  QuenchConfig cfg;
  cfg.delta = delta;
  cfg.Omega = Omega;
  cfg.gamma = gamma;
  cfg.grid_ell = 32;
  cfg.grid_N = 8192;
  return cfg;
}

std::shared_ptr<const EnvelopeProfile> shared_env() {
  static std::shared_ptr<const EnvelopeProfile> env = [] {
    QuenchConfig cfg;
    return make_envelope(cfg);
  }();
  return env;
}

} // namespace

TEST_CASE("gamma terms: basic structure") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const GammaTerms t = gamma_terms(ctx);
  const GridSpec& gs = ctx.slow_grid();
  // Gamma2-hat at xi = 0 is the integral of chi'' = chi'(+S) - chi'(-S):
  // zero up to the box-truncated tails of chi'
  double g2max = 0.0;
  for (const auto& c : t.gamma2) g2max = std::max(g2max, std::abs(c));
  CHECK(std::abs(t.gamma2[gs.pos(0)]) < 1e-2 * g2max);
  // Gamma1 = chi (chi^2 - 1) -> 0 where chi -> 1, at the linearized rate
  const std::vector<cplx> g1x = inverse_transform(gs, t.gamma1);
  for (int p = 2; p < gs.point_count / 8; ++p) {
    const double one_minus = 1.0 - ctx.envelope().value(gs.x(p));
    CHECK(std::abs(g1x[p]) < 3.0 * one_minus + 1e-6);
  }
}

TEST_CASE("h_star: ODE identity makes the gamma1/gamma2 part equal c chi'-hat") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const GammaTerms t = gamma_terms(ctx);
  const GridSpec& gs = ctx.slow_grid();
  const double c = ctx.cfg().env_c;
  // (3 pi / 4) Gamma1 - 4 pi Gamma2 = F[c chi'] on the slow grid
  std::vector<cplx> chi1(gs.point_count);
  for (int p = 0; p < gs.point_count; ++p)
    chi1[p] = cplx(c * ctx.envelope().d1(gs.x(p)), 0.0);
  const std::vector<cplx> rhs = forward_transform(gs, chi1);
  double worst = 0.0, scale = 0.0;
  for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
    const int p = gs.pos(k);
    const cplx lhs = 0.75 * kPi * t.gamma1[p] - 4.0 * kPi * t.gamma2[p];
    worst = std::max(worst, std::abs(lhs - rhs[p]));
    scale = std::max(scale, std::abs(rhs[p]));
  }
  CHECK(worst < 1e-4 * scale);
}

TEST_CASE("h_star: gamma phase behaviour and conjugation symmetry") {
  QuenchConfig c0 = cfg_at(0.05, 0.0, 0.4);
  QuenchContext ctx(c0, shared_env());
  const HStar h = h_star(ctx);
  CHECK(h.norm > 0.0);
  // h_plus(xi) = conj(h_minus(-xi)) up to the out-of-band spillover of the
  // oscillatory part (the equation itself is exactly symmetric)
  const GridSpec& gs = ctx.slow_grid();
  double worst = 0.0;
  for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k)
    worst = std::max(worst,
                     std::abs(h.plus[gs.pos(k)] - std::conj(h.minus[gs.pos(-k)])));
  CHECK(worst < 0.05 * h.norm);

  // recomputation at gamma + pi flips the sign of the gamma1/gamma2 parts
  QuenchConfig c1 = c0;
  c1.gamma = c0.gamma + kPi;
  QuenchContext ctx1(c1, shared_env());
  const HStar h1 = h_star(ctx1);
  CHECK(h1.norm == doctest::Approx(h.norm).epsilon(0.2));
}

TEST_CASE("apply_R on zero is zero; constant-mode symbol check") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const GridSpec& gs = ctx.slow_grid();
  CoefficientPair g;
  g.minus.assign(gs.point_count, cplx(0.0, 0.0));
  g.plus.assign(gs.point_count, cplx(0.0, 0.0));
  const CoefficientPair z = apply_R(ctx, g);
  for (int p = 0; p < gs.point_count; ++p) {
    CHECK(std::abs(z.minus[p]) == 0.0);
    CHECK(std::abs(z.plus[p]) == 0.0);
  }
}

TEST_CASE("apply_R symbol on a one-sided envelope pair") {
  // g localized deep in the mu = +1 half: mu g = g up to exponential tails,
  // so inside the band R reduces to -4 xi^2 - (3 pi - 1) acting on g_pm minus
  // (3 pi / 2) g_mp, and R - R0 vanishes identically
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const GridSpec& gs = ctx.slow_grid();
  const int n = gs.point_count;
  const double X0 = -0.5 * gs.half_length;
  std::vector<cplx> bm(n), bp(n);
  for (int p = 0; p < n; ++p) {
    const double X = gs.x(p);
    bm[p] = cplx(std::exp(-2.0 * (X - X0) * (X - X0)), 0.0);
    bp[p] = cplx(0.7 * std::exp(-3.0 * (X - X0) * (X - X0)), 0.0);
  }
  CoefficientPair g;
  g.minus = forward_transform(gs, bm);
  g.plus = forward_transform(gs, bp);
  for (int p = 0; p < n; ++p)
    if (std::abs(gs.bin(p)) > ctx.band_bins()) {
      g.minus[p] = cplx(0, 0);
      g.plus[p] = cplx(0, 0);
    }
  const CoefficientPair a = apply_R(ctx, g);
  double worst = 0.0, scale = 0.0;
  for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
    const int p = gs.pos(k);
    const double xi = gs.xi(k);
    const cplx expect_m = (-4.0 * xi * xi - 3.0 * kPi + 1.0) * g.minus[p] -
                          1.5 * kPi * g.plus[p];
    const cplx expect_p = (-4.0 * xi * xi - 3.0 * kPi + 1.0) * g.plus[p] -
                          1.5 * kPi * g.minus[p];
    worst = std::max({worst, std::abs(a.minus[p] - expect_m),
                      std::abs(a.plus[p] - expect_p)});
    scale = std::max({scale, std::abs(expect_m), std::abs(expect_p)});
  }
  // band truncation of the Gaussian leaves small out-of-band mass that the
  // mu product spreads back; tolerance reflects that truncation tail
  CHECK(worst < 1e-4 * scale);

  // R and R0 agree identically inside the band; their difference lives
  // outside it and is tail-small when mu g stays band-supported
  const CoefficientPair b = apply_R0(ctx, g);
  double in_band = 0.0, out_band = 0.0;
  for (int p = 0; p < n; ++p) {
    const double d = std::max(std::abs(a.minus[p] - b.minus[p]),
                              std::abs(a.plus[p] - b.plus[p]));
    if (std::abs(gs.bin(p)) <= ctx.band_bins()) in_band = std::max(in_band, d);
    else out_band = std::max(out_band, d);
  }
  CHECK(in_band < 1e-12 * scale);
  CHECK(out_band < 1e-3 * scale);
}

TEST_CASE("solve_R0 round trip against the FD application") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const GridSpec& gs = ctx.slow_grid();
  const int n = gs.point_count;
  CoefficientPair pair;
  pair.minus.assign(n, cplx(0.0, 0.0));
  pair.plus.assign(n, cplx(0.0, 0.0));
  for (int p = 1; p + 1 < n; ++p) {
    const double X = gs.x(p);
    pair.minus[p] = cplx(std::exp(-0.3 * X * X), 0.2 * X * std::exp(-0.2 * X * X));
    pair.plus[p] = cplx(std::cos(0.5 * X) * std::exp(-0.25 * X * X), 0.0);
  }
  const double h2 = gs.dx * gs.dx;
  CoefficientPair rhs;
  rhs.minus.assign(n, cplx(0, 0));
  rhs.plus.assign(n, cplx(0, 0));
  for (int p = 1; p + 1 < n; ++p) {
    const cplx d2m = (pair.minus[p + 1] - 2.0 * pair.minus[p] + pair.minus[p - 1]) / h2;
    const cplx d2p = (pair.plus[p + 1] - 2.0 * pair.plus[p] + pair.plus[p - 1]) / h2;
    rhs.minus[p] = 4.0 * d2m + (-3.0 * kPi + ctx.slow_mu()[p]) * pair.minus[p] -
                   1.5 * kPi * pair.plus[p];
    rhs.plus[p] = 4.0 * d2p + (-3.0 * kPi + ctx.slow_mu()[p]) * pair.plus[p] -
                  1.5 * kPi * pair.minus[p];
  }
  const CoefficientPair sol = solve_R0(ctx, rhs);
  double worst = 0.0;
  for (int p = 0; p < n; ++p)
    worst = std::max({worst, std::abs(sol.minus[p] - pair.minus[p]),
                      std::abs(sol.plus[p] - pair.plus[p])});
  CHECK(worst < 1e-8);
}

TEST_CASE("solution of R0 with a jump source is C1 with a second-derivative kink") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const GridSpec& gs = ctx.slow_grid();
  const int n = gs.point_count;
  CoefficientPair rhs;
  rhs.minus.assign(n, cplx(0.0, 0.0));
  rhs.plus.assign(n, cplx(0.0, 0.0));
  for (int p = 0; p < n; ++p) {
    const double X = gs.x(p);
    const double win = std::exp(-0.05 * X * X);
    rhs.minus[p] = rhs.plus[p] = cplx((X > 0.0 ? 1.0 : -1.0) * win, 0.0);
  }
  const CoefficientPair sol = solve_R0(ctx, rhs);
  // first differences stay smooth, second differences jump at X = 0
  const int j0 = n / 2;  // x = 0 node
  auto d2at = [&](int p) {
    return (sol.minus[p + 1] - 2.0 * sol.minus[p] + sol.minus[p - 1]).real() /
           (gs.dx * gs.dx);
  };
  const double kink = std::fabs(d2at(j0 + 1) - d2at(j0 - 1));
  const double smooth = std::fabs(d2at(j0 + 10) - d2at(j0 + 8));
  CHECK(kink > 20.0 * smooth);
}

TEST_CASE("coercivity eigenvalue matches the corrected channel minimum") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  int channel = -1;
  const double lam = coercivity_min_eigenvalue(ctx, &channel);
  CHECK(lam > 0.0);
  CHECK(channel == 0);  // the weak channel is -4 d^2 + 3 pi / 2 - mu
  // discrete minimum approaches 3 pi / 2 - 1 from above
  CHECK(lam > 1.5 * kPi - 1.0);
  CHECK(lam < 1.2 * (1.5 * kPi - 1.0));
}

TEST_CASE("reduced fixed point at delta = 0.05: convergence and structure") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const CorrectorState st = reduced_fixed_point(ctx);
  CHECK(st.reduced_residual < 1e-6);
  CHECK(st.iterations < ctx.cfg().max_reduced_iter);
  REQUIRE(!st.contraction_estimates.empty());
  // Neumann-series condition
  CHECK(st.neumann_ratio < 1.0);
  // conjugation symmetry g_plus = conj(g_minus) pointwise
  const GridSpec& gs = ctx.slow_grid();
  double worst = 0.0;
  for (int p = 0; p < gs.point_count; ++p)
    worst = std::max(worst, std::abs(st.g_plus.samples()[p] -
                                     std::conj(st.g_minus.samples()[p])));
  CHECK(worst < 1e-10);
  // band-limit persistence: exact zeros outside the band
  for (int p = 0; p < gs.point_count; ++p)
    if (std::abs(gs.bin(p)) > ctx.band_bins()) {
      CHECK(std::abs(st.g_plus.coeffs()[p]) == 0.0);
      CHECK(std::abs(st.g_minus.coeffs()[p]) == 0.0);
    }
  // v_near real and dominated by the near band
  CHECK(st.v_near.max_imag() < 1e-10);
  CHECK(st.v_far.sobolev_norm(4.0) < st.v_near.sobolev_norm(4.0));
  // Q bookkeeping self-consistency: (R g - h) - Q = M g - T, small at the root
  CHECK(st.q_consistency < 2.0 * st.reduced_residual + 1e-9);
}

TEST_CASE("reduced solution norms vanish as delta -> 0") {
  double prev = 1e300;
  for (double d : {0.05, 0.03, 0.015}) {
    QuenchConfig cfg = cfg_at(d);
    cfg.grid_ell = 0;
    cfg.grid_N = 0;
    cfg.reduced_tol = 1e-7;
    QuenchContext ctx(cfg, shared_env());
    const CorrectorState st = reduced_fixed_point(ctx);
    const double nn = st.v_near.sobolev_norm(4.0);
    CHECK(nn < prev);
    prev = nn;
  }
}

TEST_CASE("h_star gamma structure: the envelope parts flip sign under gamma + pi") {
  // h(gamma) + h(gamma + pi) isolates the oscillatory quench part, since the
  // e^{i gamma} prefactors of the envelope terms cancel
  QuenchConfig c0 = cfg_at(0.05, 0.0, 0.3);
  QuenchConfig c1 = cfg_at(0.05, 0.0, 0.3 + kPi);
  QuenchContext x0(c0, shared_env());
  QuenchContext x1(c1, shared_env());
  const HStar h0 = h_star(x0);
  const HStar h1 = h_star(x1);
  const GammaTerms t0 = gamma_terms(x0);
  const GammaTerms t1 = gamma_terms(x1);
  const GridSpec& gs = x0.slow_grid();
  const double pref = 2.0 * std::pow(0.05 / x0.eps(), 2.0);
  double worst = 0.0, scale = 0.0;
  for (int k = -x0.band_bins(); k <= x0.band_bins(); ++k) {
    const int p = gs.pos(k);
    const cplx lhs = h0.plus[p] + h1.plus[p];
    const cplx rhs = -pref * (t0.gamma3_plus[p] + t1.gamma3_plus[p]);
    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(h0.plus[p]));
  }
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("converged far component stays below a fifth of the near component") {
  QuenchContext ctx(cfg_at(0.05), shared_env());
  const CorrectorState st = reduced_fixed_point(ctx);
  CHECK(st.v_far.sobolev_norm(4.0) < 0.2 * st.v_near.sobolev_norm(4.0));
}
