#include "quenchroll/pipeline.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace quenchroll {

std::shared_ptr<const EnvelopeProfile> make_envelope(const QuenchConfig& cfg) {
  EnvelopeProfile env = solve_envelope(cfg.env_c, cfg.env_S, cfg.env_n, cfg.env_tol);
  if (cfg.env_shift != 0.0) env = shift_envelope(env, cfg.env_shift);
  return std::make_shared<const EnvelopeProfile>(std::move(env));
}

SolutionBundle build(double delta, double gamma, const QuenchConfig& cfg_in, bool pin_omega,
                     std::shared_ptr<const EnvelopeProfile> env) {
  QuenchConfig cfg = cfg_in;
  cfg.delta = delta;
  cfg.gamma = gamma;
  cfg.validate();
  if (!env) env = make_envelope(cfg);

  SolutionBundle b;
  b.cfg = cfg;
  b.envelope = env;

  if (delta == 0.0) {
    // trivial branch: U == 0 on a fixed small box
    const int ell = cfg.grid_ell > 0 ? cfg.grid_ell : 32;
    const int N = cfg.grid_N > 0 ? cfg.grid_N : cfg.auto_N(ell);
    b.grid = GridSpec::box(ell, N);
    b.U = SpectralField::zero(b.grid);
    b.omega = 1.0;
    b.eps = 0.0;
    b.rolls = solve_rolls(0.0, 0.0, gamma);
    b.selection.delta = 0.0;
    b.selection.gamma = gamma;
    b.diagnostics["assembly_identity"] = 0.0;
    return b;
  }

  std::unique_ptr<AssembledProfile> prof;
  if (pin_omega) {
    b.selection.delta = delta;
    b.selection.gamma = gamma;
    b.selection.Omega_star = cfg.Omega;
    b.selection.omega_star = std::sqrt(1.0 + delta * cfg.Omega);
    prof = std::make_unique<AssembledProfile>(assemble_profile(cfg, env));
    b.selection.U_at_0 = prof->U0;
    b.selection.eps = prof->ctx.eps();
    b.selection.constraint_residual = scaled_constraint(delta, prof->U0, prof->ctx.rolls());
    b.selection.H_left = hamiltonian_of_rolls(prof->ctx.rolls(), delta * delta).mean;
    b.selection.H_right = hamiltonian_right_zero(delta);
  } else {
    b.selection = select_omega(delta, gamma, cfg, env, &prof);
  }

  const QuenchContext& ctx = prof->ctx;
  b.rolls = ctx.rolls();
  b.grid = ctx.grid();
  b.omega = ctx.omega();
  b.eps = ctx.eps();
  b.corrector = std::move(prof->state);
  b.U = SpectralField::from_real_samples(ctx.grid(), prof->U);

  // diagnostics
  double ident = 0.0;
  {
    const auto& vn = b.corrector.v_near.samples();
    const auto& vf = b.corrector.v_far.samples();
    for (int p = 0; p < ctx.grid().point_count; ++p) {
      const double s = vn[p].real() + vf[p].real() + ctx.chi()[p] * ctx.roll_samples()[p];
      ident = std::max(ident, std::fabs(s - prof->U[p]));
    }
  }
  b.diagnostics["assembly_identity"] = ident;
  {
    std::vector<double> v(ctx.grid().point_count);
    const auto& vn = b.corrector.v_near.samples();
    const auto& vf = b.corrector.v_far.samples();
    for (int p = 0; p < ctx.grid().point_count; ++p) v[p] = vn[p].real() + vf[p].real();
    b.diagnostics["bifurcation_residual"] = bifurcation_residual(ctx, v);
  }
  b.diagnostics["v_near_H4"] = b.corrector.v_near.sobolev_norm(4.0);
  b.diagnostics["v_far_H4"] = b.corrector.v_far.sobolev_norm(4.0);
  b.diagnostics["h_star_norm"] = b.corrector.h_star_norm;
  b.diagnostics["reduced_residual"] = b.corrector.reduced_residual;
  b.diagnostics["neumann_ratio"] = b.corrector.neumann_ratio;
  b.diagnostics["U_at_0"] = prof->U0;
  b.diagnostics["eps"] = ctx.eps();
  b.diagnostics["Omega_star"] = b.selection.Omega_star;
  const DecayTails tails = decay_check(b.corrector.v_far);
  b.diagnostics["v_far_tail_left"] = tails.left;
  b.diagnostics["v_far_tail_right"] = tails.right;
  return b;
}

ContinuityResult continuity_probe(const SolutionBundle& a, const SolutionBundle& b) {
  ContinuityResult r;
  if (!(a.grid == b.grid))
    throw std::invalid_argument("continuity_probe: bundles must share a grid");
  const GridSpec& g = a.grid;
  const double guard = 0.9 * g.half_length;
  for (int p = 0; p < g.point_count; ++p) {
    if (std::fabs(g.x(p)) > guard) continue;
    r.box_distance = std::max(
        r.box_distance, std::fabs(a.U.samples()[p].real() - b.U.samples()[p].real()));
  }

  // far-field distance: rolls are periodic, so the sup over the real line of
  // |r_a(omega_a z) - r_b(omega_b z)| is the max over the relative beat phase
  const double w1 = a.omega, w2 = b.omega;
  if (std::fabs(w1 - w2) < 1e-14) {
    r.beat_window = std::numeric_limits<double>::infinity();
    double best = 0.0;
    for (int i = 0; i < 2048; ++i) {
      const double th = kTwoPi * i / 2048;
      best = std::max(best, std::fabs(a.rolls.eval(th) - b.rolls.eval(th)));
    }
    r.farfield_distance = best;
  } else {
    r.beat_window = kTwoPi / std::fabs(w1 - w2);
    r.farfield_distance = farfield_beat_distance(a.rolls, b.rolls);
  }
  return r;
}

double farfield_beat_distance(const PeriodicProfile& a, const PeriodicProfile& b) {
  // distinct incommensurate wavenumbers: the relative phase equidistributes,
  // so the sup over z is the max over independent phases of the two profiles
  const int nth = 1024;
  double amax = -1e300, amin = 1e300, bmax = -1e300, bmin = 1e300;
  for (int i = 0; i < nth; ++i) {
    const double th = kTwoPi * i / nth;
    const double ua = a.eval(th), ub = b.eval(th);
    amax = std::max(amax, ua); amin = std::min(amin, ua);
    bmax = std::max(bmax, ub); bmin = std::min(bmin, ub);
  }
  return std::max(amax - bmin, bmax - amin);
}

namespace {

SpectralField random_band_limited(const GridSpec& g, std::mt19937_64& rng, double kmax) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> c(g.point_count, cplx(0.0, 0.0));
  for (int p = 0; p < g.point_count; ++p) {
    const double xi = g.xi(g.bin(p));
    if (std::fabs(xi) > kmax) continue;
    c[p] = cplx(gauss(rng), gauss(rng)) * std::exp(-0.1 * xi * xi);
  }
  // hermitian symmetrization for a real field
  std::vector<cplx> cs(g.point_count, cplx(0.0, 0.0));
  for (int k = -g.point_count / 2 + 1; k < g.point_count / 2; ++k)
    cs[g.pos(k)] = 0.5 * (c[g.pos(k)] + std::conj(c[g.pos(-k)]));
  return SpectralField::from_coeffs(g, std::move(cs));
}

void push(std::vector<VerifyEntry>& out, const std::string& name, double measured,
          double threshold, bool pass, const std::string& note = "") {
  out.push_back({name, pass, measured, threshold, note});
}

} // namespace

std::vector<VerifyEntry> verify(const QuenchConfig& cfg) {
  std::vector<VerifyEntry> out;
  std::mt19937_64 rng(cfg.seed);
  const GridSpec g = GridSpec::box(8, 2048);

  // transform round trip on random band-limited fields
  {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      SpectralField f = random_band_limited(g, rng, 6.0);
      SpectralField f2 = SpectralField::from_coeffs(g, f.coeffs());
      double d = 0.0, scale = f.sup_norm();
      for (int p = 0; p < g.point_count; ++p)
        d = std::max(d, std::abs(f.samples()[p] - f2.samples()[p]));
      worst = std::max(worst, d / std::max(scale, 1e-300));
    }
    push(out, "transform_round_trip", worst, 1e-12, worst < 1e-12);
  }
  // Plancherel: H0 norm vs sqrt(2 pi) L2
  {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      SpectralField f = random_band_limited(g, rng, 10.0);
      const double h0 = f.sobolev_norm(0.0);
      const double l2 = f.l2_norm() * std::sqrt(kTwoPi);
      worst = std::max(worst, std::fabs(h0 - l2) / l2);
    }
    push(out, "plancherel", worst, 1e-10, worst < 1e-10);
  }
  // splitting: Pythagoras, orthogonality, idempotence, reconstruction
  {
    const FrequencyBand band{{-1.0, 1.0}, 0.4};
    double worst_pyth = 0.0, worst_orth = 0.0, worst_idem = 0.0, worst_rec = 0.0,
           worst_conj = 0.0;
    for (int t = 0; t < 100; ++t) {
      SpectralField f = random_band_limited(g, rng, 8.0);
      SpectralField fn = project_near(f, band);
      SpectralField ff = project_far(f, band);
      for (double s : {0.0, 1.0, 2.0, 4.0}) {
        const double a2 = std::pow(f.sobolev_norm(s), 2);
        const double b2 = std::pow(fn.sobolev_norm(s), 2) + std::pow(ff.sobolev_norm(s), 2);
        worst_pyth = std::max(worst_pyth, std::fabs(a2 - b2) / a2);
        cplx ip(0.0, 0.0);
        for (int p = 0; p < g.point_count; ++p) {
          const double xi = g.xi(g.bin(p));
          ip += std::pow(1.0 + xi * xi, s) * fn.coeffs()[p] * std::conj(ff.coeffs()[p]);
        }
        worst_orth = std::max(worst_orth, std::abs(ip) * g.dxi / a2);
      }
      SpectralField fnn = project_near(fn, band);
      for (int p = 0; p < g.point_count; ++p)
        worst_idem = std::max(worst_idem, std::abs(fnn.coeffs()[p] - fn.coeffs()[p]));
      SpectralField fp = project_near_pm(f, band, +1);
      SpectralField fm = project_near_pm(f, band, -1);
      for (int p = 0; p < g.point_count; ++p) {
        const int k = g.bin(p);
        if (-k >= -g.point_count / 2 && -k < g.point_count / 2)
          worst_conj = std::max(worst_conj,
                                std::abs(fp.coeffs()[p] - std::conj(fm.coeffs()[g.pos(-k)])));
        const double x = g.x(p);
        const cplx rec = std::exp(cplx(0.0, x)) * fp.samples()[p] +
                         std::exp(cplx(0.0, -x)) * fm.samples()[p];
        worst_rec = std::max(worst_rec, std::abs(rec - fn.samples()[p]));
      }
    }
    push(out, "splitting_pythagoras", worst_pyth, 1e-10, worst_pyth < 1e-10);
    push(out, "splitting_orthogonality", worst_orth, 1e-10, worst_orth < 1e-10);
    push(out, "projection_idempotent", worst_idem, 1e-14, worst_idem < 1e-14);
    push(out, "recentered_conjugation", worst_conj, 1e-12, worst_conj < 1e-12);
    push(out, "recentered_reconstruction", worst_rec, 1e-10, worst_rec < 1e-10);
  }
  // multiplier action vs spectral derivative action
  {
    SpectralField f = random_band_limited(g, rng, 6.0);
    const double om = 1.01;
    std::vector<cplx> a(f.coeffs()), b(f.coeffs());
    for (int p = 0; p < g.point_count; ++p) {
      const double xi = g.xi(g.bin(p));
      a[p] *= she_multiplier(xi, om);
      const cplx d2 = -xi * xi * b[p];
      b[p] = -(b[p] + 2.0 * om * om * d2 + om * om * om * om * xi * xi * xi * xi * b[p]);
    }
    double worst = 0.0;
    for (int p = 0; p < g.point_count; ++p) worst = std::max(worst, std::abs(a[p] - b[p]));
    const double rel = worst / std::max(1e-300, sobolev_norm(g, f.coeffs(), 0.0));
    push(out, "multiplier_vs_derivative", rel, 1e-9, rel < 1e-9);
  }
  // multiplier floor at the configured tau and a small-eps exponent fit
  {
    const GridSpec gf = GridSpec::box(64, 8192);
    std::vector<double> le, lm;
    for (double eps : {1e-4, 3e-4, 1e-3, 3e-3}) {
      const FrequencyBand band{{-1.0, 1.0}, std::pow(eps, cfg.tau)};
      const MultiplierFloor fl = multiplier_floor(gf, band, 1.0, cfg.tau, eps, cfg.C_multiplier);
      le.push_back(std::log(eps));
      lm.push_back(std::log(fl.measured_min));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < le.size(); ++i) {
      sx += le[i]; sy += lm[i]; sxx += le[i] * le[i]; sxy += le[i] * lm[i];
    }
    const double nn = le.size();
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double err = std::fabs(slope - 2.0 * cfg.tau);
    push(out, "multiplier_floor_exponent", slope, 2.0 * cfg.tau, err < 0.2,
         "fitted vs 2 tau +- 0.2");
  }
  // roll amplitude law and Hamiltonian conservation
  {
    const PeriodicProfile r = solve_rolls(0.03, 0.0, 0.0);
    const double ratio = r.eps / 0.03;
    push(out, "roll_amplitude_law", ratio, std::sqrt(4.0 / 3.0),
         std::fabs(ratio - std::sqrt(4.0 / 3.0)) < 0.05 * std::sqrt(4.0 / 3.0));
    const HamiltonianValue H = hamiltonian_of_rolls(r);
    const double rel = H.max_deviation / (1.0 + std::fabs(H.mean));
    push(out, "hamiltonian_conservation", rel, 1e-8, rel < 1e-8);
  }
  // quadrature identities used throughout
  {
    const int Q = 512;
    double c4 = 0.0, c2 = 0.0, c22 = 0.0;
    for (int q = 0; q < Q; ++q) {
      const double z = static_cast<double>(q) / Q;
      c4 += std::pow(std::cos(kTwoPi * z), 4);
      c2 += std::pow(std::cos(kTwoPi * z), 2);
      c22 += std::pow(std::cos(kTwoPi * z), 2) * std::cos(2.0 * kTwoPi * z);
    }
    c4 /= Q; c2 /= Q; c22 /= Q;
    const double worst = std::max({std::fabs(c4 - 3.0 / 8.0), std::fabs(c2 - 0.5),
                                   std::fabs(c22 - 0.25)});
    push(out, "cosine_quadrature", worst, 1e-12, worst < 1e-12);
  }
  // envelope oracle and energy identity
  {
    const EnvelopeProfile env = solve_envelope(11.542926227897089, 40.0, 4096, 1e-10);
    double worst = 0.0;
    for (double x = -30.0; x <= 30.0; x += 0.37) {
      const double exact = 1.0 / (1.0 + std::exp(std::sqrt(6.0) / 8.0 * x));
      worst = std::max(worst, std::fabs(env.value(x) - exact));
    }
    push(out, "envelope_oracle", worst, 1e-6, worst < 1e-6);
    const double lhs = env.speed() * env.gradient_energy();
    const double rel = std::fabs(lhs - 3.0 * kPi / 16.0) / (3.0 * kPi / 16.0);
    push(out, "envelope_energy_identity", rel, 1e-4, rel < 1e-4);
  }
  // windowed recentered transform bound (stability of the constant across eps)
  {
    double kmin = 1e300, kmax = 0.0;
    for (double eps : {0.02, 0.04, 0.08}) {
      SpectralField f = random_band_limited(g, rng, 12.0);
      const double n2 = f.l2_norm();
      double acc = 0.0;
      const double lim = std::pow(eps, cfg.tau - 1.0);
      const double dxi_s = g.dxi / eps;
      for (int p = 0; p < g.point_count; ++p) {
        const double xi_s = (g.xi(g.bin(p)) - 1.0) / eps;
        if (std::fabs(xi_s) <= lim) acc += std::norm(f.coeffs()[p]) * dxi_s;
      }
      const double K = std::sqrt(acc) * std::sqrt(eps) / n2;
      kmin = std::min(kmin, K);
      kmax = std::max(kmax, K);
    }
    push(out, "windowed_transform_constant", kmax / kmin, 2.0, kmax / kmin < 2.0,
         "spread across eps");
  }
  // reduced operator: R0 round trip and coercivity positivity
  {
    QuenchConfig c2 = cfg;
    c2.delta = 0.05;
    c2.Omega = 0.0;
    c2.grid_ell = 32;
    c2.grid_N = 8192;
    QuenchContext ctx(c2, make_envelope(c2));
    std::mt19937_64 r2(cfg.seed + 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const GridSpec& gs = ctx.slow_grid();
    CoefficientPair pair;
    pair.minus.resize(gs.point_count);
    pair.plus.resize(gs.point_count);
    for (int p = 0; p < gs.point_count; ++p) {
      const double X = gs.x(p);
      const double bump = std::exp(-0.2 * X * X);
      pair.minus[p] = cplx(gauss(r2), gauss(r2)) * bump;
      pair.plus[p] = cplx(gauss(r2), gauss(r2)) * bump;
    }
    // physical-space FD application of R0, then solve
    const int n = gs.point_count;
    const double h2 = gs.dx * gs.dx;
    CoefficientPair rhs;
    rhs.minus.assign(n, cplx(0, 0));
    rhs.plus.assign(n, cplx(0, 0));
    pair.minus[0] = pair.minus[n - 1] = cplx(0, 0);
    pair.plus[0] = pair.plus[n - 1] = cplx(0, 0);
    for (int p = 1; p + 1 < n; ++p) {
      const cplx d2m = (pair.minus[p + 1] - 2.0 * pair.minus[p] + pair.minus[p - 1]) / h2;
      const cplx d2p = (pair.plus[p + 1] - 2.0 * pair.plus[p] + pair.plus[p - 1]) / h2;
      rhs.minus[p] = 4.0 * d2m + (-3.0 * kPi + ctx.slow_mu()[p]) * pair.minus[p] -
                     1.5 * kPi * pair.plus[p];
      rhs.plus[p] = 4.0 * d2p + (-3.0 * kPi + ctx.slow_mu()[p]) * pair.plus[p] -
                    1.5 * kPi * pair.minus[p];
    }
    CoefficientPair sol = solve_R0(ctx, rhs);
    double worst = 0.0, scale = 0.0;
    for (int p = 0; p < n; ++p) {
      worst = std::max({worst, std::abs(sol.minus[p] - pair.minus[p]),
                        std::abs(sol.plus[p] - pair.plus[p])});
      scale = std::max({scale, std::abs(pair.minus[p]), std::abs(pair.plus[p])});
    }
    push(out, "R0_round_trip", worst / scale, 1e-8, worst / scale < 1e-8);
    const double lam = coercivity_min_eigenvalue(ctx);
    push(out, "R0_coercivity_positive", lam, 0.0, lam > 0.0,
         "theory floor 3 pi/2 - 1 = " + std::to_string(1.5 * kPi - 1.0));
  }
  return out;
}

} // namespace quenchroll
