// Acceptance suite: one line per criterion, exit code = number of failures.
// Two checks assert literature constants that the measurements show to be
// mis-transcribed (the R0 coercivity constant and the selection-law
// coefficient); they are asserted as stated and annotated with the measured
// and corrected values.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "quenchroll/io.hpp"
#include "quenchroll/pipeline.hpp"

using namespace quenchroll;

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool pass, double secs, const std::string& detail) {
  std::printf("[%s] criterion %2d %-28s (%6.1fs) %s\n", pass ? "PASS" : "FAIL", id, name, secs,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::shared_ptr<const EnvelopeProfile> g_env;

SpectralField random_real_field(const GridSpec& g, std::mt19937_64& rng, double kmax) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> c(g.point_count, cplx(0.0, 0.0));
  for (int k = 1; k < g.point_count / 2; ++k) {
    const double xi = g.xi(k);
    if (std::fabs(xi) > kmax) continue;
    const cplx v = cplx(gauss(rng), gauss(rng)) * std::exp(-0.05 * xi * xi);
    c[g.pos(k)] = v;
    c[g.pos(-k)] = std::conj(v);
  }
  c[g.pos(0)] = cplx(gauss(rng), 0.0);
  return SpectralField::from_coeffs(g, std::move(c));
}

// ---------------------------------------------------------------- criterion 1
void criterion_roll_amplitude() {
  const auto t0 = clock_t_::now();
  bool pass = true;
  std::string detail;
  const double target = std::sqrt(4.0 / 3.0);
  for (double d : {0.01, 0.03, 0.05}) {
    const auto tp = clock_t_::now();
    const PeriodicProfile r = solve_rolls(d, 0.0, 0.0);
    const double point_secs = seconds_since(tp);
    const double ratio = r.eps / d;
    const bool ok = std::fabs(ratio - target) < 0.05 * target && point_secs < 1.0;
    pass = pass && ok;
    detail += fmt("d=%.2f eps/d=%.5f ", d, ratio);
  }
  detail += fmt("target=%.5f +-5%%", target);
  report(1, "roll amplitude law", pass, seconds_since(t0), detail);
}

// ---------------------------------------------------------------- criterion 2
void criterion_hamiltonian() {
  const auto t0 = clock_t_::now();
  const double d = 0.03;
  const PeriodicProfile r = solve_rolls(d, 0.0, 0.0);
  const HamiltonianValue H = hamiltonian_of_rolls(r);
  const double rel_dev = H.max_deviation / (1.0 + std::fabs(H.mean));
  const double diff = H.mean - hamiltonian_right_zero(d);
  const double rel = std::fabs(diff + d * d) / (d * d);
  const bool pass = rel_dev < 1e-8 && rel < 0.15;
  report(2, "hamiltonian conservation", pass, seconds_since(t0),
         fmt("pointwise dev=%.2e (<1e-8), Hl-Hr=%.6e vs -delta^2=%.6e rel=%.2e (<0.15)",
             rel_dev, diff, -d * d, rel));
}

// ---------------------------------------------------------------- criterion 3
void criterion_envelope_oracle() {
  const auto t0 = clock_t_::now();
  const double c = 11.542926227897089;  // 3 pi sqrt(3/2)
  const EnvelopeProfile env = solve_envelope(c, 40.0, 8192, 1e-11);
  double sup = 0.0;
  for (double x = -35.0; x <= 35.0; x += 0.11) {
    const double exact = 1.0 / (1.0 + std::exp(std::sqrt(6.0) / 8.0 * x));
    sup = std::max(sup, std::fabs(env.value(x) - exact));
  }
  const double energy = c * env.gradient_energy();
  const double erel = std::fabs(energy - 3.0 * kPi / 16.0) / (3.0 * kPi / 16.0);
  const bool pass = sup < 1e-6 && erel < 1e-4;
  report(3, "envelope oracle + energy", pass, seconds_since(t0),
         fmt("sup_err=%.2e (<1e-6), energy rel=%.2e (<1e-4)", sup, erel));
}

// ---------------------------------------------------------------- criterion 4
void criterion_projection_algebra() {
  const auto t0 = clock_t_::now();
  std::mt19937_64 rng(20260810);
  const GridSpec g = GridSpec::box(8, 2048);
  const FrequencyBand band{{-1.0, 1.0}, 0.45};
  double wp = 0.0, wi = 0.0, wc = 0.0, wr = 0.0;
  for (int t = 0; t < 100; ++t) {
    const SpectralField f = random_real_field(g, rng, 8.0);
    const SpectralField fn = project_near(f, band);
    const SpectralField ff = project_far(f, band);
    for (double s : {0.0, 2.0, 4.0}) {
      const double a2 = std::pow(f.sobolev_norm(s), 2);
      const double b2 = std::pow(fn.sobolev_norm(s), 2) + std::pow(ff.sobolev_norm(s), 2);
      wp = std::max(wp, std::fabs(a2 - b2) / a2);
    }
    const SpectralField fnn = project_near(fn, band);
    for (int p = 0; p < g.point_count; ++p)
      wi = std::max(wi, std::abs(fnn.coeffs()[p] - fn.coeffs()[p]));
    const SpectralField fp = project_near_pm(f, band, +1);
    const SpectralField fm = project_near_pm(f, band, -1);
    for (int p = 0; p < g.point_count; ++p) {
      const int k = g.bin(p);
      if (-k >= -g.point_count / 2 && -k < g.point_count / 2)
        wc = std::max(wc, std::abs(fp.coeffs()[p] - std::conj(fm.coeffs()[g.pos(-k)])));
      const cplx rec = std::exp(cplx(0.0, g.x(p))) * fp.samples()[p] +
                       std::exp(cplx(0.0, -g.x(p))) * fm.samples()[p];
      wr = std::max(wr, std::abs(rec - fn.samples()[p]));
    }
  }
  const bool pass = wp < 1e-10 && wi < 1e-10 && wc < 1e-10 && wr < 1e-10;
  report(4, "projection algebra", pass, seconds_since(t0),
         fmt("pythagoras=%.1e idem=%.1e conj=%.1e reconstr=%.1e (each <1e-10)", wp, wi, wc, wr));
}

// ---------------------------------------------------------------- criterion 5
void criterion_multiplier_floor() {
  const auto t0 = clock_t_::now();
  const double tau = 0.25;
  const GridSpec g = GridSpec::box(64, 8192);
  std::vector<double> le, lm;
  for (double eps : {1e-4, 3.16e-4, 1e-3, 3.16e-3}) {
    const FrequencyBand band{{-1.0, 1.0}, std::pow(eps, tau)};
    const MultiplierFloor fl = multiplier_floor(g, band, 1.0, tau, eps, 0.5);
    le.push_back(std::log(eps));
    lm.push_back(std::log(fl.measured_min));
  }
  const double slope = fit_slope(le, lm);
  const bool pass = std::fabs(slope - 2.0 * tau) < 0.2;
  report(5, "multiplier floor scaling", pass, seconds_since(t0),
         fmt("fitted exponent=%.3f vs 2 tau=%.2f (+-0.2)", slope, 2.0 * tau));
}

// ---------------------------------------------------------------- criterion 6
void criterion_far_contraction() {
  const auto t0 = clock_t_::now();
  bool pass = true;
  std::string detail;

  // contraction on the pinned grid
  for (double d : {0.03, 0.05}) {
    QuenchConfig cfg;
    cfg.delta = d;
    cfg.grid_ell = 32;
    cfg.grid_N = 8192;
    QuenchContext ctx(cfg, g_env);
    CorrectorState st = reduced_fixed_point(ctx);
    FarSolveResult cold = far_fixed_point(ctx, st.v_near.real_samples());
    double worst = 0.0;
    for (double r : cold.contraction_estimates) worst = std::max(worst, r);
    pass = pass && worst < 0.8 && cold.iterations < cfg.max_far_iter;
    detail += fmt("d=%.2f maxratio=%.3f ", d, worst);
  }

  // scaling exponents on eps-matched boxes
  std::vector<double> le, lf, ln;
  for (double d : {0.02, 0.03, 0.04, 0.05}) {
    QuenchConfig cfg;
    cfg.delta = d;
    QuenchContext ctx(cfg, g_env);
    CorrectorState st = reduced_fixed_point(ctx);
    le.push_back(std::log(ctx.eps()));
    lf.push_back(std::log(st.v_far.sobolev_norm(4.0)));
    ln.push_back(std::log(st.v_near.sobolev_norm(4.0)));
  }
  const double sf = fit_slope(le, lf);
  const double sn = fit_slope(le, ln);
  const double tf = 2.5 - 2.0 * 0.25, tn = 0.5;
  pass = pass && std::fabs(sf - tf) < 0.3 * tf && std::fabs(sn - tn) < 0.3 * tn;
  detail += fmt("vfar_exp=%.2f vs %.2f +-30%%, vnear_exp=%.2f vs %.2f +-30%%", sf, tf, sn, tn);
  report(6, "far-field contraction", pass, seconds_since(t0), detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_reduced_system() {
  const auto t0 = clock_t_::now();
  QuenchConfig cfg;
  cfg.delta = 0.05;
  cfg.grid_ell = 32;
  cfg.grid_N = 8192;
  QuenchContext ctx(cfg, g_env);
  CorrectorState st = reduced_fixed_point(ctx);

  // band-limit persistence: exact zeros after truncation
  const GridSpec& gs = ctx.slow_grid();
  double outside = 0.0;
  for (int p = 0; p < gs.point_count; ++p)
    if (std::abs(gs.bin(p)) > ctx.band_bins())
      outside = std::max(outside, std::max(std::abs(st.g_plus.coeffs()[p]),
                                           std::abs(st.g_minus.coeffs()[p])));
  // pre-truncation leakage: out-of-band mass of the next (untruncated) update
  double leakage = 0.0;
  {
    CoefficientPair resid;
    resid.minus.assign(gs.point_count, cplx(0, 0));
    resid.plus.assign(gs.point_count, cplx(0, 0));
    // residual of the projected equation at the converged state
    FarSolveResult far = far_fixed_point(ctx, st.v_near.real_samples());
    const double e2 = ctx.eps() * ctx.eps();
    for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
      resid.plus[gs.pos(k)] = far.nsum_hat[ctx.pos_plus() + k] / e2 -
                              ctx.M_plus()[gs.pos(k)] * st.g_plus.coeffs()[gs.pos(k)];
      resid.minus[gs.pos(k)] = far.nsum_hat[ctx.pos_minus() + k] / e2 -
                               ctx.M_minus()[gs.pos(k)] * st.g_minus.coeffs()[gs.pos(k)];
    }
    CoefficientPair phys;
    phys.minus = inverse_transform(gs, resid.minus);
    phys.plus = inverse_transform(gs, resid.plus);
    const CoefficientPair upd = solve_R0(ctx, phys);
    const std::vector<cplx> um = forward_transform(gs, upd.minus);
    const std::vector<cplx> up = forward_transform(gs, upd.plus);
    double acc = 0.0;
    for (int p = 0; p < gs.point_count; ++p)
      if (std::abs(gs.bin(p)) > ctx.band_bins())
        acc += std::norm(um[p]) + std::norm(up[p]);
    leakage = std::sqrt(acc * gs.dxi);
  }

  // coercivity: asserted against the stated constant; the operator's true
  // spectral floor is 3 pi / 2 - 1 (the stated 3 pi^2 - 3 pi / 2 - 1 traces
  // to a 3 pi -> 3 pi^2 transcription slip), so this sub-check fails by design
  int channel = -1;
  const double lam = coercivity_min_eigenvalue(ctx, &channel);
  const double stated = 24.2 * 0.8;
  const bool coercive_ok = lam >= stated;

  // conjugation symmetry
  double conj_err = 0.0;
  for (int p = 0; p < gs.point_count; ++p)
    conj_err = std::max(conj_err, std::abs(st.g_plus.samples()[p] -
                                           std::conj(st.g_minus.samples()[p])));

  const bool pass = outside == 0.0 && leakage < 10.0 * cfg.reduced_tol &&
                    coercive_ok && conj_err < 1e-10 &&
                    st.iterations < cfg.max_reduced_iter;
  report(7, "reduced system", pass, seconds_since(t0),
         fmt("band zeros=%.1e leak=%.1e (<%.0e), coercivity=%.3f vs stated>=%.2f "
             "[corrected floor 3pi/2-1=%.3f], conj=%.1e (<1e-10)",
             outside, leakage, 10.0 * cfg.reduced_tol, lam, stated, 1.5 * kPi - 1.0, conj_err));
}

// ---------------------------------------------------------------- criterion 8
void criterion_selection_law() {
  const auto t0 = clock_t_::now();
  const double d = 0.02;
  QuenchConfig cfg;
  bool pass = true;
  std::string detail;

  double om_gamma0 = 0.0;
  for (double gamma : {0.0, kPi / 8.0, kPi / 4.0, 3.0 * kPi / 8.0}) {
    const SelectionResult s = select_omega(d, gamma, cfg, g_env);
    const double c2 = std::cos(2.0 * gamma);
    if (gamma == 0.0) om_gamma0 = s.Omega_star;
    if (std::fabs(c2) > 1e-9) {
      const double stated = c2 / 16.0;
      const double rel = std::fabs(s.Omega_star / d - stated) / std::fabs(stated);
      const double rel8 = std::fabs(s.Omega_star / d - c2 / 8.0) / std::fabs(c2 / 8.0);
      pass = pass && rel < 0.3;
      detail += fmt("g=%.3f W*/d=%.5f vs c2g/16=%.5f rel=%.0f%% [vs c2g/8 rel=%.0f%%] ",
                    gamma, s.Omega_star / d, stated, 100 * rel, 100 * rel8);
    } else {
      pass = pass && std::fabs(s.Omega_star) < 0.005;
      detail += fmt("g=pi/4 |W*|=%.2e (<5e-3) ", std::fabs(s.Omega_star));
    }
  }

  // periodicity in gamma
  {
    const SelectionResult s = select_omega(d, kTwoPi, cfg, g_env);
    const double dOm = std::fabs(s.Omega_star - om_gamma0);
    pass = pass && dOm < 1e-4;
    detail += fmt("period dW=%.1e (<1e-4) ", dOm);
  }

  // Omega* -> 0 as delta -> 0 by 3-point extrapolation at gamma = 0
  {
    const double ds[3] = {0.01, 0.02, 0.04};
    double om[3];
    om[1] = om_gamma0;
    om[0] = select_omega(ds[0], 0.0, cfg, g_env).Omega_star;
    om[2] = select_omega(ds[2], 0.0, cfg, g_env).Omega_star;
    // quadratic Lagrange extrapolation to delta = 0
    double extrap = 0.0;
    for (int i = 0; i < 3; ++i) {
      double w = om[i];
      for (int j = 0; j < 3; ++j)
        if (j != i) w *= (0.0 - ds[j]) / (ds[i] - ds[j]);
      extrap += w;
    }
    const bool ok = std::fabs(extrap) < 0.3 * std::fabs(om[0]) + 1e-5;
    pass = pass && ok;
    detail += fmt("extrap(0)=%.1e from W*(0.01)=%.1e", extrap, om[0]);
  }
  report(8, "selection law", pass, seconds_since(t0), detail);
}

// ---------------------------------------------------------------- criterion 9
void criterion_stationarity() {
  const auto t0 = clock_t_::now();
  QuenchConfig cfg;
  const SolutionBundle b = build(0.05, 0.0, cfg, false, g_env);
  const double resid = b.diagnostics.at("bifurcation_residual");
  // the guarded drift is dominated by seam equilibration near the window
  // edge; the deep interior stays stationary at machine level
  SimState s = SimState::make(b.grid, 0.05, b.omega, 0.05, b.U.real_samples());
  while (s.t < 10.0 - 1e-9) step(s);
  double drift_inf = 0.0, drift_deep = 0.0;
  for (int p = 0; p < b.grid.point_count; ++p) {
    const double r = std::fabs(b.grid.x(p)) / b.grid.half_length;
    const double d = std::fabs(s.u[p] - b.U.samples()[p].real());
    if (r <= 0.95) drift_inf = std::max(drift_inf, d);
    if (r <= 0.7) drift_deep = std::max(drift_deep, d);
  }
  const bool pass = resid < 10.0 * cfg.fixed_point_tol && drift_inf < 0.1 * b.eps;
  report(9, "end-to-end stationarity", pass, seconds_since(t0),
         fmt("residual=%.2e (<%.0e), drift(T=10)=%.2e (<%.2e=0.1 eps; deep interior %.1e)",
             resid, 10.0 * cfg.fixed_point_tol, drift_inf, 0.1 * b.eps, drift_deep));
}

// --------------------------------------------------------------- criterion 10
void criterion_continuity() {
  const auto t0 = clock_t_::now();
  bool pass = true;
  std::string detail;

  // pinned Omega = 0: Lipschitz constant stable across delta
  QuenchConfig cfg;
  cfg.Omega = 0.0;
  cfg.grid_ell = 48;
  cfg.grid_N = 16384;
  double kmin = 1e300, kmax = 0.0;
  for (double d : {0.03, 0.04, 0.05}) {
    const SolutionBundle a = build(d, 0.0, cfg, true, g_env);
    const SolutionBundle b = build(d + 1e-3, 0.0, cfg, true, g_env);
    const ContinuityResult r = continuity_probe(a, b);
    const double K = r.box_distance / 1e-3;
    kmin = std::min(kmin, K);
    kmax = std::max(kmax, K);
    detail += fmt("K(%.2f)=%.2f ", d, K);
  }
  pass = pass && kmax / kmin < 2.0 && kmax < 10.0;

  // selected distinct omegas: far fields separate at the beat scale
  {
    const SelectionResult s1 = select_omega(0.03, 0.0, cfg, g_env);
    const SelectionResult s2 = select_omega(0.05, 0.0, cfg, g_env);
    const PeriodicProfile r1 = solve_rolls(0.03, s1.Omega_star, 0.0);
    const PeriodicProfile r2 = solve_rolls(0.05, s2.Omega_star, 0.0);
    const double dist = farfield_beat_distance(r1, r2);
    const double bound = 0.5 * (r1.eps + r2.eps);
    pass = pass && s1.omega_star != s2.omega_star && dist >= bound;
    detail += fmt("beat dist=%.4f >= 0.5(e1+e2)=%.4f", dist, bound);
  }
  report(10, "continuity dichotomy", pass, seconds_since(t0), detail);
}

} // namespace

int main() {
  const auto t0 = clock_t_::now();
  g_env = make_envelope(QuenchConfig{});
  criterion_roll_amplitude();
  criterion_hamiltonian();
  criterion_envelope_oracle();
  criterion_projection_algebra();
  criterion_multiplier_floor();
  criterion_far_contraction();
  criterion_reduced_system();
  criterion_selection_law();
  criterion_stationarity();
  criterion_continuity();
  std::printf("%d of 10 criteria failed (total %.1fs)\n", failures, seconds_since(t0));
  return failures;
}
