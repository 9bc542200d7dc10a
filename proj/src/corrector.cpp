#include "quenchroll/corrector.hpp"

#include <cmath>

#include "quenchroll/fft.hpp"
#include "quenchroll/kernels.hpp"

namespace quenchroll {

void QuenchConfig::validate() const {
  if (delta < 0.0 || delta > 0.2)
    throw std::invalid_argument("config: delta must lie in [0, 0.2]");
  if (std::fabs(Omega) >= 1.0 / 3.0)
    throw std::invalid_argument("config: |Omega| must be < 1/3");
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("config: tau must lie in (0, 1)");
  if (beta != 1.0)
    throw std::invalid_argument("config: beta is fixed to 1 by the construction");
  if (slow_N < 8 || !fft::is_pow2(static_cast<std::size_t>(slow_N)))
    throw std::invalid_argument("config: slow_N must be a power of two");
  if (ball_R <= 0.0 || C_multiplier <= 0.0)
    throw std::invalid_argument("config: ball_R and C_multiplier must be positive");
  if (fixed_point_tol <= 0.0 || reduced_tol <= 0.0 || newton_tol <= 0.0)
    throw std::invalid_argument("config: tolerances must be positive");
  if (env_c <= 0.0) throw std::invalid_argument("config: env_c must be positive");
  if (sim_dt <= 0.0 || sim_dt > 0.5)
    throw std::invalid_argument("config: sim_dt must lie in (0, 0.5]");
}

std::vector<std::string> QuenchConfig::warnings() const {
  std::vector<std::string> w;
  if (tau >= 1.0 / 16.0)
    w.push_back("tau >= 1/16: outside the asymptotic range; desk-scale mode");
  if (env_c < kMonotoneSpeed)
    w.push_back("env_c below the monotone-front threshold: envelope will ring");
  return w;
}

int QuenchConfig::auto_ell(double eps) const {
  const double L_needed = std::max(64.0 * kPi, slow_halfwidth_target / std::max(eps, 1e-6));
  return static_cast<int>(std::ceil(L_needed / kTwoPi));
}

int QuenchConfig::auto_N(int ell) const {
  const double L = kTwoPi * ell;
  int n = 1;
  while (n < 2.0 * L / 0.06) n *= 2;
  return n;
}

QuenchContext::QuenchContext(const QuenchConfig& cfg, std::shared_ptr<const EnvelopeProfile> env)
    : cfg_(cfg), env_(std::move(env)) {
  cfg_.validate();
  rolls_ = solve_rolls(cfg_.delta, cfg_.Omega, cfg_.gamma, cfg_.rolls_modes, cfg_.newton_tol);
  omega_ = rolls_.omega;
  eps_ = rolls_.eps;
  if (cfg_.delta == 0.0) eps_ = 1e-6;  // degenerate grids still need a scale

  const int ell = cfg_.grid_ell > 0 ? cfg_.grid_ell : cfg_.auto_ell(eps_);
  const int N = cfg_.grid_N > 0 ? cfg_.grid_N : cfg_.auto_N(ell);
  grid_ = GridSpec::box(ell, N);
  slow_ = GridSpec::slow_of(grid_, eps_, cfg_.slow_N);

  band_.centers = {-1.0, +1.0};
  band_.radius = std::pow(eps_, cfg_.tau);
  band_.validate();
  band_bins_ = static_cast<int>(std::floor((band_.radius + 1e-12) / grid_.dxi));
  if (band_bins_ < 2)
    throw std::invalid_argument("context: near band unresolved; enlarge the grid");
  if (band_bins_ >= cfg_.slow_N / 2)
    throw std::invalid_argument("context: slow_N too small for the near band");
  pos_plus_ = grid_.pos_of_freq(+1.0);
  pos_minus_ = grid_.pos_of_freq(-1.0);

  const int n = grid_.point_count;
  mu_.resize(n);
  m_.resize(n);
  far_mask_.resize(n);
  for (int p = 0; p < n; ++p) {
    const double x = grid_.x(p);
    mu_[p] = (x <= 0.0) ? 1.0 : -1.0;
    const double xi = grid_.xi(grid_.bin(p));
    m_[p] = she_multiplier(xi, omega_);
    far_mask_[p] = band_.contains(xi) ? 0 : 1;
  }
  slow_mu_.resize(slow_.point_count);
  for (int p = 0; p < slow_.point_count; ++p) slow_mu_[p] = (slow_.x(p) <= 0.0) ? 1.0 : -1.0;

  // roll samples and derivatives on the fast grid
  std::vector<double> xs(n);
  for (int p = 0; p < n; ++p) xs[p] = grid_.x(p);
  rolls_.eval_derivs(xs, u_r_, u_r1_, u_r2_, u_r3_);

  // eps-scaled envelope derivatives at X = eps x
  chi_.resize(n);
  chi1_.resize(n);
  chi2_.resize(n);
  chi3_.resize(n);
  chi4_.resize(n);
  const double e1 = eps_, e2 = e1 * e1, e3 = e2 * e1, e4 = e2 * e2;
  for (int p = 0; p < n; ++p) {
    const double X = eps_ * xs[p];
    chi_[p] = env_->value(X);
    chi1_[p] = e1 * env_->d1(X);
    chi2_[p] = e2 * env_->d2(X);
    chi3_[p] = e3 * env_->d3(X);
    chi4_[p] = e4 * env_->d4(X);
  }

  // recentered multiplier / eps^2 over the slow bins
  M_plus_.assign(slow_.point_count, 0.0);
  M_minus_.assign(slow_.point_count, 0.0);
  for (int k = -band_bins_; k <= band_bins_; ++k) {
    const double kp = +1.0 + grid_.dxi * k;
    const double km = -1.0 + grid_.dxi * k;
    M_plus_[slow_.pos(k)] = she_multiplier(kp, omega_) / (eps_ * eps_);
    M_minus_[slow_.pos(k)] = she_multiplier(km, omega_) / (eps_ * eps_);
  }

  // v-independent forcing N^(4): cubic envelope term, operator-envelope
  // commutator in Leibniz form, and the quench mismatch term
  n4_.resize(n);
  const double om2 = omega_ * omega_;
  const double om4 = om2 * om2;
  for (int p = 0; p < n; ++p) {
    const double t1 = chi_[p] * (chi_[p] * chi_[p] - 1.0) * u_r_[p] * u_r_[p] * u_r_[p];
    const double comm =
        2.0 * om2 * (chi2_[p] * u_r_[p] + 2.0 * chi1_[p] * u_r1_[p]) +
        om4 * (chi4_[p] * u_r_[p] + 4.0 * chi3_[p] * u_r1_[p] + 6.0 * chi2_[p] * u_r2_[p] +
               4.0 * chi1_[p] * u_r3_[p]);
    const double t3 = -cfg_.delta * cfg_.delta * chi_[p] * (mu_[p] - 1.0) * u_r_[p];
    n4_[p] = t1 + comm + t3;
  }
}

MultiplierFloor QuenchContext::multiplier_floor_check() const {
  return multiplier_floor(grid_, band_, omega_, cfg_.tau, eps_, cfg_.C_multiplier);
}

std::vector<double> QuenchContext::nonlinearity(int j, const std::vector<double>& v) const {
  const int n = grid_.point_count;
  std::vector<double> out(n);
  const double d2 = cfg_.delta * cfg_.delta;
  switch (j) {
    case 1:
      for (int p = 0; p < n; ++p) {
        const double cu = chi_[p] * u_r_[p];
        out[p] = -(d2 * mu_[p] - 3.0 * cu * cu) * v[p];
      }
      break;
    case 2:
      for (int p = 0; p < n; ++p) out[p] = 3.0 * chi_[p] * u_r_[p] * v[p] * v[p];
      break;
    case 3:
      kernels::vcube(v.data(), out.data(), n);
      break;
    case 4:
      out = n4_;
      break;
    default:
      throw std::invalid_argument("nonlinearity: j must be 1..4");
  }
  return out;
}

std::vector<double> QuenchContext::nonlinearity_sum(const std::vector<double>& v) const {
  const int n = grid_.point_count;
  std::vector<double> out(n);
  const double d2 = cfg_.delta * cfg_.delta;
  for (int p = 0; p < n; ++p) {
    const double cu = chi_[p] * u_r_[p];
    const double w = v[p];
    out[p] = -(d2 * mu_[p] - 3.0 * cu * cu) * w + 3.0 * cu * w * w + w * w * w + n4_[p];
  }
  return out;
}

FarSolveResult far_fixed_point(const QuenchContext& ctx, const std::vector<double>& v_near,
                               const std::vector<double>* warm_start, double tol_override) {
  const GridSpec& g = ctx.grid();
  const int n = g.point_count;
  const double tol = tol_override > 0.0 ? tol_override : ctx.cfg().fixed_point_tol;

  // precondition: the near field stays inside the configured ball
  {
    std::vector<cplx> cs(n);
    for (int p = 0; p < n; ++p) cs[p] = cplx(v_near[p], 0.0);
    const double h4 = sobolev_norm(g, forward_transform(g, cs), 4.0);
    const double ball = ctx.cfg().ball_R * std::sqrt(ctx.eps());
    if (h4 > ball)
      throw std::invalid_argument("far_fixed_point: ||v_near||_H4 = " + std::to_string(h4) +
                                  " exceeds the ball R eps^{1/2} = " + std::to_string(ball));
  }
  if (!ctx.multiplier_floor_check().bound_ok)
    throw std::invalid_argument("far_fixed_point: multiplier floor below C eps^{2 tau}");

  FarSolveResult r;
  r.v_far.assign(n, 0.0);
  if (warm_start && static_cast<int>(warm_start->size()) == n) r.v_far = *warm_start;
  r.v_far_hat.assign(n, cplx(0.0, 0.0));

  std::vector<double> w(n);
  std::vector<cplx> hat(n), prev_hat(n, cplx(0.0, 0.0));
  std::vector<double> h4w(n);
  for (int p = 0; p < n; ++p) {
    const double xi = g.xi(g.bin(p));
    h4w[p] = std::pow(1.0 + xi * xi, 4.0);
  }
  bool have_prev = warm_start != nullptr;
  if (have_prev) {
    std::vector<cplx> cs(n);
    for (int p = 0; p < n; ++p) cs[p] = cplx(r.v_far[p], 0.0);
    prev_hat = forward_transform(g, cs);
  }

  double prev_dn = -1.0;
  int bad_streak = 0;
  const int max_iter = ctx.cfg().max_far_iter;
  for (int it = 0; it < max_iter; ++it) {
    for (int p = 0; p < n; ++p) w[p] = v_near[p] + r.v_far[p];
    std::vector<double> ns = ctx.nonlinearity_sum(w);
    std::vector<cplx> cs(n);
    for (int p = 0; p < n; ++p) cs[p] = cplx(ns[p], 0.0);
    r.nsum_hat = forward_transform(g, cs);
    for (int p = 0; p < n; ++p)
      hat[p] = ctx.far_mask()[p] ? r.nsum_hat[p] / ctx.multiplier()[p] : cplx(0.0, 0.0);

    double dn2 = 0.0;
    for (int p = 0; p < n; ++p) dn2 += h4w[p] * std::norm(hat[p] - prev_hat[p]);
    const double dn = std::sqrt(dn2 * g.dxi);

    if (prev_dn > 0.0) {
      const double ratio = dn / prev_dn;
      r.contraction_estimates.push_back(ratio);
      bad_streak = (ratio >= 1.0) ? bad_streak + 1 : 0;
      if (bad_streak >= 3 && dn > 10.0 * tol)
        throw NonContractionError("far_fixed_point: no contraction (delta too large for grid/tau)",
                                  r.contraction_estimates);
    }
    prev_dn = dn;
    prev_hat = hat;
    std::vector<cplx> vf = inverse_transform(g, hat);
    for (int p = 0; p < n; ++p) r.v_far[p] = vf[p].real();
    r.iterations = it + 1;
    if (dn < tol) {
      prev_dn = -2.0;  // converged marker
      break;
    }
  }
  if (prev_dn > -2.0 && prev_dn > tol)
    throw NonContractionError("far_fixed_point: iteration cap reached before tolerance",
                              r.contraction_estimates);
  r.v_far_hat = prev_hat;
  return r;
}

SpectralField corrector_v_near_field(const QuenchContext& ctx, const EnvelopePair& pair) {
  return assemble_vnear(ctx.grid(), pair, ctx.eps());
}

double bifurcation_residual(const QuenchContext& ctx, const std::vector<double>& v) {
  const GridSpec& g = ctx.grid();
  const int n = g.point_count;
  std::vector<cplx> cs(n);
  for (int p = 0; p < n; ++p) cs[p] = cplx(v[p], 0.0);
  std::vector<cplx> hat = forward_transform(g, cs);
  for (int p = 0; p < n; ++p) hat[p] *= ctx.multiplier()[p];
  std::vector<cplx> lv = inverse_transform(g, hat);
  std::vector<double> ns = ctx.nonlinearity_sum(v);
  const double guard = 0.95 * g.half_length;
  double acc = 0.0;
  for (int p = 0; p < n; ++p) {
    if (std::fabs(g.x(p)) > guard) continue;
    const double r = lv[p].real() - ns[p];
    acc += r * r;
  }
  return std::sqrt(acc * g.dx);
}

DecayTails decay_check(const SpectralField& v) {
  const GridSpec& g = v.grid();
  const int n = g.point_count;
  DecayTails t;
  std::vector<cplx> hat(v.coeffs());
  for (int d = 0; d <= 3; ++d) {
    std::vector<cplx> s = inverse_transform(g, hat);
    for (int p = 0; p < n; ++p) {
      const double x = g.x(p);
      const double ax = std::fabs(x);
      // outer 10% of the box, excluding the 5% seam guard
      if (ax < 0.9 * g.half_length || ax > 0.95 * g.half_length) continue;
      const double a = std::abs(s[p]);
      if (x < 0.0) t.left = std::max(t.left, a);
      else t.right = std::max(t.right, a);
    }
    for (int p = 0; p < n; ++p) hat[p] *= cplx(0.0, g.xi(g.bin(p)));
  }
  return t;
}

} // namespace quenchroll
