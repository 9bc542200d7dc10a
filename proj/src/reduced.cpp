#include "quenchroll/reduced.hpp"

#include <cmath>

namespace quenchroll {

namespace {

constexpr double k3Pi = 3.0 * kPi;
constexpr double k3PiHalf = 1.5 * kPi;

// Thomas algorithm; the R0 channel matrices are strictly diagonally dominant.
void tridiag_dominant(std::vector<cplx>& dl, std::vector<cplx>& d, std::vector<cplx>& du,
                      std::vector<cplx>& b) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) {
    const cplx w = dl[i - 1] / d[i - 1];
    d[i] -= w * du[i - 1];
    b[i] -= w * b[i - 1];
  }
  b[n - 1] /= d[n - 1];
  for (int i = n - 2; i >= 0; --i) b[i] = (b[i] - du[i] * b[i + 1]) / d[i];
}

// channel solve of (4 d^2 + shift + mu) y = rhs with Dirichlet ends
std::vector<cplx> channel_solve(const GridSpec& gs, const std::vector<double>& mu, double shift,
                                const std::vector<cplx>& rhs) {
  const int n = gs.point_count;
  const double h2 = gs.dx * gs.dx;
  std::vector<cplx> dl(n - 1, cplx(4.0 / h2, 0.0)), du(n - 1, cplx(4.0 / h2, 0.0)), d(n), b(rhs);
  for (int i = 0; i < n; ++i) d[i] = cplx(-8.0 / h2 + shift + mu[i], 0.0);
  d[0] = cplx(1.0, 0.0);
  du[0] = cplx(0.0, 0.0);
  b[0] = cplx(0.0, 0.0);
  d[n - 1] = cplx(1.0, 0.0);
  dl[n - 2] = cplx(0.0, 0.0);
  b[n - 1] = cplx(0.0, 0.0);
  tridiag_dominant(dl, d, du, b);
  return b;
}

void band_truncate(const QuenchContext& ctx, std::vector<cplx>& c) {
  const GridSpec& gs = ctx.slow_grid();
  for (int p = 0; p < gs.point_count; ++p)
    if (std::abs(gs.bin(p)) > ctx.band_bins()) c[p] = cplx(0.0, 0.0);
}

double pair_norm(const GridSpec& gs, const std::vector<cplx>& a, const std::vector<cplx>& b,
                 double s) {
  double acc = 0.0;
  for (int p = 0; p < gs.point_count; ++p) {
    const double xi = gs.xi(gs.bin(p));
    const double w = std::pow(1.0 + xi * xi, s);
    acc += w * (std::norm(a[p]) + std::norm(b[p]));
  }
  return std::sqrt(acc * gs.dxi);
}

} // namespace

GammaTerms gamma_terms(const QuenchContext& ctx) {
  GammaTerms t;
  const GridSpec& gs = ctx.slow_grid();
  const GridSpec& g = ctx.grid();
  const EnvelopeProfile& env = ctx.envelope();

  std::vector<cplx> g1(gs.point_count), g2(gs.point_count);
  for (int p = 0; p < gs.point_count; ++p) {
    const double X = gs.x(p);
    const double c = env.value(X);
    g1[p] = cplx(c * (c * c - 1.0), 0.0);
    g2[p] = cplx(env.d2(X), 0.0);
  }
  t.gamma1 = forward_transform(gs, g1);
  t.gamma2 = forward_transform(gs, g2);

  // Gamma3 oscillates at the carrier scale: sample on the fast grid and read
  // the slow bins off the fast transform, F_X[f](xi_k) = eps F_x[f(eps .)](eps xi_k).
  std::vector<cplx> f3p(g.point_count), f3m(g.point_count);
  for (int p = 0; p < g.point_count; ++p) {
    const double x = g.x(p);
    if (x < 0.0) {
      f3p[p] = f3m[p] = cplx(0.0, 0.0);
      continue;
    }
    const double chi = ctx.chi()[p];
    const cplx osc = std::exp(cplx(0.0, -x));
    f3p[p] = chi * osc * std::cos(x + ctx.cfg().gamma);
    f3m[p] = chi * osc * std::cos(x - ctx.cfg().gamma);
  }
  std::vector<cplx> h3p = forward_transform(g, f3p);
  std::vector<cplx> h3m = forward_transform(g, f3m);
  t.gamma3_plus.assign(gs.point_count, cplx(0.0, 0.0));
  t.gamma3_minus.assign(gs.point_count, cplx(0.0, 0.0));
  const int zero_pos = g.pos(0);
  for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
    t.gamma3_plus[gs.pos(k)] = ctx.eps() * h3p[zero_pos + k];
    t.gamma3_minus[gs.pos(k)] = ctx.eps() * h3m[zero_pos + k];
  }
  return t;
}

HStar h_star(const QuenchContext& ctx) {
  const GammaTerms t = gamma_terms(ctx);
  const GridSpec& gs = ctx.slow_grid();
  const double d2e2 = std::pow(ctx.cfg().delta / ctx.eps(), 2.0);
  if (ctx.cfg().delta > 0.0 && (d2e2 < 1.0 / 16.0 || d2e2 > 16.0))
    throw std::invalid_argument("h_star: delta^2/eps^2 outside [1/16, 16]");
  HStar h;
  h.minus.assign(gs.point_count, cplx(0.0, 0.0));
  h.plus.assign(gs.point_count, cplx(0.0, 0.0));
  const cplx em = std::exp(cplx(0.0, -ctx.cfg().gamma));
  const cplx ep = std::exp(cplx(0.0, +ctx.cfg().gamma));
  for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
    const int p = gs.pos(k);
    h.minus[p] = 0.75 * kPi * em * t.gamma1[p] - 4.0 * kPi * em * t.gamma2[p] -
                 2.0 * d2e2 * t.gamma3_minus[p];
    h.plus[p] = 0.75 * kPi * ep * t.gamma1[p] - 4.0 * kPi * ep * t.gamma2[p] -
                2.0 * d2e2 * t.gamma3_plus[p];
  }
  h.norm = pair_norm(gs, h.minus, h.plus, 0.0);
  return h;
}

CoefficientPair apply_R(const QuenchContext& ctx, const CoefficientPair& g) {
  const GridSpec& gs = ctx.slow_grid();
  const int n = gs.point_count;
  // mu g formed pointwise in physical slow space
  std::vector<cplx> gm_x = inverse_transform(gs, g.minus);
  std::vector<cplx> gp_x = inverse_transform(gs, g.plus);
  for (int p = 0; p < n; ++p) {
    gm_x[p] *= ctx.slow_mu()[p];
    gp_x[p] *= ctx.slow_mu()[p];
  }
  std::vector<cplx> mum = forward_transform(gs, gm_x);
  std::vector<cplx> mup = forward_transform(gs, gp_x);
  CoefficientPair out;
  out.minus.resize(n);
  out.plus.resize(n);
  for (int p = 0; p < n; ++p) {
    const double xi = gs.xi(gs.bin(p));
    const bool in_band = std::abs(gs.bin(p)) <= ctx.band_bins();
    out.minus[p] = -4.0 * xi * xi * g.minus[p];
    out.plus[p] = -4.0 * xi * xi * g.plus[p];
    if (in_band) {
      out.minus[p] -= k3Pi * g.minus[p] + k3PiHalf * g.plus[p] - mum[p];
      out.plus[p] -= k3Pi * g.plus[p] + k3PiHalf * g.minus[p] - mup[p];
    }
  }
  return out;
}

CoefficientPair apply_R0(const QuenchContext& ctx, const CoefficientPair& g) {
  const GridSpec& gs = ctx.slow_grid();
  const int n = gs.point_count;
  std::vector<cplx> gm_x = inverse_transform(gs, g.minus);
  std::vector<cplx> gp_x = inverse_transform(gs, g.plus);
  for (int p = 0; p < n; ++p) {
    gm_x[p] *= ctx.slow_mu()[p];
    gp_x[p] *= ctx.slow_mu()[p];
  }
  std::vector<cplx> mum = forward_transform(gs, gm_x);
  std::vector<cplx> mup = forward_transform(gs, gp_x);
  CoefficientPair out;
  out.minus.resize(n);
  out.plus.resize(n);
  for (int p = 0; p < n; ++p) {
    const double xi = gs.xi(gs.bin(p));
    out.minus[p] = -4.0 * xi * xi * g.minus[p] - k3Pi * g.minus[p] - k3PiHalf * g.plus[p] + mum[p];
    out.plus[p] = -4.0 * xi * xi * g.plus[p] - k3Pi * g.plus[p] - k3PiHalf * g.minus[p] + mup[p];
  }
  return out;
}

CoefficientPair solve_R0(const QuenchContext& ctx, const CoefficientPair& rhs_physical) {
  const GridSpec& gs = ctx.slow_grid();
  const int n = gs.point_count;
  // s = g_plus + g_minus: (4 d^2 - 9 pi / 2 + mu) s = rhs_p + rhs_m
  // a = g_plus - g_minus: (4 d^2 - 3 pi / 2 + mu) a = rhs_p - rhs_m
  std::vector<cplx> rs(n), ra(n);
  for (int p = 0; p < n; ++p) {
    rs[p] = rhs_physical.plus[p] + rhs_physical.minus[p];
    ra[p] = rhs_physical.plus[p] - rhs_physical.minus[p];
  }
  const std::vector<cplx> s = channel_solve(gs, ctx.slow_mu(), -4.5 * kPi, rs);
  const std::vector<cplx> a = channel_solve(gs, ctx.slow_mu(), -1.5 * kPi, ra);
  CoefficientPair out;
  out.minus.resize(n);
  out.plus.resize(n);
  for (int p = 0; p < n; ++p) {
    out.plus[p] = 0.5 * (s[p] + a[p]);
    out.minus[p] = 0.5 * (s[p] - a[p]);
  }
  return out;
}

double coercivity_min_eigenvalue(const QuenchContext& ctx, int* channel) {
  const GridSpec& gs = ctx.slow_grid();
  const int n = gs.point_count;
  double best = 0.0;
  int best_ch = 0;
  for (int ch = 0; ch < 2; ++ch) {
    const double shift = ch == 0 ? -1.5 * kPi : -4.5 * kPi;
    // inverse power iteration on the SPD matrix -(4 d^2 + shift + mu)
    std::vector<cplx> v(n);
    unsigned long s = 12345;
    for (int p = 0; p < n; ++p) {
      s = s * 6364136223846793005ull + 1442695040888963407ull;
      v[p] = cplx(static_cast<double>((s >> 33) & 0xffff) / 65535.0 - 0.5, 0.0);
    }
    v[0] = v[n - 1] = cplx(0.0, 0.0);
    double lam = 0.0;
    for (int it = 0; it < 200; ++it) {
      std::vector<cplx> rhs(n);
      for (int p = 0; p < n; ++p) rhs[p] = -v[p];  // solve -(A) y = v  =>  A y = -v
      std::vector<cplx> y = channel_solve(gs, ctx.slow_mu(), shift, rhs);
      double nn = 0.0;
      for (const auto& c : y) nn += std::norm(c);
      nn = std::sqrt(nn);
      for (auto& c : y) c /= nn;
      // Rayleigh quotient of -(4 d^2 + shift + mu)
      const double h2 = gs.dx * gs.dx;
      double num = 0.0;
      for (int p = 1; p + 1 < n; ++p) {
        const cplx Av = -(4.0 * (y[p + 1] - 2.0 * y[p] + y[p - 1]) / h2 +
                          (shift + ctx.slow_mu()[p]) * y[p]);
        num += (std::conj(y[p]) * Av).real();
      }
      const double lam_new = num;  // ||y|| = 1
      if (std::fabs(lam_new - lam) < 1e-12 * std::max(1.0, std::fabs(lam_new)) && it > 4) {
        lam = lam_new;
        break;
      }
      lam = lam_new;
      v = y;
    }
    if (ch == 0 || lam < best) {
      best = lam;
      best_ch = ch;
    }
  }
  if (channel) *channel = best_ch;
  return best;
}

CorrectorState reduced_fixed_point(const QuenchContext& ctx) {
  const GridSpec& g = ctx.grid();
  const GridSpec& gs = ctx.slow_grid();
  const int n = g.point_count;
  const int ns = gs.point_count;
  const double e2 = ctx.eps() * ctx.eps();

  CoefficientPair gh;
  gh.minus.assign(ns, cplx(0.0, 0.0));
  gh.plus.assign(ns, cplx(0.0, 0.0));

  std::vector<double> v_far(n, 0.0);
  std::vector<double> v_near(n, 0.0);
  bool warm = false;

  CorrectorState st;
  const HStar h = h_star(ctx);
  st.h_star_norm = h.norm;

  double prev_dn = -1.0, dn_min = -1.0, dn_first = -1.0;
  int bad_streak = 0;
  int it = 0;
  FarSolveResult far;
  CoefficientPair T;
  T.minus.assign(ns, cplx(0.0, 0.0));
  T.plus.assign(ns, cplx(0.0, 0.0));

  // Anderson mixing state: histories of the post-step iterate and the raw
  // update, flattened as [minus; plus]. Real mixing coefficients keep the
  // conjugation symmetry of the iterates intact.
  const int depth = std::max(ctx.cfg().reduced_accel_depth, 0);
  std::vector<std::vector<cplx>> hist_G, hist_d;
  auto flatten = [ns](const CoefficientPair& a) {
    std::vector<cplx> v(2 * ns);
    for (int p = 0; p < ns; ++p) {
      v[p] = a.minus[p];
      v[ns + p] = a.plus[p];
    }
    return v;
  };

  for (; it < ctx.cfg().max_reduced_iter; ++it) {
    // assemble v_near from the current envelope pair
    std::vector<cplx> vh(n, cplx(0.0, 0.0));
    for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
      vh[ctx.pos_plus() + k] = gh.plus[gs.pos(k)];
      vh[ctx.pos_minus() + k] = gh.minus[gs.pos(k)];
    }
    std::vector<cplx> vns = inverse_transform(g, vh);
    for (int p = 0; p < n; ++p) v_near[p] = vns[p].real();

    // the band extraction divides by eps^2, so the inner solve must run
    // correspondingly deeper than the outer tolerance
    const double far_tol =
        std::min(ctx.cfg().fixed_point_tol, 0.02 * ctx.cfg().reduced_tol * e2);
    far = far_fixed_point(ctx, v_near, warm ? &v_far : nullptr, far_tol);
    v_far = far.v_far;
    warm = true;

    // band-projected recentered nonlinearity / eps^2, off the far solve's
    // last evaluation (stale below the inner tolerance)
    for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
      T.plus[gs.pos(k)] = far.nsum_hat[ctx.pos_plus() + k] / e2;
      T.minus[gs.pos(k)] = far.nsum_hat[ctx.pos_minus() + k] / e2;
    }

    // residual of the exact projected equation
    CoefficientPair res;
    res.minus.assign(ns, cplx(0.0, 0.0));
    res.plus.assign(ns, cplx(0.0, 0.0));
    for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
      const int p = gs.pos(k);
      res.minus[p] = T.minus[p] - ctx.M_minus()[p] * gh.minus[p];
      res.plus[p] = T.plus[p] - ctx.M_plus()[p] * gh.plus[p];
    }
    st.reduced_residual = pair_norm(gs, res.minus, res.plus, 0.0);

    // preconditioned correction
    CoefficientPair rp;
    rp.minus = inverse_transform(gs, res.minus);
    rp.plus = inverse_transform(gs, res.plus);
    CoefficientPair upd = solve_R0(ctx, rp);
    CoefficientPair dg;
    dg.minus = forward_transform(gs, upd.minus);
    dg.plus = forward_transform(gs, upd.plus);
    band_truncate(ctx, dg.minus);
    band_truncate(ctx, dg.plus);

    const double dn = pair_norm(gs, dg.minus, dg.plus, 2.0);
    st.update_norms.push_back(dn);
    static_cast<void>(bad_streak);
    if (prev_dn > 0.0) {
      const double ratio = dn / prev_dn;
      st.contraction_estimates.push_back(ratio);
      bad_streak = (ratio >= 1.0) ? bad_streak + 1 : 0;
    }
    if (dn_min < 0.0 || dn < dn_min) dn_min = dn;
    if (dn_first < 0.0) dn_first = dn;
    if (bad_streak >= 8 && dn > std::max(1e3 * ctx.cfg().reduced_tol, 2.0 * dn_first))
      throw NonContractionError(
          "reduced_fixed_point: no contraction (reduce delta or shift the envelope)",
          st.contraction_estimates);
    // mixing safeguard: restart the history if the residual wanders far
    // above its running minimum
    if (depth > 0 && dn > 50.0 * dn_min && !hist_G.empty()) {
      hist_G.clear();
      hist_d.clear();
    }
    prev_dn = dn;
    if (dn < ctx.cfg().reduced_tol) {
      for (int p = 0; p < ns; ++p) {
        gh.minus[p] += dg.minus[p];
        gh.plus[p] += dg.plus[p];
      }
      ++it;
      prev_dn = -2.0;
      break;
    }
    if (depth == 0) {
      for (int p = 0; p < ns; ++p) {
        gh.minus[p] += dg.minus[p];
        gh.plus[p] += dg.plus[p];
      }
    } else {
      CoefficientPair Gp;
      Gp.minus.resize(ns);
      Gp.plus.resize(ns);
      for (int p = 0; p < ns; ++p) {
        Gp.minus[p] = gh.minus[p] + dg.minus[p];
        Gp.plus[p] = gh.plus[p] + dg.plus[p];
      }
      hist_G.push_back(flatten(Gp));
      hist_d.push_back(flatten(dg));
      if (static_cast<int>(hist_G.size()) > depth + 1) {
        hist_G.erase(hist_G.begin());
        hist_d.erase(hist_d.begin());
      }
      const int m = static_cast<int>(hist_G.size()) - 1;
      if (m == 0) {
        for (int p = 0; p < ns; ++p) {
          gh.minus[p] = Gp.minus[p];
          gh.plus[p] = Gp.plus[p];
        }
      } else {
        // least squares over real coefficients: minimize |d_k - sum th_j Dd_j|
        auto rdot = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
          double s = 0.0;
          for (std::size_t q = 0; q < a.size(); ++q)
            s += a[q].real() * b[q].real() + a[q].imag() * b[q].imag();
          return s;
        };
        std::vector<std::vector<cplx>> Dd(m), DG(m);
        for (int j = 0; j < m; ++j) {
          Dd[j].resize(2 * ns);
          DG[j].resize(2 * ns);
          for (int q = 0; q < 2 * ns; ++q) {
            Dd[j][q] = hist_d[j + 1][q] - hist_d[j][q];
            DG[j][q] = hist_G[j + 1][q] - hist_G[j][q];
          }
        }
        std::vector<double> A(m * m), bvec(m);
        for (int i2 = 0; i2 < m; ++i2) {
          bvec[i2] = rdot(Dd[i2], hist_d.back());
          for (int j = 0; j < m; ++j) A[i2 * m + j] = rdot(Dd[i2], Dd[j]);
          A[i2 * m + i2] *= 1.0 + 1e-12;
        }
        // small Gaussian elimination with partial pivoting
        std::vector<double> th(bvec);
        bool ok = true;
        for (int col = 0; col < m && ok; ++col) {
          int piv = col;
          for (int r2 = col + 1; r2 < m; ++r2)
            if (std::fabs(A[r2 * m + col]) > std::fabs(A[piv * m + col])) piv = r2;
          if (std::fabs(A[piv * m + col]) < 1e-300) { ok = false; break; }
          if (piv != col) {
            for (int c2 = 0; c2 < m; ++c2) std::swap(A[piv * m + c2], A[col * m + c2]);
            std::swap(th[piv], th[col]);
          }
          for (int r2 = col + 1; r2 < m; ++r2) {
            const double f = A[r2 * m + col] / A[col * m + col];
            for (int c2 = col; c2 < m; ++c2) A[r2 * m + c2] -= f * A[col * m + c2];
            th[r2] -= f * th[col];
          }
        }
        if (ok)
          for (int r2 = m - 1; r2 >= 0; --r2) {
            for (int c2 = r2 + 1; c2 < m; ++c2) th[r2] -= A[r2 * m + c2] * th[c2];
            th[r2] /= A[r2 * m + r2];
          }
        std::vector<cplx> gnew = hist_G.back();
        if (ok)
          for (int j = 0; j < m; ++j)
            for (int q = 0; q < 2 * ns; ++q) gnew[q] -= th[j] * DG[j][q];
        for (int p = 0; p < ns; ++p) {
          gh.minus[p] = gnew[p];
          gh.plus[p] = gnew[ns + p];
        }
      }
      band_truncate(ctx, gh.minus);
      band_truncate(ctx, gh.plus);
    }
  }
  if (prev_dn > -2.0 && prev_dn > ctx.cfg().reduced_tol)
    throw NonContractionError("reduced_fixed_point: iteration cap reached before tolerance",
                              st.contraction_estimates);
  st.iterations = it;
  st.far_iterations = far.iterations;
  st.far_contraction_estimates = far.contraction_estimates;

  // final assembly at the converged pair
  {
    std::vector<cplx> vh(n, cplx(0.0, 0.0));
    for (int k = -ctx.band_bins(); k <= ctx.band_bins(); ++k) {
      vh[ctx.pos_plus() + k] = gh.plus[gs.pos(k)];
      vh[ctx.pos_minus() + k] = gh.minus[gs.pos(k)];
    }
    st.v_near = SpectralField::from_coeffs(g, std::move(vh));
    far = far_fixed_point(ctx, st.v_near.real_samples(), &v_far,
                          0.1 * ctx.cfg().fixed_point_tol);
    st.v_far = SpectralField::from_coeffs(g, far.v_far_hat);
    st.g_minus = SpectralField::from_coeffs(gs, gh.minus);
    st.g_plus = SpectralField::from_coeffs(gs, gh.plus);
  }

  // diagnostics: Q bookkeeping consistency and Neumann ratio
  {
    CoefficientPair Rg = apply_R(ctx, gh);
    // Q = T - M g + R g - h; then (R g - h) - Q = M g - T
    CoefficientPair mg;
    mg.minus.assign(ns, cplx(0.0, 0.0));
    mg.plus.assign(ns, cplx(0.0, 0.0));
    for (int p = 0; p < ns; ++p) {
      mg.minus[p] = ctx.M_minus()[p] * gh.minus[p] - T.minus[p];
      mg.plus[p] = ctx.M_plus()[p] * gh.plus[p] - T.plus[p];
    }
    st.q_consistency = pair_norm(gs, mg.minus, mg.plus, 0.0);

    CoefficientPair R0g = apply_R0(ctx, gh);
    CoefficientPair diff;
    diff.minus.resize(ns);
    diff.plus.resize(ns);
    for (int p = 0; p < ns; ++p) {
      diff.minus[p] = Rg.minus[p] - R0g.minus[p];
      diff.plus[p] = Rg.plus[p] - R0g.plus[p];
    }
    CoefficientPair dphys;
    dphys.minus = inverse_transform(gs, diff.minus);
    dphys.plus = inverse_transform(gs, diff.plus);
    CoefficientPair sol = solve_R0(ctx, dphys);
    CoefficientPair sh;
    sh.minus = forward_transform(gs, sol.minus);
    sh.plus = forward_transform(gs, sol.plus);
    const double gn = pair_norm(gs, gh.minus, gh.plus, 2.0);
    st.neumann_ratio = gn > 0.0 ? pair_norm(gs, sh.minus, sh.plus, 2.0) / gn : 0.0;
  }
  return st;
}

} // namespace quenchroll
