#include "quenchroll/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "quenchroll/field.hpp"

extern "C" {
void dgtsv_(const int* n, const int* nrhs, double* dl, double* d, double* du, double* b,
            const int* ldb, int* info);
}

namespace quenchroll {

namespace {

constexpr double kReact = 3.0 * kPi / 4.0;  // reaction coefficient
constexpr double kDiff = 4.0 * kPi;         // diffusion coefficient

void tridiag_solve(std::vector<double>& dl, std::vector<double>& d, std::vector<double>& du,
                   std::vector<double>& b) {
  const int n = static_cast<int>(d.size());
  const int one = 1;
  int info = 0;
  dgtsv_(&n, &one, dl.data(), d.data(), du.data(), b.data(), &n, &info);
  if (info != 0) throw std::runtime_error("dgtsv failed, info=" + std::to_string(info));
}

// cubic Lagrange interpolation on a uniform table
double interp4(const std::vector<double>& tab, double pos) {
  const int n = static_cast<int>(tab.size());
  int j = static_cast<int>(std::floor(pos));
  j = std::clamp(j, 1, n - 3);
  const double t = pos - j;
  const double a = tab[j - 1], b = tab[j], c = tab[j + 1], d = tab[j + 2];
  return -t * (t - 1.0) * (t - 2.0) / 6.0 * a + (t * t - 1.0) * (t - 2.0) / 2.0 * b -
         t * (t + 1.0) * (t - 2.0) / 2.0 * c + t * (t * t - 1.0) / 6.0 * d;
}

struct PhasePlane {
  std::vector<double> u, p;  // p(u) on uniform u grid, p <= 0
  double du = 0.0;
  double res = 0.0;
  int iterations = 0;

  double p_at(double uu) const { return interp4(p, uu / du); }
};

PhasePlane solve_phase_plane(double c, int nu, double tol) {
  PhasePlane pp;
  pp.du = 1.0 / nu;
  pp.u.resize(nu + 1);
  pp.p.assign(nu + 1, 0.0);
  for (int i = 0; i <= nu; ++i) pp.u[i] = pp.du * i;
  const double disc = c * c - 12.0 * kPi * kPi;
  const double lam_s = (c - std::sqrt(std::max(disc, 0.0))) / (8.0 * kPi);
  for (int i = 1; i < nu; ++i) pp.p[i] = -2.0 * lam_s * pp.u[i] * (1.0 - pp.u[i]);

  std::vector<double> F(nu + 1), dl(nu), d(nu + 1), du_(nu), step;
  std::vector<double> hist;
  auto resid = [&](const std::vector<double>& P, std::vector<double>& out) {
    out[0] = 0.0;
    out[nu] = 0.0;
    double sup = 0.0;
    for (int i = 1; i < nu; ++i) {
      const double ui = pp.u[i];
      out[i] = -kDiff * P[i] * (P[i + 1] - P[i - 1]) / (2.0 * pp.du) - c * P[i] +
               kReact * (ui * ui * ui - ui);
      sup = std::max(sup, std::fabs(out[i]));
    }
    return sup;
  };

  double res = resid(pp.p, F);
  int it = 0;
  for (; it < 100; ++it) {
    hist.push_back(res);
    if (res < tol) break;
    // rows 0 and nu are identity (boundary p=0)
    d[0] = 1.0;
    du_[0] = 0.0;
    d[nu] = 1.0;
    dl[nu - 1] = 0.0;
    for (int i = 1; i < nu; ++i) {
      dl[i - 1] = kDiff * pp.p[i] / (2.0 * pp.du);            // dF_i / dP_{i-1}
      d[i] = -kDiff * (pp.p[i + 1] - pp.p[i - 1]) / (2.0 * pp.du) - c;
      du_[i] = -kDiff * pp.p[i] / (2.0 * pp.du);              // dF_i / dP_{i+1}
    }
    step = F;
    auto dlc = dl, dc = d, duc = du_;
    tridiag_solve(dlc, dc, duc, step);
    double lam = 1.0;
    std::vector<double> trial(nu + 1), Ft(nu + 1);
    for (int half = 0; half < 10; ++half) {
      for (int i = 0; i <= nu; ++i) trial[i] = pp.p[i] - lam * step[i];
      trial[0] = 0.0;
      trial[nu] = 0.0;
      const double rt = resid(trial, Ft);
      if (rt < res || half == 9) {
        pp.p = trial;
        res = rt;
        F = Ft;
        break;
      }
      lam *= 0.5;
    }
  }
  pp.res = res;
  pp.iterations = it;
  if (res > std::max(tol * 100.0, 1e-9))
    throw EnvelopeError("envelope: phase-plane Newton did not converge", hist);
  return pp;
}

// 4-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                           0.8611363115940526};
constexpr double kGw[4] = {0.34785484513745385, 0.6521451548625461, 0.6521451548625461,
                           0.34785484513745385};

} // namespace

EnvelopeProfile solve_envelope(double c, double S, int n, double tol) {
  if (!(c > 0.0)) throw std::invalid_argument("solve_envelope: need c > 0");
  EnvelopeProfile e;
  e.c_ = c;
  e.S_ = S;
  e.n_ = n;

  if (c >= kMonotoneSpeed * (1.0 - 1e-12)) {
    const int nu = std::max(n, 4096);
    PhasePlane pp = solve_phase_plane(c, nu, std::min(tol, 1e-11));
    e.solver_residual_ = pp.res;
    e.iterations_ = pp.iterations;
    e.monotone_branch_ = true;

    // tail rates
    const double disc = std::sqrt(std::max(c * c - 12.0 * kPi * kPi, 0.0));
    e.lr1_ = (-c + disc) / (8.0 * kPi);  // slow right rate (negative)
    e.lr2_ = (-c - disc) / (8.0 * kPi);
    e.ll1_ = (-c + std::sqrt(c * c + 24.0 * kPi * kPi)) / (8.0 * kPi);  // left rate (positive)
    e.ll2_ = 2.0 * e.ll1_;

    // x(u) by per-cell Gauss quadrature of 1/p, anchored at x(1/2) = 0
    const int i_r = 32, i_l = nu - 32;
    const int imid = nu / 2;
    std::vector<double> x_of(nu + 1, 0.0);
    auto cell = [&](int jlo) {
      const double a = pp.u[jlo], b = pp.u[jlo + 1];
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += kGw[k] / pp.p_at(mid + half * kGx[k]);
      return v * half;
    };
    for (int j = imid - 1; j >= i_r; --j) x_of[j] = x_of[j + 1] - cell(j);
    for (int j = imid + 1; j <= i_l; ++j) x_of[j] = x_of[j - 1] + cell(j - 1);
    const double x_r = x_of[i_r], x_l = x_of[i_l];

    // two-term tails, C1-matched at the switch points
    {
      const double u_r = pp.u[i_r], p_r = pp.p[i_r];
      if (std::fabs(e.lr2_ - e.lr1_) > 1e-8) {
        e.ar2_ = (p_r - e.lr1_ * u_r) / (e.lr2_ - e.lr1_);
        e.ar1_ = u_r - e.ar2_;
      } else {  // degenerate double rate at the threshold
        e.ar1_ = u_r;
        e.ar2_ = 0.0;
        e.lr2_ = e.lr1_;
      }
      const double psi_l = 1.0 - pp.u[i_l], dpsi_l = -pp.p[i_l];
      e.al2_ = (dpsi_l - e.ll1_ * psi_l) / (e.ll2_ - e.ll1_);
      e.al1_ = psi_l - e.al2_;
    }
    e.x_lo_ = x_l;
    e.x_hi_ = x_r;

    // dense uniform table by inverting x(u)
    e.hx_ = (x_r - x_l) / std::max(4 * n, 16384);
    const int m = static_cast<int>(std::floor((x_r - x_l) / e.hx_)) + 1;
    e.tab_chi_.resize(m);
    e.tab_d1_.resize(m);
    // x_of is decreasing in u; invert with bracketed Newton per node
    int jhi = i_l;  // x_of[jhi] is the largest u (most negative x) end
    for (int q = 0; q < m; ++q) {
      const double X = x_l + q * e.hx_;
      while (jhi > i_r + 1 && x_of[jhi - 1] <= X) --jhi;
      // u in [u[jhi-1], u[jhi]] with x_of[jhi] <= X <= x_of[jhi-1]
      double uu = pp.u[jhi];
      const double span = x_of[jhi - 1] - x_of[jhi];
      if (span > 0.0)
        uu = pp.u[jhi] - pp.du * (X - x_of[jhi]) / span;  // linear seed
      for (int nw = 0; nw < 6; ++nw) {
        // x(uu) via anchor at node jhi plus Gauss correction
        const double a = uu, b = pp.u[jhi];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double xi = 0.0;
        for (int k = 0; k < 4; ++k) xi += kGw[k] / pp.p_at(mid + half * kGx[k]);
        const double xval = x_of[jhi] - xi * half;
        const double pu = pp.p_at(uu);
        const double upd = (X - xval) * pu;  // du = (X - x(u)) * p
        uu += upd;
        uu = std::clamp(uu, pp.u[i_r], pp.u[i_l]);
        if (std::fabs(upd) < 1e-15) break;
      }
      e.tab_chi_[q] = uu;
      e.tab_d1_[q] = pp.p_at(uu);
    }
    e.x_hi_ = x_l + (m - 1) * e.hx_;
    // re-match the tails at the actual table endpoints
    {
      const double u_r = e.tab_chi_.back(), p_r = e.tab_d1_.back();
      if (std::fabs(e.lr2_ - e.lr1_) > 1e-8) {
        e.ar2_ = (p_r - e.lr1_ * u_r) / (e.lr2_ - e.lr1_);
        e.ar1_ = u_r - e.ar2_;
      } else {
        e.ar1_ = u_r;
        e.ar2_ = 0.0;
      }
      const double psi_l = 1.0 - e.tab_chi_.front(), dpsi_l = -e.tab_d1_.front();
      e.al2_ = (dpsi_l - e.ll1_ * psi_l) / (e.ll2_ - e.ll1_);
      e.al1_ = psi_l - e.al2_;
    }

    // gradient energy: int chi'^2 dx = -int_0^1 p du (trapezoid), plus tails
    double ge = 0.0;
    for (int i = 0; i < nu; ++i) ge += -0.5 * (pp.p[i] + pp.p[i + 1]) * pp.du;
    e.grad_energy_ = ge;
    e.min_chi_ = 0.0;
  } else {
    // sub-threshold: Levenberg-Marquardt collocation with continuation in c
    const double S_lm = std::max(S, 40.0);
    const int nn = std::max(n, 8192) + 1;
    std::vector<double> X(nn), chi(nn);
    const double h = 2.0 * S_lm / (nn - 1);
    for (int i = 0; i < nn; ++i) X[i] = -S_lm + h * i;

    // seed from the threshold-speed front
    {
      EnvelopeProfile seed = solve_envelope(kMonotoneSpeed, S_lm, 8192, 1e-10);
      for (int i = 0; i < nn; ++i) chi[i] = seed.value(X[i]);
    }
    std::vector<double> hist;
    auto resid = [&](const std::vector<double>& q, double cc, std::vector<double>& out) {
      out[0] = q[0] - 1.0;
      out[nn - 1] = q[nn - 1];
      double sup = std::max(std::fabs(out[0]), std::fabs(out[nn - 1]));
      for (int i = 1; i < nn - 1; ++i) {
        out[i] = -kDiff * (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (h * h) +
                 kReact * (q[i] * q[i] * q[i] - q[i]) - cc * (q[i + 1] - q[i - 1]) / (2.0 * h);
        sup = std::max(sup, std::fabs(out[i]));
      }
      return sup;
    };

    const int steps = 10;
    double res = 0.0;
    int total_it = 0;
    for (int sstep = 1; sstep <= steps; ++sstep) {
      const double cc = kMonotoneSpeed + (c - kMonotoneSpeed) * sstep / steps;
      // LM on the banded normal equations
      double mu = 1e-8;
      std::vector<double> F(nn), Ft(nn), trial(nn);
      res = resid(chi, cc, F);
      for (int it = 0; it < 300; ++it) {
        ++total_it;
        hist.push_back(res);
        if (res < tol) break;
        // J bands (interior rows): lo, di, up
        const double lo = -kDiff / (h * h) + cc / (2.0 * h);
        const double up = -kDiff / (h * h) - cc / (2.0 * h);
        std::vector<double> di(nn);
        for (int i = 0; i < nn; ++i) di[i] = 2.0 * kDiff / (h * h) + kReact * (3.0 * chi[i] * chi[i] - 1.0);
        di[0] = 1.0;
        di[nn - 1] = 1.0;
        // JtJ pentadiagonal (symmetric)
        std::vector<double> d0(nn, 0.0), d1(nn - 1, 0.0), d2(nn - 2, 0.0), JtF(nn, 0.0);
        for (int i = 0; i < nn; ++i) {
          d0[i] += di[i] * di[i];
          JtF[i] += di[i] * F[i];
        }
        for (int i = 1; i < nn - 1; ++i) {
          d0[i - 1] += lo * lo;
          d0[i + 1] += up * up;
          JtF[i - 1] += lo * F[i];
          JtF[i + 1] += up * F[i];
          d1[i - 1] += lo * di[i];  // (i, i-1) x (i, i) -> (i-1, i)
          d1[i] += di[i] * up;      // (i, i) x (i, i+1)
          d2[i - 1] += lo * up;     // (i, i-1) x (i, i+1)
        }
        bool accepted = false;
        for (int tries = 0; tries < 25 && !accepted; ++tries) {
          // banded Cholesky of JtJ + mu*diag(JtJ)
          std::vector<double> c0(nn), c1(nn - 1, 0.0), c2(nn - 2, 0.0);
          bool ok = true;
          for (int i = 0; i < nn && ok; ++i) {
            double v = d0[i] * (1.0 + mu);
            if (i >= 1) v -= c1[i - 1] * c1[i - 1];
            if (i >= 2) v -= c2[i - 2] * c2[i - 2];
            if (v <= 0.0) { ok = false; break; }
            c0[i] = std::sqrt(v);
            if (i + 1 < nn) {
              double w = d1[i];
              if (i >= 1) w -= c1[i - 1] * c2[i - 1];
              c1[i] = w / c0[i];
            }
            if (i + 2 < nn) c2[i] = d2[i] / c0[i];
          }
          if (!ok) { mu *= 10.0; continue; }
          std::vector<double> y(nn), s(nn);
          for (int i = 0; i < nn; ++i) {
            double v = JtF[i];
            if (i >= 1) v -= c1[i - 1] * y[i - 1];
            if (i >= 2) v -= c2[i - 2] * y[i - 2];
            y[i] = v / c0[i];
          }
          for (int i = nn - 1; i >= 0; --i) {
            double v = y[i];
            if (i + 1 < nn) v -= c1[i] * s[i + 1];
            if (i + 2 < nn) v -= c2[i] * s[i + 2];
            s[i] = v / c0[i];
          }
          for (int i = 0; i < nn; ++i) trial[i] = chi[i] - s[i];
          const double rt = resid(trial, cc, Ft);
          if (rt < res) {
            chi = trial;
            res = rt;
            F = Ft;
            mu = std::max(mu * 0.25, 1e-14);
            accepted = true;
          } else {
            mu *= 10.0;
          }
        }
        if (!accepted) break;
      }
    }
    if (res > std::max(tol * 1e4, 1e-5))
      throw EnvelopeError("envelope: sub-threshold LM solve did not converge", hist);
    e.solver_residual_ = res;
    e.iterations_ = total_it;
    e.monotone_branch_ = false;

    // recenter: locate the 0.5 downcrossing nearest the middle
    int j0 = nn / 2;
    double best = 1e300;
    for (int i = 1; i < nn - 1; ++i) {
      if ((chi[i] - 0.5) * (chi[i + 1] - 0.5) <= 0.0 && chi[i] > chi[i + 1]) {
        const double xc = X[i] + h * (0.5 - chi[i]) / (chi[i + 1] - chi[i]);
        if (std::fabs(xc) < best) { best = std::fabs(xc); j0 = i; }
      }
    }
    const double xc = X[j0] + h * (0.5 - chi[j0]) / (chi[j0 + 1] - chi[j0]);
    e.x_lo_ = X[1] - xc;
    e.x_hi_ = X[nn - 2] - xc;
    e.hx_ = h;
    e.tab_chi_.assign(chi.begin() + 1, chi.end() - 1);
    e.tab_d1_.resize(nn - 2);
    for (int i = 1; i < nn - 1; ++i) e.tab_d1_[i - 1] = (chi[std::min(i + 1, nn - 1)] - chi[i - 1]) / (2.0 * h);
    e.lr1_ = -c / (8.0 * kPi);  // oscillatory decay rate (real part)
    e.lr2_ = e.lr1_;
    e.ll1_ = (-c + std::sqrt(c * c + 24.0 * kPi * kPi)) / (8.0 * kPi);
    e.ll2_ = 2.0 * e.ll1_;
    // single-term tails matched by value only
    e.ar1_ = e.tab_chi_.back();
    e.ar2_ = 0.0;
    e.al1_ = 1.0 - e.tab_chi_.front();
    e.al2_ = 0.0;
    e.min_chi_ = *std::min_element(chi.begin(), chi.end());
    e.range_warning_ = e.min_chi_ < -0.1 || *std::max_element(chi.begin(), chi.end()) > 1.1;
    double ge = 0.0;
    for (int i = 0; i + 1 < static_cast<int>(e.tab_d1_.size()); ++i)
      ge += 0.5 * (e.tab_d1_[i] * e.tab_d1_[i] + e.tab_d1_[i + 1] * e.tab_d1_[i + 1]) * h;
    e.grad_energy_ = ge;
  }

  // FD2 residual of the sampled table (independent of the solve route)
  {
    double sup = 0.0;
    const int m = static_cast<int>(e.tab_chi_.size());
    for (int i = 1; i + 1 < m; ++i) {
      const double d2v = (e.tab_chi_[i + 1] - 2.0 * e.tab_chi_[i] + e.tab_chi_[i - 1]) / (e.hx_ * e.hx_);
      const double d1v = (e.tab_chi_[i + 1] - e.tab_chi_[i - 1]) / (2.0 * e.hx_);
      const double q = e.tab_chi_[i];
      sup = std::max(sup, std::fabs(-kDiff * d2v + kReact * (q * q * q - q) - c * d1v));
    }
    e.residual_ = sup;
  }
  e.fit_tails();
  return e;
}

double EnvelopeProfile::base_value(double x) const {
  if (x > x_hi_) {
    const double t = x - x_hi_;
    return ar1_ * std::exp(lr1_ * t) + ar2_ * std::exp(lr2_ * t);
  }
  if (x < x_lo_) {
    const double t = x - x_lo_;
    return 1.0 - (al1_ * std::exp(ll1_ * t) + al2_ * std::exp(ll2_ * t));
  }
  return interp4(tab_chi_, (x - x_lo_) / hx_);
}

double EnvelopeProfile::base_d1(double x) const {
  if (x > x_hi_) {
    const double t = x - x_hi_;
    return lr1_ * ar1_ * std::exp(lr1_ * t) + lr2_ * ar2_ * std::exp(lr2_ * t);
  }
  if (x < x_lo_) {
    const double t = x - x_lo_;
    return -(ll1_ * al1_ * std::exp(ll1_ * t) + ll2_ * al2_ * std::exp(ll2_ * t));
  }
  return interp4(tab_d1_, (x - x_lo_) / hx_);
}

double EnvelopeProfile::value(double X) const { return base_value(X + shift_); }
double EnvelopeProfile::d1(double X) const { return base_d1(X + shift_); }

double EnvelopeProfile::d2(double X) const {
  const double q = value(X), q1 = d1(X);
  return (kReact * (q * q * q - q) - c_ * q1) / kDiff;
}

double EnvelopeProfile::d3(double X) const {
  const double q = value(X), q1 = d1(X), q2 = d2(X);
  return (kReact * (3.0 * q * q - 1.0) * q1 - c_ * q2) / kDiff;
}

double EnvelopeProfile::d4(double X) const {
  const double q = value(X), q1 = d1(X), q2 = d2(X), q3 = d3(X);
  return (kReact * (6.0 * q * q1 * q1 + (3.0 * q * q - 1.0) * q2) - c_ * q3) / kDiff;
}

void EnvelopeProfile::fit_tails() {
  // least-squares exponential fit over the outer quarter of [-S, S]
  auto fit = [&](bool left) {
    const int m = 200;
    std::vector<double> xs(m), ys(m);
    int used = 0;
    for (int i = 0; i < m; ++i) {
      const double X = left ? (-S_ + 0.25 * S_ * i / (m - 1)) : (0.75 * S_ + 0.25 * S_ * i / (m - 1));
      const double v = left ? (1.0 - value(X)) : value(X);
      if (std::fabs(v) < 1e-300) continue;
      xs[used] = X;
      ys[used] = std::log(std::fabs(v));
      ++used;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < used; ++i) {
      sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i]; syy += ys[i] * ys[i];
    }
    const double nmr = used;
    const double slope = (nmr * sxy - sx * sy) / (nmr * sxx - sx * sx);
    const double r_num = nmr * sxy - sx * sy;
    const double r_den = std::sqrt((nmr * sxx - sx * sx) * (nmr * syy - sy * sy));
    const double r2 = r_den > 0 ? (r_num / r_den) * (r_num / r_den) : 0.0;
    return std::pair<double, double>(slope, r2);
  };
  auto [sl, r2l] = fit(true);
  auto [sr, r2r] = fit(false);
  fit_rate_left_ = sl;   // positive: 1-chi ~ e^{+rate x}, x -> -inf
  fit_rate_right_ = sr;  // negative
  fit_r2_left_ = r2l;
  fit_r2_right_ = r2r;
}

EnvelopeProfile shift_envelope(const EnvelopeProfile& p, double tau_x) {
  EnvelopeProfile q = p;
  q.shift_ += tau_x;
  if (q.x_hi_ - q.shift_ < -q.S_ || q.x_lo_ - q.shift_ > q.S_)
    throw std::invalid_argument("shift_envelope: shifted support outside the sampled window");
  return q;
}

double gamma3_norm(const EnvelopeProfile& p, double eps, double gamma, int sign) {
  if (!(eps > 0.0)) throw std::invalid_argument("gamma3_norm: eps must be positive");
  // integrate chi^2 cos^2(x/eps +- gamma) until the tail is negligible
  const double rate = std::fabs(p.decay_rate_right()) > 1e-12 ? std::fabs(p.decay_rate_right())
                                                              : 0.05;
  const double x_stop = std::max(p.window(), std::fabs(p.shift()) + 60.0 / rate);
  const double h = eps / 10.0;
  const long steps = static_cast<long>(x_stop / h);
  double acc = 0.0;
  for (long i = 0; i <= steps; ++i) {
    const double x = h * i;
    const double chi = p.value(x);
    const double cphase = std::cos(x / eps + sign * gamma);
    const double f = chi * chi * cphase * cphase;
    acc += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  return std::sqrt(acc * h);
}

} // namespace quenchroll
