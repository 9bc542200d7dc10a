#include "quenchroll/rolls.hpp"

#include <cmath>

#include "quenchroll/fft.hpp"

namespace quenchroll {

namespace {

// Dense LU solve with partial pivoting; A is row-major n x n, overwritten.
void dense_solve(std::vector<double>& A, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
    if (std::fabs(A[piv * n + col]) < 1e-300)
      throw std::runtime_error("dense_solve: singular matrix");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const double d = A[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r * n + col] / d;
      if (f == 0.0) continue;
      A[r * n + col] = 0.0;
      for (int c = col + 1; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
    b[r] = s / A[r * n + r];
  }
}

// Fourier coefficients (indices -2M..2M usable) of a function sampling on Q
// equispaced points of one period; Q a power of two with Q >= 4M to keep the
// cubic alias-free.
std::vector<cplx> periodic_coeffs(const std::vector<cplx>& samples) {
  std::vector<cplx> work(samples);
  fft::forward(work);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& v : work) v *= inv;
  return work;  // index m mod Q
}

} // namespace

double PeriodicProfile::eval(double x, int deriv) const {
  cplx acc(0.0, 0.0);
  for (int m = -mode_count; m <= mode_count; ++m) {
    cplx f = mode(m);
    const cplx im(0.0, static_cast<double>(m));
    for (int d = 0; d < deriv; ++d) f *= im;
    acc += f * std::exp(cplx(0.0, m * x));
  }
  return acc.real();
}

void PeriodicProfile::eval_derivs(const std::vector<double>& x, std::vector<double>& u,
                                  std::vector<double>& u1, std::vector<double>& u2,
                                  std::vector<double>& u3) const {
  const std::size_t n = x.size();
  u.assign(n, 0.0);
  u1.assign(n, 0.0);
  u2.assign(n, 0.0);
  u3.assign(n, 0.0);
  for (int m = 1; m <= mode_count; ++m) {
    const cplx c = mode(m);
    if (std::abs(c) == 0.0) continue;
    const double a = 2.0 * c.real();
    const double b = -2.0 * c.imag();
    const double md = m;
    for (std::size_t j = 0; j < n; ++j) {
      const double cs = std::cos(md * x[j]);
      const double sn = std::sin(md * x[j]);
      // c e^{imx} + conj = a cos - (-b) ... : a cos(mx) + b sin(mx)
      u[j] += a * cs + b * sn;
      u1[j] += md * (-a * sn + b * cs);
      u2[j] += md * md * (-a * cs - b * sn);
      u3[j] += md * md * md * (a * sn - b * cs);
    }
  }
  const double c0 = mode(0).real();
  if (c0 != 0.0)
    for (std::size_t j = 0; j < n; ++j) u[j] += c0;
}

PeriodicProfile solve_rolls(double delta, double Omega, double gamma, int modes, double tol) {
  if (delta < 0.0 || delta > 0.2)
    throw std::invalid_argument("solve_rolls: delta outside (0, 0.2]");
  if (std::fabs(Omega) >= 1.0 / 3.0)
    throw std::invalid_argument("solve_rolls: |Omega| must be < 1/3");
  if (modes < 8) throw std::invalid_argument("solve_rolls: need at least 8 modes");

  PeriodicProfile prof;
  prof.mode_count = modes;
  prof.delta = delta;
  prof.Omega = Omega;
  prof.gamma = gamma;
  prof.omega = std::sqrt(1.0 + delta * Omega);
  prof.modes.assign(2 * modes + 1, cplx(0.0, 0.0));
  if (delta == 0.0) return prof;

  const int M = modes;
  const double om2 = 1.0 + delta * Omega;
  const int Q = 256;
  std::vector<double> lam(M + 1);
  for (int m = 0; m <= M; ++m) {
    const double q = 1.0 - om2 * m * m;
    lam[m] = -q * q + delta * delta;
  }
  const double eps0 = delta * std::sqrt(4.0 / 3.0 * (1.0 - Omega * Omega));

  // unknowns: y = [c0, Re c1, Im c1, ..., Re cM, Im cM]
  const int nunk = 2 * M + 1;
  std::vector<cplx> c(M + 1, cplx(0.0, 0.0));
  c[1] = 0.5 * eps0 * std::exp(cplx(0.0, gamma));

  auto theta_samples = [&](const std::vector<cplx>& cm) {
    std::vector<cplx> s(Q, cplx(0.0, 0.0));
    for (int q = 0; q < Q; ++q) {
      const double th = kTwoPi * q / Q;
      cplx v = cm[0];
      for (int m = 1; m <= M; ++m) v += 2.0 * (cm[m] * std::exp(cplx(0.0, m * th))).real();
      s[q] = v;
    }
    return s;
  };

  double res = 0.0;
  int it = 0;
  for (; it < 50; ++it) {
    std::vector<cplx> u = theta_samples(c);
    std::vector<cplx> u3(Q), u2sq(Q);
    for (int q = 0; q < Q; ++q) {
      u3[q] = u[q] * u[q] * u[q];
      u2sq[q] = u[q] * u[q];
    }
    const std::vector<cplx> cu3 = periodic_coeffs(u3);
    const std::vector<cplx> cu2 = periodic_coeffs(u2sq);
    auto mode_of = [&](const std::vector<cplx>& cc, int m) {
      return cc[((m % Q) + Q) % Q];
    };

    // complex residuals E_m = lam_m c_m - (u^3)_m, m = 0..M
    std::vector<cplx> E(M + 1);
    for (int m = 0; m <= M; ++m) E[m] = lam[m] * c[m] - mode_of(cu3, m);

    // real system with the Im-part of the m=1 row replaced by the phase pin
    std::vector<double> F(nunk);
    const cplx eig = std::exp(cplx(0.0, -gamma));
    F[0] = E[0].real();
    for (int m = 1; m <= M; ++m) {
      if (m == 1) {
        const cplx r = E[1] * eig;  // rotate into the gauge frame
        F[1] = r.real();
        F[2] = (c[1] * eig).imag();  // phase condition Im(c1 e^{-i gamma}) = 0
      } else {
        F[2 * m - 1] = E[m].real();
        F[2 * m] = E[m].imag();
      }
    }
    res = 0.0;
    for (double v : F) res = std::max(res, std::fabs(v));
    // convergence judged on the true ODE residual below; Newton residual here
    if (res < tol) break;

    // dE_m = lam_m dc_m - 3 (u^2)_{m-n} dc_n - 3 (u^2)_{m+n} dconj(c_n)
    std::vector<double> J(nunk * nunk, 0.0);
    auto add_entry = [&](int row, int col, double v) { J[row * nunk + col] += v; };
    for (int m = 0; m <= M; ++m) {
      // complex row index pair (rr, ri); m=0 contributes only the real part
      for (int n = 0; n <= M; ++n) {
        cplx dn(0.0, 0.0), dnc(0.0, 0.0);
        if (n == 0) {
          dn = -3.0 * mode_of(cu2, m) + (m == 0 ? lam[0] : 0.0);
          // c0 is real: derivative wrt the single real unknown
        } else {
          dn = -3.0 * mode_of(cu2, m - n) + (m == n ? cplx(lam[m], 0.0) : cplx(0.0, 0.0));
          dnc = -3.0 * mode_of(cu2, m + n);
        }
        // rows in gauge frame for m==1
        const cplx rot = (m == 1) ? eig : cplx(1.0, 0.0);
        const cplx a = rot * dn;    // multiplies dc_n
        const cplx b = rot * dnc;   // multiplies dconj(c_n)
        int rr, ri;
        if (m == 0) { rr = 0; ri = -1; }
        else if (m == 1) { rr = 1; ri = -1; }
        else { rr = 2 * m - 1; ri = 2 * m; }
        if (n == 0) {
          add_entry(rr, 0, a.real());
          if (ri >= 0) add_entry(ri, 0, a.imag());
        } else {
          const int cr = 2 * n - 1, ci = 2 * n;
          // dc_n = dRe + i dIm ; dconj(c_n) = dRe - i dIm
          add_entry(rr, cr, a.real() + b.real());
          add_entry(rr, ci, -a.imag() + b.imag());
          if (ri >= 0) {
            add_entry(ri, cr, a.imag() + b.imag());
            add_entry(ri, ci, a.real() - b.real());
          }
        }
      }
    }
    // phase row: Im(dc_1 e^{-i gamma}) = -F[2]
    {
      const int row = 2;
      add_entry(row, 1, eig.imag());   // d/dRe c1 of Im(c1 e^{-ig})
      add_entry(row, 2, eig.real());   // d/dIm c1
    }

    std::vector<double> step(F);
    dense_solve(J, step, nunk);
    c[0] -= step[0];
    for (int m = 1; m <= M; ++m) c[m] -= cplx(step[2 * m - 1], step[2 * m]);
  }

  for (int m = 0; m <= M; ++m) {
    prof.modes[M + m] = c[m];
    prof.modes[M - m] = std::conj(c[m]);
  }
  prof.eps = 2.0 * std::abs(c[1]);
  prof.newton_iterations = it;

  // true ODE residual, sup over a fine grid
  const int Qf = 1024;
  double sup = 0.0;
  for (int q = 0; q < Qf; ++q) {
    const double th = kTwoPi * q / Qf;
    cplx acc(0.0, 0.0);
    for (int m = -M; m <= M; ++m) {
      const double qq = 1.0 - om2 * m * m;
      acc += (-qq * qq + delta * delta) * prof.mode(m) * std::exp(cplx(0.0, m * th));
    }
    const double u = prof.eval(th);
    sup = std::max(sup, std::fabs(acc.real() - u * u * u));
  }
  prof.residual = sup;
  if (sup > std::max(tol * 100.0, 1e-9))
    throw RollsError("solve_rolls: Newton failed to reach tolerance", sup);
  return prof;
}

double delta_of(double eps, double Omega, double gamma, double tol) {
  if (eps == 0.0) return 0.0;
  if (eps < 0.0) throw std::invalid_argument("delta_of: eps must be nonnegative");
  auto amp = [&](double d) { return solve_rolls(d, Omega, gamma).eps - eps; };
  double lo = 0.0, flo = -eps;
  double hi = std::min(0.2, 1.2 * eps / std::sqrt(4.0 / 3.0 * (1.0 - Omega * Omega)));
  double fhi = amp(hi);
  int guard = 0;
  while (fhi < 0.0) {
    hi *= 1.3;
    if (hi > 0.2 || ++guard > 12)
      throw std::invalid_argument("delta_of: eps outside bracketable range");
    fhi = amp(hi);
  }
  // bisection with secant refinement
  for (int it = 0; it < 80; ++it) {
    double mid = hi - fhi * (hi - lo) / (fhi - flo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    const double fm = amp(mid);
    if (std::fabs(fm) < tol || hi - lo < tol) return mid;
    if (fm < 0.0) { lo = mid; flo = fm; } else { hi = mid; fhi = fm; }
  }
  return 0.5 * (lo + hi);
}

HamiltonianValue hamiltonian_of_rolls(const PeriodicProfile& p, double eta) {
  const int Q = 1024;
  const double om2 = p.omega * p.omega;
  const double om4 = om2 * om2;
  double mean = 0.0;
  std::vector<double> H(Q);
  for (int q = 0; q < Q; ++q) {
    const double th = kTwoPi * q / Q;
    double V = p.mode(0).real(), V1 = 0.0, V2 = 0.0, V3 = 0.0;
    for (int m = 1; m <= p.mode_count; ++m) {
      const cplx c = p.mode(m);
      const double a = 2.0 * c.real(), b = -2.0 * c.imag();
      const double cs = std::cos(m * th), sn = std::sin(m * th);
      V += a * cs + b * sn;
      V1 += m * (-a * sn + b * cs);
      V2 += m * m * (-a * cs - b * sn);
      V3 += m * m * m * (a * sn - b * cs);
    }
    const double w = 1.0 - eta + V * V;
    H[q] = -0.5 * om4 * V2 * V2 + om2 * V1 * V1 + om4 * V1 * V3 + 0.25 * w * w;
    mean += H[q];
  }
  mean /= Q;
  double dev = 0.0;
  for (double h : H) dev = std::max(dev, std::fabs(h - mean));
  return {mean, dev};
}

} // namespace quenchroll
