#include "quenchroll/field.hpp"

#include <cmath>

#include "quenchroll/fft.hpp"
#include "quenchroll/kernels.hpp"

namespace quenchroll {

GridSpec GridSpec::box(int ell, int n_points) {
  if (ell <= 0) throw std::invalid_argument("GridSpec: L/(2pi) must be a positive integer");
  if (n_points < 2 || !fft::is_pow2(static_cast<std::size_t>(n_points)))
    throw std::invalid_argument("GridSpec: point count must be a power of two");
  GridSpec g;
  g.half_length = kTwoPi * ell;
  g.point_count = n_points;
  g.dx = 2.0 * g.half_length / n_points;
  g.dxi = kPi / g.half_length;
  g.carrier_aligned = true;
  if (g.dx >= kPi / 8.0)
    throw std::invalid_argument("GridSpec: dx must resolve the carrier (dx < pi/8)");
  return g;
}

GridSpec GridSpec::slow_of(const GridSpec& fast, double eps, int n_points) {
  if (!(eps > 0.0)) throw std::invalid_argument("GridSpec: eps must be positive");
  if (n_points < 2 || !fft::is_pow2(static_cast<std::size_t>(n_points)))
    throw std::invalid_argument("GridSpec: point count must be a power of two");
  GridSpec g;
  g.half_length = eps * fast.half_length;
  g.point_count = n_points;
  g.dx = 2.0 * g.half_length / n_points;
  g.dxi = kPi / g.half_length;
  g.carrier_aligned = false;
  return g;
}

int GridSpec::pos_of_freq(double f, double tol) const {
  const double kf = f / dxi;
  const int k = static_cast<int>(std::lround(kf));
  if (std::fabs(kf - k) > tol)
    throw std::invalid_argument("GridSpec: frequency " + std::to_string(f) + " is off-grid");
  if (k < -point_count / 2 || k >= point_count / 2)
    throw std::invalid_argument("GridSpec: frequency beyond Nyquist");
  return pos(k);
}

namespace {

// (-1)^k phase from the -L sample offset, applied in array-position order.
inline double alt_sign(int k) { return (k & 1) ? -1.0 : 1.0; }

} // namespace

std::vector<cplx> forward_transform(const GridSpec& g, const std::vector<cplx>& samples) {
  const int n = g.point_count;
  std::vector<cplx> work(samples);
  fft::forward(work);
  std::vector<cplx> coeffs(n);
  for (int p = 0; p < n; ++p) {
    const int k = g.bin(p);
    const int idx = (k + n) % n;
    coeffs[p] = g.dx * alt_sign(k) * work[idx];
  }
  return coeffs;
}

std::vector<cplx> inverse_transform(const GridSpec& g, const std::vector<cplx>& coeffs) {
  const int n = g.point_count;
  std::vector<cplx> work(n);
  for (int p = 0; p < n; ++p) {
    const int k = g.bin(p);
    const int idx = (k + n) % n;
    work[idx] = alt_sign(k) * coeffs[p];
  }
  fft::inverse(work);
  const double scale = g.dxi / kTwoPi;
  for (auto& v : work) v *= scale;
  return work;
}

SpectralField SpectralField::zero(const GridSpec& g) {
  SpectralField f;
  f.grid_ = g;
  f.samples_.assign(g.point_count, cplx(0.0, 0.0));
  f.coeffs_.assign(g.point_count, cplx(0.0, 0.0));
  f.is_real_ = true;
  return f;
}

SpectralField SpectralField::from_samples(const GridSpec& g, std::vector<cplx> s) {
  if (static_cast<int>(s.size()) != g.point_count)
    throw std::invalid_argument("SpectralField: sample count mismatch");
  SpectralField f;
  f.grid_ = g;
  f.coeffs_ = forward_transform(g, s);
  f.samples_ = std::move(s);
  f.is_real_ = f.max_imag() < 1e-12;
  return f;
}

SpectralField SpectralField::from_real_samples(const GridSpec& g, const std::vector<double>& s) {
  std::vector<cplx> c(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) c[i] = cplx(s[i], 0.0);
  SpectralField f = from_samples(g, std::move(c));
  f.is_real_ = true;
  return f;
}

SpectralField SpectralField::from_coeffs(const GridSpec& g, std::vector<cplx> c) {
  if (static_cast<int>(c.size()) != g.point_count)
    throw std::invalid_argument("SpectralField: coefficient count mismatch");
  SpectralField f;
  f.grid_ = g;
  f.samples_ = inverse_transform(g, c);
  f.coeffs_ = std::move(c);
  f.is_real_ = f.max_imag() < 1e-12 * (1.0 + f.sup_norm());
  return f;
}

std::vector<double> SpectralField::real_samples() const {
  std::vector<double> r(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) r[i] = samples_[i].real();
  return r;
}

double SpectralField::max_imag() const {
  double m = 0.0;
  for (const auto& v : samples_) m = std::max(m, std::fabs(v.imag()));
  return m;
}

double SpectralField::sobolev_norm(double s) const {
  return quenchroll::sobolev_norm(grid_, coeffs_, s);
}

double sobolev_norm(const GridSpec& g, const std::vector<cplx>& coeffs, double s) {
  double acc = 0.0;
  if (s == 0.0) {
    std::vector<double> w(coeffs.size(), 1.0);
    acc = kernels::weighted_abs2_sum(coeffs.data(), w.data(), coeffs.size());
  } else {
    std::vector<double> w(coeffs.size());
    for (std::size_t p = 0; p < coeffs.size(); ++p) {
      const double xi = g.xi(g.bin(static_cast<int>(p)));
      w[p] = std::pow(1.0 + xi * xi, s);
    }
    acc = kernels::weighted_abs2_sum(coeffs.data(), w.data(), coeffs.size());
  }
  return std::sqrt(acc * g.dxi);
}

double SpectralField::l2_norm() const {
  double acc = 0.0;
  for (const auto& v : samples_) acc += std::norm(v);
  return std::sqrt(acc * grid_.dx);
}

double SpectralField::sup_norm() const {
  double m = 0.0;
  for (const auto& v : samples_) m = std::max(m, std::abs(v));
  return m;
}

} // namespace quenchroll
