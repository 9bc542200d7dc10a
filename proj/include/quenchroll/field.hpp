#pragma once
// Periodic-box sampling of real-line functions with cached Fourier
// coefficients in the continuum convention
//   coeff(xi_k) = dx * sum_j samples(x_j) e^{-i xi_k x_j},
//   samples(x_j) = (dxi / 2pi) * sum_k coeff(xi_k) e^{+i xi_k x_j},
// for x_j = -L + j dx and xi_k = k dxi, k = -N/2 .. N/2-1.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace quenchroll {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct GridSpec {
  double half_length = 0.0;  // L
  int point_count = 0;       // N
  double dx = 0.0;
  double dxi = 0.0;
  bool carrier_aligned = true;  // L is an integer multiple of 2 pi

  GridSpec() = default;

  // Fast grid: L = 2 pi ell so the +-1 carriers land on frequency bins.
  static GridSpec box(int ell, int n_points);

  // Slow grid companion of a fast grid: half-length eps*L, so that slow bin k
  // maps onto fast bin (carrier + k) exactly.
  static GridSpec slow_of(const GridSpec& fast, double eps, int n_points);

  double x(int j) const { return -half_length + dx * j; }
  double xi(int k) const { return dxi * k; }
  // Array position <-> signed bin index.
  int bin(int pos) const { return pos - point_count / 2; }
  int pos(int k) const { return k + point_count / 2; }
  // Position of the bin holding frequency f; throws if f is off-grid.
  int pos_of_freq(double f, double tol = 1e-9) const;

  bool operator==(const GridSpec& o) const {
    return half_length == o.half_length && point_count == o.point_count;
  }
};

class SpectralField {
 public:
  SpectralField() = default;

  static SpectralField zero(const GridSpec& g);
  static SpectralField from_samples(const GridSpec& g, std::vector<cplx> s);
  static SpectralField from_real_samples(const GridSpec& g, const std::vector<double>& s);
  static SpectralField from_coeffs(const GridSpec& g, std::vector<cplx> c);

  const GridSpec& grid() const { return grid_; }
  const std::vector<cplx>& samples() const { return samples_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  bool is_real() const { return is_real_; }

  cplx coeff_at_bin(int k) const { return coeffs_[grid_.pos(k)]; }

  std::vector<double> real_samples() const;
  double max_imag() const;

  // ( sum_k (1+|xi_k|^2)^s |coeff_k|^2 dxi )^{1/2}
  double sobolev_norm(double s) const;
  // plain L2(dx) norm of the samples
  double l2_norm() const;
  double sup_norm() const;

 private:
  GridSpec grid_;
  std::vector<cplx> samples_;
  std::vector<cplx> coeffs_;
  bool is_real_ = false;
};

// Transform a sample vector to coefficients on grid g (and back). These are
// the primitives SpectralField uses; exposed for hot loops that manage their
// own buffers.
std::vector<cplx> forward_transform(const GridSpec& g, const std::vector<cplx>& samples);
std::vector<cplx> inverse_transform(const GridSpec& g, const std::vector<cplx>& coeffs);

// Symbol of the linearized operator: m(kappa) = -(1 - omega^2 kappa^2)^2.
inline double she_multiplier(double kappa, double omega) {
  const double q = 1.0 - omega * omega * kappa * kappa;
  return -q * q;
}

double sobolev_norm(const GridSpec& g, const std::vector<cplx>& coeffs, double s);

} // namespace quenchroll
