#pragma once
// Sharp frequency-band projections around the carrier frequencies and the
// recentering / blow-up maps between the fast grid and the slow envelope grid.

#include "quenchroll/field.hpp"

namespace quenchroll {

struct FrequencyBand {
  std::vector<double> centers{-1.0, +1.0};
  double radius = 0.0;

  void validate() const;
  bool contains(double xi) const {
    for (double c : centers)
      if (std::fabs(xi - c) <= radius + 1e-12) return true;
    return false;
  }
};

SpectralField project_near(const SpectralField& f, const FrequencyBand& band);
SpectralField project_far(const SpectralField& f, const FrequencyBand& band);

// Recentered projection at carrier sign*1: output coefficients
// out(xi~) = 1_{|xi~|<=radius} coeff(sign + xi~) on the same (fast) grid.
SpectralField project_near_pm(const SpectralField& f, const FrequencyBand& band, int sign);

struct EnvelopePair {
  GridSpec slow;                 // half-length eps*L
  std::vector<cplx> g_minus;     // coefficients, slow bins
  std::vector<cplx> g_plus;
  int band_bins = 0;             // coefficients vanish for |k| > band_bins
};

// g_{+-}(k) = v_near_hat(+-1 + eps xi_k); rejects fields with energy outside
// the near band above `leak_tol` (relative).
EnvelopePair extract_g(const SpectralField& v_near, double eps, const FrequencyBand& band,
                       int slow_points, double leak_tol = 1e-8);

SpectralField assemble_vnear(const GridSpec& fast, const EnvelopePair& pair, double eps);

struct MultiplierFloor {
  double measured_min = 0.0;
  double bound = 0.0;   // C eps^{2 tau}
  bool bound_ok = false;
  double argmin_freq = 0.0;
};

// Minimum of |m(kappa)| over far-region grid frequencies.
MultiplierFloor multiplier_floor(const GridSpec& g, const FrequencyBand& band, double omega,
                                 double tau, double eps, double C);

} // namespace quenchroll
