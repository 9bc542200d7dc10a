#include "quenchroll/bands.hpp"

#include <cmath>
#include <limits>

namespace quenchroll {

void FrequencyBand::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("FrequencyBand: radius must be positive");
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if (std::fabs(centers[i] - centers[j]) <= 2.0 * radius)
        throw std::invalid_argument("FrequencyBand: bands overlap (radius too large)");
}

namespace {

std::vector<cplx> masked_coeffs(const SpectralField& f, const FrequencyBand& band, bool keep_near) {
  const GridSpec& g = f.grid();
  std::vector<cplx> c(f.coeffs());
  for (int p = 0; p < g.point_count; ++p) {
    const bool near = band.contains(g.xi(g.bin(p)));
    if (near != keep_near) c[p] = cplx(0.0, 0.0);
  }
  return c;
}

} // namespace

SpectralField project_near(const SpectralField& f, const FrequencyBand& band) {
  band.validate();
  return SpectralField::from_coeffs(f.grid(), masked_coeffs(f, band, true));
}

SpectralField project_far(const SpectralField& f, const FrequencyBand& band) {
  band.validate();
  return SpectralField::from_coeffs(f.grid(), masked_coeffs(f, band, false));
}

SpectralField project_near_pm(const SpectralField& f, const FrequencyBand& band, int sign) {
  const GridSpec& g = f.grid();
  const int pc = g.pos_of_freq(static_cast<double>(sign));
  std::vector<cplx> out(g.point_count, cplx(0.0, 0.0));
  for (int p = 0; p < g.point_count; ++p) {
    const double xi = g.xi(g.bin(p));
    if (std::fabs(xi) > band.radius + 1e-12) continue;
    const int src = pc + g.bin(p);
    if (src < 0 || src >= g.point_count) continue;
    out[p] = f.coeffs()[src];
  }
  return SpectralField::from_coeffs(g, std::move(out));
}

EnvelopePair extract_g(const SpectralField& v_near, double eps, const FrequencyBand& band,
                       int slow_points, double leak_tol) {
  const GridSpec& g = v_near.grid();
  EnvelopePair pair;
  pair.slow = GridSpec::slow_of(g, eps, slow_points);
  pair.band_bins = static_cast<int>(std::floor((band.radius + 1e-12) / g.dxi));
  if (pair.band_bins >= slow_points / 2)
    throw std::invalid_argument("extract_g: slow grid too coarse for the band");

  // energy outside the near band must be negligible
  double inside = 0.0, outside = 0.0;
  for (int p = 0; p < g.point_count; ++p) {
    const double e = std::norm(v_near.coeffs()[p]);
    if (band.contains(g.xi(g.bin(p)))) inside += e; else outside += e;
  }
  if (outside > leak_tol * (inside + 1e-300))
    throw std::invalid_argument("extract_g: field has energy outside the near band");

  const int pp = g.pos_of_freq(+1.0);
  const int pm = g.pos_of_freq(-1.0);
  pair.g_plus.assign(slow_points, cplx(0.0, 0.0));
  pair.g_minus.assign(slow_points, cplx(0.0, 0.0));
  for (int k = -pair.band_bins; k <= pair.band_bins; ++k) {
    pair.g_plus[pair.slow.pos(k)] = v_near.coeffs()[pp + k];
    pair.g_minus[pair.slow.pos(k)] = v_near.coeffs()[pm + k];
  }
  return pair;
}

SpectralField assemble_vnear(const GridSpec& fast, const EnvelopePair& pair, double eps) {
  (void)eps;
  const int pp = fast.pos_of_freq(+1.0);
  const int pm = fast.pos_of_freq(-1.0);
  std::vector<cplx> c(fast.point_count, cplx(0.0, 0.0));
  for (int k = -pair.band_bins; k <= pair.band_bins; ++k) {
    c[pp + k] = pair.g_plus[pair.slow.pos(k)];
    c[pm + k] = pair.g_minus[pair.slow.pos(k)];
  }
  return SpectralField::from_coeffs(fast, std::move(c));
}

MultiplierFloor multiplier_floor(const GridSpec& g, const FrequencyBand& band, double omega,
                                 double tau, double eps, double C) {
  MultiplierFloor r;
  r.bound = C * std::pow(eps, 2.0 * tau);
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p < g.point_count; ++p) {
    const double xi = g.xi(g.bin(p));
    if (band.contains(xi)) continue;
    const double m = std::fabs(she_multiplier(xi, omega));
    if (m < best) {
      best = m;
      r.argmin_freq = xi;
    }
  }
  r.measured_min = best;
  r.bound_ok = best >= r.bound;
  return r;
}

} // namespace quenchroll
