#pragma once
// Quenched-problem configuration, precomputed grid data, the four
// nonlinearities, and the far-component contraction map.

#include <memory>

#include "quenchroll/bands.hpp"
#include "quenchroll/envelope.hpp"
#include "quenchroll/field.hpp"
#include "quenchroll/rolls.hpp"

namespace quenchroll {

struct QuenchConfig {
  double delta = 0.05;
  double Omega = 0.0;
  double gamma = 0.0;
  double tau = 0.25;
  double beta = 1.0;  // matching exponent; the construction requires 1

  int grid_ell = 0;  // L = 2 pi ell; 0 = choose from eps
  int grid_N = 0;    // 0 = choose from L at dx ~ 0.06
  int slow_N = 512;
  int rolls_modes = 16;
  double slow_halfwidth_target = 14.0;  // desired eps*L when auto-sizing

  double C_multiplier = 0.5;
  double ball_R = 16.0;

  double fixed_point_tol = 1e-10;
  double newton_tol = 1e-12;
  double reduced_tol = 5e-9;
  double select_tol = 1e-6;
  int max_far_iter = 400;
  int max_reduced_iter = 4000;
  // Anderson mixing depth for the reduced solve; 0 gives the plain
  // preconditioned Picard map. The iteration has an intrinsic near-neutral
  // low-frequency mode (the solution-family direction), so plain Picard
  // contracts at ~0.99 and mixing is on by default.
  int reduced_accel_depth = 3;

  double env_c = 11.542926227897089;  // 3 pi sqrt(3/2); monotone front regime
  double env_S = 60.0;
  int env_n = 8192;
  double env_shift = 0.0;
  double env_tol = 1e-10;

  double sim_dt = 0.05;
  double sim_T = 10.0;
  unsigned long seed = 20260810u;
  int threads = 0;  // 0 = hardware_concurrency, capped by QUENCHROLL_THREADS

  void validate() const;          // throws std::invalid_argument
  std::vector<std::string> warnings() const;

  int auto_ell(double eps) const;
  int auto_N(int ell) const;
};

struct NonContractionError : std::runtime_error {
  std::vector<double> ratios;
  NonContractionError(const std::string& m, std::vector<double> r)
      : std::runtime_error(m), ratios(std::move(r)) {}
};

// Everything the corrector and reduced solves share: grids, roll and envelope
// samples, multiplier tables, and band bookkeeping.
class QuenchContext {
 public:
  QuenchContext(const QuenchConfig& cfg, std::shared_ptr<const EnvelopeProfile> env);

  const QuenchConfig& cfg() const { return cfg_; }
  const GridSpec& grid() const { return grid_; }
  const GridSpec& slow_grid() const { return slow_; }
  const FrequencyBand& band() const { return band_; }
  const PeriodicProfile& rolls() const { return rolls_; }
  const EnvelopeProfile& envelope() const { return *env_; }
  double eps() const { return eps_; }
  double omega() const { return omega_; }
  int band_bins() const { return band_bins_; }
  int pos_plus() const { return pos_plus_; }
  int pos_minus() const { return pos_minus_; }
  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& slow_mu() const { return slow_mu_; }
  const std::vector<double>& multiplier() const { return m_; }
  const std::vector<char>& far_mask() const { return far_mask_; }
  // recentered multiplier / eps^2 on slow bins
  const std::vector<double>& M_plus() const { return M_plus_; }
  const std::vector<double>& M_minus() const { return M_minus_; }
  const std::vector<double>& chi() const { return chi_; }
  const std::vector<double>& roll_samples() const { return u_r_; }

  // N^(j)[v] for j = 1..4 (j = 4 ignores v)
  std::vector<double> nonlinearity(int j, const std::vector<double>& v) const;
  // sum_j N^(j)[v]
  std::vector<double> nonlinearity_sum(const std::vector<double>& v) const;
  const std::vector<double>& forcing_n4() const { return n4_; }

  MultiplierFloor multiplier_floor_check() const;

 private:
  QuenchConfig cfg_;
  std::shared_ptr<const EnvelopeProfile> env_;
  PeriodicProfile rolls_;
  double eps_ = 0.0, omega_ = 1.0;
  GridSpec grid_, slow_;
  FrequencyBand band_;
  int band_bins_ = 0, pos_plus_ = 0, pos_minus_ = 0;
  std::vector<double> mu_, slow_mu_, m_;
  std::vector<char> far_mask_;
  std::vector<double> M_plus_, M_minus_;
  std::vector<double> u_r_, u_r1_, u_r2_, u_r3_;
  std::vector<double> chi_, chi1_, chi2_, chi3_, chi4_;  // eps-scaled derivatives
  std::vector<double> n4_;
};

struct CorrectorState {
  SpectralField g_minus, g_plus;  // slow-grid envelope components
  SpectralField v_near, v_far;    // fast-grid fields
  int iterations = 0;             // reduced-solve iterations
  int far_iterations = 0;
  std::vector<double> update_norms;               // per-step ||dg||_H2
  std::vector<double> contraction_estimates;      // reduced solve
  std::vector<double> far_contraction_estimates;  // last far solve
  double reduced_residual = 0.0;  // || T - M g || at return
  double h_star_norm = 0.0;
  double q_consistency = 0.0;     // || (R g - h) - Q ||
  double neumann_ratio = 0.0;     // || R0^{-1} (R - R0) g || / || g ||  (H2)
};

struct FarSolveResult {
  std::vector<double> v_far;  // real samples
  std::vector<cplx> v_far_hat;
  std::vector<cplx> nsum_hat;  // transform of sum_j N^(j) at the last iterate
  int iterations = 0;
  std::vector<double> contraction_estimates;
};

// Picard iteration v_far <- F^{-1}[ far-mask . F[sum_j N^(j)(v_near + v_far)] / m ].
FarSolveResult far_fixed_point(const QuenchContext& ctx, const std::vector<double>& v_near,
                               const std::vector<double>* warm_start = nullptr,
                               double tol_override = 0.0);

SpectralField corrector_v_near_field(const QuenchContext& ctx, const EnvelopePair& pair);

// || L[v] - sum_j N^(j)[v] ||_{L2} over the seam-guarded interior window.
double bifurcation_residual(const QuenchContext& ctx, const std::vector<double>& v);

struct DecayTails {
  double left = 0.0;   // max |d^j v|, j=0..3, over the outer window (left)
  double right = 0.0;
};
DecayTails decay_check(const SpectralField& v);

} // namespace quenchroll
