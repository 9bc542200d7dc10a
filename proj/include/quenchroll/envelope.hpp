#pragma once
// Front solutions chi of  -4 pi chi'' + (3 pi / 4)(chi^3 - chi) - c chi' = 0
// with chi(-inf) = 1, chi(+inf) = 0 and phase normalization chi(0) = 1/2.
//
// For speeds at or above the monotone threshold c >= 2 pi sqrt(3) the front is
// computed in phase-plane variables p(u) = chi' as a function of u = chi,
// which removes the translation invariance; chi(x) is then reconstructed by
// quadrature and extended by two-term exponential tails. Below the threshold
// the front spirals into 0 and a Levenberg-Marquardt collocation fallback is
// used (best effort, with range warnings).

#include <stdexcept>
#include <string>
#include <vector>

namespace quenchroll {

inline constexpr double kMonotoneSpeed = 10.882796185405306;  // 2 pi sqrt(3)

struct EnvelopeError : std::runtime_error {
  std::vector<double> residual_history;
  EnvelopeError(const std::string& msg, std::vector<double> hist)
      : std::runtime_error(msg), residual_history(std::move(hist)) {}
};

class EnvelopeProfile {
 public:
  double speed() const { return c_; }
  double shift() const { return shift_; }
  double window() const { return S_; }
  int sample_count() const { return n_; }

  // chi and derivatives at arbitrary slow coordinate (tail-extended);
  // the stored shift is applied: value(X) = chi_base(X + shift).
  double value(double X) const;
  double d1(double X) const;
  double d2(double X) const;
  double d3(double X) const;
  double d4(double X) const;

  double residual() const { return residual_; }
  double solver_residual() const { return solver_residual_; }
  int iterations() const { return iterations_; }
  double min_chi() const { return min_chi_; }
  bool range_warning() const { return range_warning_; }
  bool monotone_branch() const { return monotone_branch_; }

  double decay_rate_left() const { return fit_rate_left_; }
  double decay_rate_right() const { return fit_rate_right_; }
  double fit_r2_left() const { return fit_r2_left_; }
  double fit_r2_right() const { return fit_r2_right_; }

  // integral of chi'^2 over the line (energy identity: c * this = 3 pi / 16)
  double gradient_energy() const { return grad_energy_; }

  friend EnvelopeProfile solve_envelope(double c, double S, int n, double tol);
  friend EnvelopeProfile shift_envelope(const EnvelopeProfile& p, double tau_x);

 private:
  double c_ = 0.0, S_ = 60.0, shift_ = 0.0;
  int n_ = 0;
  // uniform lookup table on [x_lo_, x_hi_]
  double x_lo_ = 0.0, x_hi_ = 0.0, hx_ = 0.0;
  std::vector<double> tab_chi_, tab_d1_;
  // tails: chi ~ ar1 e^{lr1 (X - x_hi)} + ar2 e^{lr2 (X - x_hi)} on the right,
  //        1 - chi ~ al1 e^{ll1 (X - x_lo)} + al2 e^{ll2 (X - x_lo)} on the left
  double lr1_ = 0, lr2_ = 0, ar1_ = 0, ar2_ = 0;
  double ll1_ = 0, ll2_ = 0, al1_ = 0, al2_ = 0;
  double residual_ = 0.0, solver_residual_ = 0.0, grad_energy_ = 0.0;
  double min_chi_ = 0.0;
  double fit_rate_left_ = 0, fit_rate_right_ = 0, fit_r2_left_ = 0, fit_r2_right_ = 0;
  int iterations_ = 0;
  bool range_warning_ = false, monotone_branch_ = true;

  void fit_tails();
  double base_value(double x) const;
  double base_d1(double x) const;
};

EnvelopeProfile solve_envelope(double c, double S = 60.0, int n = 8192, double tol = 1e-10);

EnvelopeProfile shift_envelope(const EnvelopeProfile& p, double tau_x);

// || 1_{[0,inf)} chi(. + shift) cos(./eps +- gamma) ||_{L2}; sign picks +-.
double gamma3_norm(const EnvelopeProfile& p, double eps, double gamma, int sign = +1);

} // namespace quenchroll
