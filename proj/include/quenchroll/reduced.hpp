#pragma once
// Assembly of the localized forcing h_*, the reduced two-component operator R
// and its constant-coefficient approximation R0, and the envelope fixed point
// for (g_{-1}, g_{+1}).

#include "quenchroll/corrector.hpp"

namespace quenchroll {

struct GammaTerms {
  std::vector<cplx> gamma1;       // F[chi (chi^2 - 1)] on slow bins
  std::vector<cplx> gamma2;       // F[chi'']
  std::vector<cplx> gamma3_plus;  // F[1_{[0,inf)} chi e^{-i ./eps} cos(./eps + gamma)]
  std::vector<cplx> gamma3_minus;
};

GammaTerms gamma_terms(const QuenchContext& ctx);

struct HStar {
  std::vector<cplx> minus;  // band-restricted coefficients on slow bins
  std::vector<cplx> plus;
  double norm = 0.0;        // combined L2(dxi) norm
};

HStar h_star(const QuenchContext& ctx);

struct CoefficientPair {
  std::vector<cplx> minus, plus;
};

// R[g]_{+-} = -4 xi^2 g_{+-} - 1_band [ 3 pi g_{+-} + (3 pi / 2) g_{-+} - F[mu g_{+-}] ]
CoefficientPair apply_R(const QuenchContext& ctx, const CoefficientPair& g);

// R0[g]_{+-} = -4 xi^2 g_{+-} - 3 pi g_{+-} - (3 pi / 2) g_{-+} + F[mu g_{+-}]
// (spectral application, for tests and the Neumann diagnostic)
CoefficientPair apply_R0(const QuenchContext& ctx, const CoefficientPair& g);

// Direct solve of (4 d^2 - 3 pi + mu) g_{+-} - (3 pi / 2) g_{-+} = rhs_{+-}
// with a second-order finite-difference discretization on the slow grid
// (Dirichlet ends; the two symmetric channels decouple into tridiagonal solves).
CoefficientPair solve_R0(const QuenchContext& ctx, const CoefficientPair& rhs_physical);

// Smallest eigenvalue of the symmetrized discrete form of -R0 (inverse power
// iteration on the decoupled channels).
double coercivity_min_eigenvalue(const QuenchContext& ctx, int* channel = nullptr);

// Fixed point for the envelope pair; implements
//   g <- (R0)^{-1} [ (R0 - R) g + 1_band h_* + Q(g) ]
// with Q kept numerically exact, in the equivalent residual-correction form
//   g <- g + (R0)^{-1} ( T(g) - M g ),
// T being the exact band-projected, recentered nonlinearity / eps^2.
CorrectorState reduced_fixed_point(const QuenchContext& ctx);

} // namespace quenchroll
