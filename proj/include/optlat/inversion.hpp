#pragma once

// Inversion of the moment map lambda -> (n, E) and the self-consistent
// density map mu -> (n, E) under the interaction potential V = -U0 n.

#include "optlat/kinetics.hpp"

namespace optlat {

struct InversionSettings {
  double newton_tol = 1e-12;       // max-norm of the moment residual
  int max_iter = 50;
  double damping = 1.0;            // initial Newton step length, halved on residual increase
  double fixed_point_tol = 1e-13;
  int fixed_point_max_iter = 2000;

  void validate() const;
};

// Newton iteration on lambda with Jacobian [[w0, w1], [w1, w2]].
// Throws SingularJacobian or NoConvergence.
Multipliers invert_moments(const MomentPair& target, const ModelParams& params,
                           const QuadratureSpec& spec,
                           const InversionSettings& settings = {});

// lambda corresponding to mu at density n: V = -U0 n, mu0 = lambda0 + lambda1 V.
Multipliers multipliers_from_dual(const DualVariables& mu, double n,
                                  const ModelParams& params);

// Solves n = int F(mu0 + U0 n mu1, mu1) dp by damped fixed-point iteration
// and returns (n, E) at the converged multipliers. Throws NoConvergence.
MomentPair selfconsistent_density(const DualVariables& mu, const ModelParams& params,
                                  const QuadratureSpec& spec,
                                  const InversionSettings& settings = {});

struct DeterminantResult {
  double det = 0.0;          // numerator / denominator
  double numerator = 0.0;    // w0 w2 - w1^2
  double denominator = 0.0;  // 1 - U0 mu1 w0
  bool near_singular = false;
  MomentPair density;
  Multipliers lambda;
};

inline constexpr double kNearSingularThreshold = 1e-10;

// Closed-form determinant of d(n, E)/d(mu) at the self-consistent state.
DeterminantResult jacobian_det_formula(const DualVariables& mu, const ModelParams& params,
                                       const QuadratureSpec& spec,
                                       const InversionSettings& settings = {});

struct MbClosedForms {
  double n = 0.0;
  double E = 0.0;
  double I0 = 0.0;  // int exp(-2 eps0 mu1 cos 2 pi p) dp over T
  double I1 = 0.0;  // int exp(-2 eps0 mu1 cos 2 pi p) cos 2 pi p dp over T
};

// Maxwell-Boltzmann (eta = 0) density from the product structure of the
// equilibrium: n = exp(mu0 + U0 n mu1) I0^d, E = -2 d eps0 exp(...) I0^(d-1) I1.
// The one-dimensional integrals use an M-point midpoint rule.
MbClosedForms mb_closed_forms(const DualVariables& mu, const ModelParams& params,
                              const InversionSettings& settings = {}, int M = 64);

// Maxwell-Boltzmann determinant numerator w0 w2 - w1^2 at lambda, by
// quadrature and by the two closed forms in circulation (density to the
// first and to the second power in the leading term).
struct MbNumeratorCheck {
  double quadrature = 0.0;
  double linear_n = 0.0;     // 4 eps0^2 d n   - E n / mu1 - E^2 / d
  double quadratic_n = 0.0;  // 4 eps0^2 d n^2 - E n / mu1 - E^2 / d
};

MbNumeratorCheck mb_determinant_numerator(const Multipliers& lam, const ModelParams& params,
                                          const QuadratureSpec& spec);

}  // namespace optlat
