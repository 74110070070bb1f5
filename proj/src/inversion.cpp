#include "optlat/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "optlat/errors.hpp"

namespace optlat {

namespace {

double max_norm(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

struct FixedPointResult {
  double n;
  double E;
};

// Damped iteration n <- (1 - rho) n + rho G(n). rho starts at 1/2, doubles
// (up to 1) while the residual decreases and halves when it grows.
FixedPointResult damped_fixed_point(double n,
                                    const std::function<MomentPair(double)>& map,
                                    const InversionSettings& settings) {
  double rho = 0.5;
  double previous = std::numeric_limits<double>::infinity();
  double residual = previous;
  for (int it = 0; it < settings.fixed_point_max_iter; ++it) {
    const MomentPair image = map(n);
    residual = std::abs(image.n - n);
    if (!std::isfinite(image.n) || !std::isfinite(residual)) break;
    if (residual < settings.fixed_point_tol) return {image.n, image.E};
    if (residual < previous) {
      rho = std::min(1.0, 2.0 * rho);
    } else {
      rho = std::max(0.5 * rho, 1e-6);
    }
    previous = residual;
    n = (1.0 - rho) * n + rho * image.n;
  }
  std::ostringstream os;
  os << "self-consistent density iteration did not converge (residual " << residual << ")";
  throw NoConvergence(os.str(), static_cast<std::size_t>(settings.fixed_point_max_iter),
                      residual);
}

}  // namespace

void InversionSettings::validate() const {
  if (!(newton_tol > 0.0)) throw ValidationError("newton_tol must be positive");
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw ValidationError("damping must lie in (0, 1]");
  if (!(fixed_point_tol > 0.0)) throw ValidationError("fixed_point_tol must be positive");
  if (fixed_point_max_iter < 1) throw ValidationError("fixed_point_max_iter must be at least 1");
}

Multipliers invert_moments(const MomentPair& target, const ModelParams& params,
                           const QuadratureSpec& spec, const InversionSettings& settings) {
  settings.validate();
  const double eta = params.eta;
  if (!(target.n > 0.0) || (eta > 0.0 && !(target.n < 1.0 / eta)))
    throw std::invalid_argument("target density outside the admissible range");
  if (!(std::abs(target.E) < 2.0 * params.d * params.eps0 * target.n))
    throw std::invalid_argument("target energy violates |E| < 2 d eps0 n");

  Multipliers lam{std::log(target.n / (1.0 - eta * target.n)), 0.0};
  MomentJacobian J = moment_jacobian(lam, params, spec);
  double residual = max_norm(J.n - target.n, J.E - target.E);

  for (int it = 0; it < settings.max_iter; ++it) {
    if (residual < settings.newton_tol) return lam;
    const double det = J.det();
    if (std::abs(det) < 1e-14) {
      std::ostringstream os;
      os << "moment Jacobian is singular (det " << det << ") at lambda = (" << lam.lambda0
         << ", " << lam.lambda1 << ")";
      throw SingularJacobian(os.str());
    }
    const double rn = J.n - target.n;
    const double rE = J.E - target.E;
    const double step0 = -(J.omega2 * rn - J.omega1 * rE) / det;
    const double step1 = -(-J.omega1 * rn + J.omega0 * rE) / det;

    double length = settings.damping;
    bool accepted = false;
    while (length > 1e-10) {
      const Multipliers trial{lam.lambda0 + length * step0, lam.lambda1 + length * step1};
      const MomentJacobian Jt = moment_jacobian(trial, params, spec);
      const double r = max_norm(Jt.n - target.n, Jt.E - target.E);
      if (std::isfinite(r) && r < residual) {
        lam = trial;
        J = Jt;
        residual = r;
        accepted = true;
        break;
      }
      length *= 0.5;
    }
    if (!accepted) break;
  }
  if (residual < settings.newton_tol) return lam;
  std::ostringstream os;
  os << "moment inversion did not converge (residual " << residual << ")";
  throw NoConvergence(os.str(), static_cast<std::size_t>(settings.max_iter), residual);
}

Multipliers multipliers_from_dual(const DualVariables& mu, double n, const ModelParams& params) {
  return {mu.mu0 + params.U0 * n * mu.mu1, mu.mu1};
}

MomentPair selfconsistent_density(const DualVariables& mu, const ModelParams& params,
                                  const QuadratureSpec& spec,
                                  const InversionSettings& settings) {
  settings.validate();
  const auto map = [&](double n) {
    return moments(multipliers_from_dual(mu, n, params), params, spec);
  };
  const double start = moments(Multipliers{mu.mu0, mu.mu1}, params, spec).n;
  const FixedPointResult r = damped_fixed_point(start, map, settings);
  return {r.n, r.E};
}

DeterminantResult jacobian_det_formula(const DualVariables& mu, const ModelParams& params,
                                       const QuadratureSpec& spec,
                                       const InversionSettings& settings) {
  DeterminantResult out;
  out.density = selfconsistent_density(mu, params, spec, settings);
  out.lambda = multipliers_from_dual(mu, out.density.n, params);
  const MomentJacobian J = moment_jacobian(out.lambda, params, spec);
  out.numerator = J.det();
  out.denominator = 1.0 - params.U0 * mu.mu1 * J.omega0;
  out.near_singular = std::abs(out.denominator) < kNearSingularThreshold;
  out.det = out.numerator / out.denominator;
  return out;
}

MbClosedForms mb_closed_forms(const DualVariables& mu, const ModelParams& params,
                              const InversionSettings& settings, int M) {
  settings.validate();
  if (params.eta != 0.0)
    throw std::invalid_argument("closed forms require Maxwell-Boltzmann statistics (eta = 0)");
  const detail::NodeTables tables(M);
  double I0 = 0.0;
  double I1 = 0.0;
  for (int j = 0; j < M; ++j) {
    const double e = std::exp(-2.0 * params.eps0 * mu.mu1 * tables.cos[j]);
    I0 += e;
    I1 += e * tables.cos[j];
  }
  I0 /= M;
  I1 /= M;
  const int d = params.d;
  const double I0d = std::pow(I0, d);
  const double energy_factor = -2.0 * d * params.eps0 * std::pow(I0, d - 1) * I1;

  const auto map = [&](double n) {
    const double prefactor = std::exp(mu.mu0 + params.U0 * n * mu.mu1);
    return MomentPair{prefactor * I0d, prefactor * energy_factor};
  };
  const FixedPointResult r = damped_fixed_point(std::exp(mu.mu0) * I0d, map, settings);
  return {r.n, r.E, I0, I1};
}

MbNumeratorCheck mb_determinant_numerator(const Multipliers& lam, const ModelParams& params,
                                          const QuadratureSpec& spec) {
  if (params.eta != 0.0)
    throw std::invalid_argument("closed forms require Maxwell-Boltzmann statistics (eta = 0)");
  if (lam.lambda1 == 0.0) throw std::invalid_argument("closed forms need lambda1 != 0");
  const MomentJacobian J = moment_jacobian(lam, params, spec);
  const double d = params.d;
  const double e2 = params.eps0 * params.eps0;
  const double tail = -J.E * J.n / lam.lambda1 - J.E * J.E / d;
  return {J.det(), 4.0 * e2 * d * J.n + tail, 4.0 * e2 * d * J.n * J.n + tail};
}

}  // namespace optlat
