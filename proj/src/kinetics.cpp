#include "optlat/kinetics.hpp"

#include <algorithm>
#include <sstream>

#include "optlat/errors.hpp"

namespace optlat {

namespace {

constexpr double kExpClamp = 700.0;

// Neumaier compensated summation; the node sums reach thousands of terms.
struct Sum {
  double s = 0.0;
  double c = 0.0;

  void operator+=(double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

void require_matching_dimension(const ModelParams& params, const QuadratureSpec& spec) {
  if (params.d != spec.d) {
    std::ostringstream os;
    os << "quadrature dimension " << spec.d << " does not match model dimension " << params.d;
    throw std::invalid_argument(os.str());
  }
}

// Calls visit(eps, u) at every quadrature node, u pointing at d velocity
// components. Returns the node weight 1/M^d.
template <class Visitor>
double sweep(const ModelParams& params, const QuadratureSpec& spec, Visitor&& visit) {
  require_matching_dimension(params, spec);
  spec.validate();
  const detail::NodeTables tables(spec.M);
  const int M = spec.M;
  const int d = spec.d;
  const double speed = 4.0 * kPi * params.eps0;
  std::array<int, 3> idx{0, 0, 0};
  std::array<double, 3> u{0.0, 0.0, 0.0};
  const std::uint64_t total = spec.evaluations();
  for (std::uint64_t count = 0; count < total; ++count) {
    double cos_sum = 0.0;
    for (int k = 0; k < d; ++k) {
      cos_sum += tables.cos[idx[k]];
      u[k] = speed * tables.sin[idx[k]];
    }
    visit(-2.0 * params.eps0 * cos_sum, u.data());
    for (int k = 0; k < d; ++k) {
      if (++idx[k] < M) break;
      idx[k] = 0;
    }
  }
  return 1.0 / static_cast<double>(total);
}

// F (1 - eta F) written without cancellation for F close to 1/eta.
double occupation_weight(const Multipliers& lam, double energy, double eta) {
  const double x = std::clamp(-lam.lambda0 - lam.lambda1 * energy, -kExpClamp, kExpClamp);
  const double e = std::exp(x);
  const double denom = eta + e;
  return e / (denom * denom);
}

// (1/eta) log(1 + eta e^x) for eta > 0.
double scaled_softplus(double x, double eta) {
  // log(1 + eta e^x) / eta; the branch point eta e^x = 1 keeps log1p's argument below one
  const double y = x + std::log(eta);
  if (y > 0.0) return (y + std::log1p(std::exp(-y))) / eta;
  return std::log1p(eta * std::exp(x)) / eta;
}

}  // namespace

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (d < 1 || d > 3) fail("model.d must satisfy 1 <= d <= 3");
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) fail("model.eps0 must be positive");
  if (!(U0 >= 0.0) || !std::isfinite(U0)) fail("model.U0 must be nonnegative");
  if (!(eta >= 0.0 && eta <= 1.0)) fail("model.eta must lie in [0, 1]");
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) fail("model.tau0 must be positive");
  if (!(delta > 0.0 && delta < 1.0 / (1.0 + eta)))
    fail("model.delta must satisfy 0 < delta < 1/(1+eta)");
}

void QuadratureSpec::validate() const {
  if (d < 1 || d > 3) throw std::invalid_argument("quadrature dimension must be 1..3");
  if (M < 4 || M % 2 != 0)
    throw std::invalid_argument("quadrature needs an even point count M >= 4");
  if (evaluations() > kMaxEvaluations)
    throw std::invalid_argument("quadrature budget exceeds 2^24 evaluations");
}

std::uint64_t QuadratureSpec::evaluations() const {
  std::uint64_t total = 1;
  for (int k = 0; k < d; ++k) {
    total *= static_cast<std::uint64_t>(M);
    if (total > kMaxEvaluations) return kMaxEvaluations + 1;
  }
  return total;
}

detail::NodeTables::NodeTables(int M) : cos(M), sin(M) {
  const int half = M / 2;
  for (int j = 0; j < half / 2; ++j) {
    const double x = 2.0 * kPi * (j + 0.5) / M;
    cos[j] = std::cos(x);
    sin[j] = std::sin(x);
    cos[half - 1 - j] = -cos[j];
    sin[half - 1 - j] = sin[j];
  }
  if (half % 2 == 1) {
    cos[half / 2] = 0.0;
    sin[half / 2] = 1.0;
  }
  for (int j = 0; j < half; ++j) {
    cos[M - 1 - j] = cos[j];
    sin[M - 1 - j] = -sin[j];
  }
}

double band_energy(Point p, const ModelParams& params) {
  double s = 0.0;
  for (double pi : p) s += std::cos(2.0 * kPi * pi);
  return -2.0 * params.eps0 * s;
}

std::vector<double> velocity(Point p, const ModelParams& params) {
  std::vector<double> u(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    u[i] = 4.0 * kPi * params.eps0 * std::sin(2.0 * kPi * p[i]);
  return u;
}

double equilibrium_at(const Multipliers& lam, double energy, double eta) {
  const double x = std::clamp(-lam.lambda0 - lam.lambda1 * energy, -kExpClamp, kExpClamp);
  return 1.0 / (eta + std::exp(x));
}

double equilibrium(const Multipliers& lam, Point p, const ModelParams& params) {
  return equilibrium_at(lam, band_energy(p, params), params.eta);
}

MomentPair moments(const Multipliers& lam, const ModelParams& params,
                   const QuadratureSpec& spec) {
  Sum n;
  Sum E;
  const double w = sweep(params, spec, [&](double eps, const double*) {
    const double F = equilibrium_at(lam, eps, params.eta);
    n += F;
    E += F * eps;
  });
  return {n.value() * w, E.value() * w};
}

double omega(const Multipliers& lam, int i, const ModelParams& params,
             const QuadratureSpec& spec) {
  if (i < 0 || i > 4) throw std::invalid_argument("omega index must be in 0..4");
  Sum s;
  const double w = sweep(params, spec, [&](double eps, const double*) {
    s += occupation_weight(lam, eps, params.eta) * std::pow(eps, i);
  });
  return s.value() * w;
}

double gamma(const Multipliers& lam, int i, const ModelParams& params,
             const QuadratureSpec& spec) {
  if (i < 0 || i > 2) throw std::invalid_argument("gamma index must be in 0..2");
  Sum s;
  const int d = params.d;
  const double w = sweep(params, spec, [&](double eps, const double* u) {
    double grad_sq = 0.0;
    for (int k = 0; k < d; ++k) grad_sq += u[k] * u[k];
    s += std::pow(eps, i) * grad_sq * occupation_weight(lam, eps, params.eta);
  });
  return s.value() * w;
}

MomentJacobian moment_jacobian(const Multipliers& lam, const ModelParams& params,
                               const QuadratureSpec& spec) {
  Sum n, E, w0, w1, w2;
  const double w = sweep(params, spec, [&](double eps, const double*) {
    const double F = equilibrium_at(lam, eps, params.eta);
    const double g = occupation_weight(lam, eps, params.eta);
    n += F;
    E += F * eps;
    w0 += g;
    w1 += g * eps;
    w2 += g * eps * eps;
  });
  MomentJacobian J;
  J.n = n.value() * w;
  J.E = E.value() * w;
  J.omega0 = w0.value() * w;
  J.omega1 = w1.value() * w;
  J.omega2 = w2.value() * w;
  return J;
}

Eigen::MatrixXd diffusion_matrix(const Multipliers& lam, double tau,
                                 const ModelParams& params,
                                 const QuadratureSpec& spec) {
  if (!(tau > 0.0)) throw std::invalid_argument("relaxation time must be positive");
  const int d = params.d;
  // blocks[m](k, l) accumulates int u_k u_l F(1 - eta F) eps^m, m = i + j.
  Sum blocks[3][3][3];
  const double w = sweep(params, spec, [&](double eps, const double* u) {
    const double g = occupation_weight(lam, eps, params.eta);
    double power = g;
    for (int m = 0; m < 3; ++m) {
      for (int k = 0; k < d; ++k)
        for (int l = k; l < d; ++l) blocks[m][k][l] += u[k] * u[l] * power;
      power *= eps;
    }
  });
  Eigen::MatrixXd D(2 * d, 2 * d);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto& b = blocks[i + j];
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          D(i * d + k, j * d + l) = tau * w * (k <= l ? b[k][l] : b[l][k]).value();
    }
  }
  return D;
}

AppendixIntegrals appendix_closed_forms(const ModelParams& params) {
  const double e2 = params.eps0 * params.eps0;
  const double speed = 4.0 * kPi * params.eps0;
  return {
      2.0 * params.d * e2,
      0.5 * speed * speed,
      0.0,
      8.0 * (2.0 * params.d - 1.0) * kPi * kPi * e2 * e2,
  };
}

AppendixQuadrature appendix_quadrature(const ModelParams& params,
                                       const QuadratureSpec& spec) {
  const int d = params.d;
  Sum eps_sq;
  Sum uu[3][3], eps_uu[3][3], eps_sq_uu[3][3];
  const double w = sweep(params, spec, [&](double eps, const double* u) {
    eps_sq += eps * eps;
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) {
        const double v = u[k] * u[l];
        uu[k][l] += v;
        eps_uu[k][l] += eps * v;
        eps_sq_uu[k][l] += eps * eps * v;
      }
    }
  });
  AppendixQuadrature q;
  q.eps_sq = eps_sq.value() * w;
  q.uu.resize(d, d);
  q.eps_uu.resize(d, d);
  q.eps_sq_uu.resize(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      q.uu(k, l) = uu[k][l].value() * w;
      q.eps_uu(k, l) = eps_uu[k][l].value() * w;
      q.eps_sq_uu(k, l) = eps_sq_uu[k][l].value() * w;
    }
  }
  return q;
}

double entropy_density(const Multipliers& lam, const ModelParams& params,
                       const QuadratureSpec& spec) {
  const double eta = params.eta;
  if (eta > 0.0) {
    Sum n, E, pressure;
    const double w = sweep(params, spec, [&](double eps, const double*) {
      const double F = equilibrium_at(lam, eps, eta);
      n += F;
      E += F * eps;
      pressure += scaled_softplus(lam.lambda0 + lam.lambda1 * eps, eta);
    });
    return (n.value() * lam.lambda0 + E.value() * lam.lambda1 - pressure.value()) * w;
  }
  // Maxwell-Boltzmann limit: int (F log F - F) dp with log F = lambda0 + lambda1 eps.
  Sum h;
  const double w = sweep(params, spec, [&](double eps, const double*) {
    const double x = std::clamp(lam.lambda0 + lam.lambda1 * eps, -kExpClamp, kExpClamp);
    h += std::exp(x) * (x - 1.0);
  });
  return h.value() * w;
}

DualCoefficients dual_coefficients(const Multipliers& lam, double V, double tau,
                                   const ModelParams& params,
                                   const QuadratureSpec& spec) {
  const int d = params.d;
  const Eigen::MatrixXd D = diffusion_matrix(lam, tau, params, spec);
  const Eigen::MatrixXd D00 = D.topLeftCorner(d, d);
  const Eigen::MatrixXd D01 = D.topRightCorner(d, d);
  const Eigen::MatrixXd D11 = D.bottomRightCorner(d, d);

  DualCoefficients out;
  out.mu = DualVariables::from_multipliers(lam, V);
  out.L.resize(2 * d, 2 * d);
  const Eigen::MatrixXd L01 = D01 - D00 * V;
  out.L.topLeftCorner(d, d) = D00;
  out.L.topRightCorner(d, d) = L01;
  out.L.bottomLeftCorner(d, d) = L01.transpose();
  out.L.bottomRightCorner(d, d) = D11 - 2.0 * V * D01 + V * V * D00;
  return out;
}

}  // namespace optlat
