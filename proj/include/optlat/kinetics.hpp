#pragma once

// Band structure, equilibrium distribution and the moment integrals over the
// Brillouin torus T^d that feed the macroscopic energy-transport model.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace optlat {

inline constexpr double kPi = 3.14159265358979323846;

// Physical constants of the lattice model. U is derived, never stored.
struct ModelParams {
  int d = 1;             // lattice dimension, 1..3
  double eps0 = 1.0;     // tunneling energy scale
  double U0 = 0.0;       // on-site interaction strength
  double eta = 1.0;      // 0: Maxwell-Boltzmann, 1: Fermi-Dirac
  double tau0 = 1.0;     // relaxation constant
  double delta = 1e-3;   // density truncation bound

  double U() const { return U0 / (2.0 * d * eps0 * eps0); }

  // Throws ValidationError naming the first violated constraint.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

// Lagrange multipliers of the equilibrium. lambda1 is the negative inverse
// temperature and may be positive.
struct Multipliers {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
};

struct DualVariables {
  double mu0 = 0.0;
  double mu1 = 0.0;

  // mu0 = lambda0 + lambda1 V, mu1 = lambda1.
  static DualVariables from_multipliers(const Multipliers& lam, double V) {
    return {lam.lambda0 + lam.lambda1 * V, lam.lambda1};
  }
};

struct MomentPair {
  double n = 0.0;  // particle density
  double E = 0.0;  // energy density
};

struct QuadratureSpec {
  int M = 64;  // points per dimension
  int d = 1;

  static constexpr std::uint64_t kMaxEvaluations = std::uint64_t{1} << 24;

  void validate() const;
  std::uint64_t evaluations() const;
};

using Point = std::span<const double>;

double band_energy(Point p, const ModelParams& params);

std::vector<double> velocity(Point p, const ModelParams& params);

// F = 1 / (eta + exp(-lambda0 - lambda1 eps)); the exponent is clamped to
// [-700, 700] so the result stays finite and saturates at 0 or 1/eta.
double equilibrium_at(const Multipliers& lam, double energy, double eta);

double equilibrium(const Multipliers& lam, Point p, const ModelParams& params);

namespace detail {

// Cosine and sine of 2 pi p at the midpoint nodes p_j = (j + 1/2) / M, with
// the reflection symmetries of the node set imposed exactly.
struct NodeTables {
  std::vector<double> cos;
  std::vector<double> sin;
  explicit NodeTables(int M);
};

}  // namespace detail

// Tensor-product midpoint rule over the unit torus. The integrand receives a
// point of length spec.d with coordinates in [0, 1).
template <class Integrand>
double torus_integrate(Integrand&& f, const QuadratureSpec& spec) {
  spec.validate();
  const int M = spec.M;
  const int d = spec.d;
  std::array<int, 3> idx{0, 0, 0};
  std::array<double, 3> p{0.0, 0.0, 0.0};
  const double h = 1.0 / M;
  const std::uint64_t total = spec.evaluations();
  double sum = 0.0;
  for (std::uint64_t count = 0; count < total; ++count) {
    for (int k = 0; k < d; ++k) p[k] = (idx[k] + 0.5) * h;
    sum += f(Point(p.data(), static_cast<std::size_t>(d)));
    for (int k = 0; k < d; ++k) {
      if (++idx[k] < M) break;
      idx[k] = 0;
    }
  }
  return sum / static_cast<double>(total);
}

MomentPair moments(const Multipliers& lam, const ModelParams& params,
                   const QuadratureSpec& spec);

// omega_i = int F (1 - eta F) eps^i dp, i <= 4.
double omega(const Multipliers& lam, int i, const ModelParams& params,
             const QuadratureSpec& spec);

// Gamma_i = int eps^i |grad eps|^2 F (1 - eta F) dp, i in {0, 1, 2}.
double gamma(const Multipliers& lam, int i, const ModelParams& params,
             const QuadratureSpec& spec);

// Moments and the Jacobian entries d(n, E)/d(lambda0, lambda1), computed in a
// single sweep over the quadrature nodes.
struct MomentJacobian {
  double n = 0.0;
  double E = 0.0;
  double omega0 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;

  double det() const { return omega0 * omega2 - omega1 * omega1; }
};

MomentJacobian moment_jacobian(const Multipliers& lam, const ModelParams& params,
                               const QuadratureSpec& spec);

// 2d x 2d matrix with blocks D_ij (i, j in {0, 1}); entry (i*d + k, j*d + l)
// holds tau * int u_k u_l F (1 - eta F) eps^(i+j) dp.
Eigen::MatrixXd diffusion_matrix(const Multipliers& lam, double tau,
                                 const ModelParams& params,
                                 const QuadratureSpec& spec);

// Analytic values of the four band integrals; the matrices are these scalars
// times the identity.
struct AppendixIntegrals {
  double eps_sq = 0.0;        // int eps^2
  double uu = 0.0;            // int u_i u_i
  double eps_uu = 0.0;        // int eps u_i u_i
  double eps_sq_uu = 0.0;     // int eps^2 u_i u_i
};

AppendixIntegrals appendix_closed_forms(const ModelParams& params);

// The same four families evaluated by quadrature, with full d x d matrices.
struct AppendixQuadrature {
  double eps_sq = 0.0;
  Eigen::MatrixXd uu;
  Eigen::MatrixXd eps_uu;
  Eigen::MatrixXd eps_sq_uu;
};

AppendixQuadrature appendix_quadrature(const ModelParams& params,
                                       const QuadratureSpec& spec);

double entropy_density(const Multipliers& lam, const ModelParams& params,
                       const QuadratureSpec& spec);

struct DualCoefficients {
  DualVariables mu;
  Eigen::MatrixXd L;  // 2d x 2d, same block layout as diffusion_matrix
};

DualCoefficients dual_coefficients(const Multipliers& lam, double V, double tau,
                                   const ModelParams& params,
                                   const QuadratureSpec& spec);

}  // namespace optlat
