#pragma once

// Finite-difference time steppers for the high-temperature system on the
// periodic unit interval:
//   n_t = (W n_x / g(n))_x,
//   W_t = c_d (W_x / g(n))_x - U W |n_x|^2 / g(n),   g(n) = n (1 - eta n),
// with c_d = (2d - 1) / (2d), and for the zeroth-order mode n_t = (tau0 n_x / g(n))_x.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optlat/kinetics.hpp"

namespace optlat {

class PeriodicGrid1D {
 public:
  PeriodicGrid1D() : PeriodicGrid1D(4) {}
  explicit PeriodicGrid1D(int cells);

  int size() const { return cells_; }
  double dx() const { return dx_; }
  double center(int i) const { return (i + 0.5) * dx_; }
  int wrap(int i) const { return ((i % cells_) + cells_) % cells_; }

  bool operator==(const PeriodicGrid1D&) const = default;

 private:
  int cells_;
  double dx_;
};

using Field = std::vector<double>;

struct State {
  PeriodicGrid1D grid;
  Field n;
  Field W;
  long k = 0;
  double t = 0.0;

  // W - (U/2) n^2, the conserved energy of the conservative formulation.
  Field total_energy(double U) const;
};

enum class Scheme { semi_implicit, implicit_picard, zeroth_order };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
  double dt = 1e-5;
  double t_final = 0.0;
  Scheme scheme = Scheme::semi_implicit;
  double alpha = 0.0;                // gradient-square regularization
  std::optional<double> gamma;       // W truncation [W]_gamma = clamp(W, 0, 1/gamma); unset: 1/(2 max W0)
  double eps_reg = 1e-10;            // ellipticity regularization of the n equation
  double picard_tol = 1e-11;
  int picard_max = 200;
  double invariant_slack = 1e-12;    // tolerance of the post-step bound check

  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

double g_mobility(double n, const ModelParams& params);

// g evaluated at the truncated density max(delta, min((1 - delta)/eta, n)).
double g_truncated(double n, const ModelParams& params);

// Throws InvariantViolation when n leaves [delta, (1 - delta)/eta] or W
// drops below zero by more than slack.
void check_state_bounds(const State& state, const ModelParams& params, double slack);

// Linearly implicit step of the conservative (n, W_tot) formulation: n from
// coefficients frozen at the previous level, then W_tot with the fresh n.
State step_semi_implicit(const State& state, const ModelParams& params,
                         const SolverConfig& config);

// Implicit Euler step solved by Picard iteration of the regularized and
// truncated problem.
State step_implicit_picard(const State& state, const ModelParams& params,
                           const SolverConfig& config);

State step_zeroth_order(const State& state, const ModelParams& params,
                        const SolverConfig& config);

State step(const State& state, const ModelParams& params, const SolverConfig& config);

using Observer = std::function<void(const State&)>;

struct Trajectory {
  std::vector<State> states;  // initial state, requested outputs, final state
};

// Steps with a fixed dt until t_final. Observers see the initial state and
// every subsequent step. Output times snap to the nearest step; an empty list
// records only the initial and final states. Step failures are rethrown as
// StepFailure carrying the step index and time.
Trajectory run_simulation(const State& initial, const ModelParams& params,
                          const SolverConfig& config,
                          std::span<const Observer> observers = {},
                          std::span<const double> output_times = {});

}  // namespace optlat
