#include "optlat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "optlat/errors.hpp"
#include "optlat/tridiagonal.hpp"

namespace optlat {

namespace {

double energy_diffusion_factor(const ModelParams& params) {
  return (2.0 * params.d - 1.0) / (2.0 * params.d);
}

// Arithmetic mean of a cell coefficient onto face i+1/2.
Field face_average(const PeriodicGrid1D& grid, const Field& cell) {
  const int N = grid.size();
  Field face(N);
  for (int i = 0; i < N; ++i) face[i] = 0.5 * (cell[i] + cell[grid.wrap(i + 1)]);
  return face;
}

std::vector<double> solve_or_fail(const Field& sub, const Field& diag, const Field& sup,
                                  const Field& rhs, const char* stage) {
  try {
    return cyclic_tridiagonal_solve(sub, diag, sup, rhs);
  } catch (const ZeroPivot& e) {
    throw LinearSolveFailure(std::string(stage) + ": " + e.what());
  }
}

// Solves (u - old)/dt = (a u_x)_x + source with face coefficients a. The
// unknown is the increment u - old, so states without flux stay bitwise fixed.
Field implicit_diffusion(const PeriodicGrid1D& grid, const Field& face_coeff, const Field& old,
                         const Field* source, double dt, const char* stage) {
  const int N = grid.size();
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  Field sub(N), diag(N), sup(N), rhs(N);
  for (int i = 0; i < N; ++i) {
    const int l = grid.wrap(i - 1);
    const int r = grid.wrap(i + 1);
    const double right = face_coeff[i] * inv_dx2;
    const double left = face_coeff[l] * inv_dx2;
    sub[i] = -left;
    sup[i] = -right;
    diag[i] = 1.0 / dt + left + right;
    rhs[i] = right * (old[r] - old[i]) - left * (old[i] - old[l]) + (source ? (*source)[i] : 0.0);
  }
  Field u = solve_or_fail(sub, diag, sup, rhs, stage);
  for (int i = 0; i < N; ++i) u[i] += old[i];
  return u;
}

double clamp_density(double n, const ModelParams& params) {
  const double upper = params.eta > 0.0 ? (1.0 - params.delta) / params.eta
                                        : std::numeric_limits<double>::infinity();
  return std::max(params.delta, std::min(upper, n));
}

double clamp_energy(double W, double gamma) { return std::max(0.0, std::min(1.0 / gamma, W)); }

// Squared gradient at cell centers as the mean of the two adjacent squared
// face differences.
Field gradient_square(const PeriodicGrid1D& grid, const Field& n) {
  const int N = grid.size();
  const double inv_2dx2 = 1.0 / (2.0 * grid.dx() * grid.dx());
  Field out(N);
  for (int i = 0; i < N; ++i) {
    const double right = n[grid.wrap(i + 1)] - n[i];
    const double left = n[i] - n[grid.wrap(i - 1)];
    out[i] = (right * right + left * left) * inv_2dx2;
  }
  return out;
}

double l2_change(const PeriodicGrid1D& grid, const Field& a, const Field& a_prev, const Field& b,
                 const Field& b_prev) {
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double da = a[i] - a_prev[i];
    const double db = b[i] - b_prev[i];
    s += da * da + db * db;
  }
  return std::sqrt(s * grid.dx());
}

State advance(const State& state, Field n, Field W) {
  State next{state.grid, std::move(n), std::move(W), state.k + 1, state.t};
  return next;
}

}  // namespace

PeriodicGrid1D::PeriodicGrid1D(int cells) : cells_(cells), dx_(1.0 / cells) {
  if (cells < 4) throw std::invalid_argument("periodic grid needs at least 4 cells");
}

Field State::total_energy(double U) const {
  Field out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i] = W[i] - 0.5 * U * n[i] * n[i];
  return out;
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::semi_implicit: return "semi_implicit";
    case Scheme::implicit_picard: return "implicit_picard";
    case Scheme::zeroth_order: return "zeroth_order";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "semi_implicit") return Scheme::semi_implicit;
  if (name == "implicit_picard") return Scheme::implicit_picard;
  if (name == "zeroth_order") return Scheme::zeroth_order;
  throw ValidationError("unknown scheme '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("solver.dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    throw ValidationError("solver.t_final must be nonnegative");
  if (!(alpha >= 0.0)) throw ValidationError("solver.alpha must be nonnegative");
  if (gamma && !(*gamma > 0.0)) throw ValidationError("solver.gamma must be positive");
  if (!(eps_reg >= 0.0)) throw ValidationError("solver.eps_reg must be nonnegative");
  if (!(picard_tol > 0.0)) throw ValidationError("solver.picard_tol must be positive");
  if (picard_max < 1) throw ValidationError("solver.picard_max must be at least 1");
  if (!(invariant_slack >= 0.0)) throw ValidationError("solver.invariant_slack must be nonnegative");
}

double g_mobility(double n, const ModelParams& params) { return n * (1.0 - params.eta * n); }

double g_truncated(double n, const ModelParams& params) {
  return g_mobility(clamp_density(n, params), params);
}

void check_state_bounds(const State& state, const ModelParams& params, double slack) {
  const double upper = params.eta > 0.0 ? (1.0 - params.delta) / params.eta
                                        : std::numeric_limits<double>::infinity();
  for (int i = 0; i < state.grid.size(); ++i) {
    const double n = state.n[i];
    const double W = state.W[i];
    std::ostringstream os;
    if (!std::isfinite(n) || !std::isfinite(W)) {
      os << "non-finite value at cell " << i;
    } else if (n < params.delta - slack || n > upper + slack) {
      os << "density " << n << " at cell " << i << " leaves [" << params.delta << ", " << upper
         << "]";
    } else if (W < -slack) {
      os << "energy " << W << " at cell " << i << " is negative";
    } else {
      continue;
    }
    throw InvariantViolation(os.str());
  }
}

State step_semi_implicit(const State& state, const ModelParams& params,
                         const SolverConfig& config) {
  const PeriodicGrid1D& grid = state.grid;
  const int N = grid.size();
  const double dt = config.dt;
  const double dx = grid.dx();
  const double U = params.U();

  // Stage 1: density with W and g frozen at the previous level.
  Field a(N);
  for (int i = 0; i < N; ++i) a[i] = state.W[i] / g_mobility(state.n[i], params);
  Field n = implicit_diffusion(grid, face_average(grid, a), state.n, nullptr, dt,
                               "density stage");

  // Stage 2: total energy T = W - (U/2) n^2 with flux
  //   b W_x - c W n_x,  b = c_d / g(n),  c = U / (1 - eta n),
  // W = T + (U/2) n^2 substituted so the unknown is T.
  const double cd = energy_diffusion_factor(params);
  Field b(N), c(N), q(N), T_old(N);
  for (int i = 0; i < N; ++i) {
    b[i] = cd / g_mobility(n[i], params);
    c[i] = U / (1.0 - params.eta * n[i]);
    q[i] = 0.5 * U * n[i] * n[i];
    T_old[i] = state.W[i] - 0.5 * U * state.n[i] * state.n[i];
  }
  const Field b_face = face_average(grid, b);
  const Field c_face = face_average(grid, c);
  Field beta(N), kappa(N), known(N);
  for (int i = 0; i < N; ++i) {
    const int r = grid.wrap(i + 1);
    const double dn = (n[r] - n[i]) / dx;
    beta[i] = b_face[i] / dx;
    kappa[i] = -0.5 * c_face[i] * dn;
    known[i] = beta[i] * (q[r] - q[i]) + kappa[i] * (q[i] + q[r]);
  }
  // Face flux beta (T_r - T_i) + kappa (T_i + T_r) + known, solved for T - T_old.
  Field flux(N);
  for (int i = 0; i < N; ++i) {
    const int r = grid.wrap(i + 1);
    flux[i] = beta[i] * (T_old[r] - T_old[i]) + kappa[i] * (T_old[i] + T_old[r]) + known[i];
  }
  Field sub(N), diag(N), sup(N), rhs(N);
  for (int i = 0; i < N; ++i) {
    const int l = grid.wrap(i - 1);
    diag[i] = 1.0 / dt + (beta[i] + beta[l] - kappa[i] + kappa[l]) / dx;
    sup[i] = -(beta[i] + kappa[i]) / dx;
    sub[i] = (kappa[l] - beta[l]) / dx;
    rhs[i] = (flux[i] - flux[l]) / dx;
  }
  const Field dT = solve_or_fail(sub, diag, sup, rhs, "energy stage");

  Field W(N);
  for (int i = 0; i < N; ++i) W[i] = T_old[i] + dT[i] + q[i];
  State next = advance(state, std::move(n), std::move(W));
  next.t = state.t + dt;
  check_state_bounds(next, params, config.invariant_slack);
  return next;
}

State step_implicit_picard(const State& state, const ModelParams& params,
                           const SolverConfig& config) {
  const PeriodicGrid1D& grid = state.grid;
  const int N = grid.size();
  const double dt = config.dt;
  const double U = params.U();
  const double cd = energy_diffusion_factor(params);
  const double W_max = *std::max_element(state.W.begin(), state.W.end());
  const double gamma = config.gamma ? *config.gamma
                                    : (W_max > 0.0 ? 1.0 / (2.0 * W_max)
                                                   : std::numeric_limits<double>::infinity());

  Field n_it = state.n;
  Field W_it = state.W;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < config.picard_max; ++it) {
    Field n_coeff(N), W_coeff(N), g_it(N);
    for (int i = 0; i < N; ++i) {
      g_it[i] = g_truncated(n_it[i], params);
      n_coeff[i] = (clamp_energy(W_it[i], gamma) + config.eps_reg) / g_it[i];
      W_coeff[i] = cd / g_it[i];
    }
    Field n = implicit_diffusion(grid, face_average(grid, n_coeff), state.n, nullptr, dt,
                                 "Picard density stage");

    const Field grad_sq = gradient_square(grid, n);
    Field source(N);
    for (int i = 0; i < N; ++i) {
      source[i] = -U * clamp_energy(W_it[i], gamma) / g_it[i] * grad_sq[i] /
                  (1.0 + config.alpha * grad_sq[i]);
    }
    Field W = implicit_diffusion(grid, face_average(grid, W_coeff), state.W, &source, dt,
                                 "Picard energy stage");

    change = l2_change(grid, n, n_it, W, W_it);
    n_it = std::move(n);
    W_it = std::move(W);
    if (change < config.picard_tol) {
      State next = advance(state, std::move(n_it), std::move(W_it));
      next.t = state.t + dt;
      check_state_bounds(next, params, config.invariant_slack);
      return next;
    }
  }
  std::ostringstream os;
  os << "Picard iteration did not converge within " << config.picard_max
     << " iterations (last change " << change << ")";
  throw PicardNoConvergence(os.str(), static_cast<std::size_t>(config.picard_max), change);
}

State step_zeroth_order(const State& state, const ModelParams& params,
                        const SolverConfig& config) {
  const PeriodicGrid1D& grid = state.grid;
  const int N = grid.size();
  Field a(N);
  for (int i = 0; i < N; ++i) a[i] = params.tau0 / g_mobility(state.n[i], params);
  Field n = implicit_diffusion(grid, face_average(grid, a), state.n, nullptr, config.dt,
                               "zeroth-order density stage");
  State next = advance(state, std::move(n), state.W);
  next.t = state.t + config.dt;
  check_state_bounds(next, params, config.invariant_slack);
  return next;
}

State step(const State& state, const ModelParams& params, const SolverConfig& config) {
  switch (config.scheme) {
    case Scheme::semi_implicit: return step_semi_implicit(state, params, config);
    case Scheme::implicit_picard: return step_implicit_picard(state, params, config);
    case Scheme::zeroth_order: return step_zeroth_order(state, params, config);
  }
  throw std::logic_error("unhandled scheme");
}

Trajectory run_simulation(const State& initial, const ModelParams& params,
                          const SolverConfig& config, std::span<const Observer> observers,
                          std::span<const double> output_times) {
  config.validate();
  params.validate();
  if (initial.n.size() != static_cast<std::size_t>(initial.grid.size()) ||
      initial.W.size() != initial.n.size())
    throw std::invalid_argument("state fields do not match the grid");
  if (!std::is_sorted(output_times.begin(), output_times.end()))
    throw std::invalid_argument("output times must be sorted");
  const double W0_max = *std::max_element(initial.W.begin(), initial.W.end());
  if (config.gamma && *config.gamma * W0_max > 1.0)
    throw ValidationError("solver.gamma must not exceed 1/max(W0)");
  // The truncation ceiling defaults to twice the initial maximum of W.
  SolverConfig run_config = config;
  if (!run_config.gamma && W0_max > 0.0) run_config.gamma = 1.0 / (2.0 * W0_max);

  const long total = std::lround(config.t_final / config.dt);
  std::vector<long> wanted;
  for (double t : output_times) {
    const long k = std::lround((t - initial.t) / config.dt);
    if (k < 0 || k > total) throw std::invalid_argument("output time outside [t0, t_final]");
    if (wanted.empty() || wanted.back() != k) wanted.push_back(k);
  }
  if (wanted.empty()) {
    wanted.push_back(0);
    if (total > 0) wanted.push_back(total);
  }

  Trajectory traj;
  auto notify = [&](const State& s) {
    for (const auto& obs : observers) obs(s);
  };
  std::size_t next_output = 0;
  auto maybe_record = [&](const State& s, long k) {
    if (next_output < wanted.size() && wanted[next_output] == k) {
      traj.states.push_back(s);
      ++next_output;
    }
  };

  State current = initial;
  notify(current);
  maybe_record(current, 0);
  for (long k = 1; k <= total; ++k) {
    try {
      current = step(current, params, run_config);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "step " << (initial.k + k) << " at t = " << (initial.t + k * config.dt)
         << " failed: " << e.what();
      throw StepFailure(os.str(), initial.k + k, initial.t + k * config.dt);
    }
    current.t = initial.t + static_cast<double>(k) * config.dt;
    notify(current);
    maybe_record(current, k);
  }
  return traj;
}

}  // namespace optlat
