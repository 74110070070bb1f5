// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Criterion numbers may be passed as
// arguments to run a subset.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "optlat/diagnostics.hpp"
#include "optlat/harness.hpp"
#include "optlat/initial.hpp"
#include "optlat/inversion.hpp"
#include "optlat/kinetics.hpp"
#include "optlat/solver.hpp"
#include "oracles.hpp"

using namespace optlat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

ModelParams reference_model() {
  ModelParams p;
  p.eps0 = std::sqrt(0.5);
  p.U0 = 10.0;
  p.eta = 1.0;
  return p;
}

SolverConfig solver(Scheme scheme, double dt, double t_final) {
  SolverConfig c;
  c.scheme = scheme;
  c.dt = dt;
  c.t_final = t_final;
  return c;
}

double max_abs_diff(const Field& f, double value) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v - value));
  return m;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

Outcome appendix_identities() {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (double eps0 : {0.5, 1.0}) {
      ModelParams p;
      p.d = d;
      p.eps0 = eps0;
      const AppendixIntegrals c = appendix_closed_forms(p);
      const AppendixQuadrature q = appendix_quadrature(p, {64, d});
      const auto I = Eigen::MatrixXd::Identity(d, d);
      worst = std::max({worst, std::abs(q.eps_sq - c.eps_sq),
                        (q.uu - c.uu * I).cwiseAbs().maxCoeff(),
                        (q.eps_uu - c.eps_uu * I).cwiseAbs().maxCoeff(),
                        (q.eps_sq_uu - c.eps_sq_uu * I).cwiseAbs().maxCoeff()});
    }
  }
  return {worst < 1e-10, fmt("max abs diff %.3g", worst)};
}

// Criteria 2 and 4 share one trajectory.
struct ConstantCaseRun {
  State last;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
};

const ConstantCaseRun& constant_case() {
  static const ConstantCaseRun run = [] {
    const ModelParams p = reference_model();
    InitialSpec spec;
    spec.W0 = 1.0;
    ConstantCaseRun r;
    bool started = false;
    double mass = 0.0;
    double energy = 0.0;
    const Observer drift = [&](const State& s) {
      const double dx = s.grid.dx();
      double m = 0.0;
      double e = 0.0;
      for (int i = 0; i < s.grid.size(); ++i) {
        m += s.n[i] * dx;
        e += (s.W[i] - 0.5 * p.U() * s.n[i] * s.n[i]) * dx;
      }
      if (started) {
        r.mass_drift = std::max(r.mass_drift, std::abs(m - mass) / std::abs(mass));
        r.energy_drift = std::max(r.energy_drift, std::abs(e - energy) / std::abs(energy));
      }
      started = true;
      mass = m;
      energy = e;
    };
    r.last = run_simulation(spec.make_state(100), p, solver(Scheme::semi_implicit, 1e-5, 0.1),
                            std::span(&drift, 1))
                 .states.back();
    return r;
  }();
  return run;
}

Outcome constant_steady_state() {
  const State& s = constant_case().last;
  const double dn = max_abs_diff(s.n, 0.5);
  const double dW = max_abs_diff(s.W, 11.0 / 16.0);
  return {dn < 1e-3 && dW < 2e-3, fmt("t=%.3g |n-1/2|=%.3g |W-11/16|=%.3g", s.t, dn, dW)};
}

Outcome nonconstant_steady_state() {
  InitialSpec spec;
  spec.W0 = 0.25;
  const ModelParams p = reference_model();
  const State full =
      run_simulation(spec.make_state(100), p, solver(Scheme::semi_implicit, 1e-5, 2.0)).states.back();
  // the linearly implicit step loses positivity of W at the step jumps for
  // dt = 1e-4; the monotone Picard step does not
  const State coarse =
      run_simulation(spec.make_state(100), p, solver(Scheme::implicit_picard, 1e-4, 0.5))
          .states.back();
  const double W_full = *std::max_element(full.W.begin(), full.W.end());
  const auto [lo, hi] = std::minmax_element(full.n.begin(), full.n.end());
  const double W_coarse = *std::max_element(coarse.W.begin(), coarse.W.end());
  const bool ok = W_full < 1e-2 && *hi - *lo > 0.05 && W_coarse < 5e-2;
  return {ok, fmt("max W=%.3g range n=%.3g coarse max W=%.3g", W_full, *hi - *lo, W_coarse)};
}

Outcome conservation() {
  const ConstantCaseRun& r = constant_case();
  return {r.mass_drift < 1e-12 && r.energy_drift < 1e-12,
          fmt("mass drift %.3g energy drift %.3g", r.mass_drift, r.energy_drift)};
}

Outcome monotonicity() {
  InitialSpec spec;
  spec.kind = InitialSpec::Kind::cosine;
  spec.amplitude = 0.1;
  spec.W_amplitude = 0.2;
  const State start = spec.make_state(64);
  ModelParams p = reference_model();
  p.U0 = 1.0;
  const double n_max0 = *std::max_element(start.n.begin(), start.n.end());
  const double W_max0 = *std::max_element(start.W.begin(), start.W.end());
  DiagnosticsRecorder rec(p);
  double bound_violation = 0.0;
  const Observer obs = [&](const State& s) {
    rec(s);
    for (int i = 0; i < s.grid.size(); ++i) {
      bound_violation = std::max({bound_violation, p.delta - s.n[i], s.n[i] - n_max0, -s.W[i],
                                  s.W[i] - W_max0});
    }
  };
  run_simulation(start, p, solver(Scheme::implicit_picard, 1e-4, 0.02), std::span(&obs, 1));
  const auto& r = rec.records();
  double energy_drop = 0.0;
  double variance_rise = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k) {
    energy_drop = std::max(energy_drop, r[k - 1].energy_total - r[k].energy_total);
    variance_rise = std::max(variance_rise, r[k].variance - r[k - 1].variance);
  }
  const bool ok = r.size() == 201 && energy_drop <= 1e-9 && variance_rise <= 1e-9 &&
                  bound_violation <= 1e-10;
  return {ok, fmt("steps=%zu energy drop %.3g variance rise %.3g bound violation %.3g",
                  r.size() - 1, energy_drop, variance_rise, bound_violation)};
}

Outcome convergence_orders() {
  const ModelParams p = reference_model();
  InitialSpec step;
  const std::vector<double> dts{1.0 / 315, 1.0 / 630, 1.0 / 1260, 1.0 / 2520};
  const ConvergenceReport time = temporal_study(solver(Scheme::semi_implicit, 1e-5, 4.0 / 63), p,
                                                step, 105, dts, 1.0 / 5040);
  // the step jumps at 1/4 and 3/4 miss the cell faces of the coarser grids
  InitialSpec smooth;
  smooth.kind = InitialSpec::Kind::cosine;
  smooth.amplitude = 0.2;
  smooth.W_amplitude = 0.2;
  const std::vector<int> grids{105, 210, 420, 840};
  const ConvergenceReport space =
      spatial_study(solver(Scheme::semi_implicit, 1e-5, 0.01), p, smooth, grids, 1680);
  const bool ok = time.fitted_order >= 0.7 && time.fitted_order <= 1.3 &&
                  space.fitted_order >= 1.7 && space.fitted_order <= 2.3;
  return {ok, fmt("temporal order %.3f spatial order %.3f", time.fitted_order, space.fitted_order)};
}

Outcome decay_ordering() {
  const ModelParams p = reference_model();
  std::vector<double> rates;
  std::string detail;
  bool fits_ok = true;
  for (double W0 : {0.25, 0.5, 1.0}) {
    InitialSpec spec;
    spec.kind = InitialSpec::Kind::step2;
    spec.W0 = W0;
    const State start = spec.make_state(100);
    std::vector<State> samples;
    const Observer keep = [&](const State& s) {
      if (s.k % 100 == 0) samples.push_back(s);
    };
    run_simulation(start, p, solver(Scheme::semi_implicit, 1e-5, 2.0), std::span(&keep, 1));
    const SteadyPrediction pred = predict_steady(start.n, start.W, p);
    const Field n_inf = pred.kind == SteadyPrediction::Kind::constant
                            ? Field(start.n.size(), pred.n_inf)
                            : samples.back().n;
    // exponential regime: two decades below the initial distance, above round-off
    std::vector<double> t;
    std::vector<double> e;
    const double e0 = l2_distance(start.n, n_inf, start.grid.dx());
    for (const auto& s : samples) {
      const double dist = l2_distance(s.n, n_inf, s.grid.dx());
      if (dist < 1e-2 * e0 && dist > 1e-8) {
        t.push_back(s.t);
        e.push_back(dist);
      }
    }
    const DecayFit fit = fit_decay(t, e);
    fits_ok = fits_ok && fit.r_squared >= 0.99;
    rates.push_back(fit.rate);
    detail += fmt("W0=%g rate=%.4g r2=%.6f ", W0, fit.rate, fit.r_squared);
  }
  return {fits_ok && rates[2] > rates[1] && rates[1] > rates[0], detail};
}

Outcome determinant_formula() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> m0(-1.0, 1.0);
  std::uniform_real_distribution<double> m1(-0.3, 0.3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  InversionSettings tight;
  tight.fixed_point_tol = 1e-15;
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    ModelParams p;
    p.U0 = u(rng);
    const DualVariables mu{m0(rng), m1(rng)};
    const QuadratureSpec spec{64, 1};
    const DeterminantResult r = jacobian_det_formula(mu, p, spec);
    const auto map = [&](double a, double b) {
      const MomentPair m = selfconsistent_density({a, b}, p, spec, tight);
      return std::pair<double, double>{m.n, m.E};
    };
    const double fd = oracle::fd_determinant(map, mu.mu0, mu.mu1, 1e-4);
    worst = std::max(worst, std::abs(r.det - fd) / std::abs(fd));
  }
  return {worst < 1e-6, fmt("max relative error %.3g", worst)};
}

Outcome inversion_and_spd() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lam(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    ModelParams p;
    p.d = 1 + s % 3;
    p.eta = s % 2 ? 1.0 : 0.0;
    const QuadratureSpec spec{p.d == 3 ? 32 : 64, p.d};
    const Multipliers truth{lam(rng), lam(rng)};
    const Multipliers got = invert_moments(moments(truth, p, spec), p, spec);
    worst = std::max({worst, std::abs(got.lambda0 - truth.lambda0),
                      std::abs(got.lambda1 - truth.lambda1)});
  }
  double min_D = INFINITY;
  double min_L = INFINITY;
  for (int s = 0; s < 100; ++s) {
    ModelParams p;
    p.d = 1 + s % 3;
    p.eta = s % 2 ? 1.0 : 0.0;
    const QuadratureSpec spec{p.d == 3 ? 16 : 32, p.d};
    const Multipliers l{2.0 * lam(rng), 2.0 * lam(rng)};
    min_D = std::min(min_D, min_eigenvalue(diffusion_matrix(l, 1.0, p, spec)));
    min_L = std::min(min_L, min_eigenvalue(dual_coefficients(l, 2.0 * lam(rng), 1.0, p, spec).L));
  }
  return {worst < 1e-8 && min_D > 0.0 && min_L > 0.0,
          fmt("max recovery error %.3g min eig D %.3g min eig L %.3g", worst, min_D, min_L)};
}

Outcome zeroth_order_rate() {
  InitialSpec spec;
  spec.kind = InitialSpec::Kind::cosine;
  spec.amplitude = 1e-6;
  const State start = spec.make_state(256);
  ModelParams p;
  p.eta = 0.0;
  const double t_final = 0.01;
  const State last =
      run_simulation(start, p, solver(Scheme::zeroth_order, 1e-6, t_final)).states.back();
  const auto mode = [](const State& s) {
    double a = 0.0;
    for (int i = 0; i < s.grid.size(); ++i)
      a += 2.0 * (s.n[i] - 0.5) * std::cos(2.0 * oracle::kPi * s.grid.center(i)) * s.grid.dx();
    return a;
  };
  // linearization about n = 1/2 with g = n: rate tau0 (2 pi)^2 / n
  const double rate = -std::log(mode(last) / mode(start)) / t_final;
  const double expected = p.tau0 * 4.0 * oracle::kPi * oracle::kPi / 0.5;
  const double rel = std::abs(rate - expected) / expected;
  return {rel < 0.05, fmt("rate %.5g expected %.5g relative error %.3g", rate, expected, rel)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"appendix integral identities", appendix_identities},
      {"constant steady state", constant_steady_state},
      {"nonconstant steady state", nonconstant_steady_state},
      {"conservation", conservation},
      {"monotonicity and maximum principle", monotonicity},
      {"convergence orders", convergence_orders},
      {"decay ordering", decay_ordering},
      {"closed-form determinant", determinant_formula},
      {"inversion round trip and SPD", inversion_and_spd},
      {"zeroth-order linearized rate", zeroth_order_rate},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id,
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
