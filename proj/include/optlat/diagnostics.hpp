#pragma once

#include <span>
#include <vector>

#include "optlat/solver.hpp"

namespace optlat {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;            // sum n dx
  double energy_total = 0.0;    // sum (W - (U/2) n^2) dx
  double variance = 0.0;        // sum (W - mean W)^2 dx + U * prev_W_mean * sum (n - mean n)^2 dx
  double n_min = 0.0;
  double n_max = 0.0;
  double W_min = 0.0;
  double W_max = 0.0;
  double dist_to_steady = 0.0;  // (sum (n - n_inf)^2 dx)^(1/2)
};

double mean(std::span<const double> values);

// Discrete l2 distance with dx weight; `b` empty means distance to the mean of `a`.
double l2_distance(std::span<const double> a, std::span<const double> b, double dx);

// prev_W_mean weights the density variance (mean of W one step back; W0's
// mean at the first step). The steady density defaults to the mean of n.
DiagnosticsRecord record(const State& state, const ModelParams& params, double prev_W_mean,
                         std::span<const double> steady_n = {});

struct SteadyPrediction {
  enum class Kind { constant, nonconstant };
  Kind kind = Kind::constant;
  double n_inf = 0.0;
  double W_inf = 0.0;
  double raw_W_inf = 0.0;  // before clamping at zero
};

// Constant steady state implied by conservation of mass and total energy, or
// a nonconstant one when that constant would need negative W.
SteadyPrediction predict_steady(std::span<const double> n0, std::span<const double> W0,
                                const ModelParams& params);

struct ConditionCheck {
  bool holds = false;
  double margin = 0.0;  // right side minus left side
};

// Sufficient condition for strict positivity of W^k in one dimension, evaluated
// on the state at level k-1 and the mean of W at level k-2.
ConditionCheck check_positivity_condition(const State& previous, double W_mean_before,
                                          const ModelParams& params, double dt);

// (U/2) var(n^{k-1}) < mean(W^{k-1}), which rules out W^k == 0.
ConditionCheck check_nontrivial_condition(const State& previous, const ModelParams& params);

struct DecayFit {
  double rate = 0.0;
  double r_squared = 0.0;
};

// Least-squares line through (t, log error); rate is minus the slope. Throws
// DegenerateFit when the errors span less than one decade.
DecayFit fit_decay(std::span<const double> times, std::span<const double> errors);

// Observer that records diagnostics along a run, tracking the previous W mean.
class DiagnosticsRecorder {
 public:
  explicit DiagnosticsRecorder(ModelParams params, std::vector<double> steady_n = {},
                               long stride = 1);

  void operator()(const State& state);

  // Appends the most recent record if the stride skipped it.
  void finalize();

  const std::vector<DiagnosticsRecord>& records() const { return records_; }

 private:
  ModelParams params_;
  std::vector<double> steady_n_;
  long stride_;
  double prev_W_mean_ = 0.0;
  bool started_ = false;
  bool latest_stored_ = false;
  DiagnosticsRecord latest_;
  std::vector<DiagnosticsRecord> records_;
};

}  // namespace optlat
