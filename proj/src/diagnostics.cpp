#include "optlat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "optlat/errors.hpp"

namespace optlat {

namespace {

double centered_square_sum(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sequence");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double l2_distance(std::span<const double> a, std::span<const double> b, double dx) {
  if (!b.empty() && b.size() != a.size())
    throw std::invalid_argument("l2 distance of sequences with different lengths");
  const double m = b.empty() ? mean(a) : 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - (b.empty() ? m : b[i]);
    s += diff * diff;
  }
  return std::sqrt(s * dx);
}

DiagnosticsRecord record(const State& state, const ModelParams& params, double prev_W_mean,
                         std::span<const double> steady_n) {
  const double dx = state.grid.dx();
  const double U = params.U();
  DiagnosticsRecord r;
  r.t = state.t;
  double mass = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < state.n.size(); ++i) {
    mass += state.n[i];
    energy += state.W[i] - 0.5 * U * state.n[i] * state.n[i];
  }
  r.mass = mass * dx;
  r.energy_total = energy * dx;
  r.variance = centered_square_sum(state.W) * dx + U * prev_W_mean * centered_square_sum(state.n) * dx;
  const auto [n_lo, n_hi] = std::minmax_element(state.n.begin(), state.n.end());
  const auto [W_lo, W_hi] = std::minmax_element(state.W.begin(), state.W.end());
  r.n_min = *n_lo;
  r.n_max = *n_hi;
  r.W_min = *W_lo;
  r.W_max = *W_hi;
  r.dist_to_steady = l2_distance(state.n, steady_n, dx);
  return r;
}

SteadyPrediction predict_steady(std::span<const double> n0, std::span<const double> W0,
                                const ModelParams& params) {
  if (n0.size() != W0.size() || n0.empty())
    throw std::invalid_argument("initial fields must share one nonempty grid");
  const double U = params.U();
  SteadyPrediction p;
  p.n_inf = mean(n0);
  double total = 0.0;
  for (std::size_t i = 0; i < n0.size(); ++i) total += W0[i] - 0.5 * U * n0[i] * n0[i];
  p.raw_W_inf = total / static_cast<double>(n0.size()) + 0.5 * U * p.n_inf * p.n_inf;
  if (p.raw_W_inf >= 0.0) {
    p.kind = SteadyPrediction::Kind::constant;
    p.W_inf = p.raw_W_inf;
  } else {
    p.kind = SteadyPrediction::Kind::nonconstant;
    p.W_inf = 0.0;
  }
  return p;
}

ConditionCheck check_positivity_condition(const State& previous, double W_mean_before,
                                          const ModelParams& params, double dt) {
  if (params.d != 1) throw std::invalid_argument("positivity condition is one-dimensional");
  const double dx = previous.grid.dx();
  const double n_top = *std::max_element(previous.n.begin(), previous.n.end());
  // g(s) = s (1 - eta s) is concave with its peak at 1/(2 eta).
  double s_star = n_top;
  if (params.eta > 0.0) s_star = std::clamp(0.5 / params.eta, params.delta, n_top);
  const double G = g_mobility(s_star, params);
  const double U = params.U();
  const double lhs = G / dt * centered_square_sum(previous.W) * dx +
                     U * (G * W_mean_before / dt + 0.5) * centered_square_sum(previous.n) * dx;
  const double rhs = mean(previous.W);
  return {lhs < rhs, rhs - lhs};
}

ConditionCheck check_nontrivial_condition(const State& previous, const ModelParams& params) {
  const double lhs = 0.5 * params.U() * centered_square_sum(previous.n) * previous.grid.dx();
  const double rhs = mean(previous.W);
  return {lhs < rhs, rhs - lhs};
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> errors) {
  if (times.size() != errors.size()) throw std::invalid_argument("times and errors differ in length");
  if (times.size() < 5) throw std::invalid_argument("decay fit needs at least 5 samples");
  for (double e : errors)
    if (!(e > 0.0)) throw std::invalid_argument("decay fit needs positive errors");
  const auto [lo, hi] = std::minmax_element(errors.begin(), errors.end());
  if (*hi < 10.0 * *lo) throw DegenerateFit("errors span less than one decade");

  const std::size_t m = times.size();
  double tm = 0.0;
  double ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    tm += times[i];
    ym += std::log(errors[i]);
  }
  tm /= m;
  ym /= m;
  double stt = 0.0;
  double sty = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dt = times[i] - tm;
    const double dy = std::log(errors[i]) - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt == 0.0) throw DegenerateFit("all sample times coincide");
  const double slope = sty / stt;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double fit = ym + slope * (times[i] - tm);
    const double r = std::log(errors[i]) - fit;
    ss_res += r * r;
  }
  return {-slope, syy > 0.0 ? 1.0 - ss_res / syy : 1.0};
}

DiagnosticsRecorder::DiagnosticsRecorder(ModelParams params, std::vector<double> steady_n,
                                         long stride)
    : params_(params), steady_n_(std::move(steady_n)), stride_(std::max(1L, stride)) {}

void DiagnosticsRecorder::operator()(const State& state) {
  const double W_mean = mean(state.W);
  if (!started_) {
    prev_W_mean_ = W_mean;
    started_ = true;
  }
  latest_ = record(state, params_, prev_W_mean_, steady_n_);
  latest_stored_ = state.k % stride_ == 0;
  if (latest_stored_) records_.push_back(latest_);
  prev_W_mean_ = W_mean;
}

void DiagnosticsRecorder::finalize() {
  if (started_ && !latest_stored_) {
    records_.push_back(latest_);
    latest_stored_ = true;
  }
}

}  // namespace optlat
