#include "optlat/harness.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "optlat/errors.hpp"

namespace optlat {

namespace {

double squared_error(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double field_error(const State& coarse, const Field& ref_n, const Field& ref_W,
                   ErrorVariable variable) {
  double s = 0.0;
  if (variable != ErrorVariable::W) s += squared_error(coarse.n, ref_n);
  if (variable != ErrorVariable::n) s += squared_error(coarse.W, ref_W);
  return s;
}

// Runs jobs (possibly concurrently) and gathers results by index.
template <class Result, class Job>
std::vector<Result> run_all(std::size_t count, Job job, bool parallel) {
  std::vector<Result> results(count);
  if (!parallel) {
    for (std::size_t i = 0; i < count; ++i) results[i] = job(i);
    return results;
  }
  std::vector<std::future<Result>> futures;
  futures.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    futures.push_back(std::async(std::launch::async, job, i));
  for (std::size_t i = 0; i < count; ++i) results[i] = futures[i].get();
  return results;
}

long exact_ratio(double numerator, double denominator, const char* what) {
  const double ratio = numerator / denominator;
  const long rounded = std::lround(ratio);
  if (rounded < 1 || std::abs(ratio - rounded) > 1e-9 * ratio)
    throw std::invalid_argument(std::string(what) + " is not an integer multiple");
  return rounded;
}

void finish_report(ConvergenceReport& report) {
  const std::size_t m = report.errors.size();
  bool all_zero = true;
  for (double e : report.errors) all_zero = all_zero && e == 0.0;
  report.degenerate = all_zero;
  report.observed_orders.clear();
  report.fitted_order = std::numeric_limits<double>::quiet_NaN();
  if (all_zero) return;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    report.observed_orders.push_back(std::log(report.errors[i] / report.errors[i + 1]) /
                                     std::log(report.step_sizes[i] / report.step_sizes[i + 1]));
  }
  if (m >= 2) report.fitted_order = fit_loglog_slope(report.step_sizes, report.errors);
}

}  // namespace

const char* to_string(StudyAxis axis) { return axis == StudyAxis::time ? "time" : "space"; }

const char* to_string(ErrorVariable variable) {
  switch (variable) {
    case ErrorVariable::n: return "n";
    case ErrorVariable::W: return "W";
    case ErrorVariable::both: return "both";
  }
  return "n";
}

std::vector<double> restrict_average(std::span<const double> fine, int coarse_cells) {
  if (coarse_cells < 1 || fine.size() % static_cast<std::size_t>(coarse_cells) != 0)
    throw std::invalid_argument("fine grid is not a refinement of the coarse grid");
  const std::size_t r = fine.size() / coarse_cells;
  std::vector<double> out(coarse_cells, 0.0);
  for (int j = 0; j < coarse_cells; ++j) {
    double s = 0.0;
    for (std::size_t m = 0; m < r; ++m) s += fine[j * r + m];
    out[j] = s / static_cast<double>(r);
  }
  return out;
}

double fit_loglog_slope(std::span<const double> h, std::span<const double> errors) {
  if (h.size() != errors.size() || h.size() < 2)
    throw std::invalid_argument("log-log fit needs at least two paired samples");
  const std::size_t m = h.size();
  double xm = 0.0;
  double ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xm += std::log(h[i]);
    ym += std::log(errors[i]);
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(h[i]) - xm;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - ym);
  }
  return sxy / sxx;
}

ConvergenceReport spatial_study(const SolverConfig& base, const ModelParams& params,
                                const InitialSpec& initial, std::span<const int> grids,
                                int ref_cells, ErrorVariable variable, bool parallel) {
  if (grids.empty()) throw std::invalid_argument("spatial study needs at least one grid");
  for (std::size_t i = 0; i < grids.size(); ++i) {
    if (grids[i] >= ref_cells)
      throw std::invalid_argument("reference grid must be strictly finer than every study grid");
    if (ref_cells % grids[i] != 0)
      throw std::invalid_argument("study grids must divide the reference grid");
    if (i > 0 && grids[i] <= grids[i - 1])
      throw std::invalid_argument("study grids must be strictly increasing");
  }

  std::vector<int> all(grids.begin(), grids.end());
  all.push_back(ref_cells);
  const auto finals = run_all<State>(
      all.size(),
      [&](std::size_t i) {
        const Trajectory traj = run_simulation(initial.make_state(all[i]), params, base);
        return traj.states.back();
      },
      parallel);

  const State& ref = finals.back();
  ConvergenceReport report;
  report.axis = StudyAxis::space;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const State& coarse = finals[i];
    const Field ref_n = restrict_average(ref.n, grids[i]);
    const Field ref_W = restrict_average(ref.W, grids[i]);
    report.step_sizes.push_back(coarse.grid.dx());
    report.errors.push_back(std::sqrt(field_error(coarse, ref_n, ref_W, variable) * coarse.grid.dx()));
  }
  finish_report(report);
  return report;
}

ConvergenceReport temporal_study(const SolverConfig& base, const ModelParams& params,
                                 const InitialSpec& initial, int cells,
                                 std::span<const double> dts, double ref_dt,
                                 ErrorVariable variable, bool parallel) {
  if (dts.empty()) throw std::invalid_argument("temporal study needs at least one step size");
  std::vector<long> ratios;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(ref_dt < dts[i])) throw std::invalid_argument("reference step must be strictly smaller");
    if (i > 0 && !(dts[i] < dts[i - 1]))
      throw std::invalid_argument("study steps must be strictly decreasing");
    ratios.push_back(exact_ratio(dts[i], ref_dt, "study step"));
    exact_ratio(base.t_final, dts[i], "final time");
  }
  const long ref_steps = exact_ratio(base.t_final, ref_dt, "final time");

  const State start = initial.make_state(cells);
  std::vector<double> all(dts.begin(), dts.end());
  all.push_back(ref_dt);

  // Every run keeps its full history of (n, W) by step index.
  struct History {
    std::vector<Field> n;
    std::vector<Field> W;
  };
  const auto histories = run_all<History>(
      all.size(),
      [&](std::size_t i) {
        SolverConfig config = base;
        config.dt = all[i];
        History h;
        const Observer keep = [&h](const State& s) {
          h.n.push_back(s.n);
          h.W.push_back(s.W);
        };
        run_simulation(start, params, config, std::span<const Observer>(&keep, 1));
        return h;
      },
      parallel);

  const History& ref = histories.back();
  if (static_cast<long>(ref.n.size()) != ref_steps + 1)
    throw std::logic_error("reference history has unexpected length");

  ConvergenceReport report;
  report.axis = StudyAxis::time;
  const double dx = start.grid.dx();
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const History& h = histories[i];
    double s = 0.0;
    for (std::size_t k = 1; k < h.n.size(); ++k) {
      const std::size_t rk = k * static_cast<std::size_t>(ratios[i]);
      State snapshot{start.grid, h.n[k], h.W[k], 0, 0.0};
      s += dts[i] * dx * field_error(snapshot, ref.n[rk], ref.W[rk], variable);
    }
    report.step_sizes.push_back(dts[i]);
    report.errors.push_back(std::sqrt(s));
  }
  finish_report(report);
  return report;
}

}  // namespace optlat
