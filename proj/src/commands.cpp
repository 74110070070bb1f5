#include "optlat/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "optlat/diagnostics.hpp"
#include "optlat/errors.hpp"
#include "optlat/harness.hpp"
#include "optlat/inversion.hpp"
#include "optlat/io.hpp"
#include "optlat/svg.hpp"

namespace optlat {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

// Largest per-step relative change of mass and total energy.
struct DriftTracker {
  double U = 0.0;
  bool started = false;
  double mass = 0.0;
  double energy = 0.0;
  double max_mass_drift = 0.0;
  double max_energy_drift = 0.0;

  void operator()(const State& s) {
    const double dx = s.grid.dx();
    double m = 0.0;
    double e = 0.0;
    for (int i = 0; i < s.grid.size(); ++i) {
      m += s.n[i] * dx;
      e += (s.W[i] - 0.5 * U * s.n[i] * s.n[i]) * dx;
    }
    if (started) {
      max_mass_drift = std::max(max_mass_drift, std::abs(m - mass) / std::max(std::abs(mass), 1e-300));
      max_energy_drift =
          std::max(max_energy_drift, std::abs(e - energy) / std::max(std::abs(energy), 1.0));
    }
    started = true;
    mass = m;
    energy = e;
  }
};

void write_plots(const std::filesystem::path& dir, const State& final_state,
                 const std::vector<DiagnosticsRecord>& records) {
  PlotSeries n{"n", {}, final_state.n};
  PlotSeries W{"W", {}, final_state.W};
  for (int i = 0; i < final_state.grid.size(); ++i) n.x.push_back(final_state.grid.center(i));
  W.x = n.x;
  PlotOptions profile;
  profile.title = "t = " + format_double(final_state.t);
  profile.y_label = "value";
  emit_svg_plot({n, W}, dir / "profile.svg", profile);

  PlotSeries dist{"dist_to_steady", {}, {}};
  bool positive = true;
  for (const auto& r : records) {
    dist.x.push_back(r.t);
    dist.y.push_back(r.dist_to_steady);
    positive = positive && r.dist_to_steady > 0.0;
  }
  PlotOptions decay;
  decay.x_label = "t";
  decay.y_label = "||n - n_inf||";
  decay.log_y = positive && !records.empty();
  emit_svg_plot({dist}, dir / "timeseries.svg", decay);
}

}  // namespace

int report_failure(const std::exception& e, std::ostream& err) {
  int code = kExitSolver;
  std::string kind = "error";
  std::string extra;
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    code = kExitConfig;
    kind = "parse";
    extra = " line=" + std::to_string(p->line());
  } else if (dynamic_cast<const ValidationError*>(&e)) {
    code = kExitConfig;
    kind = "validation";
  } else if (const auto* s = dynamic_cast<const StepFailure*>(&e)) {
    kind = "step";
    extra = " step=" + std::to_string(s->step()) + " t=" + format_double(s->time());
  } else if (dynamic_cast<const NoConvergence*>(&e)) {
    kind = "no_convergence";
  } else if (dynamic_cast<const SingularJacobian*>(&e)) {
    kind = "singular_jacobian";
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    code = kExitConfig;
    kind = "invalid_argument";
  }
  err << "error kind=" << kind << " exit=" << code << extra << " message=" << quoted(e.what())
      << '\n';
  return code;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err, bool check) {
  try {
    validate_config(config, Command::simulate);
    const State initial = config.initial.make_state(config.N);
    const double U = config.model.U();

    DiagnosticsRecorder recorder(config.model, {}, config.output.timeseries_stride);
    DriftTracker drift{U};
    const std::vector<Observer> observers{[&](const State& s) { recorder(s); },
                                          [&](const State& s) { drift(s); }};
    std::vector<double> times = config.output.times;
    if (!times.empty()) {
      std::sort(times.begin(), times.end());
      if (times.back() < config.solver.t_final) times.push_back(config.solver.t_final);
    }
    const Trajectory traj = run_simulation(initial, config.model, config.solver, observers, times);
    recorder.finalize();

    const std::filesystem::path dir(config.output.dir);
    long last_k = -1;
    for (const auto& s : traj.states) {
      if (s.k == last_k) continue;
      last_k = s.k;
      write_file_atomic(dir / snapshot_filename(s.t), snapshot_csv(s, U));
    }
    write_file_atomic(dir / "timeseries.csv", timeseries_csv(recorder.records()));
    if (config.output.plot) write_plots(dir, traj.states.back(), recorder.records());

    const State& last = traj.states.back();
    const auto [n_lo, n_hi] = std::minmax_element(last.n.begin(), last.n.end());
    const auto [W_lo, W_hi] = std::minmax_element(last.W.begin(), last.W.end());
    out << "simulate t=" << format_double(last.t) << " steps=" << last.k
        << " n_range=" << format_double(*n_hi - *n_lo) << " W_max=" << format_double(*W_hi)
        << " mass_drift=" << format_double(drift.max_mass_drift)
        << " energy_drift=" << format_double(drift.max_energy_drift) << '\n';

    if (!check) return kExitOk;
    std::vector<std::string> failures;
    if (drift.max_mass_drift > config.check.conservation_tol) failures.push_back("mass drift");
    if (drift.max_energy_drift > config.check.conservation_tol) failures.push_back("energy drift");
    if (*W_lo < -config.solver.invariant_slack) failures.push_back("negative energy");
    if (config.check.steady_tol) {
      const double tol = *config.check.steady_tol;
      const SteadyPrediction p = predict_steady(initial.n, initial.W, config.model);
      if (p.kind == SteadyPrediction::Kind::constant) {
        double dn = 0.0;
        double dW = 0.0;
        for (int i = 0; i < last.grid.size(); ++i) {
          dn = std::max(dn, std::abs(last.n[i] - p.n_inf));
          dW = std::max(dW, std::abs(last.W[i] - p.W_inf));
        }
        if (dn >= tol || dW >= tol) failures.push_back("steady state not reached");
      } else if (*W_hi >= tol) {
        failures.push_back("energy has not decayed");
      }
    }
    if (failures.empty()) {
      out << "check passed\n";
      return kExitOk;
    }
    std::string joined;
    for (const auto& f : failures) joined += (joined.empty() ? "" : "; ") + f;
    err << "error kind=check exit=" << kExitCheck << " message=" << quoted(joined) << '\n';
    return kExitCheck;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

int cmd_convergence(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config, Command::convergence);
    const auto& c = config.convergence;
    ConvergenceReport report;
    if (c.axis == StudyAxis::space) {
      report = spatial_study(config.solver, config.model, config.initial, c.grids, c.ref_N,
                             c.variable, c.parallel);
    } else {
      report = temporal_study(config.solver, config.model, config.initial, c.cells, c.dts,
                              c.ref_dt, c.variable, c.parallel);
    }
    write_file_atomic(std::filesystem::path(config.output.dir) / "convergence.csv",
                      convergence_csv(report));
    out << "convergence axis=" << to_string(report.axis) << " variable=" << to_string(c.variable)
        << " runs=" << report.errors.size() << " fitted_order="
        << (std::isnan(report.fitted_order) ? std::string("none") : format_double(report.fitted_order))
        << " degenerate=" << (report.degenerate ? "true" : "false") << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

int cmd_moments(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config, Command::moments);
    const QuadratureSpec spec{config.quadrature_M, config.model.d};
    const MomentPair m =
        moments({config.query.lambda0, config.query.lambda1}, config.model, spec);
    out << "n,E\n" << format_double(m.n) << ',' << format_double(m.E) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

int cmd_invert(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config, Command::invert);
    const QuadratureSpec spec{config.quadrature_M, config.model.d};
    const Multipliers lam = invert_moments({config.query.n, config.query.E}, config.model, spec);
    out << "lambda0,lambda1\n"
        << format_double(lam.lambda0) << ',' << format_double(lam.lambda1) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

int cmd_verify_integrals(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config, Command::verify_integrals);
    const QuadratureSpec spec{config.quadrature_M, config.model.d};
    const AppendixIntegrals exact = appendix_closed_forms(config.model);
    const AppendixQuadrature quad = appendix_quadrature(config.model, spec);
    const int d = config.model.d;
    const auto matrix_diff = [d](const Eigen::MatrixXd& m, double scalar) {
      return (m - scalar * Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    };
    out << "family,quadrature,closed_form,abs_diff\n";
    const auto row = [&](const char* name, double q, double c, double diff) {
      out << name << ',' << format_double(q) << ',' << format_double(c) << ','
          << format_double(diff) << '\n';
    };
    row("eps_sq", quad.eps_sq, exact.eps_sq, std::abs(quad.eps_sq - exact.eps_sq));
    row("uu", quad.uu(0, 0), exact.uu, matrix_diff(quad.uu, exact.uu));
    row("eps_uu", quad.eps_uu(0, 0), exact.eps_uu, matrix_diff(quad.eps_uu, exact.eps_uu));
    row("eps_sq_uu", quad.eps_sq_uu(0, 0), exact.eps_sq_uu,
        matrix_diff(quad.eps_sq_uu, exact.eps_sq_uu));
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

}  // namespace optlat
