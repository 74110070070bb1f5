#pragma once

// INI-style run configuration.
//
//   [model]        d, eps0, U0 (or U), eta, tau0, delta
//   [solver]       dt, t_final, scheme, alpha, gamma, eps_reg, picard_tol, picard_max
//   [grid]         N
//   [initial]      preset (step | step2 | constant | cosine | file:<path>),
//                  n0, W0, amplitude, mode, W_amplitude
//   [output]       dir, times, timeseries_stride, plot
//   [convergence]  axis, grids, ref_N, dts, ref_dt, cells, variable, parallel
//   [quadrature]   M
//   [query]        lambda0, lambda1, n, E
//   [check]        conservation_tol, steady_tol
//
// Lists are comma separated. Numbers may be written as p/q. Command-line
// overrides `--section.key=value` take precedence over the file.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optlat/harness.hpp"
#include "optlat/initial.hpp"
#include "optlat/kinetics.hpp"
#include "optlat/solver.hpp"

namespace optlat {

enum class Command { simulate, convergence, moments, invert, verify_integrals };

struct OutputOptions {
  std::string dir = "out";
  std::vector<double> times;
  long timeseries_stride = 1;
  bool plot = false;

  bool operator==(const OutputOptions&) const = default;
};

struct ConvergenceOptions {
  StudyAxis axis = StudyAxis::space;
  std::vector<int> grids{105, 210, 420, 840};
  int ref_N = 1680;
  std::vector<double> dts{1.0 / 315, 1.0 / 630, 1.0 / 1260, 1.0 / 2520};
  double ref_dt = 1.0 / 5040;
  int cells = 105;
  ErrorVariable variable = ErrorVariable::n;
  bool parallel = true;

  bool operator==(const ConvergenceOptions&) const = default;
};

struct QueryOptions {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double n = 0.5;
  double E = 0.0;

  bool operator==(const QueryOptions&) const = default;
};

struct CheckOptions {
  double conservation_tol = 1e-10;
  std::optional<double> steady_tol;

  bool operator==(const CheckOptions&) const = default;
};

struct RunConfig {
  // With eps0 = 1/sqrt(2) in one dimension U equals U0.
  ModelParams model{1, 0.70710678118654752, 0.0, 1.0, 1.0, 1e-3};
  SolverConfig solver;
  bool dt_given = false;
  bool t_final_given = false;
  int N = 100;
  InitialSpec initial;
  OutputOptions output;
  ConvergenceOptions convergence;
  int quadrature_M = 64;
  QueryOptions query;
  CheckOptions check;

  bool operator==(const RunConfig&) const = default;
};

using Override = std::pair<std::string, std::string>;  // "section.key", value

// Splits "--section.key=value" into its parts; throws ParseError otherwise.
Override parse_override(const std::string& arg);

// Parses INI text plus overrides. Throws ParseError (with the 1-based line, 0
// for overrides) on syntax errors, unknown keys and malformed values.
RunConfig parse_config_text(const std::string& text, const std::vector<Override>& overrides = {});

RunConfig parse_config_file(const std::filesystem::path& path,
                            const std::vector<Override>& overrides = {});

// Checks module invariants, referenced files, and the keys `command` needs.
// Throws ValidationError.
void validate_config(const RunConfig& config, Command command);

std::string serialize_config(const RunConfig& config);

}  // namespace optlat
