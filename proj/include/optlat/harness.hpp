#pragma once

// Grid- and step-refinement studies against a finer reference run of the
// same scheme.

#include <span>
#include <vector>

#include "optlat/initial.hpp"
#include "optlat/solver.hpp"

namespace optlat {

enum class StudyAxis { time, space };
enum class ErrorVariable { n, W, both };

const char* to_string(StudyAxis axis);
const char* to_string(ErrorVariable variable);

struct ConvergenceReport {
  StudyAxis axis = StudyAxis::space;
  std::vector<double> step_sizes;       // strictly decreasing
  std::vector<double> errors;
  std::vector<double> observed_orders;  // log2 ratios between successive halvings
  double fitted_order = 0.0;            // least-squares log-log slope; NaN if undefined
  bool degenerate = false;              // every error is zero
};

// Averages each block of fine cells onto the enclosing coarse cell.
std::vector<double> restrict_average(std::span<const double> fine, int coarse_cells);

// Least-squares slope of log(error) against log(h).
double fit_loglog_slope(std::span<const double> h, std::span<const double> errors);

// Each grid must divide ref_cells and be strictly coarser. Runs use the base
// dt and t_final; the error is the l2 norm at t_final against the cell-averaged
// reference. Runs execute concurrently when `parallel` is set.
ConvergenceReport spatial_study(const SolverConfig& base, const ModelParams& params,
                                const InitialSpec& initial, std::span<const int> grids,
                                int ref_cells, ErrorVariable variable = ErrorVariable::n,
                                bool parallel = true);

// All runs share `cells`. Each dt must be an integer multiple of ref_dt and
// divide t_final; the error is the space-time l2 norm over the run.
ConvergenceReport temporal_study(const SolverConfig& base, const ModelParams& params,
                                 const InitialSpec& initial, int cells,
                                 std::span<const double> dts, double ref_dt,
                                 ErrorVariable variable = ErrorVariable::n,
                                 bool parallel = true);

}  // namespace optlat
