#pragma once

// Subcommand implementations behind the optlat executable. Each returns a
// process exit status and reports failures as one structured line on `err`.

#include <ostream>

#include "optlat/config.hpp"

namespace optlat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheck = 4;

// Writes snapshot_t<t>.csv for every output state and timeseries.csv into
// output.dir. With `check`, also verifies conservation, bounds and (when
// check.steady_tol is set) closeness to the predicted steady state.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err,
                 bool check = false);

// Writes convergence.csv and prints a one-line summary.
int cmd_convergence(const RunConfig& config, std::ostream& out, std::ostream& err);

// n,E at query.lambda0, query.lambda1.
int cmd_moments(const RunConfig& config, std::ostream& out, std::ostream& err);

// lambda0,lambda1 recovering query.n, query.E.
int cmd_invert(const RunConfig& config, std::ostream& out, std::ostream& err);

// family,quadrature,closed_form,abs_diff for the four band integrals.
int cmd_verify_integrals(const RunConfig& config, std::ostream& out, std::ostream& err);

// Maps an exception to its exit status and writes the structured error line.
int report_failure(const std::exception& e, std::ostream& err);

}  // namespace optlat
