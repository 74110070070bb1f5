#pragma once

// CSV emission and ingestion. Numbers use '.' as decimal separator and the
// shortest representation that round-trips exactly; lines end with '\n'.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "optlat/diagnostics.hpp"
#include "optlat/harness.hpp"
#include "optlat/solver.hpp"

namespace optlat {

std::string format_double(double value);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

inline constexpr std::string_view kSnapshotHeader = "x,n,W,W_tot";
inline constexpr std::string_view kTimeseriesHeader =
    "t,mass,energy_total,variance,n_min,n_max,W_min,W_max,dist_to_steady";
inline constexpr std::string_view kConvergenceHeader = "h,error,observed_order";

std::string snapshot_csv(const State& state, double U);

// "snapshot_t<t>.csv" with t printed to twelve significant digits.
std::string snapshot_filename(double t);

struct Snapshot {
  std::vector<double> x;
  std::vector<double> n;
  std::vector<double> W;
};

// Reads a snapshot written by snapshot_csv. Throws ValidationError on a
// missing file or malformed content.
Snapshot read_snapshot(const std::filesystem::path& path);

std::string timeseries_csv(const std::vector<DiagnosticsRecord>& records);

// One row per step size; the first row leaves observed_order empty.
std::string convergence_csv(const ConvergenceReport& report);

}  // namespace optlat
