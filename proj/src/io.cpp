#include "optlat/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "optlat/errors.hpp"

namespace optlat {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ValidationError("malformed number '" + text + "' in " + where);
  return value;
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

std::string snapshot_csv(const State& state, double U) {
  std::string out(kSnapshotHeader);
  out += '\n';
  for (int i = 0; i < state.grid.size(); ++i) {
    const double W_tot = state.W[i] - 0.5 * U * state.n[i] * state.n[i];
    out += format_double(state.grid.center(i)) + ',' + format_double(state.n[i]) + ',' +
           format_double(state.W[i]) + ',' + format_double(W_tot) + '\n';
  }
  return out;
}

std::string snapshot_filename(double t) {
  // Twelve significant digits hide the rounding of k * dt.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", t);
  return "snapshot_t" + std::string(buf) + ".csv";
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("snapshot file '" + path.string() + "' cannot be opened");
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("snapshot '" + path.string() + "' is empty");
  const auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "x" || header[1] != "n" || header[2] != "W")
    throw ValidationError("snapshot '" + path.string() + "' lacks the x,n,W header");
  Snapshot snap;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw ValidationError("snapshot row " + std::to_string(row) + " has the wrong column count");
    const std::string where = path.string() + ":" + std::to_string(row);
    snap.x.push_back(parse_number(cells[0], where));
    snap.n.push_back(parse_number(cells[1], where));
    snap.W.push_back(parse_number(cells[2], where));
  }
  return snap;
}

std::string timeseries_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out(kTimeseriesHeader);
  out += '\n';
  for (const auto& r : records) {
    for (double v : {r.t, r.mass, r.energy_total, r.variance, r.n_min, r.n_max, r.W_min, r.W_max,
                     r.dist_to_steady}) {
      out += format_double(v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out(kConvergenceHeader);
  out += '\n';
  for (std::size_t i = 0; i < report.errors.size(); ++i) {
    out += format_double(report.step_sizes[i]) + ',' + format_double(report.errors[i]) + ',';
    if (i > 0 && i - 1 < report.observed_orders.size())
      out += format_double(report.observed_orders[i - 1]);
    out += '\n';
  }
  return out;
}

}  // namespace optlat
