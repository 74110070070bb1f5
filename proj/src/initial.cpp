#include "optlat/initial.hpp"

#include <algorithm>
#include <cmath>

#include "optlat/errors.hpp"
#include "optlat/io.hpp"

namespace optlat {

namespace {

// Average over cell i of a function that equals `inside` on [a, b) and
// `outside` elsewhere.
double cell_average(const PeriodicGrid1D& grid, int i, double a, double b, double inside,
                    double outside) {
  const double lo = i * grid.dx();
  const double hi = (i + 1) * grid.dx();
  const double overlap = std::max(0.0, std::min(hi, b) - std::max(lo, a));
  const double frac = overlap / grid.dx();
  return frac * inside + (1.0 - frac) * outside;
}

}  // namespace

State InitialSpec::make_state(int cells) const {
  if (kind == Kind::file) {
    const Snapshot snap = read_snapshot(path);
    if (static_cast<int>(snap.n.size()) != cells) {
      throw ValidationError("snapshot '" + path + "' has " + std::to_string(snap.n.size()) +
                            " cells, grid expects " + std::to_string(cells));
    }
    return State{PeriodicGrid1D(cells), snap.n, snap.W, 0, 0.0};
  }

  const PeriodicGrid1D grid(cells);
  Field n(cells);
  Field W(cells, W0);
  for (int i = 0; i < cells; ++i) {
    const double x = grid.center(i);
    switch (kind) {
      case Kind::step:
        n[i] = cell_average(grid, i, 0.25, 0.75, 0.75, 0.25);
        break;
      case Kind::step2:
        n[i] = cell_average(grid, i, 0.5, 1.0, 0.75, 0.25);
        break;
      case Kind::constant:
        n[i] = n0;
        break;
      case Kind::cosine: {
        const double c = std::cos(2.0 * kPi * mode * x);
        n[i] = n0 + amplitude * c;
        W[i] = W0 + W_amplitude * c;
        break;
      }
      case Kind::file:
        break;
    }
  }
  return State{grid, std::move(n), std::move(W), 0, 0.0};
}

std::string InitialSpec::name() const {
  switch (kind) {
    case Kind::step: return "step";
    case Kind::step2: return "step2";
    case Kind::constant: return "constant";
    case Kind::cosine: return "cosine";
    case Kind::file: return "file:" + path;
  }
  return "unknown";
}

InitialSpec::Kind initial_kind_from_string(const std::string& preset, std::string* path) {
  if (preset == "step") return InitialSpec::Kind::step;
  if (preset == "step2") return InitialSpec::Kind::step2;
  if (preset == "constant") return InitialSpec::Kind::constant;
  if (preset == "cosine") return InitialSpec::Kind::cosine;
  if (preset.rfind("file:", 0) == 0) {
    if (path) *path = preset.substr(5);
    return InitialSpec::Kind::file;
  }
  throw ValidationError("unknown initial preset '" + preset + "'");
}

}  // namespace optlat
