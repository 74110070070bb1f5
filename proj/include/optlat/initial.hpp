#pragma once

#include <string>

#include "optlat/solver.hpp"

namespace optlat {

// Initial-condition presets.
//   step     n = 3/4 on [1/4, 3/4], 1/4 elsewhere
//   step2    n = 1/4 on [0, 1/2), 3/4 on [1/2, 1)
//   constant n = n0
//   cosine   n = n0 + amplitude cos(2 pi mode x)
//   file     snapshot CSV (x,n,W[,W_tot]) re-ingested verbatim
// W is W0 (+ W_amplitude cos(2 pi mode x) for the cosine preset).
struct InitialSpec {
  enum class Kind { step, step2, constant, cosine, file };

  Kind kind = Kind::step;
  double n0 = 0.5;
  double W0 = 1.0;
  double amplitude = 0.1;
  int mode = 1;
  double W_amplitude = 0.0;
  std::string path;

  // Piecewise-constant presets use exact cell averages, which coincide with
  // cell-center samples whenever the jumps fall on cell faces.
  State make_state(int cells) const;

  std::string name() const;

  bool operator==(const InitialSpec&) const = default;
};

// Parses "step", "step2", "constant", "cosine" or "file:<path>".
InitialSpec::Kind initial_kind_from_string(const std::string& preset, std::string* path);

}  // namespace optlat
