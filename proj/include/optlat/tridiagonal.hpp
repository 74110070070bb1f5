#pragma once

#include <span>
#include <vector>

namespace optlat {

// Solves the periodic three-point system
//   sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i],  indices mod N,
// by Thomas elimination with a Sherman-Morrison correction for the wrap.
// Throws ZeroPivot when elimination meets a zero pivot.
std::vector<double> cyclic_tridiagonal_solve(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> sup,
                                             std::span<const double> rhs);

}  // namespace optlat
