#include "optlat/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

#include "optlat/errors.hpp"

namespace optlat {

namespace {

// Non-periodic Thomas sweep; a[0] and c[n-1] are ignored.
void thomas(std::span<const double> a, std::span<const double> b, std::span<const double> c,
            std::span<const double> r, std::span<double> x, std::vector<double>& work) {
  const std::size_t n = b.size();
  work.assign(n, 0.0);
  double pivot = b[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw ZeroPivot("zero pivot in row 0", 0);
  x[0] = r[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    work[i] = c[i - 1] / pivot;
    pivot = b[i] - a[i] * work[i];
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw ZeroPivot("zero pivot in row " + std::to_string(i), i);
    x[i] = (r[i] - a[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= work[i + 1] * x[i + 1];
}

}  // namespace

std::vector<double> cyclic_tridiagonal_solve(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> sup,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n || rhs.size() != n)
    throw std::invalid_argument("cyclic tridiagonal operands must have equal length");
  if (n < 3) throw std::invalid_argument("cyclic tridiagonal solve needs at least 3 rows");

  const double corner_top = sub[0];        // couples row 0 to x[n-1]
  const double corner_bottom = sup[n - 1]; // couples row n-1 to x[0]
  const double shift = -diag[0];
  if (shift == 0.0) throw ZeroPivot("zero diagonal in row 0", 0);

  std::vector<double> b(diag.begin(), diag.end());
  b[0] -= shift;
  b[n - 1] -= corner_bottom * corner_top / shift;

  std::vector<double> work;
  std::vector<double> x(n);
  thomas(sub, b, sup, rhs, x, work);

  std::vector<double> u(n, 0.0);
  u[0] = shift;
  u[n - 1] = corner_bottom;
  std::vector<double> z(n);
  thomas(sub, b, sup, u, z, work);

  const double denom = 1.0 + z[0] + corner_top * z[n - 1] / shift;
  if (denom == 0.0 || !std::isfinite(denom))
    throw ZeroPivot("singular periodic correction", n - 1);
  const double factor = (x[0] + corner_top * x[n - 1] / shift) / denom;
  for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];
  return x;
}

}  // namespace optlat
