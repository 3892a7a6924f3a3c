#pragma once

#include <cmath>
#include <cstdint>

namespace hftkin::test {

// Composite Simpson rule with n (even) panels. Kept independent of the
// library's Gauss-Kronrod so the two can check each other.
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return acc * h / 3.0;
}

// Simpson on pieces split at the listed kinks so that kinked integrands still
// converge at fourth order.
template <class F, class... K>
double simpson_pieces(F&& f, int n, double a, K... rest) {
  const double pts[] = {a, static_cast<double>(rest)...};
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < sizeof...(K) + 1; ++i) acc += simpson(f, pts[i], pts[i + 1], n);
  return acc;
}

}  // namespace hftkin::test
