#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>

namespace qheat {

// Composite trapezoid on uniform samples.
inline double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

inline double l2_norm(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() * f.front() + f.back() * f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i] * f[i];
  return std::sqrt(s * h);
}

// Adaptive Simpson; serves as the independent quadrature oracle for the
// closed-form integrals frozen in the tests.
namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// A fixed initial subdivision keeps narrow peaks from being missed by the
// first coarse Simpson estimate.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 48, int initial_panels = 16) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  const double w = (b - a) / initial_panels;
  for (int p = 0; p < initial_panels; ++p) {
    const double pa = a + p * w, pb = (p + 1 == initial_panels) ? b : a + (p + 1) * w;
    const double fa = f(pa), fb = f(pb), fm = f(0.5 * (pa + pb));
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::simpson_rec(f, pa, pb, fa, fm, fb, whole, tol / initial_panels,
                                 max_depth);
  }
  return total;
}

}  // namespace qheat
