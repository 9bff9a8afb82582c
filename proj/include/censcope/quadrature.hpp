#ifndef CENSCOPE_QUADRATURE_HPP
#define CENSCOPE_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace censcope {

namespace detail {

template <typename F>
double simpson(F&& f, double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F&& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  // Accept once the correction is at roundoff level; tighter subdivision only
  // churns on noise in the Simpson sums.
  const double noise = 1e-15 * (std::abs(left) + std::abs(right)) +
                       1e-15 * (b - a) * (std::abs(fa) + std::abs(fm) + std::abs(fb));
  if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= noise)
    return left + right + delta / 15.0;
  if (depth <= 0) throw std::runtime_error("adaptive Simpson: max depth reached");
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-10, int max_depth = 60) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = detail::simpson(f, a, b, fa, fm, fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Same, but the interval is first split at interior breakpoints (kinks).
template <typename F>
double integrate_with_breaks(F&& f, double a, double b, const std::vector<double>& breaks,
                             double tol = 1e-10) {
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate(f, pts[i], pts[i + 1], tol / static_cast<double>(pts.size()));
  return total;
}

}  // namespace censcope

#endif
