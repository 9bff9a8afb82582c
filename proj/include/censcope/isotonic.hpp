#ifndef CENSCOPE_ISOTONIC_HPP
#define CENSCOPE_ISOTONIC_HPP

#include <utility>
#include <vector>

namespace censcope {

// Cusum diagram: points (x_i, y_i) with x strictly increasing, all x_i > 0.
// The origin (0,0) is implicit and always prepended.
struct CusumDiagram {
  std::vector<double> x;
  std::vector<double> y;
};

// Left slope of the greatest convex minorant of {(0,0)} U points, evaluated at
// every point. Output is nondecreasing. Stack-based monotone chain, O(n).
std::vector<double> gcm_left_slopes(const CusumDiagram& diagram);

// Weighted isotonic regression: minimize sum w_i (m_i - y_i)^2 over
// nondecreasing m. Equivalent to GCM slopes of the cusum of (w, w*y).
std::vector<double> weighted_isotonic(const std::vector<double>& y,
                                      const std::vector<double>& w);

// Right-continuous nondecreasing step function on [0,1].
struct StepDistribution {
  std::vector<double> knots;   // strictly increasing
  std::vector<double> values;  // nondecreasing, in [0,1]

  // F(s) with the right-continuous convention; 0 below the first knot.
  double operator()(double s) const;

  // (location, jump) pairs for the strictly positive jumps.
  std::vector<std::pair<double, double>> jumps() const;
};

// One-step current-status MLE: GCM slopes of the cusum of sorted indicators.
// Tied observation times are aggregated into a single diagram point.
StepDistribution current_status_mle(const std::vector<std::pair<double, int>>& sample);

}  // namespace censcope

#endif
