#include "censcope/isotonic.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace censcope {

std::vector<double> gcm_left_slopes(const CusumDiagram& diagram) {
  const std::size_t n = diagram.x.size();
  if (n == 0 || diagram.y.size() != n)
    throw std::invalid_argument("gcm_left_slopes: empty or inconsistent diagram");
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = (i == 0) ? 0.0 : diagram.x[i - 1];
    if (!(diagram.x[i] > prev))
      throw std::invalid_argument("gcm_left_slopes: x must be strictly increasing and > 0");
  }

  // Lower convex hull of (0,0) and the diagram points, left to right.
  std::vector<double> hx{0.0}, hy{0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double px = diagram.x[i], py = diagram.y[i];
    while (hx.size() >= 2) {
      const std::size_t m = hx.size();
      const double cross = (hx[m - 1] - hx[m - 2]) * (py - hy[m - 2]) -
                           (px - hx[m - 2]) * (hy[m - 1] - hy[m - 2]);
      if (cross <= 0.0)
        hx.pop_back(), hy.pop_back();
      else
        break;
    }
    hx.push_back(px);
    hy.push_back(py);
  }

  // Left slope at x: slope of the hull segment whose half-open interval
  // (hx[s], hx[s+1]] contains x.
  std::vector<double> slopes(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 2 < hx.size() && diagram.x[i] > hx[seg + 1]) ++seg;
    slopes[i] = (hy[seg + 1] - hy[seg]) / (hx[seg + 1] - hx[seg]);
  }
  return slopes;
}

std::vector<double> weighted_isotonic(const std::vector<double>& y,
                                      const std::vector<double>& w) {
  const std::size_t n = y.size();
  if (n == 0 || w.size() != n)
    throw std::invalid_argument("weighted_isotonic: empty or inconsistent input");
  CusumDiagram d;
  d.x.resize(n);
  d.y.resize(n);
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] > 0.0)) throw std::invalid_argument("weighted_isotonic: weights must be > 0");
    cx += w[i];
    cy += w[i] * y[i];
    d.x[i] = cx;
    d.y[i] = cy;
  }
  return gcm_left_slopes(d);
}

double StepDistribution::operator()(double s) const {
  auto it = std::upper_bound(knots.begin(), knots.end(), s);
  if (it == knots.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - knots.begin()) - 1];
}

std::vector<std::pair<double, double>> StepDistribution::jumps() const {
  std::vector<std::pair<double, double>> out;
  double prev = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double j = values[i] - prev;
    if (j > 0.0) out.emplace_back(knots[i], j);
    prev = values[i];
  }
  return out;
}

StepDistribution current_status_mle(const std::vector<std::pair<double, int>>& sample) {
  if (sample.empty()) throw std::invalid_argument("current_status_mle: empty sample");
  std::map<double, std::pair<int, int>> agg;  // t -> (count, sum delta)
  for (const auto& [t, delta] : sample) {
    auto& cell = agg[t];
    cell.first += 1;
    cell.second += delta;
  }
  CusumDiagram d;
  StepDistribution out;
  double cx = 0.0, cy = 0.0;
  for (const auto& [t, cell] : agg) {
    cx += cell.first;
    cy += cell.second;
    d.x.push_back(cx);
    d.y.push_back(cy);
    out.knots.push_back(t);
  }
  out.values = gcm_left_slopes(d);
  for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace censcope
