#include "censcope/smle.hpp"

#include <cmath>
#include <stdexcept>

namespace censcope {

double triweight(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  return 35.0 / 32.0 * w * w * w;
}

double integrated_kernel(double u) {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double u3 = u * u * u;
  const double u5 = u3 * u * u;
  const double u7 = u5 * u * u;
  return 35.0 / 32.0 * (u - u3 + 3.0 * u5 / 5.0 - u7 / 7.0) + 0.5;
}

SmleConfig SmleConfig::for_sample_size(std::size_t n) {
  return {std::pow(static_cast<double>(n), -0.2)};
}

namespace {
void check_config(const SmleConfig& config) {
  if (!(config.bandwidth > 0.0 && config.bandwidth < 0.5))
    throw std::invalid_argument("SmleConfig: bandwidth must lie in (0, 1/2)");
}
}  // namespace

double smle_eval(const StepDistribution& mle, double t, const SmleConfig& config) {
  check_config(config);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < mle.knots.size(); ++i) {
    const double mass = mle.values[i] - prev;
    prev = mle.values[i];
    if (mass > 0.0) acc += mass * integrated_kernel((t - mle.knots[i]) / config.bandwidth);
  }
  return acc;
}

double smle_density(const StepDistribution& mle, double t, const SmleConfig& config) {
  check_config(config);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < mle.knots.size(); ++i) {
    const double mass = mle.values[i] - prev;
    prev = mle.values[i];
    if (mass > 0.0) acc += mass * triweight((t - mle.knots[i]) / config.bandwidth);
  }
  return acc / config.bandwidth;
}

}  // namespace censcope
