#ifndef CENSCOPE_SMLE_HPP
#define CENSCOPE_SMLE_HPP

#include "censcope/isotonic.hpp"

namespace censcope {

// Triweight kernel K(u) = (35/32)(1-u^2)^3 on [-1,1].
double triweight(double u);

// IK(u) = integral of K over (-inf, u].
double integrated_kernel(double u);

// Exact value of the integral of K^2 (= 350/429).
constexpr double kTriweightSquareIntegral = 350.0 / 429.0;

struct SmleConfig {
  double bandwidth = 0.2;  // must lie in (0, 1/2)

  static SmleConfig for_sample_size(std::size_t n);  // b = n^{-1/5}
};

// Kernel-smoothed distribution estimate: sum of jump masses times IK.
double smle_eval(const StepDistribution& mle, double t, const SmleConfig& config);

// Kernel-smoothed density estimate: sum of jump masses times K(.)/b.
double smle_density(const StepDistribution& mle, double t, const SmleConfig& config);

}  // namespace censcope

#endif
