#ifndef CENSCOPE_ASYMPTOTICS_HPP
#define CENSCOPE_ASYMPTOTICS_HPP

#include <cstdint>

#include "censcope/model.hpp"

namespace censcope {

enum class Norming { NLogNOneThird, NOneThird, NTwoFifths };

struct AsymptoticReport {
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  Norming norming = Norming::NLogNOneThird;
};

// Var(2Z) for the last argmax Z of two-sided Brownian motion minus t^2,
// produced once by chernoff_variance_mc and frozen here.
constexpr double kVar2Z = 1.0524;

// Limit variance of the scaled histogram-type estimator, non-separated case:
// 3 f0 (a^2 + b^2) / (c h (a+b)^2).
double sigma0_sq(double t0, double c, const TargetDistribution& target,
                 const ObservationScheme& scheme);

// Normalizing integral of the separated-case limiting weights; the uniform
// scheme also has a specialized form and the two are required to agree.
double w_tilde(double t0, const ObservationScheme& scheme);

// Limit variance of the scaled histogram-type estimator, separated case.
double sigma_sq_separated(double t0, double c, const TargetDistribution& target,
                          const ObservationScheme& scheme);

// Information functional g1/F0 + k1 + k2 + g2/(1-F0) setting the MLE's n^{1/3}
// norming in the separated case. Closed forms exist for Uniform01 and
// PowerDecay(4); the quadrature path must agree with them to 1e-6.
double xi(double t0, const TargetDistribution& target, const ObservationScheme& scheme);

// Conjectured/limit MSE of the scaled MLE at t0 (pure variance; the MLE's
// asymptotic bias vanishes at this scaling).
double mle_asymptotic_mse(double t0, const TargetDistribution& target,
                          const ObservationScheme& scheme, double chernoff_var = kVar2Z);

struct ChernoffEstimate {
  double var2z = 0.0;     // Var(2Z)
  double std_error = 0.0; // Monte Carlo standard error of var2z
  double mean_z = 0.0;
};

ChernoffEstimate chernoff_variance_mc(double grid_step, double horizon, std::size_t reps,
                                      std::uint64_t seed, int threads = 0);

// Two-point minimax lower-bound constant (6^{1/3}/4) e^{-1/3} (f0^2/h)^{1/3}.
double minimax_constant(double t0, const TargetDistribution& target,
                        const ObservationScheme& scheme);

struct HellingerResult {
  double h_sq = 0.0;          // squared Hellinger distance between q_0 and q_n
  double n_h_sq = 0.0;        // n * H^2
  double n_h_sq_over_c3 = 0.0;  // n * H^2 / c^3 (the c-free normalization)
};

// Numeric squared Hellinger distance for the two-point perturbation around t0,
// non-separated case, by 2-D quadrature refined at the flat-piece breakpoints.
HellingerResult hellinger_sq_numeric(double t0, double c, double n,
                                     const TargetDistribution& target,
                                     const ObservationScheme& scheme);

// Bias/variance/MSE of the scaled histogram-type estimator at the optimal c.
AsymptoticReport birge_asymptotics(double t0, const TargetDistribution& target,
                                   const ObservationScheme& scheme);

}  // namespace censcope

#endif
