#ifndef CENSCOPE_MODEL_HPP
#define CENSCOPE_MODEL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "censcope/rng.hpp"

namespace censcope {

enum class TargetFamily { Uniform01, PowerDecay };

// Distribution of the unobservable X on [0,1]: either Uniform(0,1) or
// F0(x) = 1 - (1-x)^k.
struct TargetDistribution {
  TargetFamily family = TargetFamily::Uniform01;
  int power = 2;  // k, only meaningful for PowerDecay

  static TargetDistribution uniform() { return {TargetFamily::Uniform01, 0}; }
  static TargetDistribution power_decay(int k) { return {TargetFamily::PowerDecay, k}; }

  double cdf(double x) const;
  double density(double x) const;
  double quantile(double p) const;
};

// eval_target: (F0(x), f0(x)); throws std::domain_error for x outside [0,1].
std::array<double, 2> eval_target(const TargetDistribution& dist, double x);

enum class SchemeKind { NonSeparated, Separated };

// Law of the observation pair (T,U) on the upper triangle of the unit square.
struct ObservationScheme {
  SchemeKind kind = SchemeKind::NonSeparated;
  double epsilon = 0.0;  // minimal gap U - T for the separated case

  static ObservationScheme non_separated() { return {SchemeKind::NonSeparated, 0.0}; }
  static ObservationScheme separated(double eps);

  // Joint density h(t,u); zero outside the support triangle.
  double density(double t, double u) const;
  // First marginal density g1 (of T) and second marginal g2 (of U).
  double marginal1(double t) const;
  double marginal2(double u) const;
  // h on the diagonal, h(t,t) = lim_{u -> t+} h(t,u); only for NonSeparated.
  double diagonal_density() const { return 2.0; }
};

std::array<double, 3> scheme_density(const ObservationScheme& s, double t, double u);

struct CensoredObservation {
  double t = 0.0;
  double u = 0.0;
  int d1 = 0, d2 = 0, d3 = 0;
};

// (1,0,0) if x <= t, (0,1,0) if t < x <= u, (0,0,1) if x > u.
std::array<int, 3> censor_indicator(double x, double t, double u);

// Exact rejection-free draw: two iid uniforms sorted for the non-separated
// triangle, affinely mapped onto the epsilon-triangle when separated.
std::array<double, 2> draw_observation_pair(const ObservationScheme& s, CounterRng& rng);

struct Dataset {
  std::vector<CensoredObservation> observations;
  std::uint64_t seed = 0;
  ObservationScheme scheme;
  TargetDistribution target;

  std::size_t size() const { return observations.size(); }
};

Dataset generate_dataset(const TargetDistribution& target, const ObservationScheme& scheme,
                         std::size_t n, std::uint64_t seed);

// CSV with header `t,u,d1,d2,d3`, 17 significant digits.
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

}  // namespace censcope

#endif
