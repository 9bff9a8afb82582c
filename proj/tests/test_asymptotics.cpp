#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "censcope/asymptotics.hpp"
#include "censcope/rng.hpp"

using namespace censcope;

namespace {

const TargetDistribution kUniform = TargetDistribution::uniform();
const TargetDistribution kPower4 = TargetDistribution::power_decay(4);
const ObservationScheme kNonSep = ObservationScheme::non_separated();

}  // namespace

TEST_CASE("non-separated variance has the closed form 3 f0 (a^2+b^2) / (c h (a+b)^2)") {
  // uniform target: a^2 = min(2, 2(1-t)) = 2(1-t), b^2 = 2t at the anchor
  for (double t0 : {0.3, 0.5, 0.62}) {
    const double a2 = 2.0 * (1.0 - t0), b2 = 2.0 * t0;
    const double ab = std::sqrt(a2) + std::sqrt(b2);
    const double expect = 3.0 * (a2 + b2) / (2.0 * ab * ab);
    CHECK(sigma0_sq(t0, 1.0, kUniform, kNonSep) == doctest::Approx(expect).epsilon(1e-12));
  }
  // exact 1/c scaling
  CHECK(sigma0_sq(0.4, 2.0, kUniform, kNonSep) ==
        doctest::Approx(0.5 * sigma0_sq(0.4, 1.0, kUniform, kNonSep)).epsilon(1e-12));
  CHECK_THROWS_AS(sigma0_sq(0.4, 1.0, kUniform, ObservationScheme::separated(0.1)),
                  std::domain_error);
}

TEST_CASE("separated constants agree across their independent evaluation paths") {
  // w_tilde, sigma_sq_separated and xi each carry a built-in second route
  // (closed form or specialized integral) and throw if the routes disagree.
  CounterRng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = 0.02 + 0.1 * rng.uniform();
    const double t0 = 2.0 * eps + (1.0 - 4.0 * eps) * rng.uniform();
    const auto scheme = ObservationScheme::separated(eps);
    CHECK(w_tilde(t0, scheme) > 0.0);
    CHECK(sigma_sq_separated(t0, 1.0, kUniform, scheme) > 0.0);
    CHECK(xi(t0, kUniform, scheme) > 0.0);
    CHECK(xi(t0, kPower4, scheme) > 0.0);
  }
}

TEST_CASE("separated constants match frozen reference values at epsilon 0.1") {
  const auto sep = ObservationScheme::separated(0.1);
  CHECK(w_tilde(0.3, sep) == doctest::Approx(1.782477).epsilon(1e-5));
  CHECK(w_tilde(0.5, sep) == doctest::Approx(1.792561).epsilon(1e-5));
  CHECK(sigma_sq_separated(0.3, 1.0, kUniform, sep) == doctest::Approx(0.152235).epsilon(1e-4));
  CHECK(xi(0.3, kUniform, sep) == doctest::Approx(13.161078).epsilon(1e-5));
  CHECK(xi(0.3, kPower4, sep) == doctest::Approx(12.535724).epsilon(1e-5));
  // 1/c scaling again
  CHECK(sigma_sq_separated(0.3, 2.0, kUniform, sep) ==
        doctest::Approx(0.5 * 0.152235).epsilon(1e-4));
}

TEST_CASE("mle asymptotic mse uses the chernoff variance with the right norming") {
  const double expect_ns = kVar2Z * std::pow(0.75 / 2.0, 2.0 / 3.0);
  CHECK(mle_asymptotic_mse(0.5, kUniform, kNonSep) == doctest::Approx(expect_ns).epsilon(1e-12));
  // paper-scale back-check: about 0.55 for the uniform non-separated model
  CHECK(mle_asymptotic_mse(0.5, kUniform, kNonSep) == doctest::Approx(0.55).epsilon(0.02));

  const auto sep = ObservationScheme::separated(0.1);
  const double x = xi(0.4, kPower4, sep);
  const double f0 = kPower4.density(0.4);
  CHECK(mle_asymptotic_mse(0.4, kPower4, sep) ==
        doctest::Approx(kVar2Z * std::pow(f0 / (2.0 * x), 2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("minimax lower-bound constant is location free for the uniform model") {
  const double expect = std::cbrt(6.0) / 4.0 * std::exp(-1.0 / 3.0) * std::cbrt(0.5);
  for (double t0 : {0.3, 0.5, 0.7})
    CHECK(minimax_constant(t0, kUniform, kNonSep) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(minimax_constant(0.5, kUniform, kNonSep) == doctest::Approx(0.258354).epsilon(1e-5));
  CHECK_THROWS(minimax_constant(0.5, kUniform, ObservationScheme::separated(0.1)));
}

TEST_CASE("hellinger perturbation scales like the cube of the binwidth constant") {
  // n H^2 / c^3 varies only through the log factor: halving c at fixed n moves
  // it by far less than the c^3 normalization it divides out
  const auto r1 = hellinger_sq_numeric(0.5, 1.0, 1e4, kUniform, kNonSep);
  const auto r2 = hellinger_sq_numeric(0.5, 0.5, 1e4, kUniform, kNonSep);
  CHECK(r1.h_sq > 0.0);
  CHECK(r2.h_sq > 0.0);
  CHECK(r1.n_h_sq_over_c3 == doctest::Approx(r2.n_h_sq_over_c3).epsilon(0.15));

  // along the n-sequence the normalized distance stays bounded and positive
  double prev = 1e300;
  for (double n : {1e3, 1e4, 1e5, 1e6}) {
    const auto r = hellinger_sq_numeric(0.5, 1.0, n, kUniform, kNonSep);
    CHECK(r.n_h_sq_over_c3 > 0.05);
    CHECK(r.n_h_sq_over_c3 < 0.5);
    CHECK(r.n_h_sq_over_c3 < prev + 1e-12);  // slowly decreasing in n
    prev = r.n_h_sq_over_c3;
  }
}

TEST_CASE("bias variance and mse are consistent at the optimal binwidth") {
  for (double t0 : {0.3, 0.5}) {
    const auto rep = birge_asymptotics(t0, kUniform, kNonSep);
    CHECK(rep.mse == doctest::Approx(rep.bias * rep.bias + rep.variance).epsilon(1e-12));
    CHECK(rep.norming == Norming::NLogNOneThird);
    // at the optimum the bias-squared is half the variance
    CHECK(rep.bias * rep.bias == doctest::Approx(0.5 * rep.variance).epsilon(1e-10));
  }
  const auto sep_rep = birge_asymptotics(0.3, kUniform, ObservationScheme::separated(0.1));
  CHECK(sep_rep.norming == Norming::NOneThird);
  // bias^2 + variance at the optimal c: 0.6727^2/4 + 0.1522/0.6727
  CHECK(sep_rep.mse == doctest::Approx(0.3395).epsilon(2e-3));
}

TEST_CASE("chernoff monte carlo validates its inputs") {
  CHECK_THROWS_AS(chernoff_variance_mc(0.05, 3.0, 200000, 1), std::invalid_argument);
  CHECK_THROWS_AS(chernoff_variance_mc(0.005, 1.0, 200000, 1), std::invalid_argument);
  CHECK_THROWS_AS(chernoff_variance_mc(0.005, 3.0, 100, 1), std::invalid_argument);
}
