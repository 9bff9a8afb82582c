#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "censcope/npmle.hpp"
#include "censcope/rng.hpp"

using namespace censcope;

namespace {

Dataset random_dataset(std::size_t n, bool separated, std::uint64_t seed) {
  const auto target = TargetDistribution::uniform();
  const auto scheme =
      separated ? ObservationScheme::separated(0.1) : ObservationScheme::non_separated();
  return generate_dataset(target, scheme, n, seed);
}

// Exhaustive search over nondecreasing F values restricted to the lattice
// {0, 1/G, ..., 1} at the problem sites. Exact up to the lattice resolution.
double grid_max_log_lik(const LikelihoodProblem& pr, int G) {
  const int m = static_cast<int>(pr.sites.size());
  std::vector<int> level(m, 0);
  double best = -1e300;
  for (;;) {
    std::vector<double> f(m);
    for (int j = 0; j < m; ++j) f[j] = static_cast<double>(level[j]) / G;
    const double ll = log_likelihood(f, pr);
    if (ll > best) best = ll;
    // advance to the next nondecreasing tuple
    int j = m - 1;
    while (j >= 0 && level[j] == G) --j;
    if (j < 0) break;
    ++level[j];
    for (int k = j + 1; k < m; ++k) level[k] = level[j];
  }
  return best;
}

}  // namespace

TEST_CASE("icm attains the brute-force grid maximum on tiny datasets") {
  int done = 0;
  for (std::uint64_t seed = 1; done < 60; ++seed) {
    const bool sep = seed % 2 == 0;
    const std::size_t n = 1 + seed % 4;
    const Dataset ds = random_dataset(n, sep, seed);
    const auto pr = LikelihoodProblem::build(ds);
    if (pr.sites.size() > 6) continue;
    const MleResult fit = npmle_icm(ds);
    const double oracle = grid_max_log_lik(pr, 24);
    CHECK(fit.log_likelihood >= oracle - 1e-6);
    ++done;
  }
}

TEST_CASE("icm log-likelihood agrees with converged EM") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Dataset ds = random_dataset(100, seed % 2 == 0, seed);
    const auto pr = LikelihoodProblem::build(ds);
    const MleResult fit = npmle_icm(ds);
    const auto em = em_converge(naive_start(pr), pr);
    CHECK(std::abs(fit.log_likelihood - log_likelihood(em, pr)) <= 1e-8);
    CHECK(fit.converged);
  }
}

TEST_CASE("em step never decreases the likelihood") {
  CounterRng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset ds = random_dataset(60, trial % 2 == 0, 1000 + trial);
    const auto pr = LikelihoodProblem::build(ds);
    // random interior monotone start
    std::vector<double> f(pr.sites.size());
    double acc = 0.0;
    for (double& v : f) {
      acc += rng.uniform();
      v = acc;
    }
    for (double& v : f) v = 0.02 + 0.96 * v / (acc + 1.0);
    double prev = log_likelihood(f, pr);
    for (int it = 0; it < 50; ++it) {
      f = em_step(f, pr);
      const double ll = log_likelihood(f, pr);
      CHECK(ll >= prev - 1e-10);
      prev = ll;
    }
  }
}

TEST_CASE("fenchel gap is near zero at the optimum and positive away from it") {
  const Dataset ds = random_dataset(200, false, 5);
  const auto pr = LikelihoodProblem::build(ds);
  const MleResult fit = npmle_icm(ds);
  CHECK(fenchel_gap(fit.estimate.values, pr) <= 1e-6);

  auto off = fit.estimate.values;
  for (double& v : off) v = 0.2 + 0.6 * v;  // feasible but not optimal
  CHECK(fenchel_gap(off, pr) > 1e-3);
}

TEST_CASE("estimate is a valid distribution function on the observation sites") {
  for (std::uint64_t seed : {11, 12, 13}) {
    const Dataset ds = random_dataset(300, seed == 12, seed);
    const MleResult fit = npmle_icm(ds);
    double prev = 0.0;
    for (double v : fit.estimate.values) {
      CHECK(v >= prev - 1e-14);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("log-likelihood is -inf when an active term vanishes") {
  const Dataset ds = random_dataset(10, false, 3);
  const auto pr = LikelihoodProblem::build(ds);
  const std::vector<double> zero(pr.sites.size(), 0.0);
  CHECK(log_likelihood(zero, pr) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS(em_step(zero, pr));
}

TEST_CASE("degenerate inputs are rejected") {
  Dataset empty;
  CHECK_THROWS_AS(npmle_icm(empty), std::invalid_argument);
  const Dataset ds = random_dataset(10, false, 3);
  IcmOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(npmle_icm(ds, bad), std::invalid_argument);
}
