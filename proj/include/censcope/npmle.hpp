#ifndef CENSCOPE_NPMLE_HPP
#define CENSCOPE_NPMLE_HPP

#include <cstddef>
#include <vector>

#include "censcope/isotonic.hpp"
#include "censcope/model.hpp"

namespace censcope {

// The case-2 log likelihood depends on F only through its values at the
// distinct observation times, so the optimization runs over F at these sites.
struct LikelihoodProblem {
  std::vector<double> sites;  // sorted distinct {t_i} U {u_i}
  // Per observation: site index of t_i, site index of u_i, active indicator 0/1/2.
  std::vector<int> t_index;
  std::vector<int> u_index;
  std::vector<int> which;  // 0: delta1, 1: delta2, 2: delta3

  static LikelihoodProblem build(const Dataset& ds);
  std::size_t n_obs() const { return which.size(); }
};

// Log likelihood of F (values at the problem sites, nondecreasing in [0,1]).
// Returns -inf if an active term has argument <= 0.
double log_likelihood(const std::vector<double>& f_values, const LikelihoodProblem& problem);

// One self-consistency (EM) step in the mass representation; never decreases
// the likelihood. Requires all active terms strictly positive.
std::vector<double> em_step(const std::vector<double>& f_values, const LikelihoodProblem& problem);

struct MleResult {
  StepDistribution estimate;
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  double duality_gap = 0.0;
  bool converged = false;
};

struct IcmOptions {
  double tol = 1e-8;           // Fenchel characterization tolerance
  double rel_tol = 1e-12;      // relative likelihood-change stop
  std::size_t max_iter = 5000;
};

// Case-2 NPMLE via the modified iterative convex minorant algorithm: diagonal
// quadratic approximation projected by weighted GCM, with Armijo backtracking.
MleResult npmle_icm(const Dataset& ds, const IcmOptions& options = {});

// Fenchel certificate in the mass representation: max_j d_j / n - 1 where
// d_j sums 1/P_i over observations whose active interval covers site j.
// Zero exactly at the maximizer, positive elsewhere.
double fenchel_gap(const std::vector<double>& f_values, const LikelihoodProblem& problem);

// Run EM from the given start until the likelihood gain over `patience`
// consecutive steps drops below `tol`; returns final F values at the sites.
std::vector<double> em_converge(std::vector<double> f_values, const LikelihoodProblem& problem,
                                double tol = 1e-13, std::size_t max_iter = 200000);

// Interior starting point: the naive empirical estimator clipped to
// [1/(2n), 1 - 1/(2n)].
std::vector<double> naive_start(const LikelihoodProblem& problem);

}  // namespace censcope

#endif
