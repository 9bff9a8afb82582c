#include "censcope/npmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace censcope {

namespace {

constexpr double kTermFloor = 1e-10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Masses over sites plus a tail atom above the largest site; F_j = cumsum.
std::vector<double> masses_from_values(const std::vector<double>& f) {
  std::vector<double> p(f.size() + 1);
  double prev = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    p[j] = f[j] - prev;
    prev = f[j];
  }
  p.back() = 1.0 - prev;
  return p;
}

std::vector<double> values_from_masses(const std::vector<double>& p) {
  std::vector<double> f(p.size() - 1);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    acc += p[j];
    f[j] = acc;
  }
  return f;
}

// Active probability of observation i given cumulative masses C (C_j = F(site_j)).
double active_prob(const LikelihoodProblem& pr, std::size_t i, const std::vector<double>& f) {
  switch (pr.which[i]) {
    case 0: return f[pr.t_index[i]];
    case 1: return f[pr.u_index[i]] - f[pr.t_index[i]];
    default: return 1.0 - f[pr.u_index[i]];
  }
}

void check_monotone(const std::vector<double>& f) {
  double prev = 0.0;
  for (double v : f) {
    if (v < prev - 1e-14 || v < -1e-14 || v > 1.0 + 1e-14)
      throw std::invalid_argument("F values must be nondecreasing in [0,1]");
    prev = v;
  }
}

}  // namespace

LikelihoodProblem LikelihoodProblem::build(const Dataset& ds) {
  LikelihoodProblem pr;
  pr.sites.reserve(2 * ds.size());
  for (const auto& o : ds.observations) {
    pr.sites.push_back(o.t);
    pr.sites.push_back(o.u);
  }
  std::sort(pr.sites.begin(), pr.sites.end());
  pr.sites.erase(std::unique(pr.sites.begin(), pr.sites.end()), pr.sites.end());
  auto index_of = [&pr](double v) {
    return static_cast<int>(std::lower_bound(pr.sites.begin(), pr.sites.end(), v) -
                            pr.sites.begin());
  };
  pr.t_index.reserve(ds.size());
  pr.u_index.reserve(ds.size());
  pr.which.reserve(ds.size());
  for (const auto& o : ds.observations) {
    pr.t_index.push_back(index_of(o.t));
    pr.u_index.push_back(index_of(o.u));
    pr.which.push_back(o.d1 ? 0 : (o.d2 ? 1 : 2));
  }
  return pr;
}

double log_likelihood(const std::vector<double>& f_values, const LikelihoodProblem& problem) {
  check_monotone(f_values);
  double ll = 0.0;
  for (std::size_t i = 0; i < problem.n_obs(); ++i) {
    const double p = active_prob(problem, i, f_values);
    if (p <= 0.0) return kNegInf;
    ll += std::log(p);
  }
  return ll;
}

namespace {

// d_j = sum over observations whose active set covers mass index j of 1/P_i,
// accumulated with a difference array; also returns the likelihood.
struct FenchelScores {
  std::vector<double> d;
  double log_lik = 0.0;
  bool degenerate = false;
};

FenchelScores fenchel_scores(const std::vector<double>& f, const LikelihoodProblem& pr) {
  const std::size_t m = pr.sites.size();
  FenchelScores out;
  std::vector<double> diff(m + 2, 0.0);
  for (std::size_t i = 0; i < pr.n_obs(); ++i) {
    const double p = active_prob(pr, i, f);
    if (p <= 0.0) {
      out.degenerate = true;
      out.log_lik = kNegInf;
      return out;
    }
    out.log_lik += std::log(p);
    const double inv = 1.0 / p;
    std::size_t lo, hi;  // inclusive range of mass indices, tail atom is index m
    switch (pr.which[i]) {
      case 0: lo = 0; hi = static_cast<std::size_t>(pr.t_index[i]); break;
      case 1:
        lo = static_cast<std::size_t>(pr.t_index[i]) + 1;
        hi = static_cast<std::size_t>(pr.u_index[i]);
        break;
      default: lo = static_cast<std::size_t>(pr.u_index[i]) + 1; hi = m; break;
    }
    diff[lo] += inv;
    diff[hi + 1] -= inv;
  }
  out.d.resize(m + 1);
  double acc = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    acc += diff[j];
    out.d[j] = acc;
  }
  return out;
}

}  // namespace

double fenchel_gap(const std::vector<double>& f_values, const LikelihoodProblem& problem) {
  const auto scores = fenchel_scores(f_values, problem);
  if (scores.degenerate) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(problem.n_obs());
  double dmax = 0.0;
  for (double dj : scores.d) dmax = std::max(dmax, dj);
  return std::max(0.0, dmax / n - 1.0);
}

std::vector<double> em_step(const std::vector<double>& f_values,
                            const LikelihoodProblem& problem) {
  check_monotone(f_values);
  const auto scores = fenchel_scores(f_values, problem);
  if (scores.degenerate)
    throw std::runtime_error("em_step: degenerate F (an active term is zero); restart interior");
  auto p = masses_from_values(f_values);
  const double n = static_cast<double>(problem.n_obs());
  // Rounding can leave masses at -1e-17; clamping keeps the update monotone.
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::max(p[j], 0.0) * scores.d[j] / n;
  auto f = values_from_masses(p);
  for (double& v : f) v = std::min(v, 1.0);
  return f;
}

std::vector<double> em_converge(std::vector<double> f_values, const LikelihoodProblem& problem,
                                double tol, std::size_t max_iter) {
  double prev_ll = log_likelihood(f_values, problem);
  for (std::size_t it = 0; it < max_iter; ++it) {
    f_values = em_step(f_values, problem);
    const double ll = log_likelihood(f_values, problem);
    if (ll - prev_ll < tol && it > 10) break;
    prev_ll = ll;
  }
  return f_values;
}

std::vector<double> naive_start(const LikelihoodProblem& problem) {
  const std::size_t m = problem.sites.size();
  const double n = static_cast<double>(problem.n_obs());
  std::vector<double> count(m, 0.0);
  for (std::size_t i = 0; i < problem.n_obs(); ++i) {
    count[problem.t_index[i]] += 1.0;
    count[problem.u_index[i]] += 1.0;
  }
  std::vector<double> f(m);
  double acc = 0.0;
  const double lo = 1.0 / (2.0 * n), hi = 1.0 - 1.0 / (2.0 * n);
  for (std::size_t j = 0; j < m; ++j) {
    acc += count[j];
    f[j] = std::clamp(acc / (2.0 * n), lo, hi);
  }
  return f;
}

namespace {

// Likelihood with active terms floored; used only inside the line search.
// feasible reports whether every active term is strictly positive, so the
// search can refuse steps that pool an observation's probability to zero.
double floored_log_lik(const std::vector<double>& f, const LikelihoodProblem& pr,
                       bool* feasible = nullptr) {
  double ll = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < pr.n_obs(); ++i) {
    const double p = active_prob(pr, i, f);
    if (p <= 0.0) ok = false;
    ll += std::log(std::max(p, kTermFloor));
  }
  if (feasible) *feasible = ok;
  return ll;
}

}  // namespace

MleResult npmle_icm(const Dataset& ds, const IcmOptions& options) {
  if (ds.size() == 0) throw std::invalid_argument("npmle_icm: empty dataset");
  if (!(options.tol > 0.0)) throw std::invalid_argument("npmle_icm: tol must be > 0");
  const LikelihoodProblem pr = LikelihoodProblem::build(ds);
  const std::size_t m = pr.sites.size();

  std::vector<double> f = naive_start(pr);
  double ll = floored_log_lik(f, pr);

  MleResult result;
  std::vector<double> grad(m), weight(m), y(m), trial(m);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(weight.begin(), weight.end(), 0.0);
    for (std::size_t i = 0; i < pr.n_obs(); ++i) {
      const double p = std::max(active_prob(pr, i, f), kTermFloor);
      const double inv = 1.0 / p, inv2 = inv * inv;
      const int ti = pr.t_index[i], ui = pr.u_index[i];
      switch (pr.which[i]) {
        case 0: grad[ti] += inv; weight[ti] += inv2; break;
        case 1:
          grad[ui] += inv; grad[ti] -= inv;
          weight[ui] += inv2; weight[ti] += inv2;
          break;
        default: grad[ui] -= inv; weight[ui] += inv2; break;
      }
    }
    // Sites with no curvature get a floor relative to the average weight, so
    // the cusum x-coordinates stay strictly increasing in floating point.
    double wsum = 0.0;
    for (double w : weight) wsum += w;
    const double wfloor = std::max(1e-8 * wsum / static_cast<double>(m), 1e-300);
    for (std::size_t j = 0; j < m; ++j) {
      weight[j] = std::max(weight[j], wfloor);
      y[j] = f[j] + grad[j] / weight[j];
    }
    std::vector<double> fit = weighted_isotonic(y, weight);
    double run = 0.0;
    for (double& v : fit) {
      run = std::max(run, std::clamp(v, 0.0, 1.0));
      v = run;
    }

    double descent = 0.0;
    for (std::size_t j = 0; j < m; ++j) descent += grad[j] * (fit[j] - f[j]);

    // Armijo backtracking toward the previous iterate.
    double lambda = 1.0;
    double new_ll = ll;
    bool accepted = false;
    while (lambda > 1e-12) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = f[j] + lambda * (fit[j] - f[j]);
      bool feasible = false;
      new_ll = floored_log_lik(trial, pr, &feasible);
      // Only the full step can zero an active term (the current iterate is
      // strictly feasible and the step is a convex combination).
      if (feasible && new_ll >= ll + 1e-4 * lambda * descent) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (accepted) f = trial;

    const double gap = fenchel_gap(f, pr);
    result.iterations = it;
    result.duality_gap = gap;
    const double change = new_ll - ll;
    ll = std::max(new_ll, ll);
    if (gap <= options.tol) {
      result.converged = true;
      break;
    }
    if (accepted && std::isfinite(gap) &&
        std::abs(change) <= options.rel_tol * (1.0 + std::abs(ll))) {
      result.converged = true;  // likelihood has stalled at working precision
      break;
    }
    if (!accepted) break;  // no admissible step; gap reported as-is
  }
  result.estimate.knots = pr.sites;
  result.estimate.values = f;
  result.log_likelihood = log_likelihood(f, pr);
  return result;
}

}  // namespace censcope
