#include "censcope/birge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "censcope/asymptotics.hpp"

namespace censcope {

int BirgePartition::cell_of(double x) const {
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), x);
  int idx = static_cast<int>(it - boundaries.begin()) - 1;
  return std::clamp(idx, 0, n_cells() - 1);
}

BirgePartition build_partition(double t0, int K) {
  if (!(t0 > 0.0 && t0 < 1.0)) throw std::invalid_argument("build_partition: t0 must be interior");
  if (K < 2) throw std::invalid_argument("build_partition: K must be >= 2");
  BirgePartition part;
  part.K = K;
  const double kt0 = K * t0;
  if (std::abs(kt0 - std::round(kt0)) < 1e-9) {
    part.scheme_tag = PartitionScheme::EqualCells;
    part.boundaries.resize(K + 1);
    for (int m = 0; m <= K; ++m) part.boundaries[m] = static_cast<double>(m) / K;
    part.j_index = static_cast<int>(std::llround(kt0));
  } else {
    part.scheme_tag = PartitionScheme::ShiftedLattice;
    const long m_min = static_cast<long>(std::floor(-kt0)) + 1;
    const long m_max = static_cast<long>(std::ceil((1.0 - t0) * K)) - 1;
    part.boundaries.push_back(0.0);
    for (long m = m_min; m <= m_max; ++m)
      part.boundaries.push_back(t0 + static_cast<double>(m) / K);
    part.boundaries.push_back(1.0);
    part.j_index = static_cast<int>(1 - m_min);
  }
  part.boundaries[static_cast<std::size_t>(part.j_index)] = t0;  // exact left endpoint
  return part;
}

CountStatistics count_statistics(const Dataset& ds, const BirgePartition& partition) {
  const int c = partition.n_cells();
  CountStatistics s;
  s.N.assign(c, 0);
  s.M.assign(c, 0);
  s.N_prime.assign(c, 0);
  s.M_prime.assign(c, 0);
  s.Q.assign(c, std::vector<long>(c, 0));
  s.Q_prime.assign(c, std::vector<long>(c, 0));
  for (const auto& o : ds.observations) {
    const int ct = partition.cell_of(o.t);
    const int cu = partition.cell_of(o.u);
    s.N[ct] += 1;
    s.M[cu] += 1;
    s.N_prime[ct] += o.d1;
    s.M_prime[cu] += o.d3;
    s.Q[ct][cu] += 1;
    s.Q_prime[ct][cu] += o.d2;
  }
  return s;
}

namespace {

WeightSet weights_for_cell(const CountStatistics& counts, int K, int j) {
  const int c = static_cast<int>(counts.N.size());
  WeightSet ws;
  ws.w.assign(c, 0.0);
  std::vector<double> s(c, 0.0);
  for (int k = 0; k < c; ++k) {
    if (k == j) continue;
    double inner;
    if (k > j)
      inner = std::min<double>(counts.N[k], static_cast<double>(K) * counts.Q[j][k]);
    else
      inner = std::min<double>(counts.M[k], static_cast<double>(K) * counts.Q[k][j]);
    s[k] = std::sqrt(inner) / (std::abs(k - j) + 1);
    ws.W_j += s[k];
  }
  if (ws.W_j > 0.0)
    for (int k = 0; k < c; ++k) ws.w[k] = s[k] / ws.W_j;
  return ws;
}

// Ratio-of-counts contrast; any ratio with zero denominator is taken as zero.
double cell_pair_contrast(const CountStatistics& counts, int j, int k) {
  auto ratio = [](long num, long den) { return den > 0 ? static_cast<double>(num) / den : 0.0; };
  if (k > j) return ratio(counts.N_prime[k], counts.N[k]) - ratio(counts.Q_prime[j][k], counts.Q[j][k]);
  return 1.0 - ratio(counts.M_prime[k], counts.M[k]) + ratio(counts.Q_prime[k][j], counts.Q[k][j]);
}

double estimate_for_cell(const CountStatistics& counts, int K, int j) {
  const WeightSet ws = weights_for_cell(counts, K, j);
  double est = 0.0;
  for (int k = 0; k < static_cast<int>(ws.w.size()); ++k) {
    if (k == j || ws.w[k] == 0.0) continue;
    est += ws.w[k] * cell_pair_contrast(counts, j, k);
  }
  return est;
}

}  // namespace

WeightSet birge_weights(const CountStatistics& counts, const BirgePartition& partition) {
  return weights_for_cell(counts, partition.K, partition.j_index);
}

double birge_a(double t0, double t, const ObservationScheme& scheme) {
  return std::sqrt(std::min(scheme.density(t0, t), scheme.marginal1(t)));
}

double birge_b(double t0, double t, const ObservationScheme& scheme) {
  return std::sqrt(std::min(scheme.density(t, t0), scheme.marginal2(t)));
}

double optimal_c(double t0, const TargetDistribution& target, const ObservationScheme& scheme) {
  const double f0 = target.density(t0);
  if (!(f0 > 0.0)) throw std::domain_error("optimal_c: f0(t0) must be > 0");
  double v1;  // asymptotic variance at c = 1
  if (scheme.kind == SchemeKind::NonSeparated) {
    v1 = sigma0_sq(t0, 1.0, target, scheme);
  } else {
    v1 = sigma_sq_separated(t0, 1.0, target, scheme);
  }
  return std::cbrt(2.0 * v1 / (f0 * f0));
}

double birge_estimate(const Dataset& ds, double t0, std::optional<int> K_override) {
  const std::size_t n = ds.size();
  int K;
  if (K_override) {
    K = *K_override;
  } else {
    const double c = optimal_c(t0, ds.target, ds.scheme);
    const double rate = ds.scheme.kind == SchemeKind::NonSeparated
                            ? std::cbrt(n * std::log(static_cast<double>(n)))
                            : std::cbrt(static_cast<double>(n));
    K = static_cast<int>(std::floor(rate / c));
  }
  if (K < 2) throw std::invalid_argument("birge_estimate: K < 2, sample too small");
  if (n < static_cast<std::size_t>(K))
    throw std::invalid_argument("birge_estimate: partition too fine (n < K)");
  const BirgePartition part = build_partition(t0, K);
  const CountStatistics counts = count_statistics(ds, part);
  return estimate_for_cell(counts, part.K, part.j_index);
}

std::vector<double> birge_curve(const Dataset& ds, const BirgePartition& partition) {
  const CountStatistics counts = count_statistics(ds, partition);
  std::vector<double> values(partition.n_cells());
  for (int j = 0; j < partition.n_cells(); ++j)
    values[j] = estimate_for_cell(counts, partition.K, j);
  return values;
}

WeightSet deterministic_weights(double t0, const BirgePartition& partition,
                                const ObservationScheme& scheme, const TargetDistribution& target,
                                std::size_t n) {
  (void)target;  // the limiting weights depend on the observation law only
  const int c = partition.n_cells();
  const int j = partition.j_index;
  WeightSet ws;
  ws.w.assign(c, 0.0);
  if (scheme.kind == SchemeKind::NonSeparated) {
    if (n < 2) throw std::invalid_argument("deterministic_weights: n required, non-separated");
    const double ab = birge_a(t0, t0, scheme) + birge_b(t0, t0, scheme);
    const double logn = std::log(static_cast<double>(n));
    for (int k = 0; k < c; ++k) {
      if (k == j) continue;
      const double tk = partition.boundaries[k];
      const double num = k > j ? 3.0 * birge_a(t0, tk, scheme) : 3.0 * birge_b(t0, tk, scheme);
      ws.w[k] = num / (ab * (std::abs(k - j) + 1) * logn);
    }
    ws.W_j = std::log(static_cast<double>(n));  // normalization scale, diagnostics only
  } else {
    const double wt = w_tilde(t0, scheme);
    if (!std::isfinite(wt) || wt <= 0.0)
      throw std::domain_error("deterministic_weights: W-tilde not finite");
    for (int k = 0; k < c; ++k) {
      if (k == j) continue;
      const double tk = partition.boundaries[k];
      double num;
      if (k > j)
        num = std::sqrt(std::min(scheme.density(t0, tk), scheme.marginal1(tk)));
      else
        num = std::sqrt(std::min(scheme.density(tk, t0), scheme.marginal2(tk)));
      const double dist = std::abs(tk - t0);
      if (dist > 0.0) ws.w[k] = num / (partition.K * wt * dist);
    }
    ws.W_j = wt;
  }
  return ws;
}

}  // namespace censcope
