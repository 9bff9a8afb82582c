#ifndef CENSCOPE_BIRGE_HPP
#define CENSCOPE_BIRGE_HPP

#include <optional>
#include <vector>

#include "censcope/model.hpp"

namespace censcope {

// Partition of [0,1] whose cell boundaries place t0 as a left endpoint.
// Scheme 'i': K equal cells when K*t0 is an integer; scheme 'ii': the lattice
// {t0 + m/K} intersected with (0,1) plus {0,1}, giving K+1 cells whose first
// and last may be shorter than 1/K.
enum class PartitionScheme { EqualCells, ShiftedLattice };  // (i) and (ii)

struct BirgePartition {
  std::vector<double> boundaries;  // strictly increasing, starts 0, ends 1
  int j_index = 0;                 // cell whose left endpoint is t0
  int K = 0;
  PartitionScheme scheme_tag = PartitionScheme::EqualCells;

  int n_cells() const { return static_cast<int>(boundaries.size()) - 1; }
  // Index of the cell containing x; cells are [b_k, b_{k+1}), last one closed.
  int cell_of(double x) const;
};

BirgePartition build_partition(double t0, int K);

// Cell counts of observation times, and the indicator-weighted counterparts.
struct CountStatistics {
  std::vector<long> N, M, N_prime, M_prime;
  std::vector<std::vector<long>> Q, Q_prime;  // indexed [cell of T][cell of U]
};

CountStatistics count_statistics(const Dataset& ds, const BirgePartition& partition);

struct WeightSet {
  std::vector<double> w;  // per cell; w[j_index] is 0 by convention
  double W_j = 0.0;
};

// Random weights sqrt(count /\ K*pair-count) / ((|k-j|+1) W_j); all zero when
// W_j is zero.
WeightSet birge_weights(const CountStatistics& counts, const BirgePartition& partition);

// Asymptotically optimal binwidth constant: minimizer of the asymptotic MSE
// (c f0/2)^2 + sigma^2(c), i.e. c = (2 V1 / f0^2)^(1/3) with V1 the variance
// at c = 1.
double optimal_c(double t0, const TargetDistribution& target, const ObservationScheme& scheme);

// The histogram-type estimate at t0 (cell-j value; not clipped to [0,1]).
// K defaults to floor(c^-1 (n log n)^(1/3)) non-separated, floor(c^-1 n^(1/3))
// separated, with c from optimal_c.
double birge_estimate(const Dataset& ds, double t0, std::optional<int> K_override = {});

// Evaluate the piecewise-constant estimator curve: cell value for the cell
// containing t.
std::vector<double> birge_curve(const Dataset& ds, const BirgePartition& partition);

// Deterministic weight approximations (diagnostics): log-n normalized in the
// non-separated case (needs n), W-tilde normalized in the separated case.
WeightSet deterministic_weights(double t0, const BirgePartition& partition,
                                const ObservationScheme& scheme, const TargetDistribution& target,
                                std::size_t n = 0);

// a(t) = sqrt(h(t0,t) /\ g1(t)), b(t) = sqrt(h(t,t0) /\ g2(t)).
double birge_a(double t0, double t, const ObservationScheme& scheme);
double birge_b(double t0, double t, const ObservationScheme& scheme);

}  // namespace censcope

#endif
