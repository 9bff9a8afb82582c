#ifndef CENSCOPE_SIMULATE_HPP
#define CENSCOPE_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "censcope/csv.hpp"
#include "censcope/model.hpp"

namespace censcope {

enum class EstimatorKind { Birge, Mle, Smle };

std::string estimator_name(EstimatorKind kind);

// Factor applied to the squared estimation error before aggregation.
enum class ScalingTag { NLogNTwoThirds, NTwoThirds, SampleSize };

double scaling_factor(ScalingTag tag, std::size_t n);

struct ExperimentConfig {
  TargetDistribution target;
  ObservationScheme scheme;
  std::vector<double> t0_list;
  std::vector<std::size_t> n_list;
  std::size_t reps = 2000;
  std::vector<EstimatorKind> estimators;
  std::uint64_t master_seed = 1;
  ScalingTag scaling = ScalingTag::NLogNTwoThirds;
  int threads = 0;  // 0 picks the hardware concurrency
};

struct TableRow {
  std::size_t n = 0;
  double t0 = 0.0;
  std::string estimator;
  double scaled_mse = 0.0;
  double scaled_var = 0.0;
  double scaled_bias_sq = 0.0;
  double mc_se = 0.0;
  double asymptotic_ref = 0.0;  // NaN when no reference applies
  std::size_t failures = 0;
};

// Monte Carlo study: reps datasets per n, the replication seed derived from the
// master seed, every estimator evaluated at every t0 on shared datasets.
// Aggregation order is fixed by the replication index, so the output does not
// depend on the thread count.
std::vector<TableRow> run_experiment(const ExperimentConfig& config);

// Instantiates the configuration of one of the thirteen reference tables with
// the replication count scaled by scale_factor, and fills in the asymptotic
// reference column.
std::vector<TableRow> replicate_table(int table_id, double scale_factor,
                                      std::uint64_t master_seed = 1, int threads = 0);

// Header: table,n,t0,estimator,scaled_mse,scaled_var,scaled_bias_sq,mc_se,asymptotic_ref
CsvTable rows_to_csv(const std::vector<TableRow>& rows, int table_id);

}  // namespace censcope

#endif
