#include "censcope/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "censcope/asymptotics.hpp"
#include "censcope/birge.hpp"
#include "censcope/inteq.hpp"
#include "censcope/npmle.hpp"
#include "censcope/smle.hpp"

namespace censcope {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Birge: return "birge";
    case EstimatorKind::Mle: return "mle";
    case EstimatorKind::Smle: return "smle";
  }
  throw std::logic_error("estimator_name: bad kind");
}

double scaling_factor(ScalingTag tag, std::size_t n) {
  const auto nd = static_cast<double>(n);
  switch (tag) {
    case ScalingTag::NLogNTwoThirds: return std::pow(nd * std::log(nd), 2.0 / 3.0);
    case ScalingTag::NTwoThirds: return std::pow(nd, 2.0 / 3.0);
    case ScalingTag::SampleSize: return nd;
  }
  throw std::logic_error("scaling_factor: bad tag");
}

namespace {

void validate(const ExperimentConfig& c) {
  if (c.reps < 1) throw std::invalid_argument("run_experiment: reps must be at least 1");
  if (c.t0_list.empty() || c.n_list.empty() || c.estimators.empty())
    throw std::invalid_argument("run_experiment: empty t0/n/estimator list");
  for (double t0 : c.t0_list)
    if (!(t0 > 0.0 && t0 < 1.0))
      throw std::invalid_argument("run_experiment: every t0 must be interior to (0,1)");
  if (c.scaling == ScalingTag::NLogNTwoThirds && c.scheme.kind != SchemeKind::NonSeparated)
    throw std::invalid_argument("run_experiment: (n log n)^{2/3} scaling requires the non-separated scheme");
  if (c.scaling == ScalingTag::NTwoThirds && c.scheme.kind != SchemeKind::Separated)
    throw std::invalid_argument("run_experiment: n^{2/3} scaling requires the separated scheme");
}

struct CellKey {
  std::size_t t0_idx;
  std::size_t est_idx;
};

}  // namespace

std::vector<TableRow> run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::vector<TableRow> out;

  const bool need_mle =
      std::any_of(config.estimators.begin(), config.estimators.end(), [](EstimatorKind e) {
        return e == EstimatorKind::Mle || e == EstimatorKind::Smle;
      });
  const bool need_smle = std::any_of(config.estimators.begin(), config.estimators.end(),
                                     [](EstimatorKind e) { return e == EstimatorKind::Smle; });

  int threads = config.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;

  for (std::size_t n_idx = 0; n_idx < config.n_list.size(); ++n_idx) {
    const std::size_t n = config.n_list[n_idx];
    const double smle_b = SmleConfig::for_sample_size(n).bandwidth;
    if (need_smle)
      for (double t0 : config.t0_list)
        if (t0 < smle_b || t0 > 1.0 - smle_b) {
          std::ostringstream msg;
          msg << "run_experiment: t0=" << t0 << " outside [b, 1-b] for n=" << n;
          throw std::invalid_argument(msg.str());
        }

    // The binwidth constant is a population quantity, fixed before the loop.
    std::vector<int> birge_k(config.t0_list.size(), 0);
    const bool need_birge = std::any_of(config.estimators.begin(), config.estimators.end(),
                                        [](EstimatorKind e) { return e == EstimatorKind::Birge; });
    if (need_birge) {
      const double rate = config.scheme.kind == SchemeKind::NonSeparated
                              ? std::cbrt(static_cast<double>(n) * std::log(static_cast<double>(n)))
                              : std::cbrt(static_cast<double>(n));
      for (std::size_t i = 0; i < config.t0_list.size(); ++i) {
        const double c = optimal_c(config.t0_list[i], config.target, config.scheme);
        birge_k[i] = static_cast<int>(std::floor(rate / c));
        if (birge_k[i] < 2)
          throw std::invalid_argument("run_experiment: sample size too small for the histogram estimator");
      }
    }

    const std::size_t cells = config.t0_list.size() * config.estimators.size();
    // errors[rep * cells + cell]; NaN marks a failed replication.
    std::vector<double> errors(config.reps * cells, kNaN);
    const std::uint64_t n_seed = derive_seed(config.master_seed, n_idx);

    auto worker = [&](std::size_t rep_begin, std::size_t rep_end) {
      for (std::size_t rep = rep_begin; rep < rep_end; ++rep) {
        double* slot = errors.data() + rep * cells;
        Dataset ds;
        try {
          ds = generate_dataset(config.target, config.scheme, n, derive_seed(n_seed, rep));
        } catch (const std::exception&) {
          continue;
        }
        StepDistribution mle_fit;
        bool have_mle = false;
        if (need_mle) {
          try {
            mle_fit = npmle_icm(ds).estimate;
            have_mle = true;
          } catch (const std::exception&) {
          }
        }
        for (std::size_t ti = 0; ti < config.t0_list.size(); ++ti) {
          const double t0 = config.t0_list[ti];
          const double f0 = config.target.cdf(t0);
          for (std::size_t ei = 0; ei < config.estimators.size(); ++ei) {
            double est = kNaN;
            try {
              switch (config.estimators[ei]) {
                case EstimatorKind::Birge:
                  est = birge_estimate(ds, t0, birge_k[ti]);
                  break;
                case EstimatorKind::Mle:
                  if (have_mle) est = mle_fit(t0);
                  break;
                case EstimatorKind::Smle:
                  if (have_mle) est = smle_eval(mle_fit, t0, SmleConfig{smle_b});
                  break;
              }
            } catch (const std::exception&) {
            }
            if (std::isfinite(est)) slot[ti * config.estimators.size() + ei] = est - f0;
          }
        }
      }
    };

    if (threads == 1 || config.reps < 2) {
      worker(0, config.reps);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (config.reps + static_cast<std::size_t>(threads) - 1) /
                                static_cast<std::size_t>(threads);
      for (std::size_t begin = 0; begin < config.reps; begin += chunk)
        pool.emplace_back(worker, begin, std::min(begin + chunk, config.reps));
      for (auto& t : pool) t.join();
    }

    const double scale = scaling_factor(config.scaling, n);
    for (std::size_t ti = 0; ti < config.t0_list.size(); ++ti) {
      for (std::size_t ei = 0; ei < config.estimators.size(); ++ei) {
        double sum = 0.0, sum_sq = 0.0, sum_q = 0.0;
        std::size_t good = 0;
        for (std::size_t rep = 0; rep < config.reps; ++rep) {
          const double e = errors[rep * cells + ti * config.estimators.size() + ei];
          if (!std::isfinite(e)) continue;
          ++good;
          sum += e;
          sum_sq += e * e;
          sum_q += e * e * e * e;
        }
        const std::size_t failures = config.reps - good;
        if (failures * 100 > config.reps) {
          std::ostringstream msg;
          msg << "run_experiment: " << failures << "/" << config.reps
              << " replications failed for n=" << n << ", t0=" << config.t0_list[ti]
              << ", estimator=" << estimator_name(config.estimators[ei]);
          throw std::runtime_error(msg.str());
        }
        const auto r = static_cast<double>(good);
        const double mean = sum / r;
        const double msq = sum_sq / r;
        TableRow row;
        row.n = n;
        row.t0 = config.t0_list[ti];
        row.estimator = estimator_name(config.estimators[ei]);
        row.scaled_mse = scale * msq;
        row.scaled_bias_sq = scale * mean * mean;
        row.scaled_var = row.scaled_mse - row.scaled_bias_sq;
        const double var_of_sq = std::max(0.0, sum_q / r - msq * msq);
        row.mc_se = good > 1 ? scale * std::sqrt(var_of_sq / r) : 0.0;
        row.asymptotic_ref = kNaN;
        row.failures = failures;
        out.push_back(std::move(row));
      }
    }
  }
  return out;
}

namespace {

std::size_t desk_reps(std::size_t n, std::size_t base, double scale_factor) {
  const double r = static_cast<double>(base) * scale_factor;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(r)));
}

// Paper-table replication counts before scaling: 10,000 for n <= 2500 and an
// already-reduced 2,500 for the larger sample sizes (desk-scale default).
std::size_t base_reps(std::size_t n) { return n <= 2500 ? 10000 : 2500; }

TableRow make_ratio_row(const TableRow& smle, const TableRow& mle) {
  TableRow row = smle;
  row.estimator = "smle_mle_ratio";
  row.scaled_mse = smle.scaled_mse / mle.scaled_mse;
  row.scaled_var = smle.scaled_var / mle.scaled_var;
  row.scaled_bias_sq = kNaN;
  const double rel = std::sqrt(std::pow(smle.mc_se / smle.scaled_mse, 2) +
                               std::pow(mle.mc_se / mle.scaled_mse, 2));
  row.mc_se = row.scaled_mse * rel;
  row.asymptotic_ref = kNaN;
  row.failures = smle.failures + mle.failures;
  return row;
}

const TableRow& find_row(const std::vector<TableRow>& rows, std::size_t n, double t0,
                         const std::string& est) {
  for (const auto& r : rows)
    if (r.n == n && r.t0 == t0 && r.estimator == est) return r;
  throw std::logic_error("replicate_table: missing row");
}

}  // namespace

std::vector<TableRow> replicate_table(int table_id, double scale_factor,
                                      std::uint64_t master_seed, int threads) {
  if (table_id < 1 || table_id > 13) throw std::invalid_argument("replicate_table: table id must be 1..13");
  if (!(scale_factor > 0.0)) throw std::invalid_argument("replicate_table: scale factor must be positive");

  const std::vector<double> t0s{0.3, 0.4, 0.5, 0.6};
  const std::vector<std::size_t> ns{1000, 2500, 5000, 10000};
  const auto uniform = TargetDistribution::uniform();
  const auto power4 = TargetDistribution::power_decay(4);
  const auto nonsep = ObservationScheme::non_separated();
  const auto sep = ObservationScheme::separated(0.1);

  auto run_split = [&](ExperimentConfig cfg, std::size_t base) {
    std::vector<TableRow> rows;
    const auto all_n = cfg.n_list;
    for (std::size_t i = 0; i < all_n.size(); ++i) {
      ExperimentConfig one = cfg;
      one.n_list = {all_n[i]};
      one.master_seed = derive_seed(master_seed, i);
      one.reps = desk_reps(all_n[i], base == 0 ? base_reps(all_n[i]) : base, scale_factor);
      one.threads = threads;
      auto part = run_experiment(one);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
  };

  std::vector<TableRow> out;

  if (table_id == 1) {
    ExperimentConfig cfg;
    cfg.target = uniform;
    cfg.scheme = nonsep;
    cfg.t0_list = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    cfg.n_list = {1000};
    cfg.estimators = {EstimatorKind::Smle};
    cfg.scaling = ScalingTag::SampleSize;
    out = run_split(cfg, 10000);
    const double b = SmleConfig::for_sample_size(1000).bandwidth;
    for (auto& row : out) {
      PhiProblem problem;
      problem.t = row.t0;
      problem.b = b;
      problem.cdf = [](double u) { return TargetDistribution::uniform().cdf(u); };
      problem.density = JointDensity::from_scheme(nonsep);
      const GridFunction phi = solve_phi(problem, 1000);
      row.asymptotic_ref = theta_variance(phi, problem);
    }
    return out;
  }

  if (table_id >= 2 && table_id <= 5) {
    ExperimentConfig cfg;
    cfg.target = uniform;
    cfg.scheme = nonsep;
    cfg.t0_list = t0s;
    cfg.n_list = ns;
    cfg.estimators = table_id == 5
                         ? std::vector<EstimatorKind>{EstimatorKind::Smle, EstimatorKind::Mle}
                         : std::vector<EstimatorKind>{EstimatorKind::Birge, EstimatorKind::Mle};
    cfg.scaling = ScalingTag::NLogNTwoThirds;
    auto rows = run_split(cfg, 0);
    if (table_id == 5) {
      for (std::size_t n : ns)
        for (double t0 : t0s)
          out.push_back(make_ratio_row(find_row(rows, n, t0, "smle"), find_row(rows, n, t0, "mle")));
      return out;
    }
    for (auto& row : rows) {
      const AsymptoticReport birge = birge_asymptotics(row.t0, uniform, nonsep);
      if (row.estimator == "birge")
        row.asymptotic_ref = table_id == 2 ? birge.mse
                            : table_id == 3 ? birge.variance
                                            : birge.bias * birge.bias;
      else if (table_id != 4)
        row.asymptotic_ref = mle_asymptotic_mse(row.t0, uniform, nonsep);
    }
    return rows;
  }

  if (table_id >= 6 && table_id <= 8) {
    ExperimentConfig cfg;
    cfg.target = uniform;
    cfg.scheme = sep;
    cfg.t0_list = t0s;
    cfg.n_list = ns;
    cfg.estimators = {EstimatorKind::Birge, EstimatorKind::Mle};
    cfg.scaling = ScalingTag::NTwoThirds;
    auto rows = run_split(cfg, 0);
    for (auto& row : rows) {
      const AsymptoticReport birge = birge_asymptotics(row.t0, uniform, sep);
      if (row.estimator == "birge")
        row.asymptotic_ref = table_id == 6 ? birge.mse
                            : table_id == 7 ? birge.variance
                                            : birge.bias * birge.bias;
      else if (table_id != 8)
        row.asymptotic_ref = mle_asymptotic_mse(row.t0, uniform, sep);
    }
    return rows;
  }

  if (table_id == 9) {
    for (const auto& [target, label] :
         {std::pair{uniform, std::string("birge_uniform")},
          std::pair{power4, std::string("birge_power4")}}) {
      ExperimentConfig cfg;
      cfg.target = target;
      cfg.scheme = sep;
      cfg.t0_list = {0.3};
      cfg.n_list = {1000000, 10000000};
      cfg.estimators = {EstimatorKind::Birge};
      cfg.scaling = ScalingTag::NTwoThirds;
      cfg.master_seed = derive_seed(master_seed, label == "birge_uniform" ? 100 : 200);
      std::vector<TableRow> rows;
      for (std::size_t n : cfg.n_list) {
        ExperimentConfig one = cfg;
        one.n_list = {n};
        one.reps = desk_reps(n, 1000, scale_factor);
        one.threads = threads;
        auto part = run_experiment(one);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const double asym = birge_asymptotics(0.3, target, sep).mse;
      for (auto& row : rows) {
        row.estimator = label;
        row.scaled_mse /= asym;
        row.scaled_var /= asym;
        row.scaled_bias_sq /= asym;
        row.mc_se /= asym;
        row.asymptotic_ref = 1.0;
        out.push_back(row);
      }
    }
    return out;
  }

  if (table_id >= 10 && table_id <= 12) {
    ExperimentConfig cfg;
    cfg.target = power4;
    cfg.scheme = sep;
    cfg.t0_list = t0s;
    cfg.n_list = ns;
    cfg.estimators = {EstimatorKind::Birge, EstimatorKind::Mle};
    cfg.scaling = ScalingTag::NTwoThirds;
    auto rows = run_split(cfg, 0);
    for (auto& row : rows) {
      const AsymptoticReport birge = birge_asymptotics(row.t0, power4, sep);
      if (row.estimator == "birge")
        row.asymptotic_ref = table_id == 10 ? birge.mse
                             : table_id == 11 ? birge.variance
                                              : birge.bias * birge.bias;
      else if (table_id != 12)
        row.asymptotic_ref = mle_asymptotic_mse(row.t0, power4, sep);
    }
    return rows;
  }

  // table 13: SMLE/MLE MSE ratio in the separated uniform model.
  ExperimentConfig cfg;
  cfg.target = uniform;
  cfg.scheme = sep;
  cfg.t0_list = t0s;
  cfg.n_list = ns;
  cfg.estimators = {EstimatorKind::Smle, EstimatorKind::Mle};
  cfg.scaling = ScalingTag::NTwoThirds;
  auto rows = run_split(cfg, 0);
  for (std::size_t n : ns)
    for (double t0 : t0s)
      out.push_back(make_ratio_row(find_row(rows, n, t0, "smle"), find_row(rows, n, t0, "mle")));
  return out;
}

CsvTable rows_to_csv(const std::vector<TableRow>& rows, int table_id) {
  CsvTable table;
  table.header = {"table",      "n",         "t0",           "estimator", "scaled_mse",
                  "scaled_var", "scaled_bias_sq", "mc_se",   "asymptotic_ref"};
  for (const auto& row : rows) {
    table.rows.push_back({std::to_string(table_id), std::to_string(row.n), format_double(row.t0),
                          row.estimator, format_double(row.scaled_mse), format_double(row.scaled_var),
                          format_double(row.scaled_bias_sq), format_double(row.mc_se),
                          format_double(row.asymptotic_ref)});
  }
  return table;
}

}  // namespace censcope
