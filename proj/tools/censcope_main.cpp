#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "censcope/asymptotics.hpp"
#include "censcope/birge.hpp"
#include "censcope/csv.hpp"
#include "censcope/inteq.hpp"
#include "censcope/model.hpp"
#include "censcope/npmle.hpp"
#include "censcope/simulate.hpp"
#include "censcope/smle.hpp"

namespace {

using namespace censcope;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct ModelFlags {
  std::string model = "uniform";
  int power = 4;
  std::string scheme = "nonsep";
  double epsilon = 0.1;

  TargetDistribution target() const {
    if (model == "uniform") return TargetDistribution::uniform();
    return TargetDistribution::power_decay(power);
  }
  ObservationScheme observation_scheme() const {
    if (scheme == "nonsep") return ObservationScheme::non_separated();
    return ObservationScheme::separated(epsilon);
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--model", flags.model, "Target distribution")
      ->check(CLI::IsMember({"uniform", "power"}))
      ->capture_default_str();
  cmd->add_option("--power", flags.power, "Exponent k of F0(x) = 1 - (1-x)^k for --model power")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  cmd->add_option("--scheme", flags.scheme, "Observation-pair scheme")
      ->check(CLI::IsMember({"nonsep", "sep"}))
      ->capture_default_str();
  cmd->add_option("--epsilon", flags.epsilon, "Minimal gap U - T for --scheme sep")
      ->check(CLI::Range(1e-9, 0.4999999))
      ->capture_default_str();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CENSCOPE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("CENSCOPE_SEED", "must be an unsigned integer");
    }
  }
  return 1;
}

void emit(const CsvTable& table, const std::string& out_path) {
  if (out_path.empty()) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
      std::cout << (i ? "," : "") << table.header[i];
    std::cout << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
      std::cout << "\n";
    }
  } else {
    write_csv(table, out_path);
  }
}

Dataset load_dataset(const std::string& path, const ModelFlags& flags) {
  Dataset ds;
  try {
    ds = read_dataset_csv(path);
  } catch (const std::exception& e) {
    throw CLI::ValidationError("--in", e.what());
  }
  ds.target = flags.target();
  ds.scheme = flags.observation_scheme();
  return ds;
}

int run(int argc, char** argv) {
  CLI::App app{"Interval-censoring (case 2) estimators: data generation, estimation, "
               "simulation tables, asymptotic constants, and variance curves"};
  app.require_subcommand(1);
  // Config handling lives on the root app: subcommand keys go in a
  // [subcommand] section, and fallthrough lets --config appear after the
  // subcommand name. Command-line flags always win over file values.
  app.set_config("--config", "", "TOML config file with keys in [subcommand] sections");

  std::uint64_t seed = default_seed();

  // generate
  auto* gen = app.add_subcommand("generate", "Draw a censored dataset and write it as CSV");
  ModelFlags gen_model;
  std::size_t gen_n = 100;
  std::string gen_out;
  add_model_flags(gen, gen_model);
  gen->add_option("--n", gen_n, "Sample size")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))->capture_default_str();
  gen->add_option("--seed", seed, "Master seed (fallback: CENSCOPE_SEED, then 1)");
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->fallthrough();

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate the distribution from a dataset CSV");
  ModelFlags est_model;
  std::string est_in, est_out, est_method = "mle";
  double est_t0 = 0.5;
  double est_bandwidth = 0.0;
  int est_K = 0;
  std::size_t est_grid = 1000;
  est->add_option("--in", est_in, "Dataset CSV path")->required();
  est->add_option("--out", est_out, "Curve CSV path")->required();
  est->add_option("--method", est_method, "Estimator")
      ->check(CLI::IsMember({"birge", "mle", "smle"}))
      ->capture_default_str();
  est->add_option("--t0", est_t0, "Anchor point for the histogram estimator")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  est->add_option("--bandwidth", est_bandwidth, "Smoothing bandwidth (0 means n^{-1/5})")
      ->check(CLI::Range(0.0, 0.4999999));
  est->add_option("--K", est_K, "Histogram cell count override (0 means optimal)")
      ->check(CLI::Range(0, 1000000));
  est->add_option("--grid-points", est_grid, "Smoothed-curve evaluation grid size")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))
      ->capture_default_str();
  add_model_flags(est, est_model);
  est->fallthrough();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Replicate one of the thirteen reference tables");
  int sim_table = 2;
  double sim_scale = 0.2;
  int sim_threads = 0;
  std::string sim_out;
  sim->add_option("--table", sim_table, "Table id")->check(CLI::Range(1, 13))->required();
  sim->add_option("--scale", sim_scale, "Replication-count scale factor")
      ->check(CLI::Range(1e-6, 10.0))
      ->capture_default_str();
  sim->add_option("--seed", seed, "Master seed (fallback: CENSCOPE_SEED, then 1)");
  sim->add_option("--threads", sim_threads, "Worker threads (0 = hardware)")->check(CLI::Range(0, 1024));
  sim->add_option("--out", sim_out, "Output CSV path (default stdout)");
  sim->fallthrough();

  // asymptotics
  auto* asy = app.add_subcommand("asymptotics", "Print the asymptotic constants per t0");
  ModelFlags asy_model;
  std::vector<double> asy_t0{0.3, 0.4, 0.5, 0.6};
  std::string asy_out;
  add_model_flags(asy, asy_model);
  asy->add_option("--t0", asy_t0, "Evaluation points")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  asy->add_option("--out", asy_out, "Output CSV path (default stdout)");
  asy->fallthrough();

  // phi
  auto* phi = app.add_subcommand("phi", "Solve the variance integral equation and export the curve");
  ModelFlags phi_model;
  double phi_t = 0.5;
  double phi_b = 0.0;
  std::size_t phi_m = 1000;
  std::string phi_out;
  add_model_flags(phi, phi_model);
  phi->add_option("--t", phi_t, "Evaluation point")->check(CLI::Range(1e-9, 1.0 - 1e-9))->capture_default_str();
  phi->add_option("--bandwidth", phi_b, "Kernel bandwidth (0 means 1000^{-1/5})")
      ->check(CLI::Range(0.0, 0.4999999));
  phi->add_option("--m", phi_m, "Grid size")->check(CLI::Range(std::size_t{100}, std::size_t{20000}))->capture_default_str();
  phi->add_option("--out", phi_out, "Output CSV path (default stdout)");
  phi->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (gen->parsed()) {
    const Dataset ds = generate_dataset(gen_model.target(), gen_model.observation_scheme(), gen_n, seed);
    write_dataset_csv(ds, gen_out);
    return 0;
  }

  if (est->parsed()) {
    Dataset ds;
    try {
      ds = load_dataset(est_in, est_model);
    } catch (const CLI::ValidationError& e) {
      std::cerr << e.what() << "\n";
      return kExitValidation;
    }
    CsvTable curve;
    curve.header = {"x", "F"};
    if (est_method == "mle") {
      const MleResult fit = npmle_icm(ds);
      for (std::size_t i = 0; i < fit.estimate.knots.size(); ++i)
        curve.rows.push_back({format_double(fit.estimate.knots[i]), format_double(fit.estimate.values[i])});
    } else if (est_method == "smle") {
      const MleResult fit = npmle_icm(ds);
      const double b = est_bandwidth > 0.0
                           ? est_bandwidth
                           : SmleConfig::for_sample_size(ds.size()).bandwidth;
      for (std::size_t i = 0; i <= est_grid; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(est_grid);
        curve.rows.push_back({format_double(x), format_double(smle_eval(fit.estimate, x, SmleConfig{b}))});
      }
    } else {
      int K = est_K;
      if (K == 0) {
        const double c = optimal_c(est_t0, ds.target, ds.scheme);
        const auto nd = static_cast<double>(ds.size());
        const double rate = ds.scheme.kind == SchemeKind::NonSeparated
                                ? std::cbrt(nd * std::log(nd))
                                : std::cbrt(nd);
        K = static_cast<int>(std::floor(rate / c));
      }
      const BirgePartition partition = build_partition(est_t0, K);
      const std::vector<double> values = birge_curve(ds, partition);
      for (std::size_t k = 0; k + 1 < partition.boundaries.size(); ++k)
        curve.rows.push_back({format_double(partition.boundaries[k]), format_double(values[k])});
    }
    write_csv(curve, est_out);
    return 0;
  }

  if (sim->parsed()) {
    const std::vector<TableRow> rows = replicate_table(sim_table, sim_scale, seed, sim_threads);
    emit(rows_to_csv(rows, sim_table), sim_out);
    return 0;
  }

  if (asy->parsed()) {
    const TargetDistribution target = asy_model.target();
    const ObservationScheme scheme = asy_model.observation_scheme();
    const bool separated = scheme.kind == SchemeKind::Separated;
    CsvTable table;
    table.header = {"t0", "optimal_c", "birge_bias", "birge_variance", "birge_mse",
                    "mle_mse", "minimax_constant", "xi", "w_tilde"};
    for (double t0 : asy_t0) {
      const AsymptoticReport birge = birge_asymptotics(t0, target, scheme);
      table.rows.push_back({format_double(t0),
                            format_double(optimal_c(t0, target, scheme)),
                            format_double(birge.bias),
                            format_double(birge.variance),
                            format_double(birge.mse),
                            format_double(mle_asymptotic_mse(t0, target, scheme)),
                            separated ? "" : format_double(minimax_constant(t0, target, scheme)),
                            separated ? format_double(xi(t0, target, scheme)) : "",
                            separated ? format_double(w_tilde(t0, scheme)) : ""});
    }
    emit(table, asy_out);
    return 0;
  }

  // phi
  PhiProblem problem;
  problem.t = phi_t;
  problem.b = phi_b > 0.0 ? phi_b : SmleConfig::for_sample_size(1000).bandwidth;
  const TargetDistribution target = phi_model.target();
  problem.cdf = [target](double u) { return target.cdf(u); };
  problem.density = JointDensity::from_scheme(phi_model.observation_scheme());
  const GridFunction solution = solve_phi(problem, phi_m);
  CsvTable curve;
  curve.header = {"u", "phi"};
  for (std::size_t i = 0; i < solution.m; ++i)
    curve.rows.push_back({format_double(solution.point(i)), format_double(solution.values[i])});
  emit(curve, phi_out);
  std::cerr << "theta_variance=" << format_double(theta_variance(solution, problem)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
