// End-to-end acceptance checks. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails. Monte Carlo checks run on a
// fixed master seed so the outcome is reproducible.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "censcope/asymptotics.hpp"
#include "censcope/birge.hpp"
#include "censcope/inteq.hpp"
#include "censcope/isotonic.hpp"
#include "censcope/npmle.hpp"
#include "censcope/rng.hpp"
#include "censcope/simulate.hpp"
#include "censcope/smle.hpp"

using namespace censcope;

namespace {

constexpr std::uint64_t kSeed = 3;
int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

bool in_band(double v, double center, double halfwidth) {
  return v >= center - halfwidth && v <= center + halfwidth;
}

double grid_max_log_lik(const LikelihoodProblem& pr, int G) {
  const int m = static_cast<int>(pr.sites.size());
  std::vector<int> level(m, 0);
  double best = -1e300;
  for (;;) {
    std::vector<double> f(m);
    for (int j = 0; j < m; ++j) f[j] = static_cast<double>(level[j]) / G;
    const double ll = log_likelihood(f, pr);
    if (ll > best) best = ll;
    int j = m - 1;
    while (j >= 0 && level[j] == G) --j;
    if (j < 0) break;
    ++level[j];
    for (int k = j + 1; k < m; ++k) level[k] = level[j];
  }
  return best;
}

std::vector<double> isotonic_oracle(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  double best_cost = 1e300;
  std::vector<double> best(n, 0.0);
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    std::vector<double> fit(n);
    double cost = 0.0, prev_mean = -1e300;
    bool feasible = true;
    int start = 0;
    for (int i = 0; i < n && feasible; ++i) {
      if (!(i == n - 1 || ((mask >> i) & 1))) continue;
      double sum = 0.0;
      for (int k = start; k <= i; ++k) sum += y[k];
      const double mean = sum / (i - start + 1);
      if (mean < prev_mean) {
        feasible = false;
        break;
      }
      for (int k = start; k <= i; ++k) {
        fit[k] = mean;
        cost += (mean - y[k]) * (mean - y[k]);
      }
      prev_mean = mean;
      start = i + 1;
    }
    if (feasible && cost < best_cost) {
      best_cost = cost;
      best = fit;
    }
  }
  return best;
}

void criterion_1() {
  int checked = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; checked < 200; ++seed) {
    const auto scheme = seed % 2 == 0 ? ObservationScheme::separated(0.1)
                                      : ObservationScheme::non_separated();
    const Dataset ds =
        generate_dataset(TargetDistribution::uniform(), scheme, 1 + seed % 4, seed);
    const auto pr = LikelihoodProblem::build(ds);
    const int m = static_cast<int>(pr.sites.size());
    const int G = m <= 4 ? 40 : (m <= 6 ? 24 : 12);
    const double oracle = grid_max_log_lik(pr, G);
    const double icm = npmle_icm(ds).log_likelihood;
    worst = std::max(worst, oracle - icm);
    ++checked;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "worst oracle excess %.2e over 200 datasets", worst);
  report(1, worst <= 1e-6, buf);
}

void criterion_2() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto scheme = seed % 2 == 0 ? ObservationScheme::separated(0.1)
                                      : ObservationScheme::non_separated();
    const Dataset ds = generate_dataset(TargetDistribution::uniform(), scheme, 100, seed);
    const auto pr = LikelihoodProblem::build(ds);
    const double icm = npmle_icm(ds).log_likelihood;
    const double em = log_likelihood(em_converge(naive_start(pr), pr, 1e-15, 2000000), pr);
    worst = std::max(worst, std::abs(icm - em));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max |icm - em| log-likelihood gap %.2e", worst);
  report(2, worst <= 1e-8, buf);
}

void criterion_3() {
  const double b = SmleConfig::for_sample_size(1000).bandwidth;
  const struct {
    double t, value;
  } ref[] = {{0.1, 0.142235}, {0.2, 0.255404}, {0.3, 0.332985}, {0.4, 0.376413},
             {0.5, 0.390382}, {0.6, 0.376340}, {0.7, 0.332856}, {0.8, 0.255255},
             {0.9, 0.142129}};
  bool pass = true;
  double worst_rel = 0.0;
  auto theory_at = [&](double t) {
    PhiProblem p;
    p.t = t;
    p.b = b;
    p.cdf = [](double u) { return u; };
    p.density = JointDensity::from_scheme(ObservationScheme::non_separated());
    return theta_variance(solve_phi(p, 1000), p);
  };
  for (const auto& r : ref) {
    const double rel = std::abs(theory_at(r.t) / r.value - 1.0);
    worst_rel = std::max(worst_rel, rel);
    pass = pass && rel <= 0.01;
  }

  ExperimentConfig cfg;
  cfg.target = TargetDistribution::uniform();
  cfg.scheme = ObservationScheme::non_separated();
  cfg.t0_list = {0.3, 0.5, 0.7};
  cfg.n_list = {1000};
  cfg.reps = 2000;
  cfg.estimators = {EstimatorKind::Smle};
  cfg.master_seed = kSeed;
  cfg.scaling = ScalingTag::SampleSize;
  double ratio_lo = 1e300, ratio_hi = 0.0;
  for (const auto& row : run_experiment(cfg)) {
    const double ratio = row.scaled_var / theory_at(row.t0);
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
    pass = pass && ratio >= 0.95 && ratio <= 1.10;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "theory worst rel err %.4f; simulated/theory variance ratios in [%.3f, %.3f]",
                worst_rel, ratio_lo, ratio_hi);
  report(3, pass, buf);
}

std::vector<TableRow> non_separated_run() {
  ExperimentConfig cfg;
  cfg.target = TargetDistribution::uniform();
  cfg.scheme = ObservationScheme::non_separated();
  cfg.t0_list = {0.3, 0.4, 0.5, 0.6};
  cfg.n_list = {1000};
  cfg.reps = 2000;
  cfg.estimators = {EstimatorKind::Birge, EstimatorKind::Mle, EstimatorKind::Smle};
  cfg.master_seed = kSeed;
  cfg.scaling = ScalingTag::NLogNTwoThirds;
  return run_experiment(cfg);
}

void criterion_4(const std::vector<TableRow>& rows) {
  bool pass = true;
  double mle_lo = 1e300, mle_hi = 0.0, birge_lo = 1e300, birge_hi = 0.0;
  for (const auto& r : rows) {
    if (r.estimator == "mle") {
      pass = pass && in_band(r.scaled_mse, 0.55, 0.08);
      mle_lo = std::min(mle_lo, r.scaled_mse);
      mle_hi = std::max(mle_hi, r.scaled_mse);
    } else if (r.estimator == "birge") {
      pass = pass && in_band(r.scaled_mse, 1.10, 0.15);
      birge_lo = std::min(birge_lo, r.scaled_mse);
      birge_hi = std::max(birge_hi, r.scaled_mse);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "scaled MSE: mle in [%.3f, %.3f] (0.55+-0.08), histogram in [%.3f, %.3f] (1.10+-0.15)",
                mle_lo, mle_hi, birge_lo, birge_hi);
  report(4, pass, buf);
}

void criterion_5(const std::vector<TableRow>& rows) {
  bool pass = true;
  double b2_lo = 1e300, b2_hi = 0.0, var_lo = 1e300, var_hi = 0.0, mle_b2 = 0.0;
  for (const auto& r : rows) {
    if (r.estimator == "birge") {
      pass = pass && in_band(r.scaled_bias_sq, 0.32, 0.05) && in_band(r.scaled_var, 0.78, 0.10);
      b2_lo = std::min(b2_lo, r.scaled_bias_sq);
      b2_hi = std::max(b2_hi, r.scaled_bias_sq);
      var_lo = std::min(var_lo, r.scaled_var);
      var_hi = std::max(var_hi, r.scaled_var);
    } else if (r.estimator == "mle") {
      pass = pass && r.scaled_bias_sq < 0.01;
      mle_b2 = std::max(mle_b2, r.scaled_bias_sq);
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "histogram bias^2 in [%.3f, %.3f], variance in [%.3f, %.3f]; mle bias^2 <= %.4f",
                b2_lo, b2_hi, var_lo, var_hi, mle_b2);
  report(5, pass, buf);
}

void criterion_6(const std::vector<TableRow>& rows) {
  bool pass = true;
  double lo = 1e300, hi = 0.0;
  for (double t0 : {0.4, 0.5, 0.6}) {
    double smle = 0.0, mle = 0.0;
    for (const auto& r : rows) {
      if (r.t0 != t0) continue;
      if (r.estimator == "smle") smle = r.scaled_mse;
      if (r.estimator == "mle") mle = r.scaled_mse;
    }
    const double ratio = smle / mle;
    pass = pass && in_band(ratio, 0.26, 0.05);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "smoothed/mle MSE ratios in [%.3f, %.3f] (0.26+-0.05)", lo, hi);
  report(6, pass, buf);
}

void criterion_7() {
  ExperimentConfig cfg;
  cfg.target = TargetDistribution::uniform();
  cfg.scheme = ObservationScheme::separated(0.1);
  cfg.t0_list = {0.3};
  cfg.n_list = {1000};
  cfg.reps = 2000;
  cfg.estimators = {EstimatorKind::Birge, EstimatorKind::Mle};
  cfg.master_seed = kSeed;
  cfg.scaling = ScalingTag::NTwoThirds;
  double mle_mse = 0.0, birge_mse = 0.0, mle_b2 = 0.0;
  for (const auto& r : run_experiment(cfg)) {
    if (r.estimator == "mle") {
      mle_mse = r.scaled_mse;
      mle_b2 = r.scaled_bias_sq;
    } else {
      birge_mse = r.scaled_mse;
    }
  }
  const bool pass =
      in_band(mle_mse, 0.14, 0.03) && in_band(birge_mse, 0.58, 0.10) && mle_b2 < 0.001;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mle MSE %.3f (0.14+-0.03), histogram MSE %.3f (0.58+-0.10), mle bias^2 %.5f",
                mle_mse, birge_mse, mle_b2);
  report(7, pass, buf);
}

void criterion_8() {
  const auto p4 = TargetDistribution::power_decay(4);
  const auto sep = ObservationScheme::separated(0.1);
  const double printed[4] = {0.15, 0.081, 0.037, 0.014};
  const double printed_step[4] = {0.005, 0.0005, 0.0005, 0.0005};
  bool pass = true;
  double worst_rel = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double v = mle_asymptotic_mse(0.3 + 0.1 * i, p4, sep);
    const double rel = std::abs(v / printed[i] - 1.0);
    worst_rel = std::max(worst_rel, rel);
    // the printed table carries two significant digits; accept a value that
    // rounds to the printed one even when that exceeds two percent
    const bool rounds = std::abs(v - printed[i]) <= printed_step[i];
    pass = pass && (rel <= 0.02 || rounds);
  }

  ExperimentConfig cfg;
  cfg.target = p4;
  cfg.scheme = sep;
  cfg.t0_list = {0.3, 0.4, 0.5, 0.6};
  cfg.n_list = {1000};
  cfg.reps = 2000;
  cfg.estimators = {EstimatorKind::Mle};
  cfg.master_seed = kSeed;
  cfg.scaling = ScalingTag::NTwoThirds;
  const double simulated_ref[4] = {0.16, 0.088, 0.041, 0.016};
  double worst_sim = 0.0;
  for (const auto& r : run_experiment(cfg)) {
    const int i = static_cast<int>((r.t0 - 0.3) * 10.0 + 0.5);
    const double rel = std::abs(r.scaled_mse / simulated_ref[i] - 1.0);
    worst_sim = std::max(worst_sim, rel);
    pass = pass && rel <= 0.30;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "asymptotic values worst rel dev %.4f (vs 2-digit table), simulation worst rel dev %.3f",
                worst_rel, worst_sim);
  report(8, pass, buf);
}

void criterion_9() {
  const auto start = std::chrono::steady_clock::now();
  CounterRng rng(kSeed);
  bool pass = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double eps = 0.02 + 0.1 * rng.uniform();
    const double t0 = 2.0 * eps + (1.0 - 4.0 * eps) * rng.uniform();
    const auto scheme = ObservationScheme::separated(eps);
    try {
      // each call cross-checks its two evaluation paths internally to 1e-6
      // (closed form vs quadrature, general vs specialized) and throws on
      // disagreement
      pass = pass && w_tilde(t0, scheme) > 0.0;
      pass = pass && sigma_sq_separated(t0, 1.0, TargetDistribution::uniform(), scheme) > 0.0;
      pass = pass && xi(t0, TargetDistribution::uniform(), scheme) > 0.0;
      pass = pass && xi(t0, TargetDistribution::power_decay(4), scheme) > 0.0;
    } catch (const std::exception& e) {
      std::printf("  dual-path disagreement at t0=%.4f eps=%.4f: %s\n", t0, eps, e.what());
      pass = false;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "20 random configurations cross-checked in %.1f s", secs);
  report(9, pass && secs < 10.0, buf);
}

void criterion_10() {
  const ChernoffEstimate est = chernoff_variance_mc(0.005, 3.0, 200000, kSeed);
  const double check = est.var2z * std::pow(3.0 / 8.0, 2.0 / 3.0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "Var(2Z) = %.4f (se %.4f), scaled back-check %.4f (0.55+-0.04)",
                est.var2z, est.std_error, check);
  report(10, in_band(check, 0.55, 0.04), buf);
}

void criterion_11() {
  bool pass = true;

  // isotonic projection equals the exhaustive oracle on every 0/1 sequence
  for (int n = 1; n <= 8 && pass; ++n) {
    for (int bits = 0; bits < (1 << n); ++bits) {
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = (bits >> i) & 1;
      const auto fit = weighted_isotonic(y, std::vector<double>(n, 1.0));
      const auto oracle = isotonic_oracle(y);
      for (int i = 0; i < n; ++i) pass = pass && std::abs(fit[i] - oracle[i]) <= 1e-12;
    }
  }

  // smoothed estimates stay monotone within [0,1] on a fine grid
  for (std::uint64_t seed = 1; seed <= 100 && pass; ++seed) {
    const Dataset ds = generate_dataset(
        TargetDistribution::uniform(),
        seed % 2 == 0 ? ObservationScheme::separated(0.1) : ObservationScheme::non_separated(),
        80, seed);
    const auto mle = npmle_icm(ds).estimate;
    const SmleConfig cfg{0.05 + 0.4 * (static_cast<double>(seed % 7) / 7.0)};
    double prev = -1e-12;
    for (int i = 0; i <= 1000; ++i) {
      const double v = smle_eval(mle, i / 1000.0, cfg);
      pass = pass && v >= prev - 1e-12 && v >= -1e-12 && v <= 1.0 + 1e-12;
      prev = v;
    }
  }

  // weight normalization
  for (std::uint64_t seed = 1; seed <= 10 && pass; ++seed) {
    const Dataset ds = generate_dataset(TargetDistribution::uniform(),
                                        ObservationScheme::non_separated(), 500, seed);
    const auto part = build_partition(0.45, 9);
    const auto ws = birge_weights(count_statistics(ds, part), part);
    double sum = 0.0;
    for (double w : ws.w) sum += w;
    pass = pass && std::abs(sum - 1.0) <= 1e-12;
  }

  // mse identity on a small experiment
  ExperimentConfig cfg;
  cfg.target = TargetDistribution::uniform();
  cfg.scheme = ObservationScheme::non_separated();
  cfg.t0_list = {0.5};
  cfg.n_list = {200};
  cfg.reps = 100;
  cfg.estimators = {EstimatorKind::Birge, EstimatorKind::Mle, EstimatorKind::Smle};
  cfg.master_seed = kSeed;
  for (const auto& r : run_experiment(cfg))
    pass = pass && std::abs(r.scaled_mse - (r.scaled_var + r.scaled_bias_sq)) <= 1e-9;

  report(11, pass, "gcm oracle, smoothing shape, weight normalization, mse identity");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  const auto rows = non_separated_run();
  criterion_4(rows);
  criterion_5(rows);
  criterion_6(rows);
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s (%d/11 passed, %.1f s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              11 - g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
