#include "censcope/model.hpp"

#include <cmath>
#include <stdexcept>

#include "censcope/csv.hpp"

namespace censcope {

double TargetDistribution::cdf(double x) const {
  if (family == TargetFamily::Uniform01) return x;
  return 1.0 - std::pow(1.0 - x, power);
}

double TargetDistribution::density(double x) const {
  if (family == TargetFamily::Uniform01) return 1.0;
  return power * std::pow(1.0 - x, power - 1);
}

double TargetDistribution::quantile(double p) const {
  if (family == TargetFamily::Uniform01) return p;
  return 1.0 - std::pow(1.0 - p, 1.0 / power);
}

std::array<double, 2> eval_target(const TargetDistribution& dist, double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("eval_target: x outside [0,1]");
  return {dist.cdf(x), dist.density(x)};
}

ObservationScheme ObservationScheme::separated(double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("separated scheme requires epsilon in (0, 1/2)");
  return {SchemeKind::Separated, eps};
}

double ObservationScheme::density(double t, double u) const {
  if (kind == SchemeKind::NonSeparated) {
    return (t >= 0.0 && t <= u && u <= 1.0) ? 2.0 : 0.0;
  }
  const double s = 1.0 - epsilon;
  return (t >= 0.0 && t + epsilon <= u && u <= 1.0) ? 2.0 / (s * s) : 0.0;
}

double ObservationScheme::marginal1(double t) const {
  if (kind == SchemeKind::NonSeparated) {
    return (t >= 0.0 && t <= 1.0) ? 2.0 * (1.0 - t) : 0.0;
  }
  const double s = 1.0 - epsilon;
  return (t >= 0.0 && t <= 1.0 - epsilon) ? 2.0 * (1.0 - t - epsilon) / (s * s) : 0.0;
}

double ObservationScheme::marginal2(double u) const {
  if (kind == SchemeKind::NonSeparated) {
    return (u >= 0.0 && u <= 1.0) ? 2.0 * u : 0.0;
  }
  const double s = 1.0 - epsilon;
  return (u >= epsilon && u <= 1.0) ? 2.0 * (u - epsilon) / (s * s) : 0.0;
}

std::array<double, 3> scheme_density(const ObservationScheme& s, double t, double u) {
  return {s.density(t, u), s.marginal1(t), s.marginal2(u)};
}

std::array<int, 3> censor_indicator(double x, double t, double u) {
  if (!(t < u)) throw std::invalid_argument("censor_indicator: requires t < u");
  if (x <= t) return {1, 0, 0};
  if (x <= u) return {0, 1, 0};
  return {0, 0, 1};
}

std::array<double, 2> draw_observation_pair(const ObservationScheme& s, CounterRng& rng) {
  for (;;) {
    double v1 = rng.uniform();
    double v2 = rng.uniform();
    double t = std::min(v1, v2);
    double u = std::max(v1, v2);
    if (t == u) continue;  // probability-zero tie, redraw
    if (s.kind == SchemeKind::Separated) {
      const double sc = 1.0 - s.epsilon;
      t = sc * t;
      u = s.epsilon + sc * u;
    }
    return {t, u};
  }
}

Dataset generate_dataset(const TargetDistribution& target, const ObservationScheme& scheme,
                         std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_dataset: n must be >= 1");
  Dataset ds;
  ds.seed = seed;
  ds.scheme = scheme;
  ds.target = target;
  ds.observations.reserve(n);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = target.quantile(rng.uniform());
    const auto [t, u] = draw_observation_pair(scheme, rng);
    const auto d = censor_indicator(x, t, u);
    ds.observations.push_back({t, u, d[0], d[1], d[2]});
  }
  return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  CsvTable table;
  table.header = {"t", "u", "d1", "d2", "d3"};
  table.rows.reserve(ds.size());
  for (const auto& o : ds.observations) {
    table.rows.push_back({format_double(o.t), format_double(o.u), std::to_string(o.d1),
                          std::to_string(o.d2), std::to_string(o.d3)});
  }
  write_csv(table, path);
}

Dataset read_dataset_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected = {"t", "u", "d1", "d2", "d3"};
  if (table.header != expected)
    throw std::runtime_error("dataset CSV must have header t,u,d1,d2,d3: " + path);
  Dataset ds;
  ds.observations.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    CensoredObservation o;
    o.t = std::stod(row[0]);
    o.u = std::stod(row[1]);
    o.d1 = std::stoi(row[2]);
    o.d2 = std::stoi(row[3]);
    o.d3 = std::stoi(row[4]);
    if (o.d1 + o.d2 + o.d3 != 1)
      throw std::runtime_error("dataset CSV: indicators must sum to 1 in " + path);
    if (!(o.t < o.u)) throw std::runtime_error("dataset CSV: requires t < u in " + path);
    ds.observations.push_back(o);
  }
  return ds;
}

}  // namespace censcope
