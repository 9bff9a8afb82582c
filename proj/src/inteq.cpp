#include "censcope/inteq.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "censcope/npmle.hpp"

namespace censcope {

namespace {
constexpr double kCdfClip = 1e-6;
constexpr double kDiffFloor = 1e-12;

double clip_cdf(double f) { return std::clamp(f, kCdfClip, 1.0 - kCdfClip); }
}  // namespace

double GridFunction::interpolate(double u) const {
  if (m == 0) throw std::logic_error("GridFunction: empty");
  const double h = step();
  const double first = 0.5 * h;
  if (u <= first) return values.front();
  const double last = 1.0 - 0.5 * h;
  if (u >= last) return values.back();
  const double s = (u - first) / h;
  const auto i = static_cast<std::size_t>(s);
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

JointDensity JointDensity::from_scheme(const ObservationScheme& scheme) {
  JointDensity d;
  d.joint = [scheme](double t, double u) { return scheme.density(t, u); };
  d.marginal1 = [scheme](double t) { return scheme.marginal1(t); };
  d.marginal2 = [scheme](double u) { return scheme.marginal2(u); };
  return d;
}

double PhiProblem::damping(double u) const {
  const double f = clip_cdf(cdf(u));
  const double denom = density.marginal1(u) * (1.0 - f) + density.marginal2(u) * f;
  if (denom <= 0.0) return 0.0;
  return f * (1.0 - f) / denom;
}

double PhiProblem::forcing(double u) const { return triweight((t - u) / b) / b; }

GridFunction solve_phi(const PhiProblem& problem, std::size_t m) {
  if (m < 100) throw std::invalid_argument("solve_phi: grid size must be at least 100");
  const auto mi = static_cast<Eigen::Index>(m);
  const double du = 1.0 / static_cast<double>(m);

  std::vector<double> grid(m), f(m), d(m);
  Eigen::VectorXd rhs(mi);
  for (std::size_t i = 0; i < m; ++i) {
    grid[i] = (static_cast<double>(i) + 0.5) * du;
    f[i] = clip_cdf(problem.cdf(grid[i]));
    d[i] = problem.damping(grid[i]);
    rhs[static_cast<Eigen::Index>(i)] = d[i] * problem.forcing(grid[i]);
  }

  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(mi, mi);
  for (std::size_t i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double diff = f[std::max(i, j)] - f[std::min(i, j)];
      if (diff < kDiffFloor) continue;
      const double h = problem.density.joint(grid[std::min(i, j)], grid[std::max(i, j)]);
      if (h <= 0.0) continue;
      const double w = d[i] * h / diff * du;
      sys(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= w;
      row_sum += w;
    }
    sys(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += row_sum;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15)) {
    std::ostringstream msg;
    msg << "solve_phi: near-singular discrete system, reciprocal condition " << rcond;
    throw std::runtime_error(msg.str());
  }
  Eigen::VectorXd phi = lu.solve(rhs);
  const double resid = (sys * phi - rhs).norm();
  if (resid > 1e-10 * std::max(rhs.norm(), 1e-300)) {
    std::ostringstream msg;
    msg << "solve_phi: residual " << resid << " exceeds tolerance for rhs norm " << rhs.norm();
    throw std::runtime_error(msg.str());
  }

  GridFunction out;
  out.m = m;
  out.values.assign(phi.data(), phi.data() + phi.size());
  return out;
}

double theta_variance(const GridFunction& phi, const PhiProblem& problem) {
  const std::size_t m = phi.m;
  const double du = phi.step();
  std::vector<double> grid(m), f(m);
  for (std::size_t i = 0; i < m; ++i) {
    grid[i] = phi.point(i);
    f[i] = clip_cdf(problem.cdf(grid[i]));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = phi.values[i];
    total += p * p * problem.density.marginal1(grid[i]) / f[i] * du;
    total += p * p * problem.density.marginal2(grid[i]) / (1.0 - f[i]) * du;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double diff = f[j] - f[i];
      if (diff < kDiffFloor) continue;
      const double h = problem.density.joint(grid[i], grid[j]);
      if (h <= 0.0) continue;
      const double dp = phi.values[j] - p;
      total += dp * dp * h / diff * du * du;
    }
  }
  return total;
}

double TabulatedDensity2d::operator()(double t, double u) const {
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return 0.0;
  const auto md = static_cast<double>(m);
  const auto i = static_cast<Eigen::Index>(std::min(md - 1.0, std::floor(t * md)));
  const auto j = static_cast<Eigen::Index>(std::min(md - 1.0, std::floor(u * md)));
  return values(i, j);
}

double TabulatedDensity2d::marginal1_at(double t) const {
  if (t < 0.0 || t > 1.0) return 0.0;
  const auto md = static_cast<double>(m);
  return marginal1[static_cast<std::size_t>(std::min(md - 1.0, std::floor(t * md)))];
}

double TabulatedDensity2d::marginal2_at(double u) const {
  if (u < 0.0 || u > 1.0) return 0.0;
  const auto md = static_cast<double>(m);
  return marginal2[static_cast<std::size_t>(std::min(md - 1.0, std::floor(u * md)))];
}

JointDensity TabulatedDensity2d::as_joint_density() const {
  auto self = std::make_shared<TabulatedDensity2d>(*this);
  JointDensity d;
  d.joint = [self](double t, double u) { return (*self)(t, u); };
  d.marginal1 = [self](double t) { return self->marginal1_at(t); };
  d.marginal2 = [self](double u) { return self->marginal2_at(u); };
  return d;
}

TabulatedDensity2d kernel_density_2d(const Dataset& data, double bandwidth, std::size_t m) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("kernel_density_2d: empty dataset");
  if (!(bandwidth > 0.0 && bandwidth < 0.5))
    throw std::invalid_argument("kernel_density_2d: bandwidth must lie in (0, 1/2)");
  if (m < 50) throw std::invalid_argument("kernel_density_2d: grid too coarse");

  const auto mi = static_cast<Eigen::Index>(m);
  const auto ni = static_cast<Eigen::Index>(n);
  const double du = 1.0 / static_cast<double>(m);

  Eigen::MatrixXd kt(mi, ni), ku(mi, ni);
  for (Eigen::Index i = 0; i < mi; ++i) {
    const double g = (static_cast<double>(i) + 0.5) * du;
    for (Eigen::Index k = 0; k < ni; ++k) {
      const auto& obs = data.observations[static_cast<std::size_t>(k)];
      kt(i, k) = triweight((g - obs.t) / bandwidth);
      ku(i, k) = triweight((g - obs.u) / bandwidth);
    }
  }

  TabulatedDensity2d out;
  out.m = m;
  out.values = kt * ku.transpose() / (static_cast<double>(n) * bandwidth * bandwidth);
  for (Eigen::Index i = 0; i < mi; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) out.values(i, j) = 0.0;
  const double mass = out.values.sum() * du * du;
  if (!(mass > 0.0)) throw std::runtime_error("kernel_density_2d: all mass outside the triangle");
  out.values /= mass;

  out.marginal1.resize(m);
  out.marginal2.resize(m);
  for (Eigen::Index i = 0; i < mi; ++i) {
    out.marginal1[static_cast<std::size_t>(i)] = out.values.row(i).sum() * du;
    out.marginal2[static_cast<std::size_t>(i)] = out.values.col(i).sum() * du;
  }
  return out;
}

double plugin_variance(const Dataset& data, double t, double b, std::size_t m) {
  if (data.size() < 20) throw std::invalid_argument("plugin_variance: need at least 20 observations");
  const MleResult mle = npmle_icm(data);
  const SmleConfig cfg{b};

  PhiProblem problem;
  problem.t = t;
  problem.b = b;
  problem.cdf = [est = mle.estimate, cfg](double u) { return smle_eval(est, u, cfg); };
  problem.density = kernel_density_2d(data, b).as_joint_density();

  {
    const double du = 1.0 / static_cast<double>(m);
    double prev = -1.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < m; ++i) {
      const double g = (static_cast<double>(i) + 0.5) * du;
      if (g < b || g > 1.0 - b) continue;
      const double v = problem.cdf(g);
      if (have_prev && !(v > prev))
        throw std::runtime_error(
            "plugin_variance: smoothed estimate not strictly increasing on [b, 1-b]");
      prev = v;
      have_prev = true;
    }
  }

  const GridFunction phi = solve_phi(problem, m);

  double acc = 0.0;
  for (const auto& obs : data.observations) {
    const double ft = clip_cdf(problem.cdf(obs.t));
    const double fu = clip_cdf(problem.cdf(obs.u));
    const double pt = phi.interpolate(obs.t);
    const double pu = phi.interpolate(obs.u);
    double theta = 0.0;
    if (obs.d1)
      theta = pt / ft;
    else if (obs.d2)
      theta = (pu - pt) / std::max(fu - ft, kDiffFloor);
    else
      theta = -pu / (1.0 - fu);
    acc += theta * theta;
  }
  return acc / static_cast<double>(data.size());
}

double cs_smle_variance(double t, double b, const std::function<double(double)>& cdf,
                        const std::function<double(double)>& g) {
  const double gt = g(t);
  if (!(gt > 0.0)) throw std::domain_error("cs_smle_variance: observation density must be positive at t");
  const double f = cdf(t);
  return f * (1.0 - f) * kTriweightSquareIntegral / (b * gt);
}

}  // namespace censcope
