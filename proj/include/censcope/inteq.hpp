#ifndef CENSCOPE_INTEQ_HPP
#define CENSCOPE_INTEQ_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

#include "censcope/model.hpp"
#include "censcope/smle.hpp"

namespace censcope {

// Values tabulated on the midpoint grid u_i = (i + 1/2)/m of [0,1].
struct GridFunction {
  std::size_t m = 0;
  std::vector<double> values;

  double point(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(m); }
  double step() const { return 1.0 / static_cast<double>(m); }

  // Piecewise-linear interpolation between grid midpoints, constant beyond them.
  double interpolate(double u) const;
};

// Joint observation-time density on {t < u} together with its marginals.
struct JointDensity {
  std::function<double(double, double)> joint;
  std::function<double(double)> marginal1;
  std::function<double(double)> marginal2;

  static JointDensity from_scheme(const ObservationScheme& scheme);
};

struct PhiProblem {
  double t = 0.5;
  double b = 0.2;
  std::function<double(double)> cdf;
  JointDensity density;

  // d_F(u) = F(1-F) / (h1 (1-F) + h2 F), with F clipped away from 0 and 1.
  double damping(double u) const;
  // Forcing k_{t,b}(u) = K((t - u)/b)/b.
  double forcing(double u) const;
};

// Solves the discretized second-kind integral equation (I - A) phi = d_F k_{t,b}
// by dense LU on the m-point midpoint grid.
GridFunction solve_phi(const PhiProblem& problem, std::size_t m);

// E theta^2 = int phi^2 h1/F + double-int (phi(v)-phi(u))^2 h/(F(v)-F(u)) + int phi^2 h2/(1-F),
// all by the midpoint rule on the grid phi lives on.
double theta_variance(const GridFunction& phi, const PhiProblem& problem);

// Product-triweight kernel density of the observed (t,u) pairs, tabulated on an
// m x m midpoint grid, zeroed outside the t < u triangle and renormalized.
struct TabulatedDensity2d {
  std::size_t m = 0;
  Eigen::MatrixXd values;              // (i,j) -> estimated h(grid_i, grid_j)
  std::vector<double> marginal1;
  std::vector<double> marginal2;

  double point(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(m); }
  double operator()(double t, double u) const;
  double marginal1_at(double t) const;
  double marginal2_at(double u) const;

  JointDensity as_joint_density() const;
};

TabulatedDensity2d kernel_density_2d(const Dataset& data, double bandwidth, std::size_t m = 200);

// Plug-in estimate of n var(SMLE(t)): solves the equation with the smoothed MLE
// and the kernel density estimate, then averages theta-tilde^2 over the sample.
double plugin_variance(const Dataset& data, double t, double b, std::size_t m = 1000);

// Current-status analog F(1-F) int K^2 / (b g(t)), used as an independent
// cross-check of the pipeline in the single-observation-time model.
double cs_smle_variance(double t, double b, const std::function<double(double)>& cdf,
                        const std::function<double(double)>& g);

}  // namespace censcope

#endif
