#include "censcope/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "censcope/birge.hpp"
#include "censcope/quadrature.hpp"
#include "censcope/rng.hpp"

namespace censcope {

double sigma0_sq(double t0, double c, const TargetDistribution& target,
                 const ObservationScheme& scheme) {
  if (scheme.kind != SchemeKind::NonSeparated)
    throw std::domain_error("sigma0_sq: non-separated scheme required");
  const double f0 = target.density(t0);
  const double h = scheme.diagonal_density();
  if (!(f0 > 0.0) || !(h > 0.0)) throw std::domain_error("sigma0_sq: f0 and h must be positive");
  const double a = birge_a(t0, t0, scheme);
  const double b = birge_b(t0, t0, scheme);
  const double ab = a + b;
  return 3.0 * f0 * (a * a + b * b) / (c * h * ab * ab);
}

double w_tilde(double t0, const ObservationScheme& scheme) {
  if (scheme.kind != SchemeKind::Separated)
    throw std::domain_error("w_tilde: separated scheme required");
  const double eps = scheme.epsilon;
  if (!(2.0 * eps <= t0 && t0 <= 1.0 - 2.0 * eps))
    throw std::domain_error("w_tilde: requires 2*eps <= t0 <= 1-2*eps");
  // The integrands vanish like sqrt(t - eps) at the support edge; substituting
  // t = eps + y^2 (and u = 1 - eps - y^2) makes them smooth for the quadrature.
  const double left = integrate(
      [&](double y) {
        const double t = eps + y * y;
        const double w = std::max(0.0, std::min(scheme.density(t, t0), scheme.marginal2(t)));
        return 2.0 * y * std::sqrt(w) / (t0 - t);
      },
      0.0, std::sqrt(t0 - 2.0 * eps) - 1e-11, 1e-12);
  const double right = integrate(
      [&](double y) {
        const double u = 1.0 - eps - y * y;
        const double w = std::max(0.0, std::min(scheme.density(t0, u), scheme.marginal1(u)));
        return 2.0 * y * std::sqrt(w) / (u - t0);
      },
      0.0, std::sqrt(1.0 - t0 - 2.0 * eps) - 1e-11, 1e-12);
  const double general = left + right;

  // Uniform-scheme specialization, kept as a second algebraic route.
  const double s = 1.0 - eps;
  const double unif =
      integrate([&](double y) { return 2.0 * y * std::sqrt(2.0) * y / (t0 - eps - y * y); }, 0.0,
                std::sqrt(t0 - 2.0 * eps), 1e-12) /
          s +
      integrate([&](double y) { return 2.0 * y * std::sqrt(2.0) * y / (1.0 - eps - y * y - t0); },
                0.0, std::sqrt(1.0 - t0 - 2.0 * eps), 1e-12) /
          s;
  if (std::abs(general - unif) > 1e-8)
    throw std::logic_error("w_tilde: general and uniform-specialized paths disagree");
  if (!std::isfinite(general)) throw std::domain_error("w_tilde: integral not finite");
  return general;
}

double sigma_sq_separated(double t0, double c, const TargetDistribution& target,
                          const ObservationScheme& scheme) {
  if (scheme.kind != SchemeKind::Separated)
    throw std::domain_error("sigma_sq_separated: separated scheme required");
  const double eps = scheme.epsilon;
  const double wt = w_tilde(t0, scheme);
  const double f_t0 = target.cdf(t0);
  auto pq = [&](double p) { return p * (1.0 - p); };

  const double upper = integrate(
      [&](double u) {
        const double ratio =
            std::min(scheme.marginal1(u), scheme.density(t0, u)) / scheme.density(t0, u);
        const double d = target.cdf(u) - f_t0;
        return ratio * pq(d) / ((u - t0) * (u - t0));
      },
      t0 + eps + 1e-11, 1.0 - eps, 1e-12);
  const double lower = integrate(
      [&](double t) {
        const double ratio =
            std::min(scheme.marginal2(t), scheme.density(t, t0)) / scheme.density(t, t0);
        const double d = f_t0 - target.cdf(t);
        return ratio * pq(d) / ((t0 - t) * (t0 - t));
      },
      eps, t0 - eps - 1e-11, 1e-12);
  const double general = (upper + lower) / (c * wt * wt);

  // Uniform observation scheme: (g /\ h)/h reduces to the distance to the
  // support edge; check the specialized integrals against the general path.
  const double upper_u = integrate(
      [&](double u) {
        const double d = target.cdf(u) - f_t0;
        return (1.0 - u - eps) * pq(d) / ((u - t0) * (u - t0));
      },
      t0 + eps, 1.0 - eps, 1e-12);
  const double lower_u = integrate(
      [&](double t) {
        const double d = f_t0 - target.cdf(t);
        return (t - eps) * pq(d) / ((t0 - t) * (t0 - t));
      },
      eps, t0 - eps, 1e-12);
  const double special = (upper_u + lower_u) / (c * wt * wt);
  if (std::abs(general - special) > 1e-8)
    throw std::logic_error("sigma_sq_separated: general and specialized paths disagree");
  return general;
}

namespace {

double xi_quadrature(double t0, const TargetDistribution& target,
                     const ObservationScheme& scheme) {
  const double eps = scheme.epsilon;
  const double f_t0 = target.cdf(t0);
  const double k1 = integrate(
      [&](double v) { return scheme.density(t0, v) / (target.cdf(v) - f_t0); }, t0 + eps, 1.0,
      1e-10);
  const double k2 = integrate(
      [&](double u) { return scheme.density(u, t0) / (f_t0 - target.cdf(u)); }, 0.0, t0 - eps,
      1e-10);
  return scheme.marginal1(t0) / f_t0 + k1 + k2 + scheme.marginal2(t0) / (1.0 - f_t0);
}

}  // namespace

double xi(double t0, const TargetDistribution& target, const ObservationScheme& scheme) {
  if (scheme.kind != SchemeKind::Separated)
    throw std::domain_error("xi: separated scheme required");
  const double f_t0 = target.cdf(t0);
  if (!(f_t0 > 0.0 && f_t0 < 1.0)) throw std::domain_error("xi: requires 0 < F0(t0) < 1");
  const double eps = scheme.epsilon;
  const double quad = xi_quadrature(t0, target, scheme);

  double closed = quad;
  bool have_closed = false;
  const double s2 = (1.0 - eps) * (1.0 - eps);
  if (target.family == TargetFamily::Uniform01) {
    closed = 2.0 / s2 *
             ((1.0 - t0 - eps) / t0 + std::log(t0 * (1.0 - t0) / (eps * eps)) +
              (t0 - eps) / (1.0 - t0));
    have_closed = true;
  } else if (target.family == TargetFamily::PowerDecay && target.power == 4) {
    const double a = 1.0 - t0;
    closed = 2.0 / s2 * ((1.0 - t0 - eps) / f_t0 + (t0 - eps) / (1.0 - f_t0)) +
             1.0 / (2.0 * s2 * a * a * a) *
                 (2.0 * std::atan((a - eps) / a) + std::log((2.0 * a - eps) / eps) +
                  2.0 * std::atan((a + eps) / a) - 2.0 * std::atan(1.0 / a) +
                  std::log(t0 * (2.0 * a + eps) / (eps * (2.0 - t0))));
    have_closed = true;
  }
  if (have_closed && std::abs(closed - quad) > 1e-6)
    throw std::logic_error("xi: closed form and quadrature disagree");
  return have_closed ? closed : quad;
}

double mle_asymptotic_mse(double t0, const TargetDistribution& target,
                          const ObservationScheme& scheme, double chernoff_var) {
  const double f0 = target.density(t0);
  if (scheme.kind == SchemeKind::NonSeparated) {
    const double h = scheme.diagonal_density();
    return chernoff_var * std::pow(0.75 * f0 * f0 / h, 2.0 / 3.0);
  }
  const double x = xi(t0, target, scheme);
  return chernoff_var * std::pow(f0 / (2.0 * x), 2.0 / 3.0);
}

ChernoffEstimate chernoff_variance_mc(double grid_step, double horizon, std::size_t reps,
                                      std::uint64_t seed, int threads) {
  if (!(horizon >= 3.0)) throw std::invalid_argument("chernoff_variance_mc: horizon >= 3");
  if (!(grid_step <= 0.01)) throw std::invalid_argument("chernoff_variance_mc: grid_step <= 0.01");
  if (reps < 100000) throw std::invalid_argument("chernoff_variance_mc: reps >= 1e5");
  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / grid_step));
  const double sd = std::sqrt(grid_step);

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  std::vector<double> sum_z(threads, 0.0), sum_z2(threads, 0.0), sum_z4(threads, 0.0);
  auto worker = [&](int w) {
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (std::size_t r = w; r < reps; r += static_cast<std::size_t>(threads)) {
      CounterRng rng(derive_seed(seed, r));
      // Two-sided walk from the origin; track the last location of the max of
      // W(t) - t^2 (right branch wins ties, matching "last time").
      double best = 0.0, arg = 0.0, wpos = 0.0, wneg = 0.0;
      for (std::size_t i = 1; i <= steps; ++i) {
        const double t = i * grid_step;
        wneg += sd * rng.normal();
        const double vneg = wneg - t * t;
        if (vneg > best) {
          best = vneg;
          arg = -t;
        }
      }
      for (std::size_t i = 1; i <= steps; ++i) {
        const double t = i * grid_step;
        wpos += sd * rng.normal();
        const double vpos = wpos - t * t;
        if (vpos >= best) {
          best = vpos;
          arg = t;
        }
      }
      s1 += arg;
      s2 += arg * arg;
      s4 += arg * arg * arg * arg;
    }
    sum_z[w] = s1;
    sum_z2[w] = s2;
    sum_z4[w] = s4;
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  for (auto& th : pool) th.join();
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int w = 0; w < threads; ++w) {
    s1 += sum_z[w];
    s2 += sum_z2[w];
    s4 += sum_z4[w];
  }
  const double nrep = static_cast<double>(reps);
  const double mean = s1 / nrep;
  const double var_z = s2 / nrep - mean * mean;
  const double m4 = s4 / nrep;
  // se of the sample variance: sqrt((m4 - var^2)/n), scaled by 4 for Var(2Z)
  const double se_var_z = std::sqrt(std::max(0.0, m4 - var_z * var_z) / nrep);
  return {4.0 * var_z, 4.0 * se_var_z, mean};
}

double minimax_constant(double t0, const TargetDistribution& target,
                        const ObservationScheme& scheme) {
  if (scheme.kind != SchemeKind::NonSeparated)
    throw std::domain_error("minimax_constant: non-separated scheme required");
  const double f0 = target.density(t0);
  const double h = scheme.diagonal_density();
  if (!(h > 0.0)) throw std::domain_error("minimax_constant: h(t0,t0) must be positive");
  return std::cbrt(6.0) / 4.0 * std::exp(-1.0 / 3.0) * std::cbrt(f0 * f0 / h);
}

HellingerResult hellinger_sq_numeric(double t0, double c, double n,
                                     const TargetDistribution& target,
                                     const ObservationScheme& scheme) {
  if (scheme.kind != SchemeKind::NonSeparated)
    throw std::domain_error("hellinger_sq_numeric: non-separated scheme required");
  const double delta = c * std::pow(n * std::log(n), -1.0 / 3.0);
  if (!(t0 - delta > 0.0 && t0 + delta < 1.0))
    throw std::domain_error("hellinger_sq_numeric: perturbation interval leaves (0,1)");

  const double f_lo = target.cdf(t0 - delta);
  const double f_hi = target.cdf(t0 + delta);
  auto f_n = [&](double x) {
    if (x < t0 - delta) return target.cdf(x);
    if (x < t0) return f_lo;
    if (x < t0 + delta) return f_hi;
    return target.cdf(x);
  };
  // (sqrt(a) - sqrt(b))^2 written as (a-b)^2/(sqrt(a)+sqrt(b))^2; the direct
  // form loses all digits when a and b are close, and the quadrature then
  // chases integrand noise instead of converging.
  auto sqrt_diff_sq = [](double a, double b) {
    const double s = std::sqrt(a) + std::sqrt(b);
    if (s == 0.0) return 0.0;
    const double r = (a - b) / s;
    return r * r;
  };
  const std::vector<double> breaks = {t0 - delta, t0, t0 + delta};

  auto inner = [&](double t) {
    const double term1 = sqrt_diff_sq(f_n(t), target.cdf(t));
    return integrate_with_breaks(
        [&](double u) {
          const double h = scheme.density(t, u);
          if (h == 0.0) return 0.0;
          const double d0 = std::max(0.0, target.cdf(u) - target.cdf(t));
          const double dn = std::max(0.0, f_n(u) - f_n(t));
          const double term2 = sqrt_diff_sq(dn, d0);
          const double term3 = sqrt_diff_sq(std::max(0.0, 1.0 - f_n(u)), 1.0 - target.cdf(u));
          return h * (term1 + term2 + term3);
        },
        t, 1.0, breaks, 1e-13);
  };
  const double total = integrate_with_breaks(inner, 0.0, 1.0, breaks, 1e-11);
  HellingerResult res;
  res.h_sq = 0.5 * total;
  res.n_h_sq = n * res.h_sq;
  res.n_h_sq_over_c3 = res.n_h_sq / (c * c * c);
  return res;
}

AsymptoticReport birge_asymptotics(double t0, const TargetDistribution& target,
                                   const ObservationScheme& scheme) {
  const double c = optimal_c(t0, target, scheme);
  AsymptoticReport rep;
  rep.bias = 0.5 * c * target.density(t0);
  if (scheme.kind == SchemeKind::NonSeparated) {
    rep.variance = sigma0_sq(t0, c, target, scheme);
    rep.norming = Norming::NLogNOneThird;
  } else {
    rep.variance = sigma_sq_separated(t0, c, target, scheme);
    rep.norming = Norming::NOneThird;
  }
  rep.mse = rep.bias * rep.bias + rep.variance;
  return rep;
}

}  // namespace censcope
