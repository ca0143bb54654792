#pragma once

// Central-difference check of grad_alpha / grad_theta against objective_h at
// random points of a random problem.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "shiftsparse/model.hpp"
#include "shiftsparse/solver.hpp"

namespace shiftsparse {

struct GradCheckPoint {
  double lambda = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
  double alpha_rel_error = 0.0;  // max_i |analytic_i - fd_i| / max_i |fd_i|
  double theta_rel_error = 0.0;  // |analytic - fd| / |fd|
};

struct GradCheckReport {
  std::vector<GradCheckPoint> points;
  double max_alpha_rel_error = 0.0;
  double max_theta_rel_error = 0.0;

  double max_rel_error() const { return std::max(max_alpha_rel_error, max_theta_rel_error); }
};

namespace detail {

inline double rel_error(double analytic, double reference, double scale) {
  const double denom = std::max({std::abs(scale), std::abs(reference), std::abs(analytic), 1e-300});
  return std::abs(analytic - reference) / denom;
}

}  // namespace detail

// Points: alpha ~ N(0, 1), theta ~ U[0, 2 pi), lambda ~ U[0.05, 0.95],
// sigma log-uniform on [0.1, 2]. The observation is a random Gaussian signal.
inline GradCheckReport gradient_check(Eigen::Index n, Eigen::Index m, std::size_t points, std::uint64_t seed,
                                      double h = 1e-6) {
  const Dictionary dict = generate_dictionary(n, m, derive_seed(seed, 0));
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Signal x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
  const Spectrum x_f = dft(x);
  const auto& phi_f = dict.spectrum();

  GradCheckReport report;
  for (std::size_t p = 0; p < points; ++p) {
    CoefficientVector alpha(m);
    for (Eigen::Index i = 0; i < m; ++i) alpha[i] = normal(rng);
    const double theta_raw = kTwoPi * unit(rng);
    const double lambda = 0.05 + 0.9 * unit(rng);
    const double sigma = 0.1 * std::pow(20.0, unit(rng));
    const ShiftAngle theta(theta_raw);

    const Eigen::VectorXd ga = grad_alpha(phi_f, alpha, theta, x_f, lambda, sigma);
    const double gt = grad_theta(phi_f, alpha, theta, x_f, lambda);

    Eigen::VectorXd fd(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      CoefficientVector plus = alpha, minus = alpha;
      plus[i] += h;
      minus[i] -= h;
      fd[i] = (objective_h(phi_f, plus, theta, x_f, lambda, sigma) -
               objective_h(phi_f, minus, theta, x_f, lambda, sigma)) / (2.0 * h);
    }
    const double fd_theta = (objective_h(phi_f, alpha, ShiftAngle(theta_raw + h), x_f, lambda, sigma) -
                             objective_h(phi_f, alpha, ShiftAngle(theta_raw - h), x_f, lambda, sigma)) / (2.0 * h);

    GradCheckPoint pt{lambda, sigma, theta.radians(), 0.0, 0.0};
    const double scale = fd.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < m; ++i)
      pt.alpha_rel_error = std::max(pt.alpha_rel_error, detail::rel_error(ga[i], fd[i], scale));
    pt.theta_rel_error = detail::rel_error(gt, fd_theta, 0.0);
    report.max_alpha_rel_error = std::max(report.max_alpha_rel_error, pt.alpha_rel_error);
    report.max_theta_rel_error = std::max(report.max_theta_rel_error, pt.theta_rel_error);
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace shiftsparse
