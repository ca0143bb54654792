#pragma once

// Smoothed l0 measure F(alpha) = m - sum_i exp(-alpha_i^2 / (2 sigma^2)) and
// the decreasing sigma schedule used for graduated non-convexity.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "shiftsparse/error.hpp"
#include "shiftsparse/model.hpp"

namespace shiftsparse {

namespace detail {

// exp(x) with exponents below -745 flushed to exactly 0.
inline double gaussian_bump(double value, double sigma) {
  const double z = value / sigma;
  const double exponent = -0.5 * z * z;
  return exponent < -745.0 ? 0.0 : std::exp(exponent);
}

inline void require_sigma(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive and finite");
}

}  // namespace detail

inline double smoothed_l0(const CoefficientVector& alpha, double sigma) {
  detail::require_sigma(sigma);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) sum += detail::gaussian_bump(alpha[i], sigma);
  return static_cast<double>(alpha.size()) - sum;
}

inline Eigen::VectorXd smoothed_l0_grad(const CoefficientVector& alpha, double sigma) {
  detail::require_sigma(sigma);
  Eigen::VectorXd g(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double bump = detail::gaussian_bump(alpha[i], sigma);
    g[i] = bump == 0.0 ? 0.0 : (alpha[i] / sigma) / sigma * bump;
  }
  return g;
}

struct ScheduleParams {
  double sigma_min = 0.01;
  double decay = 0.5;

  void validate() const {
    detail::require(sigma_min > 0.0 && std::isfinite(sigma_min), "sigma_min must be positive");
    detail::require(decay > 0.0 && decay < 1.0, "decay must lie in (0, 1)");
  }
};

// Strictly decreasing, positive, non-empty sequence of smoothing widths.
class SigmaSchedule {
 public:
  explicit SigmaSchedule(std::vector<double> values) : values_(std::move(values)) {
    detail::require(!values_.empty(), "sigma schedule must not be empty");
    for (std::size_t r = 0; r < values_.size(); ++r) {
      detail::require(values_[r] > 0.0 && std::isfinite(values_[r]), "sigma schedule values must be positive");
      if (r > 0) detail::require(values_[r] < values_[r - 1], "sigma schedule must be strictly decreasing");
    }
  }

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t r) const { return values_.at(r); }
  double front() const noexcept { return values_.front(); }
  double back() const noexcept { return values_.back(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

 private:
  std::vector<double> values_;
};

// First width max(2 max|alpha0_i|, sigma_min), then geometric decay until the
// first value <= sigma_min.
inline SigmaSchedule make_schedule(const CoefficientVector& alpha0, double sigma_min, double decay) {
  ScheduleParams{sigma_min, decay}.validate();
  const double peak = alpha0.size() > 0 ? alpha0.cwiseAbs().maxCoeff() : 0.0;
  detail::require(std::isfinite(peak), "initial coefficients must be finite");
  std::vector<double> values{std::max(2.0 * peak, sigma_min)};
  while (values.back() > sigma_min) values.push_back(values.back() * decay);
  return SigmaSchedule(std::move(values));
}

inline SigmaSchedule make_schedule(const CoefficientVector& alpha0, const ScheduleParams& params) {
  return make_schedule(alpha0, params.sigma_min, params.decay);
}

}  // namespace shiftsparse
