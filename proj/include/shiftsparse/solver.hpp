#pragma once

// Joint estimation of a circular shift and a sparse coefficient vector.
//
// For an observation x whose un-shifted version is (approximately) Phi*alpha,
// the solver minimizes over (alpha, theta)
//
//   H(alpha, theta) = lambda * G(alpha, theta) + (1 - lambda) * F_sigma(alpha)
//   G(alpha, theta) = || Phi_F alpha - W(theta) x_F ||^2,   W = diag(e^{j theta f})
//
// where Phi_F and x_F are DFTs and F_sigma is the smoothed l0 measure. The
// gradients used by the descent are
//
//   dH/dalpha = 2 lambda Re{ Phi_F^H r } + (1 - lambda) grad F_sigma(alpha)
//   dH/dtheta = -2 lambda Re{ r^H (M W(theta) x_F) },   M = diag(0, j, ..., (n-1) j)
//
// with r = Phi_F alpha - W(theta) x_F. The theta derivative follows from
// dr/dtheta = -M W x_F; both are checked against central differences in the
// test suite. Minimization starts from the sparsest minimum-l2 candidate over
// all integer shifts and runs fixed-length steepest descent with a 1.2 / 0.5
// step adaptation for each sigma of a decreasing schedule, warm-starting
// every stage from the previous one.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shiftsparse/error.hpp"
#include "shiftsparse/model.hpp"
#include "shiftsparse/sparsity.hpp"
#include "shiftsparse/spectral.hpp"

namespace shiftsparse {

struct SolverConfig {
  double lambda = 0.75;
  int inner_iterations = 50;  // L, descent steps per sigma stage
  double mu0 = 0.05;
  ScheduleParams schedule{};
  bool reset_mu_per_stage = false;
  bool reject_uphill = false;
  // theta moves by mu * theta_step_scale * dH/dtheta. Unset means 1 / n^2;
  // 1.0 gives a single shared step size for alpha and theta.
  std::optional<double> theta_step_scale;
  // The integer-shift scan scores candidates with sigma = init_sigma_scale * sigma_1.
  double init_sigma_scale = 0.25;

  void validate() const {
    detail::require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    detail::require(inner_iterations >= 1, "inner_iterations must be >= 1");
    detail::require(mu0 > 0.0 && std::isfinite(mu0), "mu0 must be positive");
    schedule.validate();
    if (theta_step_scale)
      detail::require(*theta_step_scale > 0.0 && std::isfinite(*theta_step_scale), "theta_step_scale must be positive");
    detail::require(init_sigma_scale > 0.0 && std::isfinite(init_sigma_scale), "init_sigma_scale must be positive");
  }

  double theta_scale(Eigen::Index n) const {
    if (theta_step_scale) return *theta_step_scale;
    const auto nn = static_cast<double>(n);
    return 1.0 / (nn * nn);
  }
};

// The observation in the frequency domain, bound to its dictionary. The
// dictionary must outlive the problem.
class ShiftProblem {
 public:
  ShiftProblem(const Dictionary& dict, Signal x) : dict_(&dict), x_(std::move(x)) {
    detail::require_dims(x_.size() == dict.n(), "signal length must equal dictionary rows");
    x_f_ = dft(x_);
  }

  const Dictionary& dictionary() const noexcept { return *dict_; }
  const DictionarySpectrum& phi_f() const noexcept { return dict_->spectrum(); }
  const Signal& signal() const noexcept { return x_; }
  const Spectrum& x_f() const noexcept { return x_f_; }
  Eigen::Index n() const noexcept { return dict_->n(); }
  Eigen::Index m() const noexcept { return dict_->m(); }

 private:
  const Dictionary* dict_;
  Signal x_;
  Spectrum x_f_;
};

namespace detail {

inline void require_lambda(double lambda) {
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
}

inline void check_problem_dims(const DictionarySpectrum& phi_f, const CoefficientVector& alpha, const Spectrum& x_f) {
  require_dims(alpha.size() == phi_f.cols(), "coefficient vector length must equal atom count");
  require_dims(x_f.size() == phi_f.rows(), "spectrum length must equal dictionary rows");
}

}  // namespace detail

inline Spectrum residual(const DictionarySpectrum& phi_f, const CoefficientVector& alpha, ShiftAngle theta,
                         const Spectrum& x_f) {
  detail::check_problem_dims(phi_f, alpha, x_f);
  return phi_f * alpha.cast<Complex>() - apply_phase_ramp(x_f, theta);
}

inline double objective_g(const DictionarySpectrum& phi_f, const CoefficientVector& alpha, ShiftAngle theta,
                          const Spectrum& x_f) {
  return residual(phi_f, alpha, theta, x_f).squaredNorm();
}

inline double objective_h(const DictionarySpectrum& phi_f, const CoefficientVector& alpha, ShiftAngle theta,
                          const Spectrum& x_f, double lambda, double sigma) {
  detail::require_lambda(lambda);
  return lambda * objective_g(phi_f, alpha, theta, x_f) + (1.0 - lambda) * smoothed_l0(alpha, sigma);
}

namespace detail {

inline Eigen::VectorXd grad_alpha_from_residual(const DictionarySpectrum& phi_f, const Spectrum& r,
                                                const CoefficientVector& alpha, double lambda, double sigma) {
  return 2.0 * lambda * (phi_f.adjoint() * r).real() + (1.0 - lambda) * smoothed_l0_grad(alpha, sigma);
}

inline double grad_theta_from_residual(const Spectrum& r, ShiftAngle theta, const Spectrum& x_f, double lambda) {
  const Spectrum d = apply_m_ramp(apply_phase_ramp(x_f, theta));
  return -2.0 * lambda * r.dot(d).real();  // Eigen's dot conjugates the left operand
}

}  // namespace detail

inline Eigen::VectorXd grad_alpha(const DictionarySpectrum& phi_f, const CoefficientVector& alpha, ShiftAngle theta,
                                  const Spectrum& x_f, double lambda, double sigma) {
  detail::require_lambda(lambda);
  return detail::grad_alpha_from_residual(phi_f, residual(phi_f, alpha, theta, x_f), alpha, lambda, sigma);
}

inline double grad_theta(const DictionarySpectrum& phi_f, const CoefficientVector& alpha, ShiftAngle theta,
                         const Spectrum& x_f, double lambda) {
  detail::require_lambda(lambda);
  return detail::grad_theta_from_residual(residual(phi_f, alpha, theta, x_f), theta, x_f, lambda);
}

struct InitScan {
  CoefficientVector alpha;     // alpha(k0)
  ShiftAngle theta;            // 2 pi k0 / n
  long long shift = 0;         // k0
  std::vector<double> scores;  // F(alpha(k), sigma_init) for k = 0..n-1
};

// Scores the minimum-l2 representation of every integer un-shift of x and
// keeps the sparsest one. Ties go to the smallest k.
inline InitScan init_scan(const Dictionary& dict, const Signal& x, double sigma_init) {
  detail::require_dims(x.size() == dict.n(), "signal length must equal dictionary rows");
  const auto n = static_cast<long long>(dict.n());
  InitScan out;
  out.scores.reserve(static_cast<std::size_t>(n));
  double best = 0.0;
  for (long long k = 0; k < n; ++k) {
    CoefficientVector candidate = dict.min_l2_solution(circular_shift<double>(x, -k));
    const double score = smoothed_l0(candidate, sigma_init);
    out.scores.push_back(score);
    if (k == 0 || score < best) {
      best = score;
      out.shift = k;
      out.alpha = std::move(candidate);
    }
  }
  out.theta = ShiftAngle::from_samples(static_cast<double>(out.shift), static_cast<std::size_t>(n));
  return out;
}

struct SolverState {
  CoefficientVector alpha;
  ShiftAngle theta;
  double mu = 0.0;
  double sigma = 1.0;
  double h_value = 0.0;  // H(alpha, theta) at the current sigma
};

struct StageResult {
  SolverState state;
  int downhill_steps = 0;
  int uphill_steps = 0;  // candidate H >= current H; mu halved
};

inline SolverState make_state(const ShiftProblem& problem, CoefficientVector alpha, ShiftAngle theta, double mu,
                              double sigma, double lambda) {
  SolverState s{std::move(alpha), theta, mu, sigma, 0.0};
  s.h_value = objective_h(problem.phi_f(), s.alpha, s.theta, problem.x_f(), lambda, sigma);
  return s;
}

// Runs exactly `iterations` steepest-descent steps at state.sigma.
inline StageResult descent_stage(const SolverState& start, int iterations, const SolverConfig& config,
                                 const ShiftProblem& problem) {
  detail::require(iterations >= 0, "iteration count must be non-negative");
  detail::require(start.mu > 0.0, "step size must be positive");
  const auto& phi_f = problem.phi_f();
  const auto& x_f = problem.x_f();
  const double lambda = config.lambda;
  const double sigma = start.sigma;
  const double theta_scale = config.theta_scale(problem.n());

  StageResult out{start, 0, 0};
  SolverState& s = out.state;
  for (int l = 0; l < iterations; ++l) {
    const Spectrum r = residual(phi_f, s.alpha, s.theta, x_f);
    const double h = lambda * r.squaredNorm() + (1.0 - lambda) * smoothed_l0(s.alpha, sigma);
    const Eigen::VectorXd g_alpha = detail::grad_alpha_from_residual(phi_f, r, s.alpha, lambda, sigma);
    const double g_theta = detail::grad_theta_from_residual(r, s.theta, x_f, lambda);
    if (!std::isfinite(h) || !g_alpha.allFinite() || !std::isfinite(g_theta))
      throw NumericalError("non-finite objective or gradient at sigma=" + std::to_string(sigma) +
                           ", iteration " + std::to_string(l));

    CoefficientVector alpha_next = s.alpha - s.mu * g_alpha;
    const double theta_raw = s.theta.radians() - s.mu * theta_scale * g_theta;
    if (!alpha_next.allFinite() || !std::isfinite(theta_raw))
      throw NumericalError("non-finite descent step at sigma=" + std::to_string(sigma));
    const ShiftAngle theta_next(theta_raw);
    const double h_next = objective_h(phi_f, alpha_next, theta_next, x_f, lambda, sigma);
    const bool downhill = h_next < h;

    if (downhill || !config.reject_uphill) {
      if (!std::isfinite(h_next))
        throw NumericalError("descent step produced a non-finite objective at sigma=" + std::to_string(sigma));
      s.alpha = std::move(alpha_next);
      s.theta = theta_next;
      s.h_value = h_next;
    } else {
      s.h_value = h;
    }
    if (downhill) {
      ++out.downhill_steps;
      s.mu *= 1.2;
    } else {
      ++out.uphill_steps;
      s.mu *= 0.5;
    }
  }
  return out;
}

struct StageTrace {
  double sigma = 0.0;
  double h = 0.0;  // final values of the stage
  double g = 0.0;
  double f = 0.0;
  double mu = 0.0;  // step size at the end of the stage
  int uphill_steps = 0;
};

struct DecompositionResult {
  CoefficientVector alpha_hat;
  ShiftAngle theta_hat;
  double k_hat = 0.0;  // n * theta_hat / (2 pi), in [0, n)
  long long init_shift = 0;
  std::vector<StageTrace> trace;
  std::size_t stage_count = 0;
  std::size_t total_inner_steps = 0;
};

inline DecompositionResult solve(const Dictionary& dict, const Signal& x, const SolverConfig& config = {}) {
  config.validate();
  validate_signal(x);
  detail::require_dims(x.size() == dict.n(), "signal length must equal dictionary rows");

  DecompositionResult result;
  if ((x.array() == 0.0).all()) {
    result.alpha_hat = CoefficientVector::Zero(dict.m());
    result.trace.push_back({config.schedule.sigma_min, 0.0, 0.0, 0.0, config.mu0, 0});
    result.stage_count = 1;
    return result;
  }

  const ShiftProblem problem(dict, x);
  const double sigma_provisional = make_schedule(dict.min_l2_solution(x), config.schedule).front();
  InitScan init = init_scan(dict, x, config.init_sigma_scale * sigma_provisional);
  const SigmaSchedule schedule = make_schedule(init.alpha, config.schedule);
  result.init_shift = init.shift;

  SolverState state = make_state(problem, std::move(init.alpha), init.theta, config.mu0, schedule.front(), config.lambda);
  for (const double sigma : schedule) {
    const double mu = config.reset_mu_per_stage ? config.mu0 : state.mu;
    state = make_state(problem, std::move(state.alpha), state.theta, mu, sigma, config.lambda);
    StageResult stage = descent_stage(state, config.inner_iterations, config, problem);
    state = std::move(stage.state);

    const double g = objective_g(problem.phi_f(), state.alpha, state.theta, problem.x_f());
    const double f = smoothed_l0(state.alpha, sigma);
    result.trace.push_back({sigma, state.h_value, g, f, state.mu, stage.uphill_steps});
    result.total_inner_steps += static_cast<std::size_t>(config.inner_iterations);
  }

  result.alpha_hat = std::move(state.alpha);
  result.theta_hat = state.theta;
  result.k_hat = state.theta.samples(static_cast<std::size_t>(dict.n()));
  result.stage_count = schedule.size();
  return result;
}

// Classical smoothed-l0 recovery without a shift variable: gradient steps on
// sum_i exp(-alpha_i^2 / 2 sigma^2) (step `step` * sigma^2), each followed by
// projection back onto {alpha : Phi alpha = s}.
inline CoefficientVector plain_sl0(const Dictionary& dict, const Signal& s, const SigmaSchedule& schedule,
                                   int inner_steps, double step = 2.0) {
  detail::require_dims(s.size() == dict.n(), "signal length must equal dictionary rows");
  detail::require(inner_steps >= 1, "inner_steps must be >= 1");
  detail::require(step > 0.0, "step must be positive");
  CoefficientVector alpha = dict.min_l2_solution(s);
  for (const double sigma : schedule) {
    for (int l = 0; l < inner_steps; ++l) {
      for (Eigen::Index i = 0; i < alpha.size(); ++i)
        alpha[i] -= step * alpha[i] * detail::gaussian_bump(alpha[i], sigma);
      alpha -= dict.min_l2_solution(dict.synthesize(alpha) - s);
    }
  }
  return alpha;
}

inline CoefficientVector plain_sl0(const Dictionary& dict, const Signal& s, const ScheduleParams& params,
                                   int inner_steps, double step = 2.0) {
  return plain_sl0(dict, s, make_schedule(dict.min_l2_solution(s), params), inner_steps, step);
}

}  // namespace shiftsparse
