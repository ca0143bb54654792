#pragma once

// Dictionaries, the Bernoulli-Gaussian source model, synthetic instances and
// the minimum l2-norm solve used to initialize the solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shiftsparse/error.hpp"
#include "shiftsparse/spectral.hpp"

namespace shiftsparse {

using CoefficientVector = Eigen::VectorXd;
using DictionarySpectrum = Eigen::MatrixXcd;  // column i = dft(atom i)

// SplitMix64 finalizer; used to derive independent RNG streams from one seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct DictionaryOptions {
  bool require_overcomplete = true;  // m >= n
  bool unit_norm = false;            // check every column has norm 1 +- 1e-12
  double max_condition = 1e12;       // guard on cond(Phi Phi^T)
};

// Immutable n x m atom matrix with its column-wise DFT and a cached
// Cholesky factorization of Phi Phi^T. Safe to share across threads.
class Dictionary {
 public:
  explicit Dictionary(Eigen::MatrixXd atoms, DictionaryOptions options = {})
      : atoms_(std::move(atoms)), unit_norm_(options.unit_norm) {
    const auto n = atoms_.rows();
    const auto m = atoms_.cols();
    if (n < 2) throw InvalidArgument("dictionary needs at least 2 rows");
    if (m < 1) throw InvalidArgument("dictionary needs at least 1 atom");
    if (options.require_overcomplete && m < n)
      throw InvalidArgument("dictionary must be overcomplete (m >= n)");
    if (!atoms_.allFinite()) throw InvalidArgument("dictionary contains non-finite entries");
    for (Eigen::Index i = 0; i < m; ++i) {
      const double norm = atoms_.col(i).norm();
      if (norm == 0.0) throw InvalidArgument("dictionary atom " + std::to_string(i) + " is zero");
      if (unit_norm_ && std::abs(norm - 1.0) > 1e-12)
        throw InvalidArgument("dictionary atom " + std::to_string(i) + " is not unit norm");
    }

    const Eigen::MatrixXd gram = atoms_ * atoms_.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > options.max_condition)
      throw ConditioningError("Phi*Phi^T is singular or ill-conditioned");
    condition_ = hi / lo;
    gram_llt_.compute(gram);
    if (gram_llt_.info() != Eigen::Success) throw ConditioningError("Cholesky factorization of Phi*Phi^T failed");

    spectrum_.resize(n, m);
    for (Eigen::Index i = 0; i < m; ++i) spectrum_.col(i) = dft(Signal(atoms_.col(i)));
  }

  Eigen::Index n() const noexcept { return atoms_.rows(); }
  Eigen::Index m() const noexcept { return atoms_.cols(); }
  const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }
  const DictionarySpectrum& spectrum() const noexcept { return spectrum_; }
  bool unit_norm() const noexcept { return unit_norm_; }
  double condition_number() const noexcept { return condition_; }

  Signal synthesize(const CoefficientVector& alpha) const {
    detail::require_dims(alpha.size() == m(), "coefficient vector length must equal atom count");
    return atoms_ * alpha;
  }

  // Phi^T (Phi Phi^T)^{-1} s
  CoefficientVector min_l2_solution(const Signal& s) const {
    detail::require_dims(s.size() == n(), "signal length must equal dictionary rows");
    return atoms_.transpose() * gram_llt_.solve(s);
  }

 private:
  Eigen::MatrixXd atoms_;
  DictionarySpectrum spectrum_;
  Eigen::LLT<Eigen::MatrixXd> gram_llt_;
  double condition_ = 1.0;
  bool unit_norm_ = false;
};

// n x m matrix of i.i.d. standard Gaussian entries, columns normalized when
// unit_norm is set. Deterministic in seed.
inline Dictionary generate_dictionary(Eigen::Index n, Eigen::Index m, std::uint64_t seed, bool unit_norm = true) {
  detail::require(n >= 2 && m >= n, "generate_dictionary requires m >= n >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd atoms(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) atoms(i, j) = normal(rng);
  if (unit_norm) atoms.colwise().normalize();
  return Dictionary(std::move(atoms), {.require_overcomplete = true, .unit_norm = unit_norm});
}

inline CoefficientVector min_l2_solution(const Dictionary& dict, const Signal& s) { return dict.min_l2_solution(s); }

// alpha_i ~ p N(0, sigma_on^2) + (1 - p) N(0, sigma_off^2)
struct BernoulliGaussianModel {
  double p = 0.1;
  double sigma_on = 1.0;
  double sigma_off = 0.01;

  void validate() const {
    detail::require(p >= 0.0 && p <= 1.0, "activity probability p must lie in [0, 1]");
    detail::require(sigma_on > 0.0 && sigma_off > 0.0, "sigma_on and sigma_off must be positive");
    detail::require(sigma_off < sigma_on, "sigma_off must be smaller than sigma_on");
  }
};

inline CoefficientVector sample_coefficients(const BernoulliGaussianModel& model, Eigen::Index m, std::uint64_t seed) {
  model.validate();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution active(model.p);
  std::normal_distribution<double> normal(0.0, 1.0);
  CoefficientVector alpha(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double scale = active(rng) ? model.sigma_on : model.sigma_off;
    alpha[i] = scale * normal(rng);
  }
  return alpha;
}

struct SyntheticInstance {
  Dictionary dictionary;
  CoefficientVector alpha_true;
  long long k_true = 0;
  double sigma_noise = 0.0;
  Signal noise;     // the exact noise vector added before shifting
  Signal observed;  // circular_shift(Phi alpha_true + noise, k_true)
  std::uint64_t seed = 0;
  std::optional<BernoulliGaussianModel> model;  // set when alpha_true was sampled

  Eigen::Index n() const { return dictionary.n(); }
  Eigen::Index m() const { return dictionary.m(); }
};

inline SyntheticInstance synthesize(const Dictionary& dict, const CoefficientVector& alpha, long long k,
                                    double sigma_noise, std::uint64_t seed) {
  detail::require_dims(alpha.size() == dict.m(), "coefficient vector length must equal atom count");
  detail::require(k >= 0 && k < dict.n(), "shift must lie in [0, n)");
  detail::require(sigma_noise >= 0.0 && std::isfinite(sigma_noise), "noise std-dev must be >= 0");

  Signal noise = Signal::Zero(dict.n());
  if (sigma_noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = sigma_noise * normal(rng);
  }
  Signal observed = circular_shift<double>(dict.synthesize(alpha) + noise, k);
  return SyntheticInstance{dict, alpha, k, sigma_noise, std::move(noise), std::move(observed), seed, std::nullopt};
}

// Full random instance: fresh dictionary, coefficients, shift (uniform on
// [0, n) unless given) and noise, all derived from one seed.
inline SyntheticInstance generate_instance(Eigen::Index n, Eigen::Index m, const BernoulliGaussianModel& model,
                                           double sigma_noise, std::optional<long long> k, std::uint64_t seed) {
  Dictionary dict = generate_dictionary(n, m, derive_seed(seed, 0));
  CoefficientVector alpha = sample_coefficients(model, m, derive_seed(seed, 1));
  long long shift = 0;
  if (k) {
    shift = *k;
  } else {
    std::mt19937_64 rng(derive_seed(seed, 2));
    shift = std::uniform_int_distribution<long long>(0, n - 1)(rng);
  }
  SyntheticInstance inst = synthesize(dict, alpha, shift, sigma_noise, derive_seed(seed, 3));
  inst.seed = seed;
  inst.model = model;
  return inst;
}

}  // namespace shiftsparse

namespace shiftsparse {

// Noiseless-or-noisy instance with exactly `active` nonzero coefficients of
// magnitude U[0.5, 1.5] and random sign, at a uniform random shift.
inline SyntheticInstance generate_sparse_instance(Eigen::Index n, Eigen::Index m, Eigen::Index active,
                                                  double sigma_noise, std::uint64_t seed) {
  detail::require(active >= 1 && active <= m, "active count must lie in [1, m]");
  Dictionary dict = generate_dictionary(n, m, derive_seed(seed, 0));
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::vector<Eigen::Index> index(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) index[static_cast<std::size_t>(i)] = i;
  std::shuffle(index.begin(), index.end(), rng);
  std::uniform_real_distribution<double> magnitude(0.5, 1.5);
  std::bernoulli_distribution negative(0.5);
  CoefficientVector alpha = CoefficientVector::Zero(m);
  for (Eigen::Index a = 0; a < active; ++a) {
    const double v = magnitude(rng);
    alpha[index[static_cast<std::size_t>(a)]] = negative(rng) ? -v : v;
  }
  const long long k = std::uniform_int_distribution<long long>(0, n - 1)(rng);
  SyntheticInstance inst = synthesize(dict, alpha, k, sigma_noise, derive_seed(seed, 3));
  inst.seed = seed;
  return inst;
}

// Noiseless instance x = circular_shift(phi_i, k) with i and k uniform.
inline SyntheticInstance generate_single_atom_instance(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  Dictionary dict = generate_dictionary(n, m, derive_seed(seed, 0));
  std::mt19937_64 rng(derive_seed(seed, 1));
  const auto atom = std::uniform_int_distribution<Eigen::Index>(0, m - 1)(rng);
  const long long k = std::uniform_int_distribution<long long>(0, n - 1)(rng);
  CoefficientVector alpha = CoefficientVector::Zero(m);
  alpha[atom] = 1.0;
  SyntheticInstance inst = synthesize(dict, alpha, k, 0.0, 0);
  inst.seed = seed;
  return inst;
}

}  // namespace shiftsparse
