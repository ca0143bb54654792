#pragma once

// Direct DFT, circular shifts and the diagonal phase operators that realize
// shifts in the frequency domain.
//
// Convention: X[f] = sum_t s[t] exp(-j 2 pi f t / n), inverse scaled by 1/n.
// Every other header goes through these functions for its transforms.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shiftsparse/error.hpp"

namespace shiftsparse {

using Complex = std::complex<double>;
using Signal = Eigen::VectorXd;           // real time-domain samples
using ComplexSignal = Eigen::VectorXcd;   // e.g. a fractionally shifted signal
using Spectrum = Eigen::VectorXcd;        // DFT bins 0..n-1

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Throws unless s has at least two samples and all of them are finite.
inline void validate_signal(const Signal& s) {
  if (s.size() < 2) throw InvalidArgument("signal needs at least 2 samples");
  if (!s.allFinite()) throw InvalidArgument("signal contains non-finite samples");
}

// Continuous shift parameter theta, always stored in [0, 2 pi).
class ShiftAngle {
 public:
  ShiftAngle() = default;
  explicit ShiftAngle(double radians) : theta_(canonicalize(radians)) {}

  // Angle corresponding to a (possibly fractional) shift of k samples.
  static ShiftAngle from_samples(double k, std::size_t n) {
    return ShiftAngle(kTwoPi * k / static_cast<double>(n));
  }

  double radians() const noexcept { return theta_; }

  // n * theta / (2 pi), in [0, n).
  double samples(std::size_t n) const noexcept {
    const double nn = static_cast<double>(n);
    double k = nn * theta_ / kTwoPi;
    if (k >= nn) k -= nn;
    return k;
  }

  static double canonicalize(double radians) {
    if (!std::isfinite(radians)) throw InvalidArgument("shift angle must be finite");
    double t = std::fmod(radians, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
  }

  friend bool operator==(const ShiftAngle&, const ShiftAngle&) = default;

 private:
  double theta_ = 0.0;
};

namespace detail {

// exp(sign * j 2 pi q / n) for q = 0..n-1; indexing by (f * t) mod n keeps
// the phase argument exact for large products.
inline std::vector<Complex> twiddles(std::size_t n, double sign) {
  std::vector<Complex> w(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double angle = sign * kTwoPi * static_cast<double>(q) / static_cast<double>(n);
    w[q] = {std::cos(angle), std::sin(angle)};
  }
  return w;
}

template <typename In>
Spectrum dft_impl(const In& x, double sign) {
  const auto n = static_cast<std::size_t>(x.size());
  Spectrum out = Spectrum::Zero(x.size());
  if (n == 0) return out;
  const auto w = twiddles(n, sign);
  for (std::size_t f = 0; f < n; ++f) {
    Complex acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) acc += Complex(x[static_cast<Eigen::Index>(t)]) * w[(f * t) % n];
    out[static_cast<Eigen::Index>(f)] = acc;
  }
  return out;
}

}  // namespace detail

inline Spectrum dft(const Signal& s) { return detail::dft_impl(s, -1.0); }

// Forward transform of a complex sequence (same convention as dft()).
inline Spectrum dft(const ComplexSignal& s) { return detail::dft_impl(s, -1.0); }

inline ComplexSignal idft(const Spectrum& X) {
  ComplexSignal out = detail::dft_impl(X, 1.0);
  if (X.size() > 0) out /= static_cast<double>(X.size());
  return out;
}

// out[i] = s[(i - k) mod n]; positive k delays the signal.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> circular_shift(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& s, long long k) {
  const auto n = static_cast<long long>(s.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(s.size());
  if (n == 0) return out;
  const long long shift = ((k % n) + n) % n;
  for (long long i = 0; i < n; ++i) out[i] = s[((i - shift) % n + n) % n];
  return out;
}

// out[f] = exp(j theta f) X[f]. For theta = 2 pi k / n this advances the
// underlying signal by k samples (the inverse of circular_shift by k).
inline Spectrum apply_phase_ramp(const Spectrum& X, ShiftAngle theta) {
  Spectrum out(X.size());
  const double t = theta.radians();
  for (Eigen::Index f = 0; f < X.size(); ++f) {
    const double angle = t * static_cast<double>(f);
    out[f] = Complex(std::cos(angle), std::sin(angle)) * X[f];
  }
  return out;
}

// out[f] = (j f) X[f], the diagonal operator diag(0, j, ..., (n-1) j).
inline Spectrum apply_m_ramp(const Spectrum& X) {
  Spectrum out(X.size());
  for (Eigen::Index f = 0; f < X.size(); ++f) out[f] = Complex(0.0, static_cast<double>(f)) * X[f];
  return out;
}

// Delays s by a possibly fractional number of samples. The result is
// complex in general; take the real part only when k is an integer.
inline ComplexSignal fractional_shift(const Signal& s, double k) {
  const auto n = static_cast<std::size_t>(s.size());
  return idft(apply_phase_ramp(dft(s), ShiftAngle::from_samples(-k, n)));
}

}  // namespace shiftsparse
