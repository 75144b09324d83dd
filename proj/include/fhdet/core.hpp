#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fhdet {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Error hierarchy. Every public operation reports failures through one of
// these; no NaN or infinity is returned silently.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct BranchError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
struct SingularPointError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct QuadratureError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline cplx checked(cplx z, const char* where) {
  if (!is_finite(z)) throw OverflowError(std::string(where) + ": result is not finite");
  return z;
}

// Distance from z to the nearest non-positive integer, or a large number when
// z is far from the negative real axis.
inline double nonpositive_integer_distance(cplx z) {
  if (z.real() > 0.5) return std::abs(z);
  double n = std::round(z.real());
  if (n > 0) n = 0;
  return std::abs(z - n);
}

inline bool near_integer(cplx z, double tol) {
  return std::abs(z.imag()) <= tol && std::abs(z.real() - std::round(z.real())) <= tol;
}

// Principal power with an explicit logarithm, so that signed zeros in the
// imaginary part of z select the side of the cut.
inline cplx cpow(cplx z, cplx a) {
  if (z == cplx(0.0)) {
    if (a == cplx(0.0)) return 1.0;
    if (a.real() > 0) return 0.0;
    throw DomainError("cpow: zero base with non-positive exponent");
  }
  return std::exp(a * std::log(z));
}

}  // namespace fhdet
