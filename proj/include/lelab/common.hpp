#pragma once

// Shared numeric constants and small helpers used across the library.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lelab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Surface/volume constants that recur in the quantization identities.
inline const double kPi2    = kPi * kPi;
inline const double kSqrtE  = std::exp(0.5);

// Limit values of the concentration program, evaluated once.
inline const double k64Pi2       = 64.0 * kPi2;             // total bubble mass, 4d
inline const double k64Pi2E      = 64.0 * kPi2 * std::exp(1.0);
inline const double k128Pi2E     = 128.0 * kPi2 * std::exp(1.0);
inline const double k64Pi2SqrtE  = 64.0 * kPi2 * kSqrtE;    // per-peak simple-layer mass, 4d
inline const double k8Pi         = 8.0 * kPi;               // total bubble mass, 2d
inline const double k16PiE       = 16.0 * kPi * std::exp(1.0);
inline const double k8PiSqrtE    = 8.0 * kPi * kSqrtE;      // per-peak mass, 2d

using Vec = Eigen::VectorXd;

// Small point type covering both the planar and the four-dimensional cases.
// Fixed capacity 4, stack allocated.
using Pt = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

inline Pt pt2(double x, double y) {
  Pt p(2);
  p << x, y;
  return p;
}

inline Pt pt4(double a, double b, double c, double d) {
  Pt p(4);
  p << a, b, c, d;
  return p;
}

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double sqr(double x) { return x * x; }

// sign(u)|u|^a, continuous through 0 for a > 0.
inline double signed_pow(double u, double a) {
  if (u == 0.0) return 0.0;
  return u > 0.0 ? std::pow(u, a) : -std::pow(-u, a);
}

}  // namespace lelab
