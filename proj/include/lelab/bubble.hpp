#pragma once

// Entire Liouville profiles: the universal blow-up limits.
//
// In dimension four the profile solves  lap^2 W = e^W  on R^4 with total
// mass  int e^W = 64 pi^2.  The radially symmetric family is
//
//     W(x) = 4 log( 2 lambda / (1 + lambda^2 |x - x0|^2) ) + log 24 ,
//
// and the normalized member (W(0) = 0, W <= 0) has lambda^2 = 1/(8 sqrt 6):
// W(x) = -4 log(1 + |x|^2 / (8 sqrt 6)).
//
// In dimension two the analogue solves  -lap U = e^U  with mass 8 pi; the
// normalized member is U(x) = log( 1 / (1 + |x|^2/8)^2 ).
//
// All derivatives used by the residual check are hard-coded analytic radial
// formulas, so the check is free of finite-difference noise.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <span>

#include "lelab/common.hpp"

namespace lelab {

struct BubbleProfile {
  int dimension = 4;   // 2 or 4
  double lambda = 0;   // scale, > 0
  Pt center;           // x0, `dimension` entries

  // Normalized profile: value 0 at the center, nonpositive everywhere.
  static BubbleProfile normalized(int dim) {
    BubbleProfile b;
    b.dimension = dim;
    if (dim == 4) {
      b.lambda = 0.5 * std::pow(24.0, -0.25);  // lambda^2 = 1/(8 sqrt 6)
      b.center = pt4(0, 0, 0, 0);
    } else if (dim == 2) {
      b.lambda = 1.0 / (2.0 * std::sqrt(2.0));  // lambda^2 = 1/8
      b.center = pt2(0, 0);
    } else {
      throw DomainError("bubble: dimension must be 2 or 4");
    }
    return b;
  }

  // 1/lambda^2; the normalized 4d value is 8 sqrt 6.
  double k() const { return 1.0 / (lambda * lambda); }

  // Closed-form total mass over the whole space.
  double total_mass() const { return dimension == 4 ? k64Pi2 : k8Pi; }

  // Normalized total integral of e^W; equals 2 exactly in dimension four.
  double alpha() const { return total_mass() / (32.0 * kPi2); }

  // Value at the center, i.e. the additive constant of the closed form.
  double center_value() const {
    return dimension == 4 ? std::log(std::pow(2.0 * lambda, 4) * 24.0)
                          : std::log(8.0 * lambda * lambda);
  }

  // The implemented family is isotropic: no quadratic far-field term.
  bool isotropic() const { return true; }

  void validate() const {
    if (dimension != 2 && dimension != 4)
      throw DomainError("bubble: dimension must be 2 or 4");
    if (!(lambda > 0)) throw DomainError("bubble: lambda must be positive");
    if (center.size() != dimension)
      throw DomainError("bubble: center dimension mismatch");
  }
};

// W at radius rho from the center.
inline double eval_bubble_radial(const BubbleProfile& b, double rho) {
  const double q = 1.0 + b.lambda * b.lambda * rho * rho;
  if (b.dimension == 4) return 4.0 * std::log(2.0 * b.lambda / q) + std::log(24.0);
  return std::log(8.0 * b.lambda * b.lambda) - 2.0 * std::log(q);
}

inline double eval_bubble(const BubbleProfile& b, const Pt& x) {
  if (x.size() != b.dimension) throw DomainError("bubble: point dimension mismatch");
  return eval_bubble_radial(b, (x - b.center).norm());
}

// lap W as a function of rho.  With K = 1/lambda^2 and t = rho^2:
//   dim 4:  lap W = -16 (t + 2K) / (K + t)^2
//   dim 2:  lap U =  -8 K / (K + t)^2
inline double bubble_laplacian_radial(const BubbleProfile& b, double rho) {
  const double K = b.k(), t = rho * rho;
  const double d = sqr(K + t);
  return b.dimension == 4 ? -16.0 * (t + 2.0 * K) / d : -8.0 * K / d;
}

// lap^2 W (dimension four):  384 K^2 / (K + t)^4.
inline double bubble_bilaplacian_radial(const BubbleProfile& b, double rho) {
  if (b.dimension != 4)
    throw DomainError("bubble: bilaplacian is the dimension-four operator");
  const double K = b.k(), t = rho * rho;
  return 384.0 * K * K / sqr(sqr(K + t));
}

// Pointwise defect of the Liouville equation at radius rho:
//   dim 4:  lap^2 W - e^W,   dim 2:  -lap U - e^U.
inline double liouville_defect_radial(const BubbleProfile& b, double rho) {
  const double ew = std::exp(eval_bubble_radial(b, rho));
  if (b.dimension == 4) return bubble_bilaplacian_radial(b, rho) - ew;
  return -bubble_laplacian_radial(b, rho) - ew;
}

// Max |defect| over a sample of points.  Exact solutions give round-off only.
inline double liouville_residual(const BubbleProfile& b, std::span<const Pt> samples) {
  double worst = 0.0;
  for (const Pt& x : samples)
    worst = std::max(worst, std::abs(liouville_defect_radial(b, (x - b.center).norm())));
  return worst;
}

inline double liouville_residual_radii(const BubbleProfile& b,
                                       std::span<const double> radii) {
  double worst = 0.0;
  for (double rho : radii)
    worst = std::max(worst, std::abs(liouville_defect_radial(b, rho)));
  return worst;
}

struct BubbleMass {
  double value = 0;
  double error_estimate = 0;
  double radius = 0;  // +inf for the whole space
};

// int_{B_R} e^W by adaptive Gauss-Kronrod in the substituted variable
// t = lambda^2 r^2, which turns the integrand into a rational function:
//   dim 4:  2 pi^2 int r^3 e^W dr = 384 pi^2 int t (1+t)^-4 dt / 2 ... = 192 pi^2 int t/(1+t)^4 dt
//   dim 2:  2 pi   int r   e^U dr = 8 pi int (1+t)^-2 dt
// For R = inf the further substitution t = s/(1-s) makes the range finite.
inline BubbleMass bubble_mass(const BubbleProfile& b, double R) {
  b.validate();
  if (!(R > 0)) {
    if (R == 0) return {0.0, 0.0, 0.0};
    throw DomainError("bubble_mass: radius must be positive or infinite");
  }
  using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;

  const bool whole = std::isinf(R);
  const double T = whole ? 0.0 : sqr(b.lambda * R);
  const double c4 = 192.0 * kPi2;

  auto density = [&](double t) {
    return b.dimension == 4 ? c4 * t / sqr(sqr(1.0 + t)) : k8Pi / sqr(1.0 + t);
  };

  double err = 0.0, val = 0.0;
  if (whole) {
    auto f = [&](double s) {
      const double u = 1.0 - s;
      return density(s / u) / (u * u);
    };
    val = Quad::integrate(f, 0.0, 1.0, 15, 1e-13, &err);
  } else {
    val = Quad::integrate(density, 0.0, T, 15, 1e-13, &err);
  }
  if (!(err < 1e-8 * std::max(1.0, std::abs(val))))
    throw NumericalError("bubble_mass: quadrature failed to converge, error estimate " +
                         std::to_string(err));
  return {val, err, R};
}

}  // namespace lelab
