#pragma once

// Closed-form Green kernels on the unit ball/disk and the two-point
// concentration-location system.
//
// Clamped bilaplacian on the unit ball in R^4 (Boggio form, m = 2, n = 4):
// with the classical bracket  [x,y]^2 = |x|^2 |y|^2 - 2 x.y + 1  and
// A = [x,y]/|x-y| >= 1,
//
//     G(x,y) = c * ( log A + (A^-2 - 1)/2 ),        c = 1/(8 pi^2).
//
// The constant c is pinned by the requirement that
// H(x,y) = G(x,y) + (8 pi^2)^-1 log|x-y| stays bounded across the diagonal;
// it is cross-checked against the discrete clamped solve in the test suite
// (point-load calibration) and frozen here.
//
// Dirichlet Laplacian on the unit disk: G(x,y) = (2 pi)^-1 log([x,y]/|x-y|),
// the image-point formula written through the same bracket so that y = 0
// needs no special case.
//
// H is smooth across the diagonal; both H and grad_x H are evaluated from
// the closed forms (the diagonal values are exact limits, not extrapolated).

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "lelab/common.hpp"

namespace lelab {

enum class KernelKind { biharmonic_ball_4d, laplace_disk_2d };

// Fundamental-solution coefficient of -log|x-y| for each kernel.
inline const double kBallGreenConstant = 1.0 / (8.0 * kPi2);
inline const double kDiskGreenConstant = 1.0 / (2.0 * kPi);

struct GreenKernel {
  KernelKind kind = KernelKind::biharmonic_ball_4d;

  int dimension() const { return kind == KernelKind::biharmonic_ball_4d ? 4 : 2; }
  double singular_coefficient() const {
    return kind == KernelKind::biharmonic_ball_4d ? kBallGreenConstant
                                                  : kDiskGreenConstant;
  }
  // Peak-mass prefactor of the far-field limit p*u -> m * (G(.,x+) - G(.,x-)).
  double concentration_mass() const {
    return kind == KernelKind::biharmonic_ball_4d ? k64Pi2SqrtE : k8PiSqrtE;
  }
};

namespace detail {

inline void check_interior(const GreenKernel& k, const Pt& x, const char* who) {
  if (x.size() != k.dimension()) throw DomainError(std::string(who) + ": dimension mismatch");
  if (x.norm() >= 1.0) throw DomainError(std::string(who) + ": point not strictly inside the domain");
}

inline double bracket2(const Pt& x, const Pt& y) {
  return x.squaredNorm() * y.squaredNorm() - 2.0 * x.dot(y) + 1.0;
}

}  // namespace detail

inline double green_eval(const GreenKernel& k, const Pt& x, const Pt& y) {
  detail::check_interior(k, x, "green_eval");
  detail::check_interior(k, y, "green_eval");
  const double d2 = (x - y).squaredNorm();
  if (d2 == 0.0) throw DomainError("green_eval: evaluation on the diagonal");
  const double b2 = detail::bracket2(x, y);
  if (k.kind == KernelKind::laplace_disk_2d)
    return kDiskGreenConstant * 0.5 * std::log(b2 / d2);
  // log A + (A^-2 - 1)/2 with A^2 = b2/d2
  return kBallGreenConstant * (0.5 * std::log(b2 / d2) + 0.5 * (d2 / b2 - 1.0));
}

// Regular part H(x,y) = G + c log|x-y|; smooth across x = y.
inline double regular_part(const GreenKernel& k, const Pt& x, const Pt& y) {
  detail::check_interior(k, x, "regular_part");
  detail::check_interior(k, y, "regular_part");
  const double b2 = detail::bracket2(x, y);
  if (k.kind == KernelKind::laplace_disk_2d)
    return kDiskGreenConstant * 0.5 * std::log(b2);
  const double d2 = (x - y).squaredNorm();
  return kBallGreenConstant * (0.5 * std::log(b2) + 0.5 * (d2 / b2 - 1.0));
}

// grad_x H, valid on the diagonal as well (first-slot partial gradient).
inline Pt regular_grad_x(const GreenKernel& k, const Pt& x, const Pt& y) {
  detail::check_interior(k, x, "regular_grad_x");
  detail::check_interior(k, y, "regular_grad_x");
  const double b2 = detail::bracket2(x, y);
  const Pt db_half = y.squaredNorm() * x - y;  // (1/2) d(b2)/dx
  if (k.kind == KernelKind::laplace_disk_2d) return kDiskGreenConstant / b2 * db_half;
  const double d2 = (x - y).squaredNorm();
  Pt g = db_half / b2;
  g += (x - y) / b2;
  g -= (d2 / (b2 * b2)) * db_half;
  return kBallGreenConstant * g;
}

inline Pt green_grad_x(const GreenKernel& k, const Pt& x, const Pt& y) {
  const double d2 = (x - y).squaredNorm();
  if (d2 == 0.0) throw DomainError("green_grad_x: evaluation on the diagonal");
  Pt g = regular_grad_x(k, x, y);
  g -= k.singular_coefficient() * (x - y) / d2;
  return g;
}

// Diagnostics against the |grad^i G| <= C |x-y|^-i and logarithmic bounds.
struct BoundRatios {
  double g_over_log = 0;   // |G| / log(1 + 1/|x-y|)
  double grad_times_d = 0; // |grad G| * |x-y|
};

inline BoundRatios bound_ratios(const GreenKernel& k, const Pt& x, const Pt& y) {
  const double d = (x - y).norm();
  BoundRatios r;
  r.g_over_log = std::abs(green_eval(k, x, y)) / std::log1p(1.0 / d);
  r.grad_times_d = green_grad_x(k, x, y).norm() * d;
  return r;
}

// Stacked residual of the two-point location system
//   grad_x G(x+, x-) = grad_x H(x+, x+),   grad_x G(x-, x+) = grad_x H(x-, x-),
// with grad_x H(x,x) the first-slot partial gradient on the diagonal.
inline Vec location_residual(const GreenKernel& k, const Pt& xp, const Pt& xm) {
  if ((xp - xm).squaredNorm() == 0.0)
    throw DomainError("location_residual: coincident points");
  const int n = k.dimension();
  Vec r(2 * n);
  r.head(n) = green_grad_x(k, xp, xm) - regular_grad_x(k, xp, xp);
  r.tail(n) = green_grad_x(k, xm, xp) - regular_grad_x(k, xm, xm);
  return r;
}

// Variant that reads grad_x H(x,x) as half the gradient of the diagonal map
// z -> H(z,z) (by symmetry of H the two coincide; both are reported).
inline Vec location_residual_diag_variant(const GreenKernel& k, const Pt& xp,
                                          const Pt& xm) {
  const int n = k.dimension();
  const double h = 1e-6;
  auto half_diag_grad = [&](const Pt& z) {
    Pt g(n);
    for (int i = 0; i < n; ++i) {
      Pt zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      g[i] = 0.5 * (regular_part(k, zp, zp) - regular_part(k, zm, zm)) / (2.0 * h);
    }
    return g;
  };
  Vec r(2 * n);
  r.head(n) = green_grad_x(k, xp, xm) - half_diag_grad(xp);
  r.tail(n) = green_grad_x(k, xm, xp) - half_diag_grad(xm);
  return r;
}

struct LocationSolveOptions {
  double tol = 1e-10;
  int max_iterations = 60;
  double fd_step = 2e-6;  // 1e-6 of the domain diameter
  int max_damping = 40;
  bool symmetric_axis = false;  // reduce to a scalar root-find in (a,0,..),(-a,0,..)
};

struct LocationSolve {
  Pt x_plus, x_minus;
  double residual = std::numeric_limits<double>::infinity();
  double residual_diag_variant = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::string message;
};

namespace detail {

inline Pt axis_point(int n, double a) {
  Pt p = Pt::Zero(n);
  p[0] = a;
  return p;
}

// Scalar axial residual g(a); antipodal symmetry makes both blocks collinear
// with the axis, so the full system reduces to g(a) = 0.
inline double axial_residual(const GreenKernel& k, double a) {
  const Pt xp = axis_point(k.dimension(), a);
  const Pt xm = axis_point(k.dimension(), -a);
  return (green_grad_x(k, xp, xm) - regular_grad_x(k, xp, xp))[0];
}

}  // namespace detail

inline LocationSolve solve_locations(const GreenKernel& k, const Pt& xp0, const Pt& xm0,
                                     const LocationSolveOptions& opt = {}) {
  LocationSolve out;
  const int n = k.dimension();

  if (opt.symmetric_axis) {
    double a = std::abs(xp0[0]);
    a = std::min(std::max(a, 1e-3), 0.98);
    auto g = [&](double t) { return detail::axial_residual(k, t); };
    // Bracket the root by scanning, then safeguarded Newton.
    double lo = 0.02, hi = 0.98, glo = g(lo), ghi = g(hi);
    const int scan = 96;
    for (int i = 1; i <= scan; ++i) {
      double t = 0.02 + (0.98 - 0.02) * i / scan;
      double gt = g(t);
      if (glo * gt <= 0.0) {
        hi = t;
        ghi = gt;
        break;
      }
      lo = t;
      glo = gt;
    }
    if (glo * ghi > 0.0) {
      out.message = "axial residual does not change sign in (0,1)";
      return out;
    }
    if (a < lo || a > hi) a = 0.5 * (lo + hi);
    for (int it = 0; it < opt.max_iterations; ++it) {
      double ga = g(a);
      out.iterations = it;
      if (std::abs(ga) < opt.tol / std::sqrt(2.0)) break;
      double da = (g(a + opt.fd_step) - g(a - opt.fd_step)) / (2.0 * opt.fd_step);
      double step = (da != 0.0) ? -ga / da : 0.0;
      double next = a + step;
      if (!(next > lo && next < hi) || step == 0.0) next = 0.5 * (lo + hi);  // bisect
      if (g(lo) * ga <= 0.0)
        hi = a;
      else
        lo = a;
      a = next;
    }
    out.x_plus = detail::axis_point(n, a);
    out.x_minus = detail::axis_point(n, -a);
    out.residual = location_residual(k, out.x_plus, out.x_minus).norm();
    out.residual_diag_variant =
        location_residual_diag_variant(k, out.x_plus, out.x_minus).norm();
    out.converged = out.residual < opt.tol;
    if (!out.converged) out.message = "scalar iteration failed to reach tolerance";
    return out;
  }

  // Full Newton with finite-difference Jacobian.  The system inherits the
  // rotational degeneracy of the domain, so the step is computed by SVD
  // (minimum-norm least squares), which leaves the orbit direction alone.
  Vec z(2 * n);
  z.head(n) = xp0;
  z.tail(n) = xm0;
  auto eval = [&](const Vec& v) {
    Pt a = v.head(n), b = v.tail(n);
    return location_residual(k, a, b);
  };
  Vec r = eval(z);
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it;
    if (r.norm() < opt.tol) break;
    Eigen::MatrixXd J(2 * n, 2 * n);
    for (int j = 0; j < 2 * n; ++j) {
      Vec zp = z, zm = z;
      zp[j] += opt.fd_step;
      zm[j] -= opt.fd_step;
      J.col(j) = (eval(zp) - eval(zm)) / (2.0 * opt.fd_step);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    Vec step = svd.solve(-r);
    double lambda = 1.0;
    bool accepted = false;
    for (int d = 0; d <= opt.max_damping; ++d) {
      Vec trial = z + lambda * step;
      bool inside = trial.head(n).norm() < 1.0 && trial.tail(n).norm() < 1.0 &&
                    (trial.head(n) - trial.tail(n)).squaredNorm() > 0.0;
      if (inside) {
        Vec rt = eval(trial);
        if (rt.norm() < r.norm()) {
          z = trial;
          r = rt;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      out.message = "Newton stalled; last residual " + std::to_string(r.norm());
      break;
    }
  }
  out.x_plus = z.head(n);
  out.x_minus = z.tail(n);
  out.residual = r.norm();
  out.residual_diag_variant =
      location_residual_diag_variant(k, out.x_plus, out.x_minus).norm();
  out.converged = out.residual < opt.tol;
  if (out.converged) out.message.clear();
  return out;
}

}  // namespace lelab
