#pragma once

// Nodal fields on a Grid: sign decomposition, quadrature, masked ball
// integrals, and cubic interpolation (value and gradient) in the physical
// coordinates of the grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lelab/common.hpp"
#include "lelab/grid.hpp"

namespace lelab {

struct Field {
  const Grid* grid = nullptr;
  Vec v;

  Field() = default;
  explicit Field(const Grid& g) : grid(&g), v(Vec::Zero(g.n_nodes)) {}
  Field(const Grid& g, Vec values) : grid(&g), v(std::move(values)) {
    if (v.size() != g.n_nodes) throw DomainError("field: size mismatch");
  }

  Field positive_part() const {
    Field f(*grid);
    f.v = v.cwiseMax(0.0);
    return f;
  }
  Field negative_part() const {  // u^- = min(u,0), so u = u^+ + u^-
    Field f(*grid);
    f.v = v.cwiseMin(0.0);
    return f;
  }
  double sup() const { return v.maxCoeff(); }
  double inf() const { return v.minCoeff(); }
  double sup_abs() const { return v.cwiseAbs().maxCoeff(); }
};

inline double integrate(const Grid& g, const Vec& nodal) {
  if (nodal.size() != g.n_nodes) throw DomainError("integrate: size mismatch");
  double s = 0;
  for (int i = 0; i < g.n_nodes; ++i) s += g.w[i] * nodal[i];
  return s;
}

inline double integrate(const Field& f) { return integrate(*f.grid, f.v); }

// Local cell diameter at a node, used for the cut-cell fraction.
inline double cell_diameter(const Grid& g, int node) {
  auto c = g.coords(node);
  const double dr = std::abs(g.ax_r.dxdj(std::max(c[0], 1e-300)));
  if (g.spec.radial_only()) return dr;
  if (g.polar) {
    if (node == 0) return 2.0 * std::abs(g.ax_r.dxdj(g.ax_r.node[1] * 0.5));
    const double da = std::abs(g.ax_a.dxdj(c[1]));
    return std::hypot(dr, std::max(c[0], 1e-300) * da);
  }
  return std::hypot(dr, std::abs(g.ax_a.dxdj(c[1])));
}

// Integral of `nodal` over the ball B_rho(center) (center in physical
// coordinates), restricted by the sign of `sign_ref` when sign_filter is
// +1/-1.  Nodes strictly inside get full weight, cut cells a linear
// fraction; accuracy O(h) in the cell size.
inline double integrate_ball(const Grid& g, const Vec& nodal,
                             const std::array<double, 2>& center, double rho,
                             int sign_filter = 0, const Vec* sign_ref = nullptr) {
  if (nodal.size() != g.n_nodes) throw DomainError("integrate_ball: size mismatch");
  double s = 0;
  for (int i = 0; i < g.n_nodes; ++i) {
    if (sign_filter != 0) {
      const double ref = (*sign_ref)[i];
      if (sign_filter > 0 ? !(ref > 0.0) : !(ref < 0.0)) continue;
    }
    auto p = g.position(i);
    const double d = std::hypot(p[0] - center[0], p[1] - center[1]);
    const double diam = cell_diameter(g, i);
    const double frac = std::clamp(0.5 + (rho - d) / std::max(diam, 1e-300), 0.0, 1.0);
    if (frac > 0.0) s += frac * g.w[i] * nodal[i];
  }
  return s;
}

namespace detail {

// Cubic Lagrange basis through 4 abscissae, evaluated with derivative.
inline void lagrange4(const double xs[4], double x, double val[4], double der[4]) {
  for (int a = 0; a < 4; ++a) {
    double l = 1.0, dl = 0.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      const double f = (x - xs[b]) / (xs[a] - xs[b]);
      dl = dl * f + l / (xs[a] - xs[b]);
      l *= f;
    }
    val[a] = l;
    der[a] = dl;
  }
}

struct LogicalPoint {
  double r, ang;
};

inline LogicalPoint to_logical(const Grid& g, const std::array<double, 2>& p) {
  switch (g.spec.geometry) {
    case Geometry::radial_ball_4d:
      return {std::abs(p[0]), 0.0};
    case Geometry::meridian_halfdisk_4d_axisym:
      return {std::hypot(p[0], p[1]), std::atan2(std::abs(p[1]), p[0])};
    case Geometry::disk_2d:
      if (g.spec.radial_only()) return {std::hypot(p[0], p[1]), 0.0};
      return {std::hypot(p[0], p[1]), std::abs(std::atan2(p[1], p[0]))};
    case Geometry::square_2d:
      return {p[0], p[1]};
  }
  throw DomainError("to_logical: unknown geometry");
}

}  // namespace detail

struct InterpValue {
  double value = 0;
  std::array<double, 2> grad{0, 0};  // d/dr,d/dang (logical) or d/dx,d/dy
};

// Cubic interpolation in the physical axis coordinates; exact for nodal
// samples and for (tensor-)cubic polynomials of the axis variables.
inline InterpValue interpolate_logical(const Grid& g, const Vec& nodal, double r,
                                       double ang) {
  const Axis& ar = g.ax_r;
  const double snap = 1e-12;
  if (r > ar.spec.hi + snap || r < ar.spec.lo - snap)
    throw DomainError("interpolate: point outside the grid hull");
  r = std::clamp(r, ar.spec.lo, ar.spec.hi);

  const int nr = ar.n();
  int ir = std::clamp(static_cast<int>(std::floor(ar.j_of(r))) - 1, 0, nr - 4);
  double xr[4], lr[4], dr[4];
  for (int a = 0; a < 4; ++a) xr[a] = ar.node[ir + a];
  detail::lagrange4(xr, r, lr, dr);

  InterpValue out;
  if (g.spec.radial_only()) {
    for (int a = 0; a < 4; ++a) {
      out.value += lr[a] * nodal[ir + a];
      out.grad[0] += dr[a] * nodal[ir + a];
    }
    return out;
  }

  const Axis& aa = g.ax_a;
  if (ang > aa.spec.hi + snap || ang < aa.spec.lo - snap)
    throw DomainError("interpolate: angle outside the grid hull");
  ang = std::clamp(ang, aa.spec.lo, aa.spec.hi);
  const int na = aa.n();
  int ia = std::clamp(static_cast<int>(std::floor(aa.j_of(ang))) - 1, 0, na - 4);
  double xa[4], la[4], da[4];
  for (int a = 0; a < 4; ++a) xa[a] = aa.node[ia + a];
  detail::lagrange4(xa, ang, la, da);

  auto value_at = [&](int i, int j) {
    if (g.polar && i == 0) return nodal[0];  // merged center
    return nodal[g.index(i, j)];
  };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double u = value_at(ir + a, ia + b);
      out.value += lr[a] * la[b] * u;
      out.grad[0] += dr[a] * la[b] * u;
      out.grad[1] += lr[a] * da[b] * u;
    }
  return out;
}

inline double interpolate(const Grid& g, const Vec& nodal,
                          const std::array<double, 2>& p) {
  auto lp = detail::to_logical(g, p);
  return interpolate_logical(g, nodal, lp.r, lp.ang).value;
}

inline double interpolate(const Field& f, const std::array<double, 2>& p) {
  return interpolate(*f.grid, f.v, p);
}

// Value and physical gradient (z,s)/(x,y).  Near the polar center the
// chain rule degenerates; fall back to centered differences there.
inline InterpValue interpolate_with_gradient(const Grid& g, const Vec& nodal,
                                             const std::array<double, 2>& p) {
  auto lp = detail::to_logical(g, p);
  if (g.spec.radial_only() || g.spec.geometry == Geometry::square_2d) {
    InterpValue iv = interpolate_logical(g, nodal, lp.r, lp.ang);
    if (g.spec.radial_only() && lp.r > 0) {
      const double rn = std::hypot(p[0], p[1]);
      const double ur = iv.grad[0];
      iv.grad = {ur * p[0] / rn, ur * p[1] / rn};
    }
    return iv;
  }
  InterpValue iv = interpolate_logical(g, nodal, lp.r, lp.ang);
  if (lp.r < 1e-7) {
    const double h = 1e-6;
    InterpValue out;
    out.value = iv.value;
    auto at = [&](double z, double s) {
      auto q = detail::to_logical(g, {z, s});
      return interpolate_logical(g, nodal, q.r, q.ang).value;
    };
    out.grad[0] = (at(p[0] + h, p[1]) - at(p[0] - h, p[1])) / (2 * h);
    out.grad[1] = (at(p[0], p[1] + h) - at(p[0], p[1] - h)) / (2 * h);
    return out;
  }
  const double c = p[0] / lp.r, s = std::abs(p[1]) / lp.r;
  const double ur = iv.grad[0], ua = iv.grad[1] / lp.r;
  InterpValue out;
  out.value = iv.value;
  out.grad[0] = ur * c - ua * s;
  out.grad[1] = ur * s + ua * c;
  if (p[1] < 0) out.grad[1] = -out.grad[1];  // even fold
  return out;
}

// FNV-1a over the weight vector bytes; used by snapshot sidecars.
inline std::uint64_t weights_checksum(const Grid& g) {
  std::uint64_t h = 1469598103934665603ull;
  for (double x : g.w) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof x);
    std::memcpy(&bits, &x, sizeof bits);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace lelab
