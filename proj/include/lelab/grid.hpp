#pragma once

// Tensor grids on mapped coordinates.
//
// Each axis carries a monotone density map
//
//     F(x) = base * x + sum_k  w_k * asinh( (x - c_k) / delta_k ),
//
// and the nodes are the preimages of a uniform partition of [F(lo), F(hi)].
// Away from a cluster center the spacing grows proportionally to the
// distance |x - c_k| (logarithmically uniform), while inside the width
// delta_k it is uniform.  This resolves concentration profiles whose width
// shrinks exponentially along a continuation branch: the solution stays
// smooth as a function of the map parameter, so low-order formulas in the
// mapped coordinate keep their design accuracy at any physical scale.
//
// Geometries: the 4d unit ball reduced to the radius (radial_ball_4d), the
// meridian half-disk of the 4d ball under axial symmetry (polar coordinates
// r in (0,1], phi in [0,pi], measure 4 pi r^3 sin^2 phi dr dphi), the unit
// disk in polar coordinates with even reflection symmetry (theta in [0,pi],
// doubled measure), and the unit square.  Polar grids merge the whole r = 0
// ring into a single center unknown.
//
// Quadrature weights integrate the cubic cardinal interpolants of nodal
// data against the exact measure (per-cell Gauss), so the weight sum equals
// the geometric volume to near machine precision and smooth integrands are
// integrated at fourth order in the mapped coordinate.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "lelab/common.hpp"

namespace lelab {

enum class Geometry {
  radial_ball_4d,
  meridian_halfdisk_4d_axisym,
  disk_2d,
  square_2d,
};

inline std::string geometry_name(Geometry g) {
  switch (g) {
    case Geometry::radial_ball_4d: return "radial_ball_4d";
    case Geometry::meridian_halfdisk_4d_axisym: return "meridian_halfdisk_4d_axisym";
    case Geometry::disk_2d: return "disk_2d";
    case Geometry::square_2d: return "square_2d";
  }
  return "?";
}

struct AxisCluster {
  double center = 0;  // clustering location in physical coordinates
  double width = 1;   // resolved scale delta
  double weight = 1;  // nodes spent on the cluster, relative to base
};

struct AxisSpec {
  double lo = 0, hi = 1;
  int n = 0;
  double base = 1.0;
  std::vector<AxisCluster> clusters;
};

class Axis {
 public:
  AxisSpec spec;
  std::vector<double> node;   // physical positions, node[0] = lo, node[n-1] = hi
  double F_lo = 0, dF = 0;    // uniform step in the mapped coordinate

  void build(const AxisSpec& s) {
    if (s.n < 2) throw DomainError("axis: need at least two nodes");
    if (!(s.hi > s.lo)) throw DomainError("axis: empty interval");
    spec = s;
    F_lo = F(s.lo);
    dF = (F(s.hi) - F_lo) / (s.n - 1);
    node.resize(s.n);
    node.front() = s.lo;
    node.back() = s.hi;
    for (int j = 1; j + 1 < s.n; ++j) node[j] = x_of(static_cast<double>(j));
  }

  int n() const { return spec.n; }

  double F(double x) const {
    double v = spec.base * x;
    for (const auto& c : spec.clusters) v += c.weight * std::asinh((x - c.center) / c.width);
    return v;
  }

  double density(double x) const {  // F'(x) > 0
    double v = spec.base;
    for (const auto& c : spec.clusters)
      v += c.weight / std::sqrt(c.width * c.width + sqr(x - c.center));
    return v;
  }

  // Fractional index of a physical position.
  double j_of(double x) const { return (F(x) - F_lo) / dF; }

  // dx/dj at a physical position.
  double dxdj(double x) const { return dF / density(x); }

  // Inverse map at a fractional index; safeguarded Newton.
  double x_of(double j) const {
    const double target = F_lo + j * dF;
    double a = spec.lo, b = spec.hi;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      const double f = F(x) - target;
      if (f > 0)
        b = x;
      else
        a = x;
      double step = f / density(x);
      double next = x - step;
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - x) <= 1e-17 * (std::abs(x) + 1e-300) || a == b) {
        x = next;
        break;
      }
      x = next;
    }
    return x;
  }

  // Quadrature weights for nodal data against the measure m(x) dx:
  // w_j = int cardinal_j(xi) m(x(xi)) x'(xi) dxi with cubic cardinals on the
  // uniform index grid; per-cell 8-point Gauss.
  std::vector<double> cardinal_weights(const std::function<double(double)>& m) const {
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                                 -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    const int N = n();
    std::vector<double> w(N, 0.0);
    for (int e = 0; e + 1 < N; ++e) {
      const int s = std::clamp(e - 1, 0, N - 4);
      for (int q = 0; q < 8; ++q) {
        const double xi = e + 0.5 * (gx[q] + 1.0);
        const double x = x_of(xi);
        const double jac = dxdj(x);
        const double f = 0.5 * gw[q] * m(x) * jac;
        // cubic Lagrange cardinals at integer abscissae s..s+3
        for (int a = 0; a < 4; ++a) {
          double l = 1.0;
          for (int b = 0; b < 4; ++b)
            if (b != a) l *= (xi - (s + b)) / static_cast<double>(a - b);
          w[s + a] += f * l;
        }
      }
    }
    return w;
  }

  // Per-element coefficient integrals g_e = int_{x_e}^{x_{e+1}} a(x) dx.
  std::vector<double> element_integrals(const std::function<double(double)>& a) const {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    const int N = n();
    std::vector<double> g(N - 1, 0.0);
    for (int e = 0; e + 1 < N; ++e) {
      for (int q = 0; q < 4; ++q) {
        const double xi = e + 0.5 * (gx[q] + 1.0);
        const double x = x_of(xi);
        g[e] += 0.5 * gw[q] * a(x) * dxdj(x);
      }
    }
    return g;
  }
};

struct GridSpec {
  Geometry geometry = Geometry::radial_ball_4d;
  int n_radial = 0;   // first axis (x for the square)
  int n_angular = 1;  // second axis; 1 selects the radial-symmetric mode
  std::vector<AxisCluster> radial_clusters;
  std::vector<AxisCluster> angular_clusters;
  double base_density = 1.0;

  bool radial_only() const {
    return geometry == Geometry::radial_ball_4d ||
           (geometry == Geometry::disk_2d && n_angular <= 1);
  }
  int dimension() const {
    return geometry == Geometry::radial_ball_4d ||
                   geometry == Geometry::meridian_halfdisk_4d_axisym
               ? 4
               : 2;
  }
};

// A built grid: node enumeration, coordinates, quadrature weights.
//
// Node layout:
//   radial grids:   node i = radial node i (i = 0 is r = 0)
//   polar grids:    node 0 = merged center; node(i,j) = 1 + (i-1)*n_a + j
//   square:         node(i,j) = i*n_y + j
struct Grid {
  GridSpec spec;
  Axis ax_r, ax_a;  // ax_a unused in radial-only mode
  bool polar = false;
  int n_nodes = 0;
  std::vector<double> w;           // positive quadrature weights, sum = volume
  std::vector<signed char> bflag;  // 1 on the outer (Dirichlet/clamped) boundary

  int index(int i, int j) const {
    if (spec.radial_only()) return i;
    if (polar) return i == 0 ? 0 : 1 + (i - 1) * ax_a.n() + j;
    return i * ax_a.n() + j;
  }

  // Logical coordinates (r, ang) or (x, y); the merged center reports r = 0.
  std::array<double, 2> coords(int node) const {
    if (spec.radial_only()) return {ax_r.node[node], 0.0};
    if (polar) {
      if (node == 0) return {0.0, 0.0};
      const int i = 1 + (node - 1) / ax_a.n();
      const int j = (node - 1) % ax_a.n();
      return {ax_r.node[i], ax_a.node[j]};
    }
    const int i = node / ax_a.n();
    const int j = node % ax_a.n();
    return {ax_r.node[i], ax_a.node[j]};
  }

  // Physical position: meridian (z, s); disk/square (x, y); radial (r, 0).
  std::array<double, 2> position(int node) const {
    auto c = coords(node);
    if (spec.geometry == Geometry::meridian_halfdisk_4d_axisym)
      return {c[0] * std::cos(c[1]), c[0] * std::sin(c[1])};
    if (spec.geometry == Geometry::disk_2d && !spec.radial_only())
      return {c[0] * std::cos(c[1]), c[0] * std::sin(c[1])};
    return {c[0], c[1]};
  }

  double volume() const {
    double v = 0;
    for (double x : w) v += x;
    return v;
  }

  // Radial measure density m(r) (total angular factor folded in for the
  // radial-only grids).
  std::function<double(double)> radial_measure() const {
    switch (spec.geometry) {
      case Geometry::radial_ball_4d:
        return [](double r) { return 2.0 * kPi2 * r * r * r; };
      case Geometry::meridian_halfdisk_4d_axisym:
        return [](double r) { return r * r * r; };
      case Geometry::disk_2d:
        if (spec.radial_only()) return [](double r) { return 2.0 * kPi * r; };
        return [](double r) { return r; };
      case Geometry::square_2d:
        return [](double) { return 1.0; };
    }
    throw DomainError("grid: unknown geometry");
  }

  std::function<double(double)> angular_measure() const {
    switch (spec.geometry) {
      case Geometry::meridian_halfdisk_4d_axisym:
        return [](double phi) { return 4.0 * kPi * sqr(std::sin(phi)); };
      case Geometry::disk_2d:
        return [](double) { return 2.0; };  // even fold of the full disk
      case Geometry::square_2d:
        return [](double) { return 1.0; };
      default:
        return [](double) { return 1.0; };
    }
  }
};

inline Grid build_grid(const GridSpec& spec) {
  if (spec.n_radial < 8)
    throw DomainError("build_grid: resolution must be at least 8 per direction");
  if (!spec.radial_only() && spec.n_angular < 8)
    throw DomainError("build_grid: resolution must be at least 8 per direction");

  Grid g;
  g.spec = spec;
  g.polar = !spec.radial_only() && spec.geometry != Geometry::square_2d;

  AxisSpec rs;
  rs.lo = 0.0;
  rs.hi = 1.0;
  rs.n = spec.n_radial;
  rs.base = spec.base_density;
  rs.clusters = spec.radial_clusters;
  g.ax_r.build(rs);

  if (!spec.radial_only()) {
    AxisSpec as;
    as.lo = 0.0;
    as.hi = spec.geometry == Geometry::square_2d ? 1.0 : kPi;
    as.n = spec.n_angular;
    as.base = spec.base_density;
    as.clusters = spec.angular_clusters;
    g.ax_a.build(as);
  }

  const auto mr = g.radial_measure();
  const auto wr = g.ax_r.cardinal_weights(mr);

  if (spec.radial_only()) {
    g.n_nodes = spec.n_radial;
    g.w.assign(wr.begin(), wr.end());
    g.bflag.assign(g.n_nodes, 0);
    g.bflag.back() = 1;
  } else if (g.polar) {
    const auto wa = g.ax_a.cardinal_weights(g.angular_measure());
    double wa_total = 0;
    for (double x : wa) wa_total += x;
    const int na = g.ax_a.n(), nr = g.ax_r.n();
    g.n_nodes = 1 + (nr - 1) * na;
    g.w.assign(g.n_nodes, 0.0);
    g.bflag.assign(g.n_nodes, 0);
    g.w[0] = wr[0] * wa_total;
    for (int i = 1; i < nr; ++i)
      for (int j = 0; j < na; ++j) {
        const int id = g.index(i, j);
        g.w[id] = wr[i] * wa[j];
        if (i == nr - 1) g.bflag[id] = 1;
      }
  } else {  // square
    const auto wy = g.ax_a.cardinal_weights([](double) { return 1.0; });
    const int nx = g.ax_r.n(), ny = g.ax_a.n();
    g.n_nodes = nx * ny;
    g.w.assign(g.n_nodes, 0.0);
    g.bflag.assign(g.n_nodes, 0);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const int id = g.index(i, j);
        g.w[id] = wr[i] * wy[j];
        if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) g.bflag[id] = 1;
      }
  }

  for (double x : g.w)
    if (!(x > 0)) throw NumericalError("build_grid: nonpositive quadrature weight");
  return g;
}

}  // namespace lelab
