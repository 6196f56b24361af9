#pragma once

// Discrete solve operators on mapped tensor grids.
//
// The Dirichlet Laplacian is assembled in flux (divergence) form: 1d P1
// stiffness blocks with exact per-element coefficient integrals, tensored
// with lumped masses.  The matrix is symmetric with nonpositive
// off-diagonal entries, so the discrete solve inherits the maximum
// principle.
//
// The clamped bilaplacian uses the mixed pair (u, lap u) with lumped mass:
// eliminating the auxiliary variable gives
//
//     K_bih = K_c^T M^{-1} K_c ,
//
// where K_c is the stiffness with rows on all nodes and columns on the
// interior unknowns and M the diagonal quadrature mass over all nodes.
// Testing the auxiliary equation against boundary nodes is what encodes the
// zero normal derivative weakly.  K_bih is symmetric positive definite, so
// T = K_bih^{-1} M is exactly self-adjoint in the quadrature inner product
// regardless of discretization error.
//
// The solve operator is p-independent; one factorization per grid serves a
// whole continuation branch.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "lelab/field.hpp"
#include "lelab/grid.hpp"

namespace lelab {

using SpMat = Eigen::SparseMatrix<double>;

enum class OperatorKind { clamped_biharmonic, dirichlet_laplace };

class LinearSolveOperator {
 public:
  const Grid* grid = nullptr;
  OperatorKind kind = OperatorKind::dirichlet_laplace;

  std::vector<int> dof_of_node;  // -1 on the eliminated boundary
  std::vector<int> node_of_dof;
  int n_dof = 0;

  SpMat K_all;  // full symmetric stiffness, all nodes x all nodes
  SpMat K_c;    // all nodes x interior
  SpMat K_op;   // the SPD solve matrix (interior x interior)
  Vec w;        // quadrature weights, all nodes

  Vec restrict_interior(const Vec& full) const {
    Vec r(n_dof);
    for (int d = 0; d < n_dof; ++d) r[d] = full[node_of_dof[d]];
    return r;
  }
  Vec extend_zero(const Vec& interior) const {
    Vec f = Vec::Zero(grid->n_nodes);
    for (int d = 0; d < n_dof; ++d) f[node_of_dof[d]] = interior[d];
    return f;
  }

  // Solve K_op x = M omega (interior); returns the zero-extended field.
  Vec solve_T(const Vec& omega_full) const {
    Vec rhs(n_dof);
    for (int d = 0; d < n_dof; ++d) {
      const int i = node_of_dof[d];
      rhs[d] = w[i] * omega_full[i];
    }
    return extend_zero(fact_->solve(rhs));
  }

  // Solve K_op x = rhs for an arbitrary interior right-hand side.
  Vec solve_interior(const Vec& rhs_interior) const { return fact_->solve(rhs_interior); }

  // Nodal Laplacian of a field vanishing on the boundary: -M^{-1} K_all u.
  // For the clamped operator this is the scheme's own auxiliary variable.
  Vec laplacian(const Vec& u_full) const {
    Vec q = K_all * u_full;
    for (int i = 0; i < grid->n_nodes; ++i) q[i] = -q[i] / w[i];
    return q;
  }

  // Quadratic energy of the operator: int |lap u|^2 (clamped) or
  // int |grad u|^2 (Dirichlet).
  double quad_energy(const Vec& u_full) const {
    Vec ui = restrict_interior(u_full);
    return ui.dot(K_op * ui);
  }

  double inner(const Vec& a, const Vec& b) const {
    double s = 0;
    for (int i = 0; i < grid->n_nodes; ++i) s += w[i] * a[i] * b[i];
    return s;
  }

  void factorize() {
    fact_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    fact_->compute(K_op);
    if (fact_->info() != Eigen::Success)
      throw NumericalError("operator: factorization failed");
  }

 private:
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> fact_;
};

namespace detail {

// Accumulate the 1d element stiffness g_e/h_e^2 * [[1,-1],[-1,1]] scaled by
// `scale` between global nodes a and b.
inline void add_element(std::vector<Eigen::Triplet<double>>& t, int a, int b,
                        double k) {
  t.emplace_back(a, a, k);
  t.emplace_back(b, b, k);
  t.emplace_back(a, b, -k);
  t.emplace_back(b, a, -k);
}

}  // namespace detail

inline LinearSolveOperator assemble_operator(const Grid& g, OperatorKind kind) {
  if (kind == OperatorKind::clamped_biharmonic && g.spec.dimension() != 4)
    throw DomainError("assemble_operator: the clamped solver is the 4d operator here");
  LinearSolveOperator op;
  op.grid = &g;
  op.kind = kind;
  op.w = Eigen::Map<const Vec>(g.w.data(), g.n_nodes);

  std::vector<Eigen::Triplet<double>> trip;

  if (g.spec.radial_only()) {
    const auto ge = g.ax_r.element_integrals(g.radial_measure());
    const int n = g.ax_r.n();
    for (int e = 0; e + 1 < n; ++e) {
      const double h = g.ax_r.node[e + 1] - g.ax_r.node[e];
      detail::add_element(trip, e, e + 1, ge[e] / (h * h));
    }
  } else if (g.polar) {
    const bool meridian = g.spec.geometry == Geometry::meridian_halfdisk_4d_axisym;
    const auto rho_r = g.radial_measure();  // r^3 or r
    const auto sig = g.angular_measure();   // 4 pi sin^2 or 2
    const auto rho_a = meridian ? std::function<double(double)>([](double r) { return r; })
                                : std::function<double(double)>([](double r) { return 2.0 / r; });
    const auto sig_a = meridian ? sig : std::function<double(double)>([](double) { return 1.0; });

    const auto gr = g.ax_r.element_integrals(rho_r);
    const auto wa = g.ax_a.cardinal_weights(sig);
    const auto wrho = g.ax_r.cardinal_weights(rho_a);
    const auto ga = g.ax_a.element_integrals(sig_a);

    const int nr = g.ax_r.n(), na = g.ax_a.n();
    for (int i = 0; i + 1 < nr; ++i) {
      const double h = g.ax_r.node[i + 1] - g.ax_r.node[i];
      const double kr = gr[i] / (h * h);
      for (int j = 0; j < na; ++j)
        detail::add_element(trip, g.index(i, j), g.index(i + 1, j), kr * wa[j]);
    }
    for (int i = 1; i < nr; ++i) {
      for (int j = 0; j + 1 < na; ++j) {
        const double h = g.ax_a.node[j + 1] - g.ax_a.node[j];
        detail::add_element(trip, g.index(i, j), g.index(i, j + 1),
                            ga[j] / (h * h) * wrho[i]);
      }
    }
  } else {  // square
    const auto one = [](double) { return 1.0; };
    const auto gx = g.ax_r.element_integrals(one);
    const auto gy = g.ax_a.element_integrals(one);
    const auto wx = g.ax_r.cardinal_weights(one);
    const auto wy = g.ax_a.cardinal_weights(one);
    const int nx = g.ax_r.n(), ny = g.ax_a.n();
    for (int i = 0; i + 1 < nx; ++i) {
      const double h = g.ax_r.node[i + 1] - g.ax_r.node[i];
      for (int j = 0; j < ny; ++j)
        detail::add_element(trip, g.index(i, j), g.index(i + 1, j),
                            gx[i] / (h * h) * wy[j]);
    }
    for (int j = 0; j + 1 < ny; ++j) {
      const double h = g.ax_a.node[j + 1] - g.ax_a.node[j];
      for (int i = 0; i < nx; ++i)
        detail::add_element(trip, g.index(i, j), g.index(i, j + 1),
                            gy[j] / (h * h) * wx[i]);
    }
  }

  op.K_all.resize(g.n_nodes, g.n_nodes);
  op.K_all.setFromTriplets(trip.begin(), trip.end());

  op.dof_of_node.assign(g.n_nodes, -1);
  for (int i = 0; i < g.n_nodes; ++i)
    if (!g.bflag[i]) {
      op.dof_of_node[i] = op.n_dof++;
      op.node_of_dof.push_back(i);
    }

  // Column restriction to the interior unknowns.
  {
    std::vector<Eigen::Triplet<double>> tc;
    for (int k = 0; k < op.K_all.outerSize(); ++k)
      for (SpMat::InnerIterator it(op.K_all, k); it; ++it) {
        const int d = op.dof_of_node[it.col()];
        if (d >= 0) tc.emplace_back(it.row(), d, it.value());
      }
    op.K_c.resize(g.n_nodes, op.n_dof);
    op.K_c.setFromTriplets(tc.begin(), tc.end());
  }

  if (kind == OperatorKind::dirichlet_laplace) {
    std::vector<Eigen::Triplet<double>> ti;
    for (int k = 0; k < op.K_all.outerSize(); ++k)
      for (SpMat::InnerIterator it(op.K_all, k); it; ++it) {
        const int r = op.dof_of_node[it.row()], c = op.dof_of_node[it.col()];
        if (r >= 0 && c >= 0) ti.emplace_back(r, c, it.value());
      }
    op.K_op.resize(op.n_dof, op.n_dof);
    op.K_op.setFromTriplets(ti.begin(), ti.end());
  } else {
    Vec winv(g.n_nodes);
    for (int i = 0; i < g.n_nodes; ++i) winv[i] = 1.0 / g.w[i];
    SpMat MiKc = winv.asDiagonal() * op.K_c;
    op.K_op = SpMat(op.K_c.transpose()) * MiKc;
    op.K_op.makeCompressed();
  }

  op.factorize();
  return op;
}

inline Field apply_T(const LinearSolveOperator& op, const Field& omega) {
  if (omega.grid != op.grid) throw DomainError("apply_T: grid mismatch");
  return Field(*op.grid, op.solve_T(omega.v));
}

// <omega1, T omega2> in the quadrature inner product.
inline double t_pairing(const LinearSolveOperator& op, const Vec& w1, const Vec& w2) {
  return op.inner(w1, op.solve_T(w2));
}

struct EigenvalueResult {
  double value = 0;
  int iterations = 0;
};

// Smallest eigenvalue of K_op v = lambda M v by inverse power iteration on
// the cached factorization.
inline EigenvalueResult first_eigenvalue(const LinearSolveOperator& op,
                                         double tol = 1e-12, int max_iter = 2000) {
  Vec v(op.n_dof);
  for (int d = 0; d < op.n_dof; ++d) v[d] = 1.0 + 0.1 * std::sin(0.7 * d);
  Vec wi(op.n_dof);
  for (int d = 0; d < op.n_dof; ++d) wi[d] = op.w[op.node_of_dof[d]];

  double lambda = 0, prev = 0;
  for (int it = 1; it <= max_iter; ++it) {
    Vec y = op.solve_interior(wi.cwiseProduct(v));
    const double nrm = std::sqrt(y.dot(wi.cwiseProduct(y)));
    y /= nrm;
    lambda = y.dot(op.K_op * y) / y.dot(wi.cwiseProduct(y));
    v = y;
    if (it > 3 && std::abs(lambda - prev) <= tol * std::abs(lambda))
      return {lambda, it};
    prev = lambda;
  }
  throw NumericalError("first_eigenvalue: inverse iteration did not converge");
}

}  // namespace lelab
