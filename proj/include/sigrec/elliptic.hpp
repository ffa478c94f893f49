#ifndef SIGREC_ELLIPTIC_HPP
#define SIGREC_ELLIPTIC_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <memory>
#include <vector>

#include "sigrec/basis.hpp"
#include "sigrec/dg_field.hpp"
#include "sigrec/mesh.hpp"
#include "sigrec/quadrature.hpp"

namespace sigrec {

// Continuous Galerkin degree-p solution of the Neumann problem
//   div(sigma grad u) = 0,  sigma du/dnu = g,  int_Omega u = 0,
// on a structured mesh. Global dofs live on the (n*p+1)^2 lattice; the
// zero-mean constraint is a scalar Lagrange multiplier row.
class EllipticSolution {
public:
  EllipticSolution(std::shared_ptr<const Mesh> mesh, int p, Eigen::VectorXd dofs)
      : mesh_(std::move(mesh)), p_(p), dofs_(std::move(dofs)), basis_(&BasisSet::get(p)) {}

  double operator()(const Vec2& x) const { return eval(x); }

  double eval(const Vec2& x, const Vec2* hint = nullptr) const {
    const int t = mesh_->locate(x, hint);
    const Vec2 ref = mesh_->map(t).to_reference(x);
    const Eigen::VectorXd v = basis_->values(ref);
    double s = 0.0;
    for (int i = 0; i < basis_->dim(); ++i) s += v[i] * dofs_[global_dof(*mesh_, p_, t, i)];
    return s;
  }

  double mean() const { return mean_; }
  double relative_residual() const { return residual_; }
  const Eigen::VectorXd& dofs() const { return dofs_; }

  // global lattice index of a local node (exact: nodes sit on the np-lattice)
  static int global_dof(const Mesh& mesh, int p, int t, int local) {
    const int n = mesh.n_subdivisions;
    const Vec2 x = mesh.map(t).to_physical(BasisSet::get(p).nodes()[local]);
    const int np = n * p;
    const int ix = static_cast<int>(std::lround(x[0] * np));
    const int iy = static_cast<int>(std::lround(x[1] * np));
    return iy * (np + 1) + ix;
  }

  double mean_ = 0.0;
  double residual_ = 0.0;

private:
  std::shared_ptr<const Mesh> mesh_;
  int p_;
  Eigen::VectorXd dofs_;
  const BasisSet* basis_;
};

inline EllipticSolution solve_elliptic(const ScalarField& sigma, const ScalarField& g,
                                       std::shared_ptr<const Mesh> mesh, int p,
                                       bool zero_mean = true) {
  if (p < 1 || p > kMaxBasisDegree)
    throw std::invalid_argument("solve_elliptic: degree p out of supported range");
  const Mesh& m = *mesh;
  const int n = m.n_subdivisions;
  const BasisSet& basis = BasisSet::get(p);
  const int dim = basis.dim();
  const int ndof = (n * p + 1) * (n * p + 1);

  const QuadratureRule vq = triangle_quadrature(2 * p + 6);
  const QuadratureRule eq = edge_quadrature(2 * p + 6);
  const BasisTable table(basis, vq);

  // compatibility: int_Gamma g ds = 0
  double gmean = 0.0, glen = 0.0;
  for (const auto& e : m.edges) {
    if (!e.is_boundary()) continue;
    const Vec2 a = m.vertices[e.v0], b = m.vertices[e.v1];
    for (std::size_t q = 0; q < eq.size(); ++q) {
      gmean += eq.weights[q] * e.length * g(a + eq.points[q][0] * (b - a));
      glen += eq.weights[q] * e.length;
    }
  }
  if (std::abs(gmean) > 1e-8 * std::max(1.0, glen))
    throw data_error("solve_elliptic: Neumann datum has nonzero boundary mean");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.n_triangles() * dim * dim + 4u * ndof);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ndof + (zero_mean ? 1 : 0));
  Eigen::VectorXd mass_row = Eigen::VectorXd::Zero(ndof);

  std::vector<int> gi(dim);
  for (int t = 0; t < static_cast<int>(m.n_triangles()); ++t) {
    const auto& map = m.map(t);
    for (int i = 0; i < dim; ++i) gi[i] = EllipticSolution::global_dof(m, p, t, i);
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd fe = Eigen::VectorXd::Zero(dim);
    for (std::size_t q = 0; q < vq.size(); ++q) {
      const double w = vq.weights[q] * std::abs(map.detJ);
      const Vec2 xq = map.to_physical(vq.points[q]);
      const double sq = sigma(xq);
      if (!(sq > 0.0)) throw data_error("solve_elliptic: sigma must be positive");
      Eigen::MatrixX2d gphys(dim, 2);
      for (int i = 0; i < dim; ++i) {
        const Vec2 gp = map.push_gradient({table.grad[q](i, 0), table.grad[q](i, 1)});
        gphys(i, 0) = gp[0];
        gphys(i, 1) = gp[1];
      }
      ke.noalias() += w * sq * (gphys * gphys.transpose());
      fe.noalias() += w * table.val.row(q).transpose();
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) trips.emplace_back(gi[i], gi[j], ke(i, j));
      mass_row[gi[i]] += fe[i];
    }
  }

  // Neumann load
  for (const auto& e : m.edges) {
    if (!e.is_boundary()) continue;
    const Vec2 a = m.vertices[e.v0], b = m.vertices[e.v1];
    const int t = e.left;
    for (std::size_t q = 0; q < eq.size(); ++q) {
      const Vec2 xq = a + eq.points[q][0] * (b - a);
      const Eigen::VectorXd vals = basis.values(m.map(t).to_reference(xq));
      const double w = eq.weights[q] * e.length * g(xq);
      for (int i = 0; i < dim; ++i)
        rhs[EllipticSolution::global_dof(m, p, t, i)] += w * vals[i];
    }
  }

  if (zero_mean) {
    for (int i = 0; i < ndof; ++i) {
      if (mass_row[i] != 0.0) {
        trips.emplace_back(i, ndof, mass_row[i]);
        trips.emplace_back(ndof, i, mass_row[i]);
      }
    }
  }

  const int sys = ndof + (zero_mean ? 1 : 0);
  Eigen::SparseMatrix<double> A(sys, sys);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw solver_error("solve_elliptic: factorization failed", 1.0);
  Eigen::VectorXd sol = lu.solve(rhs);
  const double rel = (A * sol - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!(rel <= 1e-10))
    throw solver_error("solve_elliptic: residual above tolerance", rel);

  EllipticSolution out(std::move(mesh), p, sol.head(ndof));
  out.residual_ = rel;
  out.mean_ = zero_mean ? mass_row.dot(sol.head(ndof)) : 0.0;
  return out;
}

}  // namespace sigrec

#endif
