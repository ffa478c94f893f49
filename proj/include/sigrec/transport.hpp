#ifndef SIGREC_TRANSPORT_HPP
#define SIGREC_TRANSPORT_HPP

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sigrec/basis.hpp"
#include "sigrec/dg_field.hpp"
#include "sigrec/measurement.hpp"
#include "sigrec/mesh.hpp"
#include "sigrec/quadrature.hpp"

namespace sigrec {

// Upwind DG discretization of  beta.grad(gamma) + mu_eps gamma = 0  with the
// inflow datum gamma0 imposed weakly through the (beta.n)^- boundary term.
//
// On interior edges beta is double-valued (one trace per element polynomial).
// With b_<side> = beta_<side>.n_e and m = (b_L + b_R)/2, the interface term is
//
//   -[ (b_L g_L w_L - b_R g_R w_R)/2 + m (g_L w_R - g_R w_L)/2 ]
//     + penalty |m| [g][w],          [v] = v_L - v_R,
//
// which reduces to the single-valued -(beta.n)[g]{w} when b_L = b_R and keeps
// the discrete coercivity identity
//   a_h(w,w) = eps ||w||^2 + 1/2 sum_bdry int |b| w^2 + penalty sum_int int |m| [w]^2
// exact to roundoff for polynomial data (element-wise integration by parts,
// div beta = lap U per element).
struct TransportProblem {
  std::shared_ptr<const VelocityField> velocity;
  ScalarField gamma0;       // inflow datum, sqrt(sigma) on the boundary
  double penalty = 100.0;
  int degree = 2;           // polynomial degree k of the solution space
  int quadrature_degree = -1;  // -1: derived from degree and data degree

  int required_quadrature() const {
    return 2 * degree + std::max(velocity->beta_degree() + 1, 2);
  }
  int effective_quadrature() const {
    return quadrature_degree < 0 ? required_quadrature() : quadrature_degree;
  }
};

struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;  // element-major block layout
  Eigen::VectorXd rhs;
  int degree = 0;
  Eigen::Index dim() const { return matrix.rows(); }
};

inline SparseSystem assemble(const TransportProblem& problem, const Mesh& mesh) {
  if (!problem.velocity) throw std::invalid_argument("assemble: velocity field not set");
  if (!(problem.penalty > 0.0)) throw std::invalid_argument("assemble: penalty must be > 0");
  const int k = problem.degree;
  const int qdeg = problem.effective_quadrature();
  if (qdeg < problem.required_quadrature())
    throw std::invalid_argument("assemble: quadrature degree below required exactness");

  const BasisSet& basis = BasisSet::get(k);
  const int dim = basis.dim();
  const VelocityField& vel = *problem.velocity;

  const QuadratureRule vq = triangle_quadrature(qdeg);
  const QuadratureRule eq = edge_quadrature(qdeg);
  const BasisTable table(basis, vq);
  const int nT = static_cast<int>(mesh.n_triangles());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nT) * dim * dim * 4);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nT) * dim);

  // volume: (mu g + beta.grad g) w
  Eigen::MatrixXd ke(dim, dim);
  Eigen::MatrixX2d gphys(dim, 2);
  for (int t = 0; t < nT; ++t) {
    const auto& map = mesh.map(t);
    const Vec2 cent = mesh.centroid(t);
    ke.setZero();
    for (std::size_t q = 0; q < vq.size(); ++q) {
      const double w = vq.weights[q] * std::abs(map.detJ);
      const Vec2 xq = map.to_physical(vq.points[q]);
      const Vec2 b = vel.beta(xq, &cent);
      const double mu = vel.mu(xq, &cent);
      for (int i = 0; i < dim; ++i) {
        const Vec2 gp = map.push_gradient({table.grad[q](i, 0), table.grad[q](i, 1)});
        gphys(i, 0) = gp[0];
        gphys(i, 1) = gp[1];
      }
      const Eigen::VectorXd conv = gphys.col(0) * b[0] + gphys.col(1) * b[1];
      ke.noalias() +=
          w * table.val.row(q).transpose() * (mu * table.val.row(q) + conv.transpose());
    }
    const int base = t * dim;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) trips.emplace_back(base + i, base + j, ke(i, j));
  }

  // edges
  Eigen::MatrixXd MLL(dim, dim), MLR(dim, dim), MRL(dim, dim), MRR(dim, dim);
  for (const auto& edge : mesh.edges) {
    const Vec2 a = mesh.vertices[edge.v0], b = mesh.vertices[edge.v1];
    const int L = edge.left;
    const Vec2 centL = mesh.centroid(L);
    if (edge.is_boundary()) {
      MLL.setZero();
      const int base = L * dim;
      for (std::size_t q = 0; q < eq.size(); ++q) {
        const Vec2 xq = a + eq.points[q][0] * (b - a);
        const double bn = dot(vel.beta(xq, &centL), edge.normal);
        const double bminus = 0.5 * (std::abs(bn) - bn);
        if (bminus == 0.0) continue;
        const double w = eq.weights[q] * edge.length * bminus;
        const Eigen::VectorXd phi = basis.values(mesh.map(L).to_reference(xq));
        MLL.noalias() += w * phi * phi.transpose();
        rhs.segment(base, dim) += w * problem.gamma0(xq) * phi;
      }
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          if (MLL(i, j) != 0.0) trips.emplace_back(base + i, base + j, MLL(i, j));
    } else {
      const int R = edge.right;
      const Vec2 centR = mesh.centroid(R);
      MLL.setZero();
      MLR.setZero();
      MRL.setZero();
      MRR.setZero();
      for (std::size_t q = 0; q < eq.size(); ++q) {
        const Vec2 xq = a + eq.points[q][0] * (b - a);
        const double bL = dot(vel.beta(xq, &centL), edge.normal);
        const double bR = dot(vel.beta(xq, &centR), edge.normal);
        const double m = 0.5 * (bL + bR);
        const double w = eq.weights[q] * edge.length;
        const Eigen::VectorXd phiL = basis.values(mesh.map(L).to_reference(xq));
        const Eigen::VectorXd phiR = basis.values(mesh.map(R).to_reference(xq));
        // -X: own-side flux halves plus mean-trace cross terms
        MLL.noalias() += (-0.5 * bL * w) * phiL * phiL.transpose();
        MRR.noalias() += (0.5 * bR * w) * phiR * phiR.transpose();
        MRL.noalias() += (-0.5 * m * w) * phiR * phiL.transpose();
        MLR.noalias() += (0.5 * m * w) * phiL * phiR.transpose();
        // penalty |m| [g][w]
        const double pw = problem.penalty * std::abs(m) * w;
        MLL.noalias() += pw * phiL * phiL.transpose();
        MLR.noalias() -= pw * phiL * phiR.transpose();
        MRL.noalias() -= pw * phiR * phiL.transpose();
        MRR.noalias() += pw * phiR * phiR.transpose();
      }
      const int bl = L * dim, br = R * dim;
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          trips.emplace_back(bl + i, bl + j, MLL(i, j));
          trips.emplace_back(bl + i, br + j, MLR(i, j));
          trips.emplace_back(br + i, bl + j, MRL(i, j));
          trips.emplace_back(br + i, br + j, MRR(i, j));
        }
      }
    }
  }

  SparseSystem sys;
  sys.degree = k;
  sys.matrix.resize(static_cast<Eigen::Index>(nT) * dim, static_cast<Eigen::Index>(nT) * dim);
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  return sys;
}

// Matrix-free a_h(v, w); equals w^T A v from assemble up to roundoff.
inline double apply_bilinear(const TransportProblem& problem, const Mesh& mesh, const DGField& v,
                             const DGField& w) {
  if (v.degree() != problem.degree || w.degree() != problem.degree)
    throw std::invalid_argument("apply_bilinear: field degree does not match problem degree");
  const VelocityField& vel = *problem.velocity;
  const int qdeg = problem.effective_quadrature();
  const QuadratureRule vq = triangle_quadrature(qdeg);
  const QuadratureRule eq = edge_quadrature(qdeg);
  double acc = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const auto& map = mesh.map(t);
    const Vec2 cent = mesh.centroid(t);
    for (std::size_t q = 0; q < vq.size(); ++q) {
      const double wq = vq.weights[q] * std::abs(map.detJ);
      const Vec2 xq = map.to_physical(vq.points[q]);
      const double mu = vel.mu(xq, &cent);
      const Vec2 b = vel.beta(xq, &cent);
      const Vec2 gv = v.grad_ref(t, vq.points[q]);
      acc += wq * (dot(b, gv) + mu * v.eval_ref(t, vq.points[q])) * w.eval_ref(t, vq.points[q]);
    }
  }
  for (const auto& edge : mesh.edges) {
    const Vec2 a = mesh.vertices[edge.v0], bb = mesh.vertices[edge.v1];
    const int L = edge.left;
    const Vec2 centL = mesh.centroid(L);
    if (edge.is_boundary()) {
      for (std::size_t q = 0; q < eq.size(); ++q) {
        const Vec2 xq = a + eq.points[q][0] * (bb - a);
        const double bn = dot(vel.beta(xq, &centL), edge.normal);
        const double bminus = 0.5 * (std::abs(bn) - bn);
        const Vec2 refL = mesh.map(L).to_reference(xq);
        acc += eq.weights[q] * edge.length * bminus * v.eval_ref(L, refL) * w.eval_ref(L, refL);
      }
    } else {
      const int R = edge.right;
      const Vec2 centR = mesh.centroid(R);
      for (std::size_t q = 0; q < eq.size(); ++q) {
        const Vec2 xq = a + eq.points[q][0] * (bb - a);
        const double bL = dot(vel.beta(xq, &centL), edge.normal);
        const double bR = dot(vel.beta(xq, &centR), edge.normal);
        const double m = 0.5 * (bL + bR);
        const Vec2 refL = mesh.map(L).to_reference(xq);
        const Vec2 refR = mesh.map(R).to_reference(xq);
        const double vLq = v.eval_ref(L, refL), vRq = v.eval_ref(R, refR);
        const double wLq = w.eval_ref(L, refL), wRq = w.eval_ref(R, refR);
        const double X = 0.5 * (bL * vLq * wLq - bR * vRq * wRq) + 0.5 * m * (vLq * wRq - vRq * wLq);
        const double pen = problem.penalty * std::abs(m) * (vLq - vRq) * (wLq - wRq);
        acc += eq.weights[q] * edge.length * (-X + pen);
      }
    }
  }
  return acc;
}

struct SolveStats {
  int iterations = 0;  // 0 for the direct path
  double residual = 0.0;
};

inline constexpr Eigen::Index kDirectSolveLimit = 200000;

inline DGField solve(const SparseSystem& sys, std::shared_ptr<const Mesh> mesh,
                     double tol = 1e-10, SolveStats* stats = nullptr) {
  Eigen::VectorXd x;
  SolveStats st;
  if (sys.dim() <= kDirectSolveLimit) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw solver_error("solve: factorization failed", 1.0);
    x = lu.solve(sys.rhs);
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
    krylov.setTolerance(tol);
    krylov.setMaxIterations(2000);
    krylov.compute(sys.matrix);
    x = krylov.solve(sys.rhs);
    st.iterations = static_cast<int>(krylov.iterations());
  }
  st.residual = (sys.matrix * x - sys.rhs).norm() / std::max(sys.rhs.norm(), 1e-300);
  if (!(st.residual <= tol))
    throw solver_error("solve: relative residual above tolerance", st.residual);
  if (stats) *stats = st;
  DGField gamma(std::move(mesh), sys.degree);
  gamma.coeffs() = std::move(x);
  return gamma;
}

inline void write_matrix_market(const SparseSystem& sys, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw data_error("write_matrix_market: cannot open " + path);
  os.precision(17);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << sys.matrix.rows() << " " << sys.matrix.cols() << " " << sys.matrix.nonZeros() << "\n";
  for (int col = 0; col < sys.matrix.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, col); it; ++it)
      os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace sigrec

#endif
