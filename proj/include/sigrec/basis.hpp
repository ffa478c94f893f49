#ifndef SIGREC_BASIS_HPP
#define SIGREC_BASIS_HPP

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <vector>

#include "sigrec/core.hpp"
#include "sigrec/quadrature.hpp"

namespace sigrec {

inline constexpr int kMaxBasisDegree = 6;

// Nodal Lagrange basis of degree k on the reference triangle, built on the
// uniform node lattice (i/k, j/k), i+j <= k (centroid for k = 0).
// phi_i = sum_j coeff(i,j) * m_j with m_j the monomial x^a y^b.
class BasisSet {
public:
  explicit BasisSet(int degree) : k_(degree) {
    if (degree < 0 || degree > kMaxBasisDegree)
      throw std::invalid_argument("BasisSet: degree out of supported range [0,6]");
    if (degree == 0) {
      nodes_.push_back({1.0 / 3.0, 1.0 / 3.0});
    } else {
      for (int j = 0; j <= degree; ++j)
        for (int i = 0; i + j <= degree; ++i)
          nodes_.push_back({static_cast<double>(i) / degree, static_cast<double>(j) / degree});
    }
    for (int d = 0; d <= degree; ++d)
      for (int a = d; a >= 0; --a) exps_.push_back({a, d - a});

    const int n = dim();
    Eigen::MatrixXd V(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        V(i, j) = monomial(j, nodes_[i], 0, 0);
    coeff_ = V.inverse().transpose();  // phi_i(node_l) = delta_il
  }

  int degree() const { return k_; }
  int dim() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec2>& nodes() const { return nodes_; }

  // values of all basis functions at a reference point
  Eigen::VectorXd values(const Vec2& p) const { return coeff_ * mono_vec(p, 0, 0); }

  // reference gradients, one row per basis function
  Eigen::MatrixX2d gradients(const Vec2& p) const {
    Eigen::MatrixX2d g(dim(), 2);
    g.col(0) = coeff_ * mono_vec(p, 1, 0);
    g.col(1) = coeff_ * mono_vec(p, 0, 1);
    return g;
  }

  // reference second derivatives (xx, xy, yy), one row per basis function
  Eigen::MatrixX3d hessians(const Vec2& p) const {
    Eigen::MatrixX3d h(dim(), 3);
    h.col(0) = coeff_ * mono_vec(p, 2, 0);
    h.col(1) = coeff_ * mono_vec(p, 1, 1);
    h.col(2) = coeff_ * mono_vec(p, 0, 2);
    return h;
  }

  static const BasisSet& get(int degree) {
    static std::map<int, BasisSet> cache;
    auto it = cache.find(degree);
    if (it == cache.end()) it = cache.emplace(degree, BasisSet(degree)).first;
    return it->second;
  }

private:
  double monomial(int j, const Vec2& p, int dx, int dy) const {
    int a = exps_[j][0], b = exps_[j][1];
    double c = 1.0;
    for (int d = 0; d < dx; ++d) c *= a--;
    for (int d = 0; d < dy; ++d) c *= b--;
    if (c == 0.0) return 0.0;
    return c * std::pow(p[0], a) * std::pow(p[1], b);
  }

  Eigen::VectorXd mono_vec(const Vec2& p, int dx, int dy) const {
    Eigen::VectorXd m(dim());
    for (int j = 0; j < dim(); ++j) m[j] = monomial(j, p, dx, dy);
    return m;
  }

  int k_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 2>> exps_;
  Eigen::MatrixXd coeff_;
};

// eval_basis per the library surface: values and reference gradients.
inline void eval_basis(int degree, const Vec2& point, Eigen::VectorXd& values,
                       Eigen::MatrixX2d& gradients) {
  const BasisSet& b = BasisSet::get(degree);
  values = b.values(point);
  gradients = b.gradients(point);
}

// Basis values/derivatives tabulated at the points of a quadrature rule.
struct BasisTable {
  Eigen::MatrixXd val;                  // (nq, dim)
  std::vector<Eigen::MatrixX2d> grad;   // per point, (dim, 2)
  std::vector<Eigen::MatrixX3d> hess;   // per point, (dim, 3)

  BasisTable(const BasisSet& basis, const QuadratureRule& rule, bool with_hess = false) {
    const int nq = static_cast<int>(rule.size());
    val.resize(nq, basis.dim());
    grad.reserve(nq);
    for (int q = 0; q < nq; ++q) {
      val.row(q) = basis.values(rule.points[q]).transpose();
      grad.push_back(basis.gradients(rule.points[q]));
      if (with_hess) hess.push_back(basis.hessians(rule.points[q]));
    }
  }
};

}  // namespace sigrec

#endif
