#ifndef SIGREC_DG_FIELD_HPP
#define SIGREC_DG_FIELD_HPP

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "sigrec/basis.hpp"
#include "sigrec/mesh.hpp"

namespace sigrec {

// Element-wise polynomial function: nodal Lagrange coefficients per triangle.
// Evaluation at an interior point uses only that triangle's coefficients.
class DGField {
public:
  DGField(std::shared_ptr<const Mesh> mesh, int degree)
      : mesh_(std::move(mesh)), degree_(degree), basis_(&BasisSet::get(degree)) {
    coeffs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh_->n_triangles()) * basis_->dim());
  }

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  const BasisSet& basis() const { return *basis_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

  Eigen::Map<const Eigen::VectorXd> element_coeffs(int t) const {
    return {coeffs_.data() + static_cast<std::ptrdiff_t>(t) * basis_->dim(),
            static_cast<Eigen::Index>(basis_->dim())};
  }
  Eigen::Map<Eigen::VectorXd> element_coeffs(int t) {
    return {coeffs_.data() + static_cast<std::ptrdiff_t>(t) * basis_->dim(),
            static_cast<Eigen::Index>(basis_->dim())};
  }

  // physical positions of the element's nodal points
  std::vector<Vec2> element_nodes(int t) const {
    std::vector<Vec2> out;
    out.reserve(basis_->nodes().size());
    for (const auto& r : basis_->nodes()) out.push_back(mesh_->map(t).to_physical(r));
    return out;
  }

  double eval_ref(int t, const Vec2& ref) const {
    return basis_->values(ref).dot(element_coeffs(t));
  }

  double eval(const Vec2& x, const Vec2* hint = nullptr) const {
    const int t = mesh_->locate(x, hint);
    return eval_ref(t, mesh_->map(t).to_reference(x));
  }

  // physical gradient of the element polynomial
  Vec2 grad_ref(int t, const Vec2& ref) const {
    const Eigen::MatrixX2d g = basis_->gradients(ref);
    const auto c = element_coeffs(t);
    const Vec2 gref{g.col(0).dot(c), g.col(1).dot(c)};
    return mesh_->map(t).push_gradient(gref);
  }

  Vec2 grad(const Vec2& x, const Vec2* hint = nullptr) const {
    const int t = mesh_->locate(x, hint);
    return grad_ref(t, mesh_->map(t).to_reference(x));
  }

  // physical Laplacian: tr(J^{-T} H_ref J^{-1})
  double laplacian_ref(int t, const Vec2& ref) const {
    const Eigen::MatrixX3d h = basis_->hessians(ref);
    const auto c = element_coeffs(t);
    const double hxx = h.col(0).dot(c), hxy = h.col(1).dot(c), hyy = h.col(2).dot(c);
    const auto& m = mesh_->map(t);
    // tr = sum_pq H_ref[p][q] (Jinv Jinv^T)[p][q]
    const double a = m.Jinv[0][0], b = m.Jinv[0][1], c0 = m.Jinv[1][0], d = m.Jinv[1][1];
    return hxx * (a * a + b * b) + 2.0 * hxy * (a * c0 + b * d) + hyy * (c0 * c0 + d * d);
  }

  double laplacian(const Vec2& x, const Vec2* hint = nullptr) const {
    const int t = mesh_->locate(x, hint);
    return laplacian_ref(t, mesh_->map(t).to_reference(x));
  }

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  const BasisSet* basis_;
  Eigen::VectorXd coeffs_;
};

}  // namespace sigrec

#endif
