#ifndef SIGREC_MEASUREMENT_HPP
#define SIGREC_MEASUREMENT_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sigrec/dg_field.hpp"
#include "sigrec/mesh.hpp"

namespace sigrec {

// Element-wise interpolation of u at the degree-k0 nodal points. Exact for
// polynomials of degree <= k0 per element, hence a projection.
inline DGField project_to_dg(const ScalarField& u, std::shared_ptr<const Mesh> mesh, int k0) {
  DGField field(std::move(mesh), k0);
  const int dim = field.basis().dim();
  for (int t = 0; t < static_cast<int>(field.mesh().n_triangles()); ++t) {
    const auto nodes = field.element_nodes(t);
    auto c = field.element_coeffs(t);
    for (int i = 0; i < dim; ++i) c[i] = u(nodes[i]);
  }
  return field;
}

// Multiplicative measurement noise U = u * (1 + delta * xi). One factor per
// element, sampled at the element centroid from a spatially correlated unit
// field: iid U(-1,1) draws on a coarse lattice over Omega (spacing 1/4),
// bilinearly interpolated. |xi| <= 1, so every nodal value moves by at most
// delta * |u|; draws are keyed by (seed, lattice index) so the result does
// not depend on element traversal order.
inline constexpr int kNoiseLatticeCells = 4;

namespace detail {
inline double correlated_unit_noise(std::uint64_t seed, const Vec2& x) {
  const int mcells = kNoiseLatticeCells;
  const auto draw = [&](int i, int j) {
    return uniform_pm1(seed, (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j));
  };
  double u = std::min(x[0] * mcells, mcells - 1e-12);
  double v = std::min(x[1] * mcells, mcells - 1e-12);
  const int i = static_cast<int>(u), j = static_cast<int>(v);
  const double s = u - i, t = v - j;
  return (1 - s) * (1 - t) * draw(i, j) + s * (1 - t) * draw(i + 1, j) +
         (1 - s) * t * draw(i, j + 1) + s * t * draw(i + 1, j + 1);
}
}  // namespace detail

inline DGField add_noise(const DGField& u, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw std::invalid_argument("add_noise: delta must be >= 0");
  DGField out = u;
  if (delta == 0.0) return out;
  for (int t = 0; t < static_cast<int>(u.mesh().n_triangles()); ++t) {
    const double xi = detail::correlated_unit_noise(seed, u.mesh().centroid(t));
    out.element_coeffs(t) *= (1.0 + delta * xi);
  }
  return out;
}

inline DGField add_noise(const ScalarField& u, std::shared_ptr<const Mesh> mesh, int k0,
                         double delta, std::uint64_t seed) {
  return add_noise(project_to_dg(u, std::move(mesh), k0), delta, seed);
}

// Transport coefficients beta = grad U and mu_eps = lap(U)/2 + eps. The
// polynomial variant differentiates the element polynomials exactly and is
// double-valued on interior edges (the hint picks the side); the analytic
// variant wraps closed forms for exact-data runs.
class VelocityField {
public:
  explicit VelocityField(double eps) : eps_(eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
      throw std::invalid_argument("VelocityField: eps must lie in (0,1)");
  }
  virtual ~VelocityField() = default;
  double eps() const { return eps_; }
  virtual Vec2 beta(const Vec2& x, const Vec2* hint = nullptr) const = 0;
  virtual double mu(const Vec2& x, const Vec2* hint = nullptr) const = 0;
  // polynomial degree of beta per element; quadrature selection uses this
  virtual int beta_degree() const = 0;

private:
  double eps_;
};

class PolynomialVelocityField final : public VelocityField {
public:
  PolynomialVelocityField(std::shared_ptr<const DGField> data, double eps)
      : VelocityField(eps), data_(std::move(data)) {}

  Vec2 beta(const Vec2& x, const Vec2* hint = nullptr) const override {
    return data_->grad(x, hint);
  }
  double mu(const Vec2& x, const Vec2* hint = nullptr) const override {
    return 0.5 * data_->laplacian(x, hint) + eps();
  }
  int beta_degree() const override { return std::max(0, data_->degree() - 1); }
  const DGField& data() const { return *data_; }

private:
  std::shared_ptr<const DGField> data_;
};

class AnalyticVelocityField final : public VelocityField {
public:
  AnalyticVelocityField(VectorField grad_u, ScalarField lap_u, double eps)
      : VelocityField(eps), grad_u_(std::move(grad_u)), lap_u_(std::move(lap_u)) {}

  Vec2 beta(const Vec2& x, const Vec2* = nullptr) const override { return grad_u_(x); }
  double mu(const Vec2& x, const Vec2* = nullptr) const override { return 0.5 * lap_u_(x) + eps(); }
  int beta_degree() const override { return 4; }  // effective degree for quadrature

private:
  VectorField grad_u_;
  ScalarField lap_u_;
};

inline std::shared_ptr<PolynomialVelocityField> derive_fields(std::shared_ptr<const DGField> u,
                                                              double eps) {
  return std::make_shared<PolynomialVelocityField>(std::move(u), eps);
}

// ---- DGField CSV round trip ----

inline void write_dg_csv(const DGField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw data_error("write_dg_csv: cannot open " + path);
  os.precision(17);
  os << "# degree = " << f.degree() << "\n";
  os << "# n = " << f.mesh().n_subdivisions << "\n";
  os << "# basis = lagrange-uniform\n";
  const int dim = f.basis().dim();
  os << "triangle_id";
  for (int i = 0; i < dim; ++i) os << ",coeff_" << i;
  os << "\n";
  for (int t = 0; t < static_cast<int>(f.mesh().n_triangles()); ++t) {
    os << t;
    const auto c = f.element_coeffs(t);
    for (int i = 0; i < dim; ++i) os << "," << c[i];
    os << "\n";
  }
}

inline DGField read_dg_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("read_dg_csv: cannot open " + path);
  int degree = -1, n = -1;
  std::string basis_name, line;
  while (is.peek() == '#') {
    std::getline(is, line);
    std::istringstream ls(line.substr(1));
    std::string key, eq;
    ls >> key >> eq;
    if (key == "degree") ls >> degree;
    else if (key == "n") ls >> n;
    else if (key == "basis") ls >> basis_name;
  }
  if (degree < 0 || n < 1) throw data_error("read_dg_csv: missing metadata header");
  if (basis_name != "lagrange-uniform")
    throw data_error("read_dg_csv: unsupported basis '" + basis_name + "'");
  std::getline(is, line);  // column header
  auto mesh = std::make_shared<Mesh>(build_structured_mesh(n));
  DGField f(mesh, degree);
  const int dim = f.basis().dim();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    const int t = std::stoi(cell);
    if (t < 0 || t >= static_cast<int>(mesh->n_triangles()))
      throw data_error("read_dg_csv: triangle id out of range");
    auto c = f.element_coeffs(t);
    for (int i = 0; i < dim; ++i) {
      if (!std::getline(ls, cell, ',')) throw data_error("read_dg_csv: short row");
      c[i] = std::stod(cell);
    }
  }
  return f;
}

}  // namespace sigrec

#endif
