#ifndef SIGREC_METRICS_HPP
#define SIGREC_METRICS_HPP

#include <cmath>
#include <stdexcept>

#include "sigrec/dg_field.hpp"
#include "sigrec/quadrature.hpp"

namespace sigrec {

// Error = int_Omega |gamma - gamma_h|^{1/2} dx. The integrand is nonsmooth
// where the error changes sign, so each element is split into subdiv^2
// uniform subtriangles carrying a degree-10 rule.
inline double error_halfnorm(const ScalarField& exact, const DGField& approx, int subdiv = 4,
                             int quad_degree = 10) {
  const QuadratureRule rule = triangle_quadrature(quad_degree);
  const Mesh& mesh = approx.mesh();
  double total = 0.0;
  const double inv = 1.0 / subdiv;
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const auto& map = mesh.map(t);
    const double wscale = std::abs(map.detJ) * inv * inv;
    for (int si = 0; si < subdiv; ++si) {
      for (int sj = 0; sj + si < subdiv; ++sj) {
        // upright subtriangle at (si,sj), plus its inverted partner
        for (int flip = 0; flip < (sj + si == subdiv - 1 ? 1 : 2); ++flip) {
          for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 p = rule.points[q];
            Vec2 ref;
            if (flip == 0)
              ref = {(si + p[0]) * inv, (sj + p[1]) * inv};
            else
              ref = {(si + 1 - p[0]) * inv, (sj + 1 - p[1]) * inv};
            const double diff = exact(map.to_physical(ref)) - approx.eval_ref(t, ref);
            total += rule.weights[q] * wscale * std::sqrt(std::abs(diff));
          }
        }
      }
    }
  }
  return total;
}

// RError = ||gamma - gamma_h||_{L2} / ||gamma||_{L2}
inline double rerror(const ScalarField& exact, const DGField& approx, int quad_degree = -1) {
  const int deg = quad_degree < 0 ? 2 * approx.degree() + 8 : quad_degree;
  const QuadratureRule rule = triangle_quadrature(deg);
  const Mesh& mesh = approx.mesh();
  double num = 0.0, den = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const auto& map = mesh.map(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * std::abs(map.detJ);
      const double ge = exact(map.to_physical(rule.points[q]));
      const double gh = approx.eval_ref(t, rule.points[q]);
      num += w * (ge - gh) * (ge - gh);
      den += w * ge * ge;
    }
  }
  if (!(den > 0.0)) throw std::invalid_argument("rerror: exact field is identically zero");
  return std::sqrt(num / den);
}

// ||f||_{L2} of an evaluator over the mesh (quadrature estimate)
inline double l2_norm(const ScalarField& f, const Mesh& mesh, int quad_degree = 10) {
  const QuadratureRule rule = triangle_quadrature(quad_degree);
  double acc = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const auto& map = mesh.map(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double v = f(map.to_physical(rule.points[q]));
      acc += rule.weights[q] * std::abs(map.detJ) * v * v;
    }
  }
  return std::sqrt(acc);
}

// L2 distance between two DG fields, integrated on `quad_mesh` (use the finer
// mesh of a nested pair so both fields are smooth on each element).
inline double l2_distance(const DGField& f, const DGField& g, const Mesh& quad_mesh,
                          int quad_degree = 10) {
  const QuadratureRule rule = triangle_quadrature(quad_degree);
  double acc = 0.0;
  for (int t = 0; t < static_cast<int>(quad_mesh.n_triangles()); ++t) {
    const auto& map = quad_mesh.map(t);
    const Vec2 cent = quad_mesh.centroid(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = map.to_physical(rule.points[q]);
      const double d = f.eval(x, &cent) - g.eval(x, &cent);
      acc += rule.weights[q] * std::abs(map.detJ) * d * d;
    }
  }
  return std::sqrt(acc);
}

}  // namespace sigrec

#endif
