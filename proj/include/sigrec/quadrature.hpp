#ifndef SIGREC_QUADRATURE_HPP
#define SIGREC_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sigrec/core.hpp"

namespace sigrec {

// Points and weights on a reference domain: the unit triangle
// {(0,0),(1,0),(0,1)} for area rules, the segment [0,1] for edge rules.
struct QuadratureRule {
  std::vector<Vec2> points;     // edge rules store (t, 0)
  std::vector<double> weights;  // sum = reference measure
  int degree = 0;               // declared exactness
  std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxQuadratureDegree = 50;

// Gauss-Legendre nodes/weights on [0,1] via Newton on the recurrence.
inline void gauss_legendre_01(int m, std::vector<double>& x, std::vector<double>& w) {
  x.resize(m);
  w.resize(m);
  for (int i = 0; i < m; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));  // root guess on [-1,1]
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[m - 1 - i] = 0.5 * (t + 1.0);
    w[m - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

// 1D rule on [0,1], exact for polynomials up to `degree`; weights sum to 1.
inline QuadratureRule edge_quadrature(int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw std::invalid_argument("edge_quadrature: degree out of supported range");
  const int m = std::max(1, (degree + 2) / 2);  // 2m-1 >= degree
  std::vector<double> x, w;
  gauss_legendre_01(m, x, w);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < m; ++i) {
    rule.points.push_back({x[i], 0.0});
    rule.weights.push_back(w[i]);
  }
  return rule;
}

// Triangle rule exact for all monomials x^a y^b, a+b <= degree.
// Degree <= 1 is the centroid rule; higher degrees use collapsed tensor
// Gauss (Duffy), which is exact by construction for any degree.
inline QuadratureRule triangle_quadrature(int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw std::invalid_argument("triangle_quadrature: degree out of supported range");
  QuadratureRule rule;
  rule.degree = degree;
  if (degree <= 1) {
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(0.5);
    return rule;
  }
  // x-direction carries the extra (1-u) weight factor, hence degree+1 there
  const int m = (degree + 3) / 2;  // 2m-1 >= degree+1
  std::vector<double> x, w;
  gauss_legendre_01(m, x, w);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = x[i], v = x[j];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(w[i] * w[j] * (1.0 - u));
    }
  }
  return rule;
}

// closed form: int_T x^a y^b = a! b! / (a+b+2)!
inline double reference_monomial_integral(int a, int b) {
  double v = 1.0;
  for (int i = 1; i <= b; ++i) v *= static_cast<double>(i) / (a + i);
  for (int i = a + b + 1; i <= a + b + 2; ++i) v /= i;
  return v;
}

}  // namespace sigrec

#endif
