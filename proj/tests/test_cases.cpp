#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "sigrec/cases.hpp"
#include "sigrec/quadrature.hpp"

using namespace sigrec;

namespace {
std::vector<Vec2> random_points(int count, std::uint64_t seed) {
  std::vector<Vec2> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i)
    pts.push_back({0.5 * (uniform_pm1(seed, 2 * i) + 1), 0.5 * (uniform_pm1(seed, 2 * i + 1) + 1)});
  return pts;
}
}  // namespace

TEST_CASE("case 1 closed forms at the center") {
  const auto c = manufactured_case(1);
  const Vec2 p{0.5, 0.5};
  CHECK(c.u(p) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(c.sigma(p) == Catch::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(c.grad_u(p)[0] == Catch::Approx(-1.0).epsilon(1e-15));
  CHECK(c.grad_u(p)[1] == Catch::Approx(0.0).margin(1e-15));
  CHECK(c.lap_u(p) == Catch::Approx(3.0).epsilon(1e-14));
  // 2 (grad gamma . grad u) + gamma lap u = 2*(1.5 gamma)(-1) + gamma*3 = 0
  const double g = c.gamma(p);
  CHECK(2.0 * dot(c.grad_gamma(p), c.grad_u(p)) + g * c.lap_u(p) == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("case 1 flux is e^{2x} (-1, 2(y-1/2)) and divergence free") {
  const auto c = manufactured_case(1);
  for (const auto& p : random_points(200, 11)) {
    const Vec2 flux{c.sigma(p) * c.grad_u(p)[0], c.sigma(p) * c.grad_u(p)[1]};
    CHECK(flux[0] == Catch::Approx(-std::exp(2 * p[0])).epsilon(1e-12));
    CHECK(flux[1] == Catch::Approx(std::exp(2 * p[0]) * 2 * (p[1] - 0.5)).margin(1e-12));
  }
  // div(sigma grad u) via central differences of the flux
  const double h = 1e-5;
  for (const auto& p : random_points(50, 12)) {
    if (p[0] < 2 * h || p[0] > 1 - 2 * h || p[1] < 2 * h || p[1] > 1 - 2 * h) continue;
    const auto fx = [&](Vec2 q) { return c.sigma(q) * c.grad_u(q)[0]; };
    const auto fy = [&](Vec2 q) { return c.sigma(q) * c.grad_u(q)[1]; };
    const double div = (fx({p[0] + h, p[1]}) - fx({p[0] - h, p[1]})) / (2 * h) +
                       (fy({p[0], p[1] + h}) - fy({p[0], p[1] - h})) / (2 * h);
    CHECK(std::abs(div) < 1e-5);
  }
}

TEST_CASE("gamma^2 = sigma for all cases") {
  for (int id = 1; id <= 4; ++id) {
    const auto c = manufactured_case(id);
    for (const auto& p : random_points(2500, 100 + id)) {
      const double g = c.gamma(p);
      CHECK(std::abs(g * g - c.sigma(p)) < 1e-14 * std::max(1.0, c.sigma(p)));
    }
  }
}

TEST_CASE("case 2 Neumann datum has zero boundary mean") {
  const auto c = manufactured_case(2);
  const QuadratureRule rule = edge_quadrature(30);
  double total = 0.0;
  // four unit sides
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q][0], w = rule.weights[q];
    total += w * (c.g({t, 0.0}) + c.g({t, 1.0}) + c.g({0.0, t}) + c.g({1.0, t}));
  }
  CHECK(std::abs(total) < 1e-12);
  // and int_Gamma e^{x1+x2} ds = 2(e^2-1)
  double es = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q][0], w = rule.weights[q];
    const auto f = [](Vec2 x) { return std::exp(x[0] + x[1]); };
    es += w * (f({t, 0.0}) + f({t, 1.0}) + f({0.0, t}) + f({1.0, t}));
  }
  CHECK(es == Catch::Approx(2 * (std::exp(2.0) - 1.0)).epsilon(1e-13));
}

TEST_CASE("case 4 datum is harmonic") {
  const auto c = manufactured_case(4);
  for (const auto& p : random_points(500, 44)) CHECK(std::abs(c.lap_u(p)) < 1e-12);
  // sigma jumps: 2 inside the inclusion, 1 outside
  CHECK(c.sigma({0.5, 0.5}) == 2.0);
  CHECK(c.sigma({0.2, 0.2}) == 1.0);
  CHECK(c.gamma({0.5, 0.5}) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("transport residual oracle") {
  const auto c1 = manufactured_case(1);
  CHECK(transport_residual(c1, random_points(1000, 5)) < 1e-10);

  const auto c2 = manufactured_case(2);
  CHECK_THROWS_AS(transport_residual(c2, random_points(3, 6)), unsupported_error);

  // case 4: zero residual away from the jump set, finite across it
  const auto c4 = manufactured_case(4);
  std::vector<Vec2> off_jump{{0.1, 0.1}, {0.5, 0.5}, {0.9, 0.2}};
  CHECK(transport_residual(c4, off_jump) < 1e-8);
  std::vector<Vec2> near_jump{{0.375, 0.5}};
  CHECK(transport_residual(c4, near_jump) > 1.0);  // finite-difference kink shows up
}

TEST_CASE("unknown case id") {
  CHECK_THROWS_AS(manufactured_case(0), std::invalid_argument);
  CHECK_THROWS_AS(manufactured_case(5), std::invalid_argument);
}
