#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <memory>

#include "sigrec/cases.hpp"
#include "sigrec/measurement.hpp"
#include "sigrec/metrics.hpp"

using namespace sigrec;

TEST_CASE("projection reproduces polynomials of matching degree") {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(3));
  const ScalarField u = [](Vec2 x) { return x[0] * x[0] + x[1]; };
  const DGField f = project_to_dg(u, mesh, 2);
  for (int i = 0; i < 300; ++i) {
    const Vec2 p{0.5 * (uniform_pm1(21, 2 * i) + 1), 0.5 * (uniform_pm1(21, 2 * i + 1) + 1)};
    CHECK(std::abs(f.eval(p) - u(p)) < 1e-12);
  }
}

TEST_CASE("projection error decays at O(h^{k0+1})") {
  const ScalarField u = [](Vec2 x) { return std::exp(x[0]); };
  const int k0 = 2;
  std::vector<double> errs, hs;
  for (int n : {8, 16, 32}) {
    auto mesh = std::make_shared<const Mesh>(build_structured_mesh(n));
    const DGField f = project_to_dg(u, mesh, k0);
    errs.push_back(l2_norm([&](Vec2 x) { return f.eval(x) - u(x); }, *mesh));
    hs.push_back(mesh->h);
  }
  const double slope = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
  INFO("errs " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(slope > k0 + 0.7);
}

TEST_CASE("case 1 projection pointwise accuracy at k0=3, n=48") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(48));
  const DGField f = project_to_dg(c.u, mesh, 3);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Vec2 p{0.5 * (uniform_pm1(31, 2 * i) + 1), 0.5 * (uniform_pm1(31, 2 * i + 1) + 1)};
    worst = std::max(worst, std::abs(f.eval(p) - c.u(p)));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("projection is idempotent") {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(5));
  const DGField once = project_to_dg([](Vec2 x) { return std::sin(4 * x[0]) * x[1] + 0.3; }, mesh, 3);
  const DGField twice = project_to_dg([&](Vec2 x) { return once.eval(x); }, mesh, 3);
  CHECK((once.coeffs() - twice.coeffs()).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("noise: delta=0 identity, relative bound, determinism") {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(6));
  const DGField clean = project_to_dg([](Vec2 x) { return std::cos(x[0]) + 2.0 * x[1]; }, mesh, 2);

  const DGField same = add_noise(clean, 0.0, 99);
  CHECK((same.coeffs() - clean.coeffs()).norm() == 0.0);

  const DGField noisy = add_noise(clean, 0.1, 7);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < clean.coeffs().size(); ++i)
    if (clean.coeffs()[i] != 0.0)
      worst = std::max(worst,
                       std::abs(noisy.coeffs()[i] / clean.coeffs()[i] - 1.0));
  CHECK(worst <= 0.1 + 1e-14);
  CHECK(worst > 0.0);  // something was actually perturbed

  const DGField again = add_noise(clean, 0.1, 7);
  CHECK((again.coeffs() - noisy.coeffs()).norm() == 0.0);  // bit identical
  const DGField other = add_noise(clean, 0.1, 8);
  CHECK((other.coeffs() - noisy.coeffs()).norm() > 0.0);

  CHECK_THROWS_AS(add_noise(clean, -0.01, 1), std::invalid_argument);
}

TEST_CASE("derive_fields: analytic closed forms") {
  const auto c1 = manufactured_case(1);
  const AnalyticVelocityField v1(c1.grad_u, c1.lap_u, 1e-3);
  const Vec2 p{0.5, 0.5};
  CHECK(v1.beta(p)[0] == Catch::Approx(-1.0));
  CHECK(v1.beta(p)[1] == Catch::Approx(0.0).margin(1e-15));
  CHECK(v1.mu(p) == Catch::Approx(1.5 + 1e-3).epsilon(1e-13));

  const auto c4 = manufactured_case(4);
  const AnalyticVelocityField v4(c4.grad_u, c4.lap_u, 1e-2);
  for (const Vec2 q : {Vec2{0.3, 0.7}, Vec2{0.8, 0.2}})
    CHECK(v4.mu(q) == Catch::Approx(1e-2).epsilon(1e-14));
}

TEST_CASE("derive_fields: exact element-wise differentiation") {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(4));
  auto U = std::make_shared<DGField>(project_to_dg([](Vec2 x) { return x[0] * x[0]; }, mesh, 2));
  const auto vel = derive_fields(U, 1e-2);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p{0.5 * (uniform_pm1(77, 2 * i) + 1), 0.5 * (uniform_pm1(77, 2 * i + 1) + 1)};
    CHECK(std::abs(vel->beta(p)[0] - 2 * p[0]) < 1e-12);
    CHECK(std::abs(vel->beta(p)[1]) < 1e-12);
    CHECK(vel->mu(p) == Catch::Approx(1.0 + 1e-2).epsilon(1e-12));
  }
  CHECK(vel->beta_degree() == 1);
}

TEST_CASE("derive_fields matches finite differences of the element polynomial") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(6));
  auto U = std::make_shared<DGField>(project_to_dg(c.u, mesh, 3));
  const auto vel = derive_fields(U, 1e-2);
  const double h = 1e-7;
  int checked = 0;
  for (int t = 0; t < static_cast<int>(mesh->n_triangles()); t += 7) {
    const Vec2 p = mesh->centroid(t);
    const Vec2 b = vel->beta(p, &p);
    const double fdx = (U->eval({p[0] + h, p[1]}, &p) - U->eval({p[0] - h, p[1]}, &p)) / (2 * h);
    const double fdy = (U->eval({p[0], p[1] + h}, &p) - U->eval({p[0], p[1] - h}, &p)) / (2 * h);
    CHECK(std::abs(b[0] - fdx) < 1e-8 * std::max(1.0, std::abs(fdx)));
    CHECK(std::abs(b[1] - fdy) < 1e-8 * std::max(1.0, std::abs(fdy)));
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("VelocityField validates eps") {
  const auto c = manufactured_case(1);
  CHECK_THROWS_AS(AnalyticVelocityField(c.grad_u, c.lap_u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticVelocityField(c.grad_u, c.lap_u, 1.0), std::invalid_argument);
}

TEST_CASE("DG field CSV round trip") {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(5));
  const auto c = manufactured_case(2);
  DGField f = project_to_dg(c.sigma, mesh, 2);
  const std::string path = "field_roundtrip.csv";
  write_dg_csv(f, path);
  const DGField g = read_dg_csv(path);
  REQUIRE(g.degree() == f.degree());
  REQUIRE(g.mesh().n_subdivisions == 5);
  CHECK((g.coeffs() - f.coeffs()).lpNorm<Eigen::Infinity>() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("CSV import validates metadata") {
  const std::string path = "field_bad.csv";
  {
    std::ofstream os(path);
    os << "# degree = 2\n# n = 3\n# basis = fourier\ntriangle_id,coeff_0\n";
  }
  CHECK_THROWS_AS(read_dg_csv(path), data_error);
  std::remove(path.c_str());
}
