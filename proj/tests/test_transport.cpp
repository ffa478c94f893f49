#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "sigrec/cases.hpp"
#include "sigrec/measurement.hpp"
#include "sigrec/metrics.hpp"
#include "sigrec/transport.hpp"

using namespace sigrec;

namespace {

std::shared_ptr<const VelocityField> constant_beta(double bx, double by, double eps) {
  return std::make_shared<AnalyticVelocityField>(
      [bx, by](Vec2) -> Vec2 { return {bx, by}; }, [](Vec2) { return 0.0; }, eps);
}

DGField random_field(std::shared_ptr<const Mesh> mesh, int k, std::uint64_t seed) {
  DGField f(std::move(mesh), k);
  for (Eigen::Index i = 0; i < f.coeffs().size(); ++i)
    f.coeffs()[i] = uniform_pm1(seed, static_cast<std::uint64_t>(i));
  return f;
}

}  // namespace

TEST_CASE("zero inflow datum gives zero right-hand side") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(6));
  TransportProblem prob;
  prob.velocity = std::make_shared<AnalyticVelocityField>(c.grad_u, c.lap_u, 1e-2);
  prob.gamma0 = [](Vec2) { return 0.0; };
  prob.degree = 2;
  const SparseSystem sys = assemble(prob, *mesh);
  CHECK(sys.rhs.norm() == 0.0);
}

TEST_CASE("k=0 constant-velocity assembly matches the hand upwind stencil") {
  // n=1 (two triangles), beta=(1,0), mu=eps. Element-wise integration by
  // parts gives the 2x2 system
  //   [ eps/2 + eta + 1/2      -(eta + 1/2) ] [g0]   [0      ]
  //   [ -(eta - 1/2)       eps/2 + eta + 1/2] [g1] = [gamma0 ]
  // with the diagonal edge flux |beta.n_e| |e| = 1 and the left-edge inflow
  // term feeding row 1 (the upper triangle).
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(1));
  const double eps = 1e-2, eta = 100.0, gamma0 = 0.7;
  TransportProblem prob;
  prob.velocity = constant_beta(1.0, 0.0, eps);
  prob.gamma0 = [gamma0](Vec2) { return gamma0; };
  prob.penalty = eta;
  prob.degree = 0;
  const SparseSystem sys = assemble(prob, *mesh);
  REQUIRE(sys.dim() == 2);
  const Eigen::MatrixXd A = Eigen::MatrixXd(sys.matrix);
  CHECK(A(0, 0) == Catch::Approx(eps / 2 + eta + 0.5).epsilon(1e-13));
  CHECK(A(0, 1) == Catch::Approx(-(eta + 0.5)).epsilon(1e-13));
  CHECK(A(1, 0) == Catch::Approx(-(eta - 0.5)).epsilon(1e-13));
  CHECK(A(1, 1) == Catch::Approx(eps / 2 + eta + 0.5).epsilon(1e-13));
  CHECK(sys.rhs[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(sys.rhs[1] == Catch::Approx(gamma0).epsilon(1e-13));
}

TEST_CASE("discrete coercivity identity on projected data") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(8));
  auto U = std::make_shared<DGField>(project_to_dg(c.u, mesh, 3));
  const double eps = 1e-3, eta = 100.0;
  TransportProblem prob;
  prob.velocity = derive_fields(U, eps);
  prob.gamma0 = c.gamma;
  prob.penalty = eta;
  prob.degree = 2;
  const SparseSystem sys = assemble(prob, *mesh);

  const QuadratureRule vq = triangle_quadrature(prob.effective_quadrature());
  const QuadratureRule eq = edge_quadrature(prob.effective_quadrature());
  for (int trial = 0; trial < 20; ++trial) {
    const DGField w = random_field(mesh, 2, 1000 + trial);
    const double lhs = w.coeffs().dot(sys.matrix * w.coeffs());
    double rhs = 0.0;
    for (int t = 0; t < static_cast<int>(mesh->n_triangles()); ++t)
      for (std::size_t q = 0; q < vq.size(); ++q) {
        const double val = w.eval_ref(t, vq.points[q]);
        rhs += eps * vq.weights[q] * std::abs(mesh->map(t).detJ) * val * val;
      }
    for (const auto& edge : mesh->edges) {
      const Vec2 a = mesh->vertices[edge.v0], b = mesh->vertices[edge.v1];
      const Vec2 cl = mesh->centroid(edge.left);
      for (std::size_t q = 0; q < eq.size(); ++q) {
        const Vec2 xq = a + eq.points[q][0] * (b - a);
        if (edge.is_boundary()) {
          const double bn = dot(prob.velocity->beta(xq, &cl), edge.normal);
          const double val = w.eval_ref(edge.left, mesh->map(edge.left).to_reference(xq));
          rhs += 0.5 * eq.weights[q] * edge.length * std::abs(bn) * val * val;
        } else {
          const Vec2 cr = mesh->centroid(edge.right);
          const double m = 0.5 * (dot(prob.velocity->beta(xq, &cl), edge.normal) +
                                  dot(prob.velocity->beta(xq, &cr), edge.normal));
          const double jump = w.eval_ref(edge.left, mesh->map(edge.left).to_reference(xq)) -
                              w.eval_ref(edge.right, mesh->map(edge.right).to_reference(xq));
          rhs += eta * eq.weights[q] * edge.length * std::abs(m) * jump * jump;
        }
      }
    }
    INFO("trial " << trial);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    CHECK(lhs >= eps * l2_norm([&](Vec2 x) { return w.eval(x); }, *mesh) *
                     l2_norm([&](Vec2 x) { return w.eval(x); }, *mesh) * (1 - 1e-10));
  }
}

TEST_CASE("apply_bilinear agrees with the assembled matrix") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(5));
  auto U = std::make_shared<DGField>(project_to_dg(c.u, mesh, 2));
  TransportProblem prob;
  prob.velocity = derive_fields(U, 5e-2);
  prob.gamma0 = c.gamma;
  prob.degree = 1;
  const SparseSystem sys = assemble(prob, *mesh);

  const DGField zero(mesh, 1);
  const DGField w0 = random_field(mesh, 1, 1);
  CHECK(apply_bilinear(prob, *mesh, zero, w0) == Catch::Approx(0.0).margin(1e-14));

  for (int trial = 0; trial < 5; ++trial) {
    const DGField v = random_field(mesh, 1, 10 + trial);
    const DGField w = random_field(mesh, 1, 20 + trial);
    const double direct = apply_bilinear(prob, *mesh, v, w);
    const double via_matrix = w.coeffs().dot(sys.matrix * v.coeffs());
    CHECK(direct == Catch::Approx(via_matrix).epsilon(1e-11));
  }

  CHECK_THROWS_AS(apply_bilinear(prob, *mesh, random_field(mesh, 2, 5), w0),
                  std::invalid_argument);
}

TEST_CASE("interior terms vanish for globally continuous polynomials") {
  // a_h(v, w) is penalty-independent when [v] = 0 on interior edges; the
  // projected traces agree to roundoff, so doubling the penalty moves the
  // value only at the eps-machine level, while a genuinely discontinuous
  // field moves it by O(1).
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(4));
  auto U = std::make_shared<DGField>(project_to_dg(c.u, mesh, 3));
  const DGField v = project_to_dg([](Vec2 x) { return 1.0 + 2 * x[0] - x[1] + x[0] * x[1]; }, mesh, 2);
  const DGField w = random_field(mesh, 2, 3);
  TransportProblem prob;
  prob.velocity = derive_fields(U, 1e-2);
  prob.gamma0 = c.gamma;
  prob.degree = 2;
  prob.penalty = 100.0;
  const double a1 = apply_bilinear(prob, *mesh, v, w);
  prob.penalty = 200.0;
  const double a2 = apply_bilinear(prob, *mesh, v, w);
  CHECK(std::abs(a1 - a2) < 1e-10 * (1.0 + std::abs(a1)));

  const DGField vd = random_field(mesh, 2, 4);
  prob.penalty = 100.0;
  const double b1 = apply_bilinear(prob, *mesh, vd, w);
  prob.penalty = 200.0;
  const double b2 = apply_bilinear(prob, *mesh, vd, w);
  CHECK(std::abs(b1 - b2) > 1.0);  // jump terms really are active
}

TEST_CASE("integration by parts (trace lemma) at the discrete level") {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(5));
  auto U = std::make_shared<DGField>(project_to_dg(
      [](Vec2 x) { return x[0] * x[0] * x[1] + 0.5 * x[1] * x[1] - x[0]; }, mesh, 3));
  const auto vel = derive_fields(U, 0.5);
  const ScalarField v = [](Vec2 x) { return 1.0 + x[0] - 2.0 * x[1] + x[0] * x[1]; };
  const ScalarField w = [](Vec2 x) { return 2.0 - x[1] + x[0] * x[0]; };
  const VectorField gv = [](Vec2 x) -> Vec2 { return {1.0 + x[1], -2.0 + x[0]}; };
  const VectorField gw = [](Vec2 x) -> Vec2 { return {2.0 * x[0], -1.0}; };
  const QuadratureRule vq = triangle_quadrature(12);
  const QuadratureRule eq = edge_quadrature(12);
  double vol = 0.0, srf = 0.0;
  for (int t = 0; t < static_cast<int>(mesh->n_triangles()); ++t) {
    const auto& map = mesh->map(t);
    const Vec2 cent = mesh->centroid(t);
    for (std::size_t q = 0; q < vq.size(); ++q) {
      const Vec2 x = map.to_physical(vq.points[q]);
      const Vec2 b = vel->beta(x, &cent);
      const double divb = 2.0 * (vel->mu(x, &cent) - vel->eps());  // div beta = lap U
      vol += vq.weights[q] * std::abs(map.detJ) *
             (dot(b, gv(x)) * w(x) + dot(b, gw(x)) * v(x) + divb * v(x) * w(x));
    }
  }
  for (const auto& edge : mesh->edges) {
    if (!edge.is_boundary()) continue;
    const Vec2 a = mesh->vertices[edge.v0], b = mesh->vertices[edge.v1];
    const Vec2 cl = mesh->centroid(edge.left);
    for (std::size_t q = 0; q < eq.size(); ++q) {
      const Vec2 x = a + eq.points[q][0] * (b - a);
      srf += eq.weights[q] * edge.length * dot(vel->beta(x, &cl), edge.normal) * v(x) * w(x);
    }
  }
  CHECK(std::abs(vol - srf) < 1e-12);
}

TEST_CASE("solve: identity system") {
  SparseSystem sys;
  sys.degree = 0;
  sys.matrix.resize(2, 2);
  sys.matrix.setIdentity();
  sys.rhs = Eigen::Vector2d(1.0, 0.0);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(1));
  const DGField g = solve(sys, mesh);
  CHECK(g.coeffs()[0] == 1.0);
  CHECK(g.coeffs()[1] == 0.0);
}

TEST_CASE("solve matches a dense factorization oracle on a tiny mesh") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(2));
  for (int k : {1, 2}) {
    TransportProblem prob;
    prob.velocity = std::make_shared<AnalyticVelocityField>(c.grad_u, c.lap_u, 1e-2);
    prob.gamma0 = c.gamma;
    prob.degree = k;
    const SparseSystem sys = assemble(prob, *mesh);
    SolveStats stats;
    const DGField g = solve(sys, mesh, 1e-10, &stats);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
    const Eigen::VectorXd oracle = Eigen::FullPivLU<Eigen::MatrixXd>(dense).solve(sys.rhs);
    CHECK((g.coeffs() - oracle).lpNorm<Eigen::Infinity>() <
          1e-10 * std::max(1.0, oracle.lpNorm<Eigen::Infinity>()));
    CHECK(stats.iterations == 0);  // direct path
    CHECK(stats.residual <= 1e-10);
  }
}

TEST_CASE("case 1 reconstruction value at the center") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(24));
  TransportProblem prob;
  prob.velocity = std::make_shared<AnalyticVelocityField>(c.grad_u, c.lap_u, 1e-3);
  prob.gamma0 = c.gamma;
  prob.degree = 2;
  const SparseSystem sys = assemble(prob, *mesh);
  const DGField g = solve(sys, mesh);
  CHECK(std::abs(g.eval({0.5, 0.5}) - std::exp(0.5)) < 2e-3);
}

TEST_CASE("insufficient quadrature degree is rejected") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(2));
  TransportProblem prob;
  prob.velocity = std::make_shared<AnalyticVelocityField>(c.grad_u, c.lap_u, 1e-2);
  prob.gamma0 = c.gamma;
  prob.degree = 2;
  prob.quadrature_degree = 1;
  CHECK_THROWS_AS(assemble(prob, *mesh), std::invalid_argument);
}

TEST_CASE("singular system raises solver_error") {
  SparseSystem sys;
  sys.degree = 0;
  sys.matrix.resize(2, 2);
  std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.rhs = Eigen::Vector2d(1.0, 0.0);  // inconsistent
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(1));
  CHECK_THROWS_AS(solve(sys, mesh), solver_error);
}

TEST_CASE("matrix market dump") {
  const auto c = manufactured_case(1);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(1));
  TransportProblem prob;
  prob.velocity = constant_beta(1.0, 0.0, 1e-2);
  prob.gamma0 = c.gamma;
  prob.degree = 0;
  const SparseSystem sys = assemble(prob, *mesh);
  const std::string path = "system.mtx";
  write_matrix_market(sys, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  int rows = 0, cols = 0, nnz = 0;
  is >> rows >> cols >> nnz;
  CHECK(rows == 2);
  CHECK(cols == 2);
  CHECK(nnz == static_cast<int>(sys.matrix.nonZeros()));
  // entries are 1-based and match the matrix
  double worst = 0.0;
  for (int i = 0; i < nnz; ++i) {
    int r = 0, cidx = 0;
    double v = 0.0;
    is >> r >> cidx >> v;
    worst = std::max(worst, std::abs(sys.matrix.coeff(r - 1, cidx - 1) - v));
  }
  CHECK(worst < 1e-12);
  std::remove(path.c_str());
}
