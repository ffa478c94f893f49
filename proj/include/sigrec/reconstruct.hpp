#ifndef SIGREC_RECONSTRUCT_HPP
#define SIGREC_RECONSTRUCT_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sigrec/cases.hpp"
#include "sigrec/dg_field.hpp"
#include "sigrec/elliptic.hpp"
#include "sigrec/measurement.hpp"
#include "sigrec/metrics.hpp"
#include "sigrec/transport.hpp"

namespace sigrec {

struct RunConfig {
  int example = 1;
  int n = 48;        // reconstruction mesh subdivisions
  int data_n = -1;   // measurement mesh subdivisions (-1: same as n)
  int k = 3;         // reconstruction degree
  int k0 = 3;        // data degree
  double eps = 1e-3;
  double delta = 0.0;
  std::uint64_t seed = 1;
  double penalty = 100.0;
  double tol = 1e-10;
  std::string out = "out";

  int effective_data_n() const { return data_n > 0 ? data_n : n; }

  void validate() const {
    if (example < 1 || example > 4) throw std::invalid_argument("config: example must be 1..4");
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (data_n == 0 || data_n < -1) throw std::invalid_argument("config: data_n must be >= 1");
    if (k < 0 || k > kMaxBasisDegree) throw std::invalid_argument("config: k out of range [0,6]");
    if (k0 < 0 || k0 > kMaxBasisDegree) throw std::invalid_argument("config: k0 out of range [0,6]");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("config: eps must lie in (0,1)");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("config: delta must lie in [0,1)");
    if (!(penalty > 0.0)) throw std::invalid_argument("config: penalty must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
  }
};

struct ReconstructionReport {
  RunConfig config;
  std::shared_ptr<DGField> gamma;  // recovered sqrt(sigma)
  std::shared_ptr<DGField> sigma;  // gamma^2 on the degree-min(2k,6) nodal lattice
  double error_half = 0.0;
  double rerror = 0.0;
  double data_rel_err = 0.0;       // achieved relative L2 data perturbation
  double separation_distance = 0.0;
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
  int solver_iterations = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline int case4_generation_n(int data_n) {
  // nearest multiple of 8 to 2*data_n keeps the sigma jump edge-aligned
  const int g = 8 * static_cast<int>(std::lround(2.0 * data_n / 8.0));
  return std::max(8, g);
}

}  // namespace detail

// Data stage -> transport solve -> sigma_h = gamma_h^2 and both error metrics.
inline ReconstructionReport reconstruct(const RunConfig& config) {
  config.validate();
  ReconstructionReport rep;
  rep.config = config;
  const ManufacturedCase c = manufactured_case(config.example);
  if (config.k0 < 2)
    rep.warnings.push_back("k0 < 2: element Laplacian vanishes, reconstruction will be poor");

  auto recon_mesh = std::make_shared<const Mesh>(build_structured_mesh(config.n));

  // --- data stage ---
  std::shared_ptr<const VelocityField> velocity;
  try {
    const bool exact_data = c.has_closed_form_u && !c.data_from_elliptic && config.delta == 0.0;
    if (exact_data) {
      velocity = std::make_shared<AnalyticVelocityField>(c.grad_u, c.lap_u, config.eps);
      rep.data_rel_err = 0.0;
    } else {
      const int dn = config.effective_data_n();
      auto data_mesh = std::make_shared<const Mesh>(build_structured_mesh(dn));
      ScalarField u_clean;
      if (c.data_from_elliptic) {
        const int gen_n = config.example == 4 ? detail::case4_generation_n(dn) : 2 * dn;
        const int gen_p = std::min(config.k0 + 2, kMaxBasisDegree);
        auto gen_mesh = std::make_shared<const Mesh>(build_structured_mesh(gen_n));
        auto fine = std::make_shared<EllipticSolution>(
            solve_elliptic(c.sigma, c.g, gen_mesh, gen_p));
        u_clean = [fine](Vec2 x) { return fine->eval(x); };
      } else {
        u_clean = c.u;
      }
      auto U = std::make_shared<DGField>(
          add_noise(project_to_dg(u_clean, data_mesh, config.k0), config.delta, config.seed));
      if (config.delta > 0.0) {
        const double unorm = l2_norm(u_clean, *data_mesh);
        const double dnorm =
            l2_norm([&](Vec2 x) { return U->eval(x) - u_clean(x); }, *data_mesh);
        rep.data_rel_err = unorm > 0 ? dnorm / unorm : 0.0;
      }
      velocity = derive_fields(U, config.eps);
    }
  } catch (const std::exception& e) {
    throw data_error(std::string("data stage: ") + e.what());
  }

  // --- boundary classification on the reconstruction mesh ---
  const auto cls = classify_boundary(
      *recon_mesh, [&](Vec2 x) { return velocity->beta(x, nullptr); });
  rep.separation_distance = cls.separation_distance;

  // --- transport solve ---
  TransportProblem problem;
  problem.velocity = velocity;
  problem.gamma0 = c.gamma;  // exact sqrt(sigma) trace on the boundary
  problem.penalty = config.penalty;
  problem.degree = config.k;

  const auto t0 = std::chrono::steady_clock::now();
  SparseSystem sys;
  try {
    sys = assemble(problem, *recon_mesh);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("assembly stage: ") + e.what());
  }
  const auto t1 = std::chrono::steady_clock::now();
  SolveStats stats;
  std::shared_ptr<DGField> gamma;
  try {
    gamma = std::make_shared<DGField>(solve(sys, recon_mesh, config.tol, &stats));
  } catch (const solver_error& e) {
    throw solver_error(std::string("solve stage: ") + e.what(), e.achieved_residual);
  }
  const auto t2 = std::chrono::steady_clock::now();

  rep.assembly_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rep.solve_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  rep.solver_iterations = stats.iterations;
  rep.gamma = gamma;

  // sigma_h = gamma_h^2, represented on the degree-2k nodal lattice
  const int sdeg = std::min(2 * config.k, kMaxBasisDegree);
  auto sigma_h = std::make_shared<DGField>(recon_mesh, sdeg);
  for (int t = 0; t < static_cast<int>(recon_mesh->n_triangles()); ++t) {
    auto cs = sigma_h->element_coeffs(t);
    const auto& nodes = sigma_h->basis().nodes();
    for (int i = 0; i < sigma_h->basis().dim(); ++i) {
      const double gv = gamma->eval_ref(t, nodes[i]);
      cs[i] = gv * gv;
    }
  }
  rep.sigma = sigma_h;

  // --- metrics against the exact gamma ---
  rep.error_half = error_halfnorm(c.gamma, *gamma);
  rep.rerror = rerror(c.gamma, *gamma);
  return rep;
}

// ---- config file: flat `key = value` lines, '#' comments ----

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto as_int = [&] { return std::stoi(value); };
  const auto as_double = [&] { return std::stod(value); };
  if (key == "example") cfg.example = as_int();
  else if (key == "n") cfg.n = as_int();
  else if (key == "data_n") cfg.data_n = as_int();
  else if (key == "k") cfg.k = as_int();
  else if (key == "k0") cfg.k0 = as_int();
  else if (key == "eps") cfg.eps = as_double();
  else if (key == "delta") cfg.delta = as_double();
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
  else if (key == "penalty") cfg.penalty = as_double();
  else if (key == "tol") cfg.tol = as_double();
  else if (key == "out") cfg.out = value;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("parse_config_file: cannot open " + path);
  RunConfig cfg;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      // blank or comment-only line
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("config: malformed line '" + line + "'");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

// ---- CSV row (fixed column order) ----

inline std::string csv_header() {
  return "example,n,data_n,k,k0,eps,delta,seed,penalty,error_half,rerror,data_rel_err,"
         "sep_dist,assembly_ms,solve_ms,solver_iters";
}

inline std::string csv_row(const ReconstructionReport& r) {
  std::ostringstream os;
  os.precision(17);
  const auto& c = r.config;
  os << c.example << ',' << c.n << ',' << c.effective_data_n() << ',' << c.k << ',' << c.k0 << ','
     << c.eps << ',' << c.delta << ',' << c.seed << ',' << c.penalty << ',' << r.error_half << ','
     << r.rerror << ',' << r.data_rel_err << ',' << r.separation_distance << ','
     << r.assembly_ms << ',' << r.solve_ms << ',' << r.solver_iterations;
  return os.str();
}

// Field dump: duplicated corner points carry per-element point data, cell
// data carries centroid values.
inline void write_field_vtk(const DGField& f, const std::string& name, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw data_error("write_field_vtk: cannot open " + path);
  os.precision(12);
  const Mesh& mesh = f.mesh();
  const std::size_t nT = mesh.n_triangles();
  os << "# vtk DataFile Version 3.0\n" << name << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << 3 * nT << " double\n";
  for (std::size_t t = 0; t < nT; ++t)
    for (int i = 0; i < 3; ++i) {
      const Vec2 v = mesh.vertices[mesh.triangles[t].v[i]];
      os << v[0] << " " << v[1] << " 0\n";
    }
  os << "CELLS " << nT << " " << 4 * nT << "\n";
  for (std::size_t t = 0; t < nT; ++t)
    os << "3 " << 3 * t << " " << 3 * t + 1 << " " << 3 * t + 2 << "\n";
  os << "CELL_TYPES " << nT << "\n";
  for (std::size_t t = 0; t < nT; ++t) os << "5\n";
  static const Vec2 corner_refs[3] = {{0, 0}, {1, 0}, {0, 1}};
  os << "POINT_DATA " << 3 * nT << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (std::size_t t = 0; t < nT; ++t)
    for (const auto& r : corner_refs) os << f.eval_ref(static_cast<int>(t), r) << "\n";
  os << "CELL_DATA " << nT << "\nSCALARS " << name << "_centroid double 1\nLOOKUP_TABLE default\n";
  for (std::size_t t = 0; t < nT; ++t)
    os << f.eval_ref(static_cast<int>(t), {1.0 / 3.0, 1.0 / 3.0}) << "\n";
}

}  // namespace sigrec

#endif
