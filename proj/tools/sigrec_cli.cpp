#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sigrec/sigrec.hpp"

namespace {

int cmd_run(const sigrec::RunConfig& cfg) {
  using namespace sigrec;
  const ReconstructionReport rep = reconstruct(cfg);

  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path out(cfg.out);
  {
    std::ofstream os(out / "run.csv");
    os << csv_header() << "\n" << csv_row(rep) << "\n";
  }
  write_dg_csv(*rep.gamma, (out / "gamma.csv").string());
  write_dg_csv(*rep.sigma, (out / "sigma.csv").string());
  write_field_vtk(*rep.gamma, "gamma", (out / "gamma.vtk").string());
  write_field_vtk(*rep.sigma, "sigma", (out / "sigma.vtk").string());
  write_mesh_vtk(rep.gamma->mesh(), (out / "mesh.vtk").string());

  std::cout << "example " << cfg.example << "  n " << cfg.n << "  data_n " << cfg.effective_data_n()
            << "  k " << cfg.k << "  k0 " << cfg.k0 << "  eps " << cfg.eps << "  delta "
            << cfg.delta << "\n";
  std::cout << "  Error  = " << rep.error_half << "\n";
  std::cout << "  RError = " << rep.rerror << "\n";
  std::cout << "  data rel err = " << rep.data_rel_err
            << "  inflow/outflow separation = " << rep.separation_distance << "\n";
  std::cout << "  assembly " << rep.assembly_ms << " ms, solve " << rep.solve_ms << " ms, "
            << rep.solver_iterations << " iterations\n";
  for (const auto& w : rep.warnings) std::cout << "  warning: " << w << "\n";
  std::cout << "  outputs in " << out.string() << "/\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
  using namespace sigrec;
  SweepGrid grid = parse_sweep_file(config_path);
  if (!out_dir.empty()) grid.base.out = out_dir;
  std::filesystem::create_directories(grid.base.out);
  const std::filesystem::path out(grid.base.out);

  const std::vector<SweepRow> rows = run_sweep(grid);
  {
    std::ofstream os(out / "sweep.csv");
    os << csv_header() << "\n";
    for (const auto& r : rows) {
      if (r.ok) {
        os << csv_row(r.report) << "\n";
      } else {
        os << "# failed: example " << r.config.example << " eps " << r.config.eps << " delta "
           << r.config.delta << ": " << r.error << "\n";
      }
    }
  }
  const auto fits = fit_sweep_slopes(rows);
  write_slopes_csv(fits, (out / "slopes.csv").string());
  write_sweep_svg(rows, "error_half", (out / "error_half.svg").string());
  write_sweep_svg(rows, "rerror", (out / "rerror.svg").string());

  int failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  std::cout << rows.size() << " runs (" << failed << " failed), outputs in " << out.string()
            << "/\n";
  for (const auto& f : fits)
    std::cout << "  " << f.series << " " << f.metric << ": slope " << f.slope << " (R^2 " << f.r2
              << ", " << f.points << " pts)\n";
  return 0;
}

int cmd_verify() {
  const auto results = sigrec::run_property_suite();
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail << "]\n";
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conductivity reconstruction from interior data via transport DG"};
  app.require_subcommand(1);

  sigrec::RunConfig cfg;
  std::string config_path, sweep_out;

  CLI::App* run = app.add_subcommand("run", "single reconstruction");
  run->add_option("--example", cfg.example, "benchmark case {1|2|3|4}")->check(CLI::Range(1, 4));
  run->add_option("--n", cfg.n, "reconstruction mesh subdivisions");
  run->add_option("--data-n", cfg.data_n, "measurement mesh subdivisions (default: n)");
  run->add_option("--k", cfg.k, "reconstruction degree");
  run->add_option("--k0", cfg.k0, "data degree");
  run->add_option("--eps", cfg.eps, "regularization parameter");
  run->add_option("--delta", cfg.delta, "relative noise level");
  run->add_option("--seed", cfg.seed, "noise seed");
  run->add_option("--penalty", cfg.penalty, "DG jump penalty");
  run->add_option("--tol", cfg.tol, "solver relative residual tolerance");
  run->add_option("--out", cfg.out, "output directory");
  run->add_option("--config", config_path, "key = value config file (flags override)");

  CLI::App* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
  sweep->add_option("--config", config_path, "sweep config file")->required();
  sweep->add_option("--out", sweep_out, "output directory (overrides config)");

  app.add_subcommand("verify", "run the property suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!config_path.empty()) {
        // start from the file, explicit flags win
        sigrec::RunConfig merged = sigrec::parse_config_file(config_path);
        if (run->count("--example")) merged.example = cfg.example;
        if (run->count("--n")) merged.n = cfg.n;
        if (run->count("--data-n")) merged.data_n = cfg.data_n;
        if (run->count("--k")) merged.k = cfg.k;
        if (run->count("--k0")) merged.k0 = cfg.k0;
        if (run->count("--eps")) merged.eps = cfg.eps;
        if (run->count("--delta")) merged.delta = cfg.delta;
        if (run->count("--seed")) merged.seed = cfg.seed;
        if (run->count("--penalty")) merged.penalty = cfg.penalty;
        if (run->count("--tol")) merged.tol = cfg.tol;
        if (run->count("--out")) merged.out = cfg.out;
        return cmd_run(merged);
      }
      return cmd_run(cfg);
    }
    if (sweep->parsed()) return cmd_sweep(config_path, sweep_out);
    return cmd_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
