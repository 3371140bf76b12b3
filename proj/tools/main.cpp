#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "stablescat/capacity.hpp"
#include "stablescat/config.hpp"
#include "stablescat/errors.hpp"
#include "stablescat/experiment.hpp"
#include "stablescat/selftest.hpp"
#include "stablescat/spectral.hpp"

using namespace stablescat;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

std::string svg_path(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv + ".svg";
  return csv.substr(0, dot) + ".svg";
}

int cmd_run(const std::string& path, std::string csv_override, bool plot) {
  const auto cfg = load_config(path);
  const auto res = run_experiment(cfg);
  const std::string out = csv_override.empty() ? cfg.output.csv : csv_override;
  if (out.empty() || out == "-") {
    std::cout << res.csv;
  } else {
    write_file(out, res.csv);
    std::cerr << "wrote " << out << "\n";
  }
  if ((plot || cfg.output.plot) && !out.empty() && out != "-") {
    const auto svg = svg_path(out);
    write_file(svg, render_svg(res.table, sweep_kind_name(cfg.sweep) + " " + path));
    std::cerr << "wrote " << svg << "\n";
  }
  for (const auto& f : res.failures) std::cerr << "oracle check failed: " << f << "\n";
  return res.ok() ? 0 : 3;
}

int cmd_selftest(std::uint64_t seed, double factor) {
  SelftestOptions opt;
  opt.seed = seed;
  opt.c_levy_factor = factor;
  const auto rep = run_selftest(opt);
  for (const auto& c : rep.checks)
    std::printf("%s  %-34s %7.2fs  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.seconds, c.detail.c_str());
  if (!rep.passed()) {
    std::printf("failed:");
    for (const auto& c : rep.checks)
      if (!c.passed) std::printf(" [%s]", c.name.c_str());
    std::printf("\n");
    return 3;
  }
  std::printf("all checks passed\n");
  return 0;
}

int cmd_capacity(const std::string& spec, int d, double alpha, std::vector<int> cells, int paths, std::uint64_t seed) {
  const auto m = make_model(d, alpha);
  const auto k = parse_compact_set(spec, d);
  std::printf("method,cells,cap,residual_or_stderr,bias_bound\n");
  const auto ex = capacity_extrapolated(m, k, cells);
  for (std::size_t i = 0; i < ex.levels.size(); ++i)
    std::printf("equilibrium,%d,%.10g,%.10g,nan\n", cells[i], ex.levels[i].cap, ex.levels[i].residual);
  std::printf("extrapolated,inf,%.10g,%.10g,nan\n", ex.cap, ex.spread);
  if (paths > 0) {
    HittingOptions ho;
    ho.n_paths = paths;
    ho.seed = seed;
    const auto mc = capacity_hitting_mc(m, k, ho);
    std::printf("hitting_mc,nan,%.10g,%.10g,%.10g\n", mc.cap, mc.stderr_, mc.bias_bound);
  }
  return 0;
}

int cmd_spectrum(const std::string& path) {
  const auto cfg = load_config(path);
  AssemblyOptions opt;
  opt.levy_prefactor = cfg.spectral.levy_prefactor;
  const auto sys = assemble(cfg.model, CubeSpec{cfg.spectral.side, {}}, cfg.potential, cfg.jump, cfg.spectral.boundary,
                            cfg.spectral.n_cells, 1.0, 1.0, opt);
  const auto e = lambda1(sys);
  std::printf("n_cells,unknowns,lambda1,residual,iterations\n%d,%ld,%.10g,%.3g,%d\n", cfg.spectral.n_cells,
              long(sys.size()), e.value, e.residual, e.iterations);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering lengths, capacities and spectral bottoms for isotropic stable processes"};
  app.require_subcommand(1);
  app.footer("Worker threads: STABLESCAT_WORKERS (results do not depend on it).");

  std::string config, csv, spec = "ball:1";
  bool plot = false;
  std::uint64_t seed = 1;
  double factor = 1.0, alpha = 1.0;
  int d = 3, paths = 20000;
  std::vector<int> cells{14, 18};

  auto* run = app.add_subcommand("run", "Run the sweep of a config file and write its CSV");
  run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--csv", csv, "Output path, overrides output.csv; '-' for stdout");
  run->add_flag("--plot", plot, "Also write an SVG next to the CSV");

  auto* self = app.add_subcommand("selftest", "Run the invariant suite at reduced sample sizes");
  self->add_option("--seed", seed, "Seed");
  self->add_option("--corrupt-c-levy", factor, "Multiply c_levy by this factor (fault injection)");

  auto* cap = app.add_subcommand("capacity", "Riesz capacity of a compact set, e.g. ball:1, cube:2, balls:0,0,0,1;3,0,0,1");
  cap->add_option("set", spec, "Set spec")->required();
  cap->add_option("-d,--dim", d, "Dimension")->check(CLI::Range(1, 4));
  cap->add_option("-a,--alpha", alpha, "Stability index");
  cap->add_option("--cells", cells, "Lattice sizes for the extrapolation")->delimiter(',');
  cap->add_option("--paths", paths, "Hitting Monte Carlo paths, 0 to skip");
  cap->add_option("--seed", seed, "Seed");

  auto* spec_cmd = app.add_subcommand("spectrum", "Bottom of the spectrum on the cube of a config");
  spec_cmd->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, csv, plot);
    if (*self) return cmd_selftest(seed, factor);
    if (*cap) return cmd_capacity(spec, d, alpha, cells, paths, seed);
    if (*spec_cmd) return cmd_spectrum(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
