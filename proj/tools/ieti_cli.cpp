#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ieti/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ieti::IoError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

// Flag targets; whether a flag was actually passed is read back off the
// subcommand, so config-file values survive unless overridden.
struct Flags {
  std::string config_path;
  int p = 0;
  int refine = 0;
  int disparity = 0;
  std::string pattern;
  std::string precond;
  double tol = 0.0;
  double theta = 0.0;
  std::string consistency;
  std::vector<double> radii;
  std::string out;
  long long dof_ceiling = 0;
  std::string history;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file (same keys as the flags below)");
  sub->add_option("--p", f.p, "spline degree");
  sub->add_option("--refine", f.refine, "refinement levels to sweep, or adaptive rounds");
  sub->add_option("--disparity", f.disparity, "extra levels on the refined colour");
  sub->add_option("--pattern", f.pattern, "checkerboard diffusion/refinement pattern")
      ->check(CLI::IsMember({"good-checkerboard", "bad-checkerboard", "uniform"}));
  sub->add_option("--precond", f.precond, "interface preconditioner")
      ->check(CLI::IsMember({"selection", "deluxe", "none"}));
  sub->add_option("--tol", f.tol, "PCG relative residual reduction");
  sub->add_option("--theta", f.theta, "bulk marking parameter");
  sub->add_option("--consistency", f.consistency, "repair diffusion-ordering violations")
      ->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--radii", f.radii, "inner and outer annulus radius")->expected(2);
  sub->add_option("--out", f.out, "write the report as CSV to this path");
  sub->add_option("--dof_ceiling", f.dof_ceiling, "skip configurations above this DOF count");
}

ieti::ExperimentConfig merge(const CLI::App* sub, const Flags& f, ieti::ExperimentConfig base) {
  if (!f.config_path.empty()) base = ieti::parse_config(read_file(f.config_path), base);
  if (sub->count("--p") > 0) base.p = f.p;
  if (sub->count("--refine") > 0) base.refine = f.refine;
  if (sub->count("--disparity") > 0) base.disparity = f.disparity;
  if (sub->count("--pattern") > 0) base.pattern = f.pattern;
  if (sub->count("--precond") > 0) base.precond = f.precond;
  if (sub->count("--tol") > 0) base.tol = f.tol;
  if (sub->count("--theta") > 0) base.theta = f.theta;
  if (sub->count("--consistency") > 0) base.consistency = f.consistency == "on";
  if (sub->count("--radii") > 0) base.radii = {{f.radii[0], f.radii[1]}};
  if (sub->count("--out") > 0) base.out = f.out;
  if (sub->count("--dof_ceiling") > 0) base.dof_ceiling = f.dof_ceiling;
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-primal IETI experiments on multi-patch spline discretizations"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* checkerboard = app.add_subcommand(
      "checkerboard", "Sweep refinement levels on the 4x4 quarter-annulus checkerboard");
  CLI::App* adaptive = app.add_subcommand(
      "adaptive", "Adaptive solve/estimate/split rounds on the 2x2 quarter annulus");
  CLI::App* single =
      app.add_subcommand("single", "Solve one checkerboard configuration and report it");
  for (CLI::App* sub : {checkerboard, adaptive, single}) add_common(sub, f);
  single->add_option("--history", f.history, "write per-iteration residuals to this CSV");
  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    ieti::ExperimentConfig base;
    base.experiment = sub->get_name();
    if (sub == adaptive) {
      base.refine = 8;
      base.tol = 1e-10;
    }
    ieti::ExperimentConfig config = merge(sub, f, base);
    config.experiment = sub->get_name();

    std::vector<ieti::ResultRow> rows;
    if (config.experiment == "single") {
      ieti::SolveReport report;
      rows = {ieti::run_single(config, &report)};
      if (sub->count("--history") > 0) ieti::emit_history(report, f.history);
    } else {
      rows = ieti::run(config);
    }
    std::cout << ieti::render_table(rows);
    if (!config.out.empty()) ieti::emit_csv(rows, config.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
