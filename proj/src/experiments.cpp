#include "ieti/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <utility>

#include "ieti/adaptivity.hpp"
#include "ieti/assembly.hpp"
#include "ieti/coupling.hpp"
#include "ieti/ieti.hpp"
#include "ieti/precond.hpp"
#include "ieti/space.hpp"
#include "ieti/splines.hpp"
#include "ieti/topology.hpp"

namespace ieti {

namespace {

bool parse_consistency(const nlohmann::json& value) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "on") return true;
    if (s == "off") return false;
  }
  throw InvalidConfig("consistency must be a boolean or \"on\"/\"off\"");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidConfig("config must be a JSON object");
  ExperimentConfig cfg = std::move(base);
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "experiment") {
        cfg.experiment = value.get<std::string>();
      } else if (key == "p") {
        cfg.p = value.get<int>();
      } else if (key == "refine") {
        cfg.refine = value.get<int>();
      } else if (key == "disparity") {
        cfg.disparity = value.get<int>();
      } else if (key == "pattern") {
        cfg.pattern = value.get<std::string>();
      } else if (key == "precond") {
        cfg.precond = value.get<std::string>();
      } else if (key == "tol") {
        cfg.tol = value.get<double>();
      } else if (key == "theta") {
        cfg.theta = value.get<double>();
      } else if (key == "consistency") {
        cfg.consistency = parse_consistency(value);
      } else if (key == "radii") {
        if (!value.is_array() || value.size() != 2)
          throw InvalidConfig("radii must be an array of two numbers");
        cfg.radii = {{value[0].get<double>(), value[1].get<double>()}};
      } else if (key == "out") {
        cfg.out = value.get<std::string>();
      } else if (key == "dof_ceiling") {
        cfg.dof_ceiling = value.get<long long>();
      } else {
        throw InvalidConfig("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("config field has the wrong type: ") + e.what());
  }
  return cfg;
}

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (c.experiment != "checkerboard" && c.experiment != "adaptive" && c.experiment != "single")
    fail("experiment must be checkerboard, adaptive, or single (got '" + c.experiment + "')");
  if (c.pattern != "good-checkerboard" && c.pattern != "bad-checkerboard" &&
      c.pattern != "uniform")
    fail("pattern must be good-checkerboard, bad-checkerboard, or uniform (got '" + c.pattern +
         "')");
  if (c.precond != "selection" && c.precond != "deluxe" && c.precond != "none")
    fail("precond must be selection, deluxe, or none (got '" + c.precond + "')");
  if (c.p < 1) fail("spline degree must be at least 1");
  if ((c.experiment == "checkerboard" || c.experiment == "single") && c.p < 2)
    fail("checkerboard experiments need spline degree at least 2");
  if (c.refine < 0) fail("refine must be non-negative");
  if (c.disparity < 0) fail("disparity must be non-negative");
  if (!(c.tol > 0.0 && c.tol < 1.0)) fail("tol must lie strictly between 0 and 1");
  if (!(c.theta > 0.0 && c.theta <= 1.0)) fail("theta must lie in (0, 1]");
  if (!(c.radii[0] > 0.0 && c.radii[1] > c.radii[0]))
    fail("radii must satisfy 0 < inner < outer");
  if (c.dof_ceiling <= 0) fail("dof_ceiling must be positive");
}

std::vector<Patch> annulus_grid(int degree, int rows, int cols, double r_in, double r_out) {
  const double pi = 3.14159265358979323846;
  const KnotVector kv = KnotVector::uniform(degree, degree + 1);
  std::vector<Patch> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double r0 = r_in + (r_out - r_in) * static_cast<double>(i) / rows;
      const double r1 = r_in + (r_out - r_in) * static_cast<double>(i + 1) / rows;
      const double t0 = 0.5 * pi * static_cast<double>(j) / cols;
      const double t1 = 0.5 * pi * static_cast<double>(j + 1) / cols;
      out.push_back(Patch{make_annulus_sector({0.0, 0.0}, r0, r1, t0, t1), kv, kv, 1.0, 0, -1});
    }
  return out;
}

std::vector<Patch> checkerboard_patches(int degree, const std::string& pattern, int base,
                                        int extra, double r_in, double r_out) {
  std::vector<Patch> out = annulus_grid(degree, 4, 4, r_in, r_out);
  const bool uniform = pattern == "uniform";
  const bool refine_orange = pattern == "bad-checkerboard";
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      Patch& patch = out[static_cast<std::size_t>(j) * 4 + i];
      const bool orange = (i + j) % 2 == 0;
      patch.nu = (!uniform && orange) ? 1000.0 : 1.0;
      const int level = base + (orange == refine_orange ? extra : 0);
      for (int r = 0; r < level; ++r) {
        patch.kv1 = dyadic_refine(patch.kv1);
        patch.kv2 = dyadic_refine(patch.kv2);
      }
      patch.level = level;
    }
  return out;
}

std::vector<Patch> adaptive_patches(int degree, double r_in, double r_out, double nu_corner) {
  std::vector<Patch> out = annulus_grid(degree, 2, 2, r_in, r_out);
  out[0].nu = nu_corner;
  return out;
}

namespace {

double unit_load(double, double) { return 1.0; }

constexpr int kMaxIterations = 2000;

// Topology, couplings, and layouts of a configuration: everything needed to
// count DOFs (for the budget check) before committing to assembly.
struct Analyzed {
  MultiPatchTopology topo;
  std::vector<InterfaceCoupling> couplings;
  std::vector<DofLayout> layouts;
  long long dofs = 0;
};

Analyzed analyze(std::vector<Patch> patches) {
  Analyzed a;
  a.topo = build_topology(std::move(patches));
  a.couplings = order_interfaces(a.topo);
  a.layouts = build_layouts(a.topo);
  for (const DofLayout& layout : a.layouts) a.dofs += static_cast<long long>(layout.n_total);
  return a;
}

struct Solved {
  ResultRow row;
  SolveReport report;
  std::vector<Vector> solution;  // per-patch reduced coefficients; empty when skipped
  Analyzed parts;
};

Solved solve_cell(std::vector<Patch> patches, const ExperimentConfig& config, int label,
                  bool keep_solution) {
  Solved s;
  s.parts = analyze(std::move(patches));
  s.row.p = config.p;
  s.row.level = label;
  s.row.patches = static_cast<int>(s.parts.topo.patches.size());
  s.row.dofs = s.parts.dofs;
  if (s.parts.dofs > config.dof_ceiling) {
    s.row.skipped = true;
    return s;
  }

  ConstraintSystem cs = build_constraints(s.parts.topo, s.parts.couplings, s.parts.layouts);
  std::vector<PatchSystem> systems = assemble_systems(s.parts.topo, s.parts.layouts, unit_load);
  IetiOperator op(s.parts.topo, s.parts.layouts, s.parts.couplings, std::move(cs),
                  std::move(systems));

  LinearOperator apply_precond;
  if (config.precond == "selection") {
    const auto scaling =
        std::make_shared<const SelectionScaling>(build_selection_scaling(op.constraints()));
    const auto schurs = std::make_shared<const std::vector<SkeletonSchur>>(
        build_skeleton_schur(op.systems(), s.parts.layouts));
    apply_precond = [&op, scaling, schurs](const Vector& mu) {
      return apply_scaled_dirichlet(op.constraints(), *schurs, *scaling, mu);
    };
  } else if (config.precond == "deluxe") {
    const auto blocks = std::make_shared<const DeluxeEdgeBlocks>(
        build_deluxe_blocks(s.parts.couplings, s.parts.layouts, op.constraints(), op.systems()));
    apply_precond = [blocks](const Vector& mu) { return apply_deluxe(*blocks, mu); };
  } else {
    apply_precond = [](const Vector& mu) { return mu; };
  }

  const Vector d = op.compute_rhs();
  auto [lambda, report] =
      pcg([&op](const Vector& x) { return op.apply_F(x); }, apply_precond, d, config.tol,
          kMaxIterations);
  if (report.status != SolveStatus::Converged)
    throw ExperimentError("PCG exceeded " + std::to_string(kMaxIterations) +
                          " iterations on the level " + std::to_string(label) +
                          " configuration (" + std::to_string(s.parts.dofs) + " DOFs)");
  s.row.iterations = report.iterations;
  s.row.kappa = report.kappa;
  s.report = std::move(report);
  if (keep_solution) s.solution = op.reconstruct_solution(lambda);
  return s;
}

}  // namespace

std::vector<ResultRow> run_checkerboard(const ExperimentConfig& config) {
  validate(config);
  // Default sweep: one row per base level 1..refine, the refined colour
  // `disparity` levels ahead. Uniform diffusion with disparity >= 1 sweeps
  // the level gap 1..disparity instead, holding the base level at `refine`.
  const bool gap_sweep = config.pattern == "uniform" && config.disparity >= 1;
  const int n_rows = gap_sweep ? config.disparity : config.refine;
  std::vector<ResultRow> rows;
  rows.reserve(static_cast<std::size_t>(std::max(n_rows, 0)));
  for (int v = 1; v <= n_rows; ++v) {
    const int base = gap_sweep ? config.refine : v;
    const int extra = gap_sweep ? v : config.disparity;
    Solved s = solve_cell(checkerboard_patches(config.p, config.pattern, base, extra,
                                               config.radii[0], config.radii[1]),
                          config, v, false);
    rows.push_back(s.row);
  }
  return rows;
}

std::vector<AdaptiveRound> run_adaptive_detailed(const ExperimentConfig& config) {
  validate(config);
  std::vector<AdaptiveRound> rounds;
  std::vector<Patch> patches = adaptive_patches(config.p, config.radii[0], config.radii[1]);
  for (int round = 1; round <= config.refine; ++round) {
    Solved s = solve_cell(patches, config, round, true);
    AdaptiveRound rec;
    rec.row = s.row;
    if (s.row.skipped) {
      rounds.push_back(rec);
      break;
    }
    const EstimatorReport est =
        estimate(s.parts.topo, s.parts.couplings, s.parts.layouts, s.solution, unit_load);
    rec.eta = std::sqrt(est.total);
    if (round < config.refine) {
      const std::vector<int> marked = doerfler_mark(est, config.theta);
      rec.marked = static_cast<int>(marked.size());
      patches = apply_splits(patches, marked);
      rec.consistency_extra = consistency_split(patches, 20, config.consistency);
    }
    rounds.push_back(rec);
  }
  return rounds;
}

std::vector<ResultRow> run_adaptive(const ExperimentConfig& config) {
  std::vector<ResultRow> rows;
  for (const AdaptiveRound& r : run_adaptive_detailed(config)) rows.push_back(r.row);
  return rows;
}

ResultRow run_single(const ExperimentConfig& config, SolveReport* report) {
  validate(config);
  Solved s = solve_cell(checkerboard_patches(config.p, config.pattern, config.refine,
                                             config.disparity, config.radii[0], config.radii[1]),
                        config, config.refine, false);
  if (report != nullptr && !s.row.skipped) *report = s.report;
  return s.row;
}

std::vector<ResultRow> run(const ExperimentConfig& config) {
  validate(config);
  if (config.experiment == "checkerboard") return run_checkerboard(config);
  if (config.experiment == "adaptive") return run_adaptive(config);
  return {run_single(config)};
}

std::string format_kappa(double kappa) {
  char buf[64];
  if (kappa < 1000.0) {
    std::snprintf(buf, sizeof buf, "%.4g", kappa);
  } else {
    int e = static_cast<int>(std::floor(std::log10(kappa)));
    double m = kappa / std::pow(10.0, e);
    if (m >= 9.95) {
      m = 1.0;
      ++e;
    }
    std::snprintf(buf, sizeof buf, "%.1fe%d", m, e);
  }
  return buf;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "p,level,patches,dofs,iterations,kappa\n";
  char buf[128];
  for (const ResultRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%lld,", r.p, r.level, r.patches, r.dofs);
    out += buf;
    if (r.skipped) {
      out += "SkippedOverBudget,SkippedOverBudget\n";
    } else {
      out += std::to_string(r.iterations);
      out += ',';
      out += format_kappa(r.kappa);
      out += '\n';
    }
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << to_csv(rows);
  file.flush();
  if (!file) throw IoError("writing '" + path + "' failed");
}

void emit_history(const SolveReport& report, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << "iteration,residual\n";
  char buf[64];
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, report.residual_history[i]);
    file << buf;
  }
  file.flush();
  if (!file) throw IoError("writing '" + path + "' failed");
}

std::string render_table(const std::vector<ResultRow>& rows) {
  const std::array<std::string, 6> header{
      {"p", "level", "patches", "dofs", "iterations", "kappa"}};
  std::vector<std::array<std::string, 6>> cells;
  cells.reserve(rows.size());
  for (const ResultRow& r : rows) {
    cells.push_back({{std::to_string(r.p), std::to_string(r.level), std::to_string(r.patches),
                      std::to_string(r.dofs),
                      r.skipped ? std::string("SkippedOverBudget") : std::to_string(r.iterations),
                      r.skipped ? std::string("SkippedOverBudget") : format_kappa(r.kappa)}});
  }
  std::array<std::size_t, 6> width{};
  for (std::size_t c = 0; c < 6; ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  const auto append_row = [&](const std::array<std::string, 6>& row) {
    for (std::size_t c = 0; c < 6; ++c) {
      if (c > 0) out += "  ";
      out.append(width[c] - row[c].size(), ' ');
      out += row[c];
    }
    out += '\n';
  };
  append_row(header);
  for (const auto& row : cells) append_row(row);
  return out;
}

}  // namespace ieti
