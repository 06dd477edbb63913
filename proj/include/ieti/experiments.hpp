#pragma once
// Experiment drivers around the IETI-DP solver: checkerboard sweeps on a
// quarter annulus, the adaptive refinement loop, JSON run configuration, and
// CSV / table reporting of iteration counts and condition numbers.
#include <array>
#include <string>
#include <vector>

#include "ieti/geometry.hpp"
#include "ieti/krylov.hpp"

namespace ieti {

struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A configuration field is out of range, names an unknown choice, or the
// config document is not a JSON object with known keys.
struct InvalidConfig : ExperimentError {
  using ExperimentError::ExperimentError;
};
// A report file could not be written.
struct IoError : ExperimentError {
  using ExperimentError::ExperimentError;
};

// All knobs of a run. `experiment` selects the driver; the rest parameterize
// the domain, the discretization sweep, the preconditioner, and the stopping
// rule. The checkerboard driver emits one row per refinement level
// 1..refine, each with the refined colour `disparity` extra levels ahead;
// with pattern "uniform" and disparity >= 1 it instead fixes the base level
// at `refine` and sweeps the level gap 1..disparity. The adaptive driver
// runs `refine` solve/estimate/split rounds.
struct ExperimentConfig {
  std::string experiment = "checkerboard";  // checkerboard | adaptive | single
  int p = 2;                                // spline degree
  int refine = 1;                           // sweep depth, or adaptive rounds
  int disparity = 1;       // extra levels on the refined colour (0 = matching)
  std::string pattern = "good-checkerboard";  // also: bad-checkerboard | uniform
  std::string precond = "selection";          // selection | deluxe | none
  double tol = 1e-6;                          // PCG relative residual reduction
  double theta = 0.8;                         // bulk marking parameter
  bool consistency = true;                    // repair diffusion-ordering violations
  std::array<double, 2> radii{{1.0, 2.0}};    // inner/outer annulus radius
  std::string out;                            // CSV path ("" = stdout table only)
  long long dof_ceiling = 2'000'000;          // skip configurations above this
};

// Apply a JSON object with ExperimentConfig field names as keys on top of
// `base`. Unknown keys, wrong types, and malformed documents raise
// InvalidConfig. `consistency` accepts a boolean or the strings "on"/"off".
ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base = {});

// Raise InvalidConfig on out-of-range fields or unknown selector strings.
void validate(const ExperimentConfig& config);

// One line of an experiment report. `level` is the sweep's level (or level
// gap) column for checkerboard runs and the round number for adaptive runs;
// `dofs` counts the surviving per-patch coefficients. A row whose dof count
// exceeds the ceiling is emitted with skipped = true and never solved.
struct ResultRow {
  int p = 0;
  int level = 0;
  int patches = 0;
  long long dofs = 0;
  int iterations = 0;
  double kappa = 0.0;
  bool skipped = false;
};

// Extra per-round detail kept by the adaptive driver: the global error
// estimate of the solved mesh and the splitting decisions taken afterwards
// (zero on the final round, which is solved but not split).
struct AdaptiveRound {
  ResultRow row;
  double eta = 0.0;            // sqrt of the total error estimate
  int marked = 0;              // patches selected by bulk marking
  int consistency_extra = 0;   // additional patches forced by consistency rounds
};

// Domain builders ----------------------------------------------------------

// rows x cols grid of quarter-annulus sectors (radial index fastest), each
// carrying uniform degree-`degree` knots on degree+1 intervals per direction,
// unit diffusion, refinement level 0.
std::vector<Patch> annulus_grid(int degree, int rows, int cols, double r_in, double r_out);

// One 4x4 checkerboard configuration: every patch dyadically refined `base`
// levels, the refined colour `extra` more. Cells with even index sum (the
// corners included) are "orange"; the patterns give them diffusion 1000
// against 1 elsewhere ("uniform": 1 everywhere) and refine the white cells,
// except "bad-checkerboard", which refines the orange cells.
std::vector<Patch> checkerboard_patches(int degree, const std::string& pattern, int base,
                                        int extra, double r_in = 1.0, double r_out = 2.0);

// 2x2 quarter annulus with diffusion `nu_corner` on the inner-radius,
// first-sector patch and 1 elsewhere: the adaptive model problem.
std::vector<Patch> adaptive_patches(int degree, double r_in = 1.0, double r_out = 2.0,
                                    double nu_corner = 1000.0);

// Drivers -------------------------------------------------------------------

// Solve one configuration per sweep row; rows over the dof ceiling are
// emitted as skipped. Unit right-hand side, homogeneous Dirichlet boundary.
std::vector<ResultRow> run_checkerboard(const ExperimentConfig& config);

// Solve / estimate / mark / split for config.refine rounds starting from the
// 2x2 adaptive domain. A round over the dof ceiling emits a skipped row and
// stops the loop.
std::vector<AdaptiveRound> run_adaptive_detailed(const ExperimentConfig& config);
std::vector<ResultRow> run_adaptive(const ExperimentConfig& config);

// Solve the single checkerboard configuration (config.refine base levels,
// config.disparity extra). The PCG report is copied to *report when given.
ResultRow run_single(const ExperimentConfig& config, SolveReport* report = nullptr);

// Validate, dispatch on config.experiment, and return the report rows.
std::vector<ResultRow> run(const ExperimentConfig& config);

// Reporting -----------------------------------------------------------------

// Condition numbers below 1000 with four significant digits, larger ones in
// compact scientific form with one fractional digit (6012.3 -> "6.0e3").
std::string format_kappa(double kappa);

// CSV document with header p,level,patches,dofs,iterations,kappa; skipped
// rows carry the literal SkippedOverBudget in the last two columns.
std::string to_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

// Per-iteration relative residuals of one solve as iteration,residual lines.
void emit_history(const SolveReport& report, const std::string& path);

// Fixed-width human-readable table of the same columns.
std::string render_table(const std::vector<ResultRow>& rows);

}  // namespace ieti
