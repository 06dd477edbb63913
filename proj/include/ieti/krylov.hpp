#pragma once
// Preconditioned conjugate gradients on the multiplier system, with extreme
// Ritz values (hence a condition-number estimate) obtained from the
// CG-generated Lanczos tridiagonal by Sturm-count bisection.
#include <functional>
#include <utility>
#include <vector>

#include "ieti/linalg.hpp"

namespace ieti {

struct KrylovError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A direction produced p^T F p <= 0, or the preconditioned residual norm
// turned negative: the SPD assumptions of CG are violated.
struct IndefiniteOperatorDetected : KrylovError {
  using KrylovError::KrylovError;
};

using LinearOperator = std::function<Vector(const Vector&)>;

enum class SolveStatus { Converged, MaxIterationsExceeded };

struct SolveReport {
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;
  // ||r_j||_M / ||r_0||_M for j = 0..iterations; empty when the right-hand
  // side is zero (solved without iterating).
  std::vector<double> residual_history;
  // CG coefficients of the completed iterations; beta holds one entry less
  // than alpha (the connecting coefficients of the Lanczos tridiagonal).
  std::vector<double> alpha;
  std::vector<double> beta;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double kappa = 1.0;
  double wall_time_seconds = 0.0;
};

// Solve F lambda = d with preconditioner M given as its application.
// Convergence is declared when sqrt(r^T M r) drops below rel_tol times its
// initial value; hitting max_iter returns the current (best) iterate with
// status MaxIterationsExceeded instead of throwing.
std::pair<Vector, SolveReport> pcg(const LinearOperator& apply_op,
                                   const LinearOperator& apply_precond, const Vector& d,
                                   double rel_tol, int max_iter);

struct ConditionEstimate {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double kappa = 1.0;
};

// Extreme eigenvalues of a symmetric tridiagonal matrix (diagonal `diag`,
// off-diagonal `off` with off.size() + 1 == diag.size()) via bisection on the
// Sturm count, and their ratio.
ConditionEstimate estimate_condition(const std::vector<double>& diag,
                                     const std::vector<double>& off);

// Lanczos tridiagonal of the preconditioned operator reconstructed from the
// CG coefficients (beta.size() + 1 == alpha.size()); its eigenvalues are the
// Ritz values of M F on the generated Krylov space.
std::pair<std::vector<double>, std::vector<double>> cg_tridiagonal(
    const std::vector<double>& alpha, const std::vector<double>& beta);

}  // namespace ieti
