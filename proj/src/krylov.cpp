#include "ieti/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace ieti {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw DimensionMismatch(msg);
}

// Number of eigenvalues of the symmetric tridiagonal strictly below x
// (Sturm count through the leading-minor recurrence).
int count_below(const std::vector<double>& diag, const std::vector<double>& off, double x,
                double pivmin) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double o2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    d = diag[i] - x - o2 / d;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

// Bisect until count_below(x) >= want for all x above the returned value.
double bisect_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off,
                         double lo, double hi, int want, double pivmin) {
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(diag, off, mid, pivmin) >= want)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ConditionEstimate estimate_condition(const std::vector<double>& diag,
                                     const std::vector<double>& off) {
  require(!diag.empty(), "estimate_condition: empty tridiagonal");
  require(off.size() + 1 == diag.size(), "estimate_condition: off-diagonal size");

  const int n = static_cast<int>(diag.size());
  double lo = diag[0], hi = diag[0], scale = std::abs(diag[0]);
  for (int i = 0; i < n; ++i) {
    const double radius =
        (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
    scale = std::max(scale, std::abs(diag[i]) + radius);
  }
  const double margin = 1e-12 * std::max(1.0, scale) + 1e-300;
  lo -= margin;
  hi += margin;
  const double pivmin = 1e-14 * std::max(1.0, scale) * 1e-6 + 1e-300;

  ConditionEstimate est;
  est.lambda_min = bisect_eigenvalue(diag, off, lo, hi, 1, pivmin);
  est.lambda_max = bisect_eigenvalue(diag, off, lo, hi, n, pivmin);
  est.kappa = est.lambda_max / est.lambda_min;
  return est;
}

std::pair<std::vector<double>, std::vector<double>> cg_tridiagonal(
    const std::vector<double>& alpha, const std::vector<double>& beta) {
  require(!alpha.empty(), "cg_tridiagonal: no completed iterations");
  require(beta.size() + 1 == alpha.size(), "cg_tridiagonal: coefficient counts");

  std::vector<double> diag(alpha.size()), off(beta.size());
  diag[0] = 1.0 / alpha[0];
  for (std::size_t j = 1; j < alpha.size(); ++j) {
    diag[j] = 1.0 / alpha[j] + beta[j - 1] / alpha[j - 1];
    off[j - 1] = std::sqrt(std::max(beta[j - 1], 0.0)) / alpha[j - 1];
  }
  return {std::move(diag), std::move(off)};
}

std::pair<Vector, SolveReport> pcg(const LinearOperator& apply_op,
                                   const LinearOperator& apply_precond, const Vector& d,
                                   double rel_tol, int max_iter) {
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&start]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  SolveReport report;
  Vector lambda(d.size(), 0.0);
  if (norm2(d) == 0.0) {
    report.wall_time_seconds = elapsed();
    return {std::move(lambda), std::move(report)};
  }

  Vector r = d;
  Vector z = apply_precond(r);
  require(z.size() == d.size(), "pcg: preconditioner output size");
  double rho = dot(r, z);
  if (rho < 0.0)
    throw IndefiniteOperatorDetected("pcg: initial preconditioned residual norm is negative");
  const double rho0 = rho;
  report.residual_history.push_back(1.0);
  Vector p = z;

  bool converged = rho == 0.0;
  for (int j = 0; j < max_iter && !converged; ++j) {
    const Vector q = apply_op(p);
    require(q.size() == d.size(), "pcg: operator output size");
    const double pq = dot(p, q);
    if (pq <= 0.0)
      throw IndefiniteOperatorDetected("pcg: search direction with nonpositive curvature");

    const double alpha = rho / pq;
    axpy(alpha, p, lambda);
    axpy(-alpha, q, r);
    report.alpha.push_back(alpha);
    ++report.iterations;

    z = apply_precond(r);
    double rho_new = dot(r, z);
    if (rho_new < 0.0) {
      if (rho_new < -1e-28 * rho0)
        throw IndefiniteOperatorDetected("pcg: preconditioned residual norm turned negative");
      rho_new = 0.0;
    }
    report.residual_history.push_back(std::sqrt(rho_new / rho0));

    if (std::sqrt(rho_new) <= rel_tol * std::sqrt(rho0)) {
      converged = true;
      break;
    }
    if (j + 1 < max_iter) {
      const double beta = rho_new / rho;
      report.beta.push_back(beta);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    rho = rho_new;
  }

  report.status = converged ? SolveStatus::Converged : SolveStatus::MaxIterationsExceeded;
  if (!report.alpha.empty()) {
    const auto [diag, off] = cg_tridiagonal(report.alpha, report.beta);
    const ConditionEstimate est = estimate_condition(diag, off);
    report.lambda_min = est.lambda_min;
    report.lambda_max = est.lambda_max;
    report.kappa = est.kappa;
  }
  report.wall_time_seconds = elapsed();
  return {std::move(lambda), std::move(report)};
}

}  // namespace ieti
