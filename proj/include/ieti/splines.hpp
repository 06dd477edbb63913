#pragma once
// 1D B-spline bases on open knot vectors: Cox-de Boor evaluation, derivatives,
// knot-insertion embeddings (Boehm single insertions, composed), dyadic
// refinement, Greville abscissae, and restriction to a sub-interval.
#include <vector>

#include "ieti/linalg.hpp"

namespace ieti {

struct SplineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidKnotVector : SplineError {
  using SplineError::SplineError;
};
struct OutOfDomain : SplineError {
  using SplineError::SplineError;
};
struct NotNested : SplineError {
  using SplineError::SplineError;
};
struct InvalidSubinterval : SplineError {
  using SplineError::SplineError;
};

// Absolute tolerance for knot comparisons; all experiment knots are dyadic
// rationals, exact in binary floating point.
constexpr double kKnotTol = 1e-12;

// Open (clamped) knot vector on [0,1] with interior multiplicities <= degree.
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> knots);

  // Open knot vector with `intervals` uniform spans and simple interior knots.
  static KnotVector uniform(int degree, int intervals);

  int degree() const { return p_; }
  const std::vector<double>& knots() const { return knots_; }
  std::size_t num_basis() const { return knots_.size() - p_ - 1; }

  double grid_size() const;  // longest span
  double min_span() const;   // shortest nonempty span

  // Unique knot values (breakpoints) and their multiplicities, including 0/1.
  std::vector<double> breakpoints() const;
  std::vector<int> multiplicities() const;

  // Index i with knots[i] <= x < knots[i+1] (last nonempty span at x = 1).
  int find_span(double x) const;

  bool operator==(const KnotVector& o) const;

 private:
  int p_ = 1;
  std::vector<double> knots_;
};

struct BasisValues {
  int first = 0;           // index of the first returned basis function
  std::vector<double> values;  // p+1 values
};

struct BasisDerivs {
  int first = 0;
  DenseMatrix values;  // (order+1) x (p+1); row d holds d-th derivatives
};

BasisValues eval_basis(const KnotVector& kv, double x);
BasisDerivs eval_derivs(const KnotVector& kv, double x, int order);

// Coarse-to-fine coefficient embedding: row count fine.num_basis(), column
// count coarse.num_basis(); throws NotNested unless the coarse knot multiset
// is contained in the fine one (same degree required).
SparseMatrix insert_knots(const KnotVector& coarse, const KnotVector& fine);

KnotVector dyadic_refine(const KnotVector& kv);
std::vector<double> greville(const KnotVector& kv);

// Knot vector of the restriction to [a,b] (whole spans), rescaled to [0,1].
KnotVector restrict_to(const KnotVector& kv, double a, double b);

namespace detail {

// Single-insertion and embedding helpers on raw knot arrays. These accept
// intermediate vectors (e.g. multiplicity degree+1 at an interior knot) that
// the KnotVector invariants would reject.
DenseMatrix embedding_between(int degree, const std::vector<double>& coarse,
                              const std::vector<double>& fine);

// Sorted multiset difference fine \ coarse; throws NotNested when the coarse
// multiset is not contained in fine.
std::vector<double> missing_knots(const std::vector<double>& coarse,
                                  const std::vector<double>& fine);

}  // namespace detail

}  // namespace ieti
