#pragma once
// Dual-primal interface machinery: patch-local saddle solvers, the primal
// vertex basis with its coarse problem, the implicit multiplier operator F
// with right-hand side d, solution reconstruction, and per-patch skeleton
// Schur complements with harmonic extension.
#include <vector>

#include "ieti/assembly.hpp"
#include "ieti/coupling.hpp"
#include "ieti/linalg.hpp"
#include "ieti/space.hpp"

namespace ieti {

struct IetiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The local constraint rows are rank deficient (an interpolation-condition
// failure on some edge); names the offending patch.
struct SingularLocalSaddle : IetiError {
  using IetiError::IetiError;
};
struct SingularCoarse : IetiError {
  using IetiError::IetiError;
};

// Assembled, Dirichlet-eliminated stiffness and load of one patch.
struct PatchSystem {
  SparseMatrix a;
  Vector f;
};

std::vector<PatchSystem> assemble_systems(const MultiPatchTopology& topo,
                                          const std::vector<DofLayout>& layouts,
                                          const RhsFunction& rhs);

// Exact solver for the augmented patch-local saddle system
//   [A  C^T][u ]   [b]
//   [C   0 ][mu] = [c]
// through the equivalent SPD form K = A + sigma*C^T*C: factoring K once and
// the small dense block G = C K^-1 C^T makes every solve two sparse backsolves
// plus an m x m dense solve (exact, not a penalty approximation), and a
// Cholesky failure of G certifies rank-deficient constraint rows.
class LocalSaddle {
 public:
  LocalSaddle() = default;
  LocalSaddle(const SparseMatrix& a, const SparseMatrix& c, int patch);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

  // Solution component u; the multiplier is computed implicitly and dropped.
  Vector solve(const Vector& b, const Vector& c) const;

 private:
  std::size_t n_ = 0, m_ = 0;
  SparseMatrix c_;
  SpdFactorization k_;
  DenseMatrix w_;  // K^-1 C^T
  DenseCholesky g_;
};

std::vector<LocalSaddle> build_local_saddles(const ConstraintSystem& constraints,
                                             const std::vector<PatchSystem>& systems);

// Energy-minimal vertex basis: column j of psi[k] is the patch-k function
// with unit value at its j-th primal row and zero at the others, discrete
// harmonic in the patch interior. Carries the assembled coarse matrix
// A_Pi = Psi^T A Psi (factored) and B_Pi = B Psi.
struct PrimalBasis {
  std::vector<DenseMatrix> psi;          // per patch: n_k x n_primal_rows(k)
  std::vector<std::vector<int>> global;  // per patch: local row -> global DOF (-1 fixed)
  int n_primal = 0;
  DenseMatrix a_pi;
  DenseCholesky a_pi_factor;
  DenseMatrix b_pi;  // n_dual x n_primal

  Vector coarse_solve(const Vector& b) const;
};

PrimalBasis build_primal_basis(const std::vector<LocalSaddle>& saddles,
                               const ConstraintSystem& constraints,
                               const std::vector<PatchSystem>& systems);

// The assembled dual-primal operator F = sum_k B(k) Atilde(k)^-1 B(k)^T
// + B_Pi A_Pi^-1 B_Pi^T acting on the Lagrange multiplier space, its right
// hand side d, and the solution reconstruction.
class IetiOperator {
 public:
  IetiOperator(const MultiPatchTopology& topo, const std::vector<DofLayout>& layouts,
               const std::vector<InterfaceCoupling>& couplings, ConstraintSystem constraints,
               std::vector<PatchSystem> systems);

  int n_multipliers() const { return constraints_.n_dual(); }
  int n_primal() const { return primal_.n_primal; }
  std::size_t n_dofs() const;  // sum of per-patch reduced sizes

  Vector apply_F(const Vector& lambda) const;
  Vector compute_rhs() const;

  // Back-substitution: per-patch coefficient vectors in reduced numbering.
  std::vector<Vector> reconstruct_solution(const Vector& lambda) const;

  const ConstraintSystem& constraints() const { return constraints_; }
  const std::vector<PatchSystem>& systems() const { return systems_; }
  const LocalSaddle& saddle(int k) const { return saddles_[k]; }
  const PrimalBasis& primal() const { return primal_; }

 private:
  ConstraintSystem constraints_;
  std::vector<PatchSystem> systems_;
  std::vector<LocalSaddle> saddles_;
  PrimalBasis primal_;
  Vector psi_t_f_;  // globally assembled Psi^T f
};

// Interior-block elimination of one patch: the implicit Schur complement on
// the surviving boundary functions and the discrete harmonic extension.
class SkeletonSchur {
 public:
  SkeletonSchur() = default;
  SkeletonSchur(const SparseMatrix& a, const DofLayout& layout);

  std::size_t n_boundary() const { return n_boundary_; }
  std::size_t n_interior() const { return n_interior_; }

  Vector apply(const Vector& w) const;             // S^(k) w
  Vector harmonic_extend(const Vector& w) const;   // full reduced vector
  Vector condensed_rhs(const Vector& f) const;     // f_B - A_BI A_II^-1 f_I

 private:
  std::size_t n_interior_ = 0, n_boundary_ = 0;
  SparseMatrix a_ib_, a_bi_, a_bb_;
  SpdFactorization a_ii_;
};

std::vector<SkeletonSchur> build_skeleton_schur(const std::vector<PatchSystem>& systems,
                                                const std::vector<DofLayout>& layouts);

}  // namespace ieti
