#pragma once
// Interface preconditioners on the Lagrange-multiplier space: the scaled
// Dirichlet preconditioner with 0/1 selection scaling and the deluxe-type
// edge preconditioner built from edge-restricted Schur blocks, plus the
// trace-jump diagnostic used by the property tests.
#include <vector>

#include "ieti/coupling.hpp"
#include "ieti/ieti.hpp"
#include "ieti/linalg.hpp"

namespace ieti {

struct PrecondError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// An edge-restricted Schur block (or the combined interface block) failed to
// factor; names the interface and its patches.
struct SingularEdgeBlock : PrecondError {
  using PrecondError::PrecondError;
};

// 0/1 diagonal over the skeleton numbering: 1 exactly at the selected (+1)
// entry of each dual constraint row, hence idempotent.
struct SelectionScaling {
  std::vector<double> diag;
};

SelectionScaling build_selection_scaling(const ConstraintSystem& constraints);

// M_sD mu = B D S D^T B^T mu with S the block-diagonal skeleton Schur
// complement; the per-patch applications are independent.
Vector apply_scaled_dirichlet(const ConstraintSystem& constraints,
                              const std::vector<SkeletonSchur>& schurs,
                              const SelectionScaling& scaling, const Vector& mu);

// Deluxe-type edge preconditioner: for every interface, the combined block
//   M_e = S_e(refined)^-1 + P S_e(coarse)^-1 P^T
// over the refined side's open-edge functions is factored once; an
// application solves M_e x_e = mu_e per interface and sums the results.
// S_e is the Schur complement of the patch stiffness onto the open-edge
// functions after deleting the alive corner functions (vertex values are
// handled by the primal space), and P is the interface embedding restricted
// to open-edge rows and columns.
struct DeluxeEdgeBlocks {
  struct Block {
    int coupling = -1;
    std::vector<int> rows;   // dual row ids of the interface, in edge order
    DenseCholesky combined;  // factorization of M_e
  };
  std::vector<Block> blocks;
  int n_dual = 0;
};

DeluxeEdgeBlocks build_deluxe_blocks(const std::vector<InterfaceCoupling>& couplings,
                                     const std::vector<DofLayout>& layouts,
                                     const ConstraintSystem& constraints,
                                     const std::vector<PatchSystem>& systems);

Vector apply_deluxe(const DeluxeEdgeBlocks& blocks, const Vector& mu);

// Edge traces of D B^T B w for a skeleton vector w, reported per interface in
// the 1D edge numbering of each side (zeros on removed functions). For w
// satisfying the vertex constraints, the refined-side trace equals the
// interface jump of w and the coarse-side coefficients vanish.
struct InterfaceTrace {
  Vector fine;
  Vector coarse;
};

std::vector<InterfaceTrace> jump_check(const std::vector<InterfaceCoupling>& couplings,
                                       const std::vector<DofLayout>& layouts,
                                       const ConstraintSystem& constraints, const Vector& w);

}  // namespace ieti
