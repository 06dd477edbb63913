#pragma once
// Residual-based error estimation, Doerfler marking, 2x2 patch splitting,
// and consistency rounds that keep trace nesting, edge interpolation, and
// the diffusion-ordering rule intact after refinement.
#include <array>
#include <vector>

#include "ieti/assembly.hpp"
#include "ieti/coupling.hpp"

namespace ieti {

struct AdaptivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Doerfler marking was asked for a zero estimator (converged or degenerate).
struct EmptyEstimator : AdaptivityError {
  using AdaptivityError::AdaptivityError;
};
// Consistency splitting kept finding violations after the round limit.
struct NonTermination : AdaptivityError {
  using AdaptivityError::AdaptivityError;
};

// Per-patch error indicators
//   eta_k^2 = h_k^2 ||f + nu_k Lap(u_h)||^2_{patch k}
//           + sum over incident interfaces of (h_k/2) ||[nu grad(u_h)].n||^2,
// with h_k the patch's physical mesh size and the flux-jump integral shared
// by both patches of an interface (each weighted by its own h_k/2).
struct EstimatorReport {
  std::vector<double> eta_sq;           // per patch, >= 0
  double total = 0.0;                   // sum of eta_sq
  std::vector<double> interface_jump_sq;  // per coupling: integral of the
                                          // squared normal-flux jump
};

// Evaluate the estimator for a solved configuration. `solution` holds the
// per-patch coefficient vectors in the layouts' reduced numbering (as
// produced by IetiOperator::reconstruct_solution); removed Dirichlet
// functions are treated as zero.
EstimatorReport estimate(const MultiPatchTopology& topo,
                         const std::vector<InterfaceCoupling>& couplings,
                         const std::vector<DofLayout>& layouts,
                         const std::vector<Vector>& solution,
                         const RhsFunction& rhs);

// Greedy largest-first minimal set M with sum_{k in M} eta_k^2 strictly
// greater than theta * total. Returned ascending. Throws EmptyEstimator
// when the total vanishes.
std::vector<int> doerfler_mark(const EstimatorReport& report, double theta = 0.8);

// Bisect the parameter domain into 2x2 children, ordered
// [0,1/2]^2, [1/2,1]x[0,1/2], [0,1/2]x[1/2,1], [1/2,1]^2.
// Each child composes the parent map with the affine sub-box map and keeps a
// copy of the parent's knot vectors, so every child has the parent's grid
// size relative to its own domain and the physical mesh size halves.
// `parent_index` is recorded as the children's lineage.
std::array<Patch, 4> split_patch(const Patch& patch, int parent_index);

// Replace every marked patch by its four children (marked indices refer to
// `patches`); unmarked patches are carried over. Every output patch records
// the index it came from in the input list.
std::vector<Patch> apply_splits(const std::vector<Patch>& patches,
                                const std::vector<int>& marked);

// Repeatedly split the coarse-side patch of every coupling that violates the
// diffusion-ordering rule and the host patch of every failing edge
// interpolation check, until both checks pass. Returns the number of extra
// patches created. Throws NonTermination when violations persist after
// `max_rounds` rounds. With enforce_ordering = false only the edge
// interpolation failures are repaired (the decomposition stays solvable, but
// coarse traces under a high-diffusion patch are tolerated).
int consistency_split(std::vector<Patch>& patches, int max_rounds = 10,
                      bool enforce_ordering = true);

// One refinement step: Doerfler marking, splitting, consistency rounds.
struct RefinementPlan {
  std::vector<int> marked;            // Doerfler set on the input list
  int consistency_extra_patches = 0;  // extra patches beyond the marked splits
  std::vector<Patch> patches;         // resulting list with lineage set
};

RefinementPlan refine(const std::vector<Patch>& patches, const EstimatorReport& report,
                      double theta = 0.8, int max_rounds = 10);

}  // namespace ieti
