#pragma once
// Interface coupling for non-matching patches: decides the refined/coarse side
// of every interface by trace-space nesting, builds oriented coefficient
// embeddings (including T-junction sub-range restrictions), assembles the
// constraint system with its primal/dual split at vertices, the selection set,
// and runs the Schoenberg-Whitney and coefficient-ordering checks.
#include <utility>
#include <vector>

#include "ieti/space.hpp"
#include "ieti/splines.hpp"
#include "ieti/topology.hpp"

namespace ieti {

struct CouplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The 1D knot vector along one side of a patch.
const KnotVector& edge_knots(const Patch& patch, Side side);

// Resolved interface: `refined` hosts the finer trace space, `coarse` the
// coarser one. The interface occupies [coarse_a, coarse_b] of the coarse
// side's edge parameter (the refined side's full edge is always covered).
// `embedding` expresses each coarse trace function listed in `coarse_trace`
// (1D indices along the coarse edge) in the refined side's full edge basis,
// oriented and affinely reparameterized to the refined side's edge parameter.
struct InterfaceCoupling {
  int interface = -1;  // index into MultiPatchTopology::interfaces
  int refined = -1;
  int coarse = -1;
  Side refined_side = Side::South;
  Side coarse_side = Side::South;
  double coarse_a = 0.0, coarse_b = 1.0;
  bool flipped = false;
  bool equal_spaces = false;  // trace spaces coincide (tie broken by index)
  DenseMatrix embedding;      // n_refined_edge x coarse_trace.size()
  std::vector<int> coarse_trace;
};

// Decide refined/coarse per interface and build the oriented embeddings.
// Throws NotNested when neither side's trace space contains the other, or
// when a sub-edge side fails to refine the host edge's restriction.
std::vector<InterfaceCoupling> order_interfaces(const MultiPatchTopology& topo);

// Concatenated numbering of all surviving boundary (skeleton) DOFs.
struct SkeletonNumbering {
  std::vector<int> offset;      // per patch: first skeleton index
  std::vector<int> interior;    // per patch: n_interior
  std::vector<int> boundary;    // per patch: n_boundary
  int total = 0;

  int index(int patch, int reduced_dof) const;
  std::pair<int, int> local(int skeleton_index) const;  // (patch, reduced dof)
};

SkeletonNumbering build_skeleton(const std::vector<DofLayout>& layouts);

struct ConstraintRow {
  int interface = -1;        // index into the coupling list
  int fine_patch = -1;
  int fine_edge_index = -1;  // 1D index along the refined side's edge
  int fine_dof = -1;         // patch-local reduced index of the +1 entry
};

struct PrimalRow {
  int vertex = -1;        // topology vertex id
  int global_index = -1;  // global primal DOF; -1 for Dirichlet-fixed vertices
};

struct ConstraintSystem {
  // Dual (Lagrange-multiplier) constraints over the skeleton numbering; every
  // row has exactly one +1 and otherwise nonpositive entries.
  SparseMatrix b;
  std::vector<ConstraintRow> rows;
  // Dual rows restricted to one patch's reduced numbering (n_dual x n_k).
  std::vector<SparseMatrix> b_local;
  // Per-patch primal vertex-value rows (n_primal_rows(k) x n_k).
  std::vector<SparseMatrix> c;
  std::vector<std::vector<PrimalRow>> primal_rows;
  SkeletonNumbering skeleton;
  int n_primal = 0;                // global primal DOFs (free vertices)
  std::vector<int> vertex_primal;  // per vertex: global primal index or -1
  // Selection set: per dual row, the skeleton index carrying the +1. The
  // row index is the (injective) selection map applied to that entry.
  std::vector<int> i_z;

  int n_dual() const { return static_cast<int>(rows.size()); }
};

ConstraintSystem build_constraints(const MultiPatchTopology& topo,
                                   const std::vector<InterfaceCoupling>& couplings,
                                   const std::vector<DofLayout>& layouts);

// Can every listed edge point be matched to a distinct basis function that is
// positive there? (Greedy interval matching; params on the closed edge.)
bool schoenberg_whitney_edge(const KnotVector& kv, const std::vector<double>& params);

struct EdgeCheck {
  int patch = -1;
  Side side = Side::South;
  int vertices = 0;
  bool pass = true;
};

struct SchoenbergWhitneyReport {
  std::vector<EdgeCheck> edges;  // edges hosting edge-interior vertices
  bool all_pass = true;
};

SchoenbergWhitneyReport check_schoenberg_whitney(const MultiPatchTopology& topo,
                                                 const std::vector<InterfaceCoupling>& couplings);

// Indices of couplings whose refined side has a strictly larger diffusion
// coefficient than its coarse side (interfaces with equal trace spaces are
// never flagged).
std::vector<int> check_consistency(const MultiPatchTopology& topo,
                                   const std::vector<InterfaceCoupling>& couplings);

}  // namespace ieti
