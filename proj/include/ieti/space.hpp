#pragma once
// Tensor-product DOF bookkeeping for one patch: lexicographic indexing,
// Dirichlet removal, the interior-first permutation, and per-edge/per-corner
// index lists in the reduced numbering.
#include <array>

#include "ieti/topology.hpp"

namespace ieti {

// Reduced numbering: indices [0, n_interior) are the functions whose trace on
// the whole parameter boundary vanishes; [n_interior, n_total) are the
// surviving boundary (skeleton) functions. Functions supported on a Dirichlet
// side are removed entirely.
struct DofLayout {
  std::size_t n1 = 0, n2 = 0;  // per-direction basis counts of the full tensor space
  std::array<bool, 4> dirichlet{{false, false, false, false}};

  std::vector<int> old_to_new;  // lex index -> reduced index, -1 when removed
  std::vector<int> new_to_old;  // reduced index -> lex index
  std::size_t n_total = 0;
  std::size_t n_interior = 0;
  std::size_t n_boundary = 0;

  // Reduced indices of the 1D trace functions of a side, aligned with the 1D
  // basis along the edge parameter (-1 where the function was removed).
  std::array<std::vector<int>, 4> edge_aligned;

  std::size_t lex(std::size_t i1, std::size_t i2) const { return i1 + n1 * i2; }

  // Surviving edge DOFs in edge order.
  std::vector<int> edge_dofs(Side s) const;
  // Same, excluding the two endpoint (corner) functions.
  std::vector<int> edge_interior_dofs(Side s) const;
  // Reduced index of a corner function (corner 0..3), -1 when removed.
  int corner_dof(int corner) const;
  // All surviving boundary DOFs, ascending.
  std::vector<int> boundary_dofs() const;
};

DofLayout build_layout(const Patch& patch, const std::array<bool, 4>& dirichlet_sides);

// Convenience: layouts for every patch of a topology, Dirichlet tags applied.
std::vector<DofLayout> build_layouts(const MultiPatchTopology& topo);

}  // namespace ieti
