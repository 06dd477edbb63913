#include "ieti/space.hpp"

#include <algorithm>

namespace ieti {

namespace {

// 1D index pair (i1, i2) of the m-th function along a side's edge parameter.
std::pair<std::size_t, std::size_t> edge_index(Side s, std::size_t m, std::size_t n1,
                                               std::size_t n2) {
  switch (s) {
    case Side::South: return {m, 0};
    case Side::East: return {n1 - 1, m};
    case Side::North: return {m, n2 - 1};
    case Side::West: return {0, m};
  }
  return {0, 0};
}

std::size_t edge_length(Side s, std::size_t n1, std::size_t n2) {
  return (s == Side::South || s == Side::North) ? n1 : n2;
}

}  // namespace

std::vector<int> DofLayout::edge_dofs(Side s) const {
  std::vector<int> out;
  for (int d : edge_aligned[static_cast<int>(s)])
    if (d >= 0) out.push_back(d);
  return out;
}

std::vector<int> DofLayout::edge_interior_dofs(Side s) const {
  const auto& al = edge_aligned[static_cast<int>(s)];
  std::vector<int> out;
  for (std::size_t m = 1; m + 1 < al.size(); ++m)
    if (al[m] >= 0) out.push_back(al[m]);
  return out;
}

int DofLayout::corner_dof(int corner) const {
  std::size_t i1 = 0, i2 = 0;
  switch (corner) {
    case 0: i1 = 0; i2 = 0; break;
    case 1: i1 = n1 - 1; i2 = 0; break;
    case 2: i1 = n1 - 1; i2 = n2 - 1; break;
    case 3: i1 = 0; i2 = n2 - 1; break;
    default: return -1;
  }
  return old_to_new[lex(i1, i2)];
}

std::vector<int> DofLayout::boundary_dofs() const {
  std::vector<int> out;
  for (std::size_t d = n_interior; d < n_total; ++d) out.push_back(static_cast<int>(d));
  return out;
}

DofLayout build_layout(const Patch& patch, const std::array<bool, 4>& dirichlet_sides) {
  DofLayout lay;
  lay.n1 = patch.kv1.num_basis();
  lay.n2 = patch.kv2.num_basis();
  lay.dirichlet = dirichlet_sides;
  const std::size_t n = lay.n1 * lay.n2;
  lay.old_to_new.assign(n, -1);

  auto on_side = [&](std::size_t i1, std::size_t i2, Side s) {
    switch (s) {
      case Side::South: return i2 == 0;
      case Side::East: return i1 == lay.n1 - 1;
      case Side::North: return i2 == lay.n2 - 1;
      case Side::West: return i1 == 0;
    }
    return false;
  };

  auto removed = [&](std::size_t i1, std::size_t i2) {
    for (int s = 0; s < 4; ++s)
      if (dirichlet_sides[s] && on_side(i1, i2, static_cast<Side>(s))) return true;
    return false;
  };
  auto is_boundary = [&](std::size_t i1, std::size_t i2) {
    return i1 == 0 || i1 == lay.n1 - 1 || i2 == 0 || i2 == lay.n2 - 1;
  };

  // interior functions first, then surviving skeleton functions, lex order each
  int next = 0;
  for (std::size_t i2 = 0; i2 < lay.n2; ++i2)
    for (std::size_t i1 = 0; i1 < lay.n1; ++i1)
      if (!is_boundary(i1, i2)) lay.old_to_new[lay.lex(i1, i2)] = next++;
  lay.n_interior = next;
  for (std::size_t i2 = 0; i2 < lay.n2; ++i2)
    for (std::size_t i1 = 0; i1 < lay.n1; ++i1)
      if (is_boundary(i1, i2) && !removed(i1, i2)) lay.old_to_new[lay.lex(i1, i2)] = next++;
  lay.n_total = next;
  lay.n_boundary = lay.n_total - lay.n_interior;

  lay.new_to_old.assign(lay.n_total, -1);
  for (std::size_t o = 0; o < n; ++o)
    if (lay.old_to_new[o] >= 0) lay.new_to_old[lay.old_to_new[o]] = static_cast<int>(o);

  for (int s = 0; s < 4; ++s) {
    const std::size_t len = edge_length(static_cast<Side>(s), lay.n1, lay.n2);
    auto& al = lay.edge_aligned[s];
    al.resize(len);
    for (std::size_t m = 0; m < len; ++m) {
      const auto [i1, i2] = edge_index(static_cast<Side>(s), m, lay.n1, lay.n2);
      al[m] = lay.old_to_new[lay.lex(i1, i2)];
    }
  }
  return lay;
}

std::vector<DofLayout> build_layouts(const MultiPatchTopology& topo) {
  std::vector<DofLayout> out;
  out.reserve(topo.patches.size());
  for (std::size_t k = 0; k < topo.patches.size(); ++k) {
    std::array<bool, 4> d{{false, false, false, false}};
    for (int s = 0; s < 4; ++s)
      d[s] = topo.is_dirichlet(static_cast<int>(k), static_cast<Side>(s));
    out.push_back(build_layout(topo.patches[k], d));
  }
  return out;
}

}  // namespace ieti
