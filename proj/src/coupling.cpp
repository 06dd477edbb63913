#include "ieti/coupling.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ieti {

namespace {

constexpr double kEntryTol = 1e-12;

bool multiset_contains(const std::vector<double>& coarse, const std::vector<double>& fine) {
  try {
    detail::missing_knots(coarse, fine);
    return true;
  } catch (const NotNested&) {
    return false;
  }
}

std::vector<double> reversed_knots(const std::vector<double>& knots) {
  std::vector<double> out(knots.rbegin(), knots.rend());
  for (double& x : out) x = 1.0 - x;
  return out;
}

// Raw knots of the trace space restricted to [a,b] of the edge, rescaled to
// [0,1]: open ends plus every interior knot strictly inside (a,b).
std::vector<double> restricted_raw(const KnotVector& kv, double a, double b) {
  const int p = kv.degree();
  std::vector<double> out(p + 1, 0.0);
  for (double x : kv.knots())
    if (x > a + kKnotTol && x < b - kKnotTol) out.push_back((x - a) / (b - a));
  out.insert(out.end(), p + 1, 1.0);
  return out;
}

// Raw knots of `kv` with a and b raised to full multiplicity p+1.
std::vector<double> cut_raw(const KnotVector& kv, double a, double b) {
  const int p = kv.degree();
  std::vector<double> out = kv.knots();
  for (double cut : {a, b}) {
    if (cut < kKnotTol || cut > 1.0 - kKnotTol) continue;
    int mult = 0;
    for (double x : out)
      if (std::abs(x - cut) <= kKnotTol) ++mult;
    for (int m = mult; m < p + 1; ++m)
      out.insert(std::upper_bound(out.begin(), out.end(), cut), cut);
  }
  return out;
}

// Build the oriented embedding of the coarse side's trace on [a,b] into the
// refined side's full edge basis, plus the list of coarse edge functions that
// are nonzero on the interface.
void build_embedding(InterfaceCoupling& cpl, const KnotVector& fine, const KnotVector& coarse) {
  const int p = fine.degree();
  if (coarse.degree() != p)
    throw NotNested("order_interfaces: trace spaces of different degree cannot be nested");
  const double a = cpl.coarse_a, b = cpl.coarse_b;
  const std::size_t n_c = coarse.num_basis();
  const std::size_t n_f = fine.num_basis();

  // Coefficients of the coarse edge space expressed in the cut space (a,b at
  // full multiplicity), then the block supported inside [a,b].
  const std::vector<double> cut = cut_raw(coarse, a, b);
  const DenseMatrix to_cut = detail::embedding_between(p, coarse.knots(), cut);
  const std::size_t n_cut = cut.size() - p - 1;
  std::vector<std::size_t> alive;
  for (std::size_t j = 0; j < n_cut; ++j)
    if (cut[j] >= a - kKnotTol && cut[j + p + 1] <= b + kKnotTol) alive.push_back(j);

  std::vector<double> sub = restricted_raw(coarse, a, b);
  if (alive.size() + p + 1 != sub.size())
    throw CouplingError("order_interfaces: inconsistent sub-range trace space");
  if (cpl.flipped) {
    sub = reversed_knots(sub);
    std::reverse(alive.begin(), alive.end());
  }

  // Restriction rows in the refined side's orientation.
  DenseMatrix restrict_rows(alive.size(), n_c);
  for (std::size_t r = 0; r < alive.size(); ++r)
    for (std::size_t j = 0; j < n_c; ++j) restrict_rows(r, j) = to_cut(alive[r], j);

  const DenseMatrix up = detail::embedding_between(p, sub, fine.knots());
  const DenseMatrix full = up.multiplied_by(restrict_rows);  // n_f x n_c

  cpl.coarse_trace.clear();
  for (std::size_t j = 0; j < n_c; ++j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < n_f; ++i) mx = std::max(mx, std::abs(full(i, j)));
    if (mx > kEntryTol) cpl.coarse_trace.push_back(static_cast<int>(j));
  }
  cpl.embedding = DenseMatrix(n_f, cpl.coarse_trace.size());
  for (std::size_t i = 0; i < n_f; ++i)
    for (std::size_t j = 0; j < cpl.coarse_trace.size(); ++j)
      cpl.embedding(i, j) = full(i, cpl.coarse_trace[j]);
}

}  // namespace

const KnotVector& edge_knots(const Patch& patch, Side side) {
  return (side == Side::South || side == Side::North) ? patch.kv1 : patch.kv2;
}

std::vector<InterfaceCoupling> order_interfaces(const MultiPatchTopology& topo) {
  std::vector<InterfaceCoupling> out;
  out.reserve(topo.interfaces.size());
  for (std::size_t m = 0; m < topo.interfaces.size(); ++m) {
    const Interface& f = topo.interfaces[m];
    const KnotVector& kv_k = edge_knots(topo.patches[f.k], f.side_k);
    const KnotVector& kv_l = edge_knots(topo.patches[f.l], f.side_l);
    const bool sub_k = f.a_k > kKnotTol || f.b_k < 1.0 - kKnotTol;
    const bool sub_l = f.a_l > kKnotTol || f.b_l < 1.0 - kKnotTol;
    assert(!(sub_k && sub_l));

    InterfaceCoupling cpl;
    cpl.interface = static_cast<int>(m);
    cpl.flipped = f.flipped;
    if (sub_k || sub_l) {
      // T-junction: the host edge carries the sub-range; the full-edge side
      // must refine the host's restriction.
      const bool host_is_k = sub_k;
      cpl.coarse = host_is_k ? f.k : f.l;
      cpl.coarse_side = host_is_k ? f.side_k : f.side_l;
      cpl.refined = host_is_k ? f.l : f.k;
      cpl.refined_side = host_is_k ? f.side_l : f.side_k;
      cpl.coarse_a = host_is_k ? f.a_k : f.a_l;
      cpl.coarse_b = host_is_k ? f.b_k : f.b_l;
      const KnotVector& fine = host_is_k ? kv_l : kv_k;
      const KnotVector& coarse = host_is_k ? kv_k : kv_l;
      std::vector<double> sub = restricted_raw(coarse, cpl.coarse_a, cpl.coarse_b);
      if (cpl.flipped) sub = reversed_knots(sub);
      if (!multiset_contains(sub, fine.knots()))
        throw NotNested(
            "order_interfaces: sub-edge trace space does not refine the host "
            "edge's restriction (patches " +
            std::to_string(f.k) + "," + std::to_string(f.l) + ")");
      cpl.equal_spaces = multiset_contains(fine.knots(), sub);
      build_embedding(cpl, fine, coarse);
    } else {
      // Coincident edges: compare in k's orientation.
      const std::vector<double> raw_k = kv_k.knots();
      const std::vector<double> raw_l =
          f.flipped ? reversed_knots(kv_l.knots()) : kv_l.knots();
      const bool k_refines = multiset_contains(raw_l, raw_k);  // V_l subset V_k
      const bool l_refines = multiset_contains(raw_k, raw_l);
      if (!k_refines && !l_refines)
        throw NotNested("order_interfaces: neither trace space contains the other (patches " +
                        std::to_string(f.k) + "," + std::to_string(f.l) + ")");
      cpl.equal_spaces = k_refines && l_refines;
      // Equal spaces: the lower patch index is the coarse side.
      const bool refine_l = l_refines && !cpl.equal_spaces;
      cpl.refined = refine_l ? f.l : f.k;
      cpl.refined_side = refine_l ? f.side_l : f.side_k;
      cpl.coarse = refine_l ? f.k : f.l;
      cpl.coarse_side = refine_l ? f.side_k : f.side_l;
      if (cpl.equal_spaces) {  // topology stores k < l
        cpl.refined = f.l;
        cpl.refined_side = f.side_l;
        cpl.coarse = f.k;
        cpl.coarse_side = f.side_k;
      }
      build_embedding(cpl, edge_knots(topo.patches[cpl.refined], cpl.refined_side),
                      edge_knots(topo.patches[cpl.coarse], cpl.coarse_side));
    }
    out.push_back(std::move(cpl));
  }
  return out;
}

int SkeletonNumbering::index(int patch, int reduced_dof) const {
  if (reduced_dof < interior[patch])
    throw DimensionMismatch("SkeletonNumbering::index: interior DOF is not on the skeleton");
  return offset[patch] + reduced_dof - interior[patch];
}

std::pair<int, int> SkeletonNumbering::local(int skeleton_index) const {
  const auto it = std::upper_bound(offset.begin(), offset.end(), skeleton_index);
  const int patch = static_cast<int>(it - offset.begin()) - 1;
  return {patch, skeleton_index - offset[patch] + interior[patch]};
}

SkeletonNumbering build_skeleton(const std::vector<DofLayout>& layouts) {
  SkeletonNumbering sk;
  sk.offset.reserve(layouts.size());
  for (const DofLayout& lay : layouts) {
    sk.offset.push_back(sk.total);
    sk.interior.push_back(static_cast<int>(lay.n_interior));
    sk.boundary.push_back(static_cast<int>(lay.n_boundary));
    sk.total += static_cast<int>(lay.n_boundary);
  }
  return sk;
}

ConstraintSystem build_constraints(const MultiPatchTopology& topo,
                                   const std::vector<InterfaceCoupling>& couplings,
                                   const std::vector<DofLayout>& layouts) {
  const int np = static_cast<int>(topo.patches.size());
  ConstraintSystem cs;
  cs.skeleton = build_skeleton(layouts);

  // ---- primal vertex rows ---------------------------------------------------
  // A vertex is Dirichlet-fixed when any incident corner function was removed;
  // free vertices get a global primal DOF in vertex order.
  cs.vertex_primal.assign(topo.vertices.size(), -1);
  for (std::size_t v = 0; v < topo.vertices.size(); ++v) {
    bool fixed = false;
    for (const VertexIncidence& inc : topo.vertices[v].incidences)
      if (inc.corner >= 0 && layouts[inc.patch].corner_dof(inc.corner) < 0) fixed = true;
    if (!fixed) cs.vertex_primal[v] = cs.n_primal++;
  }

  cs.primal_rows.resize(np);
  std::vector<std::vector<Triplet>> c_trip(np);
  for (std::size_t v = 0; v < topo.vertices.size(); ++v) {
    for (const VertexIncidence& inc : topo.vertices[v].incidences) {
      const DofLayout& lay = layouts[inc.patch];
      std::vector<std::pair<int, double>> entries;
      if (inc.corner >= 0) {
        const int dof = lay.corner_dof(inc.corner);
        if (dof < 0) continue;
        entries.emplace_back(dof, 1.0);
      } else {
        const KnotVector& kv = edge_knots(topo.patches[inc.patch], inc.side);
        const BasisValues bv = eval_basis(kv, inc.t);
        const std::vector<int>& aligned = lay.edge_aligned[static_cast<int>(inc.side)];
        for (std::size_t j = 0; j < bv.values.size(); ++j) {
          const int dof = aligned[bv.first + j];
          if (dof >= 0 && std::abs(bv.values[j]) > kEntryTol)
            entries.emplace_back(dof, bv.values[j]);
        }
        if (entries.empty()) continue;
      }
      const int row = static_cast<int>(cs.primal_rows[inc.patch].size());
      for (const auto& [dof, val] : entries) c_trip[inc.patch].push_back({row, dof, val});
      cs.primal_rows[inc.patch].push_back({static_cast<int>(v), cs.vertex_primal[v]});
    }
  }
  cs.c.reserve(np);
  for (int k = 0; k < np; ++k)
    cs.c.push_back(SparseMatrix::from_triplets(cs.primal_rows[k].size(), layouts[k].n_total,
                                               c_trip[k]));

  // ---- dual rows --------------------------------------------------------------
  struct PendingRow {
    ConstraintRow meta;
    std::vector<std::pair<int, double>> entries;  // (skeleton index, value)
    std::vector<std::pair<int, double>> fine_local, coarse_local;
  };
  std::vector<PendingRow> pending;
  for (std::size_t ci = 0; ci < couplings.size(); ++ci) {
    const InterfaceCoupling& cpl = couplings[ci];
    const DofLayout& lay_f = layouts[cpl.refined];
    const DofLayout& lay_c = layouts[cpl.coarse];
    const std::vector<int>& aligned_f = lay_f.edge_aligned[static_cast<int>(cpl.refined_side)];
    const std::vector<int>& aligned_c = lay_c.edge_aligned[static_cast<int>(cpl.coarse_side)];
    const std::size_t n_f = aligned_f.size();
    for (std::size_t i = 0; i < n_f; ++i) {
      if (i == 0 || i + 1 == n_f) continue;  // vertex rows are handled primally
      const int rf = aligned_f[i];
      if (rf < 0) continue;
      PendingRow row;
      row.meta = {static_cast<int>(ci), cpl.refined, static_cast<int>(i), rf};
      row.entries.emplace_back(cs.skeleton.index(cpl.refined, rf), 1.0);
      row.fine_local.emplace_back(rf, 1.0);
      for (std::size_t j = 0; j < cpl.coarse_trace.size(); ++j) {
        const double e = cpl.embedding(i, j);
        if (std::abs(e) <= kEntryTol) continue;
        const int rc = aligned_c[cpl.coarse_trace[j]];
        if (rc < 0) continue;
        row.entries.emplace_back(cs.skeleton.index(cpl.coarse, rc), -e);
        row.coarse_local.emplace_back(rc, -e);
      }
      pending.push_back(std::move(row));
    }
  }
  std::stable_sort(pending.begin(), pending.end(), [](const PendingRow& x, const PendingRow& y) {
    if (x.meta.fine_patch != y.meta.fine_patch) return x.meta.fine_patch < y.meta.fine_patch;
    if (x.meta.interface != y.meta.interface) return x.meta.interface < y.meta.interface;
    return x.meta.fine_edge_index < y.meta.fine_edge_index;
  });

  const int n_dual = static_cast<int>(pending.size());
  std::vector<Triplet> b_trip;
  std::vector<std::vector<Triplet>> bl_trip(np);
  cs.rows.reserve(pending.size());
  cs.i_z.reserve(pending.size());
  for (int r = 0; r < n_dual; ++r) {
    const PendingRow& row = pending[r];
    cs.rows.push_back(row.meta);
    cs.i_z.push_back(row.entries.front().first);
    for (const auto& [col, val] : row.entries) b_trip.push_back({r, col, val});
    const int fine = row.meta.fine_patch;
    const int coarse = couplings[row.meta.interface].coarse;
    for (const auto& [dof, val] : row.fine_local) bl_trip[fine].push_back({r, dof, val});
    for (const auto& [dof, val] : row.coarse_local) bl_trip[coarse].push_back({r, dof, val});
  }
  cs.b = SparseMatrix::from_triplets(n_dual, cs.skeleton.total, b_trip);
  cs.b_local.reserve(np);
  for (int k = 0; k < np; ++k)
    cs.b_local.push_back(SparseMatrix::from_triplets(n_dual, layouts[k].n_total, bl_trip[k]));

  // Lemma-1 sanity: the selection map row -> +1 entry is injective.
  std::vector<int> sorted_iz = cs.i_z;
  std::sort(sorted_iz.begin(), sorted_iz.end());
  if (std::adjacent_find(sorted_iz.begin(), sorted_iz.end()) != sorted_iz.end())
    throw CouplingError("build_constraints: a skeleton DOF carries two +1 entries");
  return cs;
}

bool schoenberg_whitney_edge(const KnotVector& kv, const std::vector<double>& params) {
  std::vector<double> ts = params;
  std::sort(ts.begin(), ts.end());
  std::vector<bool> used(kv.num_basis(), false);
  for (double t : ts) {
    const BasisValues bv = eval_basis(kv, t);
    int pick = -1;
    for (std::size_t j = 0; j < bv.values.size(); ++j) {
      const int idx = bv.first + static_cast<int>(j);
      if (bv.values[j] > kEntryTol && !used[idx]) {
        pick = idx;
        break;
      }
    }
    if (pick < 0) return false;
    used[pick] = true;
  }
  return true;
}

SchoenbergWhitneyReport check_schoenberg_whitney(const MultiPatchTopology& topo,
                                                 const std::vector<InterfaceCoupling>&) {
  SchoenbergWhitneyReport report;
  // Collect edge-interior vertex parameters per (patch, side).
  std::vector<std::array<std::vector<double>, 4>> interior(topo.patches.size());
  for (const Vertex& v : topo.vertices)
    for (const VertexIncidence& inc : v.incidences)
      if (inc.corner < 0) interior[inc.patch][static_cast<int>(inc.side)].push_back(inc.t);
  for (std::size_t k = 0; k < topo.patches.size(); ++k)
    for (int s = 0; s < 4; ++s) {
      if (interior[k][s].empty()) continue;
      std::vector<double> params = interior[k][s];
      params.push_back(0.0);
      params.push_back(1.0);
      const Side side = static_cast<Side>(s);
      EdgeCheck check{static_cast<int>(k), side, static_cast<int>(params.size()),
                      schoenberg_whitney_edge(edge_knots(topo.patches[k], side), params)};
      report.all_pass = report.all_pass && check.pass;
      report.edges.push_back(check);
    }
  return report;
}

std::vector<int> check_consistency(const MultiPatchTopology& topo,
                                   const std::vector<InterfaceCoupling>& couplings) {
  std::vector<int> violations;
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const InterfaceCoupling& cpl = couplings[i];
    if (cpl.equal_spaces) continue;
    if (topo.patches[cpl.refined].nu > topo.patches[cpl.coarse].nu)
      violations.push_back(static_cast<int>(i));
  }
  return violations;
}

}  // namespace ieti
