#include "ieti/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace ieti {
namespace {

// Value and parametric derivatives up to order two of a tensor-product
// coefficient field at one parameter point.
struct Jet2 {
  double u = 0.0;
  double u1 = 0.0, u2 = 0.0;
  double u11 = 0.0, u12 = 0.0, u22 = 0.0;
};

Jet2 eval_jet(const Patch& patch, const Vector& coef, double x1, double x2) {
  const BasisDerivs b1 = eval_derivs(patch.kv1, x1, 2);
  const BasisDerivs b2 = eval_derivs(patch.kv2, x2, 2);
  const std::size_t n1 = patch.kv1.num_basis();
  Jet2 jet;
  for (std::size_t i2 = 0; i2 < b2.values.cols(); ++i2) {
    for (std::size_t i1 = 0; i1 < b1.values.cols(); ++i1) {
      const double c = coef[(b1.first + i1) + n1 * (b2.first + i2)];
      jet.u += c * b1.values(0, i1) * b2.values(0, i2);
      jet.u1 += c * b1.values(1, i1) * b2.values(0, i2);
      jet.u2 += c * b1.values(0, i1) * b2.values(1, i2);
      jet.u11 += c * b1.values(2, i1) * b2.values(0, i2);
      jet.u12 += c * b1.values(1, i1) * b2.values(1, i2);
      jet.u22 += c * b1.values(0, i1) * b2.values(2, i2);
    }
  }
  return jet;
}

struct PhysicalDerivs {
  double gx = 0.0, gy = 0.0;  // physical gradient
  double laplacian = 0.0;
};

// Push a parametric jet through the geometry map. With x = G(xi) and
// B = J^{-1}: grad_x u = B^T grad_xi u and
// Hess_x u = B^T (Hess_xi u - gx Hess_xi G_x - gy Hess_xi G_y) B,
// whose trace is the physical Laplacian.
PhysicalDerivs physical_derivs(const GeometryMap& g, double x1, double x2, const Jet2& jet) {
  const Matrix2 inv = eval_jacobian(g, x1, x2).inverse();
  PhysicalDerivs out;
  out.gx = inv.a11 * jet.u1 + inv.a21 * jet.u2;
  out.gy = inv.a12 * jet.u1 + inv.a22 * jet.u2;
  const Hessian2 h = eval_hessian(g, x1, x2);
  const double a11 = jet.u11 - out.gx * h.hx.a11 - out.gy * h.hy.a11;
  const double a12 = jet.u12 - out.gx * h.hx.a12 - out.gy * h.hy.a12;
  const double a22 = jet.u22 - out.gx * h.hx.a22 - out.gy * h.hy.a22;
  // trace(B^T A B) = sum_ij A_ij (B B^T)_ij for symmetric A.
  const double c11 = inv.a11 * inv.a11 + inv.a12 * inv.a12;
  const double c12 = inv.a11 * inv.a21 + inv.a12 * inv.a22;
  const double c22 = inv.a21 * inv.a21 + inv.a22 * inv.a22;
  out.laplacian = a11 * c11 + 2.0 * a12 * c12 + a22 * c22;
  return out;
}

double volume_residual_sq(const Patch& patch, const Vector& coef, const RhsFunction& rhs) {
  const std::vector<double> bp1 = patch.kv1.breakpoints();
  const std::vector<double> bp2 = patch.kv2.breakpoints();
  const QuadratureRule q1 = gauss_legendre(patch.kv1.degree() + 2);
  const QuadratureRule q2 = gauss_legendre(patch.kv2.degree() + 2);
  const GeometryMap& g = *patch.geometry;
  double sum = 0.0;
  for (std::size_t e2 = 0; e2 + 1 < bp2.size(); ++e2) {
    for (std::size_t e1 = 0; e1 + 1 < bp1.size(); ++e1) {
      const double len1 = bp1[e1 + 1] - bp1[e1];
      const double len2 = bp2[e2 + 1] - bp2[e2];
      for (std::size_t j = 0; j < q2.nodes.size(); ++j) {
        for (std::size_t i = 0; i < q1.nodes.size(); ++i) {
          const double x1 = bp1[e1] + len1 * q1.nodes[i];
          const double x2 = bp2[e2] + len2 * q2.nodes[j];
          const double w = len1 * q1.weights[i] * len2 * q2.weights[j];
          const Jet2 jet = eval_jet(patch, coef, x1, x2);
          const PhysicalDerivs pd = physical_derivs(g, x1, x2, jet);
          const Point2 x = eval_map(g, x1, x2);
          const double det = std::abs(eval_jacobian(g, x1, x2).det());
          const double r = rhs(x.x, x.y) + patch.nu * pd.laplacian;
          sum += w * det * r * r;
        }
      }
    }
  }
  return sum;
}

// d/dt of the physical edge point at edge parameter t.
Point2 edge_tangent(const GeometryMap& g, Side s, double t) {
  const std::array<double, 2> par = side_param(s, t);
  const Matrix2 jac = eval_jacobian(g, par[0], par[1]);
  if (s == Side::South || s == Side::North) return {jac.a11, jac.a21};
  return {jac.a12, jac.a22};
}

// Edge parameter on the coarse side whose physical point matches `target`,
// starting from the affine candidate and polished along the edge.
double match_coarse_param(const GeometryMap& g, Side side, double s0, const Point2& target) {
  double s = s0;
  for (int it = 0; it < 8; ++it) {
    const std::array<double, 2> par = side_param(side, s);
    const Point2 p = eval_map(g, par[0], par[1]);
    const Point2 tan = edge_tangent(g, side, s);
    const double tt = tan.x * tan.x + tan.y * tan.y;
    const double step = ((p.x - target.x) * tan.x + (p.y - target.y) * tan.y) / tt;
    if (std::abs(step) < 1e-15) break;
    s = std::clamp(s - step, 0.0, 1.0);
  }
  const std::array<double, 2> par = side_param(side, s);
  const double scale = 1.0 + std::hypot(target.x, target.y);
  if (distance(eval_map(g, par[0], par[1]), target) > 1e-9 * scale) {
    throw AdaptivityError("interface quadrature point has no matching point on the coarse side");
  }
  return s;
}

// Integral of the squared normal-flux jump over one interface, using the
// refined side's edge quadrature.
double interface_jump_integral(const MultiPatchTopology& topo, const InterfaceCoupling& cpl,
                               const std::vector<Vector>& full) {
  const Patch& pf = topo.patches[cpl.refined];
  const Patch& pc = topo.patches[cpl.coarse];
  const bool horizontal = cpl.refined_side == Side::South || cpl.refined_side == Side::North;
  const KnotVector& ekv = horizontal ? pf.kv1 : pf.kv2;
  const std::vector<double> bp = ekv.breakpoints();
  const QuadratureRule q = gauss_legendre(ekv.degree() + 2);
  double sum = 0.0;
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double len = bp[e + 1] - bp[e];
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double t = bp[e] + len * q.nodes[i];
      const double w = len * q.weights[i];
      const std::array<double, 2> parf = side_param(cpl.refined_side, t);
      const Point2 x = eval_map(*pf.geometry, parf[0], parf[1]);
      const Point2 tan = edge_tangent(*pf.geometry, cpl.refined_side, t);
      const double tlen = std::hypot(tan.x, tan.y);
      const Point2 normal{tan.y / tlen, -tan.x / tlen};
      const Jet2 jf = eval_jet(pf, full[cpl.refined], parf[0], parf[1]);
      const PhysicalDerivs df = physical_derivs(*pf.geometry, parf[0], parf[1], jf);
      const double flux_f = pf.nu * (df.gx * normal.x + df.gy * normal.y);
      const double affine = cpl.coarse_a + (cpl.coarse_b - cpl.coarse_a) * (cpl.flipped ? 1.0 - t : t);
      const double s = match_coarse_param(*pc.geometry, cpl.coarse_side, affine, x);
      const std::array<double, 2> parc = side_param(cpl.coarse_side, s);
      const Jet2 jc = eval_jet(pc, full[cpl.coarse], parc[0], parc[1]);
      const PhysicalDerivs dc = physical_derivs(*pc.geometry, parc[0], parc[1], jc);
      const double flux_c = pc.nu * (dc.gx * normal.x + dc.gy * normal.y);
      const double jump = flux_f - flux_c;
      sum += w * tlen * jump * jump;
    }
  }
  return sum;
}

}  // namespace

EstimatorReport estimate(const MultiPatchTopology& topo,
                         const std::vector<InterfaceCoupling>& couplings,
                         const std::vector<DofLayout>& layouts,
                         const std::vector<Vector>& solution, const RhsFunction& rhs) {
  const std::size_t n = topo.patches.size();
  if (layouts.size() != n || solution.size() != n) {
    throw DimensionMismatch("estimate: patch, layout, and solution counts disagree");
  }
  std::vector<Vector> full(n);
  for (std::size_t k = 0; k < n; ++k) {
    const DofLayout& layout = layouts[k];
    if (solution[k].size() != layout.n_total) {
      throw DimensionMismatch("estimate: solution vector does not match its layout");
    }
    full[k].assign(layout.n1 * layout.n2, 0.0);
    for (std::size_t r = 0; r < layout.n_total; ++r) {
      full[k][layout.new_to_old[r]] = solution[k][r];
    }
  }

  EstimatorReport report;
  report.eta_sq.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double h = topo.patches[k].mesh_size();
    report.eta_sq[k] = h * h * volume_residual_sq(topo.patches[k], full[k], rhs);
  }
  report.interface_jump_sq.assign(couplings.size(), 0.0);
  for (std::size_t e = 0; e < couplings.size(); ++e) {
    const double jump_sq = interface_jump_integral(topo, couplings[e], full);
    report.interface_jump_sq[e] = jump_sq;
    report.eta_sq[couplings[e].refined] += 0.5 * topo.patches[couplings[e].refined].mesh_size() * jump_sq;
    report.eta_sq[couplings[e].coarse] += 0.5 * topo.patches[couplings[e].coarse].mesh_size() * jump_sq;
  }
  report.total = std::accumulate(report.eta_sq.begin(), report.eta_sq.end(), 0.0);
  return report;
}

std::vector<int> doerfler_mark(const EstimatorReport& report, double theta) {
  if (report.eta_sq.empty() || !(report.total > 0.0)) {
    throw EmptyEstimator("marking requested for a zero error estimator");
  }
  std::vector<int> order(report.eta_sq.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return report.eta_sq[a] > report.eta_sq[b]; });
  std::vector<int> marked;
  double acc = 0.0;
  for (const int k : order) {
    marked.push_back(k);
    acc += report.eta_sq[k];
    if (acc > theta * report.total) break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::array<Patch, 4> split_patch(const Patch& patch, int parent_index) {
  const auto child = [&](double a1, double b1, double a2, double b2) {
    return Patch{sub_box(patch.geometry, a1, b1, a2, b2), patch.kv1, patch.kv2,
                 patch.nu, patch.level + 1, parent_index};
  };
  return {child(0.0, 0.5, 0.0, 0.5), child(0.5, 1.0, 0.0, 0.5), child(0.0, 0.5, 0.5, 1.0),
          child(0.5, 1.0, 0.5, 1.0)};
}

std::vector<Patch> apply_splits(const std::vector<Patch>& patches, const std::vector<int>& marked) {
  std::vector<char> split(patches.size(), 0);
  for (const int k : marked) {
    if (k < 0 || static_cast<std::size_t>(k) >= patches.size()) {
      throw AdaptivityError("marked patch index " + std::to_string(k) + " out of range");
    }
    split[k] = 1;
  }
  std::vector<Patch> out;
  out.reserve(patches.size() + 3 * marked.size());
  for (std::size_t k = 0; k < patches.size(); ++k) {
    if (split[k]) {
      for (Patch& child : split_patch(patches[k], static_cast<int>(k))) {
        out.push_back(std::move(child));
      }
    } else {
      Patch carried = patches[k];
      carried.parent = static_cast<int>(k);
      out.push_back(std::move(carried));
    }
  }
  return out;
}

namespace {

// Patches to split this round: the coarse side of every coupling violating
// the diffusion-ordering rule, plus the host of every failing edge
// interpolation check.
std::set<int> consistency_violations(const MultiPatchTopology& topo,
                                     const std::vector<InterfaceCoupling>& couplings,
                                     bool enforce_ordering) {
  std::set<int> to_split;
  if (enforce_ordering) {
    for (const int e : check_consistency(topo, couplings)) {
      to_split.insert(couplings[e].coarse);
    }
  }
  for (const EdgeCheck& edge : check_schoenberg_whitney(topo, couplings).edges) {
    if (!edge.pass) to_split.insert(edge.patch);
  }
  return to_split;
}

}  // namespace

int consistency_split(std::vector<Patch>& patches, int max_rounds, bool enforce_ordering) {
  int extra = 0;
  for (int round = 0; round < max_rounds; ++round) {
    const MultiPatchTopology topo = build_topology(patches);
    const std::vector<InterfaceCoupling> couplings = order_interfaces(topo);
    const std::set<int> to_split = consistency_violations(topo, couplings, enforce_ordering);
    if (to_split.empty()) return extra;
    patches = apply_splits(patches, std::vector<int>(to_split.begin(), to_split.end()));
    extra += 3 * static_cast<int>(to_split.size());
  }
  const MultiPatchTopology topo = build_topology(patches);
  const std::vector<InterfaceCoupling> couplings = order_interfaces(topo);
  if (consistency_violations(topo, couplings, enforce_ordering).empty()) return extra;
  throw NonTermination("consistency splitting still finds violations after " +
                       std::to_string(max_rounds) + " rounds");
}

RefinementPlan refine(const std::vector<Patch>& patches, const EstimatorReport& report,
                      double theta, int max_rounds) {
  RefinementPlan plan;
  plan.marked = doerfler_mark(report, theta);
  plan.patches = apply_splits(patches, plan.marked);
  plan.consistency_extra_patches = consistency_split(plan.patches, max_rounds);
  return plan;
}

}  // namespace ieti
