#include "ieti/topology.hpp"

#include <algorithm>
#include <cmath>

namespace ieti {

namespace {

constexpr double kParamTol = 1e-6;  // edge-parameter tolerance for classification

}  // namespace

std::array<double, 2> side_param(Side s, double t) {
  switch (s) {
    case Side::South: return {t, 0.0};
    case Side::East: return {1.0, t};
    case Side::North: return {t, 1.0};
    case Side::West: return {0.0, t};
  }
  return {0.0, 0.0};
}

Point2 side_point(const GeometryMap& g, Side s, double t) {
  const auto xi = side_param(s, t);
  return eval_map(g, xi[0], xi[1]);
}

bool MultiPatchTopology::is_dirichlet(int patch, Side side) const {
  return std::find(dirichlet_edges.begin(), dirichlet_edges.end(),
                   std::make_pair(patch, side)) != dirichlet_edges.end();
}

std::vector<int> MultiPatchTopology::interfaces_of(int patch) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < interfaces.size(); ++i)
    if (interfaces[i].k == patch || interfaces[i].l == patch) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

struct EdgeRef {
  int patch;
  Side side;
  const GeometryMap* geom;
  Point2 p0, p1;  // endpoints at edge parameter 0 and 1
};

struct Projection {
  double t = 0.0;
  double dist = 0.0;
};

// Nearest point on the (smooth) edge curve to q: dense sampling plus local
// ternary refinement.
Projection project_to_edge(const EdgeRef& e, const Point2& q) {
  const int n = 128;
  double best_t = 0.0, best_d = distance(side_point(*e.geom, e.side, 0.0), q);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double d = distance(side_point(*e.geom, e.side, t), q);
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  double lo = std::max(0.0, best_t - 1.0 / n), hi = std::min(1.0, best_t + 1.0 / n);
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (distance(side_point(*e.geom, e.side, m1), q) <
        distance(side_point(*e.geom, e.side, m2), q))
      hi = m2;
    else
      lo = m1;
  }
  const double t = 0.5 * (lo + hi);
  return {t, distance(side_point(*e.geom, e.side, t), q)};
}

bool on_edge(const EdgeRef& e, const Point2& q, double tol, double* t_out = nullptr) {
  Projection pr = project_to_edge(e, q);
  if (t_out) *t_out = pr.t;
  return pr.dist < tol;
}

// Is the sub-curve [t0,t1] of e1 geometrically contained in e2? (3 interior probes)
bool segment_on_edge(const EdgeRef& e1, double t0, double t1, const EdgeRef& e2, double tol) {
  for (double s : {0.25, 0.5, 0.75}) {
    const Point2 q = side_point(*e1.geom, e1.side, t0 + s * (t1 - t0));
    if (!on_edge(e2, q, tol)) return false;
  }
  return true;
}

}  // namespace

MultiPatchTopology build_topology(std::vector<Patch> patches, double tol) {
  MultiPatchTopology topo;
  topo.patches = std::move(patches);
  const int np = static_cast<int>(topo.patches.size());

  std::vector<EdgeRef> edges;
  edges.reserve(4 * np);
  for (int k = 0; k < np; ++k)
    for (Side s : {Side::South, Side::East, Side::North, Side::West}) {
      const GeometryMap* g = topo.patches[k].geometry.get();
      edges.push_back({k, s, g, side_point(*g, s, 0.0), side_point(*g, s, 1.0)});
    }

  // ---- interfaces ----------------------------------------------------------
  for (std::size_t a = 0; a < edges.size(); ++a) {
    for (std::size_t b = a + 1; b < edges.size(); ++b) {
      const EdgeRef& e1 = edges[a];
      const EdgeRef& e2 = edges[b];
      if (e1.patch == e2.patch) continue;
      double tq0 = 0, tq1 = 0, tr0 = 0, tr1 = 0;
      const bool q0 = on_edge(e1, e2.p0, tol, &tq0);
      const bool q1 = on_edge(e1, e2.p1, tol, &tq1);
      const bool r0 = on_edge(e2, e1.p0, tol, &tr0);
      const bool r1 = on_edge(e2, e1.p1, tol, &tr1);

      Interface f;
      f.k = e1.patch;
      f.l = e2.patch;
      f.side_k = e1.side;
      f.side_l = e2.side;

      if (q0 && q1 && r0 && r1 && segment_on_edge(e2, 0.0, 1.0, e1, tol)) {
        // coincident edges
        f.flipped = tq0 > tq1;
      } else if (q0 && q1 && std::abs(tq1 - tq0) > kParamTol &&
                 segment_on_edge(e2, 0.0, 1.0, e1, tol)) {
        // e2 is a sub-edge of e1
        f.a_k = std::min(tq0, tq1);
        f.b_k = std::max(tq0, tq1);
        f.flipped = tq0 > tq1;
      } else if (r0 && r1 && std::abs(tr1 - tr0) > kParamTol &&
                 segment_on_edge(e1, 0.0, 1.0, e2, tol)) {
        // e1 is a sub-edge of e2
        f.a_l = std::min(tr0, tr1);
        f.b_l = std::max(tr0, tr1);
        f.flipped = tr0 > tr1;
      } else if ((q0 || q1) && (r0 || r1)) {
        // one endpoint of each lies on the other: either a corner touch or a
        // non-admissible partial overlap
        const double tq = q0 ? tq0 : tq1;
        const double tp = r0 ? 0.0 : 1.0;  // e1's own endpoint parameter
        const double lo = std::min(tq, tp), hi = std::max(tq, tp);
        if (hi - lo > kParamTol && segment_on_edge(e1, lo, hi, e2, tol))
          throw NonAdmissibleDecomposition(
              "build_topology: edges overlap in a partial edge of both patches");
        continue;
      } else {
        continue;
      }
      const double tk = 0.5 * (f.a_k + f.b_k);
      f.midpoint = side_point(*e1.geom, e1.side, tk);
      topo.interfaces.push_back(f);
    }
  }
  std::sort(topo.interfaces.begin(), topo.interfaces.end(),
            [&](const Interface& x, const Interface& y) {
              if (std::abs(x.midpoint.y - y.midpoint.y) > tol) return x.midpoint.y < y.midpoint.y;
              return x.midpoint.x < y.midpoint.x;
            });

  // ---- vertices -------------------------------------------------------------
  std::vector<Point2> positions;
  for (int k = 0; k < np; ++k) {
    const GeometryMap& g = *topo.patches[k].geometry;
    for (const Point2 c : {eval_map(g, 0, 0), eval_map(g, 1, 0), eval_map(g, 1, 1),
                           eval_map(g, 0, 1)}) {
      bool dup = false;
      for (const Point2& p : positions)
        if (distance(p, c) < tol) {
          dup = true;
          break;
        }
      if (!dup) positions.push_back(c);
    }
  }
  std::sort(positions.begin(), positions.end(), [&](const Point2& p, const Point2& q) {
    if (std::abs(p.y - q.y) > tol) return p.y < q.y;
    return p.x < q.x;
  });

  for (const Point2& pos : positions) {
    Vertex v;
    v.position = pos;
    for (int k = 0; k < np; ++k) {
      const GeometryMap& g = *topo.patches[k].geometry;
      const Point2 corners[4] = {eval_map(g, 0, 0), eval_map(g, 1, 0), eval_map(g, 1, 1),
                                 eval_map(g, 0, 1)};
      int corner = -1;
      for (int c = 0; c < 4; ++c)
        if (distance(corners[c], pos) < tol) corner = c;
      if (corner >= 0) {
        v.incidences.push_back({k, corner, Side::South, 0.0});
        continue;
      }
      for (Side s : {Side::South, Side::East, Side::North, Side::West}) {
        const EdgeRef& e = edges[4 * k + static_cast<int>(s)];
        double t = 0.0;
        if (on_edge(e, pos, tol, &t) && t > kParamTol && t < 1.0 - kParamTol) {
          v.incidences.push_back({k, -1, s, t});
          v.t_junction = true;
        }
      }
    }
    topo.vertices.push_back(std::move(v));
  }

  // ---- Dirichlet boundary ---------------------------------------------------
  for (int k = 0; k < np; ++k)
    for (Side s : {Side::South, Side::East, Side::North, Side::West}) {
      double covered = 0.0;
      for (const Interface& f : topo.interfaces) {
        if (f.k == k && f.side_k == s) covered += f.b_k - f.a_k;
        if (f.l == k && f.side_l == s) covered += f.b_l - f.a_l;
      }
      if (covered < kParamTol)
        topo.dirichlet_edges.emplace_back(k, s);
      else if (covered < 1.0 - kParamTol)
        throw TopologyError("build_topology: patch edge is only partially coupled; "
                            "domains with notched boundaries are not supported");
    }

  return topo;
}

AssumptionsReport check_assumptions(const MultiPatchTopology& topo) {
  AssumptionsReport rep;
  rep.admissible = true;
  for (const Patch& p : topo.patches) {
    PatchRegularity r;
    const GeometryMap& g = *p.geometry;
    // longest edge arc length as the patch size H
    double h_size = 0.0;
    for (Side s : {Side::South, Side::East, Side::North, Side::West}) {
      double len = 0.0;
      Point2 prev = side_point(g, s, 0.0);
      for (int i = 1; i <= 100; ++i) {
        const Point2 cur = side_point(g, s, i / 100.0);
        len += distance(prev, cur);
        prev = cur;
      }
      h_size = std::max(h_size, len);
    }
    double sup_j = 0.0, sup_jinv = 0.0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const Matrix2 jac = eval_jacobian(g, (i + 0.5) / 20.0, (j + 0.5) / 20.0);
        sup_j = std::max(sup_j, jac.norm2());
        sup_jinv = std::max(sup_jinv, jac.inverse().norm2());
      }
    r.c_geometry = std::max(sup_j / h_size, sup_jinv * h_size);
    const double h_max = std::max(p.kv1.grid_size(), p.kv2.grid_size());
    const double h_min = std::min(p.kv1.min_span(), p.kv2.min_span());
    r.c_quasi_uniformity = h_min / h_max;
    r.jacobian_one_signed = validate_geometry(g);
    if (!r.jacobian_one_signed) rep.admissible = false;
    rep.per_patch.push_back(r);
  }
  return rep;
}

}  // namespace ieti
