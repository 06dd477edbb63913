#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ieti/coupling.hpp"
#include "support/fixtures.hpp"

using namespace ieti;
using namespace ieti::testing;

namespace {

double eval_trace(const KnotVector& kv, const Vector& coef, double t) {
  const BasisValues bv = eval_basis(kv, t);
  double s = 0.0;
  for (std::size_t j = 0; j < bv.values.size(); ++j) s += coef[bv.first + j] * bv.values[j];
  return s;
}

struct Built {
  MultiPatchTopology topo;
  std::vector<InterfaceCoupling> couplings;
  std::vector<DofLayout> layouts;
  ConstraintSystem cs;
};

Built build(std::vector<Patch> patches, bool floating) {
  Built b;
  b.topo = build_topology(std::move(patches));
  if (floating) b.topo.dirichlet_edges.clear();
  b.couplings = order_interfaces(b.topo);
  b.layouts = build_layouts(b.topo);
  b.cs = build_constraints(b.topo, b.couplings, b.layouts);
  return b;
}

}  // namespace

TEST_CASE("matching pair: tie broken toward the lower patch index, identity embedding") {
  const MultiPatchTopology topo = build_topology(two_matching_squares(2, 3));
  const auto couplings = order_interfaces(topo);
  REQUIRE(couplings.size() == 1);
  const InterfaceCoupling& c = couplings[0];
  CHECK(c.coarse == 0);
  CHECK(c.refined == 1);
  CHECK(c.equal_spaces);
  CHECK(!c.flipped);
  CHECK(c.coarse_a == doctest::Approx(0.0));
  CHECK(c.coarse_b == doctest::Approx(1.0));
  REQUIRE(c.coarse_trace.size() == 5);
  REQUIRE(c.embedding.rows() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(c.embedding(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
}

TEST_CASE("nested pair: refined side detected, embedding equals knot insertion") {
  const MultiPatchTopology topo = build_topology(two_nested_squares(2, 3));
  const auto couplings = order_interfaces(topo);
  REQUIRE(couplings.size() == 1);
  const InterfaceCoupling& c = couplings[0];
  CHECK(c.refined == 1);
  CHECK(c.coarse == 0);
  CHECK(!c.equal_spaces);
  const KnotVector& coarse = edge_knots(topo.patches[0], c.coarse_side);
  const KnotVector& fine = edge_knots(topo.patches[1], c.refined_side);
  const DenseMatrix oracle = insert_knots(coarse, fine).to_dense();
  REQUIRE(c.embedding.rows() == oracle.rows());
  REQUIRE(c.embedding.cols() == oracle.cols());
  for (std::size_t i = 0; i < oracle.rows(); ++i)
    for (std::size_t j = 0; j < oracle.cols(); ++j)
      CHECK(c.embedding(i, j) == doctest::Approx(oracle(i, j)).epsilon(1e-12));
}

TEST_CASE("refined side may carry the lower patch index") {
  std::vector<Patch> patches{square_patch({0, 0}, {1, 1}, 1, 4),
                             square_patch({1, 0}, {2, 1}, 1, 2)};
  const auto couplings = order_interfaces(build_topology(std::move(patches)));
  REQUIRE(couplings.size() == 1);
  CHECK(couplings[0].refined == 0);
  CHECK(couplings[0].coarse == 1);
  CHECK(!couplings[0].equal_spaces);
}

TEST_CASE("flipped matching pair embeds with reversed columns") {
  const MultiPatchTopology topo = build_topology(flipped_pair(2, 3));
  const auto couplings = order_interfaces(topo);
  REQUIRE(couplings.size() == 1);
  const InterfaceCoupling& c = couplings[0];
  CHECK(c.flipped);
  CHECK(c.equal_spaces);
  const std::size_t n = c.embedding.rows();
  REQUIRE(n == 5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      CHECK(c.embedding(i, j) == doctest::Approx(i + j == n - 1 ? 1.0 : 0.0).epsilon(1e-13));
}

TEST_CASE("T-junction couplings: sub-edge side refined, alive coarse functions identified") {
  const MultiPatchTopology topo = build_topology(t_junction_triple(2, 3));
  const auto couplings = order_interfaces(topo);
  REQUIRE(couplings.size() == 3);

  CHECK(couplings[0].coarse == 0);
  CHECK(couplings[0].refined == 1);
  CHECK(couplings[0].coarse_a == doctest::Approx(0.0));
  CHECK(couplings[0].coarse_b == doctest::Approx(0.5));
  CHECK(!couplings[0].equal_spaces);
  CHECK(couplings[0].coarse_trace == std::vector<int>{0, 1, 2, 3});
  CHECK(couplings[0].embedding.rows() == 5);
  CHECK(couplings[0].embedding.cols() == 4);

  CHECK(couplings[1].coarse == 1);
  CHECK(couplings[1].refined == 2);
  CHECK(couplings[1].equal_spaces);

  CHECK(couplings[2].coarse == 0);
  CHECK(couplings[2].refined == 2);
  CHECK(couplings[2].coarse_a == doctest::Approx(0.5));
  CHECK(couplings[2].coarse_b == doctest::Approx(1.0));
  CHECK(couplings[2].coarse_trace == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("incomparable or degree-mismatched trace spaces are rejected") {
  {
    std::vector<Patch> patches{square_patch({0, 0}, {1, 1}, 1, 2),
                               square_patch({1, 0}, {2, 1}, 1, 3)};
    CHECK_THROWS_AS(order_interfaces(build_topology(std::move(patches))), NotNested);
  }
  {
    std::vector<Patch> patches{square_patch({0, 0}, {1, 1}, 1, 2),
                               square_patch({1, 0}, {2, 1}, 2, 2)};
    CHECK_THROWS_AS(order_interfaces(build_topology(std::move(patches))), NotNested);
  }
}

TEST_CASE("embeddings reproduce coarse traces across fixtures") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<std::vector<Patch>> fixtures = {
      two_matching_squares(2, 3),     two_nested_squares(3, 2),
      t_junction_triple(2, 3),        flipped_pair(2, 3),
      annulus_checkerboard(2, 2, 2, 1.0, 1000.0, 0, 1)};
  for (const auto& patches : fixtures) {
    const MultiPatchTopology topo = build_topology(patches);
    for (const InterfaceCoupling& c : order_interfaces(topo)) {
      const KnotVector& fine = edge_knots(topo.patches[c.refined], c.refined_side);
      const KnotVector& coarse = edge_knots(topo.patches[c.coarse], c.coarse_side);
      // Entries nonnegative, rows sum to one (partition of unity transported).
      for (std::size_t i = 0; i < c.embedding.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < c.embedding.cols(); ++j) {
          CHECK(c.embedding(i, j) >= -1e-13);
          sum += c.embedding(i, j);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-11));
      }
      Vector cc(c.coarse_trace.size());
      for (double& v : cc) v = u(rng);
      Vector full_coarse(coarse.num_basis(), 0.0);
      for (std::size_t j = 0; j < cc.size(); ++j) full_coarse[c.coarse_trace[j]] = cc[j];
      const Vector fc = c.embedding.multiply(cc);
      for (int s = 0; s <= 50; ++s) {
        const double t = static_cast<double>(s) / 50.0;
        const double frac = c.flipped ? 1.0 - t : t;
        const double sc = c.coarse_a + (c.coarse_b - c.coarse_a) * frac;
        CHECK(eval_trace(fine, fc, t) ==
              doctest::Approx(eval_trace(coarse, full_coarse, sc)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("floating matching pair p=1: endpoint rows primal, one dual row") {
  Built b = build(two_matching_squares(1, 2), /*floating=*/true);
  CHECK(b.cs.n_dual() == 1);
  CHECK(b.cs.b.nnz() == 2);
  REQUIRE(b.cs.rows.size() == 1);
  CHECK(b.cs.rows[0].fine_patch == 1);
  CHECK(b.cs.rows[0].fine_edge_index == 1);
  // The +1 sits at the refined patch's edge midpoint, the -1 on the coarse side.
  std::vector<double> vals(b.cs.b.values());
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(-1.0));
  CHECK(vals[1] == doctest::Approx(1.0));
  CHECK(b.cs.i_z.size() == 1);
  CHECK(b.cs.skeleton.local(b.cs.i_z[0]).first == 1);

  CHECK(b.cs.n_primal == 6);
  REQUIRE(b.cs.c.size() == 2);
  CHECK(b.cs.c[0].rows() == 4);
  CHECK(b.cs.c[1].rows() == 4);
  for (int k = 0; k < 2; ++k)
    for (double v : b.cs.c[k].values()) CHECK(v == doctest::Approx(1.0));
  // Shared vertices tie the two patches to the same global primal DOF.
  std::set<int> left, right;
  for (const PrimalRow& r : b.cs.primal_rows[0]) left.insert(r.global_index);
  for (const PrimalRow& r : b.cs.primal_rows[1]) right.insert(r.global_index);
  std::vector<int> shared;
  std::set_intersection(left.begin(), left.end(), right.begin(), right.end(),
                        std::back_inserter(shared));
  CHECK(shared.size() == 2);
}

TEST_CASE("Dirichlet boundary removes vertex rows and fixes all vertices") {
  Built b = build(two_matching_squares(1, 2), /*floating=*/false);
  CHECK(b.cs.n_dual() == 1);
  CHECK(b.cs.n_primal == 0);
  CHECK(b.cs.c[0].rows() == 0);
  CHECK(b.cs.c[1].rows() == 0);
  for (int g : b.cs.vertex_primal) CHECK(g == -1);
}

TEST_CASE("nested p=1 interior dual row averages the coarse endpoints") {
  std::vector<Patch> patches{square_patch({0, 0}, {1, 1}, 1, 1),
                             square_patch({1, 0}, {2, 1}, 1, 2)};
  Built b = build(std::move(patches), /*floating=*/true);
  REQUIRE(b.cs.n_dual() == 1);
  CHECK(b.cs.rows[0].fine_patch == 1);
  const DenseMatrix row = b.cs.b.to_dense();
  Vector vals;
  for (std::size_t j = 0; j < row.cols(); ++j)
    if (std::abs(row(0, j)) > 1e-14) vals.push_back(row(0, j));
  std::sort(vals.begin(), vals.end());
  REQUIRE(vals.size() == 3);
  CHECK(vals[0] == doctest::Approx(-0.5));
  CHECK(vals[1] == doctest::Approx(-0.5));
  CHECK(vals[2] == doctest::Approx(1.0));
}

TEST_CASE("cross fixture: one free vertex, one primal row per patch") {
  Built b = build(four_patch_cross(1, 2), /*floating=*/false);
  CHECK(b.cs.n_primal == 1);
  int free_count = 0;
  for (int g : b.cs.vertex_primal)
    if (g >= 0) ++free_count;
  CHECK(free_count == 1);
  for (int k = 0; k < 4; ++k) {
    REQUIRE(b.cs.c[k].rows() == 1);
    CHECK(b.cs.c[k].nnz() == 1);
    CHECK(b.cs.c[k].values()[0] == doctest::Approx(1.0));
    CHECK(b.cs.primal_rows[k][0].global_index == 0);
  }
}

TEST_CASE("T-junction vertex couples three patches through one primal DOF") {
  Built b = build(t_junction_triple(2, 3), /*floating=*/false);
  CHECK(b.cs.n_primal == 1);
  for (int k = 0; k < 3; ++k) {
    REQUIRE(b.cs.c[k].rows() == 1);
    CHECK(b.cs.primal_rows[k][0].global_index == 0);
  }
  // Host-edge evaluation row: positive entries summing to one.
  const SparseMatrix& host = b.cs.c[0];
  CHECK(host.nnz() == 3);
  double sum = 0.0;
  for (double v : host.values()) {
    CHECK(v > 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constraints annihilate interpolants of a globally smooth polynomial") {
  const auto f = [](double x, double y) {
    return x * x * y * y + 2.0 * x * y * y - x * x + 3.0 * x - y + 1.0;
  };
  const std::vector<std::vector<Patch>> fixtures = {
      two_matching_squares(2, 3), two_nested_squares(2, 2), t_junction_triple(2, 3),
      flipped_pair(2, 3), four_patch_cross(2, 2)};
  for (const auto& patches : fixtures) {
    Built b = build(patches, /*floating=*/true);
    // Skeleton vector of the per-patch interpolants.
    Vector w(b.cs.skeleton.total, 0.0);
    std::vector<Vector> local(patches.size());
    double wmax = 0.0;
    for (std::size_t k = 0; k < patches.size(); ++k) {
      local[k] = reduce_coefficients(b.layouts[k],
                                     interpolate_coefficients(b.topo.patches[k], f));
      for (std::size_t d = b.layouts[k].n_interior; d < b.layouts[k].n_total; ++d) {
        w[b.cs.skeleton.index(static_cast<int>(k), static_cast<int>(d))] = local[k][d];
        wmax = std::max(wmax, std::abs(local[k][d]));
      }
    }
    const Vector bw = spmv(b.cs.b, w);
    for (double v : bw) CHECK(std::abs(v) <= 1e-9 * wmax);
    // Primal rows evaluate the same vertex values on every incident patch.
    for (std::size_t k = 0; k < patches.size(); ++k) {
      const Vector cw = spmv(b.cs.c[k], local[k]);
      for (std::size_t r = 0; r < cw.size(); ++r) {
        const Point2 q = b.topo.vertices[b.cs.primal_rows[k][r].vertex].position;
        CHECK(cw[r] == doctest::Approx(f(q.x, q.y)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("every dual row has one +1 and otherwise nonpositive entries") {
  const std::vector<std::vector<Patch>> fixtures = {
      two_matching_squares(2, 3), two_nested_squares(2, 2), t_junction_triple(2, 3),
      flipped_pair(3, 2), annulus_checkerboard(2, 4, 4, 1.0, 1000.0, 0, 1)};
  for (const auto& patches : fixtures) {
    for (bool floating : {false, true}) {
      Built b = build(patches, floating);
      const auto& m = b.cs.b;
      for (std::size_t r = 0; r < m.rows(); ++r) {
        int positives = 0;
        for (int e = m.row_ptr()[r]; e < m.row_ptr()[r + 1]; ++e) {
          if (m.values()[e] > 1e-14) {
            ++positives;
            CHECK(m.values()[e] == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(m.col_idx()[e] == b.cs.i_z[r]);
          }
        }
        CHECK(positives == 1);
      }
      // Selection injectivity.
      std::set<int> uniq(b.cs.i_z.begin(), b.cs.i_z.end());
      CHECK(uniq.size() == b.cs.i_z.size());
    }
  }
}

TEST_CASE("aligned and flipped gluings produce the same constraints up to row order") {
  const auto canonical = [](const Built& b) {
    std::vector<std::vector<std::pair<double, double>>> rows;
    for (std::size_t r = 0; r < b.cs.b.rows(); ++r) {
      std::vector<std::pair<double, double>> row;  // (arc position of DOF, value)
      for (int e = b.cs.b.row_ptr()[r]; e < b.cs.b.row_ptr()[r + 1]; ++e) {
        const auto [patch, dof] = b.cs.skeleton.local(b.cs.b.col_idx()[e]);
        // Locate the DOF on its edge through the Greville abscissa.
        double key = 1e9;
        for (int s = 0; s < 4 && key > 1e8; ++s) {
          const auto& aligned = b.layouts[patch].edge_aligned[s];
          for (std::size_t j = 0; j < aligned.size(); ++j)
            if (aligned[j] == dof) {
              const Side side = static_cast<Side>(s);
              const double t = greville(edge_knots(b.topo.patches[patch], side))[j];
              const Point2 q = side_point(*b.topo.patches[patch].geometry, side, t);
              key = q.y * 1e3 + q.x;  // interface is vertical: y locates the DOF
              break;
            }
        }
        row.emplace_back(std::round(key * 1e6) / 1e6, b.cs.b.values()[e]);
      }
      std::sort(row.begin(), row.end());
      rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  const auto lhs = canonical(build(two_matching_squares(2, 3), true));
  const auto rhs = canonical(build(flipped_pair(2, 3), true));
  REQUIRE(lhs.size() == rhs.size());
  for (std::size_t r = 0; r < lhs.size(); ++r) {
    REQUIRE(lhs[r].size() == rhs[r].size());
    for (std::size_t e = 0; e < lhs[r].size(); ++e) {
      CHECK(lhs[r][e].first == doctest::Approx(rhs[r][e].first).epsilon(1e-9));
      CHECK(lhs[r][e].second == doctest::Approx(rhs[r][e].second).epsilon(1e-11));
    }
  }
}

TEST_CASE("checkerboard 4x4 p=2 base grid constraint census") {
  Built b = build(annulus_checkerboard(2, 4, 4, 1000.0, 1.0), /*floating=*/false);
  REQUIRE(b.topo.interfaces.size() == 24);
  // Each interface edge carries 5 trace functions; the two endpoint rows are
  // vertex rows (interior vertices -> primal) or Dirichlet-removed, leaving
  // three dual rows per interface.
  CHECK(b.cs.n_dual() == 72);
  CHECK(b.cs.b.nnz() == 144);  // matching interfaces: one +1, one -1 per row
  CHECK(b.cs.n_primal == 9);
  std::size_t primal_row_total = 0;
  for (const auto& rows : b.cs.primal_rows) primal_row_total += rows.size();
  CHECK(primal_row_total == 36);
}

TEST_CASE("Schoenberg-Whitney edge matching") {
  CHECK(schoenberg_whitney_edge(KnotVector::uniform(2, 4), {0.0, 0.5, 1.0}));
  CHECK(schoenberg_whitney_edge(KnotVector::uniform(1, 1), {0.0, 1.0}));
  CHECK_FALSE(
      schoenberg_whitney_edge(KnotVector::uniform(1, 1), {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}));
  CHECK(schoenberg_whitney_edge(KnotVector::uniform(1, 3), {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}));
}

TEST_CASE("Schoenberg-Whitney report over topologies") {
  {
    const MultiPatchTopology topo = build_topology(t_junction_triple(2, 3));
    const auto report = check_schoenberg_whitney(topo, order_interfaces(topo));
    REQUIRE(report.edges.size() == 1);
    CHECK(report.edges[0].patch == 0);
    CHECK(report.edges[0].side == Side::East);
    CHECK(report.edges[0].vertices == 3);
    CHECK(report.all_pass);
  }
  {
    const MultiPatchTopology topo = build_topology(four_patch_cross(2, 2));
    const auto report = check_schoenberg_whitney(topo, order_interfaces(topo));
    CHECK(report.edges.empty());
    CHECK(report.all_pass);
  }
}

TEST_CASE("consistency flags only strictly refined sides with larger nu") {
  {
    std::vector<Patch> patches = two_nested_squares(2, 2);
    patches[1].nu = 1000.0;  // refined side
    const MultiPatchTopology topo = build_topology(std::move(patches));
    CHECK(check_consistency(topo, order_interfaces(topo)) == std::vector<int>{0});
  }
  {
    std::vector<Patch> patches = two_nested_squares(2, 2);
    patches[0].nu = 1000.0;  // coarse side
    const MultiPatchTopology topo = build_topology(std::move(patches));
    CHECK(check_consistency(topo, order_interfaces(topo)).empty());
  }
  {
    std::vector<Patch> patches = two_matching_squares(2, 2);
    patches[0].nu = 1000.0;  // equal trace spaces: arbitrary jumps allowed
    const MultiPatchTopology topo = build_topology(std::move(patches));
    CHECK(check_consistency(topo, order_interfaces(topo)).empty());
  }
}
