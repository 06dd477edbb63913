#include "support/fixtures.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ieti/assembly.hpp"

namespace ieti::testing {

namespace {

KnotVector refined(KnotVector kv, int times) {
  for (int i = 0; i < times; ++i) kv = dyadic_refine(kv);
  return kv;
}

}  // namespace

Patch square_patch(Point2 lo, Point2 hi, int degree, int intervals, double nu) {
  Patch p{make_bilinear({lo.x, lo.y}, {hi.x, lo.y}, {lo.x, hi.y}, {hi.x, hi.y}),
          KnotVector::uniform(degree, intervals), KnotVector::uniform(degree, intervals), nu, 0,
          -1};
  return p;
}

std::vector<Patch> two_matching_squares(int degree, int intervals) {
  return {square_patch({0, 0}, {1, 1}, degree, intervals),
          square_patch({1, 0}, {2, 1}, degree, intervals)};
}

std::vector<Patch> two_nested_squares(int degree, int coarse_intervals) {
  std::vector<Patch> p = two_matching_squares(degree, coarse_intervals);
  p[1].kv1 = dyadic_refine(p[1].kv1);
  p[1].kv2 = dyadic_refine(p[1].kv2);
  p[1].level = 1;
  return p;
}

std::vector<Patch> t_junction_triple(int degree, int intervals) {
  return {square_patch({0, 0}, {2, 2}, degree, intervals),
          square_patch({2, 0}, {3, 1}, degree, intervals),
          square_patch({2, 1}, {3, 2}, degree, intervals)};
}

std::vector<Patch> four_patch_cross(int degree, int intervals) {
  return {square_patch({0, 0}, {1, 1}, degree, intervals),
          square_patch({1, 0}, {2, 1}, degree, intervals),
          square_patch({0, 1}, {1, 2}, degree, intervals),
          square_patch({1, 1}, {2, 2}, degree, intervals)};
}

std::vector<Patch> flipped_pair(int degree, int intervals) {
  Patch left = square_patch({0, 0}, {1, 1}, degree, intervals);
  // Right patch parameterized so its west edge runs downward along x = 1.
  Patch right{make_bilinear({1, 1}, {2, 1}, {1, 0}, {2, 0}),
              KnotVector::uniform(degree, intervals), KnotVector::uniform(degree, intervals),
              1.0, 0, -1};
  return {left, right};
}

std::vector<Patch> annulus_checkerboard(int degree, int rows, int cols, double nu_even,
                                        double nu_odd, int base_refines, int extra_odd_refines) {
  const double pi = 3.14159265358979323846;
  std::vector<Patch> out;
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double r0 = 1.0 + static_cast<double>(i) / rows;
      const double r1 = 1.0 + static_cast<double>(i + 1) / rows;
      const double t0 = 0.5 * pi * static_cast<double>(j) / cols;
      const double t1 = 0.5 * pi * static_cast<double>(j + 1) / cols;
      const bool even = (i + j) % 2 == 0;
      const int extra = even ? 0 : extra_odd_refines;
      KnotVector kv = refined(KnotVector::uniform(degree, degree + 1), base_refines + extra);
      Patch p{make_annulus_sector({0, 0}, r0, r1, t0, t1), kv, kv, even ? nu_even : nu_odd,
              base_refines + extra, -1};
      out.push_back(std::move(p));
    }
  return out;
}

Vector interpolate_coefficients(const Patch& patch,
                                const std::function<double(double, double)>& f) {
  const std::vector<double> g1 = greville(patch.kv1);
  const std::vector<double> g2 = greville(patch.kv2);
  const std::size_t n1 = g1.size(), n2 = g2.size();
  const auto collocation = [](const KnotVector& kv, const std::vector<double>& pts) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(pts.size(), pts.size());
    for (std::size_t a = 0; a < pts.size(); ++a) {
      const BasisValues bv = eval_basis(kv, pts[a]);
      for (std::size_t j = 0; j < bv.values.size(); ++j) m(a, bv.first + j) = bv.values[j];
    }
    return m;
  };
  Eigen::MatrixXd values(n1, n2);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      const Point2 q = eval_map(*patch.geometry, g1[a], g2[b]);
      values(a, b) = f(q.x, q.y);
    }
  // Solve M1 * C * M2^T = V for the coefficient grid C.
  Eigen::MatrixXd c = collocation(patch.kv1, g1).partialPivLu().solve(values);
  c = collocation(patch.kv2, g2).partialPivLu().solve(c.transpose()).transpose();
  Vector coef(n1 * n2, 0.0);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) coef[a + n1 * b] = c(a, b);
  return coef;
}

Vector reduce_coefficients(const DofLayout& layout, const Vector& full) {
  Vector out(layout.n_total, 0.0);
  for (std::size_t i = 0; i < layout.n_total; ++i) out[i] = full[layout.new_to_old[i]];
  return out;
}

Vector expand_coefficients(const DofLayout& layout, const Vector& reduced) {
  Vector out(layout.n1 * layout.n2, 0.0);
  for (std::size_t i = 0; i < layout.n_total; ++i) out[layout.new_to_old[i]] = reduced[i];
  return out;
}

std::pair<double, double> physical_gradient(const Patch& patch, const Vector& coef, double xi1,
                                            double xi2) {
  const BasisDerivs b1 = eval_derivs(patch.kv1, xi1, 1);
  const BasisDerivs b2 = eval_derivs(patch.kv2, xi2, 1);
  const std::size_t n1 = patch.kv1.num_basis();
  double d1 = 0.0, d2 = 0.0;
  for (int j = 0; j <= patch.kv2.degree(); ++j)
    for (int i = 0; i <= patch.kv1.degree(); ++i) {
      const double c = coef[(b1.first + i) + n1 * (b2.first + j)];
      d1 += c * b1.values(1, i) * b2.values(0, j);
      d2 += c * b1.values(0, i) * b2.values(1, j);
    }
  const Matrix2 inv = eval_jacobian(*patch.geometry, xi1, xi2).inverse();
  return {inv.a11 * d1 + inv.a21 * d2, inv.a12 * d1 + inv.a22 * d2};
}

std::vector<Patch> l_shape_patches(int degree, int intervals) {
  return {square_patch({0, 0}, {1, 1}, degree, intervals),
          square_patch({1, 0}, {2, 1}, degree, intervals),
          square_patch({0, 1}, {1, 2}, degree, intervals)};
}

double smooth_rhs(double x, double y) { return 1.0 + std::sin(1.3 * x) + std::cos(0.7 * y); }

BuiltSystem build_system(std::vector<Patch> patches, bool floating, RhsFunction rhs) {
  BuiltSystem s;
  s.topo = build_topology(std::move(patches));
  if (floating) s.topo.dirichlet_edges.clear();
  s.couplings = order_interfaces(s.topo);
  s.layouts = build_layouts(s.topo);
  s.cs = build_constraints(s.topo, s.couplings, s.layouts);
  s.systems = assemble_systems(s.topo, s.layouts, rhs);
  return s;
}

double energy_quadrature(const Patch& patch, const Vector& coef, int points) {
  const QuadratureRule q = gauss_legendre(points);
  double total = 0.0;
  const auto bp1 = patch.kv1.breakpoints();
  const auto bp2 = patch.kv2.breakpoints();
  for (std::size_t s1 = 0; s1 + 1 < bp1.size(); ++s1)
    for (std::size_t s2 = 0; s2 + 1 < bp2.size(); ++s2) {
      const double l1 = bp1[s1 + 1] - bp1[s1], l2 = bp2[s2 + 1] - bp2[s2];
      for (std::size_t a = 0; a < q.nodes.size(); ++a)
        for (std::size_t b = 0; b < q.nodes.size(); ++b) {
          const double x1 = bp1[s1] + l1 * q.nodes[a];
          const double x2 = bp2[s2] + l2 * q.nodes[b];
          const auto [gx, gy] = physical_gradient(patch, coef, x1, x2);
          const double det = std::abs(eval_jacobian(*patch.geometry, x1, x2).det());
          total += q.weights[a] * q.weights[b] * l1 * l2 * det * patch.nu * (gx * gx + gy * gy);
        }
    }
  return total;
}

}  // namespace ieti::testing
