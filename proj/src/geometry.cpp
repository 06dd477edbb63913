#include "ieti/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ieti {

double Matrix2::norm2() const {
  // singular values of [[a11,a12],[a21,a22]]
  const double t = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
  const double d = det();
  const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * d * d));
  return std::sqrt(0.5 * (t + disc));
}

GeometryPtr make_bilinear(Point2 c00, Point2 c10, Point2 c01, Point2 c11) {
  return std::make_shared<GeometryMap>(GeometryMap::Variant(BilinearQuad{c00, c10, c01, c11}));
}

GeometryPtr make_annulus_sector(Point2 center, double r_inner, double r_outer, double angle0,
                                double angle1) {
  if (!(r_inner > 0.0) || !(r_outer > r_inner))
    throw GeometryError("make_annulus_sector: need 0 < r_inner < r_outer");
  return std::make_shared<GeometryMap>(
      GeometryMap::Variant(AnnulusSector{center, r_inner, r_outer, angle0, angle1}));
}

GeometryPtr make_spline_map(KnotVector kv1, KnotVector kv2, DenseMatrix control) {
  if (control.rows() != kv1.num_basis() * kv2.num_basis() || control.cols() != 2)
    throw GeometryError("make_spline_map: control net size mismatch");
  return std::make_shared<GeometryMap>(
      GeometryMap::Variant(SplineMap{std::move(kv1), std::move(kv2), std::move(control)}));
}

GeometryPtr sub_box(const GeometryPtr& parent, double a1, double b1, double a2, double b2) {
  if (!(0.0 <= a1 && a1 < b1 && b1 <= 1.0 && 0.0 <= a2 && a2 < b2 && b2 <= 1.0))
    throw GeometryError("sub_box: invalid parameter box");
  if (const auto* q = std::get_if<BilinearQuad>(&parent->variant())) {
    (void)q;
    auto at = [&](double s, double t) { return eval_map(*parent, s, t); };
    return make_bilinear(at(a1, a2), at(b1, a2), at(a1, b2), at(b1, b2));
  }
  if (const auto* s = std::get_if<AnnulusSector>(&parent->variant())) {
    const double dr = s->r_outer - s->r_inner;
    const double dt = s->angle1 - s->angle0;
    return make_annulus_sector(s->center, s->r_inner + a1 * dr, s->r_inner + b1 * dr,
                               s->angle0 + a2 * dt, s->angle0 + b2 * dt);
  }
  if (const auto* w = std::get_if<SubBoxMap>(&parent->variant())) {
    // collapse nested boxes
    const double s1 = w->b1 - w->a1, s2 = w->b2 - w->a2;
    return sub_box(w->parent, w->a1 + a1 * s1, w->a1 + b1 * s1, w->a2 + a2 * s2,
                   w->a2 + b2 * s2);
  }
  return std::make_shared<GeometryMap>(GeometryMap::Variant(SubBoxMap{parent, a1, b1, a2, b2}));
}

namespace {

void check_domain(double xi1, double xi2) {
  if (xi1 < -kKnotTol || xi1 > 1.0 + kKnotTol || xi2 < -kKnotTol || xi2 > 1.0 + kKnotTol)
    throw OutOfDomain("geometry: parameter outside the unit square");
}

struct SplineEval {
  Point2 value;
  Matrix2 jac;
  Hessian2 hess;
};

SplineEval eval_spline_full(const SplineMap& m, double xi1, double xi2, int order) {
  BasisDerivs b1 = eval_derivs(m.kv1, xi1, order);
  BasisDerivs b2 = eval_derivs(m.kv2, xi2, order);
  const int p1 = m.kv1.degree(), p2 = m.kv2.degree();
  const std::size_t n1 = m.kv1.num_basis();
  SplineEval out;
  auto accumulate = [&](int d1, int d2, double& sx, double& sy) {
    double ax = 0.0, ay = 0.0;
    for (int j = 0; j <= p2; ++j)
      for (int i = 0; i <= p1; ++i) {
        const double w = b1.values(d1, i) * b2.values(d2, j);
        const std::size_t idx = (b1.first + i) + n1 * (b2.first + j);
        ax += w * m.control(idx, 0);
        ay += w * m.control(idx, 1);
      }
    sx = ax;
    sy = ay;
  };
  accumulate(0, 0, out.value.x, out.value.y);
  if (order >= 1) {
    accumulate(1, 0, out.jac.a11, out.jac.a21);
    accumulate(0, 1, out.jac.a12, out.jac.a22);
  }
  if (order >= 2) {
    accumulate(2, 0, out.hess.hx.a11, out.hess.hy.a11);
    accumulate(1, 1, out.hess.hx.a12, out.hess.hy.a12);
    out.hess.hx.a21 = out.hess.hx.a12;
    out.hess.hy.a21 = out.hess.hy.a12;
    accumulate(0, 2, out.hess.hx.a22, out.hess.hy.a22);
  }
  return out;
}

}  // namespace

Point2 eval_map(const GeometryMap& g, double xi1, double xi2) {
  check_domain(xi1, xi2);
  if (const auto* q = std::get_if<BilinearQuad>(&g.variant())) {
    const double w00 = (1 - xi1) * (1 - xi2), w10 = xi1 * (1 - xi2);
    const double w01 = (1 - xi1) * xi2, w11 = xi1 * xi2;
    return {w00 * q->c00.x + w10 * q->c10.x + w01 * q->c01.x + w11 * q->c11.x,
            w00 * q->c00.y + w10 * q->c10.y + w01 * q->c01.y + w11 * q->c11.y};
  }
  if (const auto* s = std::get_if<AnnulusSector>(&g.variant())) {
    const double r = s->r_inner + xi1 * (s->r_outer - s->r_inner);
    const double t = s->angle0 + xi2 * (s->angle1 - s->angle0);
    return {s->center.x + r * std::cos(t), s->center.y + r * std::sin(t)};
  }
  if (const auto* m = std::get_if<SplineMap>(&g.variant()))
    return eval_spline_full(*m, xi1, xi2, 0).value;
  const auto& w = std::get<SubBoxMap>(g.variant());
  return eval_map(*w.parent, w.a1 + (w.b1 - w.a1) * xi1, w.a2 + (w.b2 - w.a2) * xi2);
}

Matrix2 eval_jacobian(const GeometryMap& g, double xi1, double xi2) {
  check_domain(xi1, xi2);
  if (const auto* q = std::get_if<BilinearQuad>(&g.variant())) {
    const double mx = q->c11.x - q->c10.x - q->c01.x + q->c00.x;
    const double my = q->c11.y - q->c10.y - q->c01.y + q->c00.y;
    return {q->c10.x - q->c00.x + xi2 * mx, q->c01.x - q->c00.x + xi1 * mx,
            q->c10.y - q->c00.y + xi2 * my, q->c01.y - q->c00.y + xi1 * my};
  }
  if (const auto* s = std::get_if<AnnulusSector>(&g.variant())) {
    const double dr = s->r_outer - s->r_inner, dt = s->angle1 - s->angle0;
    const double r = s->r_inner + xi1 * dr;
    const double t = s->angle0 + xi2 * dt;
    return {dr * std::cos(t), -r * dt * std::sin(t), dr * std::sin(t), r * dt * std::cos(t)};
  }
  if (const auto* m = std::get_if<SplineMap>(&g.variant()))
    return eval_spline_full(*m, xi1, xi2, 1).jac;
  const auto& w = std::get<SubBoxMap>(g.variant());
  const double s1 = w.b1 - w.a1, s2 = w.b2 - w.a2;
  Matrix2 j = eval_jacobian(*w.parent, w.a1 + s1 * xi1, w.a2 + s2 * xi2);
  return {j.a11 * s1, j.a12 * s2, j.a21 * s1, j.a22 * s2};
}

Hessian2 eval_hessian(const GeometryMap& g, double xi1, double xi2) {
  check_domain(xi1, xi2);
  if (const auto* q = std::get_if<BilinearQuad>(&g.variant())) {
    const double mx = q->c11.x - q->c10.x - q->c01.x + q->c00.x;
    const double my = q->c11.y - q->c10.y - q->c01.y + q->c00.y;
    return {{0.0, mx, mx, 0.0}, {0.0, my, my, 0.0}};
  }
  if (const auto* s = std::get_if<AnnulusSector>(&g.variant())) {
    const double dr = s->r_outer - s->r_inner, dt = s->angle1 - s->angle0;
    const double r = s->r_inner + xi1 * dr;
    const double t = s->angle0 + xi2 * dt;
    Hessian2 h;
    h.hx = {0.0, -dr * dt * std::sin(t), -dr * dt * std::sin(t), -r * dt * dt * std::cos(t)};
    h.hy = {0.0, dr * dt * std::cos(t), dr * dt * std::cos(t), -r * dt * dt * std::sin(t)};
    return h;
  }
  if (const auto* m = std::get_if<SplineMap>(&g.variant()))
    return eval_spline_full(*m, xi1, xi2, 2).hess;
  const auto& w = std::get<SubBoxMap>(g.variant());
  const double s1 = w.b1 - w.a1, s2 = w.b2 - w.a2;
  Hessian2 h = eval_hessian(*w.parent, w.a1 + s1 * xi1, w.a2 + s2 * xi2);
  auto scale2 = [&](Matrix2& m2) {
    m2 = {m2.a11 * s1 * s1, m2.a12 * s1 * s2, m2.a21 * s2 * s1, m2.a22 * s2 * s2};
  };
  scale2(h.hx);
  scale2(h.hy);
  return h;
}

bool validate_geometry(const GeometryMap& g) {
  const int n = 20;
  int sign = 0;
  std::vector<Point2> images;
  images.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x1 = (i + 0.5) / n, x2 = (j + 0.5) / n;
      const double d = eval_jacobian(g, x1, x2).det();
      if (d == 0.0) return false;
      const int s = d > 0 ? 1 : -1;
      if (sign == 0) sign = s;
      if (s != sign) return false;
      images.push_back(eval_map(g, x1, x2));
    }
  for (std::size_t a = 0; a < images.size(); ++a)
    for (std::size_t b = a + 1; b < images.size(); ++b)
      if (distance(images[a], images[b]) < 1e-10) return false;
  return true;
}

double Patch::diameter() const {
  std::vector<Point2> boundary;
  const int n = 16;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    boundary.push_back(eval_map(*geometry, t, 0.0));
    boundary.push_back(eval_map(*geometry, t, 1.0));
    boundary.push_back(eval_map(*geometry, 0.0, t));
    boundary.push_back(eval_map(*geometry, 1.0, t));
  }
  double d = 0.0;
  for (std::size_t a = 0; a < boundary.size(); ++a)
    for (std::size_t b = a + 1; b < boundary.size(); ++b)
      d = std::max(d, distance(boundary[a], boundary[b]));
  return d;
}

}  // namespace ieti
