#pragma once
// Patch geometry maps (bilinear quads, annulus sectors, spline maps, and
// parameter sub-boxes of any of these) with Jacobians and component Hessians,
// plus the Patch bundle of geometry, discretization, and diffusion data.
#include <cmath>
#include <memory>
#include <variant>

#include "ieti/splines.hpp"

namespace ieti {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
}

// Column-major meaning: column 1 = d/dxi1, column 2 = d/dxi2.
struct Matrix2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double det() const { return a11 * a22 - a12 * a21; }
  Matrix2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  // spectral norm of a 2x2 matrix
  double norm2() const;
};

class GeometryMap;
using GeometryPtr = std::shared_ptr<const GeometryMap>;

struct BilinearQuad {
  Point2 c00, c10, c01, c11;  // corners at (xi1,xi2) = (0,0),(1,0),(0,1),(1,1)
};

struct AnnulusSector {
  Point2 center{0.0, 0.0};
  double r_inner = 1.0, r_outer = 2.0;
  double angle0 = 0.0, angle1 = 1.5707963267948966;
};

struct SplineMap {
  KnotVector kv1, kv2;
  DenseMatrix control;  // (n1*n2) x 2, lexicographic index i1 + n1*i2
};

struct SubBoxMap {
  GeometryPtr parent;
  double a1 = 0.0, b1 = 1.0, a2 = 0.0, b2 = 1.0;  // parameter box in the parent
};

class GeometryMap {
 public:
  using Variant = std::variant<BilinearQuad, AnnulusSector, SplineMap, SubBoxMap>;
  explicit GeometryMap(Variant v) : v_(std::move(v)) {}
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

GeometryPtr make_bilinear(Point2 c00, Point2 c10, Point2 c01, Point2 c11);
GeometryPtr make_annulus_sector(Point2 center, double r_inner, double r_outer, double angle0,
                                double angle1);
GeometryPtr make_spline_map(KnotVector kv1, KnotVector kv2, DenseMatrix control);

// Restriction of `parent` to the parameter box [a1,b1]x[a2,b2], reparameterized
// to the unit square. Quads and sectors stay in their own family.
GeometryPtr sub_box(const GeometryPtr& parent, double a1, double b1, double a2, double b2);

Point2 eval_map(const GeometryMap& g, double xi1, double xi2);
Matrix2 eval_jacobian(const GeometryMap& g, double xi1, double xi2);
// Hessians of the two physical components: hx = [d2x/dxi_i dxi_j], hy likewise.
struct Hessian2 {
  Matrix2 hx, hy;
};
Hessian2 eval_hessian(const GeometryMap& g, double xi1, double xi2);

// 20x20 sample check: one-signed Jacobian determinant and injectivity.
bool validate_geometry(const GeometryMap& g);

// One patch: geometry, tensor discretization, diffusion, refinement lineage.
struct Patch {
  GeometryPtr geometry;
  KnotVector kv1, kv2;
  double nu = 1.0;
  int level = 0;    // dyadic refinement level relative to the initial grid
  int parent = -1;  // index of the split ancestor in the previous patch list

  std::size_t num_basis() const { return kv1.num_basis() * kv2.num_basis(); }
  double parametric_grid_size() const { return std::max(kv1.grid_size(), kv2.grid_size()); }
  // Max pairwise distance over boundary samples (the patch diameter H_k).
  double diameter() const;
  double mesh_size() const { return diameter() * parametric_grid_size(); }
};

}  // namespace ieti
