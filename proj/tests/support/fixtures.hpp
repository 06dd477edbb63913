#pragma once
// Shared multi-patch fixtures for the test suite: matching and nested pairs,
// T-junction configurations, crosses, and quarter-annulus checkerboards.
#include <functional>
#include <utility>
#include <vector>

#include "ieti/coupling.hpp"
#include "ieti/ieti.hpp"
#include "ieti/space.hpp"
#include "ieti/topology.hpp"

namespace ieti::testing {

Patch square_patch(Point2 lo, Point2 hi, int degree, int intervals, double nu = 1.0);

// Two unit squares sharing the edge x = 1, identical discretizations.
std::vector<Patch> two_matching_squares(int degree, int intervals);

// Same geometry, but the right patch refined one dyadic level.
std::vector<Patch> two_nested_squares(int degree, int coarse_intervals);

// Big square [0,2]^2 plus stacked [2,3]x[0,1] and [2,3]x[1,2]; T-junction at (2,1).
std::vector<Patch> t_junction_triple(int degree, int intervals);

// 2x2 grid of unit squares covering [0,2]^2.
std::vector<Patch> four_patch_cross(int degree, int intervals);

// Two squares whose shared edge is traversed in opposite directions.
std::vector<Patch> flipped_pair(int degree, int intervals);

// Quarter annulus (radii 1..2, angles 0..pi/2) split rows x cols; patch (i,j)
// covers r in [1+i/rows, 1+(i+1)/rows], theta in [j,(j+1)]*(pi/2)/cols.
// Checkerboard diffusion: nu_even where (i+j) is even, nu_odd otherwise.
// extra_odd_refines applies additional dyadic refinements to odd patches.
std::vector<Patch> annulus_checkerboard(int degree, int rows, int cols, double nu_even,
                                        double nu_odd, int base_refines = 0,
                                        int extra_odd_refines = 0);

// Unit squares arranged as an L: the reentrant corner (1,1) lies on the domain
// boundary while the lower-left patch keeps an alive corner function there.
std::vector<Patch> l_shape_patches(int degree, int intervals);

// A generic smooth right-hand side, 1 + sin(1.3x) + cos(0.7y).
double smooth_rhs(double x, double y);

// Everything needed to pose the coupled problem on a patch list: topology
// (optionally with Dirichlet edges cleared), resolved couplings, layouts,
// constraints, and assembled patch systems.
struct BuiltSystem {
  MultiPatchTopology topo;
  std::vector<InterfaceCoupling> couplings;
  std::vector<DofLayout> layouts;
  ConstraintSystem cs;
  std::vector<PatchSystem> systems;
};

BuiltSystem build_system(std::vector<Patch> patches, bool floating = false,
                         RhsFunction rhs = smooth_rhs);

// Full lexicographic coefficient vector interpolating f(x, y) at the physical
// images of the tensor Greville grid (exact whenever f pulls back into the
// patch's spline space).
Vector interpolate_coefficients(const Patch& patch,
                                const std::function<double(double, double)>& f);

// Gather a full lexicographic vector into a layout's reduced numbering.
Vector reduce_coefficients(const DofLayout& layout, const Vector& full);

// Scatter a reduced vector back to full lexicographic numbering (zeros on
// removed functions).
Vector expand_coefficients(const DofLayout& layout, const Vector& reduced);

// Physical gradient of the spline function with full lexicographic
// coefficients at a parameter point.
std::pair<double, double> physical_gradient(const Patch& patch, const Vector& coef, double xi1,
                                            double xi2);

// Integrate nu*|grad u_h|^2 over the patch with a tensor Gauss rule of the
// given point count per span and direction (independent evaluation path).
double energy_quadrature(const Patch& patch, const Vector& coef, int points);

}  // namespace ieti::testing
