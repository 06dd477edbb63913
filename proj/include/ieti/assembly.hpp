#pragma once
// Patch-local Galerkin assembly of the diffusion bilinear form with
// Gauss-Legendre quadrature, plus Dirichlet elimination into the
// interior-first reduced numbering.
#include <functional>

#include "ieti/space.hpp"

namespace ieti {

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularJacobian : AssemblyError {
  using AssemblyError::AssemblyError;
};

using RhsFunction = std::function<double(double, double)>;  // physical (x, y)

// Stiffness matrix and load vector over the full tensor-product space in
// lexicographic order (no permutation, nothing removed).
struct LocalSystem {
  SparseMatrix a;
  Vector f;
};

// Gauss-Legendre rule with n points on [0,1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

LocalSystem assemble(const Patch& patch, const DofLayout& layout, const RhsFunction& rhs);

// Drop Dirichlet rows/columns and permute to the layout's reduced numbering.
LocalSystem eliminate_dirichlet(const LocalSystem& full, const DofLayout& layout);

}  // namespace ieti
