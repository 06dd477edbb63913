#include "ieti/assembly.hpp"

#include <cmath>

namespace ieti {

QuadratureRule gauss_legendre(int n) {
  // Newton iteration on Legendre polynomials, nodes mapped from [-1,1] to [0,1].
  QuadratureRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

namespace {

std::vector<std::pair<double, double>> nonempty_spans(const KnotVector& kv) {
  std::vector<std::pair<double, double>> s;
  const auto bp = kv.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) s.emplace_back(bp[i], bp[i + 1]);
  return s;
}

}  // namespace

LocalSystem assemble(const Patch& patch, const DofLayout& layout, const RhsFunction& rhs) {
  const int p1 = patch.kv1.degree(), p2 = patch.kv2.degree();
  const std::size_t n1 = layout.n1, n2 = layout.n2;
  const QuadratureRule q1 = gauss_legendre(p1 + 1);
  const QuadratureRule q2 = gauss_legendre(p2 + 1);
  const auto spans1 = nonempty_spans(patch.kv1);
  const auto spans2 = nonempty_spans(patch.kv2);

  std::vector<Triplet> trip;
  trip.reserve(spans1.size() * spans2.size() * (p1 + 1) * (p1 + 1) * (p2 + 1) * (p2 + 1));
  Vector load(n1 * n2, 0.0);

  const int nloc = (p1 + 1) * (p2 + 1);
  std::vector<int> gidx(nloc);
  std::vector<double> gx(nloc), gy(nloc), val(nloc);

  for (const auto& s1 : spans1) {
    const double len1 = s1.second - s1.first;
    for (const auto& s2 : spans2) {
      const double len2 = s2.second - s2.first;
      DenseMatrix element(nloc, nloc);
      Vector eload(nloc, 0.0);
      int first1 = 0, first2 = 0;

      for (int a = 0; a < p1 + 1; ++a) {
        const double xi1 = s1.first + len1 * q1.nodes[a];
        const BasisDerivs b1 = eval_derivs(patch.kv1, xi1, 1);
        first1 = b1.first;
        for (int b = 0; b < p2 + 1; ++b) {
          const double xi2 = s2.first + len2 * q2.nodes[b];
          const BasisDerivs b2 = eval_derivs(patch.kv2, xi2, 1);
          first2 = b2.first;

          const Matrix2 jac = eval_jacobian(*patch.geometry, xi1, xi2);
          const double det = jac.det();
          if (std::abs(det) < 1e-14)
            throw SingularJacobian("assemble: vanishing jacobian determinant");
          const Matrix2 inv = jac.inverse();
          const double w = q1.weights[a] * q2.weights[b] * len1 * len2 * std::abs(det);

          int m = 0;
          for (int j = 0; j <= p2; ++j)
            for (int i = 0; i <= p1; ++i, ++m) {
              const double d1 = b1.values(1, i) * b2.values(0, j);
              const double d2 = b1.values(0, i) * b2.values(1, j);
              // physical gradient: J^{-T} * (d1, d2)
              gx[m] = inv.a11 * d1 + inv.a21 * d2;
              gy[m] = inv.a12 * d1 + inv.a22 * d2;
              val[m] = b1.values(0, i) * b2.values(0, j);
            }
          const Point2 phys = eval_map(*patch.geometry, xi1, xi2);
          const double fval = rhs(phys.x, phys.y);
          for (int r = 0; r < nloc; ++r) {
            const double wr = w * patch.nu;
            for (int c = 0; c < nloc; ++c)
              element(r, c) += wr * (gx[r] * gx[c] + gy[r] * gy[c]);
            eload[r] += w * fval * val[r];
          }
        }
      }

      int m = 0;
      for (int j = 0; j <= p2; ++j)
        for (int i = 0; i <= p1; ++i, ++m)
          gidx[m] = static_cast<int>(layout.lex(first1 + i, first2 + j));
      for (int r = 0; r < nloc; ++r) {
        load[gidx[r]] += eload[r];
        for (int c = 0; c < nloc; ++c)
          if (element(r, c) != 0.0) trip.push_back({gidx[r], gidx[c], element(r, c)});
      }
    }
  }
  return {SparseMatrix::from_triplets(n1 * n2, n1 * n2, std::move(trip)), std::move(load)};
}

LocalSystem eliminate_dirichlet(const LocalSystem& full, const DofLayout& layout) {
  std::vector<int> keep(layout.n_total);
  for (std::size_t d = 0; d < layout.n_total; ++d) keep[d] = layout.new_to_old[d];
  LocalSystem red;
  red.a = full.a.submatrix(keep, keep);
  red.f.resize(layout.n_total);
  for (std::size_t d = 0; d < layout.n_total; ++d) red.f[d] = full.f[keep[d]];
  return red;
}

}  // namespace ieti
