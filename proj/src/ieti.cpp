#include "ieti/ieti.hpp"

#include <algorithm>
#include <string>

namespace ieti {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw DimensionMismatch(msg);
}

void add_scaled(Vector& y, const Vector& x, double s = 1.0) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

}  // namespace

std::vector<PatchSystem> assemble_systems(const MultiPatchTopology& topo,
                                          const std::vector<DofLayout>& layouts,
                                          const RhsFunction& rhs) {
  require(topo.patches.size() == layouts.size(), "assemble_systems: layout count");
  std::vector<PatchSystem> out;
  out.reserve(topo.patches.size());
  for (std::size_t k = 0; k < topo.patches.size(); ++k) {
    LocalSystem reduced = eliminate_dirichlet(assemble(topo.patches[k], layouts[k], rhs), layouts[k]);
    out.push_back({std::move(reduced.a), std::move(reduced.f)});
  }
  return out;
}

// ---- LocalSaddle ----------------------------------------------------------------

LocalSaddle::LocalSaddle(const SparseMatrix& a, const SparseMatrix& c, int patch)
    : n_(a.rows()), m_(c.rows()), c_(c) {
  require(a.rows() == a.cols(), "LocalSaddle: stiffness must be square");
  require(c.cols() == a.cols(), "LocalSaddle: constraint column count");
  const std::string where = "patch " + std::to_string(patch);

  // Augment A by sigma * C^T C so the factored matrix is definite even on
  // floating patches; sigma on the scale of A keeps the conditioning mild.
  double sigma = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) sigma = std::max(sigma, a.coeff(i, i));
  if (sigma <= 0.0) sigma = 1.0;

  std::vector<Triplet> trip;
  trip.reserve(a.nnz() + 16 * m_);
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& av = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (int t = rp[i]; t < rp[i + 1]; ++t) trip.push_back({static_cast<int>(i), ci[t], av[t]});
  const auto& crp = c.row_ptr();
  const auto& cci = c.col_idx();
  const auto& cv = c.values();
  for (std::size_t r = 0; r < m_; ++r)
    for (int s = crp[r]; s < crp[r + 1]; ++s)
      for (int t = crp[r]; t < crp[r + 1]; ++t)
        trip.push_back({cci[s], cci[t], sigma * cv[s] * cv[t]});

  try {
    k_ = factor_spd(SparseMatrix::from_triplets(n_, n_, std::move(trip)));
  } catch (const NotPositiveDefinite&) {
    throw SingularLocalSaddle("singular local saddle system on " + where +
                              ": augmented stiffness is not positive definite");
  }

  if (m_ == 0) return;

  w_ = DenseMatrix(n_, m_);
  for (std::size_t r = 0; r < m_; ++r) {
    Vector col(n_, 0.0);
    for (int s = crp[r]; s < crp[r + 1]; ++s) col[cci[s]] = cv[s];
    k_.solve_inplace(col);
    for (std::size_t i = 0; i < n_; ++i) w_(i, r) = col[i];
  }

  DenseMatrix g(m_, m_);
  for (std::size_t r = 0; r < m_; ++r)
    for (std::size_t j = 0; j < m_; ++j) {
      double s = 0.0;
      for (int t = crp[r]; t < crp[r + 1]; ++t) s += cv[t] * w_(cci[t], j);
      g(r, j) = s;
    }

  // Mild roundoff can leave a numerically dependent row with a tiny positive
  // pivot, so reject near-zero pivots relative to the largest diagonal entry
  // before handing the block to the plain Cholesky.
  double g_scale = 0.0;
  for (std::size_t r = 0; r < m_; ++r) g_scale = std::max(g_scale, g(r, r));
  DenseMatrix l(m_, m_);
  for (std::size_t j = 0; j < m_; ++j) {
    double d = g(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-12 * g_scale))
      throw SingularLocalSaddle("singular local saddle system on " + where +
                                ": constraint rows are rank deficient");
    const double lj = std::sqrt(d);
    l(j, j) = lj;
    for (std::size_t i = j + 1; i < m_; ++i) {
      double s = g(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / lj;
    }
  }
  g_ = DenseCholesky(g);
}

Vector LocalSaddle::solve(const Vector& b, const Vector& c) const {
  require(b.size() == n_, "LocalSaddle::solve: rhs size");
  require(c.size() == m_, "LocalSaddle::solve: constraint rhs size");
  Vector t = k_.solve(b);
  if (m_ == 0) return t;
  Vector r = spmv(c_, t);
  for (std::size_t i = 0; i < m_; ++i) r[i] -= c[i];
  const Vector y = g_.solve(r);
  const Vector wy = w_.multiply(y);
  for (std::size_t i = 0; i < n_; ++i) t[i] -= wy[i];
  return t;
}

std::vector<LocalSaddle> build_local_saddles(const ConstraintSystem& constraints,
                                             const std::vector<PatchSystem>& systems) {
  require(constraints.c.size() == systems.size(), "build_local_saddles: block count");
  std::vector<LocalSaddle> out;
  out.reserve(systems.size());
  for (std::size_t k = 0; k < systems.size(); ++k)
    out.emplace_back(systems[k].a, constraints.c[k], static_cast<int>(k));
  return out;
}

// ---- PrimalBasis ----------------------------------------------------------------

Vector PrimalBasis::coarse_solve(const Vector& b) const {
  if (n_primal == 0) return {};
  return a_pi_factor.solve(b);
}

PrimalBasis build_primal_basis(const std::vector<LocalSaddle>& saddles,
                               const ConstraintSystem& constraints,
                               const std::vector<PatchSystem>& systems) {
  const std::size_t n_patches = systems.size();
  require(saddles.size() == n_patches, "build_primal_basis: saddle count");

  PrimalBasis pb;
  pb.n_primal = constraints.n_primal;
  pb.psi.resize(n_patches);
  pb.global.resize(n_patches);
  pb.a_pi = DenseMatrix(pb.n_primal, pb.n_primal);
  pb.b_pi = DenseMatrix(constraints.n_dual(), pb.n_primal);

  for (std::size_t k = 0; k < n_patches; ++k) {
    const std::size_t n = saddles[k].n();
    const std::size_t m = saddles[k].m();
    pb.global[k].resize(m);
    for (std::size_t j = 0; j < m; ++j) pb.global[k][j] = constraints.primal_rows[k][j].global_index;

    DenseMatrix psi(n, m);
    for (std::size_t j = 0; j < m; ++j) {
      Vector e(m, 0.0);
      e[j] = 1.0;
      const Vector col = saddles[k].solve(Vector(n, 0.0), e);
      for (std::size_t i = 0; i < n; ++i) psi(i, j) = col[i];
    }

    // Scatter Psi^T A Psi into the coarse matrix by global primal index.
    for (std::size_t r = 0; r < m; ++r) {
      const int gr = pb.global[k][r];
      if (gr < 0) continue;
      Vector col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = psi(i, r);
      const Vector a_col = spmv(systems[k].a, col);
      for (std::size_t s = 0; s < m; ++s) {
        const int gs = pb.global[k][s];
        if (gs < 0) continue;
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += psi(i, s) * a_col[i];
        pb.a_pi(gs, gr) += v;
      }
    }

    // B_Pi = B restricted to the primal subspace: push every local dual entry
    // through the primal basis columns.
    const SparseMatrix& bl = constraints.b_local[k];
    const auto& rp = bl.row_ptr();
    const auto& ci = bl.col_idx();
    const auto& bv = bl.values();
    for (std::size_t r = 0; r < bl.rows(); ++r)
      for (int t = rp[r]; t < rp[r + 1]; ++t)
        for (std::size_t j = 0; j < m; ++j) {
          const int g = pb.global[k][j];
          if (g >= 0) pb.b_pi(r, g) += bv[t] * psi(ci[t], j);
        }

    pb.psi[k] = std::move(psi);
  }

  if (pb.n_primal > 0) {
    try {
      pb.a_pi_factor = DenseCholesky(pb.a_pi);
    } catch (const NotPositiveDefinite&) {
      throw SingularCoarse("coarse problem is not positive definite");
    }
  }
  return pb;
}

// ---- IetiOperator ---------------------------------------------------------------

IetiOperator::IetiOperator(const MultiPatchTopology& topo, const std::vector<DofLayout>& layouts,
                           const std::vector<InterfaceCoupling>& couplings,
                           ConstraintSystem constraints, std::vector<PatchSystem> systems)
    : constraints_(std::move(constraints)), systems_(std::move(systems)) {
  (void)couplings;
  require(layouts.size() == topo.patches.size(), "IetiOperator: layout count");
  require(systems_.size() == topo.patches.size(), "IetiOperator: system count");
  saddles_ = build_local_saddles(constraints_, systems_);
  primal_ = build_primal_basis(saddles_, constraints_, systems_);

  psi_t_f_.assign(primal_.n_primal, 0.0);
  for (std::size_t k = 0; k < systems_.size(); ++k) {
    const DenseMatrix& psi = primal_.psi[k];
    for (std::size_t j = 0; j < psi.cols(); ++j) {
      const int g = primal_.global[k][j];
      if (g < 0) continue;
      double v = 0.0;
      for (std::size_t i = 0; i < psi.rows(); ++i) v += psi(i, j) * systems_[k].f[i];
      psi_t_f_[g] += v;
    }
  }
}

std::size_t IetiOperator::n_dofs() const {
  std::size_t n = 0;
  for (const PatchSystem& s : systems_) n += s.f.size();
  return n;
}

Vector IetiOperator::apply_F(const Vector& lambda) const {
  require(static_cast<int>(lambda.size()) == n_multipliers(), "apply_F: multiplier size");
  Vector out(lambda.size(), 0.0);
  for (std::size_t k = 0; k < saddles_.size(); ++k) {
    const Vector b = spmv_transposed(constraints_.b_local[k], lambda);
    const Vector u = saddles_[k].solve(b, Vector(saddles_[k].m(), 0.0));
    add_scaled(out, spmv(constraints_.b_local[k], u));
  }
  if (primal_.n_primal > 0) {
    const Vector y = primal_.coarse_solve(primal_.b_pi.multiply_transposed(lambda));
    add_scaled(out, primal_.b_pi.multiply(y));
  }
  return out;
}

Vector IetiOperator::compute_rhs() const {
  Vector d(n_multipliers(), 0.0);
  for (std::size_t k = 0; k < saddles_.size(); ++k) {
    const Vector u = saddles_[k].solve(systems_[k].f, Vector(saddles_[k].m(), 0.0));
    add_scaled(d, spmv(constraints_.b_local[k], u));
  }
  if (primal_.n_primal > 0) {
    const Vector y = primal_.coarse_solve(psi_t_f_);
    add_scaled(d, primal_.b_pi.multiply(y));
  }
  return d;
}

std::vector<Vector> IetiOperator::reconstruct_solution(const Vector& lambda) const {
  require(static_cast<int>(lambda.size()) == n_multipliers(), "reconstruct_solution: multiplier size");
  Vector u_pi;
  if (primal_.n_primal > 0) {
    Vector rhs_pi = psi_t_f_;
    add_scaled(rhs_pi, primal_.b_pi.multiply_transposed(lambda), -1.0);
    u_pi = primal_.coarse_solve(rhs_pi);
  }

  std::vector<Vector> u(saddles_.size());
  for (std::size_t k = 0; k < saddles_.size(); ++k) {
    Vector b = systems_[k].f;
    add_scaled(b, spmv_transposed(constraints_.b_local[k], lambda), -1.0);
    u[k] = saddles_[k].solve(b, Vector(saddles_[k].m(), 0.0));

    const DenseMatrix& psi = primal_.psi[k];
    for (std::size_t j = 0; j < psi.cols(); ++j) {
      const int g = primal_.global[k][j];
      if (g < 0) continue;  // Dirichlet-fixed vertex: value stays zero
      for (std::size_t i = 0; i < u[k].size(); ++i) u[k][i] += u_pi[g] * psi(i, j);
    }
  }
  return u;
}

// ---- SkeletonSchur --------------------------------------------------------------

SkeletonSchur::SkeletonSchur(const SparseMatrix& a, const DofLayout& layout)
    : n_interior_(layout.n_interior), n_boundary_(layout.n_boundary) {
  require(a.rows() == a.cols(), "SkeletonSchur: stiffness must be square");
  require(a.rows() == layout.n_total, "SkeletonSchur: layout size");
  std::vector<int> interior(n_interior_), boundary(n_boundary_);
  for (std::size_t i = 0; i < n_interior_; ++i) interior[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < n_boundary_; ++i) boundary[i] = static_cast<int>(n_interior_ + i);
  a_bb_ = a.submatrix(boundary, boundary);
  if (n_interior_ > 0) {
    a_ib_ = a.submatrix(interior, boundary);
    a_bi_ = a.submatrix(boundary, interior);
    a_ii_ = factor_spd(a.submatrix(interior, interior));
  }
}

Vector SkeletonSchur::apply(const Vector& w) const {
  require(w.size() == n_boundary_, "SkeletonSchur::apply: size");
  Vector out = spmv(a_bb_, w);
  if (n_interior_ == 0) return out;
  Vector t = spmv(a_ib_, w);
  a_ii_.solve_inplace(t);
  add_scaled(out, spmv(a_bi_, t), -1.0);
  return out;
}

Vector SkeletonSchur::harmonic_extend(const Vector& w) const {
  require(w.size() == n_boundary_, "SkeletonSchur::harmonic_extend: size");
  Vector full(n_interior_ + n_boundary_, 0.0);
  if (n_interior_ > 0) {
    Vector t = spmv(a_ib_, w);
    a_ii_.solve_inplace(t);
    for (std::size_t i = 0; i < n_interior_; ++i) full[i] = -t[i];
  }
  for (std::size_t i = 0; i < n_boundary_; ++i) full[n_interior_ + i] = w[i];
  return full;
}

Vector SkeletonSchur::condensed_rhs(const Vector& f) const {
  require(f.size() == n_interior_ + n_boundary_, "SkeletonSchur::condensed_rhs: size");
  Vector fb(f.begin() + static_cast<std::ptrdiff_t>(n_interior_), f.end());
  if (n_interior_ == 0) return fb;
  Vector fi(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(n_interior_));
  a_ii_.solve_inplace(fi);
  add_scaled(fb, spmv(a_bi_, fi), -1.0);
  return fb;
}

std::vector<SkeletonSchur> build_skeleton_schur(const std::vector<PatchSystem>& systems,
                                                const std::vector<DofLayout>& layouts) {
  require(systems.size() == layouts.size(), "build_skeleton_schur: size mismatch");
  std::vector<SkeletonSchur> out;
  out.reserve(systems.size());
  for (std::size_t k = 0; k < systems.size(); ++k) out.emplace_back(systems[k].a, layouts[k]);
  return out;
}

}  // namespace ieti
