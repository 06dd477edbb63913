#include "ieti/precond.hpp"

#include <algorithm>
#include <string>

namespace ieti {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw DimensionMismatch(msg);
}

// Dense Schur complement of `a` onto `target` after eliminating `elim`;
// every other index of `a` is treated as deleted.
DenseMatrix schur_onto(const SparseMatrix& a, const std::vector<int>& target,
                       const std::vector<int>& elim) {
  const std::size_t no = target.size();
  const SparseMatrix a_oo = a.submatrix(target, target);
  if (elim.empty()) return a_oo.to_dense();
  const SparseMatrix a_or = a.submatrix(target, elim);
  const SparseMatrix a_ro = a.submatrix(elim, target);
  const SpdFactorization a_rr = factor_spd(a.submatrix(elim, elim));

  DenseMatrix s(no, no);
  for (std::size_t j = 0; j < no; ++j) {
    Vector e(no, 0.0);
    e[j] = 1.0;
    Vector t = spmv(a_ro, e);
    a_rr.solve_inplace(t);
    const Vector top = spmv(a_oo, e);
    const Vector corr = spmv(a_or, t);
    for (std::size_t i = 0; i < no; ++i) s(i, j) = top[i] - corr[i];
  }
  return s;
}

// Alive open-edge functions of a side: (1D index, reduced index) pairs.
std::vector<std::pair<int, int>> open_edge(const DofLayout& layout, Side side) {
  const std::vector<int>& aligned = layout.edge_aligned[static_cast<int>(side)];
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 1; i + 1 < aligned.size(); ++i)
    if (aligned[i] >= 0) out.emplace_back(static_cast<int>(i), aligned[i]);
  return out;
}

// All reduced indices of the patch except its alive corner functions and the
// given target set.
std::vector<int> complement_without_corners(const DofLayout& layout,
                                            const std::vector<int>& target) {
  std::vector<bool> drop(layout.n_total, false);
  for (int corner = 0; corner < 4; ++corner) {
    const int dof = layout.corner_dof(corner);
    if (dof >= 0) drop[dof] = true;
  }
  for (int dof : target) drop[dof] = true;
  std::vector<int> out;
  for (std::size_t i = 0; i < layout.n_total; ++i)
    if (!drop[i]) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

SelectionScaling build_selection_scaling(const ConstraintSystem& constraints) {
  SelectionScaling scaling;
  scaling.diag.assign(constraints.skeleton.total, 0.0);
  for (int i : constraints.i_z) scaling.diag[i] = 1.0;
  return scaling;
}

Vector apply_scaled_dirichlet(const ConstraintSystem& constraints,
                              const std::vector<SkeletonSchur>& schurs,
                              const SelectionScaling& scaling, const Vector& mu) {
  require(static_cast<int>(mu.size()) == constraints.n_dual(),
          "apply_scaled_dirichlet: multiplier size");
  require(scaling.diag.size() == static_cast<std::size_t>(constraints.skeleton.total),
          "apply_scaled_dirichlet: scaling size");

  Vector x = spmv_transposed(constraints.b, mu);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= scaling.diag[i];

  for (std::size_t k = 0; k < schurs.size(); ++k) {
    const int off = constraints.skeleton.offset[k];
    const std::size_t nb = schurs[k].n_boundary();
    require(constraints.skeleton.boundary[k] == static_cast<int>(nb),
            "apply_scaled_dirichlet: skeleton block size");
    Vector w(x.begin() + off, x.begin() + off + static_cast<std::ptrdiff_t>(nb));
    const Vector sw = schurs[k].apply(w);
    for (std::size_t i = 0; i < nb; ++i) x[off + i] = sw[i];
  }

  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= scaling.diag[i];
  return spmv(constraints.b, x);
}

DeluxeEdgeBlocks build_deluxe_blocks(const std::vector<InterfaceCoupling>& couplings,
                                     const std::vector<DofLayout>& layouts,
                                     const ConstraintSystem& constraints,
                                     const std::vector<PatchSystem>& systems) {
  DeluxeEdgeBlocks out;
  out.n_dual = constraints.n_dual();

  // Dual rows grouped per coupling (already emitted in edge order).
  std::vector<std::vector<int>> rows_of(couplings.size());
  for (int r = 0; r < constraints.n_dual(); ++r)
    rows_of[constraints.rows[r].interface].push_back(r);

  for (std::size_t e = 0; e < couplings.size(); ++e) {
    if (rows_of[e].empty()) continue;
    const InterfaceCoupling& cp = couplings[e];
    const std::string where = "interface " + std::to_string(e) + " (patches " +
                              std::to_string(cp.refined) + "/" + std::to_string(cp.coarse) + ")";

    // Refined side: open-edge functions correspond one-to-one to dual rows.
    const auto fine = open_edge(layouts[cp.refined], cp.refined_side);
    require(fine.size() == rows_of[e].size(), "build_deluxe_blocks: dual row mismatch");
    std::vector<int> fine_1d(fine.size()), fine_red(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) {
      fine_1d[i] = fine[i].first;
      fine_red[i] = fine[i].second;
      require(constraints.rows[rows_of[e][i]].fine_edge_index == fine[i].first,
              "build_deluxe_blocks: dual row order mismatch");
    }

    // Coarse side: open-edge functions restricted to the interface trace.
    const std::vector<int>& aligned =
        layouts[cp.coarse].edge_aligned[static_cast<int>(cp.coarse_side)];
    std::vector<int> coarse_pos, coarse_red;
    for (std::size_t j = 0; j < cp.coarse_trace.size(); ++j) {
      const int idx = cp.coarse_trace[j];
      if (idx == 0 || idx + 1 == static_cast<int>(aligned.size())) continue;
      if (aligned[idx] < 0) continue;
      coarse_pos.push_back(static_cast<int>(j));
      coarse_red.push_back(aligned[idx]);
    }

    try {
      const DenseMatrix s_fine =
          schur_onto(systems[cp.refined].a, fine_red,
                     complement_without_corners(layouts[cp.refined], fine_red));
      DenseMatrix combined = dense_inverse_spd(s_fine);

      if (!coarse_red.empty()) {
        const DenseMatrix s_coarse =
            schur_onto(systems[cp.coarse].a, coarse_red,
                       complement_without_corners(layouts[cp.coarse], coarse_red));
        const DenseMatrix s_coarse_inv = dense_inverse_spd(s_coarse);

        DenseMatrix p(fine_1d.size(), coarse_pos.size());
        for (std::size_t i = 0; i < fine_1d.size(); ++i)
          for (std::size_t j = 0; j < coarse_pos.size(); ++j)
            p(i, j) = cp.embedding(fine_1d[i], coarse_pos[j]);

        const DenseMatrix psp = p.multiplied_by(s_coarse_inv).multiplied_by(p.transposed());
        for (std::size_t i = 0; i < combined.rows(); ++i)
          for (std::size_t j = 0; j < combined.cols(); ++j) combined(i, j) += psp(i, j);
      }

      out.blocks.push_back({static_cast<int>(e), rows_of[e], DenseCholesky(combined)});
    } catch (const NotPositiveDefinite&) {
      throw SingularEdgeBlock("singular deluxe edge block on " + where);
    }
  }
  return out;
}

Vector apply_deluxe(const DeluxeEdgeBlocks& blocks, const Vector& mu) {
  require(static_cast<int>(mu.size()) == blocks.n_dual, "apply_deluxe: multiplier size");
  Vector out(mu.size(), 0.0);
  for (const DeluxeEdgeBlocks::Block& block : blocks.blocks) {
    Vector local(block.rows.size());
    for (std::size_t i = 0; i < block.rows.size(); ++i) local[i] = mu[block.rows[i]];
    const Vector solved = block.combined.solve(local);
    for (std::size_t i = 0; i < block.rows.size(); ++i) out[block.rows[i]] += solved[i];
  }
  return out;
}

std::vector<InterfaceTrace> jump_check(const std::vector<InterfaceCoupling>& couplings,
                                       const std::vector<DofLayout>& layouts,
                                       const ConstraintSystem& constraints, const Vector& w) {
  require(w.size() == static_cast<std::size_t>(constraints.skeleton.total),
          "jump_check: skeleton size");
  const SelectionScaling scaling = build_selection_scaling(constraints);

  Vector image = spmv_transposed(constraints.b, spmv(constraints.b, w));
  for (std::size_t i = 0; i < image.size(); ++i) image[i] *= scaling.diag[i];

  std::vector<InterfaceTrace> traces;
  traces.reserve(couplings.size());
  for (const InterfaceCoupling& cp : couplings) {
    InterfaceTrace trace;
    const auto side_coeffs = [&](int patch, Side side) {
      const std::vector<int>& aligned = layouts[patch].edge_aligned[static_cast<int>(side)];
      Vector coeffs(aligned.size(), 0.0);
      for (std::size_t i = 0; i < aligned.size(); ++i)
        if (aligned[i] >= 0)
          coeffs[i] = image[constraints.skeleton.index(patch, aligned[i])];
      return coeffs;
    };
    trace.fine = side_coeffs(cp.refined, cp.refined_side);
    trace.coarse = side_coeffs(cp.coarse, cp.coarse_side);
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace ieti
