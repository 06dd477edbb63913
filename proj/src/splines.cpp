#include "ieti/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ieti {

namespace {

bool knot_eq(double a, double b) { return std::abs(a - b) <= kKnotTol; }

}  // namespace

// ---- KnotVector ---------------------------------------------------------------

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : p_(degree), knots_(std::move(knots)) {
  if (p_ < 1) throw InvalidKnotVector("KnotVector: degree must be >= 1");
  const std::size_t m = knots_.size();
  if (m < 2 * static_cast<std::size_t>(p_ + 1))
    throw InvalidKnotVector("KnotVector: too few knots for the degree");
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (knots_[i] > knots_[i + 1] + kKnotTol)
      throw InvalidKnotVector("KnotVector: knots must be nondecreasing");
  for (int i = 0; i <= p_; ++i) {
    if (!knot_eq(knots_[i], 0.0)) throw InvalidKnotVector("KnotVector: first p+1 knots must be 0");
    if (!knot_eq(knots_[m - 1 - i], 1.0))
      throw InvalidKnotVector("KnotVector: last p+1 knots must be 1");
  }
  for (std::size_t i = 1; i + p_ + 1 < m; ++i)
    if (knot_eq(knots_[i], knots_[i + p_]))
      throw InvalidKnotVector("KnotVector: interior knot multiplicity exceeds degree");
}

KnotVector KnotVector::uniform(int degree, int intervals) {
  if (intervals < 1) throw InvalidKnotVector("KnotVector::uniform: intervals must be >= 1");
  std::vector<double> knots;
  knots.reserve(2 * (degree + 1) + intervals - 1);
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (int i = 1; i < intervals; ++i)
    knots.push_back(static_cast<double>(i) / static_cast<double>(intervals));
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return KnotVector(degree, std::move(knots));
}

double KnotVector::grid_size() const {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) h = std::max(h, knots_[i + 1] - knots_[i]);
  return h;
}

double KnotVector::min_span() const {
  double h = 1.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double s = knots_[i + 1] - knots_[i];
    if (s > kKnotTol) h = std::min(h, s);
  }
  return h;
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b;
  for (double k : knots_)
    if (b.empty() || !knot_eq(b.back(), k)) b.push_back(k);
  return b;
}

std::vector<int> KnotVector::multiplicities() const {
  std::vector<int> m;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i == 0 || !knot_eq(knots_[i - 1], knots_[i]))
      m.push_back(1);
    else
      ++m.back();
  }
  return m;
}

int KnotVector::find_span(double x) const {
  const int n = static_cast<int>(num_basis()) - 1;
  if (x >= knots_[n + 1]) return n;
  if (x <= knots_[p_]) return p_;
  int low = p_, high = n + 1;
  int mid = (low + high) / 2;
  while (x < knots_[mid] || x >= knots_[mid + 1]) {
    if (x < knots_[mid])
      high = mid;
    else
      low = mid;
    mid = (low + high) / 2;
  }
  return mid;
}

bool KnotVector::operator==(const KnotVector& o) const {
  if (p_ != o.p_ || knots_.size() != o.knots_.size()) return false;
  for (std::size_t i = 0; i < knots_.size(); ++i)
    if (!knot_eq(knots_[i], o.knots_[i])) return false;
  return true;
}

// ---- evaluation ------------------------------------------------------------------

BasisValues eval_basis(const KnotVector& kv, double x) {
  if (x < -kKnotTol || x > 1.0 + kKnotTol)
    throw OutOfDomain("eval_basis: x=" + std::to_string(x) + " outside [0,1]");
  x = std::min(1.0, std::max(0.0, x));
  const int p = kv.degree();
  const auto& U = kv.knots();
  const int span = kv.find_span(x);

  std::vector<double> N(p + 1, 0.0), left(p + 1), right(p + 1);
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  return {span - p, std::move(N)};
}

BasisDerivs eval_derivs(const KnotVector& kv, double x, int order) {
  if (x < -kKnotTol || x > 1.0 + kKnotTol)
    throw OutOfDomain("eval_derivs: x=" + std::to_string(x) + " outside [0,1]");
  x = std::min(1.0, std::max(0.0, x));
  const int p = kv.degree();
  const auto& U = kv.knots();
  const int span = kv.find_span(x);
  const int nd = std::min(order, p);  // derivatives beyond p are zero

  // Build the full triangular table of basis values and knot differences.
  DenseMatrix ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }

  DenseMatrix ders(order + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  DenseMatrix a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= nd; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = static_cast<double>(p);
  for (int k = 1; k <= nd; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
    factor *= static_cast<double>(p - k);
  }
  return {span - p, std::move(ders)};
}

// ---- knot insertion -----------------------------------------------------------

namespace detail {

std::vector<double> missing_knots(const std::vector<double>& coarse,
                                  const std::vector<double>& fine) {
  std::vector<double> extra;
  std::size_t i = 0, j = 0;
  while (i < coarse.size()) {
    if (j >= fine.size()) throw NotNested("insert_knots: coarse knots not contained in fine");
    if (knot_eq(coarse[i], fine[j])) {
      ++i;
      ++j;
    } else if (fine[j] < coarse[i]) {
      extra.push_back(fine[j]);
      ++j;
    } else {
      throw NotNested("insert_knots: coarse knots not contained in fine");
    }
  }
  while (j < fine.size()) extra.push_back(fine[j++]);
  return extra;
}

// Boehm single insertion of x: returns the (n+1) x n coefficient map and
// appends x to `knots` in place.
namespace {

DenseMatrix single_insertion(int p, std::vector<double>& knots, double x) {
  const int n = static_cast<int>(knots.size()) - p - 1;
  // span: largest k with knots[k] <= x (strictly below the trailing run)
  int k = 0;
  for (int i = 0; i < static_cast<int>(knots.size()); ++i)
    if (knots[i] <= x + kKnotTol) k = i;
  // keep insertion inside the active region
  k = std::min(k, n - 1);

  DenseMatrix e(n + 1, n);
  for (int i = 0; i <= n; ++i) {
    double alpha;
    if (i <= k - p)
      alpha = 1.0;
    else if (i > k)
      alpha = 0.0;
    else
      alpha = (x - knots[i]) / (knots[i + p] - knots[i]);
    if (alpha != 0.0 && i < n) e(i, i) = alpha;
    if (alpha != 1.0 && i > 0) e(i, i - 1) = 1.0 - alpha;
  }
  knots.insert(std::upper_bound(knots.begin(), knots.end(), x), x);
  return e;
}

}  // namespace

DenseMatrix embedding_between(int degree, const std::vector<double>& coarse,
                              const std::vector<double>& fine) {
  std::vector<double> extra = missing_knots(coarse, fine);
  std::vector<double> work = coarse;
  const std::size_t n0 = coarse.size() - degree - 1;
  DenseMatrix e(n0, n0);
  for (std::size_t i = 0; i < n0; ++i) e(i, i) = 1.0;
  for (double x : extra) e = single_insertion(degree, work, x).multiplied_by(e);
  return e;
}

}  // namespace detail

SparseMatrix insert_knots(const KnotVector& coarse, const KnotVector& fine) {
  if (coarse.degree() != fine.degree())
    throw NotNested("insert_knots: knot vectors have different degrees");
  DenseMatrix e = detail::embedding_between(coarse.degree(), coarse.knots(), fine.knots());
  return SparseMatrix::from_dense(e);
}

// ---- refinement helpers ---------------------------------------------------------

KnotVector dyadic_refine(const KnotVector& kv) {
  std::vector<double> out;
  const auto& U = kv.knots();
  for (std::size_t i = 0; i + 1 < U.size(); ++i) {
    out.push_back(U[i]);
    if (U[i + 1] - U[i] > kKnotTol) out.push_back(0.5 * (U[i] + U[i + 1]));
  }
  out.push_back(U.back());
  return KnotVector(kv.degree(), std::move(out));
}

std::vector<double> greville(const KnotVector& kv) {
  const int p = kv.degree();
  const auto& U = kv.knots();
  std::vector<double> g(kv.num_basis());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (int j = 1; j <= p; ++j) s += U[i + j];
    g[i] = s / p;
  }
  return g;
}

KnotVector restrict_to(const KnotVector& kv, double a, double b) {
  if (!(a < b - kKnotTol)) throw InvalidSubinterval("restrict_to: need a < b");
  const auto bp = kv.breakpoints();
  auto is_breakpoint = [&](double x) {
    return std::any_of(bp.begin(), bp.end(), [&](double v) { return knot_eq(v, x); });
  };
  if (!is_breakpoint(a) || !is_breakpoint(b))
    throw InvalidSubinterval("restrict_to: endpoints must be breakpoints");
  const int p = kv.degree();
  std::vector<double> out;
  for (int i = 0; i <= p; ++i) out.push_back(0.0);
  for (double k : kv.knots())
    if (k > a + kKnotTol && k < b - kKnotTol) out.push_back((k - a) / (b - a));
  for (int i = 0; i <= p; ++i) out.push_back(1.0);
  return KnotVector(p, std::move(out));
}

}  // namespace ieti
