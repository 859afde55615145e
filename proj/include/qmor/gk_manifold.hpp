#pragma once
// Gabion-Kähler product-sum states: evaluation, tangent frames (Kähler
// potential, Hermitian metric, pseudoinverse, tangent projector), and the
// second-derivative structure used by the curvature module.
//
// A GK state is psi(c) = sum_rows (x)_factors c[row][factor]; in
// antisymmetric (Slater) mode each row is antisymmetrized over all
// permutations of its factors.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmor/linalg.hpp"
#include "qmor/rng.hpp"

namespace qmor {

struct GKState {
  int order = 0;               // number of tensor factors
  int rank = 0;                // number of summed rows
  std::vector<int> factor_dims;  // d_1..d_order
  bool antisymmetric = false;
  // coeffs[row][factor] is a complex vector of length factor_dims[factor]
  std::vector<std::vector<Vec>> coeffs;

  long hilbert_dim() const {
    long d = 1;
    for (int x : factor_dims) d *= x;
    return d;
  }
  int n_coords() const {  // complex coefficient count (columns of A)
    int m = 0;
    for (int f = 0; f < order; ++f) m += factor_dims[f];
    return m * rank;
  }
  void validate() const {
    if (order <= 0 || rank <= 0) throw std::invalid_argument("GK state needs positive order and rank");
    if (int(factor_dims.size()) != order || int(coeffs.size()) != rank)
      throw std::invalid_argument("GK coefficient table shape mismatch");
    for (const auto& row : coeffs) {
      if (int(row.size()) != order) throw std::invalid_argument("GK coefficient table shape mismatch");
      for (int f = 0; f < order; ++f)
        if (row[f].size() != factor_dims[f]) throw std::invalid_argument("GK coefficient table shape mismatch");
    }
    if (antisymmetric)
      for (int f = 1; f < order; ++f)
        if (factor_dims[f] != factor_dims[0])
          throw std::invalid_argument("antisymmetric mode requires equal factor dimensions");
  }

  // Flat coordinate indexing: coordinate index <-> (row, factor, component).
  struct CoordId {
    int row, factor, comp;
  };
  CoordId coord_id(int idx) const {
    int per_row = n_coords() / rank;
    int row = idx / per_row;
    int rem = idx % per_row;
    for (int f = 0; f < order; ++f) {
      if (rem < factor_dims[f]) return {row, f, rem};
      rem -= factor_dims[f];
    }
    throw std::out_of_range("coordinate index");
  }
  Vec coords_flat() const {
    Vec c(n_coords());
    int k = 0;
    for (int r = 0; r < rank; ++r)
      for (int f = 0; f < order; ++f)
        for (int i = 0; i < factor_dims[f]; ++i) c(k++) = coeffs[r][f](i);
    return c;
  }
  void set_coords_flat(const Vec& c) {
    int k = 0;
    for (int r = 0; r < rank; ++r)
      for (int f = 0; f < order; ++f)
        for (int i = 0; i < factor_dims[f]; ++i) coeffs[r][f](i) = c(k++);
  }
};

namespace detail {

// Enumerate permutations with sign; calls f(perm, sign).
template <typename F>
inline void for_permutations(int n, F&& f) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  // Heap's algorithm tracking parity.
  std::vector<int> ctr(n, 0);
  int sign = 1;
  f(perm, sign);
  int i = 0;
  while (i < n) {
    if (ctr[i] < i) {
      std::swap(perm[i % 2 == 0 ? 0 : ctr[i]], perm[i]);
      sign = -sign;
      f(perm, sign);
      ++ctr[i];
      i = 0;
    } else {
      ctr[i] = 0;
      ++i;
    }
  }
}

// Tensor product of per-position vectors vs[0] (x) vs[1] (x) ...
inline Vec tensor_chain(const std::vector<const Vec*>& vs) {
  Vec acc = *vs[0];
  for (size_t i = 1; i < vs.size(); ++i) acc = kron_vec(acc, *vs[i]);
  return acc;
}

// Row evaluation with up to two factors substituted by arbitrary vectors.
// sub[f] (if non-null) replaces coeffs[row][f]. Handles antisymmetrization:
// position l receives factor perm(l).
inline Vec row_eval(const GKState& st, int row, const std::vector<const Vec*>& sub) {
  std::vector<const Vec*> fac(st.order);
  for (int f = 0; f < st.order; ++f) fac[f] = sub[f] ? sub[f] : &st.coeffs[row][f];
  if (!st.antisymmetric) return tensor_chain(fac);
  Vec acc = Vec::Zero(st.hilbert_dim());
  for_permutations(st.order, [&](const std::vector<int>& perm, int sign) {
    std::vector<const Vec*> slot(st.order);
    for (int l = 0; l < st.order; ++l) slot[l] = fac[perm[l]];
    acc += double(sign) * tensor_chain(slot);
  });
  return acc;
}

}  // namespace detail

inline Vec evaluate(const GKState& st) {
  st.validate();
  Vec psi = Vec::Zero(st.hilbert_dim());
  std::vector<const Vec*> nosub(st.order, nullptr);
  for (int r = 0; r < st.rank; ++r) psi += detail::row_eval(st, r, nosub);
  return psi;
}

// d psi / d c_idx : the factor owning the coordinate replaced by a basis
// vector, all within the owning row.
inline Vec tangent_column(const GKState& st, int idx) {
  auto id = st.coord_id(idx);
  Vec e = Vec::Zero(st.factor_dims[id.factor]);
  e(id.comp) = 1.0;
  std::vector<const Vec*> sub(st.order, nullptr);
  sub[id.factor] = &e;
  return detail::row_eval(st, id.row, sub);
}

// d^2 psi / (d c_a d c_b): nonzero only for coordinates in the same row and
// distinct factors (within-factor second derivatives vanish: rules).
inline Vec second_derivative(const GKState& st, int a, int b) {
  auto ia = st.coord_id(a), ib = st.coord_id(b);
  if (ia.row != ib.row || ia.factor == ib.factor) return Vec::Zero(st.hilbert_dim());
  Vec ea = Vec::Zero(st.factor_dims[ia.factor]);
  ea(ia.comp) = 1.0;
  Vec eb = Vec::Zero(st.factor_dims[ib.factor]);
  eb(ib.comp) = 1.0;
  std::vector<const Vec*> sub(st.order, nullptr);
  sub[ia.factor] = &ea;
  sub[ib.factor] = &eb;
  return detail::row_eval(st, ia.row, sub);
}

// Tangent frame: A (columns = holomorphic tangents), Kähler potential
// kappa = <psi|psi>/2, Hermitian metric g = A^ A / 2, pseudoinverse (relative
// spectral cutoff), and the tangent projector P_K = A (A^ A)^P A^ applied on
// demand.
struct TangentFrame {
  Vec psi;
  Mat A;
  double kappa = 0.0;
  Mat g;        // g_{alpha beta-bar} as the Eigen matrix A^A/2 (Hermitian PSD)
  Mat g_pinv;   // contravariant metric: 2 (A^ A)^P, i.e. pinv of g
  int g_rank = 0;

  // P_K v = (1/2) A g^P A^ v  (orthogonal projector onto range A).
  Vec project_tangent(const Vec& v) const { return 0.5 * (A * (g_pinv * (A.adjoint() * v))); }
  Vec project_normal(const Vec& v) const { return v - project_tangent(v); }
};

inline TangentFrame tangent_frame(const GKState& st, double svd_tol = 1e-10) {
  st.validate();
  TangentFrame fr;
  fr.psi = evaluate(st);
  if (fr.psi.norm() == 0.0) throw std::invalid_argument("zero GK state has no tangent frame");
  const int M = st.n_coords();
  fr.A.resize(st.hilbert_dim(), M);
  for (int k = 0; k < M; ++k) fr.A.col(k) = tangent_column(st, k);
  fr.kappa = 0.5 * fr.psi.squaredNorm();
  fr.g = 0.5 * (fr.A.adjoint() * fr.A);
  auto pinv = hermitian_pinv(fr.g, svd_tol);
  fr.g_pinv = pinv.pinv;
  fr.g_rank = pinv.rank;
  return fr;
}

// Each row an independent normalized product state; final sum normalized
// (normalization absorbed into factor 0 of each row: a pure gauge move).
inline GKState random_gk_state(int order, int rank, int d, std::uint64_t seed) {
  if (order <= 0 || rank <= 0 || d <= 0) throw std::invalid_argument("positive shape required");
  GKState st;
  st.order = order;
  st.rank = rank;
  st.factor_dims.assign(order, d);
  st.coeffs.assign(rank, std::vector<Vec>(order));
  rng::Stream rs(seed, 0x6b67736bull /* "kgsk" */);
  for (int r = 0; r < rank; ++r)
    for (int f = 0; f < order; ++f) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v(i) = cplx(rs.normal(), rs.normal());
      st.coeffs[r][f] = v / v.norm();
    }
  double nrm = evaluate(st).norm();
  for (int r = 0; r < rank; ++r) st.coeffs[r][0] /= nrm;
  return st;
}

// Gauge move: scale every factor beyond the first to unit norm and absorb
// the row weight into factor 0. Leaves evaluate() unchanged up to roundoff
// and prevents overflow/underflow during long iterations.
inline void balance_rows(GKState& st) {
  for (int r = 0; r < st.rank; ++r) {
    double weight = 1.0;
    bool degenerate = false;
    for (int f = 1; f < st.order; ++f) {
      double n = st.coeffs[r][f].norm();
      if (n == 0.0) degenerate = true;
    }
    if (degenerate) continue;  // zero factor: leave the row untouched
    for (int f = 1; f < st.order; ++f) {
      double n = st.coeffs[r][f].norm();
      st.coeffs[r][f] /= n;
      weight *= n;
    }
    st.coeffs[r][0] *= weight;
  }
}

}  // namespace qmor
