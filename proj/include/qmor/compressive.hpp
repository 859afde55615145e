#pragma once
// Compressive sampling of quantum states: tetrahedral "petal" dictionaries
// (tensor products of coherent states indexed by code words), Gaussian
// sampling matrices, the Hamming<->wedge duality |w_i ^ w_k|^2 = 1 - 9^{-j h},
// restricted-isometry scans, sparse projected reconstruction through a
// sampling matrix, breakdown sweeps against the sampling bound
// n_sb = S ln(p/S), and iterative-shrinkage sparse selection.

#include <array>
#include <cmath>
#include <vector>

#include "qmor/mor.hpp"

namespace qmor {

// The four tetrahedron directions; pairwise cos = -1/3, so coherent-state
// overlaps satisfy |<a|b>|^2 = ((1 + cos)/2)^{2j} = 9^{-j} for a != b.
inline Mat tetrahedral_alphabet(double j) {
  SpinRep rep = make_spin_ops(j);
  const double s3 = 1.0 / std::sqrt(3.0);
  const double verts[4][3] = {{s3, s3, s3}, {s3, -s3, -s3}, {-s3, s3, -s3}, {-s3, -s3, s3}};
  Mat a(rep.dim, 4);
  for (int k = 0; k < 4; ++k) {
    Vec v = coherent_state(rep, verts[k]).amplitudes;
    a.col(k) = v / v.norm();
  }
  return a;
}

struct WedgeHamming {
  double wedge_sq = 0;
  int hamming = 0;
  double relation_defect = 0;
};

inline WedgeHamming wedge_and_hamming(const std::vector<int>& wi, const std::vector<int>& wk,
                                      double j) {
  if (wi.size() != wk.size()) throw std::invalid_argument("word lengths differ");
  Mat a = tetrahedral_alphabet(j);
  WedgeHamming out;
  cplx overlap = 1.0;
  for (size_t l = 0; l < wi.size(); ++l) {
    if (wi[l] < 0 || wi[l] > 3 || wk[l] < 0 || wk[l] > 3) throw std::invalid_argument("alphabet mismatch");
    if (wi[l] != wk[l]) ++out.hamming;
    overlap *= a.col(wi[l]).dot(a.col(wk[l]));
  }
  out.wedge_sq = 1.0 - std::norm(overlap);
  out.relation_defect = std::abs(out.wedge_sq - (1.0 - std::pow(9.0, -j * out.hamming)));
  return out;
}

enum class PetalCode { none, parity, secded };
enum class DictionaryKind { gaussian, petal };

struct SamplingDictionary {
  DictionaryKind kind = DictionaryKind::petal;
  PetalCode code = PetalCode::none;
  double j = 0.5;
  int n_chars = 0;
  int payload_chars = 0;
  long n = 0, p = 0;
  Mat alphabet;  // petal: per-character coherent columns
  Mat x;         // gaussian: materialized matrix

  // Petal code word for payload index k: payload characters are the base-4
  // digits of k; each of the two bit planes is encoded independently
  // (parity: one appended even-parity bit; secded: extended Hamming with the
  // overall parity in position 0 and check bits at positions 2^i).
  std::vector<int> word(long k) const {
    if (kind != DictionaryKind::petal) throw std::logic_error("words exist only for petal dictionaries");
    if (k < 0 || k >= p) throw std::out_of_range("word index");
    std::vector<int> payload(payload_chars);
    long rem = k;
    for (int i = 0; i < payload_chars; ++i) {
      payload[i] = int(rem % 4);
      rem /= 4;
    }
    if (code == PetalCode::none) return payload;
    std::array<std::vector<int>, 2> plane;
    for (int b = 0; b < 2; ++b) {
      plane[b].resize(payload_chars);
      for (int i = 0; i < payload_chars; ++i) plane[b][i] = (payload[i] >> b) & 1;
      plane[b] = encode_plane(plane[b]);
    }
    std::vector<int> out(n_chars);
    for (int i = 0; i < n_chars; ++i) out[i] = plane[0][i] | (plane[1][i] << 1);
    return out;
  }

  std::vector<int> encode_plane(const std::vector<int>& bits) const {
    if (code == PetalCode::parity) {
      std::vector<int> out = bits;
      int par = 0;
      for (int b : bits) par ^= b;
      out.push_back(par);
      return out;
    }
    // extended Hamming of length n_chars = 2^m: position 0 = overall parity,
    // positions 2^i = check bits, the rest carry data.
    std::vector<int> out(n_chars, 0);
    int m = 0;
    while ((1 << m) < n_chars) ++m;
    size_t d = 0;
    for (int pos = 1; pos < n_chars; ++pos) {
      if ((pos & (pos - 1)) == 0) continue;  // power of two: check bit
      out[pos] = bits[d++];
    }
    for (int i = 0; i < m; ++i) {
      int par = 0;
      for (int pos = 1; pos < n_chars; ++pos)
        if ((pos >> i) & 1 && (pos & (pos - 1)) != 0) par ^= out[pos];
      out[1 << i] = par;
    }
    int total = 0;
    for (int pos = 1; pos < n_chars; ++pos) total ^= out[pos];
    out[0] = total;
    return out;
  }

  Vec column(long k) const {
    if (kind == DictionaryKind::gaussian) return x.col(k);
    std::vector<int> w = word(k);
    Vec col = Vec::Ones(1);
    for (int i = 0; i < n_chars; ++i) col = kron_vec(col, Vec(alphabet.col(w[i])));
    return col;
  }

  Mat materialize() const {
    if (kind == DictionaryKind::gaussian) return x;
    if (n * p > (1L << 24)) throw std::invalid_argument("dictionary too large to materialize");
    Mat out(n, p);
    for (long k = 0; k < p; ++k) out.col(k) = column(k);
    return out;
  }
};

inline SamplingDictionary build_dictionary(int n_chars, PetalCode code, double j = 0.5) {
  if (n_chars < 1) throw std::invalid_argument("need at least one character");
  SamplingDictionary d;
  d.kind = DictionaryKind::petal;
  d.code = code;
  d.j = j;
  d.n_chars = n_chars;
  switch (code) {
    case PetalCode::none: d.payload_chars = n_chars; break;
    case PetalCode::parity:
      if (n_chars < 2) throw std::invalid_argument("parity needs at least 2 characters");
      d.payload_chars = n_chars - 1;
      break;
    case PetalCode::secded: {
      int m = 0;
      while ((1 << m) < n_chars) ++m;
      if ((1 << m) != n_chars || n_chars < 4)
        throw std::invalid_argument("secded needs a power-of-two length >= 4");
      d.payload_chars = n_chars - m - 1;
      break;
    }
  }
  d.alphabet = tetrahedral_alphabet(j);
  long dim = d.alphabet.rows();
  d.n = 1;
  for (int i = 0; i < n_chars; ++i) d.n *= dim;
  d.p = 1;
  for (int i = 0; i < d.payload_chars; ++i) d.p *= 4;
  return d;
}

inline SamplingDictionary gaussian_dictionary(long n, long p, std::uint64_t seed,
                                              bool orthonormalize = false) {
  if (n < 1 || p < 1 || n * p > (1L << 24)) throw std::invalid_argument("bad gaussian dictionary shape");
  SamplingDictionary d;
  d.kind = DictionaryKind::gaussian;
  d.n = n;
  d.p = p;
  rng::Stream rs(seed, 0x6d1c);
  d.x.resize(n, p);
  for (long c = 0; c < p; ++c) {
    for (long r = 0; r < n; ++r) d.x(r, c) = cplx(rs.normal(), rs.normal());
  }
  if (orthonormalize) {
    // set all nonzero singular values to unity
    Eigen::JacobiSVD<Mat> svd(d.x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    d.x = svd.matrixU() * svd.matrixV().adjoint();
  }
  for (long c = 0; c < p; ++c) d.x.col(c) /= d.x.col(c).norm();
  return d;
}

struct RipReport {
  int sparsity = 0;
  long subsets_tested = 0;
  double fraction_pass = 0;  // subsets with isometry constant in (0, 1)
  double delta_min = 0, delta_max = 0;
  double lambda_min = 0, lambda_max = 0;  // extremal Gram eigenvalues seen
};

namespace detail {
template <typename F>
inline void for_subsets(long p, int s, F&& fn) {
  std::vector<long> idx(s);
  for (int i = 0; i < s; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = s - 1;
    while (i >= 0 && idx[i] == p - s + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int k = i + 1; k < s; ++k) idx[k] = idx[k - 1] + 1;
  }
}
}  // namespace detail

inline RipReport rip_report(const SamplingDictionary& dict, int sparsity, long sample_count = 0,
                            std::uint64_t seed = 0) {
  if (sparsity < 1 || sparsity > dict.p) throw std::invalid_argument("bad sparsity");
  RipReport rep;
  rep.sparsity = sparsity;
  rep.delta_min = std::numeric_limits<double>::infinity();
  rep.lambda_min = std::numeric_limits<double>::infinity();
  std::vector<Vec> cols(dict.p);
  for (long k = 0; k < dict.p; ++k) cols[k] = dict.column(k);
  long passed = 0;
  auto score = [&](const std::vector<long>& idx) {
    Mat g(sparsity, sparsity);
    for (int a = 0; a < sparsity; ++a)
      for (int b = 0; b < sparsity; ++b) g(a, b) = cols[idx[a]].dot(cols[idx[b]]);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(sparsity - 1);
    double delta = std::max(1.0 - lo, hi - 1.0);
    rep.lambda_min = std::min(rep.lambda_min, lo);
    rep.lambda_max = std::max(rep.lambda_max, hi);
    rep.delta_min = std::min(rep.delta_min, delta);
    rep.delta_max = std::max(rep.delta_max, delta);
    if (delta < 1.0) ++passed;
    ++rep.subsets_tested;
  };
  if (sample_count <= 0) {
    // exhaustive: guard C(p, S)
    double count = 1;
    for (int i = 0; i < sparsity; ++i) count *= double(dict.p - i) / double(i + 1);
    if (count > 1e6) throw std::invalid_argument("exhaustive subset count exceeds 1e6");
    detail::for_subsets(dict.p, sparsity, score);
  } else {
    rng::Stream rs(seed, 0x51b5);
    std::vector<long> idx(sparsity);
    for (long t = 0; t < sample_count; ++t) {
      // sample distinct indices
      std::vector<long> pool;
      idx.clear();
      while (long(idx.size()) < sparsity) {
        long c = long(rs.below(std::uint64_t(dict.p)));
        if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
      }
      score(idx);
    }
  }
  rep.fraction_pass = rep.subsets_tested ? double(passed) / double(rep.subsets_tested) : 0.0;
  return rep;
}

// Projection onto a GK manifold seen only through a sampling matrix:
// minimize || phi0 - X psi(c) || by damped Gauss-Newton with the same step
// schedule as mor::project. truth (if given) scores fidelity in state space.
inline ProjectionResult sparse_project(const Vec& phi0, const Mat& x, GKState init, double step = 0.5,
                                       int max_iter = 2000, double tol = 1e-9,
                                       const Vec* truth = nullptr, double svd_tol = 1e-10) {
  init.validate();
  if (x.rows() != phi0.size() || x.cols() != init.hilbert_dim())
    throw std::invalid_argument("sampling matrix shape mismatch");
  GKState cur = init;
  auto resid = [&](const GKState& g) { return Vec(phi0 - x * evaluate(g)); };
  double best = resid(cur).norm();
  GKState best_state = cur;
  int n_decrease = 0;
  bool converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (it > 0 && it % 50 == 0) balance_rows(cur);
    Mat a = x * tangent_frame(cur).A;
    Vec r = resid(cur);
    Vec grad = a.adjoint() * r;
    if (grad.norm() < tol) {
      converged = true;
      break;
    }
    Vec dc = a.completeOrthogonalDecomposition().solve(r);
    GKState next = cur;
    Vec coords = cur.coords_flat() + step * dc;
    next.set_coords_flat(coords);
    double d_next = resid(next).norm();
    if (d_next <= best) {
      cur = next;
      best = d_next;
      best_state = cur;
      if (++n_decrease >= 5) {
        step = std::min(1.0, 2.0 * step);
        n_decrease = 0;
      }
    } else {
      step *= 0.5;
      n_decrease = 0;
      if (step < 1e-14 || d_next > 10.0 * best) break;
    }
  }
  ProjectionResult out;
  out.gk = best_state;
  out.distance = best;
  out.iterations = it;
  out.converged = converged || best < tol;
  out.fidelity = truth ? fidelity(evaluate(best_state), *truth) : 0.0;
  return out;
}

// Candes-Tao style sampling bound with S = rank * (1 + log2 dim H), p = dim H.
inline double sampling_bound(int rank, long dim) {
  double s = double(rank) * (1.0 + std::log2(double(dim)));
  return s * std::log(double(dim) / s);
}

struct BreakdownRow {
  int rank;
  long n;
  std::uint64_t seed;
  double fidelity;
  double bound;
};

struct BreakdownResult {
  std::vector<BreakdownRow> rows;
  std::vector<std::pair<long, double>> median_fidelity;  // per n
  double bound = 0;
};

inline BreakdownResult breakdown_sweep(const Vec& psi0, int gk_rank, int order,
                                       const std::vector<long>& n_values,
                                       const std::vector<std::uint64_t>& seeds, int proj_iters = 400,
                                       double proj_tol = 1e-7) {
  long dim = psi0.size();
  BreakdownResult out;
  out.bound = sampling_bound(gk_rank, dim);
  for (long n : n_values) {
    std::vector<double> fids;
    for (auto seed : seeds) {
      SamplingDictionary d = gaussian_dictionary(n, dim, seed);
      Vec phi0 = d.x * psi0;
      GKState init = random_gk_state(order, gk_rank, 2, rng::key(seed, 0xb4ea, std::uint64_t(n)));
      auto res = sparse_project(phi0, d.x, init, 0.5, proj_iters, proj_tol, &psi0);
      out.rows.push_back({gk_rank, n, seed, res.fidelity, out.bound});
      fids.push_back(res.fidelity);
    }
    std::sort(fids.begin(), fids.end());
    out.median_fidelity.push_back({n, fids[fids.size() / 2]});
  }
  return out;
}

enum class SelectForm { bpdn, lasso, dantzig };

struct SparseSelection {
  Vec w;
  int iterations = 0;
  bool converged = false;
  double certificate = 0;  // ||X^(y - Xw)||_inf
  bool certificate_ok = false;
};

// Iterative shrinkage (complex soft threshold) on 1/2||y - Xw||^2 + lambda||w||_1;
// the dantzig form reports the residual correlation bound as a certificate.
inline SparseSelection sparse_select(const Vec& y, const Mat& x, double lambda,
                                     SelectForm form = SelectForm::lasso, int max_iter = 10000,
                                     double tol = 1e-10) {
  if (y.size() != x.rows()) throw std::invalid_argument("y length mismatch");
  (void)form;  // bpdn/lasso share the shrinkage solver; dantzig adds the certificate
  Eigen::JacobiSVD<Mat> svd(x);
  double smax = svd.singularValues()(0);
  double step = 1.0 / (smax * smax);
  SparseSelection out;
  out.w = Vec::Zero(x.cols());
  double thr = lambda * step;
  for (; out.iterations < max_iter; ++out.iterations) {
    Vec grad = x.adjoint() * (y - x * out.w);
    Vec next = out.w + step * grad;
    for (long i = 0; i < next.size(); ++i) {
      double m = std::abs(next(i));
      next(i) = m > thr ? next(i) * (1.0 - thr / m) : cplx(0, 0);
    }
    double delta = (next - out.w).norm();
    out.w = next;
    if (delta < tol * (1.0 + out.w.norm())) {
      out.converged = true;
      break;
    }
  }
  out.certificate = (x.adjoint() * (y - x * out.w)).cwiseAbs().maxCoeff();
  out.certificate_ok = out.certificate <= lambda * (1.0 + 1e-6);
  return out;
}

}  // namespace qmor
