#pragma once
// Random dipole-coupled spin-1/2 "dust" Hamiltonians and the end-to-end
// fidelity experiment: exact triaxial spinometer trajectories with periodic
// projection onto GK manifolds of increasing rank.
//
// Couplings: H = sum_links s_j . (I - 3 n n^T) . s_k  +  sum_j s_j . n_jj,
// with each spin coupled to exactly 4 partners (a random 4-regular graph,
// each undirected link counted once) so that tr H = 0 and tr H^2 / dim =
// n_spin hold exactly.

#include <Eigen/Sparse>
#include <algorithm>
#include <map>
#include <numeric>

#include "qmor/mor.hpp"

namespace qmor {

struct DustLink {
  int j, k;            // j == k marks a self link
  Eigen::Vector3d n;   // unit direction
};

struct DustSystem {
  int n_spin = 0;
  std::vector<DustLink> links;
  Eigen::SparseMatrix<cplx> hamiltonian;

  Vec apply(const Vec& psi) const { return hamiltonian * psi; }
};

namespace detail {

// Random 4-regular simple graph by configuration-model pairing with
// rejection; n = 4 gives the complete graph K5 pattern truncated; for
// n_spin < 5 fall back to the complete graph.
inline std::vector<std::pair<int, int>> four_regular_edges(int n, rng::Stream& rs) {
  std::vector<std::pair<int, int>> edges;
  if (n < 5) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
    return edges;
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    for (int v = 0; v < n; ++v)
      for (int c = 0; c < 4; ++c) stubs.push_back(v);
    for (size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rs.below(i)]);
    edges.clear();
    std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
    bool ok = true;
    for (size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a == b || seen[a][b]) ok = false;
      else {
        seen[a][b] = seen[b][a] = true;
        edges.push_back({std::min(a, b), std::max(a, b)});
      }
    }
    if (ok) return edges;
  }
  throw std::runtime_error("failed to sample a 4-regular graph");
}

// Scatter a two-site (or one-site when j == k) operator into sparse triplets.
inline void scatter_two_site(std::vector<Eigen::Triplet<cplx>>& trip, const Mat& local, int n_spin,
                             int site_j, int site_k, long dim) {
  int shift_j = n_spin - 1 - site_j, shift_k = n_spin - 1 - site_k;
  for (long col = 0; col < dim; ++col) {
    int bj = int((col >> shift_j) & 1), bk = int((col >> shift_k) & 1);
    int lc = (site_j == site_k) ? bj : 2 * bj + bk;
    int lrows = (site_j == site_k) ? 2 : 4;
    for (int lr = 0; lr < lrows; ++lr) {
      cplx v = local(lr, lc);
      if (v == cplx(0, 0)) continue;
      long row = col;
      if (site_j == site_k) {
        row = (row & ~(1L << shift_j)) | (long(lr) << shift_j);
      } else {
        int rj = lr / 2, rk = lr % 2;
        row = (row & ~(1L << shift_j) & ~(1L << shift_k)) | (long(rj) << shift_j) |
              (long(rk) << shift_k);
      }
      trip.emplace_back(int(row), int(col), v);
    }
  }
}

}  // namespace detail

inline DustSystem build_dust(int n_spin, std::uint64_t seed) {
  if (n_spin < 1 || n_spin > 14) throw std::invalid_argument("n_spin must be in 1..14");
  DustSystem sys;
  sys.n_spin = n_spin;
  rng::Stream rs(seed, 0xd057ull);
  auto edges = detail::four_regular_edges(n_spin, rs);
  for (auto [a, b] : edges) {
    double n3[3];
    rs.unit_vector3(n3);
    sys.links.push_back({a, b, Eigen::Vector3d(n3[0], n3[1], n3[2])});
  }
  for (int v = 0; v < n_spin; ++v) {
    double n3[3];
    rs.unit_vector3(n3);
    sys.links.push_back({v, v, Eigen::Vector3d(n3[0], n3[1], n3[2])});
  }

  SpinRep rep = make_spin_ops(0.5);
  const Mat* s[3] = {&rep.s1, &rep.s2, &rep.s3};
  const long dim = 1L << n_spin;
  std::vector<Eigen::Triplet<cplx>> trip;
  for (const auto& link : sys.links) {
    if (link.j == link.k) {
      Mat local = link.n(0) * *s[0] + link.n(1) * *s[1] + link.n(2) * *s[2];
      detail::scatter_two_site(trip, local, n_spin, link.j, link.k, dim);
    } else {
      Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - 3.0 * link.n * link.n.transpose();
      Mat local = Mat::Zero(4, 4);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) local += m(a, b) * kron(*s[a], *s[b]);
      detail::scatter_two_site(trip, local, n_spin, link.j, link.k, dim);
    }
  }
  sys.hamiltonian.resize(dim, dim);
  sys.hamiltonian.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

// psi -> exp(scale * H) psi by Lanczos (H Hermitian, scale anti-Hermitian or
// small); full reorthogonalization on the Krylov block.
inline Vec expm_multiply(const std::function<Vec(const Vec&)>& apply_h, const Vec& psi, cplx scale,
                         int m = 40, double breakdown_tol = 1e-13) {
  double beta0 = psi.norm();
  if (beta0 == 0.0) return psi;
  long dim = psi.size();
  m = int(std::min<long>(m, dim));
  Mat V(dim, m);
  std::vector<double> alpha, beta;
  V.col(0) = psi / beta0;
  int k = 0;
  for (; k < m; ++k) {
    Vec w = apply_h(V.col(k));
    double a = (V.col(k).dot(w)).real();
    alpha.push_back(a);
    w -= a * V.col(k);
    if (k > 0) w -= beta[k - 1] * V.col(k - 1);
    for (int r = 0; r <= k; ++r) w -= (V.col(r).dot(w)) * V.col(r);  // reorthogonalize
    double b = w.norm();
    if (k + 1 == m || b < breakdown_tol) {
      ++k;
      break;
    }
    beta.push_back(b);
    V.col(k + 1) = w / b;
  }
  RMat T = RMat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(T);
  Vec e1 = Vec::Zero(k);
  e1(0) = beta0;
  Vec small = es.eigenvectors().cast<cplx>() *
              ((es.eigenvalues().cast<cplx>().array() * scale).exp().matrix().asDiagonal() *
               (es.eigenvectors().transpose().cast<cplx>() * e1));
  return V.leftCols(k) * small;
}

struct DustRow {
  int n_spin, rank;
  Tuning tuning;
  double sample_time, fidelity;
};

struct DustExperimentResult {
  std::vector<DustRow> rows;
  std::vector<std::pair<int, double>> median_fidelity;  // per rank
};

// Exact trajectory with triaxial per-spin spinometers (theta = 0.1,
// dt = 0.1) over the dust Hamiltonian; projections onto GK manifolds of
// each requested rank at n_samples points past t_burn (warm-started).
inline DustExperimentResult run_dust_experiment(int n_spin, const std::vector<int>& ranks, Tuning tuning,
                                                std::uint64_t seed, double t_burn = 100.0,
                                                int n_samples = 30, double sample_spacing = 1.0,
                                                int proj_iters = 200, double proj_tol = 1e-6) {
  if (n_spin > 12) throw std::invalid_argument("exact shadow capped at 12 spins");
  const double dt = 0.1, theta = 0.1;
  DustSystem sys = build_dust(n_spin, seed);
  const long dim = 1L << n_spin;

  SpinRep rep = make_spin_ops(0.5);
  std::vector<std::pair<int, MeasurementPair>> pairs;
  for (int spin = 0; spin < n_spin; ++spin)
    for (int axis = 1; axis <= 3; ++axis) pairs.push_back({spin, make_pair(rep, tuning, theta, axis)});
  std::vector<int> dims(n_spin, 2);

  Mat u_half;  // dense propagator for small dims; Lanczos otherwise
  const bool dense = dim <= 2048;
  if (dense) {
    double hdt = 0.5 * dt;
    u_half = hermitian_function(Mat(sys.hamiltonian), [hdt](double w) { return std::exp(-I_UNIT * (hdt * w)); });
  }
  auto apply_h = [&](const Vec& v) { return sys.apply(v); };
  auto half_step = [&](Vec& psi) {
    if (dense) psi = u_half * psi;
    else psi = expm_multiply(apply_h, psi, -I_UNIT * (0.5 * dt));
    psi /= psi.norm();
  };

  Vec psi = Vec::Unit(dim, 0);
  std::map<int, GKState> warm;
  for (int r : ranks) {
    GKState g;
    g.order = n_spin;
    g.rank = r;
    g.factor_dims = dims;
    g.antisymmetric = false;
    GKState rnd = random_gk_state(n_spin, r, 2, rng::key(seed, 0x77, r));
    g.coeffs = rnd.coeffs;
    warm[r] = g;
  }

  DustExperimentResult out;
  std::map<int, std::vector<double>> fids;
  int n_burn = int(t_burn / dt);
  int per_sample = std::max(1, int(sample_spacing / dt));
  int n_total = n_burn + n_samples * per_sample;
  for (int n = 0; n < n_total; ++n) {
    half_step(psi);
    step(psi, pairs, dims, [&](int pair_idx) {
      return rng::uniform(seed, 0, std::uint64_t(n), std::uint64_t(pair_idx));
    });
    half_step(psi);
    bool is_sample = (n >= n_burn) && ((n - n_burn + 1) % per_sample == 0);
    if (!is_sample) continue;
    double t = (n + 1) * dt;
    for (int r : ranks) {
      auto res = project(psi, warm[r], 0.5, proj_iters, proj_tol);
      // reseed on a poor warm-started landing
      GKState cold = warm[r];
      GKState rnd = random_gk_state(n_spin, r, 2, rng::key(seed, 0x78, r, std::uint64_t(n)));
      cold.coeffs = rnd.coeffs;
      auto res2 = project(psi, cold, 0.5, proj_iters, proj_tol);
      if (res2.fidelity > res.fidelity) res = res2;
      warm[r] = res.gk;
      out.rows.push_back({n_spin, r, tuning, t, res.fidelity});
      fids[r].push_back(res.fidelity);
    }
  }
  for (auto& [r, v] : fids) {
    std::sort(v.begin(), v.end());
    out.median_fidelity.push_back({r, v[v.size() / 2]});
  }
  return out;
}

}  // namespace qmor
