#pragma once
// Curvature of GK manifolds: Riemann tensor, Ricci tensor and eigenvalues,
// scalar curvature, intrinsic and directed sectional curvature, operator
// tangents, and closed-form gold standards.
//
// For the algebraic potential kappa = <psi|psi>/2 the Riemann components
//   R_{a b- c d-} = kappa_{,a b- c d-} - kappa_{,b- d- m} g^{m n-} kappa_{,n- a c}
// reduce exactly to (1/2) <H_(bd)| (I - Pi) |H_(ac)>, with H_(ac) the
// product-sum second derivatives and Pi the orthogonal projector onto
// range(A); entries are assembled as a Gram matrix of projected
// second-derivative vectors. The Fubini-Study mode (kappa = log<psi|psi>/2)
// expands the fourth mixed derivative of the log composition explicitly.

#include <map>
#include <vector>

#include "qmor/gk_manifold.hpp"

namespace qmor {

struct CurvatureReport {
  double scalar = 0.0;
  Mat ricci;                            // R_{alpha beta-bar}
  std::vector<double> ricci_eigenvalues;  // mixed tensor, ascending
  double bianchi_defect = 0.0;          // sampled symmetry defect
  int null_dim = 0;                     // gauge null-space dimension of g
};

class CurvatureEngine {
 public:
  explicit CurvatureEngine(const GKState& st, bool fubini_study = false, double svd_tol = 1e-10)
      : state_(st), fs_(fubini_study) {
    frame_ = tangent_frame(st, svd_tol);
    M_ = st.n_coords();
    // Enumerate nonzero second-derivative pairs (a < c): same row, distinct factors.
    for (int a = 0; a < M_; ++a) {
      auto ia = st.coord_id(a);
      for (int c = a + 1; c < M_; ++c) {
        auto ic = st.coord_id(c);
        if (ia.row != ic.row || ia.factor == ic.factor) continue;
        pair_pos_[{a, c}] = int(pairs_.size());
        pairs_.push_back({a, c});
      }
    }
    const long dimH = st.hilbert_dim();
    H_.resize(dimH, pairs_.size());
    for (size_t p = 0; p < pairs_.size(); ++p) H_.col(p) = second_derivative(st, pairs_[p].first, pairs_[p].second);
    if (!fs_) {
      Y_ = H_;
      for (Eigen::Index p = 0; p < Y_.cols(); ++p) Y_.col(p) = frame_.project_normal(H_.col(p));
      gramYY_ = Y_.adjoint() * Y_;
    } else {
      // N-derivative tensors for the log composition, N = <psi|psi>.
      N_ = frame_.psi.squaredNorm();
      w_ = frame_.A.adjoint() * frame_.psi;     // w(a) = <A_a|psi> = N_{a-bar}
      AA_ = frame_.A.adjoint() * frame_.A;      // AA(b,a) = <A_b|A_a> = N_{a b-bar}
      hpsi_ = H_.adjoint() * frame_.psi;        // conj -> <psi|H_p> = N_pair
      for (Eigen::Index p = 0; p < hpsi_.size(); ++p) hpsi_(p) = std::conj(hpsi_(p));
      AH_ = frame_.A.adjoint() * H_;            // AH(m,p) = <A_m|H_p>
      HH_ = H_.adjoint() * H_;                  // HH(q,p) = <H_q|H_p>
      // Fubini-Study metric g_{a b-} = (1/2) L_{,a b-} and its pseudoinverse.
      gfs_ = 0.5 * (AA_ / N_ - (w_ * w_.adjoint()) / (N_ * N_));
      auto pv = hermitian_pinv(gfs_, svd_tol);
      gfs_pinv_ = pv.pinv;
      gfs_half_pinv_ = pv.half_pinv;
      gfs_rank_ = pv.rank;
      // T3_(a,c) column vectors over nu of L_{,a c nu-bar}.
      T3_.assign(M_ * M_, Vec());
    }
  }

  const TangentFrame& frame() const { return frame_; }
  int n_coords() const { return M_; }
  bool fubini_study() const { return fs_; }
  double kappa() const { return fs_ ? 0.5 * std::log(frame_.psi.squaredNorm()) : frame_.kappa; }
  int metric_rank() const { return fs_ ? gfs_rank_ : frame_.g_rank; }
  const Mat& metric() const { return fs_ ? gfs_ : frame_.g; }
  const Mat& metric_pinv() const { return fs_ ? gfs_pinv_ : frame_.g_pinv; }

  // Riemann component R_{a b-bar c d-bar}.
  cplx riemann(int a, int b, int c, int d) const {
    if (!fs_) {
      int p = pair_index(b, d), q = pair_index(a, c);
      if (p < 0 || q < 0) return 0.0;
      return 0.5 * gramYY_(p, q);
    }
    cplx R = 0.5 * fourth_log(a, b, c, d);
    const Vec& tbd = third_vec(b, d);
    const Vec& tac = third_vec(a, c);
    R -= 0.25 * (tbd.adjoint() * (gfs_pinv_ * tac))(0);
    return R;
  }

  // Ricci R_{alpha beta-bar} = - sum_{gamma delta-bar} g^{gamma delta-bar} R_{alpha delta-bar gamma beta-bar}.
  Mat ricci_matrix() const {
    const Mat& G = metric_pinv();
    Mat ric = Mat::Zero(M_, M_);
    if (!fs_) {
      for (int a = 0; a < M_; ++a)
        for (int b = 0; b < M_; ++b) {
          cplx acc = 0.0;
          for (int g = 0; g < M_; ++g) {
            int q = pair_index(a, g);
            if (q < 0) continue;
            for (int d = 0; d < M_; ++d) {
              int p = pair_index(d, b);
              if (p < 0) continue;
              acc += G(g, d) * gramYY_(p, q);
            }
          }
          ric(a, b) = -0.5 * acc;
        }
    } else {
      for (int a = 0; a < M_; ++a)
        for (int b = 0; b < M_; ++b) {
          cplx acc = 0.0;
          for (int g = 0; g < M_; ++g)
            for (int d = 0; d < M_; ++d) acc += G(g, d) * riemann(a, d, g, b);
          ric(a, b) = -acc;
        }
    }
    return 0.5 * (ric + ric.adjoint());  // restore exact Hermiticity against roundoff
  }

  CurvatureReport report() const {
    CurvatureReport rep;
    rep.ricci = ricci_matrix();
    const Mat& G = metric_pinv();
    // scalar = 2 g^{ab-} R_{b- a}: with G(a,b) = g^{a b-} and ric(a,b) = R_{a b-}
    // both slots pair elementwise, i.e. tr(G ric^T) = tr(G conj(ric)).
    Mat ric_conj = rep.ricci.conjugate();
    rep.scalar = 2.0 * (G * ric_conj).trace().real();
    // Mixed-tensor eigenvalues via the Hermitian similarity g^{P/2} Ric g^{P/2}.
    Mat half = fs_ ? gfs_half_pinv_ : hermitian_pinv(frame_.g).half_pinv;
    Eigen::SelfAdjointEigenSolver<Mat> es(half * ric_conj * half);
    rep.ricci_eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + M_);
    rep.null_dim = M_ - metric_rank();
    rep.bianchi_defect = bianchi_defect_sampled(64, 1234);
    return rep;
  }

  // Sampled check of the Kählerian Bianchi index symmetries
  // R_{a b- c d-} = R_{c b- a d-} = R_{a d- c b-}.
  double bianchi_defect_sampled(int n_samples, std::uint64_t seed) const {
    rng::Stream rs(seed, 0xb1a2c3ull);
    double worst = 0.0, scale = 1e-300;
    for (int t = 0; t < n_samples; ++t) {
      int a = int(rs.below(M_)), b = int(rs.below(M_)), c = int(rs.below(M_)), d = int(rs.below(M_));
      cplx r1 = riemann(a, b, c, d), r2 = riemann(c, b, a, d), r3 = riemann(a, d, c, b);
      worst = std::max({worst, std::abs(r1 - r2), std::abs(r1 - r3)});
      scale = std::max(scale, std::abs(r1));
    }
    return worst / std::max(scale, 1.0);
  }

  // Second directional derivative vector W_xy = sum_{ac} x^a y^c H_(ac).
  Vec second_directional(const Vec& x, const Vec& y) const {
    Vec coef = Vec::Zero(pairs_.size());
    for (size_t p = 0; p < pairs_.size(); ++p) {
      auto [a, c] = pairs_[p];
      coef(p) = x(a) * y(c) + x(c) * y(a);
    }
    return H_ * coef;
  }

  // Metric pairing g(U,V) of real tangents with complex components u, v:
  // g(U,U) = <du psi|du psi>, g(U,V) = Re <du psi|dv psi>.
  double wedge_area_sq(const Vec& u, const Vec& v) const {
    Vec Au = frame_.A * u, Av = frame_.A * v;
    double guu = Au.squaredNorm(), gvv = Av.squaredNorm();
    double guv = (Au.dot(Av)).real();  // Eigen dot conjugates the left factor
    return guu * gvv - guv * guv;
  }

  // Intrinsic sectional curvature S(U,V) (algebraic embedding).
  double sectional(const Vec& u, const Vec& v, double area_tol = 1e-12) const {
    double den = wedge_area_sq(u, v);
    if (den <= area_tol) throw std::invalid_argument("degenerate section");
    Vec wuu = second_directional(u, u), wvv = second_directional(v, v), wuv = second_directional(u, v);
    Vec puu = frame_.project_normal(wuu), pvv = frame_.project_normal(wvv), puv = frame_.project_normal(wuv);
    double num = (puu.dot(pvv)).real() - puv.squaredNorm();
    return num / den;
  }

  // Directed sectional curvature S(U,V,n) for a normal given as a complex
  // Hilbert vector paired by Re<n|.>; n must satisfy Re<n|A u> = 0.
  double sectional_directed(const Vec& u, const Vec& v, const Vec& n, double area_tol = 1e-12) const {
    double den = wedge_area_sq(u, v);
    if (den <= area_tol) throw std::invalid_argument("degenerate section");
    double nuu = (n.dot(second_directional(u, u))).real();
    double nvv = (n.dot(second_directional(v, v))).real();
    double nuv = (n.dot(second_directional(u, v))).real();
    return (nuu * nvv - nuv * nuv) / den;
  }

  // Operator tangent (geometric quantum mechanics): component vector of the
  // tangent velocity field of q, normalized so g(V_q, V_q) = <psi|q P_K q|psi>.
  Vec tangent_from_operator(const Mat& q) const {
    if ((q - q.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("operator must be Hermitian");
    return 0.5 * (frame_.g_pinv * (frame_.A.adjoint() * (q * frame_.psi)));
  }

 private:
  int pair_index(int x, int y) const {
    if (x > y) std::swap(x, y);
    auto it = pair_pos_.find({x, y});
    return it == pair_pos_.end() ? -1 : it->second;
  }

  // L_{,a c nu-bar} over all nu for the log potential.
  const Vec& third_vec(int a, int c) const {
    Vec& slot = T3_[a * M_ + c];
    if (slot.size() == 0) {
      Vec t(M_);
      int p = pair_index(a, c);
      cplx Na = std::conj(w_(a)), Nc = std::conj(w_(c));
      cplx Nac = (p >= 0) ? hpsi_(p) : cplx(0, 0);
      for (int nu = 0; nu < M_; ++nu) {
        cplx Nacn = (p >= 0) ? AH_(nu, p) : cplx(0, 0);  // <A_nu|H_ac>
        cplx t3 = Nacn / N_ -
                  (Na * AA_(nu, c) + Nc * AA_(nu, a) + w_(nu) * Nac) / (N_ * N_) +
                  2.0 * Na * Nc * w_(nu) / (N_ * N_ * N_);
        t(nu) = t3;
      }
      slot = t;
    }
    return slot;
  }

  // L_{,a b-bar c d-bar} for the log potential.
  cplx fourth_log(int a, int b, int c, int d) const {
    int pac = pair_index(a, c), pbd = pair_index(b, d);
    cplx Nac = (pac >= 0) ? hpsi_(pac) : cplx(0, 0);
    cplx Nbd_bar = (pbd >= 0) ? std::conj(hpsi_(pbd)) : cplx(0, 0);
    cplx Na = std::conj(w_(a)), Nc = std::conj(w_(c));
    cplx Nb_bar = w_(b), Nd_bar = w_(d);
    cplx N4 = (pac >= 0 && pbd >= 0) ? HH_(pbd, pac) : cplx(0, 0);
    cplx Nacd = (pac >= 0) ? AH_(d, pac) : cplx(0, 0);         // N_{a c d-bar}
    cplx Nacb = (pac >= 0) ? AH_(b, pac) : cplx(0, 0);         // N_{a c b-bar}
    cplx Nbda = (pbd >= 0) ? std::conj(AH_(a, pbd)) : cplx(0, 0);  // N_{b- d- a}
    cplx Nbdc = (pbd >= 0) ? std::conj(AH_(c, pbd)) : cplx(0, 0);  // N_{b- d- c}
    cplx Nab = AA_(b, a), Ncd = AA_(d, c), Nad = AA_(d, a), Ncb = AA_(b, c);
    double N2 = N_ * N_, N3 = N2 * N_, N4p = N3 * N_;
    return N4 / N_ -
           (Nac * Nbd_bar + Nab * Ncd + Nad * Ncb + Nb_bar * Nacd + Nd_bar * Nacb + Na * Nbdc +
            Nc * Nbda) / N2 +
           2.0 * (Na * Nc * Nbd_bar + Nb_bar * Nd_bar * Nac + Na * Nb_bar * Ncd + Na * Nd_bar * Ncb +
                  Nc * Nb_bar * Nad + Nc * Nd_bar * Nab) / N3 -
           6.0 * Na * Nc * Nb_bar * Nd_bar / N4p;
  }

  GKState state_;
  bool fs_ = false;
  TangentFrame frame_;
  int M_ = 0;
  std::vector<std::pair<int, int>> pairs_;
  std::map<std::pair<int, int>, int> pair_pos_;
  Mat H_, Y_, gramYY_;
  // Fubini-Study caches
  double N_ = 0.0;
  Vec w_, hpsi_;
  Mat AA_, AH_, HH_, gfs_, gfs_pinv_, gfs_half_pinv_;
  int gfs_rank_ = 0;
  mutable std::vector<Vec> T3_;
};

enum class AnalyticKind { rank1, slater, slater_fubini_study };

// Closed-form gold standards.
//  rank1:  R = -(8/kappa) sum_{k != m} j_k j_m
//  slater: R = -(2/kappa) n (n-1) (n_orb - n)(n_orb - n - 1),  n_orb >= n
//  slater_fubini_study: R = 4 n n_orb (n_orb - n),             n_orb >= n
inline double analytic_curvature(AnalyticKind kind, const std::vector<double>& j_list, int n, int n_orb,
                                 double kappa) {
  switch (kind) {
    case AnalyticKind::rank1: {
      double acc = 0.0;
      for (size_t k = 0; k < j_list.size(); ++k)
        for (size_t m = 0; m < j_list.size(); ++m)
          if (k != m) acc += j_list[k] * j_list[m];
      return -(8.0 / kappa) * acc;
    }
    case AnalyticKind::slater:
      if (n_orb < n) throw std::invalid_argument("state vanishes: n_orb < n");
      return -(2.0 / kappa) * double(n) * (n - 1.0) * (n_orb - n) * (n_orb - n - 1.0);
    case AnalyticKind::slater_fubini_study:
      if (n_orb < n) throw std::invalid_argument("state vanishes: n_orb < n");
      return 4.0 * double(n) * double(n_orb) * (n_orb - n);
  }
  throw std::invalid_argument("unknown analytic curvature kind");
}

struct RicciExperimentResult {
  std::vector<std::vector<double>> eigenvalues;  // per sampled point
  std::string annotation;
};

inline RicciExperimentResult ricci_eigenvalue_experiment(int order, int rank, int d, std::uint64_t seed,
                                                         int n_points) {
  RicciExperimentResult out;
  out.annotation = "rank " + std::to_string(rank) + " x order " + std::to_string(order) +
                   "; gauge coordinate count rank*(order+1) = " + std::to_string(rank * (order + 1));
  for (int t = 0; t < n_points; ++t) {
    GKState st = random_gk_state(order, rank, d, rng::key(seed, t));
    CurvatureEngine eng(st);
    out.eigenvalues.push_back(eng.report().ricci_eigenvalues);
  }
  return out;
}

}  // namespace qmor
