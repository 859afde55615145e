#pragma once
// Projective model order reduction: project Hilbert-space states onto GK
// manifolds by metric-pseudoinverse gradient flow, take reduced-order
// dynamical steps, run fully projected trajectories with optional exact
// shadow runs, and score fidelity plus local quantum metrics.

#include <optional>

#include "qmor/gk_manifold.hpp"
#include "qmor/trajectory.hpp"

namespace qmor {

inline double fidelity(const Vec& psi_k, const Vec& psi0) {
  double nk = psi_k.norm(), n0 = psi0.norm();
  if (nk == 0.0 || n0 == 0.0) throw std::invalid_argument("fidelity of a zero vector");
  return std::abs(psi_k.dot(psi0)) / (nk * n0);
}

struct ProjectionResult {
  GKState gk;
  double distance = 0.0;  // ||psi_K - psi0||
  double fidelity = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Downhill gradient flow dc = step * (A^ A)^P A^ (psi0 - psi), i.e. the
// metric-pseudoinverse gradient of |psi - psi0|^2 (a Gauss-Newton step at
// step = 1). Step-size schedule: halved when the distance increases (move
// reverted), doubled after 5 consecutive decreases, capped at 1.
inline ProjectionResult project(const Vec& psi0, const GKState& init, double step = 0.5,
                                int max_iter = 2000, double tol = 1e-9, double svd_tol = 1e-10) {
  if (psi0.norm() == 0.0) throw std::invalid_argument("cannot project the zero vector");
  GKState cur = init;
  cur.validate();
  if (evaluate(cur).norm() == 0.0) throw std::invalid_argument("initial guess evaluates to zero");

  ProjectionResult res;
  TangentFrame fr = tangent_frame(cur, svd_tol);
  double dist = (fr.psi - psi0).norm();
  GKState best = cur;
  double best_dist = dist;
  int decreases = 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    Vec resid = psi0 - fr.psi;
    Vec tangential = fr.project_tangent(resid);
    if (tangential.norm() < tol) {
      res.converged = true;
      break;
    }
    Vec dc = step * (0.5 * (fr.g_pinv * (fr.A.adjoint() * resid)));
    GKState trial = cur;
    trial.set_coords_flat(Vec(cur.coords_flat() + dc));
    if ((it + 1) % 50 == 0) balance_rows(trial);
    TangentFrame trial_fr = tangent_frame(trial, svd_tol);
    double trial_dist = (trial_fr.psi - psi0).norm();
    if (trial_dist <= dist) {
      cur = std::move(trial);
      fr = std::move(trial_fr);
      dist = trial_dist;
      if (++decreases >= 5) {
        step = std::min(2.0 * step, 1.0);
        decreases = 0;
      }
      if (dist < best_dist) {
        best = cur;
        best_dist = dist;
      }
    } else {
      step *= 0.5;
      decreases = 0;
      if (step < 1e-14) break;  // stalled
    }
    if (dist > 10.0 * best_dist) break;  // divergence guard
  }
  res.gk = best;
  res.distance = best_dist;
  res.fidelity = fidelity(evaluate(best), psi0);
  res.iterations = it;
  return res;
}

// One reduced-order dynamical update: delta_c solves the tangent-space
// least-squares problem A delta_c = dt * G psi, via delta_c = g^P dbar(phi)
// with phi = <psi| dt G |psi>/2.
inline GKState projected_step(const GKState& state, const Mat& G, double dt, double svd_tol = 1e-10) {
  TangentFrame fr = tangent_frame(state, svd_tol);
  Vec dc = 0.5 * (fr.g_pinv * (fr.A.adjoint() * (G * fr.psi))) * dt;
  GKState out = state;
  out.set_coords_flat(Vec(state.coords_flat() + dc));
  return out;
}

struct ProjectedTrajectoryResult {
  TrajectoryRecord record;
  std::vector<double> fidelity_series;  // vs exact shadow run (if enabled)
  GKState final_gk;
  int flagged_steps = 0;  // projections that failed to converge mid-run
};

// Fully projected trajectory: branch probabilities evaluated on psi_K, the
// selected operator applied in full Hilbert space, the result re-projected
// with a warm start. A shadow exact trajectory (same clicks) scores fidelity.
inline ProjectedTrajectoryResult run_projected_trajectory(const SimulationConfig& cfg, int gk_rank,
                                                          std::uint64_t traj_index = 0,
                                                          bool shadow = true, int proj_iters = 200,
                                                          double proj_tol = 1e-8) {
  cfg.validate();
  const long dimH = cfg.hilbert_dim();
  GKState gk;
  gk.order = int(cfg.dims.size());
  gk.rank = gk_rank;
  gk.factor_dims = cfg.dims;
  gk.antisymmetric = false;
  gk.coeffs.assign(gk_rank, {});
  {
    rng::Stream rs(rng::key(cfg.seed, 0x6b57, traj_index), 0x1ull);
    for (int r = 0; r < gk.rank; ++r) {
      gk.coeffs[r].resize(gk.order);
      for (int f = 0; f < gk.order; ++f) {
        Vec v(cfg.dims[f]);
        for (int i = 0; i < cfg.dims[f]; ++i) v(i) = cplx(rs.normal(), rs.normal());
        gk.coeffs[r][f] = v / v.norm();
      }
    }
  }
  // Start on the manifold at the projection of the |0..0> initial state.
  Vec psi0 = Vec::Unit(dimH, 0);
  auto pr0 = project(psi0, gk, 0.5, proj_iters, proj_tol);
  gk = pr0.gk;

  ProjectedTrajectoryResult out;
  out.record.clicks.assign(cfg.pairs.size(), {});
  Vec shadow_psi = psi0;
  Mat u_half = detail::half_step_unitary(cfg);
  for (int n = 0; n < cfg.n_steps; ++n) {
    Vec psi_k = evaluate(gk);
    psi_k /= psi_k.norm();
    if (u_half.size() > 0) psi_k = u_half * psi_k;
    std::vector<int> clicks;
    for (size_t k = 0; k < cfg.pairs.size(); ++k) {
      const auto& [site, p] = cfg.pairs[k];
      Vec plus = apply_local(p.m_plus, psi_k, cfg.dims, site);
      double p_plus = plus.squaredNorm() / psi_k.squaredNorm();
      double u = rng::uniform(cfg.seed, traj_index, std::uint64_t(n), std::uint64_t(k));
      if (u < p_plus) {
        psi_k = plus;
        clicks.push_back(+1);
      } else {
        psi_k = apply_local(p.m_minus, psi_k, cfg.dims, site);
        clicks.push_back(-1);
      }
      psi_k /= psi_k.norm();
    }
    if (u_half.size() > 0) psi_k = u_half * psi_k;
    psi_k /= psi_k.norm();
    auto pr = project(psi_k, gk, 0.5, proj_iters, proj_tol);  // warm start
    if (!pr.converged) ++out.flagged_steps;
    gk = pr.gk;
    for (size_t k = 0; k < clicks.size(); ++k) out.record.clicks[k].push_back(clicks[k]);
    if (shadow) {
      if (u_half.size() > 0) shadow_psi = u_half * shadow_psi;
      for (size_t k = 0; k < cfg.pairs.size(); ++k) {
        const auto& [site, p] = cfg.pairs[k];
        shadow_psi = apply_local(clicks[k] > 0 ? p.m_plus : p.m_minus, shadow_psi, cfg.dims, site);
        shadow_psi /= shadow_psi.norm();
      }
      if (u_half.size() > 0) {
        shadow_psi = u_half * shadow_psi;
        shadow_psi /= shadow_psi.norm();
      }
      out.fidelity_series.push_back(fidelity(evaluate(gk), shadow_psi));
    }
  }
  out.record.final_state = evaluate(gk);
  out.record.final_state /= out.record.final_state.norm();
  out.record.filtered.resize(out.record.clicks.size());
  for (size_t k = 0; k < out.record.clicks.size(); ++k) {
    std::vector<double> x(out.record.clicks[k].begin(), out.record.clicks[k].end());
    out.record.filtered[k] = low_pass(x, cfg.filter_tau, cfg.dt);
  }
  out.final_gk = gk;
  return out;
}

struct LocalMetrics {
  Eigen::Matrix3d covariance;   // Sigma_jk = <sig_j^A sig_k^B> - <sig_j^A><sig_k^B>
  double concurrence = 0.0;
  double mutual_information = 0.0;  // bits
};

// Two-spin metrics from the reduced density matrices of a 2^n-dimensional
// pure state. With spin_a == spin_b the covariance degenerates to the
// single-spin symmetrized covariance and the pair metrics are zero.
inline LocalMetrics local_metrics(const Vec& psi, const std::vector<int>& dims, int spin_a, int spin_b) {
  for (int d : dims)
    if (d != 2) throw std::invalid_argument("local metrics require spin-1/2 sites");
  if (spin_a < 0 || spin_b < 0 || spin_a >= int(dims.size()) || spin_b >= int(dims.size()))
    throw std::invalid_argument("invalid spin pair");
  Mat sig[3];
  sig[0] = (Mat(2, 2) << 0, 1, 1, 0).finished();
  sig[1] = (Mat(2, 2) << 0, -I_UNIT, I_UNIT, 0).finished();
  sig[2] = (Mat(2, 2) << 1, 0, 0, -1).finished();

  Mat rho_a = reduced_density(psi, dims, {spin_a});
  if (spin_a == spin_b) {
    LocalMetrics out;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double joint = (rho_a * (0.5 * (sig[j] * sig[k] + sig[k] * sig[j]))).trace().real();
        out.covariance(j, k) =
            joint - (rho_a * sig[j]).trace().real() * (rho_a * sig[k]).trace().real();
      }
    out.concurrence = 0.0;
    out.mutual_information = 0.0;
    return out;
  }
  Mat rho_b = reduced_density(psi, dims, {spin_b});
  std::vector<int> keep = {std::min(spin_a, spin_b), std::max(spin_a, spin_b)};
  Mat rho_ab = reduced_density(psi, dims, keep);
  if (spin_a > spin_b) {
    // reorder so the first tensor slot is spin_a
    Mat swapped(4, 4);
    auto ix = [](int i, int j) { return 2 * i + j; };
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) swapped(ix(j, i), ix(l, k)) = rho_ab(ix(i, j), ix(k, l));
    rho_ab = swapped;
  }

  LocalMetrics out;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double joint = (rho_ab * kron(sig[j], sig[k])).trace().real();
      double ma = (rho_a * sig[j]).trace().real();
      double mb = (rho_b * sig[k]).trace().real();
      out.covariance(j, k) = joint - ma * mb;
    }

  Mat yy = kron(sig[1], sig[1]);
  Mat rmat = rho_ab * yy * rho_ab.conjugate() * yy;
  Eigen::ComplexEigenSolver<Mat> es(rmat);
  std::vector<double> lam;
  // eigenvalues below the double-precision roundoff floor of rho * rho~ are
  // pure noise (their square roots would otherwise pollute the difference)
  for (int i = 0; i < 4; ++i) {
    double l = es.eigenvalues()(i).real();
    lam.push_back(l > 1e-14 ? l : 0.0);
  }
  std::sort(lam.rbegin(), lam.rend());
  out.concurrence = std::max(0.0, std::sqrt(lam[0]) - std::sqrt(lam[1]) - std::sqrt(lam[2]) - std::sqrt(lam[3]));
  out.mutual_information = entropy_bits(rho_a) + entropy_bits(rho_b) - entropy_bits(rho_ab);
  return out;
}

}  // namespace qmor
