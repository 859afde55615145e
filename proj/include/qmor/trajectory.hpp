#pragma once
// Stochastic trajectory engine: alternate unitary evolution (Strang split
// steps) with stochastic measurement branches, emit click streams, filter
// them, and run ensembles with a counter-keyed RNG so results are
// reproducible independent of scheduling.

#include <functional>
#include <optional>
#include <vector>

#include "qmor/measurement.hpp"
#include "qmor/rng.hpp"

namespace qmor {

struct SimulationConfig {
  std::vector<int> dims;      // Hilbert dimension per spin
  Mat hamiltonian;            // Hermitian; empty (0x0) for none
  std::vector<std::pair<int, MeasurementPair>> pairs;  // (spin index, pair)
  double dt = 0.1;
  int n_steps = 0;
  std::uint64_t seed = 0;
  double filter_tau = 1.0;

  long hilbert_dim() const {
    long d = 1;
    for (int x : dims) d *= x;
    return d;
  }
  void validate() const {
    if (dt <= 0) throw std::invalid_argument("dt must be positive");
    if (dims.empty()) throw std::invalid_argument("at least one spin required");
    for (const auto& [site, p] : pairs) {
      if (site < 0 || site >= int(dims.size())) throw std::invalid_argument("pair spin index out of range");
      if (p.dim() != dims[site]) throw std::invalid_argument("pair dimension mismatch");
      if (p.completeness_defect() > 1e-9) throw std::invalid_argument("pair violates completeness");
    }
    if (hamiltonian.size() > 0 && hamiltonian.rows() != hilbert_dim())
      throw std::invalid_argument("Hamiltonian dimension mismatch");
  }
};

struct TrajectoryRecord {
  std::vector<std::vector<int>> clicks;       // [pair][step], entries +-1
  std::vector<std::vector<double>> filtered;  // [pair][step]
  Vec final_state;
  std::vector<std::vector<double>> observables;  // [obs][step] optional
};

// One measurement sweep over all pairs in fixed order. uniform(pair_index)
// must return an iid U[0,1) draw; clicks are +-1.
inline std::vector<int> step(Vec& psi, const std::vector<std::pair<int, MeasurementPair>>& pairs,
                             const std::vector<int>& dims,
                             const std::function<double(int)>& uniform) {
  std::vector<int> clicks;
  clicks.reserve(pairs.size());
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto& [site, p] = pairs[k];
    Vec plus = apply_local(p.m_plus, psi, dims, site);
    double p_plus = plus.squaredNorm() / psi.squaredNorm();
    if (p_plus < -1e-10 || p_plus > 1.0 + 1e-10) throw std::runtime_error("broken measurement pair");
    if (uniform(int(k)) < p_plus) {
      psi = plus;
      clicks.push_back(+1);
    } else {
      psi = apply_local(p.m_minus, psi, dims, site);
      clicks.push_back(-1);
    }
    psi /= psi.norm();
  }
  return clicks;
}

// Single-pole exponential filter y_{n+1} = y_n + (dt/tau)(x_n - y_n), y0 = x0.
inline std::vector<double> low_pass(const std::vector<double>& x, double tau, double dt) {
  if (tau <= 0) throw std::invalid_argument("tau must be positive");
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (size_t n = 0; n + 1 < x.size(); ++n) y[n + 1] = y[n] + (dt / tau) * (x[n] - y[n]);
  return y;
}

namespace detail {
inline Mat half_step_unitary(const SimulationConfig& cfg) {
  if (cfg.hamiltonian.size() == 0) return Mat();
  if ((cfg.hamiltonian - cfg.hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("Hamiltonian must be Hermitian");
  double hdt = 0.5 * cfg.dt;
  return hermitian_function(cfg.hamiltonian, [hdt](double w) { return std::exp(-I_UNIT * (hdt * w)); });
}
}  // namespace detail

// Deterministic given (config.seed, traj_index). Initial state defaults to
// the first basis vector. Observables are full-Hilbert Hermitian matrices
// sampled after every step.
inline TrajectoryRecord run_trajectory(const SimulationConfig& cfg, std::uint64_t traj_index = 0,
                                       const Vec* initial = nullptr,
                                       const std::vector<Mat>* observables = nullptr) {
  cfg.validate();
  const long dimH = cfg.hilbert_dim();
  Vec psi = initial ? *initial : Vec::Unit(dimH, 0);
  psi /= psi.norm();
  Mat u_half = detail::half_step_unitary(cfg);

  TrajectoryRecord rec;
  rec.clicks.assign(cfg.pairs.size(), {});
  if (observables) rec.observables.assign(observables->size(), {});
  for (int n = 0; n < cfg.n_steps; ++n) {
    if (u_half.size() > 0) psi = u_half * psi;
    auto clicks = step(psi, cfg.pairs, cfg.dims, [&](int pair_idx) {
      return rng::uniform(cfg.seed, traj_index, std::uint64_t(n), std::uint64_t(pair_idx));
    });
    if (u_half.size() > 0) {
      psi = u_half * psi;
      psi /= psi.norm();
    }
    for (size_t k = 0; k < clicks.size(); ++k) rec.clicks[k].push_back(clicks[k]);
    if (observables)
      for (size_t o = 0; o < observables->size(); ++o)
        rec.observables[o].push_back((psi.dot((*observables)[o] * psi)).real());
  }
  rec.final_state = psi;
  rec.filtered.resize(rec.clicks.size());
  for (size_t k = 0; k < rec.clicks.size(); ++k) {
    std::vector<double> x(rec.clicks[k].begin(), rec.clicks[k].end());
    rec.filtered[k] = low_pass(x, cfg.filter_tau, cfg.dt);
  }
  return rec;
}

struct EnsembleResult {
  std::vector<int> sample_steps;
  std::vector<Mat> rho;         // ensemble density matrices at sample steps
  RMat obs_mean, obs_var;       // [n_obs x n_steps], over trajectories
};

inline EnsembleResult run_ensemble(const SimulationConfig& cfg, int n_traj,
                                   const std::vector<Mat>& observables = {},
                                   int rho_sample_stride = 0, const Vec* initial = nullptr) {
  if (n_traj < 1) throw std::invalid_argument("n_traj >= 1 required");
  cfg.validate();
  EnsembleResult out;
  if (rho_sample_stride > 0)
    for (int n = rho_sample_stride; n <= cfg.n_steps; n += rho_sample_stride) out.sample_steps.push_back(n);
  const long dimH = cfg.hilbert_dim();
  out.rho.assign(out.sample_steps.size(), Mat::Zero(dimH, dimH));
  out.obs_mean = RMat::Zero(observables.size(), cfg.n_steps);
  out.obs_var = RMat::Zero(observables.size(), cfg.n_steps);

  Mat u_half = detail::half_step_unitary(cfg);
  for (int t = 0; t < n_traj; ++t) {
    Vec psi = initial ? *initial : Vec::Unit(dimH, 0);
    psi /= psi.norm();
    size_t next_sample = 0;
    for (int n = 0; n < cfg.n_steps; ++n) {
      if (u_half.size() > 0) psi = u_half * psi;
      step(psi, cfg.pairs, cfg.dims, [&](int pair_idx) {
        return rng::uniform(cfg.seed, std::uint64_t(t), std::uint64_t(n), std::uint64_t(pair_idx));
      });
      if (u_half.size() > 0) {
        psi = u_half * psi;
        psi /= psi.norm();
      }
      for (size_t o = 0; o < observables.size(); ++o) {
        double v = (psi.dot(observables[o] * psi)).real();
        out.obs_mean(o, n) += v;
        out.obs_var(o, n) += v * v;
      }
      if (next_sample < out.sample_steps.size() && n + 1 == out.sample_steps[next_sample]) {
        out.rho[next_sample] += psi * psi.adjoint();
        ++next_sample;
      }
    }
  }
  for (auto& r : out.rho) r /= double(n_traj);
  out.obs_mean /= double(n_traj);
  for (Eigen::Index o = 0; o < out.obs_var.rows(); ++o)
    for (Eigen::Index n = 0; n < out.obs_var.cols(); ++n) {
      double m = out.obs_mean(o, n);
      out.obs_var(o, n) = out.obs_var(o, n) / double(n_traj) - m * m;
    }
  return out;
}

enum class EinselectionKind { uniaxial_variance, triaxial_covariance };

// Ensemble mean of the per-trajectory operator variance:
//   uniaxial: E[<s^2> - <s>^2] for the measurement generator s,
//   triaxial: E[tr Lambda] = E[j(j+1) - sum_k <s_k>^2] (single spin-j).
inline std::vector<double> einselection_tracker(EinselectionKind kind, const SimulationConfig& cfg,
                                                int n_traj, const SpinRep& rep,
                                                const Vec* initial = nullptr) {
  if (cfg.dims.size() != 1 || cfg.dims[0] != rep.dim)
    throw std::invalid_argument("einselection tracker expects a single matching spin");
  cfg.validate();
  std::vector<double> series(cfg.n_steps, 0.0);
  const Mat* gen = nullptr;
  if (kind == EinselectionKind::uniaxial_variance) {
    if (cfg.pairs.empty()) throw std::invalid_argument("uniaxial tracker needs a measurement pair");
    gen = &rep.axis(cfg.pairs[0].second.axis);
  }
  Mat u_half = detail::half_step_unitary(cfg);
  for (int t = 0; t < n_traj; ++t) {
    Vec psi = initial ? *initial : Vec::Unit(rep.dim, 0);
    psi /= psi.norm();
    for (int n = 0; n < cfg.n_steps; ++n) {
      if (u_half.size() > 0) psi = u_half * psi;
      step(psi, cfg.pairs, cfg.dims, [&](int pair_idx) {
        return rng::uniform(cfg.seed, std::uint64_t(t), std::uint64_t(n), std::uint64_t(pair_idx));
      });
      if (u_half.size() > 0) {
        psi = u_half * psi;
        psi /= psi.norm();
      }
      if (kind == EinselectionKind::uniaxial_variance) {
        double m1 = (psi.dot(*gen * psi)).real();
        double m2 = (psi.dot(*gen * (*gen * psi))).real();
        series[n] += m2 - m1 * m1;
      } else {
        double sum_sq = 0.0;
        for (int k = 1; k <= 3; ++k) {
          double mk = (psi.dot(rep.axis(k) * psi)).real();
          sum_sq += mk * mk;
        }
        series[n] += rep.j * (rep.j + 1.0) - sum_sq;
      }
    }
  }
  for (double& v : series) v /= double(n_traj);
  return series;
}

}  // namespace qmor
