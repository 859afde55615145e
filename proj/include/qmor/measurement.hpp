#pragma once
// Measurement-operator pairs (spinometers) in every tuning, unitary mixing
// of pairs (which leaves the operator-sum superoperator invariant), the
// first-class epsilon expansion, and density-matrix evolution.

#include <stdexcept>
#include <vector>

#include "qmor/spin_algebra.hpp"

namespace qmor {

enum class Tuning { raw, ergodic, batrachian, synoptic, closed_loop };

struct MeasurementPair {
  Mat m_plus, m_minus;
  Tuning tuning = Tuning::raw;
  double theta = 0.0;
  double alpha = 0.0;          // feedback gain (0 when unused)
  int axis = 3;                // generator axis 1..3
  double thermal_axis[3] = {0, 0, 1};  // closed_loop only

  int dim() const { return int(m_plus.rows()); }
  // Completeness defect || M+^ M+ + M-^ M- - I ||_max.
  double completeness_defect() const {
    Mat s = m_plus.adjoint() * m_plus + m_minus.adjoint() * m_minus;
    return (s - Mat::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
  }
};

struct EpsilonReport {
  double epsilon = 0.0;
  cplx c{0, 0}, s{0, 0};
};

// Build a spinometer pair from the spin generator rep.axis(axis):
//   raw:        (e^{i 2 theta s}, i I)/sqrt(2)
//   ergodic:    (e^{i theta s}, e^{-i theta s})/sqrt(2)
//   batrachian: (sin(theta s), cos(theta s))
//   synoptic:   (cos(theta s) + sin(theta s), cos(theta s) - sin(theta s))/sqrt(2)
//   closed_loop: synoptic pair premultiplied by e^{-/+ i alpha theta (t x s)_k},
//                the feedback generator being the axis-k component of t x s.
inline MeasurementPair make_pair(const SpinRep& rep, Tuning tuning, double theta, int axis = 3,
                                 double alpha = 0.0, const double* thermal_axis = nullptr) {
  if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  const Mat& s = rep.axis(axis);
  const double r2 = std::numbers::sqrt2;
  MeasurementPair p;
  p.tuning = tuning;
  p.theta = theta;
  p.axis = axis;
  Mat cos_ts = hermitian_function(s, [theta](double w) { return cplx(std::cos(theta * w), 0); });
  Mat sin_ts = hermitian_function(s, [theta](double w) { return cplx(std::sin(theta * w), 0); });
  switch (tuning) {
    case Tuning::raw:
      p.m_plus = hermitian_function(s, [theta](double w) { return std::exp(I_UNIT * (2.0 * theta * w)); }) / r2;
      p.m_minus = I_UNIT * Mat::Identity(rep.dim, rep.dim) / r2;
      break;
    case Tuning::ergodic:
      p.m_plus = (cos_ts + I_UNIT * sin_ts) / r2;
      p.m_minus = (cos_ts - I_UNIT * sin_ts) / r2;
      break;
    case Tuning::batrachian:
      p.m_plus = sin_ts;
      p.m_minus = cos_ts;
      break;
    case Tuning::synoptic:
      p.m_plus = (cos_ts + sin_ts) / r2;
      p.m_minus = (cos_ts - sin_ts) / r2;
      break;
    case Tuning::closed_loop: {
      if (thermal_axis == nullptr) throw std::invalid_argument("closed_loop requires a thermal axis");
      double nn = std::sqrt(thermal_axis[0] * thermal_axis[0] + thermal_axis[1] * thermal_axis[1] +
                            thermal_axis[2] * thermal_axis[2]);
      if (std::abs(nn - 1.0) > 1e-9) throw std::invalid_argument("thermal axis must be unit");
      p.alpha = alpha;
      for (int k = 0; k < 3; ++k) p.thermal_axis[k] = thermal_axis[k];
      // (t x s)_k = sum_lm eps_{k l m} t_l s_m
      const double* t = thermal_axis;
      Mat G;
      switch (axis) {
        case 1: G = t[1] * rep.s3 - t[2] * rep.s2; break;
        case 2: G = t[2] * rep.s1 - t[0] * rep.s3; break;
        case 3: G = t[0] * rep.s2 - t[1] * rep.s1; break;
        default: throw std::invalid_argument("spin axis must be 1, 2, or 3");
      }
      double at = alpha * theta;
      Mat fb_m = hermitian_function(G, [at](double w) { return std::exp(-I_UNIT * (at * w)); });
      p.m_plus = fb_m * (cos_ts + sin_ts) / r2;
      p.m_minus = fb_m.adjoint() * (cos_ts - sin_ts) / r2;
      break;
    }
    default:
      throw std::invalid_argument("unknown tuning");
  }
  return p;
}

// Theorema Dilectum mixing: (M+', M-')^T = U (M+, M-)^T for 2x2 unitary U.
inline MeasurementPair u_mix(const MeasurementPair& pair, const Eigen::Matrix2cd& U) {
  if ((U.adjoint() * U - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("mixing matrix must be unitary");
  MeasurementPair q = pair;
  q.m_plus = U(0, 0) * pair.m_plus + U(0, 1) * pair.m_minus;
  q.m_minus = U(1, 0) * pair.m_plus + U(1, 1) * pair.m_minus;
  return q;
}

// First-class expansion: c = tr M+/dim, s = tr M-/dim,
// eps^2 = tr(dM+^ dM+ + dM-^ dM-)/dim with dM± the traceless parts.
inline EpsilonReport epsilon_param(const MeasurementPair& pair) {
  const int d = pair.dim();
  EpsilonReport rep;
  rep.c = pair.m_plus.trace() / double(d);
  rep.s = pair.m_minus.trace() / double(d);
  Mat dp = pair.m_plus - rep.c * Mat::Identity(d, d);
  Mat dm = pair.m_minus - rep.s * Mat::Identity(d, d);
  double e2 = ((dp.adjoint() * dp + dm.adjoint() * dm).trace().real()) / double(d);
  rep.epsilon = std::sqrt(std::max(0.0, e2));
  return rep;
}

// rho' = sum_k (M+ rho M+^ + M- rho M-^); re-Hermitized to suppress drift.
inline Mat superoperator_apply(const std::vector<MeasurementPair>& pairs, const Mat& rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("density matrix must be Hermitian");
  Mat out = rho;
  for (const auto& p : pairs) {
    Mat next = p.m_plus * out * p.m_plus.adjoint() + p.m_minus * out * p.m_minus.adjoint();
    out = 0.5 * (next + next.adjoint());
  }
  return out;
}

}  // namespace qmor
