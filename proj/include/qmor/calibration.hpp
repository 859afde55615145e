#pragma once
// Calibration: invert target relaxation rates, temperatures, oscillator
// parameters, or noise power spectral densities into raw spinometer
// parameters {theta_i, alpha, click rate r}, plus the quantum-limit
// identities every calibrated observer saturates. hbar = 1 throughout.
//
// Bloch inversion. With feedback gain alpha and click rate r the asymmetric
// Bloch rates are
//   Gx = r (a^2 tx^2 + ty^2 + tz^2) / 2,
//   Gy = r (tx^2 + a^2 ty^2 + tz^2) / 2,
//   Gz = r (1 + a^2) (tx^2 + ty^2) / 2         (ti^2 = theta_i^2, a = alpha).
// Solving for the first-class epsilons (eps^2 = (1+a^2) theta^2 / 4 for the
// x/y closed-loop pairs; the z pair's feedback generator t x s vanishes on
// the thermal axis, so it is plain synoptic with eps_z^2 = theta_z^2 / 4):
//   eps_x^2 = [Gz - s (Gx - Gy) cosh(beta/2)] / (4 r),
//   eps_y^2 = [Gz + s (Gx - Gy) cosh(beta/2)] / (4 r),   s = sgn(1 - a^2),
//   eps_z^2 = [Gx + Gy - Gz] / (4 r).
// Positivity of the three numerators is exactly the feasibility inequality
//   |Gx - Gy| cosh(beta/2) <= Gz <= Gx + Gy.

#include <cmath>
#include <stdexcept>
#include <string>

#include "qmor/measurement.hpp"

namespace qmor {

struct BlochCalibration {
  double alpha = 0;
  double beta = 0;
  double r = 0;  // clicks per second (integer-valued by construction)
  double theta_x = 0, theta_y = 0, theta_z = 0;
  double eps_x = 0, eps_y = 0, eps_z = 0;
};

inline double thermal_alpha(double beta) { return -std::tanh(beta / 4.0); }

inline BlochCalibration calibrate_bloch(double gx, double gy, double gz, double beta,
                                        double eps_max = 0.1, bool reciprocal_branch = false) {
  if (gx <= 0 || gy <= 0 || gz <= 0) throw std::invalid_argument("relaxation rates must be positive");
  if (eps_max <= 0) throw std::invalid_argument("eps_max must be positive");
  double ch = std::cosh(beta / 2.0);
  if (std::abs(gx - gy) * ch > gz + 1e-12 * (gx + gy + gz))
    throw std::invalid_argument("infeasible rates: |Gx - Gy| cosh(beta/2) exceeds Gz");
  if (gz > gx + gy + 1e-12 * (gx + gy + gz))
    throw std::invalid_argument("infeasible rates: Gz exceeds Gx + Gy");

  BlochCalibration cal;
  cal.beta = beta;
  double a = thermal_alpha(beta);
  if (reciprocal_branch) {
    if (a == 0.0) throw std::invalid_argument("reciprocal branch undefined at beta = 0");
    a = 1.0 / a;
  }
  cal.alpha = a;
  double sgn = (1.0 - a * a) >= 0 ? 1.0 : -1.0;
  // r eps_i^2 = num_i / 4; pick the smallest integer r with max eps <= eps_max.
  double num_x = gz - sgn * (gx - gy) * ch;
  double num_y = gz + sgn * (gx - gy) * ch;
  double num_z = gx + gy - gz;
  double num_max = std::max({num_x, num_y, num_z});
  cal.r = std::ceil(num_max / (4.0 * eps_max * eps_max));
  cal.eps_x = std::sqrt(std::max(0.0, num_x) / (4.0 * cal.r));
  cal.eps_y = std::sqrt(std::max(0.0, num_y) / (4.0 * cal.r));
  cal.eps_z = std::sqrt(std::max(0.0, num_z) / (4.0 * cal.r));
  double aa1 = 1.0 + a * a;
  cal.theta_x = std::sqrt(4.0 * cal.eps_x * cal.eps_x / aa1);
  cal.theta_y = std::sqrt(4.0 * cal.eps_y * cal.eps_y / aa1);
  cal.theta_z = 2.0 * cal.eps_z;
  return cal;
}

// The three calibrated spinometers on a spin-1/2 with thermal axis z:
// closed-loop pairs on x and y, synoptic on z.
inline std::vector<MeasurementPair> bloch_pairs(const BlochCalibration& cal) {
  SpinRep rep = make_spin_ops(0.5);
  static const double zhat[3] = {0, 0, 1};
  return {make_pair(rep, Tuning::closed_loop, cal.theta_x, 1, cal.alpha, zhat),
          make_pair(rep, Tuning::closed_loop, cal.theta_y, 2, cal.alpha, zhat),
          make_pair(rep, Tuning::synoptic, cal.theta_z, 3)};
}

struct TestMassCalibration {
  double beta = 0, q_factor = 0, omega0 = 0;  // inputs retained
  double alpha = 0;
  double r = 0;
  double epsilon = 0;
  double j_theta_sq = 0;  // j theta^2 of the large-j spinometer
};

inline TestMassCalibration calibrate_test_mass(double beta, double q_factor, double omega0,
                                               double eps_max = 0.1) {
  if (q_factor <= 0) throw std::invalid_argument("Q must be positive");
  if (beta <= 0) throw std::invalid_argument("beta must be positive");
  if (omega0 <= 0) throw std::invalid_argument("omega0 must be positive");
  TestMassCalibration cal;
  cal.beta = beta;
  cal.q_factor = q_factor;
  cal.omega0 = omega0;
  cal.alpha = thermal_alpha(beta);
  double coth = 1.0 / std::tanh(beta / 2.0);
  cal.r = std::ceil(omega0 * coth / (2.0 * q_factor * eps_max * eps_max));
  cal.epsilon = std::sqrt(omega0 * coth / (2.0 * q_factor * cal.r));
  cal.j_theta_sq = cal.epsilon * cal.epsilon / (1.0 + cal.alpha * cal.alpha);
  return cal;
}

enum class ObservationKind { spin_z, mass_q };

struct ObservationCalibration {
  ObservationKind kind = ObservationKind::spin_z;
  double noise_psd = 0;  // S_zn or S_qn
  double k = 0, omega0 = 0;  // mass_q only
  double r = 0;
  double epsilon = 0;
  double theta = 0;        // spin_z
  double j_theta_sq = 0;   // mass_q
};

inline ObservationCalibration calibrate_observation(ObservationKind kind, double noise_psd,
                                                    double k = 0, double omega0 = 0,
                                                    double eps_max = 0.1) {
  if (noise_psd <= 0) throw std::invalid_argument("noise PSD must be positive");
  ObservationCalibration cal;
  cal.kind = kind;
  cal.noise_psd = noise_psd;
  if (kind == ObservationKind::spin_z) {
    cal.r = std::ceil(1.0 / (2.0 * noise_psd * eps_max * eps_max));
    cal.epsilon = std::sqrt(1.0 / (2.0 * cal.r * noise_psd));
    cal.theta = 2.0 * cal.epsilon;
  } else {
    if (k <= 0 || omega0 <= 0) throw std::invalid_argument("mass_q needs positive k and omega0");
    cal.k = k;
    cal.omega0 = omega0;
    cal.r = std::ceil(omega0 / (4.0 * k * noise_psd * eps_max * eps_max));
    cal.epsilon = std::sqrt(omega0 / (4.0 * cal.r * k * noise_psd));
    cal.j_theta_sq = cal.epsilon * cal.epsilon;
  }
  return cal;
}

struct QuantumLimitReport {
  double s_qn = 0, gamma = 0, s_fn = 0, noise_figure = 0;
  double form_defect = 0;  // max disagreement among the equivalent S_fn forms
};

// S_fn = gamma^2 S_qn = hbar^2 / S_qn = hbar gamma; NF = 2 gamma S_qn / hbar.
inline QuantumLimitReport quantum_limit_report(const ObservationCalibration& cal) {
  QuantumLimitReport rep;
  rep.s_qn = cal.noise_psd;
  if (cal.kind == ObservationKind::mass_q) {
    rep.gamma = 4.0 * cal.k * cal.r * cal.j_theta_sq / cal.omega0;  // Hilbert backaction gain
  } else {
    rep.gamma = 2.0 * cal.r * cal.epsilon * cal.epsilon;  // theta^2 r / 2 in z units
  }
  double f1 = rep.gamma * rep.gamma * rep.s_qn;
  double f2 = 1.0 / rep.s_qn;
  double f3 = rep.gamma;
  rep.s_fn = f3;
  rep.form_defect = std::max(std::abs(f1 - f3), std::abs(f2 - f3));
  rep.noise_figure = 2.0 * rep.gamma * rep.s_qn;
  return rep;
}

}  // namespace qmor
