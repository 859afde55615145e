#pragma once
// Thermal operator, Q- and positive P-representations with the verification
// integral, Langevin drift-diffusion on the Bloch sphere, the Fokker-Planck
// stationary distribution, and the Lindblad increment of the closed-loop
// triaxial measurement process.

#include "qmor/measurement.hpp"
#include "qmor/spin_algebra.hpp"

namespace qmor {

struct ThermalSpec {
  double j = 0.5;
  double beta = 0.0;
  double axis[3] = {0, 0, 1};

  void validate() const {
    double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(n - 1.0) > 1e-9) throw std::invalid_argument("thermal axis must be unit");
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  }
};

// Unnormalized thermal operator exp(-beta t.s).
inline Mat thermal_matrix(const SpinRep& rep, double beta, const double t[3]) {
  return hermitian_function(rep.dot(t), [beta](double w) { return cplx(std::exp(-beta * w), 0); });
}

// Q-representation of an arbitrary operator: Q(x|rho) = <x|rho|x>.
inline double q_representation(const SpinRep& rep, const Mat& rho, const double x[3]) {
  Vec cs = coherent_state(rep, x).amplitudes;
  return (cs.dot(rho * cs)).real();
}

// Closed form for the thermal operator: (cosh b/2 - x.t sinh b/2)^{2j}.
inline double q_thermal(double j, double beta, const double t[3], const double x[3]) {
  double xt = x[0] * t[0] + x[1] * t[1] + x[2] * t[2];
  return std::pow(std::cosh(0.5 * beta) - xt * std::sinh(0.5 * beta), 2.0 * j);
}

// Positive P-representation of the spin-j thermal operator:
// P(x|rho_th^j) = 1/Q(-x|rho_th^{j+1}); strictly positive for all x, beta.
inline double p_thermal(double j, double beta, const double t[3], const double x[3]) {
  double mx[3] = {-x[0], -x[1], -x[2]};
  return 1.0 / q_thermal(j + 1.0, beta, t, mx);
}

struct MmprimeResult {
  cplx lhs{0, 0};
  double rhs = 0.0;
  double defect = 0.0;
};

// Verification integral: (2j+1)/(4pi) Int P(x) <j,m|x><x|j,m'> dOmega
// must equal e^{-beta m} delta_{mm'} (axis t = spin quantization axis z).
inline MmprimeResult verify_mmprime(double j, double m, double m_prime, double beta, int n_theta = 0,
                                    int n_phi = 0) {
  SpinRep rep = make_spin_ops(j);
  if (std::abs(m) > j || std::abs(m_prime) > j) throw std::invalid_argument("|m| must not exceed j");
  long im = std::lround(j - m), imp = std::lround(j - m_prime);
  if (n_theta <= 0) n_theta = int(4 * j) + 8;
  if (n_phi <= 0) n_phi = int(8 * j) + 16;
  const double t[3] = {0, 0, 1};
  cplx acc = 0.0;
  sphere_quadrature(n_theta, n_phi, [&](const double x[3], double w) {
    Vec cs = coherent_state(rep, x).amplitudes;
    acc += w * p_thermal(j, beta, t, x) * cs(im) * std::conj(cs(imp));
  });
  MmprimeResult out;
  out.lhs = acc * (2.0 * j + 1.0) / (4.0 * std::numbers::pi);
  out.rhs = (im == imp) ? std::exp(-beta * m) : 0.0;
  out.defect = std::abs(out.lhs - out.rhs);
  return out;
}

// Ito/Langevin coefficients of the closed-loop spinometer process on the
// Bloch ball, x = <s>/j, per unit theta^2-time.
struct DriftDiffusion {
  double j = 0.5, alpha = 0.0;
  Eigen::Vector3d t{0, 0, 1};

  Eigen::Vector3d a(const Eigen::Vector3d& x) const {
    double xt = x.dot(t);
    double jj4 = 4.0 * j * j;
    return (-x * (alpha * (2.0 * j - 1.0) * xt + 1.0 + 0.5 * alpha * alpha) +
            t * (alpha * (2.0 * j + 1.0) - 0.5 * alpha * alpha * xt)) /
           jj4;
  }

  Eigen::Matrix3d b(const Eigen::Vector3d& x) const {
    double xt = x.dot(t);
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - x * x.transpose() +
                        alpha * (t * x.transpose() - xt * Eigen::Matrix3d::Identity());
    return m / (2.0 * j);
  }

  // Ito increment of (x.x)^m per unit time:
  //   m (x.x)^{m-1} (2 x.a + tr b b^T) + 2 m (m-1) (x.x)^{m-2} x^T b b^T x.
  // Vanishes identically on the unit sphere (the process stays on it).
  double radial_increment(const Eigen::Vector3d& x, int m) const {
    Eigen::Matrix3d bb = b(x) * b(x).transpose();
    double r2 = x.squaredNorm();
    return m * std::pow(r2, m - 1) * (2.0 * x.dot(a(x)) + bb.trace()) +
           2.0 * m * (m - 1) * std::pow(r2, m - 2) * (x.transpose() * bb * x)(0);
  }
};

inline DriftDiffusion drift_diffusion(double j, double alpha, const double t[3]) {
  if (j < 0.5) throw std::invalid_argument("j >= 1/2 required");
  DriftDiffusion dd;
  dd.j = j;
  dd.alpha = alpha;
  dd.t = Eigen::Vector3d(t[0], t[1], t[2]);
  return dd;
}

// Stationary Fokker-Planck density on the sphere, z = x.t:
//   p_j(z) = C |A - 2z|^{-2j-2},  A = alpha + 1/alpha,
//   C = (2j+1) / (pi [ (|A|-2)^{-2j-1} - (|A|+2)^{-2j-1} ]),
// normalized so the integral over the unit sphere is 1; invariant under
// alpha <-> 1/alpha; uniform in the alpha -> 0 (infinite temperature) limit.
inline double stationary_pdf(double j, double alpha, double z) {
  if (std::abs(z) > 1.0 + 1e-12) throw std::invalid_argument("|z| <= 1 required");
  if (std::abs(alpha) < 1e-12) return 1.0 / (4.0 * std::numbers::pi);
  double aa = std::abs(alpha + 1.0 / alpha);
  double sgn = alpha > 0 ? 1.0 : -1.0;
  double c = (2.0 * j + 1.0) /
             (std::numbers::pi *
              (std::pow(aa - 2.0, -2.0 * j - 1.0) - std::pow(aa + 2.0, -2.0 * j - 1.0)));
  return c * std::pow(aa - 2.0 * sgn * z, -2.0 * j - 2.0);
}

// Lindblad increment of the closed-loop triaxial process (axis t = z),
// gamma = -4 alpha theta^2, nu = -1/2 - (alpha + 1/alpha)/4, per sweep.
inline Mat lindblad_increment(const Mat& rho, const SpinRep& rep, double theta, double alpha) {
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero (infinite temperature limit)");
  const double r2 = std::numbers::sqrt2;
  Mat sp = (rep.s1 + I_UNIT * rep.s2) / r2;
  Mat sm = (rep.s1 - I_UNIT * rep.s2) / r2;
  double gamma = -4.0 * alpha * theta * theta;
  double nu = -0.5 - 0.25 * (alpha + 1.0 / alpha);
  auto dissipator = [&](const Mat& l, const Mat& ldag) {
    return ldag * l * rho - 2.0 * l * rho * ldag + rho * ldag * l;
  };
  Mat out = -0.5 * gamma * (nu + 1.0) * dissipator(sm, sp) - 0.5 * gamma * nu * dissipator(sp, sm) -
            0.5 * theta * theta * dissipator(rep.s3, rep.s3);
  return out;
}

// One closed-loop triaxial superoperator sweep increment
// sum_k (M+ rho M+^ + M- rho M-^  - rho), axis t = z.
inline Mat thermal_increment(const Mat& rho, const SpinRep& rep, double theta, double alpha) {
  const double t[3] = {0, 0, 1};
  Mat acc = Mat::Zero(rep.dim, rep.dim);
  for (int axis = 1; axis <= 3; ++axis) {
    MeasurementPair p = make_pair(rep, Tuning::closed_loop, theta, axis, alpha, t);
    acc += p.m_plus * rho * p.m_plus.adjoint() + p.m_minus * rho * p.m_minus.adjoint() - rho;
  }
  return acc;
}

}  // namespace qmor
