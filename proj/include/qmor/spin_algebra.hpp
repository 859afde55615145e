#pragma once
// Spin-j operator representations, rotation operators, and spin coherent
// states; the algebra every measurement operator in this toolkit is built
// from.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qmor/linalg.hpp"

namespace qmor {

// Irreducible spin-j representation. s3 is diagonal with entries
// j, j-1, ..., -j; [s1, s2] = i s3 and cyclic.
struct SpinRep {
  double j = 0.0;
  int dim = 0;
  Mat s1, s2, s3;

  const Mat& axis(int k) const {
    switch (k) {
      case 1: return s1;
      case 2: return s2;
      case 3: return s3;
      default: throw std::invalid_argument("spin axis must be 1, 2, or 3");
    }
  }
  // s . n for a real 3-vector n.
  Mat dot(const double n[3]) const { return n[0] * s1 + n[1] * s2 + n[2] * s3; }
};

inline bool is_half_integer(double j) {
  double two_j = 2.0 * j;
  return j >= 0.0 && std::abs(two_j - std::round(two_j)) < 1e-9;
}

inline SpinRep make_spin_ops(double j) {
  if (!is_half_integer(j)) throw std::invalid_argument("spin j must be a nonnegative half-integer");
  if (j > 200.0) throw std::invalid_argument("spin j capped at 200");
  SpinRep rep;
  rep.j = j;
  rep.dim = int(std::lround(2.0 * j)) + 1;
  const int d = rep.dim;
  Mat sp = Mat::Zero(d, d);  // raising operator s+ = s1 + i s2 (unnormalized ladder)
  // Basis ordering |j, m> with m = j, j-1, ..., -j.
  for (int k = 1; k < d; ++k) {
    double m = j - k;  // s+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>
    sp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  Mat sm = sp.adjoint();
  rep.s1 = 0.5 * (sp + sm);
  rep.s2 = -0.5 * I_UNIT * (sp - sm);
  rep.s3 = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) rep.s3(k, k) = j - k;
  return rep;
}

// D(phi, theta, psi) = exp(-i phi s3) exp(-i theta s2) exp(-i psi s3).
inline Mat rotation_operator(const SpinRep& rep, double phi, double theta, double psi) {
  if (!std::isfinite(phi) || !std::isfinite(theta) || !std::isfinite(psi))
    throw std::invalid_argument("rotation angles must be finite");
  auto expmi = [](const Mat& H, double t) {
    return hermitian_function(H, [t](double w) { return std::exp(-I_UNIT * (t * w)); });
  };
  Mat D = Mat::Zero(rep.dim, rep.dim);
  // exp(-i a s3) is diagonal; fuse the outer factors cheaply.
  Vec e1(rep.dim), e3(rep.dim);
  for (int k = 0; k < rep.dim; ++k) {
    double m = rep.j - k;
    e1(k) = std::exp(-I_UNIT * (phi * m));
    e3(k) = std::exp(-I_UNIT * (psi * m));
  }
  D = e1.asDiagonal() * expmi(rep.s2, theta) * e3.asDiagonal();
  return D;
}

struct CoherentState {
  double j = 0.0;
  double direction[3] = {0, 0, 1};
  Vec amplitudes;  // <j,m|x>, m = j..-j
};

// Wigner closed form: <j,m|x> = binom(2j, j+m)^{1/2} e^{-i m phi}
// cos^{j+m}(theta/2) sin^{j-m}(theta/2), with (theta, phi) the polar angles
// of the unit direction x.
inline CoherentState coherent_state(const SpinRep& rep, const double x[3]) {
  double nrm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (std::abs(nrm - 1.0) > 1e-9) throw std::invalid_argument("coherent-state direction must be unit");
  CoherentState st;
  st.j = rep.j;
  for (int k = 0; k < 3; ++k) st.direction[k] = x[k];
  double theta = std::acos(std::clamp(x[2], -1.0, 1.0));
  double phi = std::atan2(x[1], x[0]);
  const int d = rep.dim;
  st.amplitudes.resize(d);
  double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  for (int k = 0; k < d; ++k) {
    double m = rep.j - k;
    double lb = 0.5 * (std::lgamma(2.0 * rep.j + 1.0) - std::lgamma(rep.j + m + 1.0) -
                       std::lgamma(rep.j - m + 1.0));
    double mag = std::exp(lb) * std::pow(c, rep.j + m) * std::pow(s, rep.j - m);
    st.amplitudes(k) = mag * std::exp(-I_UNIT * (m * phi));
  }
  return st;
}

// Gauss-Legendre nodes/weights on [-1, 1] (Newton on Legendre recurrence).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p1 = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      double p2 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k + 1.0) * t * p2 - k * p3) / (k + 1.0);
      }
      dp = n * (t * p1 - p2) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Product quadrature over the unit sphere: Gauss-Legendre in cos(theta) of
// order n_theta, trapezoid (uniform, exact for trig polynomials) in phi.
// Calls f(x_hat, weight) with weights summing to 4*pi.
template <typename F>
inline void sphere_quadrature(int n_theta, int n_phi, F&& f) {
  std::vector<double> z, w;
  gauss_legendre(n_theta, z, w);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
    for (int k = 0; k < n_phi; ++k) {
      double phi = k * dphi;
      double x[3] = {s * std::cos(phi), s * std::sin(phi), z[i]};
      f(x, w[i] * dphi);
    }
  }
}

}  // namespace qmor
