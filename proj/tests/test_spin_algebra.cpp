#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmor/rng.hpp"
#include "qmor/spin_algebra.hpp"

using namespace qmor;

namespace {
double comm_defect(const Mat& a, const Mat& b, const Mat& c) {
  return (a * b - b * a - I_UNIT * c).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("spin operator commutation relations and structure") {
  for (double j : {0.5, 1.0, 1.5, 2.0, 3.5, 7.0}) {
    SpinRep rep = make_spin_ops(j);
    CHECK(rep.dim == int(2 * j + 1));
    CHECK(comm_defect(rep.s1, rep.s2, rep.s3) < 1e-12);
    CHECK(comm_defect(rep.s2, rep.s3, rep.s1) < 1e-12);
    CHECK(comm_defect(rep.s3, rep.s1, rep.s2) < 1e-12);
    // Casimir: trace(s1^2+s2^2+s3^2)/dim = j(j+1)
    double cas = ((rep.s1 * rep.s1 + rep.s2 * rep.s2 + rep.s3 * rep.s3).trace().real()) / rep.dim;
    CHECK(cas == doctest::Approx(j * (j + 1)).epsilon(1e-12));
    // s3 real diagonal ladder; s1 real; s2 imaginary
    CHECK(rep.s3.imag().cwiseAbs().maxCoeff() < 1e-15);
    CHECK(rep.s1.imag().cwiseAbs().maxCoeff() < 1e-15);
    CHECK(rep.s2.real().cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("spin-1/2 and spin-1 explicit matrices") {
  SpinRep h = make_spin_ops(0.5);
  CHECK(h.s3(0, 0).real() == doctest::Approx(0.5));
  CHECK(h.s3(1, 1).real() == doctest::Approx(-0.5));
  CHECK(h.s1(0, 1).real() == doctest::Approx(0.5));
  CHECK(h.s1(1, 0).real() == doctest::Approx(0.5));
  CHECK(h.s2(0, 1).imag() == doctest::Approx(-0.5));
  CHECK(h.s2(1, 0).imag() == doctest::Approx(0.5));

  SpinRep one = make_spin_ops(1.0);
  CHECK(one.s3(0, 0).real() == doctest::Approx(1.0));
  CHECK(one.s3(1, 1).real() == doctest::Approx(0.0));
  CHECK(one.s3(2, 2).real() == doctest::Approx(-1.0));

  // trace(s3^2) for j=2 is sum of m^2 = 4+1+0+1+4 = 10
  SpinRep two = make_spin_ops(2.0);
  CHECK((two.s3 * two.s3).trace().real() == doctest::Approx(10.0).epsilon(1e-13));

  CHECK_THROWS(make_spin_ops(0.3));
  CHECK_THROWS(make_spin_ops(-0.5));
}

TEST_CASE("rotation operator unitarity and special values") {
  SpinRep rep = make_spin_ops(1.5);
  Mat id = rotation_operator(rep, 0, 0, 0);
  CHECK((id - Mat::Identity(rep.dim, rep.dim)).cwiseAbs().maxCoeff() < 1e-13);

  rng::Stream rs(42);
  for (int t = 0; t < 5; ++t) {
    Mat D = rotation_operator(rep, 6 * rs.uniform() - 3, 6 * rs.uniform() - 3, 6 * rs.uniform() - 3);
    CHECK((D.adjoint() * D - Mat::Identity(rep.dim, rep.dim)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // j=1/2 spin flip: D(0, pi, 0)|up> = |down> up to phase
  SpinRep h = make_spin_ops(0.5);
  Mat D = rotation_operator(h, 0, std::numbers::pi, 0);
  Vec up(2);
  up << 1, 0;
  Vec out = D * up;
  CHECK(std::abs(out(0)) < 1e-12);
  CHECK(std::abs(std::abs(out(1)) - 1.0) < 1e-12);
}

TEST_CASE("coherent states: polarization, overlap law, Wigner vs rotation") {
  rng::Stream rs(7);
  for (double j : {0.5, 1.0, 2.5}) {
    SpinRep rep = make_spin_ops(j);
    double zhat[3] = {0, 0, 1};
    CoherentState pole = coherent_state(rep, zhat);
    CHECK(std::abs(pole.amplitudes(0) - 1.0) < 1e-12);
    CHECK(pole.amplitudes.tail(rep.dim - 1).cwiseAbs().maxCoeff() < 1e-12);

    for (int t = 0; t < 4; ++t) {
      double x[3];
      rs.unit_vector3(x);
      CoherentState st = coherent_state(rep, x);
      CHECK(std::abs(st.amplitudes.norm() - 1.0) < 1e-10);
      // <x|s|x> = j x componentwise
      for (int k = 1; k <= 3; ++k) {
        cplx ev = (st.amplitudes.adjoint() * rep.axis(k) * st.amplitudes)(0);
        CHECK(std::abs(ev - cplx(j * x[k - 1], 0)) < 1e-10);
      }
      // Wigner formula equals rotation of |j,j>: D(phi, theta, 0)|j,j>
      double theta = std::acos(std::clamp(x[2], -1.0, 1.0));
      double phi = std::atan2(x[1], x[0]);
      Vec top = Vec::Zero(rep.dim);
      top(0) = 1.0;
      Vec rot = rotation_operator(rep, phi, theta, 0) * top;
      CHECK((rot - st.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
    }

    // |<a|b>|^2 = cos^{4j}(theta_ab / 2)
    double a[3], b[3];
    rs.unit_vector3(a);
    rs.unit_vector3(b);
    CoherentState ca = coherent_state(rep, a), cb = coherent_state(rep, b);
    double cosang = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    double expect = std::pow(0.5 * (1.0 + cosang), 2 * j);  // cos^2(t/2) = (1+cos t)/2
    cplx ov = (ca.amplitudes.adjoint() * cb.amplitudes)(0);
    CHECK(std::norm(ov) == doctest::Approx(expect).epsilon(1e-10));
  }

  // tetrahedral pair at j=1/2: |<a|b>|^2 = 1/3
  SpinRep h = make_spin_ops(0.5);
  double r3 = 1.0 / std::sqrt(3.0);
  double va[3] = {r3, r3, r3}, vb[3] = {r3, -r3, -r3};
  cplx ov = (coherent_state(h, va).amplitudes.adjoint() * coherent_state(h, vb).amplitudes)(0);
  CHECK(std::norm(ov) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  double bad[3] = {0, 0, 2};
  CHECK_THROWS(coherent_state(h, bad));
}

TEST_CASE("resolution of identity by spherical quadrature") {
  for (double j : {0.5, 1.5, 3.0}) {
    SpinRep rep = make_spin_ops(j);
    int nt = std::max(8, 2 * (rep.dim + 1));
    int np = std::max(16, 2 * (2 * rep.dim + 1));
    Mat acc = Mat::Zero(rep.dim, rep.dim);
    sphere_quadrature(nt, np, [&](const double x[3], double w) {
      CoherentState st = coherent_state(rep, x);
      acc += w * (st.amplitudes * st.amplitudes.adjoint());
    });
    acc *= (2.0 * j + 1.0) / (4.0 * std::numbers::pi);
    CHECK((acc - Mat::Identity(rep.dim, rep.dim)).cwiseAbs().maxCoeff() < 1e-6);
  }
}
