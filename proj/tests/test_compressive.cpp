#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qmor/compressive.hpp"
#include "qmor/rng.hpp"

using namespace qmor;

TEST_CASE("tetrahedral alphabet: unit columns with pairwise overlap 9^{-j}") {
  for (double j : {0.5, 1.0, 2.5}) {
    Mat a = tetrahedral_alphabet(j);
    CHECK(a.rows() == long(std::lround(2 * j + 1)));
    for (int u = 0; u < 4; ++u) {
      CHECK(a.col(u).norm() == doctest::Approx(1.0).epsilon(1e-12));
      for (int v = 0; v < 4; ++v) {
        if (u == v) continue;
        CHECK(std::norm(a.col(u).dot(a.col(v))) ==
              doctest::Approx(std::pow(9.0, -j)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("wedge-Hamming duality: frozen values and the closed form") {
  // j = 1/2: h = 1 -> 1 - 3^{-1} = 2/3; h = 4 -> 1 - 9^{-2} = 80/81
  auto r1 = wedge_and_hamming({0, 1, 2}, {0, 3, 2}, 0.5);
  CHECK(r1.hamming == 1);
  CHECK(r1.wedge_sq == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  auto r4 = wedge_and_hamming({0, 1, 2, 3}, {1, 2, 3, 0}, 0.5);
  CHECK(r4.hamming == 4);
  CHECK(r4.wedge_sq == doctest::Approx(80.0 / 81.0).epsilon(1e-12));
  auto rj1 = wedge_and_hamming({0, 0}, {1, 1}, 1.0);
  CHECK(rj1.hamming == 2);
  CHECK(rj1.wedge_sq == doctest::Approx(1.0 - std::pow(9.0, -2.0)).epsilon(1e-12));
  CHECK(wedge_and_hamming({2, 2}, {2, 2}, 1.5).wedge_sq == doctest::Approx(0.0));

  // the defect of the closed form is zero for random pairs at several j
  rng::Stream rs(5, 0xc0);
  for (int trial = 0; trial < 2000; ++trial) {
    double j = 0.5 * (1 + int(rs.below(3)));
    int len = 1 + int(rs.below(6));
    std::vector<int> a(len), b(len);
    for (int i = 0; i < len; ++i) {
      a[i] = int(rs.below(4));
      b[i] = int(rs.below(4));
    }
    CHECK(wedge_and_hamming(a, b, j).relation_defect < 1e-12);
  }
  CHECK_THROWS_AS(wedge_and_hamming({0, 1}, {0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(wedge_and_hamming({0, 4}, {0, 1}, 0.5), std::invalid_argument);
}

TEST_CASE("parity petal code: shape and minimum distance 2") {
  SamplingDictionary d = build_dictionary(3, PetalCode::parity, 0.5);
  CHECK(d.payload_chars == 2);
  CHECK(d.p == 16);
  CHECK(d.n == 8);
  int min_dist = d.n_chars + 1;
  for (long a = 0; a < d.p; ++a) {
    auto wa = d.word(a);
    for (long b = a + 1; b < d.p; ++b) {
      auto wb = d.word(b);
      int h = 0;
      for (int i = 0; i < d.n_chars; ++i) h += (wa[i] != wb[i]);
      min_dist = std::min(min_dist, h);
    }
  }
  CHECK(min_dist == 2);
}

TEST_CASE("secded petal code: shape and minimum distance 4") {
  // length 4 extended Hamming carries one payload character
  SamplingDictionary tiny = build_dictionary(4, PetalCode::secded, 0.5);
  CHECK(tiny.payload_chars == 1);
  CHECK(tiny.p == 4);
  // the two bit-plane code words are {0000, 1111}
  CHECK(tiny.word(0) == std::vector<int>({0, 0, 0, 0}));
  CHECK(tiny.word(3) == std::vector<int>({3, 3, 3, 3}));

  SamplingDictionary d = build_dictionary(8, PetalCode::secded, 0.5);
  CHECK(d.payload_chars == 4);
  CHECK(d.p == 256);
  CHECK(d.n == 256);
  int min_dist = d.n_chars + 1;
  for (long a = 0; a < d.p; ++a) {
    auto wa = d.word(a);
    for (long b = a + 1; b < d.p; ++b) {
      auto wb = d.word(b);
      int h = 0;
      for (int i = 0; i < d.n_chars; ++i) h += (wa[i] != wb[i]);
      min_dist = std::min(min_dist, h);
    }
  }
  CHECK(min_dist == 4);

  // a 16-character block carries 11 payload characters
  SamplingDictionary big = build_dictionary(16, PetalCode::secded, 0.5);
  CHECK(big.payload_chars == 11);
  CHECK(big.p == 4194304);
  CHECK_THROWS_AS(big.materialize(), std::invalid_argument);
  CHECK_THROWS_AS(build_dictionary(6, PetalCode::secded), std::invalid_argument);
}

TEST_CASE("implicit columns agree with materialization and per-character overlaps") {
  for (PetalCode code : {PetalCode::none, PetalCode::parity}) {
    SamplingDictionary d = build_dictionary(3, code, 0.5);
    Mat m = d.materialize();
    for (long k = 0; k < d.p; ++k) CHECK((m.col(k) - d.column(k)).norm() < 1e-12);
    // column overlaps factor over characters, so |<i|k>|^2 = 9^{-j h}
    for (long a = 0; a < d.p; ++a)
      for (long b = 0; b < d.p; ++b) {
        auto wh = wedge_and_hamming(d.word(a), d.word(b), d.j);
        CHECK(std::norm(cplx(m.col(a).dot(m.col(b)))) ==
              doctest::Approx(std::pow(9.0, -d.j * wh.hamming)).epsilon(1e-10));
      }
  }
}

TEST_CASE("restricted isometry: parity dictionary at n = 8, p = 16") {
  SamplingDictionary d = build_dictionary(3, PetalCode::parity, 0.5);
  RipReport r1 = rip_report(d, 1);
  CHECK(r1.subsets_tested == 16);
  CHECK(r1.delta_max < 1e-12);  // unit-norm columns
  for (int s : {2, 3}) {
    RipReport r = rip_report(d, s);
    CHECK(r.fraction_pass == doctest::Approx(1.0));
    CHECK(r.delta_max < 1.0);
    CHECK(r.lambda_min > 0.0);
  }
  // the structured dictionary has strictly better worst-case pair coherence
  // than a random Gaussian one of the same shape
  SamplingDictionary g = gaussian_dictionary(8, 16, 77);
  RipReport rp = rip_report(d, 2);
  RipReport rg = rip_report(g, 2);
  CHECK(rp.delta_max < rg.delta_max);
  // sampled mode agrees with exhaustive extremes within its sample
  RipReport rs = rip_report(d, 2, 200, 9);
  CHECK(rs.subsets_tested == 200);
  CHECK(rs.delta_max <= rp.delta_max + 1e-12);
  CHECK_THROWS_AS(rip_report(d, 0), std::invalid_argument);
  CHECK_THROWS_AS(rip_report(gaussian_dictionary(4, 40, 1), 12), std::invalid_argument);
}

TEST_CASE("gaussian dictionary: unit columns, optional unit singular values, determinism") {
  SamplingDictionary a = gaussian_dictionary(6, 12, 42);
  SamplingDictionary b = gaussian_dictionary(6, 12, 42);
  CHECK((a.x - b.x).norm() == 0.0);
  for (long c = 0; c < a.p; ++c) CHECK(a.x.col(c).norm() == doctest::Approx(1.0).epsilon(1e-12));
  // conditioning the spectrum tightens the worst sampled isometry constant
  SamplingDictionary o = gaussian_dictionary(6, 12, 42, true);
  for (long c = 0; c < o.p; ++c) CHECK(o.x.col(c).norm() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::JacobiSVD<Mat> sa(a.x), so(o.x);
  double conda = sa.singularValues()(0) / sa.singularValues()(5);
  double condo = so.singularValues()(0) / so.singularValues()(5);
  CHECK(condo < conda);
  CHECK_THROWS_AS(gaussian_dictionary(0, 4, 1), std::invalid_argument);
}

TEST_CASE("sampling bound grows with rank and dimension") {
  CHECK(sampling_bound(1, 64) == doctest::Approx(7.0 * std::log(64.0 / 7.0)).epsilon(1e-12));
  CHECK(sampling_bound(2, 64) > sampling_bound(1, 64));
  CHECK(sampling_bound(1, 2048) > sampling_bound(1, 64));
}

TEST_CASE("sparse projection through the identity reduces to plain projection") {
  std::uint64_t seed = 31;
  GKState truth_state = random_gk_state(3, 1, 2, seed);
  Vec psi0 = evaluate(truth_state);
  psi0 /= psi0.norm();
  Mat eye = Mat::Identity(8, 8);
  GKState init = random_gk_state(3, 1, 2, seed + 100);
  auto res = sparse_project(psi0, eye, init, 0.5, 600, 1e-9, &psi0);
  CHECK(res.fidelity > 1.0 - 1e-8);
  CHECK(res.distance < 1e-6);
}

TEST_CASE("sparse projection recovers a product state from 6 of 8 dimensions") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GKState truth_state = random_gk_state(3, 1, 2, rng::key(seed, 0xaa));
    Vec psi0 = evaluate(truth_state);
    psi0 /= psi0.norm();
    SamplingDictionary d = gaussian_dictionary(6, 8, seed + 500);
    Vec phi0 = d.x * psi0;
    GKState init = random_gk_state(3, 1, 2, rng::key(seed, 0xbb));
    auto res = sparse_project(phi0, d.x, init, 0.5, 800, 1e-9, &psi0);
    if (res.fidelity > 0.99) ++hits;
  }
  CHECK(hits >= 8);
  CHECK_THROWS_AS(sparse_project(Vec::Zero(5), Mat::Identity(5, 7), random_gk_state(3, 1, 2, 1)),
                  std::invalid_argument);
}

TEST_CASE("breakdown sweep: median fidelity rises with sample count") {
  GKState truth_state = random_gk_state(4, 1, 2, 9);
  Vec psi0 = evaluate(truth_state);
  psi0 /= psi0.norm();
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  auto res = breakdown_sweep(psi0, 1, 4, {3, 8, 16}, seeds, 500, 1e-8);
  CHECK(res.rows.size() == 15);
  CHECK(res.median_fidelity.size() == 3);
  CHECK(res.bound == doctest::Approx(sampling_bound(1, 16)));
  CHECK(res.median_fidelity[2].second > 0.99);          // n = dim: full information
  CHECK(res.median_fidelity[2].second >
        res.median_fidelity[0].second - 1e-12);         // monotone up to ties
  CHECK(res.median_fidelity[0].second < 0.9);           // n = 3 < bound: breakdown
}

TEST_CASE("sparse selection: one-sparse recovery and shrinkage certificate") {
  SamplingDictionary d = gaussian_dictionary(12, 16, 321);
  Vec y = d.x.col(3) * cplx(2.0, 1.0);
  auto sel = sparse_select(y, d.x, 1e-3);
  CHECK(sel.converged);
  CHECK(sel.certificate_ok);
  long argmax = 0;
  sel.w.cwiseAbs().maxCoeff(&argmax);
  CHECK(argmax == 3);
  CHECK(std::abs(sel.w(3) - cplx(2.0, 1.0)) < 0.05);
  for (long i = 0; i < 16; ++i)
    if (i != 3) CHECK(std::abs(sel.w(i)) < 0.05);
}

TEST_CASE("sparse selection: 3-column support recovery and lambda monotonicity") {
  SamplingDictionary d = gaussian_dictionary(14, 20, 654);
  Vec w_true = Vec::Zero(20);
  w_true(2) = cplx(1.5, 0.0);
  w_true(7) = cplx(-1.0, 0.7);
  w_true(11) = cplx(0.0, 1.2);
  Vec y = d.x * w_true;
  auto sel = sparse_select(y, d.x, 5e-3, SelectForm::dantzig);
  CHECK(sel.converged);
  CHECK(sel.certificate_ok);
  std::set<long> support;
  for (long i = 0; i < 20; ++i)
    if (std::abs(sel.w(i)) > 0.1) support.insert(i);
  CHECK(support == std::set<long>({2, 7, 11}));
  // at large lambda everything shrinks to zero and the certificate is |X^ y|_inf
  auto all_zero = sparse_select(y, d.x, 1e3);
  CHECK(all_zero.w.norm() == 0.0);
  CHECK(all_zero.certificate ==
        doctest::Approx((d.x.adjoint() * y).cwiseAbs().maxCoeff()).epsilon(1e-12));
  CHECK_THROWS_AS(sparse_select(Vec::Zero(3), Mat::Identity(4, 4), 0.1), std::invalid_argument);
}
