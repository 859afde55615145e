#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmor/trajectory.hpp"

using namespace qmor;

namespace {
SimulationConfig single_spin_config(const SpinRep& rep, Tuning tu, double theta, int n_steps,
                                    std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.dims = {rep.dim};
  cfg.pairs = {{0, make_pair(rep, tu, theta, 3)}};
  cfg.dt = 0.1;
  cfg.n_steps = n_steps;
  cfg.seed = seed;
  cfg.filter_tau = 1.0;
  return cfg;
}
}  // namespace

TEST_CASE("branch probabilities on eigenstates match closed forms") {
  SpinRep rep = make_spin_ops(1.0);
  double theta = 0.21;
  // basis ordering m = j..-j; pick m = +1 (index 0)
  Vec em = Vec::Unit(3, 0);

  auto p_plus_of = [&](Tuning tu) {
    MeasurementPair p = make_pair(rep, tu, theta, 3);
    Vec plus = apply_local(p.m_plus, em, {3}, 0);
    return plus.squaredNorm();
  };
  CHECK(p_plus_of(Tuning::batrachian) == doctest::Approx(std::sin(theta) * std::sin(theta)).epsilon(1e-12));
  CHECK(p_plus_of(Tuning::synoptic) == doctest::Approx(0.5 * (1 + std::sin(2 * theta))).epsilon(1e-12));

  // ergodic: p+ = 1/2 for arbitrary states
  rng::Stream rs(1, 2);
  Vec psi(3);
  for (int i = 0; i < 3; ++i) psi(i) = cplx(rs.normal(), rs.normal());
  psi /= psi.norm();
  MeasurementPair erg = make_pair(rep, Tuning::ergodic, theta, 3);
  CHECK(apply_local(erg.m_plus, psi, {3}, 0).squaredNorm() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("step respects the drawn uniform and renormalizes") {
  SpinRep rep = make_spin_ops(1.0);
  double theta = 0.21;
  SimulationConfig cfg = single_spin_config(rep, Tuning::batrachian, theta, 1, 0);
  double p_plus = std::sin(theta) * std::sin(theta);
  for (double u : {p_plus - 1e-6, p_plus + 1e-6}) {
    Vec psi = Vec::Unit(3, 0);
    auto clicks = step(psi, cfg.pairs, cfg.dims, [&](int) { return u; });
    CHECK(clicks[0] == (u < p_plus ? +1 : -1));
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("same seed gives bit-identical records") {
  SpinRep rep = make_spin_ops(0.5);
  SimulationConfig cfg = single_spin_config(rep, Tuning::synoptic, 0.1, 200, 42);
  TrajectoryRecord a = run_trajectory(cfg), b = run_trajectory(cfg);
  CHECK(a.clicks == b.clicks);
  CHECK((a.final_state - b.final_state).norm() == 0.0);
  TrajectoryRecord c = run_trajectory(cfg, /*traj_index=*/1);
  CHECK(a.clicks != c.clicks);
}

TEST_CASE("ergodic clicks have zero mean within 3 sigma") {
  SpinRep rep = make_spin_ops(0.5);
  SimulationConfig cfg = single_spin_config(rep, Tuning::ergodic, 0.1, 10000, 7);
  TrajectoryRecord rec = run_trajectory(cfg);
  double mean = 0;
  for (int c : rec.clicks[0]) mean += c;
  mean /= rec.clicks[0].size();
  CHECK(std::abs(mean) < 3.0 / std::sqrt(10000.0));
}

TEST_CASE("synoptic clicks on a frozen eigenstate read the spinometer gain") {
  // z-synoptic on |up>, spin-1/2: E[d] = sin(2 theta m) with m = 1/2, i.e.
  // sin(theta) ~= g_s * x with g_s = 2 theta j and x = 1.
  SpinRep rep = make_spin_ops(0.5);
  double theta = 0.12;
  SimulationConfig cfg = single_spin_config(rep, Tuning::synoptic, theta, 20000, 11);
  TrajectoryRecord rec = run_trajectory(cfg);
  double mean = 0;
  for (int c : rec.clicks[0]) mean += c;
  mean /= rec.clicks[0].size();
  CHECK(mean == doctest::Approx(std::sin(theta)).epsilon(0.1));
}

TEST_CASE("low-pass filter: fixed point, step response, click variance") {
  std::vector<double> c(100, 3.25);
  auto yc = low_pass(c, 0.5, 0.01);
  CHECK(yc.back() == doctest::Approx(3.25));

  // step response reaches 1 - 1/e at t = tau within 2%
  int n_tau = 1000;
  std::vector<double> stepin(5 * n_tau, 1.0);
  auto ys = low_pass(stepin, 1.0, 1.0 / n_tau);
  // y0 = x0 = 1 would hide the transient; feed a leading zero instead
  stepin.insert(stepin.begin(), 0.0);
  ys = low_pass(stepin, 1.0, 1.0 / n_tau);
  CHECK(ys[n_tau] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.02));

  // white +-1 clicks: output variance ~ dt/(2 tau)
  rng::Stream rs(5, 8);
  double dt = 0.1, tau = 2.0;
  std::vector<double> w(200000);
  for (auto& v : w) v = rs.uniform() < 0.5 ? -1.0 : 1.0;
  auto yw = low_pass(w, tau, dt);
  double m = 0, m2 = 0;
  int skip = int(10 * tau / dt);
  int cnt = 0;
  for (size_t i = skip; i < yw.size(); ++i, ++cnt) {
    m += yw[i];
    m2 += yw[i] * yw[i];
  }
  m /= cnt;
  m2 = m2 / cnt - m * m;
  CHECK(m2 == doctest::Approx(dt / (2 * tau)).epsilon(0.1));
}

TEST_CASE("pure Hamiltonian evolution matches the exact rotation") {
  SpinRep rep = make_spin_ops(0.5);
  double omega = 0.7;
  SimulationConfig cfg;
  cfg.dims = {2};
  cfg.hamiltonian = omega * rep.s2;
  cfg.dt = 0.05;
  cfg.n_steps = 100;
  cfg.seed = 0;
  std::vector<Mat> obs = {rep.s3};
  TrajectoryRecord rec = run_trajectory(cfg, 0, nullptr, &obs);
  double t_final = cfg.dt * cfg.n_steps;
  CHECK(rec.observables[0].back() == doctest::Approx(0.5 * std::cos(omega * t_final)).epsilon(1e-9));
}

TEST_CASE("ensemble density matrix agrees with the superoperator oracle") {
  SpinRep rep = make_spin_ops(0.5);
  SimulationConfig cfg = single_spin_config(rep, Tuning::synoptic, 0.2, 60, 21);
  int n_traj = 600;
  EnsembleResult ens = run_ensemble(cfg, n_traj, {}, /*rho_sample_stride=*/60);
  REQUIRE(ens.rho.size() == 1);

  Mat rho = Vec::Unit(2, 0) * Vec::Unit(2, 0).adjoint();
  std::vector<MeasurementPair> ps = {cfg.pairs[0].second};
  for (int n = 0; n < 60; ++n) rho = superoperator_apply(ps, rho);
  // MC error ~ 1/sqrt(n_traj)
  CHECK((ens.rho[0] - rho).cwiseAbs().maxCoeff() < 4.0 / std::sqrt(double(n_traj)));
}

TEST_CASE("einselection: uniaxial synoptic obeys the power-law bound") {
  SpinRep rep = make_spin_ops(1.0);
  double theta = 0.15;
  SimulationConfig cfg = single_spin_config(rep, Tuning::synoptic, theta, 400, 31);
  // start in an x-coherent state so the z-variance is nonzero
  double x[3] = {1, 0, 0};
  Vec init = coherent_state(rep, x).amplitudes;
  auto series = einselection_tracker(EinselectionKind::uniaxial_variance, cfg, 300, rep, &init);
  double d0 = 0.5;  // <s_z^2> - <s_z>^2 = j/2 for an equatorial coherent state
  // integrating dE/dn <= -4 theta^2 E^2 gives E <= D0/(1 + 4 n theta^2 D0)
  int n_bad = 0;
  for (size_t n = 0; n < series.size(); ++n) {
    double bound = d0 / (1.0 + 4.0 * (n + 1) * theta * theta * d0);
    if (series[n] > bound * 1.15 + 0.02) ++n_bad;
  }
  CHECK(n_bad == 0);
  CHECK(series.back() < 0.05);  // einselection of eigenstates
}

TEST_CASE("einselection: coherent states give tr Lambda = j") {
  SpinRep rep = make_spin_ops(1.5);
  SimulationConfig cfg = single_spin_config(rep, Tuning::synoptic, 0.0, 1, 1);
  double x[3] = {0.6, 0.0, 0.8};
  Vec init = coherent_state(rep, x).amplitudes;
  auto series = einselection_tracker(EinselectionKind::triaxial_covariance, cfg, 1, rep, &init);
  CHECK(series[0] == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("config validation rejects broken setups") {
  SpinRep rep = make_spin_ops(0.5);
  SimulationConfig cfg = single_spin_config(rep, Tuning::synoptic, 0.1, 10, 1);
  cfg.dt = -1;
  CHECK_THROWS_AS(run_trajectory(cfg), std::invalid_argument);
  cfg.dt = 0.1;
  cfg.pairs[0].first = 5;
  CHECK_THROWS_AS(run_trajectory(cfg), std::invalid_argument);
  cfg.pairs[0].first = 0;
  cfg.hamiltonian = Mat::Zero(3, 3);
  CHECK_THROWS_AS(run_trajectory(cfg), std::invalid_argument);
}
