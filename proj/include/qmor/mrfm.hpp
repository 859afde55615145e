#pragma once
// Single-spin magnetic-resonance force microscopy experiment: x/y relaxation
// by a chosen unraveling, z readout by a synoptic pair, one-pole filtering,
// and random-telegraph scoring of the filtered record.
//
// The filtered click signal tracks gain * z with gain = sin(theta_z) and
// carries white click noise of filtered variance dt / (2 tau). Dwell times
// are inferred from a log-linear fit to the signal autocorrelation over lags
// in [tau, 5 tau]; mean-square polarization from the variance after noise
// subtraction, corrected for the filter's attenuation b / (b + c) of a
// telegraph with autocorrelation decay rate c (b = 1/tau).

#include <cmath>
#include <vector>

#include "qmor/trajectory.hpp"

namespace qmor {

struct MrfmConfig {
  double dt = 7.1e-3;                      // seconds per measurement sweep
  double theta_x = 0.093, theta_y = 0.093; // relaxation spinometers
  double theta_z = 0.026;                  // readout spinometer
  double duration = 3600.0;                // seconds; full experiment = 13 h
  double filter_tau = 0.76;                // one-pole filter time constant
  Tuning unraveling = Tuning::batrachian;  // x/y axes; z is always synoptic
  std::uint64_t seed = 0;

  // Implied z-relaxation time 2 dt / (theta_x^2 + theta_y^2).
  double t_z() const { return 2.0 * dt / (theta_x * theta_x + theta_y * theta_y); }
  void validate() const {
    if (dt <= 0 || duration <= 0 || filter_tau <= 0) throw std::invalid_argument("nonpositive time scale");
    if (theta_x <= 0 || theta_y <= 0 || theta_z <= 0) throw std::invalid_argument("nonpositive angle");
  }
};

struct TelegraphStats {
  double variance = 0;        // filtered-signal variance
  double noise_variance = 0;  // filtered white-click noise floor
  double switching_rate = 0;  // fitted autocorrelation decay rate (1/s)
  double dwell_mean = 0;      // 1 / switching_rate
  double ms_inferred = 0;     // mean-square polarization after corrections
  long threshold_crossings = 0;
};

// signal: uniformly sampled record; tau > 0 marks a one-pole-filtered click
// record (noise floor dt / 2 tau, attenuation correction applied); tau <= 0
// treats the signal as unfiltered and reads the telegraph variance off the
// fitted exponential's intercept.
inline TelegraphStats telegraph_stats(const std::vector<double>& signal, double threshold, double dt,
                                      double tau, double gain = 1.0) {
  if (signal.size() < 10000) throw std::invalid_argument("need at least 1e4 samples");
  const long n = long(signal.size());
  double mean = 0;
  for (double v : signal) mean += v;
  mean /= double(n);
  double var = 0;
  for (double v : signal) var += (v - mean) * (v - mean);
  var /= double(n);
  if (var <= 0) throw std::invalid_argument("degenerate constant signal");

  TelegraphStats st;
  st.variance = var;
  st.noise_variance = tau > 0 ? dt / (2.0 * tau) : 0.0;
  for (long i = 1; i < n; ++i)
    if ((signal[i - 1] - threshold) * (signal[i] - threshold) < 0) ++st.threshold_crossings;

  // Autocorrelation over lags in [l1, 5*l1]; fit ln C = ln A - rate * t.
  double t_lo = tau > 0 ? tau : 10.0 * dt;
  long l1 = std::max<long>(1, long(std::lround(t_lo / dt)));
  long l2 = std::min<long>(5 * l1, n / 4);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long pts = 0;
  for (long l = l1; l <= l2; ++l) {
    double c = 0;
    for (long i = 0; i + l < n; ++i) c += (signal[i] - mean) * (signal[i + l] - mean);
    c /= double(n - l);
    if (c <= 0) continue;
    double x = l * dt, y = std::log(c);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++pts;
  }
  if (pts < 3) throw std::runtime_error("autocorrelation fit failed: too few positive lags");
  double denom = pts * sxx - sx * sx;
  double slope = (pts * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / pts;
  st.switching_rate = -slope;
  st.dwell_mean = st.switching_rate > 0 ? 1.0 / st.switching_rate : std::numeric_limits<double>::infinity();
  if (tau > 0) {
    double b = 1.0 / tau, c = std::max(0.0, st.switching_rate);
    st.ms_inferred = (var - st.noise_variance) * (b + c) / (b * gain * gain);
  } else {
    st.ms_inferred = std::exp(intercept) / (gain * gain);
  }
  return st;
}

struct MrfmResult {
  std::vector<int> z_clicks;
  std::vector<double> filtered;  // one-pole filtered z clicks
  std::vector<double> z_series;  // underlying polarization 2<s3> per step
  double gain = 0;               // sin(theta_z): filtered signal ~ gain * z
  double ms_polarization = 0;    // time-averaged z^2 of the quantum state
  TelegraphStats stats;
};

inline MrfmResult run_mrfm(const MrfmConfig& cfg) {
  cfg.validate();
  SpinRep rep = make_spin_ops(0.5);
  SimulationConfig sim;
  sim.dims = {2};
  sim.dt = cfg.dt;
  sim.n_steps = int(std::lround(cfg.duration / cfg.dt));
  sim.seed = cfg.seed;
  sim.filter_tau = cfg.filter_tau;
  sim.pairs = {{0, make_pair(rep, cfg.unraveling, cfg.theta_x, 1)},
               {0, make_pair(rep, cfg.unraveling, cfg.theta_y, 2)},
               {0, make_pair(rep, Tuning::synoptic, cfg.theta_z, 3)}};
  std::vector<Mat> obs = {2.0 * rep.s3};
  TrajectoryRecord rec = run_trajectory(sim, 0, nullptr, &obs);

  MrfmResult out;
  out.z_clicks = rec.clicks[2];
  out.z_series = rec.observables[0];
  out.gain = std::sin(cfg.theta_z);
  std::vector<double> x(out.z_clicks.begin(), out.z_clicks.end());
  out.filtered = low_pass(x, cfg.filter_tau, cfg.dt);
  double ms = 0;
  for (double z : out.z_series) ms += z * z;
  out.ms_polarization = out.z_series.empty() ? 0.0 : ms / double(out.z_series.size());
  out.stats = telegraph_stats(out.filtered, 0.0, cfg.dt, cfg.filter_tau, out.gain);
  return out;
}

// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

inline double ks_p_value(const std::vector<double>& a, const std::vector<double>& b) {
  double d = ks_statistic(a, b);
  double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

// Decorrelating subsample for distribution comparisons (default ~3 filter
// time constants between kept samples), with an initial transient dropped.
inline std::vector<double> subsample_for_ks(const std::vector<double>& signal, double dt, double tau,
                                            double spacing_factor = 3.0) {
  long stride = std::max<long>(1, long(std::lround(spacing_factor * tau / dt)));
  long skip = std::min<long>(long(signal.size()) / 10, 5 * stride);
  std::vector<double> out;
  for (long i = skip; i < long(signal.size()); i += stride) out.push_back(signal[i]);
  return out;
}

}  // namespace qmor
