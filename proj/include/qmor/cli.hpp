#pragma once
// Config-driven experiment runner. Every module is exposed as a subcommand
// that reads a flat JSON config (file and/or --key value overrides), runs,
// and writes CSV/JSON artifacts plus a run manifest sufficient to reproduce
// the run byte-for-byte. Exit codes: 0 success, 2 config error, 3 numerical
// non-convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qmor/calibration.hpp"
#include "qmor/compressive.hpp"
#include "qmor/geometry.hpp"
#include "qmor/mor.hpp"
#include "qmor/mrfm.hpp"
#include "qmor/spin_dust.hpp"
#include "qmor/thermal.hpp"
#include "qmor/trajectory.hpp"

namespace qmor::cli {

using nlohmann::json;

constexpr const char* kVersion = "qmor 1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Tuning parse_tuning(const std::string& s) {
  if (s == "raw") return Tuning::raw;
  if (s == "ergodic") return Tuning::ergodic;
  if (s == "batrachian") return Tuning::batrachian;
  if (s == "synoptic") return Tuning::synoptic;
  if (s == "closed_loop" || s == "closed-loop") return Tuning::closed_loop;
  throw ConfigError("unknown tuning: " + s);
}

// List parameters are accepted as JSON arrays or comma-separated strings.
template <typename T>
inline std::vector<T> parse_list(const json& v, const std::string& key) {
  std::vector<T> out;
  try {
    if (v.is_array()) {
      for (const auto& e : v) out.push_back(e.get<T>());
      return out;
    }
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    size_t pos = 0;
    while (pos < s.size()) {
      size_t comma = s.find(',', pos);
      if (comma == std::string::npos) comma = s.size();
      std::string tok = s.substr(pos, comma - pos);
      if (!tok.empty()) out.push_back(json::parse(tok).get<T>());
      pos = comma + 1;
    }
  } catch (const std::exception& e) {
    throw ConfigError("bad list for key '" + key + "': " + e.what());
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

inline json subcommand_defaults(const std::string& sub) {
  if (sub == "curvature")
    return {{"kind", "random"}, {"order", 3},   {"rank", 2}, {"d", 2},
            {"n", 2},           {"norb", 4},    {"seed", 1}, {"fubini_study", false}};
  if (sub == "project")
    return {{"order", 3}, {"rank", 2},        {"d", 2},     {"seed", 1},
            {"offset", 0.0}, {"max_iter", 2000}, {"tol", 1e-9}};
  if (sub == "simulate")
    return {{"dims", "2"},      {"tuning", "ergodic"}, {"theta", 0.1},  {"alpha", 0.0},
            {"axes", "3"},      {"dt", 0.1},           {"n_steps", 1000}, {"filter_tau", 1.0},
            {"seed", 1}};
  if (sub == "mrfm")
    return {{"dt", 7.1e-3},    {"theta_x", 0.093}, {"theta_y", 0.093},
            {"theta_z", 0.026}, {"duration", 3600.0}, {"filter_tau", 0.76},
            {"unraveling", "batrachian"}, {"seed", 1}};
  if (sub == "dust")
    return {{"n_spin", 8},    {"ranks", "1,2,4"}, {"tuning", "synoptic"}, {"seed", 1},
            {"t_burn", 100.0}, {"n_samples", 30},  {"spacing", 1.0},
            {"proj_iters", 200}, {"proj_tol", 1e-6}};
  if (sub == "thermal")
    return {{"j", 0.5}, {"beta", 1.0}, {"n_theta", 64}, {"n_phi", 40}, {"tol", 1e-6}};
  if (sub == "cs-sweep")
    return {{"order", 3},        {"rank", 1},       {"seed", 1}, {"n_values", "4,8,16"},
            {"n_seeds", 5},      {"proj_iters", 400}, {"proj_tol", 1e-7}};
  if (sub == "rip")
    return {{"dict", "tetra"}, {"chars", 3}, {"code", "parity"}, {"j", 0.5},
            {"n", 8},          {"p", 16},    {"sparsity", 3},    {"samples", 0},
            {"seed", 1}};
  if (sub == "calibrate")
    return {{"gx", 1.0},     {"gy", 1.0},   {"gz", 1.0}, {"beta", 0.0},
            {"eps_max", 0.1}, {"reciprocal_branch", false}};
  throw ConfigError("unknown subcommand: " + sub);
}

struct ParsedArgs {
  std::string subcommand;
  json params;
  std::filesystem::path out = ".";
  int workers = 1;
};

// Merge a source document into params, rejecting unknown keys and
// coercing string overrides to the schema type.
inline void merge_params(json& params, const json& src, bool coerce_strings) {
  if (!src.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    if (!params.contains(it.key())) throw ConfigError("unknown config key: " + it.key());
    json& slot = params[it.key()];
    const json& v = it.value();
    if (coerce_strings && v.is_string() && !slot.is_string()) {
      try {
        json parsed = json::parse(v.get<std::string>());
        slot = parsed;
      } catch (const std::exception&) {
        throw ConfigError("cannot parse value for key '" + it.key() + "'");
      }
    } else {
      slot = v;
    }
  }
}

inline ParsedArgs parse_args(const std::vector<std::string>& args) {
  static const std::vector<std::string> subs = {"curvature", "project", "simulate", "mrfm", "dust",
                                                "thermal",   "cs-sweep", "rip",     "calibrate"};
  if (args.empty()) throw ConfigError("usage: qmor SUBCOMMAND [--config PATH] [--key VALUE ...]");
  ParsedArgs out;
  out.subcommand = args[0];
  if (std::find(subs.begin(), subs.end(), out.subcommand) == subs.end())
    throw ConfigError("unknown subcommand: " + out.subcommand);
  out.params = subcommand_defaults(out.subcommand);

  json overrides = json::object();
  std::string config_path;
  for (size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.size() < 3 || a.substr(0, 2) != "--") throw ConfigError("expected --flag, got: " + a);
    if (i + 1 >= args.size()) throw ConfigError("flag needs a value: " + a);
    std::string key = a.substr(2), val = args[++i];
    if (key == "config") {
      config_path = val;
    } else if (key == "out") {
      out.out = val;
    } else if (key == "workers") {
      out.workers = std::stoi(val);
      if (out.workers < 1) throw ConfigError("workers must be >= 1");
    } else if (key == "seed") {
      overrides["seed"] = val;
    } else {
      overrides[key] = val;
    }
  }
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw ConfigError("cannot open config file: " + config_path);
    json doc;
    try {
      doc = json::parse(f);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("malformed config: ") + e.what());
    }
    merge_params(out.params, doc, false);
  }
  merge_params(out.params, overrides, true);
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text,
                       std::vector<std::string>& outputs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  outputs.push_back(path.filename().string());
}

namespace detail {

inline GKState rank1_coherent_chain(int order, int d, std::uint64_t seed) {
  GKState st;
  st.order = order;
  st.rank = 1;
  st.factor_dims.assign(order, d);
  st.coeffs.resize(1);
  SpinRep rep = make_spin_ops(0.5 * (d - 1));
  rng::Stream rs(seed, 0xc11);
  for (int f = 0; f < order; ++f) {
    double x[3];
    rs.unit_vector3(x);
    st.coeffs[0].push_back(coherent_state(rep, x).amplitudes);
  }
  return st;
}

inline GKState random_slater(int n, int n_orb, std::uint64_t seed) {
  if (n_orb < n) throw ConfigError("slater needs norb >= n");
  GKState st;
  st.order = n;
  st.rank = 1;
  st.antisymmetric = true;
  st.factor_dims.assign(n, n_orb);
  st.coeffs.resize(1);
  rng::Stream rs(seed, 0x51a7);
  for (int f = 0; f < n; ++f) {
    Vec v(n_orb);
    for (int i = 0; i < n_orb; ++i) v(i) = cplx(rs.normal(), rs.normal());
    st.coeffs[0].push_back(v / v.norm());
  }
  return st;
}

// Deterministic parallel map: item i of n_items is computed by worker
// i % workers; results land in a preallocated slot, so the output is
// independent of the worker count.
template <typename F>
inline void parallel_for(int n_items, int workers, F&& fn) {
  workers = std::max(1, std::min(workers, n_items));
  if (workers == 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n_items; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

inline int cmd_curvature(const json& p, const std::filesystem::path& out,
                         std::vector<std::string>& outputs) {
  std::string kind = p.at("kind");
  std::uint64_t seed = p.at("seed").get<std::uint64_t>();
  bool fs = p.at("fubini_study").get<bool>();
  GKState st;
  json extra;
  if (kind == "random") {
    st = random_gk_state(p.at("order"), p.at("rank"), p.at("d"), seed);
  } else if (kind == "rank1") {
    st = detail::rank1_coherent_chain(p.at("order"), p.at("d"), seed);
  } else if (kind == "slater") {
    st = detail::random_slater(p.at("n"), p.at("norb"), seed);
  } else {
    throw ConfigError("unknown curvature kind: " + kind);
  }
  CurvatureEngine eng(st, fs);
  CurvatureReport rep = eng.report();
  json doc = {{"kind", kind},
              {"fubini_study", fs},
              {"scalar", rep.scalar},
              {"ricci_eigenvalues", rep.ricci_eigenvalues},
              {"bianchi_defect", rep.bianchi_defect},
              {"null_dim", rep.null_dim},
              {"kappa", eng.kappa()}};
  if (kind == "rank1" && !fs) {
    std::vector<double> js(st.order, 0.5 * (p.at("d").get<int>() - 1));
    doc["analytic_scalar"] = analytic_curvature(AnalyticKind::rank1, js, 0, 0, eng.kappa());
  } else if (kind == "slater") {
    doc["analytic_scalar"] =
        fs ? analytic_curvature(AnalyticKind::slater_fubini_study, {}, p.at("n"), p.at("norb"), 0.0)
           : analytic_curvature(AnalyticKind::slater, {}, p.at("n"), p.at("norb"), eng.kappa());
  }
  write_text(out / "curvature.json", doc.dump(2) + "\n", outputs);
  return 0;
}

inline int cmd_project(const json& p, const std::filesystem::path& out,
                       std::vector<std::string>& outputs) {
  int order = p.at("order"), rank = p.at("rank"), d = p.at("d");
  std::uint64_t seed = p.at("seed").get<std::uint64_t>();
  double offset = p.at("offset");
  Vec psi0 = evaluate(random_gk_state(order, rank, d, rng::key(seed, 1)));
  psi0 /= psi0.norm();
  if (offset != 0.0) {
    rng::Stream rs(seed, 2);
    Vec noise(psi0.size());
    for (long i = 0; i < noise.size(); ++i) noise(i) = cplx(rs.normal(), rs.normal());
    psi0 += offset * (noise / noise.norm());
    psi0 /= psi0.norm();
  }
  GKState init = random_gk_state(order, rank, d, rng::key(seed, 3));
  ProjectionResult res = project(psi0, init, 0.5, p.at("max_iter"), p.at("tol"));
  res.fidelity = fidelity(evaluate(res.gk), psi0);
  json doc = {{"distance", res.distance},
              {"fidelity", res.fidelity},
              {"iterations", res.iterations},
              {"converged", res.converged}};
  write_text(out / "projection.json", doc.dump(2) + "\n", outputs);
  return res.converged ? 0 : 3;
}

inline int cmd_simulate(const json& p, const std::filesystem::path& out,
                        std::vector<std::string>& outputs) {
  SimulationConfig cfg;
  cfg.dims = parse_list<int>(p.at("dims"), "dims");
  cfg.dt = p.at("dt");
  cfg.n_steps = p.at("n_steps");
  cfg.seed = p.at("seed").get<std::uint64_t>();
  cfg.filter_tau = p.at("filter_tau");
  Tuning tuning = parse_tuning(p.at("tuning"));
  double theta = p.at("theta"), alpha = p.at("alpha");
  std::vector<int> axes = parse_list<int>(p.at("axes"), "axes");
  for (int s = 0; s < int(cfg.dims.size()); ++s) {
    SpinRep rep = make_spin_ops(0.5 * (cfg.dims[s] - 1));
    for (int axis : axes) cfg.pairs.push_back({s, make_pair(rep, tuning, theta, axis, alpha)});
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  TrajectoryRecord rec = run_trajectory(cfg);
  std::string csv = "time,pair_id,click,filtered\n";
  for (int n = 0; n < cfg.n_steps; ++n)
    for (size_t k = 0; k < rec.clicks.size(); ++k)
      csv += fmt17((n + 1) * cfg.dt) + "," + std::to_string(k) + "," +
             std::to_string(rec.clicks[k][n]) + "," + fmt17(rec.filtered[k][n]) + "\n";
  write_text(out / "trajectory.csv", csv, outputs);
  return 0;
}

inline int cmd_mrfm(const json& p, const std::filesystem::path& out,
                    std::vector<std::string>& outputs) {
  MrfmConfig cfg;
  cfg.dt = p.at("dt");
  cfg.theta_x = p.at("theta_x");
  cfg.theta_y = p.at("theta_y");
  cfg.theta_z = p.at("theta_z");
  cfg.duration = p.at("duration");
  cfg.filter_tau = p.at("filter_tau");
  cfg.unraveling = parse_tuning(p.at("unraveling"));
  cfg.seed = p.at("seed").get<std::uint64_t>();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  MrfmResult res = run_mrfm(cfg);
  std::string csv = "time,filtered\n";
  for (size_t n = 0; n < res.filtered.size(); ++n)
    csv += fmt17((n + 1) * cfg.dt) + "," + fmt17(res.filtered[n]) + "\n";
  write_text(out / "mrfm_signal.csv", csv, outputs);
  json doc = {{"gain", res.gain},
              {"ms_polarization", res.ms_polarization},
              {"t_z", cfg.t_z()},
              {"variance", res.stats.variance},
              {"noise_variance", res.stats.noise_variance},
              {"switching_rate", res.stats.switching_rate},
              {"dwell_mean", res.stats.dwell_mean},
              {"ms_inferred", res.stats.ms_inferred},
              {"threshold_crossings", res.stats.threshold_crossings}};
  write_text(out / "mrfm_stats.json", doc.dump(2) + "\n", outputs);
  return 0;
}

inline int cmd_dust(const json& p, const std::filesystem::path& out,
                    std::vector<std::string>& outputs) {
  std::vector<int> ranks = parse_list<int>(p.at("ranks"), "ranks");
  std::string tuning_name = p.at("tuning");
  DustExperimentResult res;
  try {
    res = run_dust_experiment(p.at("n_spin"), ranks, parse_tuning(tuning_name),
                              p.at("seed").get<std::uint64_t>(), p.at("t_burn"), p.at("n_samples"),
                              p.at("spacing"), p.at("proj_iters"), p.at("proj_tol"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::string csv = "n_spin,rank,tuning,sample_time,fidelity\n";
  for (const auto& r : res.rows)
    csv += std::to_string(r.n_spin) + "," + std::to_string(r.rank) + "," + tuning_name + "," +
           fmt17(r.sample_time) + "," + fmt17(r.fidelity) + "\n";
  write_text(out / "dust_fidelity.csv", csv, outputs);
  json med = json::object();
  for (const auto& [rank, fid] : res.median_fidelity) med[std::to_string(rank)] = fid;
  write_text(out / "dust_medians.json", med.dump(2) + "\n", outputs);
  return 0;
}

inline int cmd_thermal(const json& p, const std::filesystem::path& out,
                       std::vector<std::string>& outputs) {
  double j = p.at("j"), beta = p.at("beta"), tol = p.at("tol");
  int n_theta = p.at("n_theta"), n_phi = p.at("n_phi");
  if (j < 0.5 || std::lround(2 * j) != 2 * j) throw ConfigError("j must be a half-integer >= 1/2");
  json defects = json::array();
  double max_defect = 0;
  for (double m = -j; m <= j + 0.1; m += 1.0) {
    MmprimeResult r = verify_mmprime(j, m, m, beta, n_theta, n_phi);
    defects.push_back({{"m", m}, {"lhs", r.lhs.real()}, {"rhs", r.rhs}, {"defect", r.defect}});
    max_defect = std::max(max_defect, r.defect);
  }
  double alpha = thermal_alpha(beta);
  std::string csv = "z,pdf\n";
  for (int i = 0; i <= 200; ++i) {
    double z = -1.0 + 0.01 * i;
    csv += fmt17(z) + "," + fmt17(stationary_pdf(j, alpha, z)) + "\n";
  }
  json doc = {{"j", j},       {"beta", beta},           {"alpha", alpha},
              {"defects", defects}, {"max_defect", max_defect}, {"tolerance", tol}};
  write_text(out / "thermal.json", doc.dump(2) + "\n", outputs);
  write_text(out / "stationary_pdf.csv", csv, outputs);
  return max_defect <= tol ? 0 : 3;
}

inline int cmd_cs_sweep(const json& p, const std::filesystem::path& out, int workers,
                        std::vector<std::string>& outputs) {
  int order = p.at("order"), rank = p.at("rank"), n_seeds = p.at("n_seeds");
  int proj_iters = p.at("proj_iters");
  double proj_tol = p.at("proj_tol");
  std::uint64_t seed = p.at("seed").get<std::uint64_t>();
  std::vector<long> n_values = parse_list<long>(p.at("n_values"), "n_values");
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  Vec psi0 = evaluate(random_gk_state(order, rank, 2, rng::key(seed, 0x7a)));
  psi0 /= psi0.norm();
  long dim = psi0.size();
  double bound = sampling_bound(rank, dim);
  for (long n : n_values)
    if (n < 1 || n > dim) throw ConfigError("n_values must lie in [1, dim H]");

  struct Row {
    long n;
    std::uint64_t seed;
    double fidelity;
  };
  std::vector<Row> rows(n_values.size() * n_seeds);
  detail::parallel_for(int(rows.size()), workers, [&](int i) {
    long n = n_values[i / n_seeds];
    std::uint64_t s = rng::key(seed, 0x5e, std::uint64_t(i % n_seeds));
    SamplingDictionary dct = gaussian_dictionary(n, dim, s);
    Vec phi0 = dct.x * psi0;
    GKState init = random_gk_state(order, rank, 2, rng::key(s, 0xb4ea, std::uint64_t(n)));
    auto res = sparse_project(phi0, dct.x, init, 0.5, proj_iters, proj_tol, &psi0);
    rows[i] = {n, s, res.fidelity};
  });
  std::string csv = "rank,n,seed,fidelity,bound\n";
  for (const auto& r : rows)
    csv += std::to_string(rank) + "," + std::to_string(r.n) + "," + std::to_string(r.seed) + "," +
           fmt17(r.fidelity) + "," + fmt17(bound) + "\n";
  write_text(out / "cs_sweep.csv", csv, outputs);
  json med = json::object();
  for (size_t v = 0; v < n_values.size(); ++v) {
    std::vector<double> fids;
    for (int s = 0; s < n_seeds; ++s) fids.push_back(rows[v * n_seeds + s].fidelity);
    std::sort(fids.begin(), fids.end());
    med[std::to_string(n_values[v])] = fids[fids.size() / 2];
  }
  json doc = {{"bound", bound}, {"median_fidelity", med}};
  write_text(out / "cs_sweep_summary.json", doc.dump(2) + "\n", outputs);
  return 0;
}

inline int cmd_rip(const json& p, const std::filesystem::path& out,
                   std::vector<std::string>& outputs) {
  std::string dict_kind = p.at("dict");
  SamplingDictionary d;
  try {
    if (dict_kind == "tetra") {
      std::string code = p.at("code");
      PetalCode pc = code == "none"     ? PetalCode::none
                     : code == "parity" ? PetalCode::parity
                     : code == "secded" ? PetalCode::secded
                                        : throw ConfigError("unknown code: " + code);
      d = build_dictionary(p.at("chars"), pc, p.at("j"));
    } else if (dict_kind == "gaussian") {
      d = gaussian_dictionary(p.at("n").get<long>(), p.at("p").get<long>(),
                              p.at("seed").get<std::uint64_t>());
    } else {
      throw ConfigError("unknown dict: " + dict_kind);
    }
    RipReport rep = rip_report(d, p.at("sparsity"), p.at("samples").get<long>(),
                               p.at("seed").get<std::uint64_t>());
    json doc = {{"dict", dict_kind},
                {"n", d.n},
                {"p", d.p},
                {"sparsity", rep.sparsity},
                {"subsets_tested", rep.subsets_tested},
                {"fraction_pass", rep.fraction_pass},
                {"delta_min", rep.delta_min},
                {"delta_max", rep.delta_max},
                {"lambda_min", rep.lambda_min},
                {"lambda_max", rep.lambda_max}};
    write_text(out / "rip.json", doc.dump(2) + "\n", outputs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return 0;
}

inline int cmd_calibrate(const json& p, const std::filesystem::path& out,
                         std::vector<std::string>& outputs) {
  BlochCalibration cal;
  try {
    cal = calibrate_bloch(p.at("gx"), p.at("gy"), p.at("gz"), p.at("beta"), p.at("eps_max"),
                          p.at("reciprocal_branch"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json doc = {{"alpha", cal.alpha},     {"beta", cal.beta},     {"r", cal.r},
              {"theta_x", cal.theta_x}, {"theta_y", cal.theta_y}, {"theta_z", cal.theta_z},
              {"eps_x", cal.eps_x},     {"eps_y", cal.eps_y},   {"eps_z", cal.eps_z}};
  write_text(out / "calibration.json", doc.dump(2) + "\n", outputs);
  return 0;
}

// Runs one subcommand end to end; returns the process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& err = std::cerr) {
  ParsedArgs pa;
  try {
    pa = parse_args(args);
    // Validate output directory before running anything.
    std::filesystem::create_directories(pa.out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  std::vector<std::string> outputs;
  int code = 0;
  try {
    const json& p = pa.params;
    if (pa.subcommand == "curvature") code = cmd_curvature(p, pa.out, outputs);
    else if (pa.subcommand == "project") code = cmd_project(p, pa.out, outputs);
    else if (pa.subcommand == "simulate") code = cmd_simulate(p, pa.out, outputs);
    else if (pa.subcommand == "mrfm") code = cmd_mrfm(p, pa.out, outputs);
    else if (pa.subcommand == "dust") code = cmd_dust(p, pa.out, outputs);
    else if (pa.subcommand == "thermal") code = cmd_thermal(p, pa.out, outputs);
    else if (pa.subcommand == "cs-sweep") code = cmd_cs_sweep(p, pa.out, pa.workers, outputs);
    else if (pa.subcommand == "rip") code = cmd_rip(p, pa.out, outputs);
    else if (pa.subcommand == "calibrate") code = cmd_calibrate(p, pa.out, outputs);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  json manifest = {{"version", kVersion},
                   {"subcommand", pa.subcommand},
                   {"workers", pa.workers},
                   {"parameters", pa.params},
                   {"outputs", outputs},
                   {"exit_code", code}};
  std::ofstream mf(pa.out / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
  return code;
}

}  // namespace qmor::cli
