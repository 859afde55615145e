#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "qmor/cli.hpp"

using namespace qmor;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("qmor_cli_" + tag);
  fs::remove_all(p);
  return p;
}

int run(const std::vector<std::string>& args) {
  std::ostringstream sink;
  return cli::run_cli(args, sink);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(bool(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config errors exit 2 and write no output files") {
  fs::path out = fresh_dir("err");
  CHECK(run({}) == 2);
  CHECK(run({"no-such-subcommand"}) == 2);
  CHECK(run({"calibrate", "--bogus_key", "1", "--out", out.string()}) == 2);
  CHECK(run({"calibrate", "--gx"}) == 2);  // flag without value
  // malformed config file
  fs::create_directories(out);
  fs::path cfg = out / "bad.json";
  std::ofstream(cfg) << "{ not json";
  CHECK(run({"calibrate", "--config", cfg.string(), "--out", out.string()}) == 2);
  // config file with an unknown key
  std::ofstream(cfg) << "{\"gx\": 1.0, \"mystery\": 2}";
  CHECK(run({"calibrate", "--config", cfg.string(), "--out", out.string()}) == 2);
  // infeasible rates are a config error too
  CHECK(run({"calibrate", "--gx", "3.0", "--gy", "0.1", "--gz", "0.2", "--out", out.string()}) == 2);
  for (const char* f : {"calibration.json", "manifest.json"}) CHECK(!fs::exists(out / f));
}

TEST_CASE("calibrate: artifacts, manifest, and byte-identical reruns") {
  fs::path out = fresh_dir("cal");
  int code = run({"calibrate", "--gx", "1.0", "--gy", "1.0", "--gz", "1.0", "--eps_max", "0.1",
                  "--out", out.string()});
  CHECK(code == 0);
  auto doc = nlohmann::json::parse(slurp(out / "calibration.json"));
  CHECK(doc["r"].get<double>() == doctest::Approx(25.0));
  CHECK(doc["alpha"].get<double>() == doctest::Approx(0.0));
  CHECK(doc["eps_x"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(man["subcommand"] == "calibrate");
  CHECK(man["exit_code"] == 0);
  CHECK(man["parameters"]["gx"].get<double>() == 1.0);

  std::string first_csv = slurp(out / "calibration.json");
  std::string first_man = slurp(out / "manifest.json");
  fs::path out2 = fresh_dir("cal2");
  CHECK(run({"calibrate", "--gx", "1.0", "--gy", "1.0", "--gz", "1.0", "--eps_max", "0.1", "--out",
             out2.string()}) == 0);
  CHECK(slurp(out2 / "calibration.json") == first_csv);
  CHECK(slurp(out2 / "manifest.json") == first_man);
}

TEST_CASE("curvature: slater report matches the closed form") {
  fs::path out = fresh_dir("curv");
  CHECK(run({"curvature", "--kind", "slater", "--n", "2", "--norb", "4", "--out", out.string()}) ==
        0);
  auto doc = nlohmann::json::parse(slurp(out / "curvature.json"));
  double kappa = doc["kappa"];
  // slater n=2, norb=4: scalar = -(2/kappa) * 2*1*2*1 = -8/kappa
  CHECK(doc["analytic_scalar"].get<double>() == doctest::Approx(-8.0 / kappa).epsilon(1e-12));
  CHECK(doc["scalar"].get<double>() ==
        doctest::Approx(doc["analytic_scalar"].get<double>()).epsilon(1e-6));
  CHECK(doc["bianchi_defect"].get<double>() < 1e-8);
  CHECK(run({"curvature", "--kind", "nonsense", "--out", out.string()}) == 2);
}

TEST_CASE("rip: tetra parity dictionary passes at sparsity 3") {
  fs::path out = fresh_dir("rip");
  CHECK(run({"rip", "--dict", "tetra", "--chars", "3", "--code", "parity", "--sparsity", "3",
             "--out", out.string()}) == 0);
  auto doc = nlohmann::json::parse(slurp(out / "rip.json"));
  CHECK(doc["fraction_pass"].get<double>() == doctest::Approx(1.0));
  CHECK(doc["n"] == 8);
  CHECK(doc["p"] == 16);
  CHECK(run({"rip", "--dict", "tetra", "--chars", "3", "--code", "parity", "--sparsity", "0",
             "--out", out.string()}) == 2);
}

TEST_CASE("simulate: CSV row count and determinism in the seed") {
  fs::path out = fresh_dir("sim");
  CHECK(run({"simulate", "--n_steps", "50", "--seed", "9", "--out", out.string()}) == 0);
  std::string csv = slurp(out / "trajectory.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);  // header + n_steps * 1 pair
  CHECK(csv.rfind("time,pair_id,click,filtered\n", 0) == 0);
  fs::path out2 = fresh_dir("sim2");
  CHECK(run({"simulate", "--n_steps", "50", "--seed", "9", "--out", out2.string()}) == 0);
  CHECK(slurp(out2 / "trajectory.csv") == csv);
  // three axes on one spin -> 3 pairs per step
  fs::path out3 = fresh_dir("sim3");
  CHECK(run({"simulate", "--n_steps", "10", "--axes", "1,2,3", "--out", out3.string()}) == 0);
  std::string csv3 = slurp(out3 / "trajectory.csv");
  CHECK(std::count(csv3.begin(), csv3.end(), '\n') == 31);
  CHECK(run({"simulate", "--dt", "-1", "--out", out3.string()}) == 2);
}

TEST_CASE("project: convergence exit codes") {
  fs::path out = fresh_dir("proj");
  CHECK(run({"project", "--order", "3", "--rank", "1", "--d", "2", "--max_iter", "800", "--tol",
             "1e-8", "--seed", "4", "--out", out.string()}) == 0);
  auto doc = nlohmann::json::parse(slurp(out / "projection.json"));
  CHECK(doc["converged"] == true);
  CHECK(doc["fidelity"].get<double>() > 1.0 - 1e-6);
  // starving the iteration budget must be reported as non-convergence
  fs::path out2 = fresh_dir("proj2");
  CHECK(run({"project", "--order", "3", "--rank", "1", "--d", "2", "--max_iter", "1", "--tol",
             "1e-12", "--seed", "4", "--out", out2.string()}) == 3);
  auto man = nlohmann::json::parse(slurp(out2 / "manifest.json"));
  CHECK(man["exit_code"] == 3);
}

TEST_CASE("thermal: verification defects under tolerance, exit 3 when impossible") {
  fs::path out = fresh_dir("th");
  CHECK(run({"thermal", "--j", "1.0", "--beta", "1.5", "--out", out.string()}) == 0);
  auto doc = nlohmann::json::parse(slurp(out / "thermal.json"));
  CHECK(doc["max_defect"].get<double>() < 1e-6);
  CHECK(doc["defects"].size() == 3);
  CHECK(fs::exists(out / "stationary_pdf.csv"));
  fs::path out2 = fresh_dir("th2");
  CHECK(run({"thermal", "--j", "1.0", "--beta", "1.5", "--tol", "1e-18", "--out",
             out2.string()}) == 3);
  CHECK(run({"thermal", "--j", "0.7", "--out", out2.string()}) == 2);
}

TEST_CASE("cs-sweep: output independent of worker count") {
  fs::path out1 = fresh_dir("cs1"), out2 = fresh_dir("cs2");
  std::vector<std::string> base = {"cs-sweep", "--order", "3",       "--rank",    "1",
                                   "--n_values", "4,8",   "--n_seeds", "3",
                                   "--proj_iters", "200", "--seed",  "11"};
  auto with = [&](const fs::path& o, const std::string& w) {
    std::vector<std::string> a = base;
    a.insert(a.end(), {"--out", o.string(), "--workers", w});
    return run(a);
  };
  CHECK(with(out1, "1") == 0);
  CHECK(with(out2, "4") == 0);
  CHECK(slurp(out1 / "cs_sweep.csv") == slurp(out2 / "cs_sweep.csv"));
  CHECK(slurp(out1 / "cs_sweep_summary.json") == slurp(out2 / "cs_sweep_summary.json"));
  std::string csv = slurp(out1 / "cs_sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + 2 n * 3 seeds
  CHECK(run({"cs-sweep", "--n_values", "99", "--out", out1.string()}) == 2);
}

TEST_CASE("mrfm and dust: smoke runs with expected artifacts") {
  fs::path out = fresh_dir("mrfm");
  CHECK(run({"mrfm", "--duration", "120", "--seed", "3", "--out", out.string()}) == 0);
  auto doc = nlohmann::json::parse(slurp(out / "mrfm_stats.json"));
  CHECK(doc["gain"].get<double>() == doctest::Approx(std::sin(0.026)).epsilon(1e-12));
  CHECK(doc["ms_polarization"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  std::string csv = slurp(out / "mrfm_signal.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + int(std::lround(120 / 7.1e-3)));

  fs::path out2 = fresh_dir("dust");
  CHECK(run({"dust", "--n_spin", "4", "--ranks", "1", "--t_burn", "1.0", "--n_samples", "3",
             "--spacing", "0.5", "--proj_iters", "80", "--seed", "2", "--out", out2.string()}) ==
        0);
  std::string dcsv = slurp(out2 / "dust_fidelity.csv");
  CHECK(std::count(dcsv.begin(), dcsv.end(), '\n') == 4);  // header + 3 samples
  CHECK(dcsv.rfind("n_spin,rank,tuning,sample_time,fidelity\n", 0) == 0);
  auto med = nlohmann::json::parse(slurp(out2 / "dust_medians.json"));
  CHECK(med["1"].get<double>() > 0.0);
  CHECK(run({"dust", "--n_spin", "13", "--out", out2.string()}) == 2);
}
