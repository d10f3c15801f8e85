#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "test_systems.hpp"
#include "varoc/io.hpp"

using namespace varoc;
using namespace varoc::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(VAROC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json base_config(const fs::path& outdir, const std::string& prefix) {
  json cfg;
  cfg["model"] = {{"id", "kepler"}, {"params", json::object()}};
  cfg["formulation"] = "independent";
  cfg["scheme"] = {{"alpha", 1.0}, {"beta", 1.0}, {"gamma", 1.0}};
  cfg["grid"] = {{"T", 28.0}, {"N", 30}};
  cfg["solver"] = {{"tol", 1e-10}, {"max_iter", 200}};
  cfg["output"] = {{"dir", outdir.string()}, {"prefix", prefix}};
  return cfg;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& cfg) {
  fs::path path = dir / name;
  std::ofstream out(path);
  out << cfg.dump(2);
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve subcommand produces artifacts and a convergent summary") {
  fs::path dir = fresh_dir("varoc_cli_solve");
  fs::path cfg = write_config(dir, "run.json", base_config(dir, "run"));
  CHECK(run_cli("solve " + cfg.string()) == io::kExitOk);

  json summary;
  std::ifstream(dir / "run_summary.json") >> summary;
  CHECK(summary["converged"].get<bool>());
  CHECK(summary["residual_norm"].get<double>() <= 1e-10);
  CHECK(summary["grid"]["N"].get<int>() == 30);
  CHECK(summary.contains("transfer_horizon_formula"));
  CHECK(fs::exists(dir / "run_trajectory.csv"));
  CHECK(fs::exists(dir / "run_diagnostics.csv"));
}

TEST_CASE("identical configs give byte-identical trajectory files") {
  fs::path dir = fresh_dir("varoc_cli_det");
  fs::path cfg_a = write_config(dir, "a.json", base_config(dir, "a"));
  fs::path cfg_b = write_config(dir, "b.json", base_config(dir, "b"));
  REQUIRE(run_cli("solve " + cfg_a.string()) == io::kExitOk);
  REQUIRE(run_cli("solve " + cfg_b.string()) == io::kExitOk);
  CHECK(slurp(dir / "a_trajectory.csv") == slurp(dir / "b_trajectory.csv"));
  CHECK(slurp(dir / "a_diagnostics.csv") == slurp(dir / "b_diagnostics.csv"));
}

TEST_CASE("emitted trajectory reassembles to the reported residual") {
  fs::path dir = fresh_dir("varoc_cli_roundtrip");

  SUBCASE("independent") {
    fs::path cfg = write_config(dir, "indep.json", base_config(dir, "indep"));
    REQUIRE(run_cli("solve " + cfg.string()) == io::kExitOk);
    json summary;
    std::ifstream(dir / "indep_summary.json") >> summary;

    io::TrajectoryCsv data = io::read_trajectory_csv(dir / "indep_trajectory.csv", 2, 1);
    DiscreteTrajectory traj;
    traj.q = data.q;
    traj.lam = data.lam;
    OCProblem prob = kepler_problem(28.0);
    SchemeParams p = make_scheme(1.0, 1.0, 1.0, 30, 28.0);
    const double reassembled = assemble_indep(prob, p, traj).max_norm();
    CHECK(std::abs(reassembled - summary["residual_norm"].get<double>()) <= 1e-9);
  }

  SUBCASE("dependent with controls file") {
    json cfg = base_config(dir, "dep");
    cfg["formulation"] = "dependent";
    cfg["guess"] = "linear-interp";
    fs::path path = write_config(dir, "dep.json", cfg);
    REQUIRE(run_cli("solve " + path.string()) == io::kExitOk);
    json summary;
    std::ifstream(dir / "dep_summary.json") >> summary;

    io::TrajectoryCsv data = io::read_trajectory_csv(dir / "dep_trajectory.csv", 2, 1);
    io::ControlsCsv controls = io::read_controls_csv(dir / "dep_controls.csv", 1);
    DiscreteTrajectory traj;
    traj.q = data.q;
    traj.lam = data.lam;
    traj.u1 = controls.u1;
    traj.u2 = controls.u2;
    OCProblem prob = kepler_problem(28.0);
    SchemeParams p = make_scheme(1.0, 1.0, 1.0, 30, 28.0);
    const double reassembled = assemble_dep(prob, p, traj).max_norm();
    CHECK(std::abs(reassembled - summary["residual_norm"].get<double>()) <= 1e-9);
  }
}

TEST_CASE("configuration validation failures exit with code 2") {
  fs::path dir = fresh_dir("varoc_cli_validate");
  json bad = base_config(dir, "bad");
  bad["scheme"]["alpha"] = 1.5;
  CHECK(run_cli("solve " + write_config(dir, "bad.json", bad).string()) ==
        io::kExitConfig);

  json both = base_config(dir, "both");
  both["grid"]["h"] = 0.1;  // N and h together
  CHECK(run_cli("solve " + write_config(dir, "both.json", both).string()) ==
        io::kExitConfig);

  json empty_study = base_config(dir, "study");
  empty_study["study"] = {{"schemes", json::array({{{"id", "a"},
                                                    {"alpha", 1.0},
                                                    {"beta", 1.0},
                                                    {"gamma", 1.0}}})},
                          {"N", json::array()}};
  CHECK(run_cli("study " + write_config(dir, "es.json", empty_study).string()) ==
        io::kExitConfig);

  json bad_psi = base_config(dir, "psi");
  bad_psi["symmetry"] = {{"B", {{0, -1}, {1, 0}}}, {"d", {0, 0}}, {"psi", "sometimes"}};
  CHECK(run_cli("solve " + write_config(dir, "psi.json", bad_psi).string()) ==
        io::kExitConfig);

  CHECK(run_cli("solve " + (dir / "missing.json").string()) == io::kExitConfig);
}

TEST_CASE("missing output directory exits with the io code") {
  fs::path dir = fresh_dir("varoc_cli_io");
  json cfg = base_config(dir / "does_not_exist", "run");
  CHECK(run_cli("solve " + write_config(dir, "io.json", cfg).string()) == io::kExitIo);
}

TEST_CASE("study subcommand emits the slope table") {
  fs::path dir = fresh_dir("varoc_cli_study");
  json cfg = base_config(dir, "study");
  cfg["study"] = {{"schemes", json::array({{{"id", "euler"},
                                            {"alpha", 1.0},
                                            {"beta", 1.0},
                                            {"gamma", 1.0}}})},
                  {"N", json::array({30, 60})},
                  {"reference_N", 600}};
  REQUIRE(run_cli("study " + write_config(dir, "study.json", cfg).string()) ==
          io::kExitOk);
  std::ifstream table(dir / "study_study.csv");
  REQUIRE(table.good());
  std::string header, row1, row2;
  std::getline(table, header);
  std::getline(table, row1);
  std::getline(table, row2);
  CHECK(header == "scheme-id,N,h,error,fitted-slope");
  CHECK(row1.substr(0, 9) == "euler,30,");
  CHECK(row2.substr(0, 9) == "euler,60,");
}

TEST_CASE("check subcommand validates the kepler derivatives") {
  fs::path dir = fresh_dir("varoc_cli_check");
  json cfg = base_config(dir, "check");
  cfg["check"] = {{"probes", 25}, {"seed", 7}};
  CHECK(run_cli("check " + write_config(dir, "check.json", cfg).string()) ==
        io::kExitOk);
}
