#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "varoc/io.hpp"

namespace {

int dispatch(int (*driver)(const varoc::io::RunConfig&, std::ostream&),
             const std::string& config_path) {
  try {
    varoc::io::RunConfig cfg = varoc::io::load_config(config_path);
    return driver(cfg, std::cout);
  } catch (const varoc::io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return varoc::io::kExitConfig;
  } catch (const varoc::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return varoc::io::kExitConfig;
  } catch (const varoc::io::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return varoc::io::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational solver for optimal control of affine-controlled "
               "second-order systems"};
  app.require_subcommand(1);

  std::string solve_cfg, study_cfg, check_cfg;
  CLI::App* solve = app.add_subcommand("solve", "solve one configured problem");
  solve->add_option("config", solve_cfg, "JSON run configuration")->required();
  CLI::App* study = app.add_subcommand("study", "run a convergence study");
  study->add_option("config", study_cfg, "JSON study configuration")->required();
  CLI::App* check = app.add_subcommand("check", "check model derivatives only");
  check->add_option("config", check_cfg, "JSON configuration")->required();

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return dispatch(varoc::io::run_solve, solve_cfg);
  if (study->parsed()) return dispatch(varoc::io::run_study, study_cfg);
  return dispatch(varoc::io::run_check, check_cfg);
}
