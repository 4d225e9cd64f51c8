// Command line driver: chns --config FILE [--set key=value ...] [--mode M] [--out DIR]
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chns/driver.hpp"
#include "chns/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"DG solver for the Cahn-Hilliard-Navier-Stokes system"};
  std::string config_path;
  std::vector<std::string> overrides;
  std::string mode;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "Configuration file ([section] key = value)");
  app.add_option("--set", overrides, "Override a configuration entry, key=value (repeatable)");
  app.add_option("--mode", mode, "Run mode")->check(CLI::IsMember({"simulate", "verify-mms", "probe-constants"}));
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    chns::RunConfig cfg;
    if (!config_path.empty()) cfg = chns::load_config(config_path);
    for (const auto& o : overrides) chns::apply_override(cfg, o);
    if (!mode.empty()) cfg.set("run.mode", mode);
    if (!out_dir.empty()) cfg.set("output.dir", out_dir);
    std::ostream null_stream(nullptr);
    chns::run(cfg, quiet ? null_stream : std::cerr);
  } catch (const chns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const chns::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const chns::TopologyError& e) {
    std::cerr << "config error: mesh.file: " << e.what() << '\n';
    return 2;
  } catch (const chns::NewtonDivergence& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const chns::SingularSystemError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
