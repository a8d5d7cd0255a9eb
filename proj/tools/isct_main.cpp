#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isct/parallel.hpp"
#include "isct/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fixed-energy inverse scattering toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap for the worker pool");

  std::string config = "config.json";
  std::string potential, data, out, mode = "full", suite = "all";

  CLI::App* sim = app.add_subcommand("simulate", "solve the forward problem and write data");
  sim->add_option("--config", config, "run configuration (JSON)");
  sim->add_option("--potential", potential, "potential spec (JSON)")->required();
  sim->add_option("--out", out, "output .scat path")->required();

  CLI::App* rec = app.add_subcommand("reconstruct", "reconstruct the transform from data");
  rec->add_option("--config", config, "run configuration (JSON)");
  rec->add_option("--data", data, "input .scat path")->required();
  rec->add_option("--mode", mode, "full | born | restricted");
  rec->add_option("--out", out, "output directory")->required();

  CLI::App* ver = app.add_subcommand("verify", "run a numeric certification suite");
  ver->add_option("--config", config, "run configuration (JSON)");
  ver->add_option("--suite", suite, "coords | cauchy | bounds | dbar | all");
  ver->add_option("--out", out, "report path (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) isct::worker_threads() = threads;

  if (sim->parsed()) return isct::pipeline::cmd_simulate(config, potential, out, std::cout);
  if (rec->parsed()) return isct::pipeline::cmd_reconstruct(config, data, out, mode, std::cout);
  if (ver->parsed()) return isct::pipeline::cmd_verify(config, suite, out, std::cout);
  return 2;
}
