#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "fracsem/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional semilinear exterior-value experiments"};
  app.set_version_flag("--version", fracsem::cli::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  for (const char* name : {"solve", "forward", "principles", "linearize", "recover", "probe"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", out, "output directory");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  const int status = fracsem::cli::run_file(name, config, out);
  if (status != 0) {
    std::ifstream err(std::filesystem::path(out) / "errors.json");
    std::cerr << err.rdbuf();
  }
  return status;
}
