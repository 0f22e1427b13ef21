#include "phdyn/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"phdyn: partially hyperbolic dynamics toolkit"};
  phdyn::runner::RunOptions opt;
  app.add_option("--config", opt.config_path, "run configuration (JSON)")->required();
  app.add_option("--set", opt.overrides, "override a scalar field, key=value (repeatable)");
  app.add_option("--workers", opt.workers, "worker threads; does not change outputs")->check(CLI::PositiveNumber);
  app.add_option("--out", opt.out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return phdyn::runner::run(opt, std::cerr);
}
