#include <CLI11.hpp>

#include <iostream>

#include "susychain/cli.hpp"

int main(int argc, char** argv) {
  using namespace susychain::cli;
  CLI::App app{"susychain: saw-chain flat bands and Darboux-coupled Dirac operators"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string config;
  double tol = 0.0, box = 0.0;
  std::size_t grid_points = 0, cells = 0;

  for (const char* name : {"bands", "tune", "susy", "spectrum", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "RNG seed for randomized sweeps")->capture_default_str();
    sub->add_option("--tol", tol, "tolerance override");
    sub->add_option("--grid-points", grid_points, "k- or x-grid points");
    sub->add_option("--box", box, "box width (chain length or continuum domain)");
    sub->add_option("--cells", cells, "chain cells");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  opt.command = sub->get_name();
  if (sub->count("--config")) opt.config_path = config;
  if (sub->count("--tol")) opt.tol = tol;
  if (sub->count("--box")) opt.box = box;
  if (sub->count("--grid-points")) opt.grid_points = grid_points;
  if (sub->count("--cells")) opt.cells = cells;
  return run(opt, std::cout, std::cerr);
}
