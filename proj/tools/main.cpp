#include <CLI11.hpp>

#include <optional>
#include <string>

#include "hamrec/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coefficient reconstruction for 1D heat and wave equations\n"
               "from boundary measurements, via regularized Hamiltonian\n"
               "systems and Newton-Krylov solvers."};
  app.require_subcommand(1);

  std::string config, measurements, out;
  long long seed = 0;
  bool seed_set = false;

  CLI::App* gen = app.add_subcommand(
      "generate", "synthesize twin-experiment measurement data");
  gen->add_option("--config", config, "experiment config file")->required();
  gen->add_option("--out", out, "output directory (overrides output.dir)");
  gen->add_option("--seed", seed, "noise seed (overrides noise.seed)")
      ->each([&seed_set](const std::string&) { seed_set = true; });

  CLI::App* rec = app.add_subcommand(
      "reconstruct", "run the delta-continuation reconstruction");
  rec->add_option("--config", config, "experiment config file")->required();
  rec->add_option("--measurements", measurements, "measurement csv file")
      ->required();
  rec->add_option("--out", out, "output directory (overrides output.dir)");

  CLI::App* rep = app.add_subcommand(
      "report", "render result files into plot-ready .dat files");
  rep->add_option("--out", out, "directory holding the result files")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hamrec::kExitOk : hamrec::kExitConfig;
  }

  if (gen->parsed()) {
    return hamrec::cmd_generate(
        config, out, seed_set ? std::optional<long long>(seed) : std::nullopt);
  }
  if (rec->parsed()) {
    return hamrec::cmd_reconstruct(config, measurements, out);
  }
  return hamrec::cmd_report(out);
}
