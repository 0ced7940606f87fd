#include "plap/experiments/config.hpp"
#include "plap/experiments/runs.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace ex = plap::experiments;

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "JSON experiment config (defaults when omitted)")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "Run only this seed, replacing the config list");
  sub->add_option("--out", args.out, "Output directory (overrides output_dir)");
}

ex::ExperimentConfig resolve(const CommonArgs& args, std::optional<ex::ExperimentKind> kind) {
  ex::ExperimentConfig cfg = args.config.empty() ? ex::default_config() : ex::load_config(args.config);
  if (kind) {
    if (cfg.experiment && *cfg.experiment != *kind)
      throw ex::ConfigError("config is for '" + ex::to_string(*cfg.experiment) + "', not '" +
                            ex::to_string(*kind) + "'");
    cfg.experiment = kind;
  }
  if (args.seed) cfg.seeds = {*args.seed};
  if (!args.out.empty()) cfg.output_dir = args.out;
  if (!args.checkpoint.empty()) cfg.sample.checkpoint = args.checkpoint;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score-based p-Laplace estimation and memorization experiments"};
  app.require_subcommand(1);
  CommonArgs args;

  struct Command {
    const char* name;
    const char* help;
    std::optional<ex::ExperimentKind> kind;
    ex::RunOutcome (*run)(const ex::ExperimentConfig&, const std::filesystem::path&);
  };
  const Command commands[] = {
      {"fidelity", "Estimator accuracy against dense Monte Carlo on the oracle mixture",
       ex::ExperimentKind::fidelity, ex::run_fidelity},
      {"memorize", "Memorization detection with injected replicas", ex::ExperimentKind::memorization,
       ex::run_memorization},
      {"bounds", "Empirical check of the flux approximation bound", ex::ExperimentKind::bounds,
       ex::run_bounds},
      {"train", "Train a score model and write a checkpoint", std::nullopt, ex::run_train},
      {"sample", "Draw reverse-diffusion samples", std::nullopt, ex::run_sample},
  };
  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, args);
    if (std::string(c.name) == "sample")
      sub->add_option("--checkpoint", args.checkpoint, "Checkpoint to sample from")->check(CLI::ExistingFile);
    sub->callback([&chosen, &c] { chosen = &c; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(args, chosen->kind);
    const auto outcome = chosen->run(cfg, cfg.output_dir);
    for (const auto& f : outcome.failures)
      std::cerr << "seed " << f.seed << " failed: " << f.error << "\n";
    std::cout << chosen->name << ": " << outcome.summary["completed"].get<std::size_t>() << " of "
              << cfg.seeds.size() << " runs completed, artifacts in " << cfg.output_dir.string() << "\n";
    return outcome.exit_code();
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
