// Command-line front end: train agents, evaluate them, and compare the
// planner variants on a shared benchmark configuration.
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "hf/cli/commands.hpp"
#include "hf/cli/config.hpp"
#include "hf/cli/experiment.hpp"
#include "hf/common/error.hpp"

namespace {

using CommandFn = int (*)(const hf::cli::ConfigFile&, const hf::cli::RunOptions&);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-conditioned control: RL, scenario MPC, and their combination"};
  app.require_subcommand(1);

  hf::cli::RunOptions opts;
  app.add_option("-c,--config", opts.config_path, "configuration file (section.key = value)")
      ->envname("HF_CONFIG");
  app.add_option("-s,--seed", opts.seed, "master seed (overrides run.seed)")
      ->envname("HF_SEED");
  app.add_option("-o,--out", opts.out_dir, "output directory (overrides run.out)")
      ->envname("HF_OUT");
  app.add_option("-t,--threads", opts.threads, "evaluation worker threads")
      ->envname("HF_THREADS")
      ->check(CLI::PositiveNumber);

  CommandFn command = nullptr;
  CLI::App* train = app.add_subcommand("train", "train a goal-reaching agent");
  CLI::App* eval_rl =
      app.add_subcommand("eval-rl", "evaluate a checkpoint on nominal and shifted dynamics");
  CLI::App* compare =
      app.add_subcommand("compare", "paired rollouts: quadratic planner, raw actor, combined");
  CLI::App* profile = app.add_subcommand("profile", "trace all three agents from one start");
  CLI::App* lqr_demo =
      app.add_subcommand("lqr-demo", "Riccati solve plus planner-vs-policy consistency check");
  train->callback([&] { command = hf::cli::cmd_train; });
  eval_rl->callback([&] { command = hf::cli::cmd_eval_rl; });
  compare->callback([&] { command = hf::cli::cmd_compare; });
  profile->callback([&] { command = hf::cli::cmd_profile; });
  lqr_demo->callback([&] { command = hf::cli::cmd_lqr_demo; });

  CLI11_PARSE(app, argc, argv);

  try {
    hf::cli::ConfigFile cfg;
    if (!opts.config_path.empty()) {
      cfg = hf::cli::ConfigFile::parse_file(opts.config_path);
    } else if (command != hf::cli::cmd_lqr_demo) {
      std::fprintf(stderr, "error: --config is required for this command\n");
      return 2;
    }
    return command(cfg, opts);
  } catch (const hf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const hf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
