#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "physaug/cli.hpp"
#include "physaug/errors.hpp"

using namespace physaug;

namespace {

const std::map<std::string, policy::Mode> kModes{{"ppda", policy::Mode::Ppda}, {"stda", policy::Mode::Stda}};

void add_run_options(CLI::App* sub, cli::RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Master seed")->default_val(0);
  sub->add_option("--mode", cfg.mode, "Augmentation family")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
      ->default_str("ppda");
  sub->add_option("--policy", cfg.policy_path, "Policy JSON")->required();
  sub->add_option("--bundle", cfg.bundle_path, "Motion bundle JSON");
  sub->add_option("--trace", cfg.trace_paths, "Trace CSV (STDA only, repeatable)");
  sub->add_option("--labels", cfg.labels_path, "Per-frame labels, one integer per line");
  sub->add_option("--window", cfg.window, "Window length in frames")->default_val(100);
  sub->add_option("--stride", cfg.stride, "Window stride in frames")->default_val(25);
  sub->add_option("--batch", cfg.batch, "Windows per batch")->default_val(64);
  sub->add_option("--batches", cfg.max_batches, "Number of batches (0: default)")->default_val(0);
  sub->add_option("--workers", cfg.workers, "Worker threads")->default_val(1);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("physaug"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");

  CLI::App app{"Physics-based IMU data augmentation"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::filesystem::path sim_bundle, sim_out;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Synthesize IMU traces from a bundle");
  simulate->add_option("--bundle", sim_bundle)->required();
  simulate->add_option("--out", sim_out)->required();
  simulate->add_option("--seed", sim_seed)->default_val(0);

  cli::RunConfig aug_cfg;
  auto* augment = app.add_subcommand("augment", "Write augmented batches to a file");
  add_run_options(augment, aug_cfg);
  augment->add_option("--out", aug_cfg.out)->required();

  cli::RunConfig serve_cfg;
  auto* serve = app.add_subcommand("serve", "Stream batches to a training client over TCP");
  add_run_options(serve, serve_cfg);
  serve->add_option("--port", serve_cfg.port, "Port on 127.0.0.1 (0: ephemeral)");
  serve->add_option("--round", serve_cfg.batches_per_round, "Batches per policy update")->default_val(10);
  serve->add_option("--state-out", serve_cfg.state_out, "Write the final policy state here");

  auto* pol = app.add_subcommand("policy", "Policy file utilities");
  pol->require_subcommand(1);
  std::filesystem::path inspect_path;
  bool inspect_list = false;
  auto* inspect = pol->add_subcommand("inspect", "Summarize a policy file");
  inspect->add_option("path", inspect_path)->required();
  inspect->add_flag("--list", inspect_list, "List every sub-policy");
  policy::Mode init_mode = policy::Mode::Ppda;
  std::optional<std::filesystem::path> init_out;
  auto* init = pol->add_subcommand("init", "Emit the default policy for a mode");
  init->add_option("--mode", init_mode)->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))->default_str("ppda");
  init->add_option("--out", init_out);

  std::filesystem::path fix_out;
  std::uint64_t fix_seed = 0;
  std::size_t fix_frames = 1500;
  auto* fixture = app.add_subcommand("fixture", "Write the demo bundle");
  fixture->add_option("--out", fix_out)->required();
  fixture->add_option("--seed", fix_seed)->default_val(0);
  fixture->add_option("--frames", fix_frames)->default_val(1500);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitConfig;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*simulate) return cli::cmd_simulate(sim_bundle, sim_out, sim_seed);
    if (*augment) return cli::cmd_augment(aug_cfg);
    if (*serve) return cli::cmd_serve(serve_cfg);
    if (*inspect) return cli::cmd_policy_inspect(inspect_path, inspect_list, std::cout);
    if (*init) return cli::cmd_policy_init(init_mode, init_out, std::cout);
    if (*fixture) return cli::cmd_fixture(fix_out, fix_seed, fix_frames);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return cli::exit_code_for(e);
  }
  return cli::kExitOk;
}
