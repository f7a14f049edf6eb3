#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "physaug/cli.hpp"
#include "physaug/errors.hpp"
#include "physaug/fixtures.hpp"
#include "physaug/trace_csv.hpp"

namespace physaug::cli {

namespace {

nlohmann::json read_policy_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
}

void log_run(const RunConfig& cfg, const std::string& hash) {
  spdlog::info("physaug {} seed={} mode={} policy={} policy_hash={}", kToolVersion, cfg.seed,
               policy::mode_name(cfg.mode), cfg.policy_path.string(), hash);
}

policy::PolicyState state_for(const RunConfig& cfg, std::string& hash) {
  if (cfg.policy_path.empty()) throw InvalidArgument("--policy is required");
  const auto doc = read_policy_json(cfg.policy_path);
  const auto pc = policy::parse_policy(doc);
  if (pc.space.mode != cfg.mode) {
    throw InvalidArgument("policy file is for " + policy::mode_name(pc.space.mode) + " but --mode is " +
                          policy::mode_name(cfg.mode));
  }
  hash = policy::policy_hash(doc);
  return policy::make_state(pc);
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const FrameError*>(&e)) return kExitProtocol;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e)) return kExitIo;
  return kExitConfig;
}

std::string summarize(const policy::PolicyState& state) {
  std::ostringstream os;
  const std::size_t k = state.size();
  os << k << " sub-policies";
  const auto [lo, hi] = std::minmax_element(state.probabilities.begin(), state.probabilities.end());
  if (k > 0 && *hi - *lo <= 1e-15) {
    os << ", uniform " << std::setprecision(5) << *lo;
  } else if (k > 0) {
    os << ", p in [" << std::setprecision(5) << *lo << ", " << *hi << "]";
  }
  return os.str();
}

int cmd_simulate(const std::filesystem::path& bundle, const std::filesystem::path& out, std::uint64_t seed) {
  spdlog::info("physaug {} simulate seed={} bundle={}", kToolVersion, seed, bundle.string());
  const auto loaded = dataio::load_bundle(bundle);
  const auto traces = loaded.bundle.synthesize(seed);
  dataio::write_trace_csv(traces, out);
  spdlog::info("wrote {} sensor traces of {} frames to {}", traces.size(), loaded.bundle.dynamics.frames(),
               out.string());
  return kExitOk;
}

int cmd_augment(const RunConfig& cfg) {
  if (!cfg.out) throw InvalidArgument("--out is required");
  std::string hash;
  const policy::PolicyState state = state_for(cfg, hash);
  log_run(cfg, hash);
  BatchGenerator gen(load_dataset(cfg), cfg.batch, cfg.seed, cfg.workers);
  const std::size_t batches = cfg.max_batches > 0 ? cfg.max_batches : gen.batches_per_epoch();

  std::ofstream out(*cfg.out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + cfg.out->string());
  for (std::uint64_t k = 0; k < batches; ++k) {
    const auto msg = batch_message(gen.make(state, k));
    out.write(reinterpret_cast<const char*>(msg.data()), static_cast<std::streamsize>(msg.size()));
  }
  out.close();
  if (!out) throw IoError("write failed for " + cfg.out->string());
  spdlog::info("wrote {} batches ({} windows) to {}", batches, gen.data().size(), cfg.out->string());
  return kExitOk;
}

int cmd_serve(const RunConfig& cfg, const ServeHooks& hooks) {
  std::string hash;
  policy::PolicyState state = state_for(cfg, hash);
  log_run(cfg, hash);
  spdlog::info("initial policy: {}", summarize(state));
  BatchGenerator gen(load_dataset(cfg), cfg.batch, cfg.seed, cfg.workers);
  state = serve(gen, std::move(state), cfg, hooks);
  spdlog::info("final policy: {}", summarize(state));
  if (cfg.state_out) {
    std::ofstream out(*cfg.state_out, std::ios::trunc);
    if (!out) throw IoError("cannot write " + cfg.state_out->string());
    out << state_to_json(state).dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_policy_inspect(const std::filesystem::path& path, bool list, std::ostream& out) {
  const auto doc = read_policy_json(path);
  const auto state = policy::make_state(policy::parse_policy(doc));
  out << summarize(state) << '\n';
  if (list) {
    for (std::size_t i = 0; i < state.size(); ++i) {
      out << i << '\t' << std::setprecision(6) << state.probabilities[i] << '\t'
          << policy::describe(state.space, state.subpolicies[i]) << '\n';
    }
  }
  return kExitOk;
}

int cmd_policy_init(policy::Mode mode, const std::optional<std::filesystem::path>& path, std::ostream& stdout_stream) {
  const std::string text = policy::default_policy_json(mode).dump(2) + "\n";
  if (!path) {
    stdout_stream << text;
    return kExitOk;
  }
  std::ofstream out(*path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path->string());
  out << text;
  return kExitOk;
}

int cmd_fixture(const std::filesystem::path& out, std::uint64_t seed, std::size_t frames) {
  const auto b = fixtures::demo_bundle(seed, frames);
  dataio::save_bundle(b.bundle, b.labels, out);
  spdlog::info("wrote demo bundle ({} frames) to {}", frames, out.string());
  return kExitOk;
}

}  // namespace physaug::cli
