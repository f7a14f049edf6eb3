#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "physaug/batch_frame.hpp"
#include "physaug/bundle_io.hpp"
#include "physaug/policy_config.hpp"
#include "physaug/windowing.hpp"

namespace physaug::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitProtocol = 4 };

/// Maps a library exception to the tool's exit code.
int exit_code_for(const std::exception& e);

struct RunConfig {
  std::uint64_t seed = 0;
  policy::Mode mode = policy::Mode::Ppda;
  std::filesystem::path policy_path;
  std::filesystem::path bundle_path;
  std::vector<std::filesystem::path> trace_paths;  // STDA input instead of a bundle
  std::filesystem::path labels_path;
  std::size_t window = 100;
  std::size_t stride = 25;
  std::size_t batch = 64;
  std::size_t max_batches = 0;  // 0: one pass over the windows (augment) / unbounded (serve)
  std::size_t workers = 1;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint16_t> port;
  std::size_t batches_per_round = 10;
  std::optional<std::filesystem::path> state_out;
};

/// Windows ready for augmentation: bundle spans (PPDA) or signal windows (STDA).
struct Dataset {
  policy::Mode mode = policy::Mode::Ppda;
  std::optional<dataio::LoadedBundle> bundle;
  std::vector<dataio::WindowSpan> spans;
  std::vector<stda::SignalWindow> windows;

  std::size_t size() const { return mode == policy::Mode::Ppda ? spans.size() : windows.size(); }
};

/// PPDA reads a bundle. STDA reads CSV traces plus labels, or synthesizes the
/// baseline traces of a bundle.
Dataset load_dataset(const RunConfig& cfg);

struct ProducedBatch {
  std::uint32_t subpolicy = 0;
  dataio::Batch batch;
};

/// Deterministic batch stream: batch k draws its sub-policy and per-window
/// seeds from (seed, k) only, and each epoch visits the windows in a
/// seed-derived order.
class BatchGenerator {
 public:
  BatchGenerator(Dataset data, std::size_t batch_size, std::uint64_t seed, std::size_t workers = 1);

  std::size_t batches_per_epoch() const;
  ProducedBatch make(const policy::PolicyState& state, std::uint64_t k) const;
  const Dataset& data() const { return data_; }

 private:
  std::vector<std::size_t> epoch_order(std::uint64_t epoch) const;

  Dataset data_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::size_t workers_;
};

/// Length-prefixed server-to-client message for one produced batch.
std::vector<std::uint8_t> batch_message(const ProducedBatch& b);

struct ServeHooks {
  std::function<void(std::uint16_t port)> on_listening;
  std::function<void(const policy::PolicyState&, std::size_t round, std::span<const policy::Reward>)> on_round;
};

/// Serves one client: streams batches, folds received rewards into the
/// policy at every round boundary. After the last batch the write side is
/// closed and rewards are read until the client hangs up. Returns the final
/// policy state.
policy::PolicyState serve(const BatchGenerator& gen, policy::PolicyState state, const RunConfig& cfg,
                          const ServeHooks& hooks = {});

nlohmann::json state_to_json(const policy::PolicyState& state);

// Subcommands. Each returns an exit code; diagnostics go to the log.
int cmd_simulate(const std::filesystem::path& bundle, const std::filesystem::path& out, std::uint64_t seed);
int cmd_augment(const RunConfig& cfg);
int cmd_serve(const RunConfig& cfg, const ServeHooks& hooks = {});
int cmd_policy_inspect(const std::filesystem::path& policy, bool list, std::ostream& out);
int cmd_policy_init(policy::Mode mode, const std::optional<std::filesystem::path>& out, std::ostream& stdout_stream);
int cmd_fixture(const std::filesystem::path& out, std::uint64_t seed, std::size_t frames);

/// "810 sub-policies, uniform 0.0012346" or a summary of a non-uniform state.
std::string summarize(const policy::PolicyState& state);

}  // namespace physaug::cli
