#include <chrono>

#include <spdlog/spdlog.h>

#include "physaug/cli.hpp"
#include "physaug/errors.hpp"
#include "physaug/socket.hpp"

namespace physaug::cli {

namespace {

constexpr std::chrono::milliseconds kDrainTimeout{5000};

// Drains every reward frame already waiting on the socket. Returns false
// once the client has disconnected.
bool drain_rewards(const net::Socket& client, const policy::PolicyState& state, std::vector<policy::Reward>& pending) {
  while (net::readable(client, std::chrono::milliseconds(0))) {
    const auto msg = net::read_message(client);
    if (!msg) return false;
    for (const auto& e : dataio::decode_rewards(*msg)) {
      if (e.index >= state.size()) {
        throw FrameError(FrameErrorKind::Oversized, "reward for unknown sub-policy " + std::to_string(e.index));
      }
      spdlog::info("reward index={} value={}", e.index, e.reward);
      pending.push_back({e.index, static_cast<double>(e.reward)});
    }
  }
  return true;
}

}  // namespace

nlohmann::json state_to_json(const policy::PolicyState& state) {
  nlohmann::json j;
  j["mode"] = policy::mode_name(state.space.mode);
  j["kind"] = state.kind == policy::Kind::Binary ? "binary" : "combinatorial";
  j["learning_rate"] = state.learning_rate;
  j["floor"] = state.floor;
  nlohmann::json subs = nlohmann::json::array();
  for (std::size_t i = 0; i < state.size(); ++i) {
    subs.push_back({{"index", i},
                    {"description", policy::describe(state.space, state.subpolicies[i])},
                    {"weight", state.weights[i]},
                    {"probability", state.probabilities[i]}});
  }
  j["subpolicies"] = subs;
  return j;
}

policy::PolicyState serve(const BatchGenerator& gen, policy::PolicyState state, const RunConfig& cfg,
                          const ServeHooks& hooks) {
  if (cfg.batches_per_round == 0) throw InvalidArgument("--round must be at least 1");
  const net::Socket listener = net::listen_local(cfg.port.value_or(0));
  const std::uint16_t port = net::local_port(listener);
  spdlog::info("listening on 127.0.0.1:{}", port);
  if (hooks.on_listening) hooks.on_listening(port);

  const net::Socket client = net::accept_client(listener);
  spdlog::info("client connected");

  std::vector<policy::Reward> pending;
  std::size_t round = 0;
  bool connected = true;
  for (std::uint64_t k = 0; cfg.max_batches == 0 || k < cfg.max_batches; ++k) {
    const ProducedBatch b = gen.make(state, k);
    if (!net::write_all(client, batch_message(b)) || !drain_rewards(client, state, pending)) {
      connected = false;
      break;
    }
    if ((k + 1) % cfg.batches_per_round == 0) {
      state = policy::update_weights(state, pending);
      spdlog::info("round {} applied {} rewards", round, pending.size());
      if (hooks.on_round) hooks.on_round(state, round, pending);
      pending.clear();
      ++round;
    }
  }
  if (connected) {
    // Signal the end of the stream, then collect rewards for the last
    // batches until the client hangs up.
    net::shutdown_write(client);
    while (net::readable(client, kDrainTimeout) && drain_rewards(client, state, pending)) {
    }
  }
  // Rewards that arrived after the last full round still count.
  if (!pending.empty()) {
    state = policy::update_weights(state, pending);
    if (hooks.on_round) hooks.on_round(state, round, pending);
  }
  spdlog::info("session finished");
  return state;
}

}  // namespace physaug::cli
