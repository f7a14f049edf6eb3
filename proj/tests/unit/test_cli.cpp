#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "physaug/cli.hpp"
#include "physaug/errors.hpp"
#include "physaug/fixtures.hpp"
#include "physaug/socket.hpp"
#include "physaug/trace_csv.hpp"

using namespace physaug;
using namespace physaug::cli;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "physaug_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_policy(policy::Mode mode) {
  const fs::path p = temp_path(policy::mode_name(mode) + ".json");
  std::ostringstream sink;
  cmd_policy_init(mode, p, sink);
  return p;
}

fs::path demo_path(std::size_t frames = 600) {
  const fs::path p = temp_path("demo" + std::to_string(frames) + ".json");
  if (!fs::exists(p)) cmd_fixture(p, 1, frames);
  return p;
}

RunConfig augment_config(policy::Mode mode, const fs::path& out) {
  RunConfig cfg;
  cfg.seed = 21;
  cfg.mode = mode;
  cfg.policy_path = write_policy(mode);
  cfg.bundle_path = demo_path();
  cfg.window = 100;
  cfg.stride = 25;
  cfg.batch = 8;
  cfg.out = out;
  return cfg;
}

std::vector<std::vector<std::uint8_t>> read_messages(const fs::path& p) {
  return dataio::split_messages(oracle::read_file(p.string()));
}

}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("policy inspect on the paper grids") {
    std::ostringstream out;
    CHECK(cmd_policy_inspect(write_policy(policy::Mode::Ppda), false, out) == kExitOk);
    CHECK(out.str() == "810 sub-policies, uniform 0.0012346\n");

    std::ostringstream listing;
    cmd_policy_inspect(write_policy(policy::Mode::Stda), true, listing);
    std::size_t lines = 0;
    std::string line;
    std::istringstream in(listing.str());
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 811);
    CHECK(listing.str().find("0\t0.00123457\tidentity") != std::string::npos);
  }

  TEST_CASE("summary of a trained state") {
    auto st = policy::make_state(policy::parse_policy(policy::default_policy_json(policy::Mode::Ppda)));
    const std::vector<policy::Reward> r{{3, 1.0}};
    st = policy::update_weights(st, r);
    CHECK(summarize(st).rfind("810 sub-policies, p in [", 0) == 0);
  }

  TEST_CASE("augment is byte-identical across runs and worker counts") {
    for (policy::Mode mode : {policy::Mode::Ppda, policy::Mode::Stda}) {
      auto cfg = augment_config(mode, temp_path("a.bin"));
      REQUIRE(cmd_augment(cfg) == kExitOk);
      cfg.out = temp_path("b.bin");
      REQUIRE(cmd_augment(cfg) == kExitOk);
      cfg.out = temp_path("c.bin");
      cfg.workers = 3;
      REQUIRE(cmd_augment(cfg) == kExitOk);
      cfg.out = temp_path("d.bin");
      cfg.seed = 22;
      REQUIRE(cmd_augment(cfg) == kExitOk);
      const auto a = oracle::read_file(temp_path("a.bin").string());
      CHECK(!a.empty());
      CHECK(a == oracle::read_file(temp_path("b.bin").string()));
      CHECK(a == oracle::read_file(temp_path("c.bin").string()));
      CHECK(a != oracle::read_file(temp_path("d.bin").string()));

      // One epoch over 21 windows in batches of 8.
      const auto msgs = read_messages(temp_path("a.bin"));
      REQUIRE(msgs.size() == 3);
      std::size_t windows = 0;
      for (const auto& m : msgs) {
        const auto bm = dataio::decode_batch_message(m);
        CHECK(bm.subpolicy < 810);
        CHECK(bm.batch.frames == 100);
        CHECK(bm.batch.channels == 12);
        for (auto l : bm.batch.labels) CHECK(l < 4);
        windows += bm.batch.count;
      }
      CHECK(windows == 21);
    }
  }

  TEST_CASE("augment from CSV traces") {
    const auto demo = dataio::load_bundle(demo_path());
    const fs::path csv = temp_path("demo.csv");
    REQUIRE(cmd_simulate(demo_path(), csv, 4) == kExitOk);
    const fs::path labels = temp_path("demo_labels.txt");
    {
      std::ofstream out(labels);
      for (auto l : demo.labels) out << l << '\n';
    }
    auto cfg = augment_config(policy::Mode::Stda, temp_path("csv.bin"));
    cfg.bundle_path.clear();
    cfg.trace_paths = {csv};
    cfg.labels_path = labels;
    cfg.max_batches = 5;
    REQUIRE(cmd_augment(cfg) == kExitOk);
    CHECK(read_messages(temp_path("csv.bin")).size() == 5);

    cfg.labels_path.clear();
    CHECK_THROWS_AS(cmd_augment(cfg), InvalidArgument);
  }

  TEST_CASE("mode mismatch and missing inputs are config errors") {
    auto cfg = augment_config(policy::Mode::Ppda, temp_path("x.bin"));
    cfg.policy_path = write_policy(policy::Mode::Stda);
    CHECK_THROWS_AS(cmd_augment(cfg), InvalidArgument);
    cfg = augment_config(policy::Mode::Ppda, temp_path("x.bin"));
    cfg.bundle_path = temp_path("nope.json");
    try {
      cmd_augment(cfg);
      FAIL("expected an error");
    } catch (const std::exception& e) {
      CHECK(exit_code_for(e) == kExitIo);
    }
    cfg = augment_config(policy::Mode::Ppda, temp_path("x.bin"));
    cfg.window = 5000;
    CHECK_THROWS_AS(cmd_augment(cfg), InvalidArgument);
  }

  TEST_CASE("simulate on a static fixture reads one g") {
    const auto still = fixtures::spin_bundle(0.0, 0.1, 100.0, 50);
    const fs::path bundle = temp_path("still.json");
    dataio::save_bundle(still.bundle, still.labels, bundle);
    const fs::path csv = temp_path("still.csv");
    REQUIRE(cmd_simulate(bundle, csv, 0) == kExitOk);
    const auto traces = dataio::read_trace_csv(csv);
    REQUIRE(traces.size() == 1);
    for (const auto& a : traces[0].accel) CHECK((a - quatkin::Vec3(0, 0, 9.80665)).norm() < 1e-12);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code_for(SchemaError("$.x", "bad")) == kExitConfig);
    CHECK(exit_code_for(InvalidArgument("bad")) == kExitConfig);
    CHECK(exit_code_for(LengthError("bad")) == kExitConfig);
    CHECK(exit_code_for(InvalidQuaternion("bad")) == kExitConfig);
    CHECK(exit_code_for(IoError("bad")) == kExitIo);
    CHECK(exit_code_for(ParseError(3, "bad")) == kExitIo);
    CHECK(exit_code_for(FrameError(FrameErrorKind::BadCrc, "bad")) == kExitProtocol);
  }
}

TEST_SUITE("serve") {
  TEST_CASE("a busy port is an I/O error") {
    const auto a = net::listen_local(0);
    CHECK_THROWS_AS(net::listen_local(net::local_port(a)), IoError);
  }

  TEST_CASE("client rewards shift the served policy") {
    RunConfig cfg;
    cfg.seed = 5;
    cfg.mode = policy::Mode::Ppda;
    cfg.window = 50;
    cfg.stride = 25;
    cfg.port = 0;
    cfg.max_batches = 100;
    cfg.batches_per_round = 10;
    cfg.bundle_path = demo_path(400);
    Dataset data = load_dataset(cfg);
    const BatchGenerator gen(std::move(data), 4, cfg.seed, 2);
    const auto initial = policy::make_state(policy::parse_policy(policy::default_policy_json(policy::Mode::Ppda)));

    const std::uint32_t target = 123;
    std::promise<std::uint16_t> port;
    std::vector<double> target_p{initial.probabilities[target]};
    std::size_t rewards_seen = 0;
    std::size_t rewarded_rounds = 0;
    ServeHooks hooks;
    hooks.on_listening = [&](std::uint16_t p) { port.set_value(p); };
    hooks.on_round = [&](const policy::PolicyState& st, std::size_t, std::span<const policy::Reward> r) {
      target_p.push_back(st.probabilities[target]);
      for (const auto& x : r) {
        CHECK(x.index == target);
        CHECK(x.value == 0.5);
      }
      rewards_seen += r.size();
      rewarded_rounds += r.empty() ? 0 : 1;
    };

    auto server = std::async(std::launch::async, [&] { return serve(gen, initial, cfg, hooks); });
    std::size_t batches = 0;
    {
      const auto client = net::connect_local(port.get_future().get());
      while (const auto msg = net::read_message(client)) {
        const auto bm = dataio::decode_batch_message(*msg);
        CHECK(bm.batch.frames == 50);
        CHECK(bm.batch.count <= 4);
        ++batches;
        const std::vector<dataio::RewardEntry> r{{target, 0.5f}};
        REQUIRE(net::write_all(client, dataio::frame_message(dataio::encode_rewards(r))));
      }
    }
    const auto final_state = server.get();

    CHECK(batches == 100);
    CHECK(rewards_seen == 100);
    for (std::size_t i = 1; i < target_p.size(); ++i) CHECK(target_p[i] >= target_p[i - 1]);
    // Each rewarded round multiplies the target weight by exp(lr * 0.5).
    const double w = std::exp(initial.learning_rate * 0.5 * static_cast<double>(rewarded_rounds));
    const double k = static_cast<double>(initial.size());
    const double expected = (1.0 - initial.floor) * w / (k - 1.0 + w) + initial.floor / k;
    CHECK(rewarded_rounds >= 10);
    CHECK(final_state.probabilities[target] == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("a malformed reward frame is a protocol error") {
    RunConfig cfg;
    cfg.mode = policy::Mode::Ppda;
    cfg.window = 50;
    cfg.port = 0;
    cfg.max_batches = 0;
    cfg.bundle_path = demo_path(400);
    const BatchGenerator gen(load_dataset(cfg), 2, 0, 1);
    const auto st = policy::make_state(policy::parse_policy(policy::default_policy_json(policy::Mode::Ppda)));
    std::promise<std::uint16_t> port;
    ServeHooks hooks;
    hooks.on_listening = [&](std::uint16_t p) { port.set_value(p); };
    auto server = std::async(std::launch::async, [&] { return serve(gen, st, cfg, hooks); });
    const auto client = net::connect_local(port.get_future().get());
    REQUIRE(net::read_message(client));
    const std::vector<std::uint8_t> junk{'J', 'U', 'N', 'K', 1, 0, 0, 0, 0, 0};
    REQUIRE(net::write_all(client, dataio::frame_message(junk)));
    try {
      server.get();
      FAIL("expected a protocol error");
    } catch (const FrameError& e) {
      CHECK(exit_code_for(e) == kExitProtocol);
    }
  }
}
