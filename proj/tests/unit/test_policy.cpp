#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "physaug/errors.hpp"
#include "physaug/fixtures.hpp"
#include "physaug/policy_config.hpp"

using namespace physaug;
using namespace physaug::policy;

namespace {

PolicyState paper_state(Mode mode) { return make_state(parse_policy(default_policy_json(mode))); }

SubPolicy choose(std::optional<std::size_t> a, std::optional<std::size_t> s, std::optional<std::size_t> p,
                 std::optional<std::size_t> h) {
  SubPolicy sp;
  sp.choice = {a, s, p, h};
  return sp;
}

stda::SignalWindow random_window(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  stda::SignalWindow w;
  w.data.resize(100, 12);
  for (Eigen::Index i = 0; i < w.data.size(); ++i) w.data.data()[i] = n(rng);
  w.label = 2;
  return w;
}

}  // namespace

TEST_SUITE("construction") {
  TEST_CASE("paper grids give 810 uniform sub-policies in both modes") {
    for (Mode mode : {Mode::Ppda, Mode::Stda}) {
      const auto st = paper_state(mode);
      CHECK(st.size() == 810);
      CHECK(st.space.options[0].size() == 8);
      CHECK(st.space.options[1].size() == 8);
      CHECK(st.space.options[2].size() == 1);
      CHECK(st.space.options[3].size() == 4);
      CHECK(st.subpolicies.front().is_identity());
      double sum = 0.0;
      for (double p : st.probabilities) {
        CHECK(std::abs(p - 1.0 / 810.0) <= 1e-15);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
      // Every combination appears once.
      for (std::size_t i = 0; i < st.size(); ++i) {
        for (std::size_t j = i + 1; j < st.size(); j += 97) CHECK_FALSE(st.subpolicies[i] == st.subpolicies[j]);
      }
    }
  }

  TEST_CASE("empty grids give the single identity sub-policy") {
    PolicySpace space;
    const auto st = build_combinatorial(space);
    REQUIRE(st.size() == 1);
    CHECK(st.subpolicies[0].is_identity());
    CHECK(st.probabilities[0] == 1.0);
  }

  TEST_CASE("binary policy") {
    const auto space = paper_state(Mode::Ppda).space;
    const auto st = build_binary(space, choose(0, std::nullopt, std::nullopt, std::nullopt));
    REQUIRE(st.size() == 2);
    CHECK(st.probabilities[0] == 0.5);
    CHECK(st.probabilities[1] == 0.5);
    CHECK(st.subpolicies[0].is_identity());
    CHECK_THROWS_AS(build_binary(space, SubPolicy{}), InvalidArgument);
    CHECK_THROWS_AS(build_binary(space, choose(40, std::nullopt, std::nullopt, std::nullopt)), InvalidArgument);

    std::size_t identity = 0;
    for (std::uint64_t seed = 0; seed < 100000; ++seed) identity += sample(st, seed) == 0 ? 1 : 0;
    CHECK(std::abs(static_cast<double>(identity) / 100000.0 - 0.5) < 0.01);
  }

  TEST_CASE("binary document") {
    auto doc = default_policy_json(Mode::Stda);
    doc["kind"] = "binary";
    doc["binary"] = {{"jitter", 2}};
    const auto st = make_state(parse_policy(doc));
    REQUIRE(st.size() == 2);
    CHECK(st.probabilities[0] == 0.5);
    CHECK(*st.subpolicies[1].choice[3] == 2);
    CHECK(describe(st.space, st.subpolicies[1]) == "jitter:jitter(sigma=0.15)");
  }

  TEST_CASE("schema errors name the field") {
    auto doc = default_policy_json(Mode::Ppda);
    doc.erase("categories");
    CHECK_THROWS_WITH_AS(parse_policy(doc), doctest::Contains("$.categories"), SchemaError);

    doc = default_policy_json(Mode::Ppda);
    doc["categories"]["amplitude"][0]["sigma"] = "big";
    CHECK_THROWS_WITH_AS(parse_policy(doc), doctest::Contains("$.categories.amplitude[0].sigma"), SchemaError);

    doc = default_policy_json(Mode::Ppda);
    doc["categories"]["rotation"] = nlohmann::json::array();
    CHECK_THROWS_AS(parse_policy(doc), SchemaError);

    doc = default_policy_json(Mode::Stda);
    doc["categories"]["rotation"][0]["method"] = "perturb";
    CHECK_THROWS_AS(parse_policy(doc), SchemaError);

    doc = default_policy_json(Mode::Ppda);
    doc["kind"] = "binary";
    CHECK_THROWS_WITH_AS(parse_policy(doc), doctest::Contains("$.binary"), SchemaError);
    doc["binary"] = {{"speed", 8}};
    CHECK_THROWS_AS(parse_policy(doc), SchemaError);

    doc = default_policy_json(Mode::Ppda);
    doc["mode"] = "fancy";
    CHECK_THROWS_AS(parse_policy(doc), SchemaError);
  }

  TEST_CASE("policy hash is stable and content sensitive") {
    const auto a = default_policy_json(Mode::Ppda);
    auto b = a;
    CHECK(policy_hash(a) == policy_hash(b));
    CHECK(policy_hash(a).size() == 8);
    b["learning_rate"] = 0.2;
    CHECK(policy_hash(a) != policy_hash(b));
  }
}

TEST_SUITE("sampling") {
  TEST_CASE("deterministic and degenerate draws") {
    const auto st = paper_state(Mode::Ppda);
    CHECK(sample(st, 42) == sample(st, 42));
    const std::vector<double> point{1.0, 0.0, 0.0};
    for (std::uint64_t seed = 0; seed < 1000; ++seed) CHECK(sample_from(point, seed) == 0);
    const std::vector<double> last{0.0, 0.0, 1.0};
    for (std::uint64_t seed = 0; seed < 1000; ++seed) CHECK(sample_from(last, seed) == 2);
  }

  TEST_CASE("810-way sampling passes a chi-square uniformity test") {
    const auto st = paper_state(Mode::Ppda);
    std::vector<std::uint64_t> counts(st.size(), 0);
    for (std::uint64_t seed = 0; seed < 1000000; ++seed) ++counts[sample(st, seed)];
    const double stat = oracle::chi2_uniform(counts);
    CHECK(oracle::chi2_upper_tail(stat, static_cast<double>(st.size() - 1)) > 0.001);
  }

  TEST_CASE("non-uniform probabilities are honoured") {
    const std::vector<double> p{0.1, 0.6, 0.3};
    std::array<int, 3> counts{};
    for (std::uint64_t seed = 0; seed < 100000; ++seed) ++counts[sample_from(p, seed)];
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(counts[i] / 100000.0 - p[i]) < 0.01);
  }
}

TEST_SUITE("weights") {
  TEST_CASE("empty rewards leave the state alone") {
    const auto st = paper_state(Mode::Ppda);
    const auto next = update_weights(st, {});
    CHECK(next.probabilities == st.probabilities);
  }

  TEST_CASE("a positive reward raises that probability") {
    const auto st = paper_state(Mode::Ppda);
    const std::vector<Reward> r{{5, 0.5}};
    const auto next = update_weights(st, r);
    CHECK(next.probabilities[5] > st.probabilities[5]);
    CHECK(next.probabilities[6] < st.probabilities[6]);
  }

  TEST_CASE("update matches the exponentiated-gradient formula") {
    PolicySpace space;
    space.options[3] = {NoiseBias{0.1, 1.0}, NoiseBias{0.2, 1.0}};
    auto st = build_combinatorial(space);
    st.learning_rate = 0.5;
    st.floor = 0.1;
    const std::vector<Reward> r{{1, 0.4}, {1, 0.2}, {2, -1.0}};
    const auto next = update_weights(st, r);
    std::array<double, 3> w{1.0 / 3, std::exp(0.5 * 0.3) / 3, std::exp(-0.5) / 3};
    const double sum = w[0] + w[1] + w[2];
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(next.probabilities[i] == doctest::Approx(0.9 * w[i] / sum + 0.1 / 3).epsilon(1e-12));
    }
  }

  TEST_CASE("probabilities stay normalized and above the floor") {
    auto st = paper_state(Mode::Ppda);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 5.0);
    for (int round = 0; round < 300; ++round) {
      std::vector<Reward> r;
      for (int i = 0; i < 20; ++i) r.push_back({rng() % st.size(), n(rng) + (i == 0 ? 50.0 : 0.0)});
      st = update_weights(st, r);
      double sum = 0.0;
      for (std::size_t i = 0; i < st.size(); ++i) {
        REQUIRE(st.weights[i] > 0.0);
        REQUIRE(st.probabilities[i] >= st.floor / static_cast<double>(st.size()) - 1e-18);
        sum += st.probabilities[i];
      }
      REQUIRE(std::abs(sum - 1.0) < 1e-12);
    }
  }

  TEST_CASE("bad rewards are rejected") {
    const auto st = paper_state(Mode::Ppda);
    const std::vector<Reward> nan{{0, std::nan("")}};
    const std::vector<Reward> out_of_range{{810, 1.0}};
    CHECK_THROWS_AS(update_weights(st, nan), InvalidArgument);
    CHECK_THROWS_AS(update_weights(st, out_of_range), InvalidArgument);
  }

  TEST_CASE("three-arm bandit concentrates on the best arm") {
    PolicySpace space;
    space.options[3] = {NoiseBias{0.1, 1.0}, NoiseBias{0.2, 1.0}};
    const std::array<double, 3> means{0.0, 0.1, 0.3};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto st = build_combinatorial(space);
      st.learning_rate = 0.5;
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> noise(0.0, 0.1);
      for (std::uint64_t round = 0; round < 200; ++round) {
        const std::size_t arm = sample(st, seed * 1000003 + round);
        const std::vector<Reward> r{{arm, means[arm] + noise(rng)}};
        st = update_weights(st, r);
      }
      CHECK(st.probabilities[2] > 0.8);
    }
  }
}

TEST_SUITE("apply") {
  TEST_CASE("identity sub-policies") {
    const auto loaded = fixtures::demo_bundle(1, 400);
    const BundleWindow w{&loaded.bundle, 100, 100, 2};
    const auto ppda_space = paper_state(Mode::Ppda).space;
    const auto base = simulate_window(w, 9);
    const auto out = apply(ppda_space, SubPolicy{}, w, 9);
    CHECK(out.data == base.data);
    CHECK(out.label == 2);

    const auto stda_space = paper_state(Mode::Stda).space;
    const auto x = random_window(1);
    const auto y = apply(stda_space, SubPolicy{}, x, 4);
    CHECK(y.data == x.data);
    CHECK(y.label == x.label);
  }

  TEST_CASE("mode and input must agree") {
    const auto loaded = fixtures::demo_bundle(1, 200);
    const BundleWindow w{&loaded.bundle, 0, 100, 0};
    CHECK_THROWS_AS(apply(paper_state(Mode::Stda).space, SubPolicy{}, w, 0), InvalidArgument);
    CHECK_THROWS_AS(apply(paper_state(Mode::Ppda).space, SubPolicy{}, random_window(0), 0), InvalidArgument);
    const BundleWindow past{&loaded.bundle, 150, 100, 0};
    CHECK_THROWS_AS(apply(paper_state(Mode::Ppda).space, SubPolicy{}, past, 0), LengthError);
  }

  TEST_CASE("labels and shapes survive every sub-policy") {
    const auto loaded = fixtures::demo_bundle(2, 600);
    const auto ppda = paper_state(Mode::Ppda);
    const auto stda_state = paper_state(Mode::Stda);
    const auto x = random_window(3);
    for (std::size_t i = 0; i < 810; i += 13) {
      const BundleWindow w{&loaded.bundle, 200, 100, 3};
      const auto a = apply(ppda.space, ppda.subpolicies[i], w, i);
      CHECK(a.label == 3);
      CHECK(a.frames() == 100);
      CHECK(a.channels() == 12);
      CHECK(a.data.allFinite());
      const auto b = apply(stda_state.space, stda_state.subpolicies[i], x, i);
      CHECK(b.label == x.label);
      CHECK(b.frames() == 100);
      CHECK(b.data.allFinite());
      CHECK(apply(stda_state.space, stda_state.subpolicies[i], x, i).data == b.data);
    }
  }

  TEST_CASE("PPDA amplitude plus hardware equals the module operations in sequence") {
    const auto loaded = fixtures::demo_bundle(3, 400);
    const auto& b = loaded.bundle;
    PolicySpace space;
    space.mode = Mode::Ppda;
    space.options[0] = {MagnitudeScale{0.3}};
    space.options[3] = {NoiseBias{0.0, 1.0}};
    const SubPolicy sp = choose(0, std::nullopt, std::nullopt, 0);
    const std::uint64_t seed = 77;
    const BundleWindow w{&b, 50, 120, 1};
    const auto out = apply(space, sp, w, seed);

    const double alpha = stda::sample_scale_factor(0.3, category_seed(seed, Category::Amplitude));
    CHECK(alpha != 1.0);
    auto manual = b;
    manual.dynamics = ppda::scale_amplitude(b.dynamics.slice(50, 120), alpha);
    manual.hardware = ppda::hardware_perturb(ppda::complete_hardware(b.hardware, b.placement), 0.0, 1.0,
                                             category_seed(seed, Category::Hardware));
    const auto traces = manual.synthesize(synthesis_seed(seed));
    const auto expected = pack_traces(traces, 120, 1);
    CHECK(out.data == expected.data);
  }

  TEST_CASE("STDA order is magnitude, time, rotation, jitter") {
    PolicySpace space;
    space.mode = Mode::Stda;
    space.options[0] = {MagnitudeScale{0.4}};
    space.options[1] = {TimeScale{0.8, 0.8}};
    space.options[2] = {Rotation{180.0}};
    space.options[3] = {Jitter{0.1}};
    const auto x = random_window(5);
    const std::uint64_t seed = 5;
    const auto out = apply(space, choose(0, 0, 0, 0), x, seed);
    auto y = stda::magnitude_scale(x, 0.4, category_seed(seed, Category::Amplitude));
    y = stda::fit_length(stda::time_scale(y, 0.8), 100);
    y = stda::rotate_by(y, stda::random_rotation(category_seed(seed, Category::Placement), std::numbers::pi));
    y = stda::jitter(y, 0.1, category_seed(seed, Category::Hardware));
    CHECK(out.data == y.data);
  }
}
