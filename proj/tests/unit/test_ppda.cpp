#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "physaug/errors.hpp"
#include "physaug/fixtures.hpp"
#include "physaug/ppda.hpp"

using namespace physaug;
using namespace physaug::ppda;
using quatkin::kGravity;

namespace {

constexpr double kPi = std::numbers::pi;

MotionSequence constant_angle_motion(double theta, const Vec3& axis, std::size_t frames = 10) {
  MotionSequence m;
  m.sample_rate_hz = 100.0;
  m.root_translation.assign(frames, Vec3(0.1, 0.2, 0.3));
  m.joint_orient.assign(frames, {quatkin::Quaternion::identity(), quatkin::axis_angle_compose(theta, axis)});
  return m;
}

bool same_motion(const MotionSequence& a, const MotionSequence& b) {
  return a.sample_rate_hz == b.sample_rate_hz && a.root_translation == b.root_translation &&
         a.joint_orient == b.joint_orient;
}

}  // namespace

TEST_SUITE("amplitude") {
  TEST_CASE("unit factor is a bit-exact no-op") {
    const auto d = fixtures::demo_bundle(1, 200).bundle.dynamics;
    CHECK(same_motion(scale_amplitude(d, 1.0), d));
    CHECK(same_motion(amplitude_scale(d, 0.0, 5), d));
    CHECK(same_motion(amplitude_warp(d, 0.0, 4, 5), d));
  }

  TEST_CASE("factor 1.25 on a 40 degree joint gives 50 degrees") {
    const Vec3 axis = Vec3(1, 2, -1).normalized();
    const auto out = scale_amplitude(constant_angle_motion(oracle::rad(40.0), axis), 1.25);
    for (std::size_t t = 0; t < out.frames(); ++t) {
      const auto aa = quatkin::axis_angle_decompose(out.joint_orient[t][1]);
      CHECK(aa.angle == doctest::Approx(oracle::rad(50.0)).epsilon(1e-12));
      CHECK((aa.axis - axis).norm() < 1e-12);
      CHECK(out.root_translation[t] == Vec3(0.1, 0.2, 0.3));
    }
  }

  TEST_CASE("factor 0 collapses to the identity pose") {
    const auto out = scale_amplitude(fixtures::demo_bundle(2, 100).bundle.dynamics, 0.0);
    for (const auto& frame : out.joint_orient) {
      for (const auto& q : frame) CHECK(oracle::same_rotation(q, quatkin::Quaternion::identity(), 1e-15));
    }
  }

  TEST_CASE("angles clamp at a half turn") {
    const auto out = scale_amplitude(constant_angle_motion(oracle::rad(150.0), Vec3::UnitY()), 1.5);
    CHECK(quatkin::axis_angle_decompose(out.joint_orient[0][1]).angle == doctest::Approx(kPi));
    const auto neg = scale_amplitude(constant_angle_motion(oracle::rad(30.0), Vec3::UnitY()), -1.0);
    CHECK(quatkin::axis_angle_decompose(neg.joint_orient[0][1]).angle == 0.0);
  }

  TEST_CASE("axes are preserved for random factors") {
    const auto d = fixtures::demo_bundle(3, 300).bundle.dynamics;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto out = amplitude_warp(d, 0.3, 4, seed);
      for (std::size_t t = 0; t < d.frames(); t += 7) {
        for (std::size_t j = 0; j < d.joints(); ++j) {
          const auto before = quatkin::axis_angle_decompose(d.joint_orient[t][j]);
          const auto after = quatkin::axis_angle_decompose(out.joint_orient[t][j]);
          if (before.angle > 1e-6 && after.angle > 1e-6) CHECK((before.axis - after.axis).norm() < 1e-9);
        }
      }
    }
  }

  TEST_CASE("joint mask limits the change") {
    const auto d = fixtures::demo_bundle(4, 300).bundle.dynamics;
    const auto out = scale_amplitude(d, 1.3, std::vector<std::size_t>{3});
    for (std::size_t t = 0; t < d.frames(); ++t) {
      for (std::size_t j = 0; j < d.joints(); ++j) {
        if (j == 3) continue;
        CHECK(oracle::same_rotation(out.joint_orient[t][j], d.joint_orient[t][j], 0.0));
      }
    }
    CHECK_THROWS_AS(scale_amplitude(d, 1.3, std::vector<std::size_t>{42}), InvalidArgument);
  }

  TEST_CASE("a constant warp curve equals scaling") {
    const auto d = fixtures::demo_bundle(5, 200).bundle.dynamics;
    CHECK(same_motion(warp_amplitude(d, stda::WarpCurve::constant(200, 1.25)), scale_amplitude(d, 1.25)));
    CHECK(same_motion(amplitude_scale(d, 0.2, 9), scale_amplitude(d, stda::sample_scale_factor(0.2, 9))));
  }

  TEST_CASE("static accelerometer norm survives amplitude transforms") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto b = fixtures::random_static_bundle(seed, 8).bundle;
      for (double alpha : {0.0, 0.5, 1.25, 2.0}) {
        b.dynamics = scale_amplitude(fixtures::random_static_bundle(seed, 8).bundle.dynamics, alpha);
        for (const auto& tr : b.synthesize(seed)) {
          for (const auto& a : tr.accel) CHECK(std::abs(a.norm() - kGravity) < 1e-6);
        }
      }
    }
  }
}

TEST_SUITE("speed") {
  TEST_CASE("beta 1 is the identity") {
    const auto d = fixtures::demo_bundle(6, 100).bundle.dynamics;
    CHECK(same_motion(speed_resample(d, UniformSpeed{1.0}), d));
    CHECK(same_motion(speed_resample(d, stda::WarpCurve::identity_time(100)), d));
    CHECK_THROWS_AS(speed_resample(d, UniformSpeed{0.0}), InvalidArgument);
    stda::WarpCurve bad = stda::WarpCurve::identity_time(100);
    bad.values[50] = 10.0;
    CHECK_THROWS_AS(speed_resample(d, bad), InvalidArgument);
    CHECK_THROWS_AS(speed_resample(d, stda::WarpCurve::identity_time(80)), InvalidArgument);
  }

  TEST_CASE("uniform resampling reads t*beta and holds the tail") {
    auto d = fixtures::spin_bundle(1.0, 0.2, 100.0, 50).bundle.dynamics;
    for (std::size_t t = 0; t < 50; ++t) d.root_translation[t] = Vec3(static_cast<double>(t), 0, 0);
    const auto fast = speed_resample(d, UniformSpeed{2.0});
    REQUIRE(fast.frames() == 50);
    CHECK(fast.root_translation[10] == Vec3(20, 0, 0));
    CHECK(fast.root_translation[40] == Vec3(49, 0, 0));
    const auto slow = speed_resample(d, UniformSpeed{0.5});
    CHECK(slow.root_translation[3].x() == doctest::Approx(1.5));
    CHECK(oracle::angle_between(slow.joint_orient[3][0], quatkin::axis_angle_compose(0.015, Vec3::UnitZ())) <
          1e-12);
  }

  TEST_CASE("doubling the speed doubles gyro and quadruples centripetal acceleration") {
    for (double omega : {1.0, 3.0}) {
      const double r = 0.2;
      auto b = fixtures::spin_bundle(omega, r, 100.0, 400).bundle;
      b.dynamics = speed_resample(b.dynamics, UniformSpeed{2.0});
      const auto tr = b.synthesize(0)[0];
      for (std::size_t t = 1; t < 198; ++t) {
        CHECK(tr.gyro[t].z() == doctest::Approx(2.0 * omega).epsilon(1e-2));
        const Vec3 dynamic = tr.accel[t] - Vec3(0, 0, kGravity);
        CHECK(dynamic.norm() == doctest::Approx(4.0 * omega * omega * r).epsilon(1e-2));
      }
    }
  }

  TEST_CASE("periodic motion peaks twice as early") {
    const std::size_t period = 80;
    // Small swing, so the gravity and tangential terms stay in phase at both speeds.
    auto b = fixtures::swing_bundle(oracle::rad(20.0), period, 50.0, 2 * period).bundle;
    const auto base = b.synthesize(0)[0];
    const auto fast_motion = speed_resample(b.dynamics, UniformSpeed{2.0});
    for (std::size_t t = 0; t < period; ++t) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(oracle::same_rotation(fast_motion.joint_orient[t][j], b.dynamics.joint_orient[2 * t][j], 0.0));
      }
    }
    b.dynamics = fast_motion;
    const auto fast = b.synthesize(0)[0];
    auto first_peak = [](const quatkin::SensorTrace& tr, std::size_t limit) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < limit; ++t) {
        if (tr.accel[t].z() > tr.accel[best].z()) best = t;
      }
      return best;
    };
    CHECK(first_peak(base, period / 2) == 20);
    CHECK(first_peak(fast, period / 4) == 10);
  }
}

TEST_SUITE("placement") {
  TEST_CASE("zero ranges leave placements alone") {
    const auto p = fixtures::demo_bundle(7, 10).bundle.placement;
    PlacementPerturbConfig cfg;
    cfg.orient_range_deg = Vec3::Zero();
    const auto out = placement_perturb(p, cfg, 3);
    for (std::size_t i = 0; i < p.sensors.size(); ++i) {
      CHECK(out.sensors[i].rel_orient == p.sensors[i].rel_orient);
      CHECK(out.sensors[i].rel_pos == p.sensors[i].rel_pos);
    }
  }

  TEST_CASE("a forced x flip composes the exact half turn") {
    PlacementOffset off;
    off.flips = {true, false, false};
    CHECK(off.rotation() == quatkin::Quaternion{0, 1, 0, 0});

    const auto p = fixtures::demo_bundle(8, 10).bundle.placement;
    PlacementPerturbConfig cfg;
    cfg.orient_range_deg = Vec3::Zero();
    cfg.flip_axes = {0};
    cfg.flip_probability = 1.0;
    const auto out = placement_perturb(p, cfg, 1);
    for (std::size_t i = 0; i < p.sensors.size(); ++i) {
      const auto expected = p.sensors[i].rel_orient * quatkin::Quaternion{0, 1, 0, 0};
      CHECK(oracle::same_rotation(out.sensors[i].rel_orient, expected, 1e-15));
    }
  }

  TEST_CASE("sampled offsets stay inside their ranges") {
    PlacementPerturbConfig cfg;
    cfg.axial_range_deg = 90.0;
    cfg.flip_axes = {0, 1, 2};
    std::array<int, 3> flips{};
    Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      const auto off = sample_placement_offset(cfg, seed, "RLA");
      lo = lo.cwiseMin(off.euler_deg);
      hi = hi.cwiseMax(off.euler_deg);
      CHECK(std::abs(off.axial_deg) <= 90.0);
      for (std::size_t a = 0; a < 3; ++a) flips[a] += off.flips[a] ? 1 : 0;
    }
    CHECK(lo.minCoeff() >= -25.0);
    CHECK(hi.maxCoeff() <= 25.0);
    CHECK(lo.maxCoeff() < -24.0);
    CHECK(hi.minCoeff() > 24.0);
    for (int f : flips) CHECK(std::abs(f - 5000) < 300);
  }

  TEST_CASE("the offset is applied in the sensor frame") {
    const auto p = fixtures::demo_bundle(9, 10).bundle.placement;
    PlacementPerturbConfig cfg;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto out = placement_perturb(p, cfg, seed);
      for (std::size_t i = 0; i < p.sensors.size(); ++i) {
        const auto off = sample_placement_offset(cfg, seed, p.sensors[i].sensor_id);
        const Eigen::Matrix3d expected = oracle::to_eigen(p.sensors[i].rel_orient).toRotationMatrix() *
                                         oracle::zyx(oracle::rad(off.euler_deg.z()), oracle::rad(off.euler_deg.y()),
                                                     oracle::rad(off.euler_deg.x()));
        CHECK((out.sensors[i].rel_orient.to_matrix() - expected).norm() < 1e-12);
        CHECK(out.sensors[i].rel_pos == p.sensors[i].rel_pos);
      }
    }
    cfg.orient_range_deg = Vec3(-1, 0, 0);
    CHECK_THROWS_AS(placement_perturb(p, cfg, 0), InvalidArgument);
  }

  TEST_CASE("placement swap") {
    const auto a = fixtures::demo_bundle(10, 50).bundle;
    auto b = fixtures::demo_bundle(11, 50).bundle;
    b.placement.sensors[0].rel_orient = quatkin::from_euler_zyx(0.3, -0.2, 1.0);
    b.placement.sensors[0].rel_pos = Vec3(0.01, 0.02, -0.2);

    const auto self = placement_swap(a, a);
    CHECK(self.placement.sensors[0].rel_orient == a.placement.sensors[0].rel_orient);

    const auto swapped = placement_swap(a, b);
    CHECK(swapped.placement.sensors[0].rel_orient == b.placement.sensors[0].rel_orient);
    CHECK(swapped.dynamics.joint_orient == a.dynamics.joint_orient);
    const auto back = placement_swap(swapped, a);
    for (std::size_t i = 0; i < a.placement.sensors.size(); ++i) {
      CHECK(back.placement.sensors[i].rel_orient == a.placement.sensors[i].rel_orient);
      CHECK(back.placement.sensors[i].rel_pos == a.placement.sensors[i].rel_pos);
      CHECK(back.placement.sensors[i].joint == a.placement.sensors[i].joint);
    }

    auto c = b;
    c.body.joints[3].name = "r_wrist";
    CHECK_THROWS_WITH_AS(placement_swap(a, c), doctest::Contains("RLA"), InvalidArgument);
  }

  TEST_CASE("swapped static placement reads gravity through the donor orientation") {
    auto a = fixtures::random_static_bundle(1, 6).bundle;
    auto b = a;
    b.placement.sensors[0].rel_orient = quatkin::from_euler_zyx(1.0, 0.4, -0.7);
    const auto tr = placement_swap(a, b).synthesize(0)[0];
    const auto pose = quatkin::forward_kinematics(a.body, a.dynamics, 0)[a.placement.sensors[0].joint];
    const Eigen::Matrix3d r = pose.orientation.to_matrix() * b.placement.sensors[0].rel_orient.to_matrix();
    const Vec3 expected = r.transpose() * Vec3(0, 0, kGravity);
    for (const auto& acc : tr.accel) CHECK((acc - expected).norm() < 1e-9);
  }
}

TEST_SUITE("hardware") {
  TEST_CASE("zero choice gives an ideal profile") {
    const auto h = hardware_perturb(fixtures::demo_bundle(12, 10).bundle.hardware, 0.0, 0.0, 4);
    for (const auto& [id, hw] : h.sensors) {
      CHECK(hw.accel.sigma.isZero(0.0));
      CHECK(hw.accel.bias.isZero(0.0));
      CHECK(hw.gyro.sigma.isZero(0.0));
      CHECK(hw.gyro.bias.isZero(0.0));
    }
  }

  TEST_CASE("bias draws stay in range and sigma takes the grid value") {
    quatkin::HardwareProfile base;
    base.sensors["a"] = {};
    double lo = 0.0, hi = 0.0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      const auto h = hardware_perturb(base, 0.15, 1.0, seed);
      const auto& hw = h.sensors.at("a");
      lo = std::min({lo, hw.accel.bias.minCoeff(), hw.gyro.bias.minCoeff()});
      hi = std::max({hi, hw.accel.bias.maxCoeff(), hw.gyro.bias.maxCoeff()});
      REQUIRE(hw.accel.sigma == Vec3::Constant(0.15));
    }
    CHECK(lo >= -1.0);
    CHECK(hi <= 1.0);
    CHECK(lo < -0.99);
    CHECK(hi > 0.99);
    for (double sigma : {0.05, 0.1, 0.15, 0.2}) CHECK_NOTHROW(hardware_perturb(base, sigma, 1.0, 0));
    CHECK_THROWS_AS(hardware_perturb(base, -0.1, 1.0, 0), InvalidArgument);
  }

  TEST_CASE("placement and hardware perturbations commute") {
    const auto b = fixtures::demo_bundle(13, 120).bundle;
    PlacementPerturbConfig cfg;
    cfg.flip_axes = {1};
    const auto placed = placement_perturb(b.placement, cfg, 7);
    const auto hw = hardware_perturb(complete_hardware(b.hardware, b.placement), 0.1, 1.0, 8);

    auto first = b;
    first.placement = placed;
    first.hardware = hardware_perturb(complete_hardware(first.hardware, first.placement), 0.1, 1.0, 8);
    auto second = b;
    second.hardware = hw;
    second.placement = placement_perturb(second.placement, cfg, 7);

    const auto x = first.synthesize(3);
    const auto y = second.synthesize(3);
    for (std::size_t s = 0; s < x.size(); ++s) {
      CHECK(x[s].accel == y[s].accel);
      CHECK(x[s].gyro == y[s].gyro);
    }
  }
}
