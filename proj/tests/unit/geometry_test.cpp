#include "capserv/geometry.hpp"

#include <doctest.h>

#include <random>

#include "../testlib/generators.hpp"
#include "../testlib/oracles.hpp"
#include "capserv/rng.hpp"

using namespace capserv;

namespace {

LimbModel long_cylinder(double radius) {
  return LimbModel({LimbSegment(Vec3(-50.0, 0.0, 0.0), Vec3::UnitX(), 100.0, radius, radius)});
}

}  // namespace

TEST_CASE("segment and limb invariants are enforced") {
  CHECK_THROWS_AS(LimbSegment(Vec3::Zero(), Vec3(1.0, 1.0, 0.0), 10.0, 1.0, 1.0),
                  std::invalid_argument);  // non-unit axis
  CHECK_THROWS_AS(LimbSegment(Vec3::Zero(), Vec3::UnitX(), -1.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(LimbSegment(Vec3::Zero(), Vec3::UnitX(), 10.0, 0.0, 1.0),
                  std::invalid_argument);

  LimbSegment a(Vec3::Zero(), Vec3::UnitX(), 10.0, 2.0, 2.0);
  LimbSegment detached(Vec3(11.0, 0.0, 0.0), Vec3::UnitX(), 10.0, 2.0, 2.0);
  CHECK_THROWS_AS(LimbModel({a, detached}), std::invalid_argument);

  LimbSegment b(a.tip(), Vec3::UnitX(), 10.0, 2.0, 2.0);
  CHECK_THROWS_AS(LimbModel({a, b}, /*joint_angle=*/3.0), std::invalid_argument);
  CHECK_NOTHROW(LimbModel({a, b}));
}

TEST_CASE("k* on a cylinder is the top of the circular cross section") {
  const LimbModel limb = long_cylinder(3.0);
  const Vec3 k = surface_point_k_star(limb, Vec3(10.0, 2.0, 8.0));
  CHECK(k.x() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(k.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(k.z() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("k* interpolates the frustum radius linearly") {
  const LimbModel limb(
      {LimbSegment(Vec3::Zero(), Vec3::UnitX(), 60.0, 5.0, 3.0)});
  const Vec3 k = surface_point_k_star(limb, Vec3(30.0, 0.0, 10.0));
  CHECK(k.isApprox(Vec3(30.0, 0.0, 4.0), 1e-12));
}

TEST_CASE("k* requires a non-vertical axis") {
  const LimbModel vertical({LimbSegment(Vec3::Zero(), Vec3::UnitZ(), 30.0, 3.0, 3.0)});
  CHECK_THROWS_AS(surface_point_k_star(vertical, Vec3(5.0, 0.0, 10.0)), DegenerateAxisError);
}

TEST_CASE("k* matches the dense sampling oracle on bent limbs") {
  auto rng = substream(11, "geometry/kstar");
  for (int i = 0; i < 10; ++i) {
    const LimbModel limb = testgen::random_bent_limb(rng);
    const auto samples = oracles::sample_limb_surface(limb.segments(), 200000);
    for (int q = 0; q < 3; ++q) {
      const Vec3 query = testgen::random_sensor_point(limb, rng);
      const Vec3 analytic = surface_point_k_star(limb, query);
      const auto sampled = oracles::k_star_by_sampling(limb.segments(), samples, query);
      REQUIRE(sampled.has_value());
      CHECK((analytic - *sampled).norm() < 3.0 * samples.spacing);
    }
  }
}

TEST_CASE("relative pose above a cylinder") {
  const LimbModel limb = long_cylinder(3.0);
  EEPose ee;
  ee.position = Vec3(10.0, 1.0, 8.0);
  const RelativePose p = relative_pose(limb, ee);
  CHECK(p.dy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.dz == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(p.ty == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.tz == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pitch is measured against the frustum surface, not the axis") {
  const LimbModel limb({LimbSegment(Vec3::Zero(), Vec3::UnitX(), 60.0, 5.0, 3.0)});
  EEPose ee;
  ee.position = Vec3(30.0, 0.0, 10.0);  // parallel to the axis above the taper
  const RelativePose p = relative_pose(limb, ee);
  CHECK(p.ty == doctest::Approx(-std::atan(2.0 / 60.0)).epsilon(1e-9));
}

TEST_CASE("pure yaw shows up only in tz") {
  const LimbModel limb = long_cylinder(3.0);
  EEPose ee;
  ee.position = Vec3(10.0, 1.0, 8.0);
  ee.rpy = Vec3(0.0, 0.0, 0.2);
  const RelativePose p = relative_pose(limb, ee);
  CHECK(p.tz == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p.dy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.dz == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(p.ty == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("signed clearance on simple shapes") {
  const LimbModel limb = long_cylinder(3.0);
  CHECK(signed_clearance(limb, Vec3(0.0, 0.0, 8.0)) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::abs(signed_clearance(limb, Vec3(0.0, 0.0, 3.0))) < 1e-9);  // on the surface
  CHECK(signed_clearance(limb, Vec3(0.0, 0.0, 0.0)) == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("signed clearance matches the sampling oracle") {
  auto rng = substream(12, "geometry/clearance");
  std::uniform_real_distribution<double> box(-15.0, 15.0);
  for (int i = 0; i < 8; ++i) {
    const LimbModel limb = testgen::random_bent_limb(rng);
    const auto samples = oracles::sample_limb_surface(limb.segments(), 200000);
    const Vec3 center = limb.segments()[0].tip();
    for (int q = 0; q < 5; ++q) {
      const Vec3 query = center + Vec3(box(rng), box(rng), box(rng));
      const double analytic = signed_clearance(limb, query);
      const double sampled = oracles::clearance_by_sampling(limb.segments(), samples, query);
      CHECK(std::abs(analytic - sampled) < 3.0 * samples.spacing);
    }
  }
}

TEST_CASE("articulation rotates segment 2 about the joint") {
  LimbSegment s1(Vec3::Zero(), Vec3::UnitX(), 20.0, 3.0, 3.0);
  LimbSegment s2(s1.tip(), Vec3::UnitX(), 20.0, 3.0, 3.0);
  const LimbModel straight({s1, s2});

  const LimbModel zero = articulate(straight, 0.0, JointPlane::horizontal);
  CHECK(zero.segments()[0].axis.dot(zero.segments()[1].axis) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const LimbModel right = articulate(straight, M_PI / 2.0, JointPlane::horizontal);
  CHECK(std::abs(right.segments()[0].axis.dot(right.segments()[1].axis)) < 1e-9);

  // The joint endpoint is invariant under articulation.
  CHECK(right.segments()[1].base.isApprox(s1.tip(), 1e-12));
  CHECK(right.segments()[0].tip().isApprox(s1.tip(), 1e-12));

  CHECK_THROWS_AS(articulate(straight, 2.5, JointPlane::horizontal), std::invalid_argument);
  CHECK_THROWS_AS(articulate(straight, -0.1, JointPlane::vertical), std::invalid_argument);
}

TEST_CASE("vertical articulation bends toward the ground") {
  LimbSegment s1(Vec3::Zero(), Vec3::UnitX(), 20.0, 3.0, 3.0);
  LimbSegment s2(s1.tip(), Vec3::UnitX(), 20.0, 3.0, 3.0);
  const LimbModel bent = articulate(LimbModel({s1, s2}), M_PI / 6.0, JointPlane::vertical);
  CHECK(bent.segments()[1].axis.z() == doctest::Approx(-std::sin(M_PI / 6.0)).epsilon(1e-12));
}

TEST_CASE("k* is invariant under shared rigid horizontal translation") {
  auto rng = substream(13, "geometry/translate");
  std::uniform_real_distribution<double> shift(-20.0, 20.0);
  for (int i = 0; i < 20; ++i) {
    const LimbModel limb = testgen::random_bent_limb(rng);
    const Vec3 query = testgen::random_sensor_point(limb, rng);
    const Vec3 delta(shift(rng), shift(rng), 0.0);

    std::vector<LimbSegment> moved = limb.segments();
    for (auto& seg : moved) seg.base += delta;
    const LimbModel shifted(moved, limb.joint_angle());

    const Vec3 k1 = surface_point_k_star(limb, query);
    const Vec3 k2 = surface_point_k_star(shifted, query + delta);
    CHECK((k2 - (k1 + delta)).norm() < 1e-9);
  }
}

TEST_CASE("k* lies on the surface within the cross-section plane") {
  auto rng = substream(14, "geometry/surface");
  for (int i = 0; i < 40; ++i) {
    const LimbModel limb =
        (i % 2 == 0) ? testgen::random_straight_limb(rng) : testgen::random_bent_limb(rng);
    const Vec3 query = testgen::random_sensor_point(limb, rng);
    const KStarFrame f = k_star_frame(limb, query);
    CHECK(std::abs(f.axis_x.dot(f.k_star - f.k0)) < 1e-9);
    CHECK(std::abs(signed_clearance(limb, f.k_star)) < 1e-6);
  }
}

TEST_CASE("pose_at_offset round-trips through relative_pose") {
  auto rng = substream(15, "geometry/roundtrip");
  std::uniform_real_distribution<double> dy(-8.0, 8.0);
  std::uniform_real_distribution<double> dz(1.0, 12.0);
  std::uniform_real_distribution<double> ang(-M_PI / 8.0, M_PI / 8.0);
  std::uniform_real_distribution<double> station(5.0, 55.0);

  for (int i = 0; i < 50; ++i) {
    const LimbModel limb = long_cylinder(2.0 + 3.0 * (i % 5) / 4.0);
    const RelativePose offset{dy(rng), dz(rng), ang(rng), ang(rng)};
    const EEPose ee = pose_at_offset(limb, 0, station(rng), offset);
    const RelativePose back = relative_pose(limb, ee);
    CHECK(back.dy == doctest::Approx(offset.dy).epsilon(1e-9).scale(1.0));
    CHECK(back.dz == doctest::Approx(offset.dz).epsilon(1e-9).scale(1.0));
    CHECK(back.ty == doctest::Approx(offset.ty).epsilon(1e-9).scale(1.0));
    CHECK(back.tz == doctest::Approx(offset.tz).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("arc coordinate accumulates across segments") {
  LimbSegment s1(Vec3::Zero(), Vec3::UnitX(), 20.0, 3.0, 3.0);
  LimbSegment s2(s1.tip(), Vec3::UnitX(), 20.0, 3.0, 3.0);
  const LimbModel bent = articulate(LimbModel({s1, s2}), M_PI / 3.0, JointPlane::horizontal);

  CHECK(arc_coordinate(bent, Vec3(10.0, 0.0, 8.0)) == doctest::Approx(10.0).epsilon(1e-9));
  const Vec3 along2 = bent.segments()[1].base + 5.0 * bent.segments()[1].axis +
                      Vec3(0.0, 0.0, 6.0);
  CHECK(arc_coordinate(bent, along2) > 20.0);
}

TEST_CASE("limb motion rigidly transforms the segments") {
  LimbMotion motion;
  motion.translation_axis = Vec3::UnitY();
  motion.amplitude_cm = 10.0;
  motion.period_s = 8.0;
  const LimbModel limb({LimbSegment(Vec3::Zero(), Vec3::UnitX(), 40.0, 3.0, 3.0)}, 0.0, motion);

  const auto at0 = limb.segments_at(0.0);
  CHECK(at0[0].base.isApprox(Vec3::Zero(), 1e-12));
  const auto at2 = limb.segments_at(2.0);  // quarter period: full amplitude
  CHECK(at2[0].base.isApprox(Vec3(0.0, 10.0, 0.0), 1e-9));
  CHECK(at2[0].axis.isApprox(Vec3::UnitX(), 1e-12));
}
