#include "capserv/datagen.hpp"

#include <doctest.h>

#include "capserv/limb_profiles.hpp"
#include "capserv/rng.hpp"

using namespace capserv;

namespace {

CapModelParams quiet_params() {
  CapModelParams p;
  p.noise_sd = 0.0;
  return p;
}

}  // namespace

TEST_CASE("targets are uniform over the pose space") {
  PoseBounds bounds;
  auto rng = substream(100, "datagen/uniform");
  const int n = 100000;
  double dy_min = 1e9, dy_max = -1e9;
  Vec4 mean = Vec4::Zero();
  for (int i = 0; i < n; ++i) {
    const RelativePose p = sample_target(bounds, rng);
    CHECK(bounds.contains(p));
    dy_min = std::min(dy_min, p.dy);
    dy_max = std::max(dy_max, p.dy);
    mean += p.vec();
  }
  mean /= n;

  // Per-axis mean within 3 standard errors of the interval midpoint.
  auto se = [&](double lo, double hi) { return (hi - lo) / std::sqrt(12.0) / std::sqrt(n); };
  CHECK(std::abs(mean[0] - 0.0) < 3.0 * se(-10.0, 10.0));
  CHECK(std::abs(mean[1] - 7.5) < 3.0 * se(0.0, 15.0));
  CHECK(std::abs(mean[2]) < 3.0 * se(-M_PI / 8.0, M_PI / 8.0));
  CHECK(std::abs(mean[3]) < 3.0 * se(-M_PI / 8.0, M_PI / 8.0));
  CHECK(dy_min > -10.0);
  CHECK(dy_max < 10.0);
  CHECK(dy_min < -9.9);
  CHECK(dy_max > 9.9);
}

TEST_CASE("a collapsed pose space always returns its single point") {
  PoseBounds bounds;
  bounds.dy_min_cm = bounds.dy_max_cm = 1.5;
  bounds.dz_min_cm = bounds.dz_max_cm = 6.0;
  bounds.ty_min_rad = bounds.ty_max_rad = 0.1;
  bounds.tz_min_rad = bounds.tz_max_rad = -0.1;
  auto rng = substream(101, "datagen/point");
  for (int i = 0; i < 10; ++i) {
    const RelativePose p = sample_target(bounds, rng);
    CHECK(p.dy == doctest::Approx(1.5));
    CHECK(p.dz == doctest::Approx(6.0));
    CHECK(p.ty == doctest::Approx(0.1));
    CHECK(p.tz == doctest::Approx(-0.1));
  }
}

TEST_CASE("seeded sampling reproduces exactly") {
  PoseBounds bounds;
  auto a = substream(7, "datagen/repro");
  auto b = substream(7, "datagen/repro");
  for (int i = 0; i < 50; ++i) {
    const RelativePose pa = sample_target(bounds, a);
    const RelativePose pb = sample_target(bounds, b);
    CHECK(pa.vec() == pb.vec());
  }
}

TEST_CASE("a straight-line move records close to distance/speed*rate steps") {
  const LimbStation station = cylinder_station("forearm", 4.0);
  CollectionSpec spec;
  spec.trajectories_per_station = 1;
  // Pin the draw: one target 10 cm straight up at exactly 5 cm/s.
  spec.pose_space.dy_min_cm = spec.pose_space.dy_max_cm = 0.0;
  spec.pose_space.dz_min_cm = spec.pose_space.dz_max_cm = 10.0;
  spec.pose_space.ty_min_rad = spec.pose_space.ty_max_rad = 0.0;
  spec.pose_space.tz_min_rad = spec.pose_space.tz_max_rad = 0.0;
  spec.speeds.v_lin_min_cm_s = spec.speeds.v_lin_max_cm_s = 5.0;

  auto rng = substream(200, "datagen/line");
  const Dataset d =
      collect_trajectories(spec, station, SensorArraySpec{}, quiet_params(), rng);
  REQUIRE(d.trajectories.size() == 1);
  CHECK(d.trajectories[0].steps.size() >= 195);
  CHECK(d.trajectories[0].steps.size() <= 200);
}

TEST_CASE("a target equal to the start terminates with at most one sample") {
  const LimbStation station = cylinder_station("forearm", 4.0);
  CollectionSpec spec;
  spec.trajectories_per_station = 1;
  spec.pose_space.dy_min_cm = spec.pose_space.dy_max_cm = 0.0;
  spec.pose_space.dz_min_cm = spec.pose_space.dz_max_cm = 0.0;
  spec.pose_space.ty_min_rad = spec.pose_space.ty_max_rad = 0.0;
  spec.pose_space.tz_min_rad = spec.pose_space.tz_max_rad = 0.0;

  auto rng = substream(201, "datagen/still");
  const Dataset d =
      collect_trajectories(spec, station, SensorArraySpec{}, quiet_params(), rng);
  REQUIRE(d.trajectories.size() == 1);
  CHECK(d.trajectories[0].steps.size() <= 1);
}

TEST_CASE("recorded labels re-derive exactly from the logged ee pose") {
  const LimbStation station = cylinder_station("shin", 5.2);
  CollectionSpec spec;
  spec.trajectories_per_station = 3;
  auto rng = substream(202, "datagen/labels");
  const Dataset d =
      collect_trajectories(spec, station, SensorArraySpec{}, quiet_params(), rng);
  for (const auto& traj : d.trajectories) {
    for (std::size_t i = 0; i < traj.steps.size(); i += 7) {
      const auto& s = traj.steps[i];
      const RelativePose again = relative_pose(station.limb, s.ee);
      CHECK(std::abs(again.dy - s.pose.dy) < 1e-9);
      CHECK(std::abs(again.dz - s.pose.dz) < 1e-9);
      CHECK(std::abs(again.ty - s.pose.ty) < 1e-9);
      CHECK(std::abs(again.tz - s.pose.tz) < 1e-9);
    }
  }
}

TEST_CASE("recorded poses stay inside the expanded pose space") {
  const LimbStation station = cylinder_station("wrist", 2.5);
  CollectionSpec spec;
  spec.trajectories_per_station = 5;
  auto rng = substream(203, "datagen/bounds");
  const Dataset d =
      collect_trajectories(spec, station, SensorArraySpec{}, quiet_params(), rng);
  const double slack_cm = spec.speeds.v_lin_max_cm_s / spec.capture_rate_hz;
  const double slack_rad = spec.speeds.v_ang_max_rad_s / spec.capture_rate_hz;
  std::size_t rows = 0;
  for (const auto& traj : d.trajectories) {
    rows += traj.steps.size();
    for (const auto& s : traj.steps)
      CHECK(spec.pose_space.contains(s.pose, slack_cm + 1e-9, slack_rad + 1e-9));
  }
  CHECK(rows == d.total_steps());
  // Timestamps are gapless within each trajectory.
  for (const auto& traj : d.trajectories)
    for (std::size_t i = 0; i < traj.steps.size(); ++i)
      CHECK(traj.steps[i].t == static_cast<int>(i));
}

TEST_CASE("linear sweeps retreat to 20 cm in the upper half plane") {
  const LimbStation station = cylinder_station("forearm", 4.0);
  auto rng = substream(204, "datagen/linear");
  const Dataset d = linear_sweep(station, SensorArraySpec{}, quiet_params(), 10, rng);
  REQUIRE(d.trajectories.size() == 10);
  for (const auto& traj : d.trajectories) {
    REQUIRE(!traj.steps.empty());
    CHECK(traj.steps.front().pose.dz == doctest::Approx(3.0).epsilon(1e-9));
    const auto& last = traj.steps.back().pose;
    const double range = std::hypot(last.dy, last.dz);
    CHECK(range >= 20.0);
    CHECK(range <= 20.1);
    for (const auto& s : traj.steps) CHECK(s.pose.dz >= 3.0 - 1e-9);
  }
}

TEST_CASE("rotation sweeps stop at 45 degrees with the position pinned") {
  const LimbStation station = cylinder_station("forearm", 4.0);
  auto rng = substream(205, "datagen/rotation");
  const Dataset d = rotation_sweep(station, SensorArraySpec{}, quiet_params(), 10, rng);
  for (const auto& traj : d.trajectories) {
    const auto& last = traj.steps.back().pose;
    const double ang = std::hypot(last.ty, last.tz);
    CHECK(rad_to_deg(ang) >= 45.0 - 1e-9);
    CHECK(rad_to_deg(ang) <= 45.5);
    for (const auto& s : traj.steps) {
      CHECK(std::abs(s.pose.dy) < 0.1);
      CHECK(std::abs(s.pose.dz - 5.0) < 0.1);
    }
  }
}
