#include "capserv/sensor.hpp"

#include <doctest.h>

#include "capserv/rng.hpp"

using namespace capserv;

namespace {

LimbModel cylinder(double radius) {
  return LimbModel({LimbSegment(Vec3(-100.0, 0.0, 0.0), Vec3::UnitX(), 200.0, radius, radius)});
}

CapModelParams quiet_params() {
  CapModelParams p;
  p.noise_sd = 0.0;
  return p;
}

EEPose above(const LimbModel& limb, double dy, double dz, double ty = 0.0, double tz = 0.0) {
  return pose_at_offset(limb, 0, 100.0, RelativePose{dy, dz, ty, tz});
}

}  // namespace

TEST_CASE("electrode layout matches the grid spec") {
  SensorArraySpec spec;
  EEPose identity;
  const auto layout = electrode_centers(spec, identity);

  // Symmetric about the plate center.
  Vec3 sum = Vec3::Zero();
  for (const auto& c : layout.centers) sum += c;
  CHECK(sum.norm() < 1e-12);

  // Pairwise distances match the pitches.
  CHECK((layout.centers[0] - layout.centers[1]).norm() ==
        doctest::Approx(spec.pitch_lateral_cm));
  CHECK((layout.centers[1] - layout.centers[2]).norm() ==
        doctest::Approx(spec.pitch_lateral_cm));
  CHECK((layout.centers[0] - layout.centers[3]).norm() ==
        doctest::Approx(spec.pitch_longitudinal_cm));
  CHECK(layout.normal.isApprox(-Vec3::UnitZ(), 1e-12));

  SUBCASE("translation moves every center") {
    EEPose moved;
    moved.position = Vec3(1.0, -2.0, 3.0);
    const auto shifted = electrode_centers(spec, moved);
    for (int i = 0; i < kNumElectrodes; ++i)
      CHECK((shifted.centers[i] - layout.centers[i]).isApprox(moved.position, 1e-12));
  }

  SUBCASE("yaw by pi swaps left and right columns up to row") {
    EEPose flipped;
    flipped.rpy = Vec3(0.0, 0.0, M_PI);
    const auto swapped = electrode_centers(spec, flipped);
    // top-left lands where bottom-right was
    CHECK(swapped.centers[0].isApprox(layout.centers[5], 1e-9));
    CHECK(swapped.centers[2].isApprox(layout.centers[3], 1e-9));
  }
}

TEST_CASE("spec validation rejects bad layouts") {
  SensorArraySpec spec;
  spec.cols = 4;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = SensorArraySpec{};
  spec.plate_width_cm = 8.0;  // three 3 cm electrodes at 3.75 pitch cannot fit
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  CapModelParams p;
  p.crosstalk = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("center column dominates when centered above the limb") {
  SensorArraySpec spec;
  const LimbModel limb = cylinder(3.0);
  auto rng = substream(1, "sensor/center");
  const CapFrame f = simulate_capacitance(spec, quiet_params(), limb, above(limb, 0.0, 5.0),
                                          0.0, rng);
  CHECK(f.c[1] > f.c[0]);
  CHECK(f.c[1] > f.c[2]);
  CHECK(f.c[4] > f.c[3]);
  CHECK(f.c[4] > f.c[5]);
}

TEST_CASE("far field decays to the baseline") {
  SensorArraySpec spec;
  CapModelParams params;
  params.noise_sd = 0.01;
  const LimbModel limb = cylinder(3.0);
  auto rng = substream(2, "sensor/far");
  const CapFrame f =
      simulate_capacitance(spec, params, limb, above(limb, 0.0, 100.0), 0.0, rng);
  for (double v : f.c) CHECK(std::abs(v - params.baseline) < 3.0 * params.noise_sd);
}

TEST_CASE("mirrored lateral offsets exchange the columns exactly") {
  SensorArraySpec spec;
  const LimbModel limb = cylinder(3.0);
  auto rng = substream(3, "sensor/mirror");
  for (double dy : {0.5, 2.0, 4.5, 7.25}) {
    const CapSample left = capacitance_with_clearance(spec, quiet_params(), limb,
                                                      above(limb, dy, 5.0), 0.0, nullptr);
    const CapSample right = capacitance_with_clearance(spec, quiet_params(), limb,
                                                       above(limb, -dy, 5.0), 0.0, nullptr);
    // exact swap: (TL,TC,TR) <-> (TR,TC,TL), same for the bottom row
    CHECK(left.frame.c[0] == right.frame.c[2]);
    CHECK(left.frame.c[1] == right.frame.c[1]);
    CHECK(left.frame.c[3] == right.frame.c[5]);
    CHECK(left.frame.c[4] == right.frame.c[4]);
  }
  (void)rng;
}

TEST_CASE("raising the sensor strictly decreases every electrode") {
  SensorArraySpec spec;
  const LimbModel limb = cylinder(3.0);
  CapFrame prev;
  bool first = true;
  for (double dz = 1.0; dz <= 30.0; dz += 1.0) {
    const CapSample s = capacitance_with_clearance(spec, quiet_params(), limb,
                                                   above(limb, 0.0, dz), 0.0, nullptr);
    if (!first)
      for (int e = 0; e < kNumElectrodes; ++e) CHECK(s.frame.c[e] < prev.c[e]);
    prev = s.frame;
    first = false;
  }
}

TEST_CASE("a thicker limb at equal clearance reads larger") {
  SensorArraySpec spec;
  for (double dz : {3.0, 5.0, 8.0}) {
    const LimbModel thin = cylinder(2.0);
    const LimbModel thick = cylinder(5.0);
    const CapSample a = capacitance_with_clearance(spec, quiet_params(), thin,
                                                   above(thin, 0.0, dz), 0.0, nullptr);
    const CapSample b = capacitance_with_clearance(spec, quiet_params(), thick,
                                                   above(thick, 0.0, dz), 0.0, nullptr);
    for (int e = 0; e < kNumElectrodes; ++e) CHECK(b.frame.c[e] > a.frame.c[e]);
  }
}

TEST_CASE("crosstalk mixing preserves the electrode total") {
  SensorArraySpec spec;
  CapModelParams with_xtalk = quiet_params();
  CapModelParams without = quiet_params();
  without.crosstalk = 0.0;
  const LimbModel limb = cylinder(3.0);
  const EEPose ee = above(limb, 2.5, 4.0, 0.1, -0.05);

  const CapSample mixed = capacitance_with_clearance(spec, with_xtalk, limb, ee, 0.0, nullptr);
  const CapSample raw = capacitance_with_clearance(spec, without, limb, ee, 0.0, nullptr);
  double sum_mixed = 0.0, sum_raw = 0.0;
  for (int e = 0; e < kNumElectrodes; ++e) {
    sum_mixed += mixed.frame.c[e];
    sum_raw += raw.frame.c[e];
  }
  CHECK(sum_mixed == doctest::Approx(sum_raw).epsilon(1e-12));
}

TEST_CASE("identical seeds give bit-identical noisy frames") {
  SensorArraySpec spec;
  CapModelParams params = with_calibrated_noise(spec, CapModelParams{});
  CHECK(params.noise_sd > 0.0);
  const LimbModel limb = cylinder(3.0);
  const EEPose ee = above(limb, 1.0, 5.0);

  auto rng1 = substream(42, "sensor/determinism");
  auto rng2 = substream(42, "sensor/determinism");
  for (int i = 0; i < 20; ++i) {
    const CapFrame a = simulate_capacitance(spec, params, limb, ee, 0.0, rng1);
    const CapFrame b = simulate_capacitance(spec, params, limb, ee, 0.0, rng2);
    CHECK(a.c == b.c);
  }
}

TEST_CASE("contact raises an error") {
  SensorArraySpec spec;
  const LimbModel limb = cylinder(3.0);
  auto rng = substream(5, "sensor/contact");
  EEPose inside;
  inside.position = Vec3(0.0, 0.0, 2.0);  // plate center below the surface
  CHECK_THROWS_AS(simulate_capacitance(spec, quiet_params(), limb, inside, 0.0, rng),
                  ContactError);
}

TEST_CASE("plot smoothing: steps, constants and normalization") {
  std::vector<CapFrame> step(60);
  for (std::size_t i = 0; i < step.size(); ++i)
    for (int e = 0; e < kNumElectrodes; ++e) step[i].c[e] = i == 0 ? 0.0 : 1.0;

  SUBCASE("unit step reaches 1 - 0.98^50 after 50 samples, before normalization") {
    // Track the recursion directly: y_0 = 0, y_t = 0.98 y + 0.02.
    double y = 0.0;
    for (int t = 1; t <= 50; ++t) y = 0.98 * y + 0.02;
    CHECK(y == doctest::Approx(1.0 - std::pow(0.98, 50)).epsilon(1e-12));
    CHECK(y == doctest::Approx(0.636).epsilon(1e-2));
  }

  SUBCASE("normalization maps the filtered series onto [0, 1]") {
    const auto smoothed = smooth_for_plotting(step);
    double lo = 1e9, hi = -1e9;
    for (const auto& f : smoothed) {
      lo = std::min(lo, f.c[0]);
      hi = std::max(hi, f.c[0]);
    }
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(1.0));

    // Sample 50 sits at (1 - 0.98^50) of the way to the filter's final value.
    const double y50 = 1.0 - std::pow(0.98, 50);
    const double y_last = 1.0 - std::pow(0.98, 59);
    CHECK(smoothed[50].c[0] == doctest::Approx(y50 / y_last).epsilon(1e-9));
  }

  SUBCASE("constant input stays constant and unnormalized") {
    std::vector<CapFrame> flat(20);
    for (auto& f : flat)
      for (int e = 0; e < kNumElectrodes; ++e) f.c[e] = 7.5;
    const auto smoothed = smooth_for_plotting(flat);
    for (const auto& f : smoothed)
      for (int e = 0; e < kNumElectrodes; ++e) CHECK(f.c[e] == doctest::Approx(7.5));
  }

  CHECK_THROWS_AS(smooth_for_plotting({}), std::invalid_argument);
}
