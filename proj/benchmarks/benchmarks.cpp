#include <benchmark/benchmark.h>

#include "capserv/control.hpp"
#include "capserv/datagen.hpp"
#include "capserv/limb_profiles.hpp"
#include "capserv/mlp.hpp"
#include "capserv/rng.hpp"
#include "capserv/sensor.hpp"

namespace {

using namespace capserv;

LimbModel bench_limb() {
  LimbSegment s1(Vec3::Zero(), Vec3::UnitX(), 30.0, 3.5, 4.0);
  LimbSegment s2(s1.tip(), Vec3::UnitX(), 30.0, 4.0, 4.3);
  return articulate(LimbModel({s1, s2}), M_PI / 3.0, JointPlane::horizontal);
}

void BM_SignedClearance(benchmark::State& state) {
  const LimbModel limb = bench_limb();
  auto rng = substream(1, "bench/clearance");
  std::uniform_real_distribution<double> box(-10.0, 40.0);
  for (auto _ : state) {
    const Vec3 p(box(rng), box(rng), box(rng));
    benchmark::DoNotOptimize(signed_clearance(limb, p));
  }
}
BENCHMARK(BM_SignedClearance);

void BM_KStarFrame(benchmark::State& state) {
  const LimbModel limb = bench_limb();
  auto rng = substream(2, "bench/kstar");
  std::uniform_real_distribution<double> along(2.0, 55.0);
  for (auto _ : state) {
    const Vec3 p(along(rng), 1.0, 10.0);
    benchmark::DoNotOptimize(k_star_frame(limb, p));
  }
}
BENCHMARK(BM_KStarFrame);

void BM_SimulateCapacitance(benchmark::State& state) {
  const LimbModel limb = bench_limb();
  const SensorArraySpec spec;
  CapModelParams params;
  params.patch_resolution = static_cast<int>(state.range(0));
  params.noise_sd = 0.01;
  const EEPose ee = pose_at_offset(limb, 0, 15.0, RelativePose{0.5, 5.0, 0.0, 0.0});
  auto rng = substream(3, "bench/cap");
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_capacitance(spec, params, limb, ee, 0.0, rng));
}
BENCHMARK(BM_SimulateCapacitance)->Arg(4)->Arg(6)->Arg(12);

void BM_MlpForward(benchmark::State& state) {
  MlpModel model;
  auto rng = substream(4, "bench/forward");
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& w : model.weights)
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.01 * uni(rng);
  Eigen::VectorXd x(kInputDim);
  for (int i = 0; i < kInputDim; ++i) x[i] = uni(rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(x));
}
BENCHMARK(BM_MlpForward);

void BM_MlpTrainBatch(benchmark::State& state) {
  MlpModel model;
  auto rng = substream(5, "bench/batch");
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& w : model.weights)
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.01 * uni(rng);
  Eigen::MatrixXd X(128, kInputDim), Y(128, kOutputDim);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = uni(rng);
  for (Eigen::Index i = 0; i < Y.size(); ++i) Y.data()[i] = uni(rng);
  MlpGradients grads;
  for (auto _ : state)
    benchmark::DoNotOptimize(model.scaled_loss_and_gradients(X, Y, grads));
}
BENCHMARK(BM_MlpTrainBatch);

void BM_ServoControlStep(benchmark::State& state) {
  Scenario sc;
  sc.limb = bench_limb();
  sc.start = pose_at_offset(sc.limb, 0, 10.0, RelativePose{0.0, 5.0, 0.0, 0.0});
  TruePoseEstimator stub;
  ServoConfig cfg;
  cfg.run_length_cm = 1e9;  // never finish on length
  ServoSimulation sim(sc, stub, cfg, SensorArraySpec{}, CapModelParams{},
                      substream(6, "bench/servo"));
  for (auto _ : state) benchmark::DoNotOptimize(sim.capture_tick());
}
BENCHMARK(BM_ServoControlStep);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
