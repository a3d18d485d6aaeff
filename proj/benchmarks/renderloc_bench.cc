#include <random>

#include <benchmark/benchmark.h>

#include "renderloc/pose_optimizer.h"
#include "renderloc/refine.h"
#include "renderloc/robust_pose.h"
#include "renderloc/synth.h"
#include "renderloc/uncertainty.h"
#include "test_util.h"

namespace renderloc {
namespace {

const Scene& ReferenceScene() {
  static const Scene scene = MakeScene(ReferenceSceneSpec());
  return scene;
}

void BM_RenderDepth(benchmark::State& state) {
  const Scene& scene = ReferenceScene();
  Camera cam = ReferenceCamera();
  if (state.range(0)) cam.distortion = {-0.08, 0.02, 0.0015, -0.001};
  for (auto _ : state) {
    benchmark::DoNotOptimize(RenderDepth(scene.mesh, Pose::Identity(), cam));
  }
}
BENCHMARK(BM_RenderDepth)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_P3P(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Camera cam = testing::TestCamera(true);
  const Pose truth = testing::RandomPose(rng);
  const Corr2D3D corrs = testing::RandomCorrespondences(truth, cam, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(SolveP3P(corrs, cam));
}
BENCHMARK(BM_P3P);

Corr2D3D NoisyWithOutliers(const Pose& truth, const Camera& cam, int n,
                           double outliers, std::mt19937_64& rng) {
  Corr2D3D corrs = testing::RandomCorrespondences(truth, cam, n, rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (auto& c : corrs) {
    if (u01(rng) < outliers) {
      c.pixel = Vector2d(u01(rng) * (cam.width - 1), u01(rng) * (cam.height - 1));
    } else {
      c.pixel += Vector2d(noise(rng), noise(rng));
    }
  }
  return corrs;
}

void BM_LoRansac(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Camera cam = testing::TestCamera(true);
  const Pose truth = testing::RandomPose(rng);
  const Corr2D3D corrs =
      NoisyWithOutliers(truth, cam, static_cast<int>(state.range(0)), 0.3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(LoRansac(corrs, cam, {}));
}
BENCHMARK(BM_LoRansac)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_OptimizePose(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Camera cam = testing::TestCamera(true);
  const Pose truth = testing::RandomPose(rng);
  const Corr2D3D corrs =
      NoisyWithOutliers(truth, cam, static_cast<int>(state.range(0)), 0.0, rng);
  const Pose start = PerturbPose(truth, Vector3d(0.03, -0.02, 0.05), Vector3d(0.3, 0.1, -0.2));
  for (auto _ : state) benchmark::DoNotOptimize(OptimizePose(corrs, start, cam));
}
BENCHMARK(BM_OptimizePose)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_Refine(benchmark::State& state) {
  const Scene& scene = ReferenceScene();
  const Camera cam = ReferenceCamera();
  Rng rng(4);
  const Pose start = RandomPerturbation(Pose::Identity(), 5.0, 1.0, rng);
  for (auto _ : state) {
    SimulatedMatcher matcher(scene, Pose::Identity(), cam, {}, "bench");
    benchmark::DoNotOptimize(Refine(start, scene.mesh, cam, matcher, {}));
  }
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMillisecond);

void BM_SamplingUncertainty(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const Camera cam = testing::TestCamera(true);
  const Pose truth = testing::RandomPose(rng);
  const Corr2D3D corrs = NoisyWithOutliers(truth, cam, 200, 0.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SamplingUncertainty(corrs, truth, cam, 0.5));
  }
}
BENCHMARK(BM_SamplingUncertainty)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace renderloc

BENCHMARK_MAIN();
