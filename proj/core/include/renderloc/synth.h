#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "renderloc/correspondence.h"
#include "renderloc/mesh.h"
#include "renderloc/random.h"
#include "renderloc/refine.h"
#include "renderloc/uncertainty.h"

namespace renderloc {

enum class SceneLayout { kPlaneGrid, kBoxCourtyard, kRandomFacade };

const char* SceneLayoutName(SceneLayout layout);
SceneLayout ParseSceneLayout(const std::string& name);

struct SceneSpec {
  SceneLayout layout = SceneLayout::kPlaneGrid;
  double extent_m = 10.0;
  int triangle_target = 200;
  double feature_density = 1.0;  // features per square meter of surface
  std::uint64_t rng_seed = 0;

  void Validate() const;
};

struct Scene {
  TriMesh mesh;
  std::vector<Vector3d> features;  // each lies on a mesh face
};

// plane-grid: square z = 0 plane of side extent_m centred on the origin.
// box-courtyard: open courtyard in front of a camera at the origin looking
//   along +z: back wall at z = extent, side walls at x = +-extent/2, a floor
//   0.25 extent below the camera, a panel at 0.1 extent and blocks at
//   0.3-0.7 extent.
// random-facade: random panels at depths 0.1-1 extent plus a back wall.
// Feature count is round(density * total surface area), area-weighted.
Scene MakeScene(const SceneSpec& spec);

struct SimMatcherSpec {
  double sigma_px = 1.0;
  double outlier_ratio = 0.0;
  double detection_rate = 1.0;
  // Extra noise std (px) per px of displacement between the real and
  // rendered feature; 0 gives viewpoint-independent noise.
  double viewpoint_noise_gain = 0.0;
  std::uint64_t rng_seed = 0;

  void Validate() const;
};

// Optional depth maps used to drop features occluded in either view.
struct Visibility {
  const DepthMap* true_depth = nullptr;
  const DepthMap* render_depth = nullptr;
};

// Simulates a feature matcher. Each point draws from its own stream keyed by
// (rng_seed, point index), so a point keeps its noise and outlier status
// across renders, as a feature in one fixed real image would.
MatchSet SimulateMatches(std::span<const Vector3d> points,
                         const Pose& render_pose, const Pose& true_pose,
                         const Camera& camera, const SimMatcherSpec& spec,
                         const Visibility& visibility = {});

class SimulatedMatcher : public MatchProvider {
 public:
  SimulatedMatcher(const Scene& scene, const Pose& true_pose,
                   const Camera& camera, const SimMatcherSpec& spec,
                   std::string image_id = "sim", bool occlusion = true);

  std::vector<MatchSet> Matches(int iteration, const Pose& render_pose,
                                const DepthMap& depth) override;

  // Every MatchSet handed out so far, one per iteration.
  const std::vector<MatchSet>& history() const { return history_; }

 private:
  const Scene& scene_;
  Pose true_pose_;
  Camera camera_;
  SimMatcherSpec spec_;
  std::string image_id_;
  bool occlusion_;
  DepthMap true_depth_;
  std::vector<MatchSet> history_;
};

// Reference rig: 640x480 pinhole camera, courtyard scene with roughly 100
// features visible from the origin at depths of about 2-20 m.
Camera ReferenceCamera();
SceneSpec ReferenceSceneSpec();
// Ground-truth poses near the origin for multi-image experiments; index 0
// is the identity.
std::vector<Pose> ReferencePoses(std::size_t count, std::uint64_t seed);

// Random perturbation with the given magnitudes along uniformly random
// rotation axis and translation direction.
Pose RandomPerturbation(const Pose& pose, double rotation_deg,
                        double translation_m, Rng& rng);

struct SensitivityConfig {
  std::vector<double> rotation_levels_deg{0.0, 5.0, 10.0, 20.0, 30.0};
  std::vector<double> translation_levels_m{0.0, 1.0, 2.5, 5.0, 10.0};
  int trials = 50;
  RefineConfig refine;
  SimMatcherSpec matcher{1.0, 0.2, 1.0, 0.0, 0};
  std::uint64_t seed = 0;
  int threads = 1;
  double success_position_m = 0.25;
  double success_rotation_deg = 1.0;
};

struct SensitivityResult {
  std::vector<double> rotation_levels_deg;
  std::vector<double> translation_levels_m;
  int trials = 0;
  int last_iteration = 0;
  // Indexed [translation][rotation].
  std::vector<std::vector<double>> success_first;
  std::vector<std::vector<double>> success_last;
};

// For each (rotation, translation) cell perturbs the ground truth `trials`
// times, refines, and records the success fraction after the first and the
// last iteration of the same run.
SensitivityResult SensitivityGrid(const Scene& scene, const Pose& ground_truth,
                                  const Camera& camera,
                                  const SensitivityConfig& config);

std::string SensitivityCsv(const SensitivityResult& result);
// gnuplot "matrix nonuniform" layout, one block per iteration count.
std::string SensitivityHeatmap(const SensitivityResult& result);

struct UncertaintyBenchmarkConfig {
  SimMatcherSpec matcher{2.0, 0.1, 1.0, 0.0, 0};
  NoiseModel noise{2.0};  // matches the simulated pixel noise
  RefineConfig refine;
  double init_rotation_deg = 2.0;
  double init_translation_m = 0.5;
  std::vector<double> sampling_ratios{0.5, 0.3, 0.1};
  std::size_t first_order_samples = 1000;
  std::size_t monte_carlo_samples = 200;
  std::size_t sampling_samples = 50;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct UncertaintyBenchmarkRow {
  Pose truth;
  Pose refined;
  bool accepted = false;
  std::size_t num_inliers = 0;
  UncertaintyEstimate first_order;
  UncertaintyEstimate monte_carlo;
  std::vector<UncertaintyEstimate> sampling;  // one per sampling ratio
};

// Refines every ground-truth image from a perturbed start with the simulated
// matcher, then runs all three uncertainty estimators on the result.
std::vector<UncertaintyBenchmarkRow> RunUncertaintyBenchmark(
    const Scene& scene, const Camera& camera, std::span<const Pose> truths,
    const UncertaintyBenchmarkConfig& config);

}  // namespace renderloc
