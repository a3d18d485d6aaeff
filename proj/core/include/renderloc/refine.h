#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "renderloc/correspondence.h"
#include "renderloc/geometry.h"
#include "renderloc/mesh.h"
#include "renderloc/pose_optimizer.h"
#include "renderloc/robust_pose.h"

namespace renderloc {

struct RefineConfig {
  int iterations = 5;
  // Acceptance requires strictly more effective inliers than this.
  std::size_t min_effective_inliers = 10;
  LmOptions lm;
  RansacConfig ransac;
  // Optional early exit once the pose moves less than early_exit_step_m.
  bool early_exit = false;
  double early_exit_step_m = 1e-8;

  void Validate() const;
};

// Supplies 2D-2D matches between the real image and the rendering at
// `render_pose` for refinement round `iteration` (0-based). May return
// several sources; they are lifted independently and concatenated.
class MatchProvider {
 public:
  virtual ~MatchProvider() = default;
  virtual std::vector<MatchSet> Matches(int iteration, const Pose& render_pose,
                                        const DepthMap& depth) = 0;
};

struct IterationTrace {
  Pose pose;  // estimate after this round
  std::size_t num_matches = 0;
  std::size_t num_lifted = 0;
  std::size_t inlier_count = 0;
  std::size_t effective_inlier_count = 0;
  double mean_reprojection_px = 0.0;
  double max_reprojection_px = 0.0;
};

struct RefineResult {
  Pose pose;
  bool accepted = false;
  std::vector<IterationTrace> trace;
  Corr2D3D inliers;  // final round's inliers
  std::string failure_reason;  // empty when every round completed
};

// Called after each render, before matches are requested. The CLI uses it
// to write depth checkpoints.
using RenderCallback =
    std::function<void(int iteration, const Pose& pose, const DepthMap& depth)>;

// Iterates render -> match -> lift -> LO-RANSAC -> least squares. Never
// throws for per-round failures: the loop stops, keeps the last good pose,
// and records the reason. `accepted` reflects the last completed round.
RefineResult Refine(const Pose& initial, const TriMesh& mesh,
                    const Camera& camera, MatchProvider& matcher,
                    const RefineConfig& config,
                    const RenderCallback& on_render = {});

}  // namespace renderloc
