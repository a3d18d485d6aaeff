#include "renderloc/refine.h"

#include <algorithm>
#include <limits>

#include "renderloc/error.h"

namespace renderloc {

void RefineConfig::Validate() const {
  if (iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  }
  if (lm.max_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "lm_max_steps must be >= 1");
  }
  ransac.Validate();
}

RefineResult Refine(const Pose& initial, const TriMesh& mesh,
                    const Camera& camera, MatchProvider& matcher,
                    const RefineConfig& config,
                    const RenderCallback& on_render) {
  config.Validate();
  RefineResult result;
  result.pose = initial;

  for (int iteration = 0; iteration < config.iterations; ++iteration) {
    IterationTrace trace;
    Corr2D3D inliers;
    try {
      const DepthMap depth = RenderDepth(mesh, result.pose, camera);
      if (on_render) on_render(iteration, result.pose, depth);

      const std::vector<MatchSet> sources =
          matcher.Matches(iteration, result.pose, depth);
      for (const MatchSet& s : sources) trace.num_matches += s.size();
      const Corr2D3D lifted = LiftAll(sources, depth, result.pose, camera);
      trace.num_lifted = lifted.size();

      RansacConfig ransac = config.ransac;
      ransac.rng_seed = config.ransac.rng_seed + static_cast<std::uint64_t>(iteration);
      const RansacResult robust = LoRansac(lifted, camera, ransac, config.lm);
      for (std::size_t i = 0; i < lifted.size(); ++i) {
        if (robust.inlier_mask[i]) inliers.push_back(lifted[i]);
      }
      trace.pose = OptimizePose(inliers, robust.pose, camera, config.lm);
      trace.inlier_count = robust.inlier_count;
      trace.effective_inlier_count = robust.effective_inlier_count;
    } catch (const Error& e) {
      result.failure_reason =
          "iteration " + std::to_string(iteration + 1) + ": " + e.what();
      break;
    }

    double sum = 0.0;
    for (const Correspondence& c : inliers) {
      const auto pixel = TryProject(c.point, trace.pose, camera);
      const double err = pixel ? (*pixel - c.pixel).norm()
                               : std::numeric_limits<double>::infinity();
      sum += err;
      trace.max_reprojection_px = std::max(trace.max_reprojection_px, err);
    }
    trace.mean_reprojection_px =
        inliers.empty() ? 0.0 : sum / static_cast<double>(inliers.size());

    const double step = (trace.pose.center() - result.pose.center()).norm();
    result.pose = trace.pose;
    result.inliers = std::move(inliers);
    result.accepted =
        trace.effective_inlier_count > config.min_effective_inliers;
    result.trace.push_back(trace);

    if (config.early_exit && step < config.early_exit_step_m) break;
  }
  return result;
}

}  // namespace renderloc
