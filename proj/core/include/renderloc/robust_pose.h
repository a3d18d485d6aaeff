#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "renderloc/correspondence.h"
#include "renderloc/geometry.h"
#include "renderloc/pose_optimizer.h"

namespace renderloc {

// Minimal absolute pose from exactly three 2D-3D correspondences (Grunert's
// quartic in the ratio of distances). Pixels are undistorted to bearings.
// Returns up to four poses, each polished to reproject the three points.
// Throws kDegenerateConfiguration for collinear or repeated points and for
// coincident bearings; kInvalidArgument if corrs.size() != 3.
std::vector<Pose> SolveP3P(std::span<const Correspondence> corrs,
                           const Camera& camera);

struct RansacConfig {
  double inlier_threshold_px = 4.0;
  int max_iterations = 10000;
  double confidence = 0.9999;
  int lo_refit_rounds = 10;
  std::uint64_t rng_seed = 0;
  // Side length of the square cells used to count effective inliers.
  int cell_px = 50;

  void Validate() const;
};

struct RansacResult {
  Pose pose;
  std::vector<bool> inlier_mask;  // in input order
  std::size_t inlier_count = 0;
  std::size_t effective_inlier_count = 0;
  int iterations = 0;
};

// LO-RANSAC around SolveP3P. Samples are drawn over a canonical (pixel-sorted)
// ordering, so the result does not depend on input order. Each new best
// model is locally optimized by refitting OptimizePose on its inliers.
RansacResult LoRansac(const Corr2D3D& corrs, const Camera& camera,
                      const RansacConfig& config,
                      const LmOptions& lm_options = {});

// Number of distinct cell_px x cell_px cells occupied by the pixels.
std::size_t CountEffectiveInliers(std::span<const Vector2d> pixels,
                                  int image_width, int image_height,
                                  int cell_px = 50);

}  // namespace renderloc
