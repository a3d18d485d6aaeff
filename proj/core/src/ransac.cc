#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "renderloc/error.h"
#include "renderloc/random.h"
#include "renderloc/robust_pose.h"

namespace renderloc {
namespace internal {
bool SolveP3PNoThrow(std::span<const Correspondence> corrs,
                     const Camera& camera, std::vector<Pose>* poses);
}  // namespace internal

namespace {

struct Support {
  std::size_t count = 0;
  double truncated_error = 0.0;  // tie-break only
  std::vector<bool> mask;
};

Support EvaluateSupport(const Corr2D3D& corrs, const Pose& pose,
                        const Camera& camera, double threshold) {
  Support s;
  s.mask.assign(corrs.size(), false);
  const double threshold_sq = threshold * threshold;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const auto pixel = TryProject(corrs[i].point, pose, camera);
    double err_sq = threshold_sq;
    if (pixel) err_sq = std::min(threshold_sq, (*pixel - corrs[i].pixel).squaredNorm());
    if (err_sq < threshold_sq) {
      s.mask[i] = true;
      ++s.count;
    }
    s.truncated_error += err_sq;
  }
  return s;
}

bool IsBetter(const Support& a, const Support& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.truncated_error < b.truncated_error;
}

Corr2D3D Select(const Corr2D3D& corrs, const std::vector<bool>& mask) {
  Corr2D3D out;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (mask[i]) out.push_back(corrs[i]);
  }
  return out;
}

int RequiredIterations(std::size_t inliers, std::size_t total,
                       double confidence, int max_iterations) {
  const double w = static_cast<double>(inliers) / static_cast<double>(total);
  const double p_good = w * w * w;
  if (p_good >= 1.0) return 1;
  if (p_good <= 0.0) return max_iterations;
  const double needed = std::log(1.0 - confidence) / std::log(1.0 - p_good);
  if (!std::isfinite(needed) || needed > max_iterations) return max_iterations;
  return std::max(1, static_cast<int>(std::ceil(needed)));
}

}  // namespace

void RansacConfig::Validate() const {
  if (!(inlier_threshold_px > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "inlier threshold must be > 0");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence must be in (0, 1)");
  }
  if (max_iterations < 1 || lo_refit_rounds < 0 || cell_px <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid RANSAC limits");
  }
}

std::size_t CountEffectiveInliers(std::span<const Vector2d> pixels,
                                  int image_width, int image_height,
                                  int cell_px) {
  if (cell_px <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "cell size must be > 0");
  }
  const long cols = (image_width + cell_px - 1) / cell_px;
  const long rows = (image_height + cell_px - 1) / cell_px;
  std::set<std::pair<long, long>> occupied;
  for (const Vector2d& p : pixels) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) continue;
    const long cx = std::clamp(static_cast<long>(std::floor(p.x() / cell_px)), 0L,
                               std::max(0L, cols - 1));
    const long cy = std::clamp(static_cast<long>(std::floor(p.y() / cell_px)), 0L,
                               std::max(0L, rows - 1));
    occupied.emplace(cx, cy);
  }
  return occupied.size();
}

RansacResult LoRansac(const Corr2D3D& input, const Camera& camera,
                      const RansacConfig& config, const LmOptions& lm_options) {
  config.Validate();
  if (input.size() < 3) {
    throw Error(ErrorCode::kTooFewCorrespondences,
                "LO-RANSAC needs >= 3 correspondences, got " +
                    std::to_string(input.size()));
  }

  // Canonical order: sort by pixel, then point.
  std::vector<std::size_t> order(input.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const Correspondence& c = input[i];
    return std::make_tuple(c.pixel.x(), c.pixel.y(), c.point.x(), c.point.y(),
                           c.point.z());
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  Corr2D3D corrs(input.size());
  for (std::size_t i = 0; i < order.size(); ++i) corrs[i] = input[order[i]];

  const std::size_t n = corrs.size();
  Rng rng(config.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  bool have_model = false;
  Pose best_pose;
  Support best;
  int iteration_limit = config.max_iterations;
  int iterations = 0;
  std::vector<Pose> hypotheses;
  std::array<Correspondence, 3> sample;

  while (iterations < iteration_limit) {
    ++iterations;
    std::size_t i0 = pick(rng);
    std::size_t i1 = pick(rng);
    while (i1 == i0) i1 = pick(rng);
    std::size_t i2 = pick(rng);
    while (i2 == i0 || i2 == i1) i2 = pick(rng);
    sample = {corrs[i0], corrs[i1], corrs[i2]};
    if (!internal::SolveP3PNoThrow(sample, camera, &hypotheses)) continue;

    for (const Pose& hypothesis : hypotheses) {
      Support support = EvaluateSupport(corrs, hypothesis, camera,
                                        config.inlier_threshold_px);
      if (have_model && !IsBetter(support, best)) continue;
      Pose pose = hypothesis;

      // Local optimization: refit on the inliers while support improves.
      for (int round = 0; round < config.lo_refit_rounds; ++round) {
        if (support.count < 3) break;
        Pose refit;
        try {
          refit = OptimizePose(Select(corrs, support.mask), pose, camera,
                               lm_options);
        } catch (const Error&) {
          break;
        }
        Support refit_support = EvaluateSupport(corrs, refit, camera,
                                                config.inlier_threshold_px);
        if (!IsBetter(refit_support, support)) break;
        pose = refit;
        support = std::move(refit_support);
      }

      have_model = true;
      best_pose = pose;
      best = std::move(support);
      iteration_limit = std::min(
          iteration_limit, RequiredIterations(best.count, n, config.confidence,
                                              config.max_iterations));
    }
  }

  if (!have_model || best.count < 3) {
    throw Error(ErrorCode::kNoModelFound,
                "no hypothesis with >= 3 inliers after " +
                    std::to_string(iterations) + " iterations");
  }

  RansacResult result;
  result.pose = best_pose;
  result.iterations = iterations;
  result.inlier_mask.assign(n, false);
  std::vector<Vector2d> inlier_pixels;
  for (std::size_t i = 0; i < n; ++i) {
    if (!best.mask[i]) continue;
    result.inlier_mask[order[i]] = true;
    inlier_pixels.push_back(corrs[i].pixel);
  }
  result.inlier_count = inlier_pixels.size();
  result.effective_inlier_count = CountEffectiveInliers(
      inlier_pixels, camera.width, camera.height, config.cell_px);
  return result;
}

}  // namespace renderloc
