#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "renderloc/geometry.h"
#include "renderloc/uncertainty.h"

namespace renderloc {

struct PoseThreshold {
  double position_m = 0.0;
  double rotation_deg = 0.0;
};

// Ordered thresholds, non-decreasing in both components.
class ThresholdSet {
 public:
  ThresholdSet() = default;
  explicit ThresholdSet(std::vector<PoseThreshold> thresholds);

  const std::vector<PoseThreshold>& thresholds() const { return thresholds_; }
  std::size_t size() const { return thresholds_.size(); }

 private:
  std::vector<PoseThreshold> thresholds_;
};

// (0.25 m, 2 deg) / (0.5 m, 5 deg) / (5 m, 10 deg).
ThresholdSet DefaultPoseThresholds();
// 10 / 20 / 50 / 100 px.
std::vector<double> DefaultReprojectionThresholds();
// Subset ratios used as per-image thresholds: 50% / 30% / 10%.
std::vector<double> DefaultSamplingRatios();
constexpr std::size_t kDefaultSamplingDraws = 50;

// Percentage of images with position_err < c_j and rotation_err < r_j.
std::vector<double> FixedThresholdAccuracy(std::span<const PoseError> errors,
                                           const ThresholdSet& thresholds);

// Percentage of images whose error is strictly inside that image's own
// uncertainty (one source).
double PerImageThresholdAccuracy(
    std::span<const PoseError> errors,
    std::span<const UncertaintyEstimate> thresholds);

// Largest pixel displacement of any point between the two poses; +inf when
// a point is behind either camera or there are no points.
double MaxReprojectionDiff(const Pose& reference, const Pose& estimate,
                           std::span<const Vector3d> points,
                           const Camera& camera);

std::vector<double> ReprojectionAccuracy(std::span<const double> r_values,
                                         std::span<const double> thresholds);

struct EvalImage {
  std::string name;
  Pose reference;
  Pose estimate;
  Camera camera;
  std::vector<Vector3d> points;  // reference inlier points
  // Keyed by source label, e.g. "sampling-0.5" or "first-order".
  std::map<std::string, UncertaintyEstimate> uncertainties;
};

struct EvalImageResult {
  std::string name;
  PoseError error;
  double max_reprojection_diff = 0.0;
  std::map<std::string, bool> within_uncertainty;
};

struct PerImageSourceAccuracy {
  std::string source;
  double percentage = 0.0;
  // First-order and Monte Carlo thresholds under-estimate accuracy and stay
  // out of the headline table.
  bool headline = true;
};

struct EvalReport {
  std::vector<EvalImageResult> images;
  ThresholdSet pose_thresholds;
  std::vector<double> pose_accuracy;
  std::vector<PerImageSourceAccuracy> per_image_accuracy;
  std::vector<double> reprojection_thresholds;
  std::vector<double> reprojection_accuracy;
  std::string reference_source;
};

// Uncertainty sources present on every image are scored; sources missing on
// some image throw kLengthMismatch.
EvalReport Evaluate(std::span<const EvalImage> images,
                    const ThresholdSet& pose_thresholds,
                    std::span<const double> reprojection_thresholds,
                    const std::string& reference_source);

std::string SamplingSourceLabel(double ratio);

}  // namespace renderloc
