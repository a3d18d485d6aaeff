#include "renderloc/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "renderloc/error.h"

namespace renderloc {
namespace {

double Percentage(std::size_t count, std::size_t total) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

ThresholdSet::ThresholdSet(std::vector<PoseThreshold> thresholds)
    : thresholds_(std::move(thresholds)) {
  for (std::size_t i = 1; i < thresholds_.size(); ++i) {
    if (thresholds_[i].position_m < thresholds_[i - 1].position_m ||
        thresholds_[i].rotation_deg < thresholds_[i - 1].rotation_deg) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pose thresholds must be non-decreasing");
    }
  }
}

ThresholdSet DefaultPoseThresholds() {
  return ThresholdSet({{0.25, 2.0}, {0.5, 5.0}, {5.0, 10.0}});
}

std::vector<double> DefaultReprojectionThresholds() {
  return {10.0, 20.0, 50.0, 100.0};
}

std::vector<double> DefaultSamplingRatios() { return {0.5, 0.3, 0.1}; }

std::string SamplingSourceLabel(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sampling-%g", ratio);
  return buf;
}

std::vector<double> FixedThresholdAccuracy(std::span<const PoseError> errors,
                                           const ThresholdSet& thresholds) {
  if (errors.empty()) throw Error(ErrorCode::kEmptyInput, "no pose errors");
  std::vector<double> out;
  for (const PoseThreshold& t : thresholds.thresholds()) {
    const auto count = std::count_if(
        errors.begin(), errors.end(), [&](const PoseError& e) {
          return e.position_err < t.position_m && e.rotation_err < t.rotation_deg;
        });
    out.push_back(Percentage(static_cast<std::size_t>(count), errors.size()));
  }
  return out;
}

double PerImageThresholdAccuracy(
    std::span<const PoseError> errors,
    std::span<const UncertaintyEstimate> thresholds) {
  if (errors.size() != thresholds.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(errors.size()) + " errors vs " +
                    std::to_string(thresholds.size()) + " thresholds");
  }
  if (errors.empty()) throw Error(ErrorCode::kEmptyInput, "no pose errors");
  std::size_t count = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].position_err < thresholds[i].position_unc &&
        errors[i].rotation_err < thresholds[i].rotation_unc) {
      ++count;
    }
  }
  return Percentage(count, errors.size());
}

double MaxReprojectionDiff(const Pose& reference, const Pose& estimate,
                           std::span<const Vector3d> points,
                           const Camera& camera) {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const Vector3d& p : points) {
    const auto a = TryProject(p, reference, camera);
    const auto b = TryProject(p, estimate, camera);
    if (!a || !b) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, (*a - *b).norm());
  }
  return worst;
}

std::vector<double> ReprojectionAccuracy(std::span<const double> r_values,
                                         std::span<const double> thresholds) {
  if (r_values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no reprojection values");
  }
  std::vector<double> out;
  for (double t : thresholds) {
    const auto count = std::count_if(r_values.begin(), r_values.end(),
                                     [&](double r) { return r < t; });
    out.push_back(Percentage(static_cast<std::size_t>(count), r_values.size()));
  }
  return out;
}

EvalReport Evaluate(std::span<const EvalImage> images,
                    const ThresholdSet& pose_thresholds,
                    std::span<const double> reprojection_thresholds,
                    const std::string& reference_source) {
  if (images.empty()) throw Error(ErrorCode::kEmptyInput, "no images");
  EvalReport report;
  report.pose_thresholds = pose_thresholds;
  report.reprojection_thresholds.assign(reprojection_thresholds.begin(),
                                        reprojection_thresholds.end());
  report.reference_source = reference_source;

  std::vector<PoseError> errors;
  std::vector<double> r_values;
  std::set<std::string> sources;
  for (const auto& [source, unused] : images.front().uncertainties) {
    sources.insert(source);
  }
  for (const EvalImage& image : images) {
    std::set<std::string> here;
    for (const auto& [source, unused] : image.uncertainties) here.insert(source);
    if (here != sources) {
      throw Error(ErrorCode::kLengthMismatch,
                  "image " + image.name +
                      " has a different set of uncertainty sources");
    }
    EvalImageResult r;
    r.name = image.name;
    r.error = ComputePoseError(image.reference, image.estimate);
    r.max_reprojection_diff = MaxReprojectionDiff(
        image.reference, image.estimate, image.points, image.camera);
    for (const auto& [source, unc] : image.uncertainties) {
      r.within_uncertainty[source] = r.error.position_err < unc.position_unc &&
                                     r.error.rotation_err < unc.rotation_unc;
    }
    errors.push_back(r.error);
    r_values.push_back(r.max_reprojection_diff);
    report.images.push_back(std::move(r));
  }
  report.pose_accuracy = FixedThresholdAccuracy(errors, pose_thresholds);
  report.reprojection_accuracy =
      ReprojectionAccuracy(r_values, reprojection_thresholds);

  // Sampling sources first (descending ratio), then the others.
  std::vector<std::string> ordered(sources.begin(), sources.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const std::string& a, const std::string& b) {
                     const bool sa = a.rfind("sampling-", 0) == 0;
                     const bool sb = b.rfind("sampling-", 0) == 0;
                     if (sa != sb) return sa;
                     if (sa) return std::stod(a.substr(9)) > std::stod(b.substr(9));
                     return a < b;
                   });
  for (const std::string& source : ordered) {
    std::vector<UncertaintyEstimate> thresholds;
    for (const EvalImage& image : images) {
      thresholds.push_back(image.uncertainties.at(source));
    }
    PerImageSourceAccuracy acc;
    acc.source = source;
    acc.percentage = PerImageThresholdAccuracy(errors, thresholds);
    acc.headline = source.rfind("sampling-", 0) == 0;
    report.per_image_accuracy.push_back(acc);
  }
  return report;
}

}  // namespace renderloc
