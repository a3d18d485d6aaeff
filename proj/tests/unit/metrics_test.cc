#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "renderloc/error.h"
#include "renderloc/metrics.h"

namespace renderloc {
namespace {

Camera F100() {
  Camera cam;
  cam.fx = cam.fy = 100.0;
  cam.cx = 319.5;
  cam.cy = 239.5;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

UncertaintyEstimate Unc(double pos, double rot) {
  return {pos, rot, UncertaintyMethod::kSampling, 50, 0.5};
}

TEST(DefaultsTest, FixedConstants) {
  const ThresholdSet set = DefaultPoseThresholds();
  const auto& t = set.thresholds();
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].position_m, 0.25);
  EXPECT_EQ(t[0].rotation_deg, 2.0);
  EXPECT_EQ(t[1].position_m, 0.5);
  EXPECT_EQ(t[1].rotation_deg, 5.0);
  EXPECT_EQ(t[2].position_m, 5.0);
  EXPECT_EQ(t[2].rotation_deg, 10.0);
  EXPECT_EQ(DefaultReprojectionThresholds(), (std::vector<double>{10, 20, 50, 100}));
  EXPECT_EQ(DefaultSamplingRatios(), (std::vector<double>{0.5, 0.3, 0.1}));
  EXPECT_EQ(kDefaultSamplingDraws, 50u);
}

TEST(FixedThresholdTest, CountsBothComponents) {
  const std::vector<PoseError> e{{0.1, 1}, {0.3, 3}, {6, 20}};
  const auto acc = FixedThresholdAccuracy(e, DefaultPoseThresholds());
  ASSERT_EQ(acc.size(), 3u);
  EXPECT_NEAR(acc[0], 100.0 / 3, 1e-12);
  EXPECT_NEAR(acc[1], 200.0 / 3, 1e-12);
  EXPECT_NEAR(acc[2], 200.0 / 3, 1e-12);
}

TEST(FixedThresholdTest, AllZeroErrors) {
  const std::vector<PoseError> e(4);
  EXPECT_EQ(FixedThresholdAccuracy(e, DefaultPoseThresholds()),
            (std::vector<double>{100, 100, 100}));
}

TEST(FixedThresholdTest, BoundaryIsExcluded) {
  const std::vector<PoseError> e{{0.25, 1.0}, {0.1, 2.0}};
  EXPECT_EQ(FixedThresholdAccuracy(e, DefaultPoseThresholds())[0], 0.0);
}

TEST(FixedThresholdTest, EmptyInputThrows) {
  EXPECT_THROW(FixedThresholdAccuracy({}, DefaultPoseThresholds()), Error);
}

TEST(ThresholdSetTest, RejectsDecreasing) {
  EXPECT_THROW(ThresholdSet({{0.5, 5}, {0.25, 10}}), Error);
}

TEST(PerImageThresholdTest, ExactEstimatesCount) {
  const std::vector<PoseError> e(3);
  const std::vector<UncertaintyEstimate> u(3, Unc(0.01, 0.01));
  EXPECT_EQ(PerImageThresholdAccuracy(e, u), 100.0);
}

TEST(PerImageThresholdTest, ZeroThresholds) {
  const std::vector<PoseError> e(3);
  const std::vector<UncertaintyEstimate> u(3, Unc(0, 0));
  EXPECT_EQ(PerImageThresholdAccuracy(e, u), 0.0);
}

TEST(PerImageThresholdTest, SevenOfTen) {
  std::vector<PoseError> e;
  std::vector<UncertaintyEstimate> u;
  for (int i = 0; i < 10; ++i) {
    e.push_back({0.1 * (i + 1), 0.5 * (i + 1)});
    // Inside for i < 7; outside by position for 7, by rotation for 8, 9.
    if (i < 7) u.push_back(Unc(0.1 * (i + 1) + 0.01, 0.5 * (i + 1) + 0.1));
    else if (i == 7) u.push_back(Unc(0.05, 100));
    else u.push_back(Unc(100, 0.1));
  }
  EXPECT_NEAR(PerImageThresholdAccuracy(e, u), 70.0, 1e-12);
}

TEST(PerImageThresholdTest, LengthMismatch) {
  const std::vector<PoseError> e(3);
  const std::vector<UncertaintyEstimate> u(2);
  EXPECT_THROW(PerImageThresholdAccuracy(e, u), Error);
}

TEST(MaxReprojectionDiffTest, IdenticalPoses) {
  const std::vector<Vector3d> pts{{0, 0, 3}, {1, 1, 5}};
  EXPECT_EQ(MaxReprojectionDiff(Pose::Identity(), Pose::Identity(), pts, F100()), 0.0);
}

TEST(MaxReprojectionDiffTest, LateralShiftIsFocalTimesShiftOverDepth) {
  std::vector<Vector3d> pts;
  for (double x = -1.0; x <= 1.0; x += 0.25) {
    for (double y = -0.8; y <= 0.8; y += 0.4) pts.push_back({x, y, 2.0 + 0.01 * x});
  }
  const Pose est(Matrix3d::Identity(), Vector3d(0.02, 0, 0));
  const double r = MaxReprojectionDiff(Pose::Identity(), est, pts, F100());
  EXPECT_NEAR(r, 100.0 * 0.02 / 2.0, 0.1);
}

TEST(MaxReprojectionDiffTest, PointBehindIsUnbounded) {
  const std::vector<Vector3d> pts{{0, 0, 3}, {0, 0, 0.5}};
  const Pose est(Matrix3d::Identity(), Vector3d(0, 0, 1));
  EXPECT_EQ(MaxReprojectionDiff(Pose::Identity(), est, pts, F100()),
            std::numeric_limits<double>::infinity());
  EXPECT_EQ(MaxReprojectionDiff(Pose::Identity(), est, {}, F100()),
            std::numeric_limits<double>::infinity());
}

// Largest lateral shift that keeps r-infinity at or below `target`.
double AllowedShift(const std::vector<Vector3d>& pts, double target) {
  double lo = 0.0;
  double hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Pose est(Matrix3d::Identity(), Vector3d(mid, 0, 0));
    (MaxReprojectionDiff(Pose::Identity(), est, pts, F100()) <= target ? lo : hi) = mid;
  }
  return lo;
}

TEST(MaxReprojectionDiffTest, AllowedPositionErrorGrowsWithDepth) {
  std::vector<Vector3d> near;
  for (int i = 0; i < 12; ++i) {
    const double z = 2.0 + 0.3 * i;
    near.push_back({0.1 * z * std::sin(i), 0.1 * z * std::cos(i), z});
  }
  std::vector<Vector3d> far;
  for (const Vector3d& p : near) far.push_back(2.0 * p);
  const double a = AllowedShift(near, 5.0);
  const double b = AllowedShift(far, 5.0);
  EXPECT_GE(b, 2.0 * a * (1 - 1e-9));
}

TEST(ReprojectionAccuracyTest, ThresholdCounts) {
  const std::vector<double> t{10, 20, 50, 100};
  EXPECT_EQ(ReprojectionAccuracy(std::vector<double>{0, 0, 0, 0}, t),
            (std::vector<double>{100, 100, 100, 100}));
  EXPECT_EQ(ReprojectionAccuracy(std::vector<double>{5, 15, 60, 200}, t),
            (std::vector<double>{25, 50, 50, 75}));
  EXPECT_EQ(ReprojectionAccuracy(std::vector<double>{10}, t)[0], 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(ReprojectionAccuracy(std::vector<double>{inf}, t)[3], 0.0);
}

TEST(EvaluateTest, MonotoneAcrossThresholds) {
  std::vector<EvalImage> images;
  for (int i = 0; i < 20; ++i) {
    EvalImage im;
    im.name = "i" + std::to_string(i);
    im.camera = F100();
    im.points = {{0, 0, 4}, {1, 0.5, 8}};
    im.estimate = Pose(Eigen::AngleAxisd(0.01 * i * i, Vector3d::UnitY()).toRotationMatrix(),
                       Vector3d(0.05 * i * i, 0, 0));
    im.uncertainties["sampling-0.5"] = Unc(1, 1);
    im.uncertainties["sampling-0.1"] = Unc(2, 2);
    im.uncertainties["first-order"] = Unc(0.1, 0.1);
    images.push_back(im);
  }
  const std::vector<double> reproj = DefaultReprojectionThresholds();
  const EvalReport r = Evaluate(images, DefaultPoseThresholds(), reproj, "ref");
  for (std::size_t k = 1; k < r.pose_accuracy.size(); ++k) {
    EXPECT_GE(r.pose_accuracy[k], r.pose_accuracy[k - 1]);
  }
  for (std::size_t k = 1; k < r.reprojection_accuracy.size(); ++k) {
    EXPECT_GE(r.reprojection_accuracy[k], r.reprojection_accuracy[k - 1]);
  }
  ASSERT_EQ(r.per_image_accuracy.size(), 3u);
  EXPECT_EQ(r.per_image_accuracy[0].source, "sampling-0.5");
  EXPECT_EQ(r.per_image_accuracy[1].source, "sampling-0.1");
  EXPECT_EQ(r.per_image_accuracy[2].source, "first-order");
  EXPECT_FALSE(r.per_image_accuracy[2].headline);
  EXPECT_GE(r.per_image_accuracy[1].percentage, r.per_image_accuracy[0].percentage);
}

TEST(EvaluateTest, MissingSourceOnOneImage) {
  std::vector<EvalImage> images(2);
  images[0].camera = images[1].camera = F100();
  images[0].uncertainties["first-order"] = Unc(1, 1);
  EXPECT_THROW(Evaluate(images, DefaultPoseThresholds(),
                        DefaultReprojectionThresholds(), "ref"),
               Error);
}

TEST(SamplingSourceLabelTest, Format) {
  EXPECT_EQ(SamplingSourceLabel(0.5), "sampling-0.5");
  EXPECT_EQ(SamplingSourceLabel(0.1), "sampling-0.1");
}

}  // namespace
}  // namespace renderloc
