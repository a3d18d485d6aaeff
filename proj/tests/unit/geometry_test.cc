#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "renderloc/error.h"
#include "renderloc/geometry.h"
#include "test_util.h"

namespace renderloc {
namespace {

using testing::OracleProject;
using testing::RandomPose;
using testing::RotationDeg;
using testing::TestCamera;

Camera SimpleCamera() {
  Camera cam;
  cam.fx = cam.fy = 100.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

TEST(ProjectTest, PrincipalAxisHitsPrincipalPoint) {
  const Vector2d u = Project(Vector3d(0, 0, 2), Pose::Identity(), SimpleCamera());
  EXPECT_DOUBLE_EQ(u.x(), 320.0);
  EXPECT_DOUBLE_EQ(u.y(), 240.0);
}

TEST(ProjectTest, OffAxisPoint) {
  // 320 + 100 * (1 / 2)
  const Vector2d u = Project(Vector3d(1, 0, 2), Pose::Identity(), SimpleCamera());
  EXPECT_DOUBLE_EQ(u.x(), 370.0);
  EXPECT_DOUBLE_EQ(u.y(), 240.0);
}

TEST(ProjectTest, BehindCameraThrows) {
  try {
    Project(Vector3d(0, 0, -1), Pose::Identity(), SimpleCamera());
    FAIL() << "expected BehindCamera";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBehindCamera);
  }
  EXPECT_FALSE(TryProject(Vector3d(0, 0, -1), Pose::Identity(), SimpleCamera()));
}

TEST(ProjectTest, MatchesOracleWithDistortion) {
  std::mt19937_64 rng(3);
  const Camera cam = TestCamera(true);
  for (int i = 0; i < 50; ++i) {
    const Pose pose = RandomPose(rng);
    for (const auto& c : testing::RandomCorrespondences(pose, cam, 10, rng)) {
      const Vector2d u = Project(c.point, pose, cam);
      EXPECT_NEAR((u - OracleProject(c.point, pose, cam)).norm(), 0.0, 1e-9);
    }
  }
}

TEST(CameraTest, UndistortInvertsDistort) {
  const Camera cam = TestCamera(true);
  for (double x = -0.7; x <= 0.7; x += 0.1) {
    for (double y = -0.55; y <= 0.55; y += 0.1) {
      const Vector2d n(x, y);
      EXPECT_NEAR((cam.Undistort(cam.Distort(n)) - n).norm(), 0.0, 1e-9);
    }
  }
}

TEST(CameraTest, DistortJacobianMatchesFiniteDifferences) {
  const Camera cam = TestCamera(true);
  const Vector2d n(0.31, -0.22);
  const Eigen::Matrix2d j = cam.DistortJacobian(n);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Vector2d step = Vector2d::Zero();
    step[k] = h;
    const Vector2d fd = (cam.Distort(n + step) - cam.Distort(n - step)) / (2 * h);
    EXPECT_NEAR((j.col(k) - fd).norm(), 0.0, 1e-8);
  }
}

TEST(CameraTest, BackProjectRoundTrip) {
  std::mt19937_64 rng(11);
  const Camera cam = TestCamera(true);
  const Pose pose = RandomPose(rng);
  const Vector3d p = pose.ToModel(Vector3d(0.4, -0.3, 3.5));
  const Vector2d u = Project(p, pose, cam);
  EXPECT_NEAR((BackProject(u, 3.5, pose, cam) - p).norm(), 0.0, 1e-8);
}

TEST(CameraTest, InImageUsesPixelCenters) {
  const Camera cam = SimpleCamera();
  EXPECT_TRUE(cam.InImage(Vector2d(-0.5, -0.5)));
  EXPECT_FALSE(cam.InImage(Vector2d(-0.51, 0)));
  EXPECT_TRUE(cam.InImage(Vector2d(639.49, 479.49)));
  EXPECT_FALSE(cam.InImage(Vector2d(639.5, 0)));
}

TEST(CameraTest, ValidateRejectsBadIntrinsics) {
  Camera cam = SimpleCamera();
  cam.fx = 0.0;
  EXPECT_THROW(cam.Validate(), Error);
  cam = SimpleCamera();
  cam.width = 0;
  EXPECT_THROW(cam.Validate(), Error);
}

TEST(PoseErrorTest, Identical) {
  std::mt19937_64 rng(5);
  const Pose t = RandomPose(rng);
  const PoseError e = ComputePoseError(t, t);
  EXPECT_EQ(e.position_err, 0.0);
  EXPECT_EQ(e.rotation_err, 0.0);
}

TEST(PoseErrorTest, PureTranslation) {
  const Pose ref(Matrix3d::Identity(), Vector3d(1, 2, 3));
  const Pose est(Matrix3d::Identity(), Vector3d(4, 6, 3));
  const PoseError e = ComputePoseError(ref, est);
  EXPECT_DOUBLE_EQ(e.position_err, 5.0);
  EXPECT_DOUBLE_EQ(e.rotation_err, 0.0);
}

TEST(PoseErrorTest, QuarterTurn) {
  std::mt19937_64 rng(6);
  const Pose ref = RandomPose(rng);
  const Matrix3d rz = Eigen::AngleAxisd(M_PI / 2, Vector3d::UnitZ()).toRotationMatrix();
  const PoseError e = ComputePoseError(ref, Pose(ref.rotation() * rz, ref.center()));
  EXPECT_NEAR(e.position_err, 0.0, 1e-15);
  EXPECT_NEAR(e.rotation_err, 90.0, 1e-12);
}

TEST(PoseErrorTest, SmallAnglesKeepPrecision) {
  const Matrix3d r = Eigen::AngleAxisd(1e-9, Vector3d(1, 2, 3).normalized())
                         .toRotationMatrix();
  const PoseError e = ComputePoseError(Pose::Identity(), Pose(r, Vector3d::Zero()));
  EXPECT_NEAR(e.rotation_err, 1e-9 * kRadToDeg, 1e-16);
}

TEST(PerturbPoseTest, ZeroIsIdentity) {
  std::mt19937_64 rng(7);
  const Pose t = RandomPose(rng);
  const Pose p = PerturbPose(t, Vector3d::Zero(), Vector3d::Zero());
  EXPECT_NEAR((p.rotation() - t.rotation()).norm(), 0.0, 1e-15);
  EXPECT_NEAR((p.center() - t.center()).norm(), 0.0, 1e-15);
}

TEST(PerturbPoseTest, AxisAngleMagnitudeIsRotationError) {
  const Pose p = PerturbPose(Pose::Identity(), Vector3d(0, 0, M_PI / 2),
                             Vector3d::Zero());
  const PoseError e = ComputePoseError(Pose::Identity(), p);
  EXPECT_NEAR(e.position_err, 0.0, 1e-15);
  EXPECT_NEAR(e.rotation_err, 90.0, 1e-12);
}

TEST(PerturbPoseTest, TranslationOnly) {
  std::mt19937_64 rng(8);
  const Pose t = RandomPose(rng);
  const Pose p = PerturbPose(t, Vector3d::Zero(), Vector3d(0.1, 0, 0));
  EXPECT_NEAR(ComputePoseError(t, p).position_err, 0.1, 1e-14);
  // Translation is in the camera frame of t.
  EXPECT_NEAR((p.center() - (t.center() + t.rotation().col(0) * 0.1)).norm(),
              0.0, 1e-14);
}

TEST(PoseTest, WorldToCameraRoundTrip) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const Pose t = RandomPose(rng);
    const Pose back =
        Pose::FromWorldToCamera(t.WorldToCameraRotation(), t.WorldToCameraTranslation());
    EXPECT_LT(RotationDeg(back.rotation(), t.rotation()), 1e-12);
    EXPECT_NEAR((back.center() - t.center()).norm(), 0.0, 1e-12);
    EXPECT_GE(t.WorldToCameraRotation().w(), 0.0);
  }
}

TEST(PoseTest, ComposeWithInverseIsIdentity) {
  std::mt19937_64 rng(10);
  const Pose t = RandomPose(rng);
  const Pose id = t.Compose(t.Inverse());
  EXPECT_NEAR((id.rotation() - Matrix3d::Identity()).norm(), 0.0, 1e-14);
  EXPECT_NEAR(id.center().norm(), 0.0, 1e-14);
}

TEST(ProjectWithJacobianTest, MatchesCentralDifferences) {
  std::mt19937_64 rng(12);
  const Camera cam = TestCamera(true);
  const Pose pose = RandomPose(rng);
  const auto corrs = testing::RandomCorrespondences(pose, cam, 5, rng);
  for (const auto& c : corrs) {
    Vector2d u;
    Matrix26d j;
    ASSERT_TRUE(ProjectWithJacobian(c.point, pose, cam, &u, &j));
    const double h = 1e-6;
    for (int k = 0; k < 6; ++k) {
      Vector6d d = Vector6d::Zero();
      d[k] = h;
      const Vector2d fd = (OracleProject(c.point, PerturbPose(pose, d), cam) -
                           OracleProject(c.point, PerturbPose(pose, -d), cam)) /
                          (2 * h);
      EXPECT_LT((j.col(k) - fd).norm(), 1e-4 * std::max(1.0, fd.norm()));
    }
  }
}

}  // namespace
}  // namespace renderloc
