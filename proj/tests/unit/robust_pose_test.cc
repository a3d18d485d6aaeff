#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "renderloc/error.h"
#include "renderloc/robust_pose.h"
#include "test_util.h"

namespace renderloc {
namespace {

using testing::RandomCorrespondences;
using testing::RandomPose;
using testing::RotationDeg;
using testing::TestCamera;

ErrorCode P3PError(const Corr2D3D& corrs, const Camera& cam) {
  try {
    SolveP3P(corrs, cam);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIo;
}

TEST(P3PTest, RecoversGroundTruth) {
  std::mt19937_64 rng(31);
  for (bool distorted : {false, true}) {
    const Camera cam = TestCamera(distorted);
    for (int trial = 0; trial < 200; ++trial) {
      const Pose truth = RandomPose(rng);
      const Corr2D3D corrs = RandomCorrespondences(truth, cam, 3, rng, 1.0, 30.0);
      const std::vector<Pose> sols = SolveP3P(corrs, cam);
      ASSERT_FALSE(sols.empty());
      ASSERT_LE(sols.size(), 4u);
      double best_pos = 1e9;
      double best_rot = 1e9;
      for (const Pose& s : sols) {
        const double pos = (s.center() - truth.center()).norm();
        if (pos < best_pos) {
          best_pos = pos;
          best_rot = RotationDeg(s.rotation(), truth.rotation());
        }
      }
      EXPECT_LT(best_pos, 1e-6) << "trial " << trial;
      EXPECT_LT(best_rot, 1e-6) << "trial " << trial;
    }
  }
}

TEST(P3PTest, EverySolutionReprojects) {
  std::mt19937_64 rng(32);
  const Camera cam = TestCamera();
  for (int trial = 0; trial < 50; ++trial) {
    const Pose truth = RandomPose(rng);
    const Corr2D3D corrs = RandomCorrespondences(truth, cam, 3, rng);
    for (const Pose& s : SolveP3P(corrs, cam)) {
      for (const auto& c : corrs) {
        EXPECT_LT((Project(c.point, s, cam) - c.pixel).norm(), 1e-6);
      }
    }
  }
}

TEST(P3PTest, CollinearPoints) {
  const Camera cam = TestCamera();
  Corr2D3D corrs;
  for (double t : {0.0, 1.0, 2.5}) {
    const Vector3d p(-1 + t, 0.5 * t, 5 + t);
    corrs.push_back({Project(p, Pose::Identity(), cam), p});
  }
  EXPECT_EQ(P3PError(corrs, cam), ErrorCode::kDegenerateConfiguration);
}

TEST(P3PTest, DuplicatedPoint) {
  const Camera cam = TestCamera();
  const Vector3d a(0, 0, 5), b(1, 0, 6);
  const Corr2D3D corrs{{Project(a, Pose::Identity(), cam), a},
                       {Project(b, Pose::Identity(), cam), b},
                       {Project(b, Pose::Identity(), cam), b}};
  EXPECT_EQ(P3PError(corrs, cam), ErrorCode::kDegenerateConfiguration);
}

TEST(P3PTest, WrongCount) {
  std::mt19937_64 rng(33);
  const Camera cam = TestCamera();
  EXPECT_EQ(P3PError(RandomCorrespondences(Pose::Identity(), cam, 4, rng), cam),
            ErrorCode::kInvalidArgument);
}

// Replaces `ratio` of the observations with uniform pixels and adds noise.
Corr2D3D Corrupt(Corr2D3D corrs, const Camera& cam, double ratio, double sigma,
                 std::mt19937_64& rng, std::vector<bool>* is_outlier = nullptr) {
  std::normal_distribution<double> n(0.0, sigma);
  std::uniform_real_distribution<double> ux(0, cam.width - 1), uy(0, cam.height - 1);
  const std::size_t outliers = static_cast<std::size_t>(ratio * corrs.size() + 0.5);
  if (is_outlier) is_outlier->assign(corrs.size(), false);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (i < outliers) {
      corrs[i].pixel = {ux(rng), uy(rng)};
      if (is_outlier) (*is_outlier)[i] = true;
    } else {
      corrs[i].pixel += Vector2d(n(rng), n(rng));
    }
  }
  return corrs;
}

TEST(LoRansacTest, OutlierFree) {
  std::mt19937_64 rng(34);
  const Camera cam = TestCamera();
  const Pose truth = RandomPose(rng);
  const Corr2D3D corrs = RandomCorrespondences(truth, cam, 100, rng);
  const RansacResult r = LoRansac(corrs, cam, {});
  EXPECT_EQ(r.inlier_count, 100u);
  EXPECT_LT((r.pose.center() - truth.center()).norm(), 1e-6);
  EXPECT_LT(RotationDeg(r.pose.rotation(), truth.rotation()), 1e-6);
}

TEST(LoRansacTest, ThirtyPercentOutliers) {
  const Camera cam = TestCamera();
  int successes = 0;
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const Pose truth = RandomPose(rng);
    const Corr2D3D corrs =
        Corrupt(RandomCorrespondences(truth, cam, 100, rng), cam, 0.3, 1.0, rng);
    RansacConfig config;
    config.rng_seed = seed;
    const RansacResult r = LoRansac(corrs, cam, config);
    if ((r.pose.center() - truth.center()).norm() < 0.05 &&
        RotationDeg(r.pose.rotation(), truth.rotation()) < 0.1 &&
        r.inlier_count >= 60) {
      ++successes;
    }
  }
  EXPECT_GE(successes, 48);
}

TEST(LoRansacTest, IndependentOfInputOrder) {
  std::mt19937_64 rng(35);
  const Camera cam = TestCamera();
  const Pose truth = RandomPose(rng);
  std::vector<bool> outlier;
  const Corr2D3D corrs =
      Corrupt(RandomCorrespondences(truth, cam, 80, rng), cam, 0.3, 1.0, rng, &outlier);
  Corr2D3D reversed(corrs.rbegin(), corrs.rend());
  const RansacResult a = LoRansac(corrs, cam, {});
  const RansacResult b = LoRansac(reversed, cam, {});
  EXPECT_EQ(a.pose.center(), b.pose.center());
  EXPECT_EQ(a.inlier_count, b.inlier_count);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    EXPECT_EQ(a.inlier_mask[i], b.inlier_mask[corrs.size() - 1 - i]);
  }
  // Noise is 1 px against a 4 px threshold, so the true outliers should be
  // flagged except for the rare one that lands near its true projection.
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < corrs.size(); ++i) flagged += outlier[i] && !a.inlier_mask[i];
  EXPECT_GE(flagged, 22u);
}

TEST(LoRansacTest, SameSeedSameResult) {
  std::mt19937_64 rng(36);
  const Camera cam = TestCamera();
  const Pose truth = RandomPose(rng);
  const Corr2D3D corrs =
      Corrupt(RandomCorrespondences(truth, cam, 60, rng), cam, 0.4, 1.0, rng);
  RansacConfig config;
  config.rng_seed = 9;
  const RansacResult a = LoRansac(corrs, cam, config);
  const RansacResult b = LoRansac(corrs, cam, config);
  EXPECT_EQ(a.pose.rotation(), b.pose.rotation());
  EXPECT_EQ(a.inlier_mask, b.inlier_mask);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(LoRansacTest, TooFewCorrespondences) {
  std::mt19937_64 rng(37);
  const Camera cam = TestCamera();
  try {
    LoRansac(RandomCorrespondences(Pose::Identity(), cam, 2, rng), cam, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewCorrespondences);
  }
}

TEST(LoRansacTest, AllOutliersFindsNoUsefulModel) {
  std::mt19937_64 rng(38);
  const Camera cam = TestCamera();
  const Corr2D3D corrs =
      Corrupt(RandomCorrespondences(Pose::Identity(), cam, 60, rng), cam, 1.0, 0.0, rng);
  try {
    const RansacResult r = LoRansac(corrs, cam, {});
    // Any sample supports itself, and chance agreement at 4 px adds a few.
    EXPECT_LE(r.inlier_count, 6u);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoModelFound);
  }
}

TEST(EffectiveInliersTest, Cells) {
  const std::vector<Vector2d> same_cell{{1, 1}, {10, 10}, {49, 49}, {25, 3}, {0, 40}};
  EXPECT_EQ(CountEffectiveInliers(same_cell, 640, 480), 1u);
  const std::vector<Vector2d> three{{10, 10}, {110, 10}, {10, 110}};
  EXPECT_EQ(CountEffectiveInliers(three, 640, 480), 3u);
  EXPECT_EQ(CountEffectiveInliers({}, 640, 480), 0u);
  const std::vector<Vector2d> edge{{49.9, 0}, {50.0, 0}};
  EXPECT_EQ(CountEffectiveInliers(edge, 640, 480), 2u);
}

TEST(RansacConfigTest, Defaults) {
  const RansacConfig c;
  EXPECT_EQ(c.cell_px, 50);
  EXPECT_NO_THROW(c.Validate());
  RansacConfig bad;
  bad.inlier_threshold_px = 0;
  EXPECT_THROW(bad.Validate(), Error);
}

}  // namespace
}  // namespace renderloc
