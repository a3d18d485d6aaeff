#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "renderloc/correspondence.h"
#include "renderloc/geometry.h"
#include "renderloc/pose_optimizer.h"
#include "renderloc/robust_pose.h"

namespace renderloc {

struct NoiseModel {
  double sigma_px = 1.0;  // isotropic pixel standard deviation

  void Validate() const;
};

enum class UncertaintyMethod { kFirstOrder, kMonteCarlo, kSampling };

const char* UncertaintyMethodName(UncertaintyMethod method);
UncertaintyMethod ParseUncertaintyMethod(const std::string& name);

struct UncertaintyEstimate {
  double position_unc = 0.0;  // meters
  double rotation_unc = 0.0;  // degrees
  UncertaintyMethod method = UncertaintyMethod::kFirstOrder;
  std::size_t num_samples = 0;
  double ratio = 1.0;  // subset ratio k, 1 for the other methods
};

// Covariance of the tangent (omega, t) at `pose`:
// (sum_l J_l^T Sigma_u^-1 J_l)^-1. Throws kSingularInformation if rank < 6.
Matrix6d PoseCovariance(const Corr2D3D& inliers, const Pose& pose,
                        const Camera& camera, const NoiseModel& noise);

// Medians of |dc| and |dr| over draws from N(0, PoseCovariance).
UncertaintyEstimate FirstOrderUncertainty(const Corr2D3D& inliers,
                                          const Pose& pose,
                                          const Camera& camera,
                                          const NoiseModel& noise,
                                          std::size_t num_samples = 1000,
                                          std::uint64_t seed = 0);

// Re-solves from noise-free projections plus Gaussian pixel noise and
// returns the medians of the pose errors against `pose`. Fails only when
// more than 10% of the re-solves fail.
UncertaintyEstimate MonteCarloUncertainty(const Corr2D3D& inliers,
                                          const Pose& pose,
                                          const Camera& camera,
                                          const NoiseModel& noise,
                                          std::size_t num_samples = 200,
                                          std::uint64_t seed = 0,
                                          const LmOptions& lm = {},
                                          int threads = 1);

// Draws ceil(ratio * N) inliers without replacement, runs LO-RANSAC and the
// least-squares refit, and takes medians of the errors against `pose`.
// Throws kSubsetTooSmall when the subset has fewer than 3 entries.
UncertaintyEstimate SamplingUncertainty(const Corr2D3D& inliers,
                                        const Pose& pose,
                                        const Camera& camera, double ratio,
                                        std::size_t num_samples = 50,
                                        std::uint64_t seed = 0,
                                        const RansacConfig& ransac = {},
                                        const LmOptions& lm = {},
                                        int threads = 1);

}  // namespace renderloc
