#include "renderloc/uncertainty.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "renderloc/error.h"
#include "renderloc/parallel.h"
#include "renderloc/random.h"

namespace renderloc {
namespace {

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

UncertaintyEstimate Summarize(const std::vector<std::optional<PoseError>>& errors,
                              UncertaintyMethod method, double ratio,
                              std::size_t requested) {
  std::vector<double> pos;
  std::vector<double> rot;
  for (const auto& e : errors) {
    if (!e) continue;
    pos.push_back(e->position_err);
    rot.push_back(e->rotation_err);
  }
  const std::size_t failed = requested - pos.size();
  if (pos.empty() || 10 * failed > requested) {
    throw Error(ErrorCode::kOptimizerFailure,
                std::to_string(failed) + " of " + std::to_string(requested) +
                    " re-solves failed");
  }
  UncertaintyEstimate est;
  est.position_unc = Median(std::move(pos));
  est.rotation_unc = Median(std::move(rot));
  est.method = method;
  est.num_samples = requested;
  est.ratio = ratio;
  return est;
}

}  // namespace

void NoiseModel::Validate() const {
  if (!(sigma_px > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_px must be > 0");
  }
}

const char* UncertaintyMethodName(UncertaintyMethod method) {
  switch (method) {
    case UncertaintyMethod::kFirstOrder: return "first-order";
    case UncertaintyMethod::kMonteCarlo: return "monte-carlo";
    case UncertaintyMethod::kSampling: return "sampling";
  }
  return "unknown";
}

UncertaintyMethod ParseUncertaintyMethod(const std::string& name) {
  if (name == "first-order") return UncertaintyMethod::kFirstOrder;
  if (name == "monte-carlo") return UncertaintyMethod::kMonteCarlo;
  if (name == "sampling") return UncertaintyMethod::kSampling;
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + name + "'");
}

Matrix6d PoseCovariance(const Corr2D3D& inliers, const Pose& pose,
                        const Camera& camera, const NoiseModel& noise) {
  noise.Validate();
  Matrix6d information = Matrix6d::Zero();
  const double inv_var = 1.0 / (noise.sigma_px * noise.sigma_px);
  for (const Correspondence& c : inliers) {
    Vector2d pixel;
    Matrix26d j;
    if (!ProjectWithJacobian(c.point, pose, camera, &pixel, &j)) {
      throw Error(ErrorCode::kBehindCamera, "inlier behind the refined pose");
    }
    information += inv_var * j.transpose() * j;
  }
  // Rank test on the scale-normalized information matrix.
  const Vector6d scale =
      information.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Matrix6d normalized = scale.asDiagonal() * information * scale.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Matrix6d> eig(normalized);
  const Vector6d values = eig.eigenvalues();
  if (inliers.size() < 3 || !(values.minCoeff() > 1e-10 * values.maxCoeff())) {
    throw Error(ErrorCode::kSingularInformation,
                "information matrix has rank < 6");
  }
  return scale.asDiagonal() *
         eig.eigenvectors() * values.cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose() * scale.asDiagonal();
}

UncertaintyEstimate FirstOrderUncertainty(const Corr2D3D& inliers,
                                          const Pose& pose,
                                          const Camera& camera,
                                          const NoiseModel& noise,
                                          std::size_t num_samples,
                                          std::uint64_t seed) {
  if (num_samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "num_samples must be > 0");
  }
  const Matrix6d covariance = PoseCovariance(inliers, pose, camera, noise);
  // Symmetric square root; stays defined for covariances near singular.
  const Eigen::SelfAdjointEigenSolver<Matrix6d> eig(covariance);
  const Matrix6d root = eig.eigenvectors() *
                        eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                        eig.eigenvectors().transpose();

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> pos(num_samples);
  std::vector<double> rot(num_samples);
  for (std::size_t n = 0; n < num_samples; ++n) {
    Vector6d z;
    for (int k = 0; k < 6; ++k) z[k] = normal(rng);
    const Vector6d delta = root * z;
    // Position offset R * t has the same norm as t.
    pos[n] = delta.tail<3>().norm();
    rot[n] = delta.head<3>().norm() * kRadToDeg;
  }
  UncertaintyEstimate est;
  est.position_unc = Median(std::move(pos));
  est.rotation_unc = Median(std::move(rot));
  est.method = UncertaintyMethod::kFirstOrder;
  est.num_samples = num_samples;
  est.ratio = 1.0;
  return est;
}

UncertaintyEstimate MonteCarloUncertainty(const Corr2D3D& inliers,
                                          const Pose& pose,
                                          const Camera& camera,
                                          const NoiseModel& noise,
                                          std::size_t num_samples,
                                          std::uint64_t seed,
                                          const LmOptions& lm, int threads) {
  noise.Validate();
  if (num_samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "num_samples must be > 0");
  }
  if (inliers.size() < 3) {
    throw Error(ErrorCode::kTooFewCorrespondences,
                "Monte Carlo needs >= 3 inliers");
  }
  Corr2D3D ideal = inliers;
  for (Correspondence& c : ideal) c.pixel = Project(c.point, pose, camera);

  std::vector<std::optional<PoseError>> errors(num_samples);
  ParallelFor(num_samples, threads, [&](std::size_t n) {
    Rng rng(DeriveSeed(seed, {n}));
    std::normal_distribution<double> normal(0.0, noise.sigma_px);
    Corr2D3D noisy = ideal;
    for (Correspondence& c : noisy) {
      c.pixel.x() += normal(rng);
      c.pixel.y() += normal(rng);
    }
    try {
      errors[n] = ComputePoseError(pose, OptimizePose(noisy, pose, camera, lm));
    } catch (const Error&) {
    }
  });
  return Summarize(errors, UncertaintyMethod::kMonteCarlo, 1.0, num_samples);
}

UncertaintyEstimate SamplingUncertainty(const Corr2D3D& inliers,
                                        const Pose& pose,
                                        const Camera& camera, double ratio,
                                        std::size_t num_samples,
                                        std::uint64_t seed,
                                        const RansacConfig& ransac,
                                        const LmOptions& lm, int threads) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ratio must be in (0, 1]");
  }
  if (num_samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "num_samples must be > 0");
  }
  const auto subset_size = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(inliers.size()) - 1e-9));
  if (subset_size < 3) {
    throw Error(ErrorCode::kSubsetTooSmall,
                "subset of " + std::to_string(subset_size) +
                    " inliers; need >= 3");
  }

  std::vector<std::optional<PoseError>> errors(num_samples);
  ParallelFor(num_samples, threads, [&](std::size_t n) {
    Rng rng(DeriveSeed(seed, {n}));
    std::vector<std::size_t> index(inliers.size());
    std::iota(index.begin(), index.end(), 0);
    // Partial Fisher-Yates: the first subset_size entries form the sample.
    for (std::size_t i = 0; i < subset_size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, index.size() - 1);
      std::swap(index[i], index[pick(rng)]);
    }
    Corr2D3D subset;
    subset.reserve(subset_size);
    for (std::size_t i = 0; i < subset_size; ++i) {
      subset.push_back(inliers[index[i]]);
    }
    RansacConfig cfg = ransac;
    cfg.rng_seed = DeriveSeed(seed, {n, 1});
    try {
      const RansacResult robust = LoRansac(subset, camera, cfg, lm);
      Corr2D3D robust_inliers;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        if (robust.inlier_mask[i]) robust_inliers.push_back(subset[i]);
      }
      errors[n] = ComputePoseError(
          pose, OptimizePose(robust_inliers, robust.pose, camera, lm));
    } catch (const Error&) {
    }
  });
  return Summarize(errors, UncertaintyMethod::kSampling, ratio, num_samples);
}

}  // namespace renderloc
