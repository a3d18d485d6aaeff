#include "renderloc/pose_optimizer.h"

#include <cmath>
#include <limits>

#include "renderloc/error.h"

namespace renderloc {

double ReprojectionCost(const Corr2D3D& corrs, const Pose& pose,
                        const Camera& camera) {
  double cost = 0.0;
  for (const Correspondence& c : corrs) {
    const auto pixel = TryProject(c.point, pose, camera);
    if (!pixel) return std::numeric_limits<double>::infinity();
    cost += (*pixel - c.pixel).squaredNorm();
  }
  return cost;
}

bool LinearizeReprojection(const Corr2D3D& corrs, const Pose& pose,
                           const Camera& camera, Eigen::VectorXd* residuals,
                           Eigen::MatrixXd* jacobian) {
  const auto n = static_cast<Eigen::Index>(corrs.size());
  residuals->resize(2 * n);
  jacobian->resize(2 * n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector2d pixel;
    Matrix26d j;
    if (!ProjectWithJacobian(corrs[i].point, pose, camera, &pixel, &j)) {
      return false;
    }
    residuals->segment<2>(2 * i) = pixel - corrs[i].pixel;
    jacobian->block<2, 6>(2 * i, 0) = j;
  }
  return true;
}

Pose OptimizePose(const Corr2D3D& corrs, const Pose& initial,
                  const Camera& camera, const LmOptions& options,
                  LmSummary* summary) {
  if (corrs.size() < 3) {
    throw Error(ErrorCode::kTooFewCorrespondences,
                "pose optimization needs >= 3 correspondences, got " +
                    std::to_string(corrs.size()));
  }
  Corr2D3D active;
  active.reserve(corrs.size());
  for (const Correspondence& c : corrs) {
    if (TryProject(c.point, initial, camera)) active.push_back(c);
  }
  if (active.size() < 3) {
    throw Error(ErrorCode::kDivergedBehindCamera,
                "fewer than 3 points in front of the initial pose");
  }

  LmSummary local;
  LmSummary& s = summary != nullptr ? *summary : local;
  s = LmSummary{};

  Pose pose = initial;
  double lambda = options.lambda_init;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  LinearizeReprojection(active, pose, camera, &r, &jac);
  double cost = r.squaredNorm();
  s.initial_cost = cost;
  s.accepted_costs.push_back(cost);

  Matrix6d hessian = jac.transpose() * jac;
  Vector6d gradient = jac.transpose() * r;

  while (s.steps < options.max_steps) {
    if (gradient.lpNorm<Eigen::Infinity>() < options.tol_grad) {
      s.converged = true;
      break;
    }
    Matrix6d damped = hessian;
    for (int k = 0; k < 6; ++k) {
      damped(k, k) += lambda * std::max(hessian(k, k), 1e-12);
    }
    const Vector6d delta = damped.ldlt().solve(-gradient);
    ++s.steps;
    if (!delta.allFinite()) {
      lambda *= 10.0;
      continue;
    }
    if (delta.norm() < options.tol_step) {
      s.converged = true;
      break;
    }

    const Pose candidate = PerturbPose(pose, delta);
    Eigen::VectorXd r_new;
    Eigen::MatrixXd jac_new;
    const bool in_front =
        LinearizeReprojection(active, candidate, camera, &r_new, &jac_new);
    const double cost_new =
        in_front ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();

    if (cost_new < cost) {
      const double decrease = cost - cost_new;
      pose = candidate;
      cost = cost_new;
      r = std::move(r_new);
      jac = std::move(jac_new);
      hessian = jac.transpose() * jac;
      gradient = jac.transpose() * r;
      lambda = std::max(lambda * 0.3, 1e-12);
      s.accepted_costs.push_back(cost);
      if (decrease <= 1e-15 * cost) {
        s.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e16) {
        // No descent direction left at machine precision.
        s.converged = true;
        break;
      }
    }
  }
  s.final_cost = cost;
  return pose;
}

}  // namespace renderloc
