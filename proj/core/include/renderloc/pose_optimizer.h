#pragma once

#include <vector>

#include "renderloc/correspondence.h"
#include "renderloc/geometry.h"

namespace renderloc {

struct LmOptions {
  int max_steps = 100;
  double tol_grad = 1e-10;
  double tol_step = 1e-12;
  double lambda_init = 1e-4;
};

struct LmSummary {
  int steps = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  // Cost after every accepted step, starting with the initial cost.
  std::vector<double> accepted_costs;
  bool converged = false;
};

// Sum of squared reprojection errors; +inf if any point is behind the camera.
double ReprojectionCost(const Corr2D3D& corrs, const Pose& pose,
                        const Camera& camera);

// Residuals (projection - observation) stacked as 2N and their 2N x 6
// Jacobian in the PerturbPose tangent. False if any point is behind.
bool LinearizeReprojection(const Corr2D3D& corrs, const Pose& pose,
                           const Camera& camera, Eigen::VectorXd* residuals,
                           Eigen::MatrixXd* jacobian);

// Levenberg-Marquardt over the 6-dof tangent with Marquardt (diagonal)
// scaling; damping x10 on rejection and x0.3 on acceptance. Points that are
// behind the camera at `initial` are excluded; a step that moves any used
// point behind the camera is rejected.
//
// Throws kTooFewCorrespondences for < 3 correspondences and
// kDivergedBehindCamera when fewer than 3 points start in front.
Pose OptimizePose(const Corr2D3D& corrs, const Pose& initial,
                  const Camera& camera, const LmOptions& options = {},
                  LmSummary* summary = nullptr);

}  // namespace renderloc
