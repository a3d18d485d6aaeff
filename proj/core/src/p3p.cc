#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "renderloc/error.h"
#include "renderloc/robust_pose.h"

namespace renderloc {
namespace {

// Real roots of a4 x^4 + ... + a0, Newton-polished.
std::vector<double> SolveQuartic(const std::array<double, 5>& a) {
  // a[0] is the leading coefficient.
  int degree = 4;
  int lead = 0;
  const double scale = std::max({std::abs(a[0]), std::abs(a[1]),
                                 std::abs(a[2]), std::abs(a[3]),
                                 std::abs(a[4])});
  if (scale == 0.0) return {};
  while (degree > 0 && std::abs(a[lead]) < 1e-14 * scale) {
    ++lead;
    --degree;
  }
  if (degree == 0) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 0; i < degree; ++i) {
    companion(0, i) = -a[lead + 1 + i] / a[lead];
  }
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const Eigen::VectorXcd eig = solver.eigenvalues();

  auto eval = [&](double x, double* deriv) {
    double p = 0.0;
    double dp = 0.0;
    for (int i = lead; i <= 4; ++i) {
      dp = dp * x + p;
      p = p * x + a[i];
    }
    *deriv = dp;
    return p;
  };

  std::vector<double> roots;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double re = eig[i].real();
    if (std::abs(eig[i].imag()) > 1e-6 * (1.0 + std::abs(re))) continue;
    double x = re;
    for (int k = 0; k < 5; ++k) {
      double dp = 0.0;
      const double p = eval(x, &dp);
      if (dp == 0.0) break;
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    roots.push_back(x);
  }
  return roots;
}

// World-to-camera rigid transform aligning `world` onto `cam` (Kabsch).
bool AlignPoints(const std::array<Vector3d, 3>& world,
                 const std::array<Vector3d, 3>& cam, Pose* pose) {
  Eigen::Matrix3d src;
  Eigen::Matrix3d dst;
  for (int i = 0; i < 3; ++i) {
    src.col(i) = world[i];
    dst.col(i) = cam[i];
  }
  const Eigen::Matrix4d t = Eigen::umeyama(src, dst, false);
  if (!t.allFinite()) return false;
  const Matrix3d r_w2c = t.topLeftCorner<3, 3>();
  const Vector3d t_w2c = t.topRightCorner<3, 1>();
  *pose = Pose::FromWorldToCamera(Eigen::Quaterniond(r_w2c), t_w2c);
  return true;
}

// Gauss-Newton on the three correspondences (6 equations, 6 unknowns).
Pose Polish(std::span<const Correspondence> corrs, const Pose& pose,
            const Camera& camera) {
  Pose current = pose;
  for (int iter = 0; iter < 4; ++iter) {
    Eigen::Matrix<double, 6, 6> jac;
    Vector6d residual;
    for (int i = 0; i < 3; ++i) {
      Vector2d pixel;
      Matrix26d j;
      if (!ProjectWithJacobian(corrs[i].point, current, camera, &pixel, &j)) {
        return current;
      }
      residual.segment<2>(2 * i) = pixel - corrs[i].pixel;
      jac.block<2, 6>(2 * i, 0) = j;
    }
    if (residual.norm() < 1e-12) break;
    const Vector6d delta = jac.fullPivLu().solve(-residual);
    if (!delta.allFinite()) break;
    const Pose next = PerturbPose(current, delta);
    double next_norm = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto pixel = TryProject(corrs[i].point, next, camera);
      if (!pixel) return current;
      next_norm += (*pixel - corrs[i].pixel).squaredNorm();
    }
    if (next_norm >= residual.squaredNorm()) break;
    current = next;
  }
  return current;
}

enum class P3PStatus { kOk, kDegenerate };

P3PStatus SolveP3PImpl(std::span<const Correspondence> corrs,
                       const Camera& camera, std::vector<Pose>* poses) {
  poses->clear();
  const Vector3d& p1 = corrs[0].point;
  const Vector3d& p2 = corrs[1].point;
  const Vector3d& p3 = corrs[2].point;

  const double a = (p2 - p3).norm();
  const double b = (p1 - p3).norm();
  const double c = (p1 - p2).norm();
  const double longest = std::max({a, b, c});
  if (!(longest > 0.0) || std::min({a, b, c}) < 1e-9 * longest) {
    return P3PStatus::kDegenerate;
  }
  if ((p2 - p1).cross(p3 - p1).norm() < 1e-9 * longest * longest) {
    return P3PStatus::kDegenerate;
  }

  const Vector3d f1 = camera.PixelToBearing(corrs[0].pixel);
  const Vector3d f2 = camera.PixelToBearing(corrs[1].pixel);
  const Vector3d f3 = camera.PixelToBearing(corrs[2].pixel);
  if (f1.cross(f2).norm() < 1e-12 || f1.cross(f3).norm() < 1e-12 ||
      f2.cross(f3).norm() < 1e-12) {
    return P3PStatus::kDegenerate;
  }

  const double cos_alpha = f2.dot(f3);
  const double cos_beta = f1.dot(f3);
  const double cos_gamma = f1.dot(f2);
  const double a2 = a * a;
  const double b2 = b * b;
  const double c2 = c * c;
  const double amc = (a2 - c2) / b2;
  const double apc = (a2 + c2) / b2;
  const double ca2 = cos_alpha * cos_alpha;
  const double cb2 = cos_beta * cos_beta;
  const double cg2 = cos_gamma * cos_gamma;

  // Quartic in v = s3 / s1 where s_i are distances along the bearings.
  const std::array<double, 5> coeffs{
      (amc - 1.0) * (amc - 1.0) - 4.0 * c2 / b2 * ca2,
      4.0 * (amc * (1.0 - amc) * cos_beta -
             (1.0 - apc) * cos_alpha * cos_gamma +
             2.0 * c2 / b2 * ca2 * cos_beta),
      2.0 * (amc * amc - 1.0 + 2.0 * amc * amc * cb2 +
             2.0 * (b2 - c2) / b2 * ca2 -
             4.0 * apc * cos_alpha * cos_beta * cos_gamma +
             2.0 * (b2 - a2) / b2 * cg2),
      4.0 * (-amc * (1.0 + amc) * cos_beta + 2.0 * a2 / b2 * cg2 * cos_beta -
             (1.0 - apc) * cos_alpha * cos_gamma),
      (1.0 + amc) * (1.0 + amc) - 4.0 * a2 / b2 * cg2};

  for (const double v : SolveQuartic(coeffs)) {
    if (!(v > 0.0)) continue;
    const double denom = 2.0 * (cos_gamma - v * cos_alpha);
    if (std::abs(denom) < 1e-14) continue;
    const double u =
        ((amc - 1.0) * v * v - 2.0 * amc * cos_beta * v + 1.0 + amc) / denom;
    if (!(u > 0.0)) continue;
    const double s1_sq = c2 / (1.0 + u * u - 2.0 * u * cos_gamma);
    if (!(s1_sq > 0.0)) continue;
    const double s1 = std::sqrt(s1_sq);
    const std::array<Vector3d, 3> cam{s1 * f1, u * s1 * f2, v * s1 * f3};
    Pose pose;
    if (!AlignPoints({p1, p2, p3}, cam, &pose)) continue;
    pose = Polish(corrs, pose, camera);

    bool reprojects = true;
    for (int i = 0; i < 3 && reprojects; ++i) {
      const auto pixel = TryProject(corrs[i].point, pose, camera);
      reprojects = pixel && (*pixel - corrs[i].pixel).norm() < 1e-6;
    }
    if (!reprojects) continue;

    bool duplicate = false;
    for (const Pose& other : *poses) {
      const PoseError d = ComputePoseError(other, pose);
      if (d.position_err < 1e-9 && d.rotation_err < 1e-7) duplicate = true;
    }
    if (!duplicate) poses->push_back(pose);
  }
  return P3PStatus::kOk;
}

}  // namespace

namespace internal {

bool SolveP3PNoThrow(std::span<const Correspondence> corrs,
                     const Camera& camera, std::vector<Pose>* poses) {
  return SolveP3PImpl(corrs, camera, poses) == P3PStatus::kOk;
}

}  // namespace internal

std::vector<Pose> SolveP3P(std::span<const Correspondence> corrs,
                           const Camera& camera) {
  if (corrs.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "P3P needs exactly 3 correspondences");
  }
  std::vector<Pose> poses;
  if (SolveP3PImpl(corrs, camera, &poses) != P3PStatus::kOk) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "collinear/repeated points or coincident bearings");
  }
  return poses;
}

}  // namespace renderloc
