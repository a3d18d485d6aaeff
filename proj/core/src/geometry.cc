#include "renderloc/geometry.h"

#include <algorithm>
#include <cmath>

#include "renderloc/error.h"

namespace renderloc {
namespace {

Matrix3d Orthonormalize(const Matrix3d& r) {
  return Eigen::Quaterniond(r).normalized().toRotationMatrix();
}

}  // namespace

Matrix3d SkewSymmetric(const Vector3d& v) {
  Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Matrix3d ExpSO3(const Vector3d& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) {
    return Matrix3d::Identity() + SkewSymmetric(omega);
  }
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

Pose::Pose() : rotation_(Matrix3d::Identity()), center_(Vector3d::Zero()) {}

Pose::Pose(const Matrix3d& rotation, const Vector3d& center)
    : rotation_(rotation), center_(center) {}

Pose Pose::FromWorldToCamera(const Eigen::Quaterniond& q, const Vector3d& t) {
  const Matrix3d r_w2c = q.normalized().toRotationMatrix();
  return Pose(r_w2c.transpose(), -r_w2c.transpose() * t);
}

Eigen::Quaterniond Pose::WorldToCameraRotation() const {
  Eigen::Quaterniond q(Matrix3d(rotation_.transpose()));
  q.normalize();
  // Canonical sign so that conversions are reproducible.
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

Vector3d Pose::WorldToCameraTranslation() const {
  return -rotation_.transpose() * center_;
}

Pose Pose::Inverse() const {
  return Pose(rotation_.transpose(), -rotation_.transpose() * center_);
}

Pose Pose::Compose(const Pose& other) const {
  return Pose(Orthonormalize(rotation_ * other.rotation_),
              rotation_ * other.center_ + center_);
}

Pose PerturbPose(const Pose& pose, const Vector3d& rot_axis_angle,
                 const Vector3d& trans) {
  return pose.Compose(Pose(ExpSO3(rot_axis_angle), trans));
}

double RelativeRotationAngle(const Matrix3d& r_ref, const Matrix3d& r_est) {
  // Same angle as arccos((trace - 1) / 2), evaluated through atan2 so that
  // tiny rotations keep full precision.
  const Matrix3d rel = r_ref.transpose() * r_est;
  const double cos_part = 0.5 * (rel.trace() - 1.0);
  const Vector3d axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0),
                      rel(1, 0) - rel(0, 1));
  const double sin_part = 0.5 * axis.norm();
  return std::atan2(sin_part, std::clamp(cos_part, -1.0, 1.0));
}

PoseError ComputePoseError(const Pose& reference, const Pose& estimate) {
  PoseError err;
  err.position_err = (reference.center() - estimate.center()).norm();
  err.rotation_err =
      RelativeRotationAngle(reference.rotation(), estimate.rotation()) *
      kRadToDeg;
  return err;
}

void Camera::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be > 0");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be > 0");
  }
  for (double d : distortion) {
    if (!std::isfinite(d)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite distortion");
    }
  }
}

bool Camera::HasDistortion() const {
  return std::any_of(distortion.begin(), distortion.end(),
                     [](double d) { return d != 0.0; });
}

Vector2d Camera::Distort(const Vector2d& n) const {
  const auto [k1, k2, p1, p2] = distortion;
  const double x = n.x();
  const double y = n.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
  return {x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x),
          y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y};
}

Eigen::Matrix2d Camera::DistortJacobian(const Vector2d& n) const {
  const auto [k1, k2, p1, p2] = distortion;
  const double x = n.x();
  const double y = n.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
  const double dradial_dr2 = k1 + 2.0 * k2 * r2;
  Eigen::Matrix2d j;
  j(0, 0) = radial + 2.0 * x * x * dradial_dr2 + 2.0 * p1 * y + 6.0 * p2 * x;
  j(0, 1) = 2.0 * x * y * dradial_dr2 + 2.0 * p1 * x + 2.0 * p2 * y;
  j(1, 0) = 2.0 * x * y * dradial_dr2 + 2.0 * p1 * x + 2.0 * p2 * y;
  j(1, 1) = radial + 2.0 * y * y * dradial_dr2 + 6.0 * p1 * y + 2.0 * p2 * x;
  return j;
}

Vector2d Camera::Undistort(const Vector2d& distorted) const {
  if (!HasDistortion()) return distorted;
  Vector2d x = distorted;
  for (int iter = 0; iter < 10; ++iter) {
    const Vector2d residual = Distort(x) - distorted;
    const Vector2d step = DistortJacobian(x).partialPivLu().solve(residual);
    x -= step;
    if (step.norm() < 1e-10) break;
  }
  return x;
}

Vector2d Camera::NormalizedToPixel(const Vector2d& normalized) const {
  const Vector2d d = Distort(normalized);
  return {fx * d.x() + cx, fy * d.y() + cy};
}

Vector2d Camera::PixelToNormalized(const Vector2d& pixel) const {
  return Undistort(Vector2d((pixel.x() - cx) / fx, (pixel.y() - cy) / fy));
}

Vector3d Camera::PixelToBearing(const Vector2d& pixel) const {
  return PixelToNormalized(pixel).homogeneous().normalized();
}

bool Camera::InImage(const Vector2d& pixel) const {
  return pixel.x() >= -0.5 && pixel.y() >= -0.5 &&
         pixel.x() < width - 0.5 && pixel.y() < height - 0.5;
}

double Camera::Diagonal() const {
  return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

std::optional<Vector2d> TryProject(const Vector3d& p_model, const Pose& pose,
                                   const Camera& camera, double min_depth) {
  const Vector3d p_cam = pose.ToCamera(p_model);
  if (!(p_cam.z() > min_depth)) return std::nullopt;
  return camera.NormalizedToPixel(p_cam.hnormalized());
}

Vector2d Project(const Vector3d& p_model, const Pose& pose,
                 const Camera& camera, double min_depth) {
  const auto pixel = TryProject(p_model, pose, camera, min_depth);
  if (!pixel) {
    throw Error(ErrorCode::kBehindCamera, "point is not in front of camera");
  }
  return *pixel;
}

bool ProjectWithJacobian(const Vector3d& p_model, const Pose& pose,
                         const Camera& camera, Vector2d* pixel,
                         Matrix26d* jacobian, double min_depth) {
  const Vector3d p_cam = pose.ToCamera(p_model);
  if (!(p_cam.z() > min_depth)) return false;
  const double inv_z = 1.0 / p_cam.z();
  const Vector2d normalized = p_cam.head<2>() * inv_z;
  const Vector2d distorted = camera.Distort(normalized);
  *pixel = Vector2d(camera.fx * distorted.x() + camera.cx,
                    camera.fy * distorted.y() + camera.cy);
  if (jacobian == nullptr) return true;

  Eigen::Matrix<double, 2, 3> dn_dpc;
  dn_dpc << inv_z, 0.0, -normalized.x() * inv_z, 0.0, inv_z,
      -normalized.y() * inv_z;
  const Eigen::Matrix2d du_dd =
      Eigen::Vector2d(camera.fx, camera.fy).asDiagonal();
  const Eigen::Matrix<double, 2, 3> du_dpc =
      du_dd * camera.DistortJacobian(normalized) * dn_dpc;
  // p_cam(delta) = Exp(-omega) * (p_cam - t).
  jacobian->leftCols<3>() = du_dpc * SkewSymmetric(p_cam);
  jacobian->rightCols<3>() = -du_dpc;
  return true;
}

Vector3d BackProject(const Vector2d& pixel, double depth, const Pose& pose,
                     const Camera& camera) {
  const Vector2d n = camera.PixelToNormalized(pixel);
  return pose.ToModel(Vector3d(n.x() * depth, n.y() * depth, depth));
}

}  // namespace renderloc
