#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace renderloc {

using Vector2d = Eigen::Vector2d;
using Vector3d = Eigen::Vector3d;
using Matrix3d = Eigen::Matrix3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix26d = Eigen::Matrix<double, 2, 6>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kDegToRad = kPi / 180.0;

// Default minimum camera-frame depth for a point to count as in front.
constexpr double kMinDepth = 1e-6;

Matrix3d SkewSymmetric(const Vector3d& v);
Matrix3d ExpSO3(const Vector3d& omega);

// Rigid camera pose stored camera-to-model: p = R * p_cam + c.
class Pose {
 public:
  Pose();
  Pose(const Matrix3d& rotation, const Vector3d& center);

  static Pose Identity() { return Pose(); }
  // World-to-camera rotation q and translation t (p_cam = q * p + t).
  static Pose FromWorldToCamera(const Eigen::Quaterniond& q,
                                const Vector3d& t);

  const Matrix3d& rotation() const { return rotation_; }
  const Vector3d& center() const { return center_; }

  Eigen::Quaterniond WorldToCameraRotation() const;
  Vector3d WorldToCameraTranslation() const;

  Vector3d ToModel(const Vector3d& p_cam) const {
    return rotation_ * p_cam + center_;
  }
  Vector3d ToCamera(const Vector3d& p_model) const {
    return rotation_.transpose() * (p_model - center_);
  }

  Pose Inverse() const;
  // (*this) applied after `other`: x -> this(other(x)).
  Pose Compose(const Pose& other) const;

 private:
  Matrix3d rotation_;
  Vector3d center_;
};

// Right-multiplicative tangent perturbation: T * (Exp(omega), t). The
// translation is expressed in the camera frame of T.
Pose PerturbPose(const Pose& pose, const Vector3d& rot_axis_angle,
                 const Vector3d& trans);
inline Pose PerturbPose(const Pose& pose, const Vector6d& delta) {
  return PerturbPose(pose, delta.head<3>(), delta.tail<3>());
}

struct PoseError {
  double position_err = 0.0;  // meters
  double rotation_err = 0.0;  // degrees
};

PoseError ComputePoseError(const Pose& reference, const Pose& estimate);

// Rotation angle of R_ref^-1 * R_est in radians.
double RelativeRotationAngle(const Matrix3d& r_ref, const Matrix3d& r_est);

// Pinhole camera with 4-coefficient radial-tangential distortion
// (k1, k2, p1, p2). Pixel centers sit at integer coordinates.
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  std::array<double, 4> distortion{0.0, 0.0, 0.0, 0.0};
  int width = 1;
  int height = 1;

  void Validate() const;
  bool HasDistortion() const;

  Vector2d Distort(const Vector2d& normalized) const;
  Eigen::Matrix2d DistortJacobian(const Vector2d& normalized) const;
  // Newton iteration, at most 10 steps, stops once the update is < 1e-10.
  Vector2d Undistort(const Vector2d& distorted) const;

  Vector2d NormalizedToPixel(const Vector2d& normalized) const;
  Vector2d PixelToNormalized(const Vector2d& pixel) const;
  Vector3d PixelToBearing(const Vector2d& pixel) const;

  bool InImage(const Vector2d& pixel) const;
  double Diagonal() const;
};

std::optional<Vector2d> TryProject(const Vector3d& p_model, const Pose& pose,
                                   const Camera& camera,
                                   double min_depth = kMinDepth);
// Throws Error(kBehindCamera) when the camera-frame depth is <= min_depth.
Vector2d Project(const Vector3d& p_model, const Pose& pose,
                 const Camera& camera, double min_depth = kMinDepth);

// Pixel plus its 2x6 Jacobian w.r.t. the PerturbPose tangent (omega, t).
// Returns false when the point is behind the camera.
bool ProjectWithJacobian(const Vector3d& p_model, const Pose& pose,
                         const Camera& camera, Vector2d* pixel,
                         Matrix26d* jacobian, double min_depth = kMinDepth);

// Lifts a pixel with camera-frame z-depth to a model-frame point.
Vector3d BackProject(const Vector2d& pixel, double depth, const Pose& pose,
                     const Camera& camera);

}  // namespace renderloc
