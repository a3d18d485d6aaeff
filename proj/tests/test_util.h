#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "renderloc/correspondence.h"
#include "renderloc/geometry.h"

namespace renderloc::testing {

// Hand-written pinhole plus radial-tangential model, kept independent of the
// library's projection code.
inline Vector2d OracleProject(const Vector3d& p_model, const Pose& pose,
                              const Camera& cam) {
  const Vector3d pc = pose.rotation().transpose() * (p_model - pose.center());
  const double x = pc.x() / pc.z();
  const double y = pc.y() / pc.z();
  const double r2 = x * x + y * y;
  const auto& d = cam.distortion;
  const double radial = 1.0 + d[0] * r2 + d[1] * r2 * r2;
  const double xd = x * radial + 2.0 * d[2] * x * y + d[3] * (r2 + 2.0 * x * x);
  const double yd = y * radial + d[2] * (r2 + 2.0 * y * y) + 2.0 * d[3] * x * y;
  return {cam.fx * xd + cam.cx, cam.fy * yd + cam.cy};
}

inline Camera TestCamera(bool distorted = false) {
  Camera cam;
  cam.fx = 400.0;
  cam.fy = 410.0;
  cam.cx = 319.5;
  cam.cy = 239.5;
  cam.width = 640;
  cam.height = 480;
  if (distorted) cam.distortion = {-0.08, 0.02, 0.0015, -0.001};
  return cam;
}

inline Matrix3d RandomRotation(std::mt19937_64& rng, double max_angle = M_PI) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_angle);
  const Vector3d axis = Vector3d(n(rng), n(rng), n(rng)).normalized();
  return Eigen::AngleAxisd(u(rng), axis).toRotationMatrix();
}

inline Pose RandomPose(std::mt19937_64& rng, double max_angle = M_PI,
                       double max_offset = 5.0) {
  std::uniform_real_distribution<double> u(-max_offset, max_offset);
  return Pose(RandomRotation(rng, max_angle), Vector3d(u(rng), u(rng), u(rng)));
}

// Points in front of `pose`, spread over the image, with depths in
// [min_depth, max_depth]; pixels are exact projections.
inline Corr2D3D RandomCorrespondences(const Pose& pose, const Camera& cam,
                                      int count, std::mt19937_64& rng,
                                      double min_depth = 2.0,
                                      double max_depth = 20.0) {
  std::uniform_real_distribution<double> ux(10.0, cam.width - 10.0);
  std::uniform_real_distribution<double> uy(10.0, cam.height - 10.0);
  std::uniform_real_distribution<double> uz(min_depth, max_depth);
  Corr2D3D out;
  while (static_cast<int>(out.size()) < count) {
    const double z = uz(rng);
    const Vector3d pc((ux(rng) - cam.cx) / cam.fx * z,
                      (uy(rng) - cam.cy) / cam.fy * z, z);
    const Vector3d p = pose.rotation() * pc + pose.center();
    const Vector2d pixel = OracleProject(p, pose, cam);
    if (!cam.InImage(pixel)) continue;
    out.push_back({pixel, p});
  }
  return out;
}

// Angle between two rotations from the chordal distance
// |A - B|_F = 2 sqrt(2) sin(theta / 2), accurate for tiny angles.
inline double RotationDeg(const Matrix3d& a, const Matrix3d& b) {
  const double chord = (a - b).norm() / (2.0 * std::sqrt(2.0));
  return 2.0 * std::asin(std::min(1.0, chord)) * 180.0 / M_PI;
}

}  // namespace renderloc::testing
