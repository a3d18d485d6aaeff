#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "renderloc/geometry.h"

namespace renderloc {

struct TriMesh {
  std::vector<Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
  // Either empty or one RGB triple per vertex.
  std::vector<std::array<std::uint8_t, 3>> colors;

  bool HasColors() const { return !colors.empty(); }
  // Throws Error(kInvalidArgument) on out-of-range or repeated face indices.
  void Validate() const;
};

// Camera-frame z-depth per pixel, row-major. 0 marks an uncovered pixel.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, std::vector<double> depth);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<double>& data() const { return depth_; }

  bool IsValid(int x, int y) const;
  double At(int x, int y) const { return depth_[Index(x, y)]; }
  std::size_t NumValid() const;

  bool operator==(const DepthMap& other) const = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> depth_;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB
};

// Z-buffer rasterization without culling. Distorted cameras are rendered on
// an undistorted grid that is then sampled at each distorted pixel center;
// the stored depth is the exact ray/triangle-plane intersection.
DepthMap RenderDepth(const TriMesh& mesh, const Pose& pose,
                     const Camera& camera);

// Flat per-face color (mean of the face's vertex colors) for overlays. Faces
// without colors render mid-gray; uncovered pixels are black.
RgbImage RenderColor(const TriMesh& mesh, const Pose& pose,
                     const Camera& camera);

// Nearest-pixel lookup after rounding; nullopt when out of bounds or
// uncovered.
std::optional<double> DepthAt(const DepthMap& depth, const Vector2d& pixel);

}  // namespace renderloc
