#include "renderloc/mesh.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "renderloc/error.h"

namespace renderloc {
namespace {

constexpr double kNearPlane = 1e-4;

struct RasterResult {
  int width = 0;
  int height = 0;
  std::vector<int> face;  // -1 where uncovered
  std::vector<double> depth;
};

struct ScreenVertex {
  double x;
  double y;
  double inv_z;
};

// Sutherland-Hodgman against z >= kNearPlane.
std::vector<Vector3d> ClipNear(const std::array<Vector3d, 3>& tri) {
  std::vector<Vector3d> out;
  out.reserve(4);
  for (int i = 0; i < 3; ++i) {
    const Vector3d& a = tri[i];
    const Vector3d& b = tri[(i + 1) % 3];
    const bool a_in = a.z() >= kNearPlane;
    const bool b_in = b.z() >= kNearPlane;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      Vector3d p = a + t * (b - a);
      p.z() = kNearPlane;
      out.push_back(p);
    }
  }
  return out;
}

double Edge(const ScreenVertex& a, const ScreenVertex& b, double px,
            double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Grid of ideal (undistorted) pixel coordinates. For an undistorted camera
// it coincides with the image grid.
struct IdealGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  int width = 0;
  int height = 0;
  std::vector<Vector2d> sample;  // per output pixel, in grid coordinates
};

IdealGrid MakeIdealGrid(const Camera& camera) {
  IdealGrid grid;
  if (!camera.HasDistortion()) {
    grid.width = camera.width;
    grid.height = camera.height;
    return grid;
  }
  const std::size_t n = static_cast<std::size_t>(camera.width) *
                        static_cast<std::size_t>(camera.height);
  grid.sample.resize(n);
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const Vector2d normalized = camera.PixelToNormalized(Vector2d(x, y));
      const Vector2d ideal(camera.fx * normalized.x() + camera.cx,
                           camera.fy * normalized.y() + camera.cy);
      grid.sample[static_cast<std::size_t>(y) * camera.width + x] = ideal;
      min_x = std::min(min_x, ideal.x());
      min_y = std::min(min_y, ideal.y());
      max_x = std::max(max_x, ideal.x());
      max_y = std::max(max_y, ideal.y());
    }
  }
  grid.origin_x = std::floor(min_x) - 1.0;
  grid.origin_y = std::floor(min_y) - 1.0;
  grid.width = static_cast<int>(std::ceil(max_x) - grid.origin_x) + 2;
  grid.height = static_cast<int>(std::ceil(max_y) - grid.origin_y) + 2;
  for (Vector2d& s : grid.sample) {
    s -= Vector2d(grid.origin_x, grid.origin_y);
  }
  return grid;
}

RasterResult Rasterize(const TriMesh& mesh, const Pose& pose,
                       const Camera& camera) {
  camera.Validate();
  mesh.Validate();
  const IdealGrid grid = MakeIdealGrid(camera);
  const std::size_t grid_size = static_cast<std::size_t>(grid.width) *
                                static_cast<std::size_t>(grid.height);
  std::vector<double> zbuf(grid_size, std::numeric_limits<double>::infinity());
  std::vector<int> face_buf(grid_size, -1);

  std::vector<Vector3d> cam_vertices(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    cam_vertices[i] = pose.ToCamera(mesh.vertices[i]);
  }

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    const std::array<Vector3d, 3> tri{cam_vertices[face[0]],
                                      cam_vertices[face[1]],
                                      cam_vertices[face[2]]};
    if (tri[0].z() < kNearPlane && tri[1].z() < kNearPlane &&
        tri[2].z() < kNearPlane) {
      continue;
    }
    const std::vector<Vector3d> poly = ClipNear(tri);
    if (poly.size() < 3) continue;

    std::vector<ScreenVertex> screen(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const double inv_z = 1.0 / poly[i].z();
      screen[i] = {camera.fx * poly[i].x() * inv_z + camera.cx - grid.origin_x,
                   camera.fy * poly[i].y() * inv_z + camera.cy - grid.origin_y,
                   inv_z};
    }

    for (std::size_t k = 1; k + 1 < screen.size(); ++k) {
      const ScreenVertex& s0 = screen[0];
      const ScreenVertex& s1 = screen[k];
      const ScreenVertex& s2 = screen[k + 1];
      const double area = Edge(s0, s1, s2.x, s2.y);
      if (std::abs(area) < 1e-12) continue;

      const double lo_x = std::min({s0.x, s1.x, s2.x});
      const double hi_x = std::max({s0.x, s1.x, s2.x});
      const double lo_y = std::min({s0.y, s1.y, s2.y});
      const double hi_y = std::max({s0.y, s1.y, s2.y});
      if (hi_x < 0.0 || hi_y < 0.0 || lo_x > grid.width - 1 ||
          lo_y > grid.height - 1) {
        continue;
      }
      const int x0 = std::max(0, static_cast<int>(std::ceil(lo_x)));
      const int x1 = std::min(grid.width - 1, static_cast<int>(std::floor(hi_x)));
      const int y0 = std::max(0, static_cast<int>(std::ceil(lo_y)));
      const int y1 =
          std::min(grid.height - 1, static_cast<int>(std::floor(hi_y)));

      const double inv_area = 1.0 / area;
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double b0 = Edge(s1, s2, x, y) * inv_area;
          const double b1 = Edge(s2, s0, x, y) * inv_area;
          const double b2 = Edge(s0, s1, x, y) * inv_area;
          if (b0 < 0.0 || b1 < 0.0 || b2 < 0.0) continue;
          const double inv_z = b0 * s0.inv_z + b1 * s1.inv_z + b2 * s2.inv_z;
          if (!(inv_z > 0.0)) continue;
          const double z = 1.0 / inv_z;
          const std::size_t idx =
              static_cast<std::size_t>(y) * grid.width + x;
          if (z < zbuf[idx]) {
            zbuf[idx] = z;
            face_buf[idx] = static_cast<int>(f);
          }
        }
      }
    }
  }

  RasterResult result;
  result.width = camera.width;
  result.height = camera.height;
  const std::size_t n = static_cast<std::size_t>(camera.width) *
                        static_cast<std::size_t>(camera.height);
  result.face.assign(n, -1);
  result.depth.assign(n, 0.0);

  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      const std::size_t out = static_cast<std::size_t>(y) * camera.width + x;
      std::size_t idx = out;
      Vector2d ideal(x, y);
      if (!grid.sample.empty()) {
        ideal = grid.sample[out];
        const long gx = std::lround(ideal.x());
        const long gy = std::lround(ideal.y());
        if (gx < 0 || gy < 0 || gx >= grid.width || gy >= grid.height) continue;
        idx = static_cast<std::size_t>(gy) * grid.width +
              static_cast<std::size_t>(gx);
      }
      const int f = face_buf[idx];
      if (f < 0) continue;

      // Exact depth along this pixel's ray on the hit face's plane.
      const auto& face = mesh.faces[f];
      const Vector3d& a = cam_vertices[face[0]];
      const Vector3d normal =
          (cam_vertices[face[1]] - a).cross(cam_vertices[face[2]] - a);
      const Vector3d ray((ideal.x() + grid.origin_x - camera.cx) / camera.fx,
                         (ideal.y() + grid.origin_y - camera.cy) / camera.fy,
                         1.0);
      const double denom = normal.dot(ray);
      double z = zbuf[idx];
      if (std::abs(denom) > 1e-12 * normal.norm()) {
        const double plane_z = normal.dot(a) / denom;
        if (plane_z > kNearPlane && std::isfinite(plane_z)) z = plane_z;
      }
      result.face[out] = f;
      result.depth[out] = z;
    }
  }
  return result;
}

}  // namespace

void TriMesh::Validate() const {
  const auto n = static_cast<long long>(vertices.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    for (int idx : face) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::kInvalidArgument,
                    "face " + std::to_string(f) + " references vertex " +
                        std::to_string(idx) + " of " + std::to_string(n));
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "face " + std::to_string(f) + " is degenerate");
    }
  }
  if (!colors.empty() && colors.size() != vertices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "color count does not match vertex count");
  }
}

DepthMap::DepthMap(int width, int height, std::vector<double> depth)
    : width_(width), height_(height), depth_(std::move(depth)) {
  if (width <= 0 || height <= 0 ||
      depth_.size() != static_cast<std::size_t>(width) *
                           static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kInvalidArgument, "depth map size mismatch");
  }
}

bool DepthMap::IsValid(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
  return depth_[Index(x, y)] > 0.0;
}

std::size_t DepthMap::NumValid() const {
  return static_cast<std::size_t>(
      std::count_if(depth_.begin(), depth_.end(),
                    [](double d) { return d > 0.0; }));
}

DepthMap RenderDepth(const TriMesh& mesh, const Pose& pose,
                     const Camera& camera) {
  RasterResult raster = Rasterize(mesh, pose, camera);
  return DepthMap(raster.width, raster.height, std::move(raster.depth));
}

RgbImage RenderColor(const TriMesh& mesh, const Pose& pose,
                     const Camera& camera) {
  const RasterResult raster = Rasterize(mesh, pose, camera);
  RgbImage image;
  image.width = raster.width;
  image.height = raster.height;
  image.pixels.assign(raster.face.size() * 3, 0);
  for (std::size_t i = 0; i < raster.face.size(); ++i) {
    const int f = raster.face[i];
    if (f < 0) continue;
    std::array<int, 3> rgb{128, 128, 128};
    if (mesh.HasColors()) {
      rgb = {0, 0, 0};
      for (int v : mesh.faces[f]) {
        for (int c = 0; c < 3; ++c) rgb[c] += mesh.colors[v][c];
      }
      for (int& c : rgb) c = (c + 1) / 3;
    }
    for (int c = 0; c < 3; ++c) {
      image.pixels[3 * i + c] = static_cast<std::uint8_t>(rgb[c]);
    }
  }
  return image;
}

std::optional<double> DepthAt(const DepthMap& depth, const Vector2d& pixel) {
  if (!std::isfinite(pixel.x()) || !std::isfinite(pixel.y())) {
    return std::nullopt;
  }
  const double rx = std::round(pixel.x());
  const double ry = std::round(pixel.y());
  if (rx < 0.0 || ry < 0.0 || rx >= depth.width() || ry >= depth.height()) {
    return std::nullopt;
  }
  const int x = static_cast<int>(rx);
  const int y = static_cast<int>(ry);
  if (!depth.IsValid(x, y)) return std::nullopt;
  return depth.At(x, y);
}

}  // namespace renderloc
