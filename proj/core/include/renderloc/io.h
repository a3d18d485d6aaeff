#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renderloc/correspondence.h"
#include "renderloc/geometry.h"
#include "renderloc/mesh.h"
#include "renderloc/metrics.h"
#include "renderloc/refine.h"
#include "renderloc/uncertainty.h"

namespace renderloc {

// ---- Meshes: ASCII PLY with vertex (x y z [red green blue]) and face
// (vertex_indices) elements.
TriMesh ReadPly(std::istream& in);
TriMesh ReadPlyFile(const std::filesystem::path& path);
std::string WritePly(const TriMesh& mesh);

// ---- Depth checkpoints: PFM, single channel, little endian (scale -1.0),
// rows stored bottom to top. 0 marks an uncovered pixel.
DepthMap ReadPfmFile(const std::filesystem::path& path);
std::string WritePfm(const DepthMap& depth);

// Binary PPM (P6) for debug overlays.
std::string WritePpm(const RgbImage& image);

// ---- Cameras: one `camera-v1 <id> PINHOLE_RT <w> <h> <fx> <fy> <cx> <cy>
// <k1> <k2> <p1> <p2>` line per camera.
std::map<std::string, Camera> ReadCameras(std::istream& in);
std::map<std::string, Camera> ReadCamerasFile(const std::filesystem::path& path);
std::string WriteCameras(const std::map<std::string, Camera>& cameras);
// The camera named like the image, else the one named "*".
const Camera& CameraForImage(const std::map<std::string, Camera>& cameras,
                             const std::string& image);

// ---- Poses: header `poses-v1 convention=w2c` (or c2w), then
// `<name> qw qx qy qz tx ty tz` per line.
enum class PoseConvention { kWorldToCamera, kCameraToWorld };

struct PoseRecord {
  std::string name;
  Eigen::Quaterniond rotation;  // unit norm
  Vector3d translation;
  PoseConvention convention = PoseConvention::kWorldToCamera;

  Pose ToPose() const;
  static PoseRecord FromPose(const std::string& name, const Pose& pose,
                             PoseConvention convention =
                                 PoseConvention::kWorldToCamera);
};

// Re-expresses the record in the other convention (the inverse transform).
PoseRecord ConvertConvention(const PoseRecord& record);

std::vector<PoseRecord> ReadPoses(std::istream& in);
std::vector<PoseRecord> ReadPosesFile(const std::filesystem::path& path);
std::string WritePoses(const std::vector<PoseRecord>& records,
                       PoseConvention convention =
                           PoseConvention::kWorldToCamera);
std::map<std::string, Pose> PosesByName(const std::vector<PoseRecord>& records);

// ---- 2D-3D correspondences: header `corr-v1 <image>`, then
// `u_x u_y x y z` per line. May be empty.
struct NamedCorrespondences {
  std::string image;
  Corr2D3D corrs;
};
NamedCorrespondences ReadCorrespondences(std::istream& in);
NamedCorrespondences ReadCorrespondencesFile(const std::filesystem::path& path);
std::string WriteCorrespondences(const std::string& image,
                                 const Corr2D3D& corrs);

// ---- Per-image uncertainties: header `uncertainty-v1`, then
// `<image> <method> <ratio> <position_m> <rotation_deg> <num_samples>`.
struct NamedUncertainty {
  std::string image;
  UncertaintyEstimate estimate;
};
std::vector<NamedUncertainty> ReadUncertainties(std::istream& in);
std::vector<NamedUncertainty> ReadUncertaintiesFile(
    const std::filesystem::path& path);
std::string WriteUncertainties(const std::vector<NamedUncertainty>& entries);
// "sampling-0.5", "first-order", "monte-carlo".
std::string UncertaintySourceLabel(const UncertaintyEstimate& estimate);

// ---- Reports.
nlohmann::ordered_json RefineResultToJson(const std::string& image,
                                          const RefineResult& result);
nlohmann::ordered_json EvalReportToJson(const EvalReport& report);
// Fixed-width table: pose error, per-image sampling thresholds and
// reprojection difference columns.
std::string FormatEvalTable(const EvalReport& report);

}  // namespace renderloc
