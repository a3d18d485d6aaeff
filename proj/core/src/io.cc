#include "renderloc/io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <set>
#include <sstream>

#include "renderloc/error.h"
#include "renderloc/text_io.h"

namespace renderloc {
namespace {

template <typename Fn>
auto WithPath(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return fn(in);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) {
      throw Error(e.code(), e.line(), path.string() + ": " + e.what());
    }
    throw;
  }
}

// Next non-empty line split into tokens; false at end of input.
bool NextTokens(std::istream& in, std::string* line, std::size_t* line_no,
                std::vector<std::string_view>* tokens) {
  while (std::getline(in, *line)) {
    ++*line_no;
    *tokens = SplitWhitespace(*line);
    if (!tokens->empty()) return true;
  }
  return false;
}

}  // namespace

// ----------------------------------------------------------------- PLY

TriMesh ReadPly(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tok;
  if (!NextTokens(in, &line, &line_no, &tok) || tok[0] != "ply") {
    throw Error(ErrorCode::kParseError, line_no, "missing 'ply' magic");
  }
  std::size_t num_vertices = 0;
  std::size_t num_faces = 0;
  std::vector<std::string> vertex_props;
  std::string current;
  bool ascii = false;
  while (true) {
    if (!NextTokens(in, &line, &line_no, &tok)) {
      throw Error(ErrorCode::kParseError, line_no, "unterminated PLY header");
    }
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      ascii = tok.size() >= 2 && tok[1] == "ascii";
      if (!ascii) {
        throw Error(ErrorCode::kParseError, line_no, "only ASCII PLY is supported");
      }
    } else if (tok[0] == "element" && tok.size() == 3) {
      current = std::string(tok[1]);
      const auto count = static_cast<std::size_t>(ParseInt(tok[2], line_no));
      if (current == "vertex") num_vertices = count;
      if (current == "face") num_faces = count;
    } else if (tok[0] == "property") {
      if (current == "vertex") vertex_props.emplace_back(tok.back());
    } else {
      throw Error(ErrorCode::kParseError, line_no,
                  "unexpected header line '" + line + "'");
    }
  }
  if (!ascii) throw Error(ErrorCode::kParseError, line_no, "missing format line");

  auto prop_index = [&](const std::string& name) -> int {
    const auto it = std::find(vertex_props.begin(), vertex_props.end(), name);
    return it == vertex_props.end() ? -1
                                    : static_cast<int>(it - vertex_props.begin());
  };
  const int ix = prop_index("x");
  const int iy = prop_index("y");
  const int iz = prop_index("z");
  const int ir = prop_index("red");
  const int ig = prop_index("green");
  const int ib = prop_index("blue");
  if (ix < 0 || iy < 0 || iz < 0) {
    throw Error(ErrorCode::kParseError, line_no, "vertex needs x, y, z");
  }
  const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;

  TriMesh mesh;
  mesh.vertices.reserve(num_vertices);
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (!NextTokens(in, &line, &line_no, &tok)) {
      throw Error(ErrorCode::kParseError, line_no + 1, "missing vertex records");
    }
    if (tok.size() != vertex_props.size()) {
      throw Error(ErrorCode::kParseError, line_no, "vertex property count mismatch");
    }
    mesh.vertices.emplace_back(ParseDouble(tok[ix], line_no),
                               ParseDouble(tok[iy], line_no),
                               ParseDouble(tok[iz], line_no));
    if (has_color) {
      std::array<std::uint8_t, 3> rgb{};
      const std::array<int, 3> idx{ir, ig, ib};
      for (int c = 0; c < 3; ++c) {
        const long long value = ParseInt(tok[idx[c]], line_no);
        if (value < 0 || value > 255) {
          throw Error(ErrorCode::kParseError, line_no, "color out of range");
        }
        rgb[c] = static_cast<std::uint8_t>(value);
      }
      mesh.colors.push_back(rgb);
    }
  }
  for (std::size_t f = 0; f < num_faces; ++f) {
    if (!NextTokens(in, &line, &line_no, &tok)) {
      throw Error(ErrorCode::kParseError, line_no + 1, "missing face records");
    }
    const long long count = ParseInt(tok[0], line_no);
    if (count < 3 || static_cast<std::size_t>(count) + 1 != tok.size()) {
      throw Error(ErrorCode::kParseError, line_no, "bad face record");
    }
    std::vector<int> idx;
    for (long long k = 0; k < count; ++k) {
      idx.push_back(static_cast<int>(ParseInt(tok[1 + k], line_no)));
    }
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
      mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  mesh.Validate();
  return mesh;
}

TriMesh ReadPlyFile(const std::filesystem::path& path) {
  return WithPath(path, [](std::istream& in) { return ReadPly(in); });
}

std::string WritePly(const TriMesh& mesh) {
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << mesh.vertices.size() << '\n';
  out << "property double x\nproperty double y\nproperty double z\n";
  if (mesh.HasColors()) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out << "element face " << mesh.faces.size() << '\n';
  out << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vector3d& v = mesh.vertices[i];
    out << FormatDouble(v.x()) << ' ' << FormatDouble(v.y()) << ' '
        << FormatDouble(v.z());
    if (mesh.HasColors()) {
      for (std::uint8_t c : mesh.colors[i]) out << ' ' << static_cast<int>(c);
    }
    out << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
  return out.str();
}

// ----------------------------------------------------------------- PFM

DepthMap ReadPfmFile(const std::filesystem::path& path) {
  const std::string data = ReadFile(path);
  std::istringstream in(data);
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  if (!in || magic != "Pf" || width <= 0 || height <= 0 || scale == 0.0) {
    throw Error(ErrorCode::kParseError, 1, path.string() + ": bad PFM header");
  }
  in.get();  // single whitespace after the scale
  const auto offset = static_cast<std::size_t>(in.tellg());
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (data.size() < offset + 4 * n) {
    throw Error(ErrorCode::kParseError, 1, path.string() + ": truncated PFM");
  }
  const bool little = scale < 0.0;
  std::vector<double> depth(n);
  for (int row = 0; row < height; ++row) {
    for (int x = 0; x < width; ++x) {
      const std::size_t src = offset + 4 * (static_cast<std::size_t>(row) * width + x);
      std::array<unsigned char, 4> b;
      std::memcpy(b.data(), data.data() + src, 4);
      if (little != (std::endian::native == std::endian::little)) {
        std::reverse(b.begin(), b.end());
      }
      float v;
      std::memcpy(&v, b.data(), 4);
      const int y = height - 1 - row;
      depth[static_cast<std::size_t>(y) * width + x] = v > 0.0f ? v : 0.0;
    }
  }
  return DepthMap(width, height, std::move(depth));
}

std::string WritePfm(const DepthMap& depth) {
  std::ostringstream header;
  header << "Pf\n" << depth.width() << ' ' << depth.height() << "\n-1.0\n";
  std::string out = header.str();
  const std::size_t offset = out.size();
  out.resize(offset + 4 * depth.data().size());
  std::size_t pos = offset;
  for (int row = 0; row < depth.height(); ++row) {
    const int y = depth.height() - 1 - row;
    for (int x = 0; x < depth.width(); ++x) {
      const auto v = static_cast<float>(depth.At(x, y));
      std::array<unsigned char, 4> b;
      std::memcpy(b.data(), &v, 4);
      if constexpr (std::endian::native == std::endian::big) {
        std::reverse(b.begin(), b.end());
      }
      std::memcpy(out.data() + pos, b.data(), 4);
      pos += 4;
    }
  }
  return out;
}

std::string WritePpm(const RgbImage& image) {
  std::ostringstream header;
  header << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  std::string out = header.str();
  out.append(reinterpret_cast<const char*>(image.pixels.data()),
             image.pixels.size());
  return out;
}

// ----------------------------------------------------------------- cameras

std::map<std::string, Camera> ReadCameras(std::istream& in) {
  std::map<std::string, Camera> cameras;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tok;
  while (NextTokens(in, &line, &line_no, &tok)) {
    if (tok[0].front() == '#') continue;
    if (tok.size() != 13 || tok[0] != "camera-v1" || tok[2] != "PINHOLE_RT") {
      throw Error(ErrorCode::kParseError, line_no,
                  "expected 'camera-v1 <id> PINHOLE_RT w h fx fy cx cy k1 k2 "
                  "p1 p2'");
    }
    Camera c;
    c.width = static_cast<int>(ParseInt(tok[3], line_no));
    c.height = static_cast<int>(ParseInt(tok[4], line_no));
    c.fx = ParseDouble(tok[5], line_no);
    c.fy = ParseDouble(tok[6], line_no);
    c.cx = ParseDouble(tok[7], line_no);
    c.cy = ParseDouble(tok[8], line_no);
    for (int k = 0; k < 4; ++k) c.distortion[k] = ParseDouble(tok[9 + k], line_no);
    try {
      c.Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, line_no, e.what());
    }
    const std::string id(tok[1]);
    if (!cameras.emplace(id, c).second) {
      throw Error(ErrorCode::kParseError, line_no, "duplicate camera " + id);
    }
  }
  return cameras;
}

std::map<std::string, Camera> ReadCamerasFile(const std::filesystem::path& path) {
  return WithPath(path, [](std::istream& in) { return ReadCameras(in); });
}

std::string WriteCameras(const std::map<std::string, Camera>& cameras) {
  std::ostringstream out;
  for (const auto& [id, c] : cameras) {
    out << "camera-v1 " << id << " PINHOLE_RT " << c.width << ' ' << c.height
        << ' ' << FormatDouble(c.fx) << ' ' << FormatDouble(c.fy) << ' '
        << FormatDouble(c.cx) << ' ' << FormatDouble(c.cy);
    for (double d : c.distortion) out << ' ' << FormatDouble(d);
    out << '\n';
  }
  return out.str();
}

const Camera& CameraForImage(const std::map<std::string, Camera>& cameras,
                             const std::string& image) {
  auto it = cameras.find(image);
  if (it == cameras.end()) it = cameras.find("*");
  if (it == cameras.end()) {
    throw Error(ErrorCode::kInvalidArgument, "no camera for image " + image);
  }
  return it->second;
}

// ----------------------------------------------------------------- poses

Pose PoseRecord::ToPose() const {
  if (convention == PoseConvention::kWorldToCamera) {
    return Pose::FromWorldToCamera(rotation, translation);
  }
  return Pose(rotation.normalized().toRotationMatrix(), translation);
}

PoseRecord PoseRecord::FromPose(const std::string& name, const Pose& pose,
                                PoseConvention convention) {
  PoseRecord r;
  r.name = name;
  r.convention = convention;
  if (convention == PoseConvention::kWorldToCamera) {
    r.rotation = pose.WorldToCameraRotation();
    r.translation = pose.WorldToCameraTranslation();
  } else {
    r.rotation = Eigen::Quaterniond(pose.rotation()).normalized();
    r.translation = pose.center();
  }
  return r;
}

PoseRecord ConvertConvention(const PoseRecord& record) {
  PoseRecord out;
  out.name = record.name;
  out.convention = record.convention == PoseConvention::kWorldToCamera
                       ? PoseConvention::kCameraToWorld
                       : PoseConvention::kWorldToCamera;
  out.rotation = record.rotation.conjugate();
  out.translation = -(record.rotation.conjugate() * record.translation);
  return out;
}

std::vector<PoseRecord> ReadPoses(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tok;
  if (!NextTokens(in, &line, &line_no, &tok) || tok.size() != 2 ||
      tok[0] != "poses-v1" ||
      (tok[1] != "convention=w2c" && tok[1] != "convention=c2w")) {
    throw Error(ErrorCode::kParseError, line_no == 0 ? 1 : line_no,
                "expected 'poses-v1 convention=w2c|c2w'");
  }
  const PoseConvention convention = tok[1] == "convention=w2c"
                                        ? PoseConvention::kWorldToCamera
                                        : PoseConvention::kCameraToWorld;
  std::vector<PoseRecord> records;
  std::set<std::string> seen;
  while (NextTokens(in, &line, &line_no, &tok)) {
    if (tok.size() != 8) {
      throw Error(ErrorCode::kParseError, line_no,
                  "expected '<name> qw qx qy qz tx ty tz'");
    }
    PoseRecord r;
    r.name = std::string(tok[0]);
    r.convention = convention;
    r.rotation = Eigen::Quaterniond(
        ParseDouble(tok[1], line_no), ParseDouble(tok[2], line_no),
        ParseDouble(tok[3], line_no), ParseDouble(tok[4], line_no));
    if (std::abs(r.rotation.norm() - 1.0) > 1e-6) {
      throw Error(ErrorCode::kParseError, line_no, "quaternion is not unit norm");
    }
    r.translation = Vector3d(ParseDouble(tok[5], line_no),
                             ParseDouble(tok[6], line_no),
                             ParseDouble(tok[7], line_no));
    if (!seen.insert(r.name).second) {
      throw Error(ErrorCode::kParseError, line_no, "duplicate image " + r.name);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PoseRecord> ReadPosesFile(const std::filesystem::path& path) {
  return WithPath(path, [](std::istream& in) { return ReadPoses(in); });
}

std::string WritePoses(const std::vector<PoseRecord>& records,
                       PoseConvention convention) {
  std::ostringstream out;
  out << "poses-v1 convention="
      << (convention == PoseConvention::kWorldToCamera ? "w2c" : "c2w") << '\n';
  for (const PoseRecord& input : records) {
    const PoseRecord r =
        input.convention == convention ? input : ConvertConvention(input);
    out << r.name << ' ' << FormatDouble(r.rotation.w()) << ' '
        << FormatDouble(r.rotation.x()) << ' ' << FormatDouble(r.rotation.y())
        << ' ' << FormatDouble(r.rotation.z()) << ' '
        << FormatDouble(r.translation.x()) << ' '
        << FormatDouble(r.translation.y()) << ' '
        << FormatDouble(r.translation.z()) << '\n';
  }
  return out.str();
}

std::map<std::string, Pose> PosesByName(const std::vector<PoseRecord>& records) {
  std::map<std::string, Pose> out;
  for (const PoseRecord& r : records) out.emplace(r.name, r.ToPose());
  return out;
}

// ----------------------------------------------------------------- corrs

NamedCorrespondences ReadCorrespondences(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tok;
  if (!NextTokens(in, &line, &line_no, &tok) || tok.size() != 2 ||
      tok[0] != "corr-v1") {
    throw Error(ErrorCode::kParseError, line_no == 0 ? 1 : line_no,
                "expected 'corr-v1 <image>'");
  }
  NamedCorrespondences out;
  out.image = std::string(tok[1]);
  while (NextTokens(in, &line, &line_no, &tok)) {
    if (tok.size() != 5) {
      throw Error(ErrorCode::kParseError, line_no, "expected 'u_x u_y x y z'");
    }
    Correspondence c;
    c.pixel = {ParseDouble(tok[0], line_no), ParseDouble(tok[1], line_no)};
    c.point = {ParseDouble(tok[2], line_no), ParseDouble(tok[3], line_no),
               ParseDouble(tok[4], line_no)};
    out.corrs.push_back(c);
  }
  return out;
}

NamedCorrespondences ReadCorrespondencesFile(const std::filesystem::path& path) {
  return WithPath(path, [](std::istream& in) { return ReadCorrespondences(in); });
}

std::string WriteCorrespondences(const std::string& image,
                                 const Corr2D3D& corrs) {
  std::ostringstream out;
  out << "corr-v1 " << image << '\n';
  for (const Correspondence& c : corrs) {
    out << FormatDouble(c.pixel.x()) << ' ' << FormatDouble(c.pixel.y()) << ' '
        << FormatDouble(c.point.x()) << ' ' << FormatDouble(c.point.y()) << ' '
        << FormatDouble(c.point.z()) << '\n';
  }
  return out.str();
}

// ----------------------------------------------------------------- uncertainty

std::string UncertaintySourceLabel(const UncertaintyEstimate& estimate) {
  if (estimate.method == UncertaintyMethod::kSampling) {
    return SamplingSourceLabel(estimate.ratio);
  }
  return UncertaintyMethodName(estimate.method);
}

std::vector<NamedUncertainty> ReadUncertainties(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tok;
  if (!NextTokens(in, &line, &line_no, &tok) || tok.size() != 1 ||
      tok[0] != "uncertainty-v1") {
    throw Error(ErrorCode::kParseError, line_no == 0 ? 1 : line_no,
                "expected 'uncertainty-v1'");
  }
  std::vector<NamedUncertainty> out;
  while (NextTokens(in, &line, &line_no, &tok)) {
    if (tok.size() != 6) {
      throw Error(ErrorCode::kParseError, line_no,
                  "expected '<image> <method> <ratio> <position_m> "
                  "<rotation_deg> <num_samples>'");
    }
    NamedUncertainty u;
    u.image = std::string(tok[0]);
    try {
      u.estimate.method = ParseUncertaintyMethod(std::string(tok[1]));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, line_no, e.what());
    }
    u.estimate.ratio = ParseDouble(tok[2], line_no);
    u.estimate.position_unc = ParseDouble(tok[3], line_no);
    u.estimate.rotation_unc = ParseDouble(tok[4], line_no);
    u.estimate.num_samples = static_cast<std::size_t>(ParseInt(tok[5], line_no));
    out.push_back(u);
  }
  return out;
}

std::vector<NamedUncertainty> ReadUncertaintiesFile(
    const std::filesystem::path& path) {
  return WithPath(path, [](std::istream& in) { return ReadUncertainties(in); });
}

std::string WriteUncertainties(const std::vector<NamedUncertainty>& entries) {
  std::ostringstream out;
  out << "uncertainty-v1\n";
  for (const NamedUncertainty& u : entries) {
    out << u.image << ' ' << UncertaintyMethodName(u.estimate.method) << ' '
        << FormatDouble(u.estimate.ratio) << ' '
        << FormatDouble(u.estimate.position_unc) << ' '
        << FormatDouble(u.estimate.rotation_unc) << ' '
        << u.estimate.num_samples << '\n';
  }
  return out.str();
}

// ----------------------------------------------------------------- reports

namespace {

nlohmann::ordered_json PoseJson(const Pose& pose) {
  const PoseRecord r = PoseRecord::FromPose("", pose);
  return {{"qvec_w2c", {r.rotation.w(), r.rotation.x(), r.rotation.y(),
                        r.rotation.z()}},
          {"tvec_w2c", {r.translation.x(), r.translation.y(), r.translation.z()}},
          {"center", {pose.center().x(), pose.center().y(), pose.center().z()}}};
}

// JSON has no infinity; unbounded values serialize as null.
nlohmann::ordered_json Finite(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::ordered_json RefineResultToJson(const std::string& image,
                                          const RefineResult& result) {
  nlohmann::ordered_json j;
  j["image"] = image;
  j["accepted"] = result.accepted;
  j["failure_reason"] = result.failure_reason;
  j["pose"] = PoseJson(result.pose);
  j["num_inliers"] = result.inliers.size();
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const IterationTrace& t = result.trace[i];
    nlohmann::ordered_json row;
    row["iteration"] = i + 1;
    row["pose"] = PoseJson(t.pose);
    row["num_matches"] = t.num_matches;
    row["num_lifted"] = t.num_lifted;
    row["inlier_count"] = t.inlier_count;
    row["effective_inlier_count"] = t.effective_inlier_count;
    row["mean_reprojection_px"] = Finite(t.mean_reprojection_px);
    row["max_reprojection_px"] = Finite(t.max_reprojection_px);
    trace.push_back(row);
  }
  j["trace"] = trace;
  return j;
}

nlohmann::ordered_json EvalReportToJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta;
  meta["reference_source"] = report.reference_source;
  meta["comparison"] = "strict less-than for every threshold";
  nlohmann::ordered_json thresholds = nlohmann::ordered_json::array();
  for (const PoseThreshold& t : report.pose_thresholds.thresholds()) {
    thresholds.push_back({{"position_m", t.position_m},
                          {"rotation_deg", t.rotation_deg}});
  }
  meta["pose_thresholds"] = thresholds;
  meta["reprojection_thresholds_px"] = report.reprojection_thresholds;
  meta["num_images"] = report.images.size();
  j["metadata"] = meta;

  nlohmann::ordered_json pose_acc = nlohmann::ordered_json::array();
  for (double p : report.pose_accuracy) pose_acc.push_back(p);
  j["pose_error_accuracy"] = pose_acc;

  nlohmann::ordered_json per_image = nlohmann::ordered_json::array();
  for (const PerImageSourceAccuracy& a : report.per_image_accuracy) {
    nlohmann::ordered_json row;
    row["source"] = a.source;
    row["percentage"] = a.percentage;
    row["headline"] = a.headline;
    if (!a.headline) row["note"] = "under-estimates accuracy";
    per_image.push_back(row);
  }
  j["per_image_threshold_accuracy"] = per_image;

  nlohmann::ordered_json rep_acc = nlohmann::ordered_json::array();
  for (double p : report.reprojection_accuracy) rep_acc.push_back(p);
  j["reprojection_accuracy"] = rep_acc;

  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  for (const EvalImageResult& r : report.images) {
    nlohmann::ordered_json row;
    row["name"] = r.name;
    row["position_err_m"] = r.error.position_err;
    row["rotation_err_deg"] = r.error.rotation_err;
    row["max_reprojection_diff_px"] = Finite(r.max_reprojection_diff);
    nlohmann::ordered_json within;
    for (const auto& [source, ok] : r.within_uncertainty) within[source] = ok;
    row["within_uncertainty"] = within;
    images.push_back(row);
  }
  j["images"] = images;
  return j;
}

std::string FormatEvalTable(const EvalReport& report) {
  auto pct = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << v;
    return s.str();
  };
  auto join = [](const std::vector<std::string>& parts) {
    std::string out;
    for (const std::string& p : parts) {
      if (!out.empty()) out += " / ";
      out += p;
    }
    return out;
  };

  std::vector<std::string> pose_head;
  for (const PoseThreshold& t : report.pose_thresholds.thresholds()) {
    std::ostringstream s;
    s << t.position_m << "m," << t.rotation_deg << "deg";
    pose_head.push_back(s.str());
  }
  std::vector<std::string> pose_vals;
  for (double v : report.pose_accuracy) pose_vals.push_back(pct(v));

  std::vector<std::string> sampling_head;
  std::vector<std::string> sampling_vals;
  std::vector<std::string> other_rows;
  for (const PerImageSourceAccuracy& a : report.per_image_accuracy) {
    if (a.headline) {
      const double ratio = std::stod(a.source.substr(9));
      std::ostringstream s;
      s << ratio * 100.0 << '%';
      sampling_head.push_back(s.str());
      sampling_vals.push_back(pct(a.percentage));
    } else {
      other_rows.push_back(a.source + ": " + pct(a.percentage) +
                           " (under-estimates accuracy)");
    }
  }

  std::vector<std::string> rep_head;
  for (double t : report.reprojection_thresholds) {
    std::ostringstream s;
    s << t;
    rep_head.push_back(s.str());
  }
  std::vector<std::string> rep_vals;
  for (double v : report.reprojection_accuracy) rep_vals.push_back(pct(v));

  const std::vector<std::pair<std::string, std::string>> headers{
      {"Pose Error (" + join(pose_head) + ")", join(pose_vals)},
      {"Sampling (" + join(sampling_head) + ")",
       sampling_vals.empty() ? std::string("-") : join(sampling_vals)},
      {"Reprojection Diff. (" + join(rep_head) + " px)", join(rep_vals)}};

  std::ostringstream out;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t width =
        std::max(headers[i].first.size(), headers[i].second.size());
    out << (i ? " | " : "") << std::left << std::setw(static_cast<int>(width))
        << headers[i].first;
  }
  out << '\n';
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t width =
        std::max(headers[i].first.size(), headers[i].second.size());
    out << (i ? " | " : "") << std::left << std::setw(static_cast<int>(width))
        << headers[i].second;
  }
  out << '\n';
  for (const std::string& row : other_rows) out << row << '\n';
  return out.str();
}

}  // namespace renderloc
