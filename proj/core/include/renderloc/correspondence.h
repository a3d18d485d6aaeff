#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "renderloc/geometry.h"
#include "renderloc/mesh.h"

namespace renderloc {

struct MatchPair {
  Vector2d pixel;         // feature in the real image
  Vector2d render_pixel;  // matching feature in the rendering

  bool operator==(const MatchPair&) const = default;
};

struct MatchSet {
  std::string image_id;
  std::string render_id;
  std::vector<MatchPair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool operator==(const MatchSet&) const = default;
};

struct Correspondence {
  Vector2d pixel;
  Vector3d point;  // model frame

  bool operator==(const Correspondence&) const = default;
};

using Corr2D3D = std::vector<Correspondence>;

// Match files: a `match-v1 <image_id> <render_id>` header followed by one
// `u_x u_y ur_x ur_y` record per line. Blank lines are skipped.
// Throws Error(kParseError) with the 1-based line, or Error(kEmptyMatches).
MatchSet ReadMatches(std::istream& in);
MatchSet ReadMatchesFile(const std::filesystem::path& path);
void WriteMatches(std::ostream& out, const MatchSet& matches);
void WriteMatchesFile(const std::filesystem::path& path,
                      const MatchSet& matches);

// Lifts rendered-image features to model-frame points through the depth map
// rendered at (pose, camera). Pairs over uncovered pixels are dropped; the
// real-image pixel is kept.
Corr2D3D Lift(const MatchSet& matches, const DepthMap& depth,
              const Pose& pose, const Camera& camera);

// Lifts each source independently and concatenates in order.
Corr2D3D LiftAll(std::span<const MatchSet> sources, const DepthMap& depth,
                 const Pose& pose, const Camera& camera);

}  // namespace renderloc
