#include "renderloc/correspondence.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "renderloc/error.h"
#include "renderloc/text_io.h"

namespace renderloc {

MatchSet ReadMatches(std::istream& in) {
  MatchSet matches;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string_view> tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() != 3 || tokens[0] != "match-v1") {
        throw Error(ErrorCode::kParseError, line_no,
                    "expected 'match-v1 <image_id> <render_id>'");
      }
      matches.image_id = std::string(tokens[1]);
      matches.render_id = std::string(tokens[2]);
      have_header = true;
      continue;
    }
    if (tokens.size() != 4) {
      throw Error(ErrorCode::kParseError, line_no,
                  "expected 4 values, got " + std::to_string(tokens.size()));
    }
    MatchPair pair;
    pair.pixel = {ParseDouble(tokens[0], line_no), ParseDouble(tokens[1], line_no)};
    pair.render_pixel = {ParseDouble(tokens[2], line_no),
                         ParseDouble(tokens[3], line_no)};
    matches.pairs.push_back(pair);
  }
  if (!have_header) {
    throw Error(ErrorCode::kParseError, line_no + 1, "missing match-v1 header");
  }
  if (matches.pairs.empty()) {
    throw Error(ErrorCode::kEmptyMatches,
                "no matches for image " + matches.image_id);
  }
  return matches;
}

MatchSet ReadMatchesFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return ReadMatches(in);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) {
      throw Error(e.code(), e.line(), path.string() + ": " + e.what());
    }
    throw;
  }
}

void WriteMatches(std::ostream& out, const MatchSet& matches) {
  out << "match-v1 " << matches.image_id << ' ' << matches.render_id << '\n';
  for (const MatchPair& pair : matches.pairs) {
    out << FormatDouble(pair.pixel.x()) << ' ' << FormatDouble(pair.pixel.y())
        << ' ' << FormatDouble(pair.render_pixel.x()) << ' '
        << FormatDouble(pair.render_pixel.y()) << '\n';
  }
}

void WriteMatchesFile(const std::filesystem::path& path,
                      const MatchSet& matches) {
  std::ostringstream out;
  WriteMatches(out, matches);
  WriteFileAtomic(path, out.str());
}

Corr2D3D Lift(const MatchSet& matches, const DepthMap& depth,
              const Pose& pose, const Camera& camera) {
  Corr2D3D corrs;
  corrs.reserve(matches.size());
  for (const MatchPair& pair : matches.pairs) {
    const std::optional<double> z = DepthAt(depth, pair.render_pixel);
    if (!z) continue;
    corrs.push_back(
        {pair.pixel, BackProject(pair.render_pixel, *z, pose, camera)});
  }
  return corrs;
}

Corr2D3D LiftAll(std::span<const MatchSet> sources, const DepthMap& depth,
                 const Pose& pose, const Camera& camera) {
  Corr2D3D all;
  for (const MatchSet& source : sources) {
    Corr2D3D lifted = Lift(source, depth, pose, camera);
    all.insert(all.end(), lifted.begin(), lifted.end());
  }
  return all;
}

}  // namespace renderloc
