#include "renderloc/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "renderloc/error.h"
#include "renderloc/parallel.h"
#include "renderloc/text_io.h"

namespace renderloc {
namespace {

using Color = std::array<std::uint8_t, 3>;

// Adds a planar quad (corner + two edge vectors) split into an nu x nv grid.
void AddQuad(TriMesh* mesh, const Vector3d& origin, const Vector3d& edge_u,
             const Vector3d& edge_v, int nu, int nv, const Color& color) {
  const int base = static_cast<int>(mesh->vertices.size());
  for (int j = 0; j <= nv; ++j) {
    for (int i = 0; i <= nu; ++i) {
      mesh->vertices.push_back(origin + edge_u * (static_cast<double>(i) / nu) +
                               edge_v * (static_cast<double>(j) / nv));
      mesh->colors.push_back(color);
    }
  }
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const int a = base + j * (nu + 1) + i;
      const int b = a + 1;
      const int c = a + (nu + 1);
      const int d = c + 1;
      mesh->faces.push_back({a, b, d});
      mesh->faces.push_back({a, d, c});
    }
  }
}

int Subdivisions(double length, double cell) {
  return std::max(1, static_cast<int>(std::lround(length / cell)));
}

void AddBox(TriMesh* mesh, const Vector3d& lo, const Vector3d& hi,
            const Color& color) {
  const Vector3d ex(hi.x() - lo.x(), 0, 0);
  const Vector3d ey(0, hi.y() - lo.y(), 0);
  const Vector3d ez(0, 0, hi.z() - lo.z());
  AddQuad(mesh, lo, ex, ey, 1, 2, color);             // front (z = lo)
  AddQuad(mesh, lo + ez, ex, ey, 1, 2, color);        // back
  AddQuad(mesh, lo, ez, ey, 1, 2, color);             // left
  AddQuad(mesh, lo + ex, ez, ey, 1, 2, color);        // right
  AddQuad(mesh, lo, ex, ez, 1, 1, color);             // top (y = lo)
  AddQuad(mesh, lo + ey, ex, ez, 1, 1, color);        // bottom
}

void BuildPlaneGrid(const SceneSpec& spec, TriMesh* mesh) {
  const int n = std::max(1, static_cast<int>(std::lround(
                                std::sqrt(spec.triangle_target / 2.0))));
  const double e = spec.extent_m;
  AddQuad(mesh, Vector3d(-e / 2, -e / 2, 0), Vector3d(e, 0, 0),
          Vector3d(0, e, 0), n, n, {200, 200, 200});
}

void BuildCourtyard(const SceneSpec& spec, TriMesh* mesh) {
  const double e = spec.extent_m;
  const double top = -0.6 * e;
  const double floor = 0.25 * e;  // camera raised above the floor
  const double height = floor - top;
  const double wall_area = 3.0 * e * height + e * e;
  const double cell = std::sqrt(2.0 * wall_area / std::max(spec.triangle_target, 8));
  AddQuad(mesh, Vector3d(-0.5 * e, top, e), Vector3d(e, 0, 0),
          Vector3d(0, height, 0), Subdivisions(e, cell),
          Subdivisions(height, cell), {180, 160, 140});
  AddQuad(mesh, Vector3d(-0.5 * e, top, 0), Vector3d(0, 0, e),
          Vector3d(0, height, 0), Subdivisions(e, cell),
          Subdivisions(height, cell), {140, 170, 150});
  AddQuad(mesh, Vector3d(0.5 * e, top, 0), Vector3d(0, 0, e),
          Vector3d(0, height, 0), Subdivisions(e, cell),
          Subdivisions(height, cell), {150, 150, 180});
  AddQuad(mesh, Vector3d(-0.5 * e, floor, 0), Vector3d(e, 0, 0),
          Vector3d(0, 0, e), Subdivisions(e, cell), Subdivisions(e, cell),
          {120, 120, 110});
  const double half = 0.05 * e;
  // Free-standing panel close to the camera; a closed block there could
  // swallow a perturbed camera.
  AddQuad(mesh, Vector3d(-0.05 * e - half, 0.02 * e, 0.1 * e),
          Vector3d(2 * half, 0, 0), Vector3d(0, 0.05 * e, 0), 2, 1,
          {210, 120, 90});
  const std::array<std::pair<double, double>, 3> blocks{
      {{0.12, 0.3}, {-0.3, 0.5}, {0.1, 0.7}}};
  for (const auto& [px, pz] : blocks) {
    AddBox(mesh, Vector3d(px * e - half, 0.02 * e, pz * e - half),
           Vector3d(px * e + half, floor, pz * e + half), {210, 120, 90});
  }
}

void BuildRandomFacade(const SceneSpec& spec, TriMesh* mesh, Rng& rng) {
  const double e = spec.extent_m;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int panels = std::max(4, spec.triangle_target / 8);
  for (int k = 0; k < panels; ++k) {
    const double depth = e * (0.1 + 0.9 * unit(rng));
    const double width = 0.3 * depth * (0.5 + unit(rng));
    const double height = 0.6 * width;
    const double yaw = (unit(rng) - 0.5) * kPi / 3.0;
    const Vector3d center(depth * 0.6 * (2 * unit(rng) - 1),
                          depth * 0.3 * (2 * unit(rng) - 1), depth);
    const Vector3d along(std::cos(yaw), 0, std::sin(yaw));
    const Color color{static_cast<std::uint8_t>(64 + 191 * unit(rng)),
                      static_cast<std::uint8_t>(64 + 191 * unit(rng)),
                      static_cast<std::uint8_t>(64 + 191 * unit(rng))};
    AddQuad(mesh, center - along * (width / 2) - Vector3d(0, height / 2, 0),
            along * width, Vector3d(0, height, 0), 2, 1, color);
  }
  AddQuad(mesh, Vector3d(-1.5 * e, -0.9 * e, 1.05 * e), Vector3d(3 * e, 0, 0),
          Vector3d(0, 1.8 * e, 0), 4, 4, {120, 120, 120});
}

}  // namespace

const char* SceneLayoutName(SceneLayout layout) {
  switch (layout) {
    case SceneLayout::kPlaneGrid: return "plane-grid";
    case SceneLayout::kBoxCourtyard: return "box-courtyard";
    case SceneLayout::kRandomFacade: return "random-facade";
  }
  return "unknown";
}

SceneLayout ParseSceneLayout(const std::string& name) {
  if (name == "plane-grid") return SceneLayout::kPlaneGrid;
  if (name == "box-courtyard") return SceneLayout::kBoxCourtyard;
  if (name == "random-facade") return SceneLayout::kRandomFacade;
  throw Error(ErrorCode::kInvalidArgument, "unknown layout '" + name + "'");
}

void SceneSpec::Validate() const {
  if (!(extent_m > 0.0) || !(feature_density > 0.0) || triangle_target < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "scene needs extent > 0, density > 0, triangles >= 1");
  }
}

Scene MakeScene(const SceneSpec& spec) {
  spec.Validate();
  Scene scene;
  Rng rng(spec.rng_seed);
  switch (spec.layout) {
    case SceneLayout::kPlaneGrid: BuildPlaneGrid(spec, &scene.mesh); break;
    case SceneLayout::kBoxCourtyard: BuildCourtyard(spec, &scene.mesh); break;
    case SceneLayout::kRandomFacade:
      BuildRandomFacade(spec, &scene.mesh, rng);
      break;
  }

  const TriMesh& mesh = scene.mesh;
  std::vector<double> areas;
  double total = 0.0;
  for (const auto& f : mesh.faces) {
    const double a = 0.5 * (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                               .cross(mesh.vertices[f[2]] - mesh.vertices[f[0]])
                               .norm();
    areas.push_back(a);
    total += a;
  }
  const auto count =
      static_cast<std::size_t>(std::llround(spec.feature_density * total));
  std::discrete_distribution<std::size_t> pick_face(areas.begin(), areas.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  scene.features.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& f = mesh.faces[pick_face(rng)];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    scene.features.push_back((1.0 - r1) * mesh.vertices[f[0]] +
                             r1 * (1.0 - r2) * mesh.vertices[f[1]] +
                             r1 * r2 * mesh.vertices[f[2]]);
  }
  return scene;
}

void SimMatcherSpec::Validate() const {
  if (!(sigma_px >= 0.0) || !(outlier_ratio >= 0.0 && outlier_ratio < 1.0) ||
      !(detection_rate > 0.0 && detection_rate <= 1.0) ||
      !(viewpoint_noise_gain >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid simulated matcher spec");
  }
}

MatchSet SimulateMatches(std::span<const Vector3d> points,
                         const Pose& render_pose, const Pose& true_pose,
                         const Camera& camera, const SimMatcherSpec& spec,
                         const Visibility& visibility) {
  spec.Validate();
  MatchSet matches;
  matches.image_id = "sim";
  matches.render_id = "render";
  auto visible = [](const DepthMap* depth, const Vector2d& pixel,
                    const Vector3d& p_cam) {
    if (depth == nullptr) return true;
    const auto z = DepthAt(*depth, pixel);
    return z && std::abs(*z - p_cam.z()) <= 0.01 + 0.02 * p_cam.z();
  };

  for (std::size_t l = 0; l < points.size(); ++l) {
    Rng rng(DeriveSeed(spec.rng_seed, {l}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Fixed draw order keeps each point's stream stable.
    const double n1 = normal(rng);
    const double n2 = normal(rng);
    const double outlier_draw = unit(rng);
    const double ox = unit(rng);
    const double oy = unit(rng);
    const double detect_draw = unit(rng);

    const Vector3d& p = points[l];
    const auto u_true = TryProject(p, true_pose, camera);
    const auto u_render = TryProject(p, render_pose, camera);
    if (!u_true || !u_render) continue;
    if (!camera.InImage(*u_true) || !camera.InImage(*u_render)) continue;
    if (!visible(visibility.true_depth, *u_true, true_pose.ToCamera(p)) ||
        !visible(visibility.render_depth, *u_render, render_pose.ToCamera(p))) {
      continue;
    }
    if (!(detect_draw < spec.detection_rate)) continue;

    const double sigma =
        spec.sigma_px + spec.viewpoint_noise_gain * (*u_true - *u_render).norm();
    Vector2d u = *u_true + sigma * Vector2d(n1, n2);
    if (outlier_draw < spec.outlier_ratio) {
      u = Vector2d(ox * camera.width - 0.5, oy * camera.height - 0.5);
    }
    if (!camera.InImage(u)) continue;
    matches.pairs.push_back({u, *u_render});
  }
  return matches;
}

SimulatedMatcher::SimulatedMatcher(const Scene& scene, const Pose& true_pose,
                                   const Camera& camera,
                                   const SimMatcherSpec& spec,
                                   std::string image_id, bool occlusion)
    : scene_(scene),
      true_pose_(true_pose),
      camera_(camera),
      spec_(spec),
      image_id_(std::move(image_id)),
      occlusion_(occlusion) {
  if (occlusion_) true_depth_ = RenderDepth(scene_.mesh, true_pose_, camera_);
}

std::vector<MatchSet> SimulatedMatcher::Matches(int iteration,
                                                const Pose& render_pose,
                                                const DepthMap& depth) {
  Visibility visibility;
  if (occlusion_) {
    visibility.true_depth = &true_depth_;
    visibility.render_depth = &depth;
  }
  MatchSet m = SimulateMatches(scene_.features, render_pose, true_pose_,
                               camera_, spec_, visibility);
  m.image_id = image_id_;
  m.render_id = "mesh-iter" + std::to_string(iteration);
  history_.push_back(m);
  return {std::move(m)};
}

Camera ReferenceCamera() {
  Camera camera;
  camera.fx = 400.0;
  camera.fy = 400.0;
  camera.cx = 319.5;
  camera.cy = 239.5;
  camera.width = 640;
  camera.height = 480;
  return camera;
}

SceneSpec ReferenceSceneSpec() {
  SceneSpec spec;
  spec.layout = SceneLayout::kBoxCourtyard;
  spec.extent_m = 20.0;
  spec.triangle_target = 600;
  spec.feature_density = 0.4;
  spec.rng_seed = 2;
  return spec;
}

std::vector<Pose> ReferencePoses(std::size_t count, std::uint64_t seed) {
  std::vector<Pose> poses;
  poses.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0) {
      poses.push_back(Pose::Identity());
      continue;
    }
    Rng rng(DeriveSeed(seed, {i}));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Vector3d center(3.0 * unit(rng), 1.0 * unit(rng),
                          -1.0 + 1.0 * unit(rng));
    const Vector3d omega(0.05 * unit(rng), 0.25 * unit(rng), 0.05 * unit(rng));
    poses.emplace_back(ExpSO3(omega), center);
  }
  return poses;
}

Pose RandomPerturbation(const Pose& pose, double rotation_deg,
                        double translation_m, Rng& rng) {
  const Vector3d axis = RandomUnitVector(rng);
  const Vector3d direction = RandomUnitVector(rng);
  return PerturbPose(pose, axis * (rotation_deg * kDegToRad),
                     direction * translation_m);
}

SensitivityResult SensitivityGrid(const Scene& scene, const Pose& ground_truth,
                                  const Camera& camera,
                                  const SensitivityConfig& config) {
  if (config.rotation_levels_deg.empty() ||
      config.translation_levels_m.empty() || config.trials < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensitivity grid needs levels and >= 1 trial");
  }
  config.refine.Validate();
  const std::size_t n_rot = config.rotation_levels_deg.size();
  const std::size_t n_trans = config.translation_levels_m.size();
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  const std::size_t jobs = n_rot * n_trans * trials;

  // 0 = fail, bit 0 = first-iteration success, bit 1 = last-iteration success.
  std::vector<int> outcome(jobs, 0);
  auto success = [&](const Pose& pose) {
    const PoseError e = ComputePoseError(ground_truth, pose);
    return e.position_err < config.success_position_m &&
           e.rotation_err < config.success_rotation_deg;
  };

  ParallelFor(jobs, config.threads, [&](std::size_t job) {
    const std::size_t t_idx = job / (n_rot * trials);
    const std::size_t r_idx = (job / trials) % n_rot;
    const std::size_t trial = job % trials;
    Rng rng(DeriveSeed(config.seed, {t_idx, r_idx, trial}));
    const Pose init =
        RandomPerturbation(ground_truth, config.rotation_levels_deg[r_idx],
                           config.translation_levels_m[t_idx], rng);
    SimMatcherSpec matcher = config.matcher;
    matcher.rng_seed = DeriveSeed(config.seed, {t_idx, r_idx, trial, 1});
    RefineConfig refine = config.refine;
    refine.ransac.rng_seed = DeriveSeed(config.seed, {t_idx, r_idx, trial, 2});
    SimulatedMatcher provider(scene, ground_truth, camera, matcher);
    const RefineResult result = Refine(init, scene.mesh, camera, provider, refine);
    int o = 0;
    if (!result.trace.empty() && success(result.trace.front().pose)) o |= 1;
    if (!result.trace.empty() && success(result.pose)) o |= 2;
    outcome[job] = o;
  });

  SensitivityResult out;
  out.rotation_levels_deg = config.rotation_levels_deg;
  out.translation_levels_m = config.translation_levels_m;
  out.trials = config.trials;
  out.last_iteration = config.refine.iterations;
  out.success_first.assign(n_trans, std::vector<double>(n_rot, 0.0));
  out.success_last.assign(n_trans, std::vector<double>(n_rot, 0.0));
  for (std::size_t job = 0; job < jobs; ++job) {
    const std::size_t t_idx = job / (n_rot * trials);
    const std::size_t r_idx = (job / trials) % n_rot;
    if (outcome[job] & 1) out.success_first[t_idx][r_idx] += 1.0;
    if (outcome[job] & 2) out.success_last[t_idx][r_idx] += 1.0;
  }
  for (std::size_t t = 0; t < n_trans; ++t) {
    for (std::size_t r = 0; r < n_rot; ++r) {
      out.success_first[t][r] /= static_cast<double>(trials);
      out.success_last[t][r] /= static_cast<double>(trials);
    }
  }
  return out;
}

std::string SensitivityCsv(const SensitivityResult& result) {
  std::ostringstream out;
  out << "iteration,translation_m,rotation_deg,success_rate\n";
  auto emit = [&](int iteration, const std::vector<std::vector<double>>& m) {
    for (std::size_t t = 0; t < result.translation_levels_m.size(); ++t) {
      for (std::size_t r = 0; r < result.rotation_levels_deg.size(); ++r) {
        out << iteration << ',' << FormatDouble(result.translation_levels_m[t])
            << ',' << FormatDouble(result.rotation_levels_deg[r]) << ','
            << FormatDouble(m[t][r]) << '\n';
      }
    }
  };
  emit(1, result.success_first);
  emit(result.last_iteration, result.success_last);
  return out.str();
}

std::string SensitivityHeatmap(const SensitivityResult& result) {
  std::ostringstream out;
  auto block = [&](int iteration, const std::vector<std::vector<double>>& m) {
    out << "# success rate after iteration " << iteration
        << "; rows: translation (m), columns: rotation (deg)\n";
    out << result.rotation_levels_deg.size();
    for (double r : result.rotation_levels_deg) out << ' ' << FormatDouble(r);
    out << '\n';
    for (std::size_t t = 0; t < result.translation_levels_m.size(); ++t) {
      out << FormatDouble(result.translation_levels_m[t]);
      for (double v : m[t]) out << ' ' << FormatDouble(v);
      out << '\n';
    }
  };
  block(1, result.success_first);
  out << "\n\n";
  block(result.last_iteration, result.success_last);
  return out.str();
}

std::vector<UncertaintyBenchmarkRow> RunUncertaintyBenchmark(
    const Scene& scene, const Camera& camera, std::span<const Pose> truths,
    const UncertaintyBenchmarkConfig& config) {
  std::vector<UncertaintyBenchmarkRow> rows(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) {
    UncertaintyBenchmarkRow& row = rows[i];
    row.truth = truths[i];
    Rng rng(DeriveSeed(config.seed, {i}));
    const Pose init = RandomPerturbation(truths[i], config.init_rotation_deg,
                                         config.init_translation_m, rng);
    SimMatcherSpec matcher = config.matcher;
    matcher.rng_seed = DeriveSeed(config.seed, {i, 1});
    SimulatedMatcher provider(scene, truths[i], camera, matcher);
    RefineConfig refine = config.refine;
    refine.ransac.rng_seed = DeriveSeed(config.seed, {i, 2});
    const RefineResult refined =
        Refine(init, scene.mesh, camera, provider, refine);
    row.refined = refined.pose;
    row.accepted = refined.accepted;
    row.num_inliers = refined.inliers.size();
    row.first_order =
        FirstOrderUncertainty(refined.inliers, refined.pose, camera,
                              config.noise, config.first_order_samples,
                              DeriveSeed(config.seed, {i, 3}));
    row.monte_carlo = MonteCarloUncertainty(
        refined.inliers, refined.pose, camera, config.noise,
        config.monte_carlo_samples, DeriveSeed(config.seed, {i, 4}),
        config.refine.lm, config.threads);
    for (std::size_t k = 0; k < config.sampling_ratios.size(); ++k) {
      row.sampling.push_back(SamplingUncertainty(
          refined.inliers, refined.pose, camera, config.sampling_ratios[k],
          config.sampling_samples, DeriveSeed(config.seed, {i, 5, k}),
          config.refine.ransac, config.refine.lm, config.threads));
    }
  }
  return rows;
}

}  // namespace renderloc
