// renderloc: batch pose refinement, evaluation and synthetic experiments.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "renderloc/correspondence.h"
#include "renderloc/error.h"
#include "renderloc/io.h"
#include "renderloc/metrics.h"
#include "renderloc/parallel.h"
#include "renderloc/random.h"
#include "renderloc/refine.h"
#include "renderloc/synth.h"
#include "renderloc/text_io.h"
#include "renderloc/uncertainty.h"

namespace fs = std::filesystem;
using namespace renderloc;

namespace {

std::mutex log_mutex;

void Log(const std::string& line) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << line << '\n';
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) values.push_back(ParseDouble(item, 0));
  }
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty list '" + text + "'");
  }
  return values;
}

// "0.25:2,0.5:5,5:10"
ThresholdSet ParsePoseThresholds(const std::string& text) {
  std::vector<PoseThreshold> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pose threshold '" + item + "' is not <meters>:<degrees>");
    }
    out.push_back({ParseDouble(item.substr(0, colon), 0),
                   ParseDouble(item.substr(colon + 1), 0)});
  }
  return ThresholdSet(out);
}

// ------------------------------------------------------------ refine

// Reads `<dir>/<image>/iter<k>.txt` plus any `iter<k>.<source>.txt` siblings
// for round k (1-based).
class FileMatchProvider : public MatchProvider {
 public:
  FileMatchProvider(fs::path dir, std::string image)
      : dir_(std::move(dir)), image_(std::move(image)) {}

  std::vector<MatchSet> Matches(int iteration, const Pose&,
                                const DepthMap&) override {
    const fs::path image_dir = dir_ / image_;
    const std::string stem = "iter" + std::to_string(iteration + 1);
    std::vector<fs::path> files;
    if (fs::is_directory(image_dir)) {
      for (const auto& entry : fs::directory_iterator(image_dir)) {
        const std::string name = entry.path().filename().string();
        if (name == stem + ".txt" ||
            (name.starts_with(stem + ".") && name.ends_with(".txt"))) {
          files.push_back(entry.path());
        }
      }
    }
    if (files.empty()) {
      throw Error(ErrorCode::kIo, "missing match file " +
                                      (image_dir / (stem + ".txt")).string());
    }
    std::sort(files.begin(), files.end());
    std::vector<MatchSet> sets;
    for (const fs::path& f : files) sets.push_back(ReadMatchesFile(f));
    return sets;
  }

 private:
  fs::path dir_;
  std::string image_;
};

struct RefineArgs {
  std::string mesh;
  std::string cameras;
  std::string poses;
  std::string matches;
  std::string out;
  int iterations = 5;
  std::size_t min_effective_inliers = 10;
  double inlier_threshold_px = 4.0;
  std::uint64_t seed = 0;
  int threads = 0;
  bool overlays = false;
  bool checkpoints = true;
};

int RunRefine(const RefineArgs& args) {
  const TriMesh mesh = ReadPlyFile(args.mesh);
  const auto cameras = ReadCamerasFile(args.cameras);
  const std::vector<PoseRecord> initial = ReadPosesFile(args.poses);
  for (const PoseRecord& r : initial) CameraForImage(cameras, r.name);

  RefineConfig config;
  config.iterations = args.iterations;
  config.min_effective_inliers = args.min_effective_inliers;
  config.ransac.inlier_threshold_px = args.inlier_threshold_px;
  config.ransac.rng_seed = args.seed;
  config.Validate();

  const fs::path out(args.out);
  std::vector<RefineResult> results(initial.size());
  const int threads = args.threads > 0 ? args.threads : DefaultParallelism();
  ParallelFor(initial.size(), threads, [&](std::size_t i) {
    const PoseRecord& record = initial[i];
    const Camera& camera = CameraForImage(cameras, record.name);
    FileMatchProvider provider(args.matches, record.name);
    const fs::path checkpoint_dir = out / "checkpoints" / record.name;
    RenderCallback on_render;
    if (args.checkpoints) {
      on_render = [&](int iteration, const Pose& pose, const DepthMap& depth) {
        const std::string stem = "iter" + std::to_string(iteration + 1);
        WriteFileAtomic(checkpoint_dir / (stem + ".pfm"), WritePfm(depth));
        WriteFileAtomic(checkpoint_dir / (stem + ".pose.txt"),
                        WritePoses({PoseRecord::FromPose(record.name, pose)}));
        if (args.overlays) {
          WriteFileAtomic(checkpoint_dir / (stem + ".ppm"),
                          WritePpm(RenderColor(mesh, pose, camera)));
        }
      };
    }
    results[i] = Refine(record.ToPose(), mesh, camera, provider, config, on_render);
    const RefineResult& r = results[i];
    Log(record.name + ": " + (r.accepted ? "accepted" : "rejected") + " after " +
        std::to_string(r.trace.size()) + " round(s)" +
        (r.failure_reason.empty() ? "" : " (" + r.failure_reason + ")"));
  });

  std::vector<PoseRecord> refined;
  nlohmann::ordered_json report;
  report["seed"] = args.seed;
  report["iterations"] = args.iterations;
  report["min_effective_inliers"] = args.min_effective_inliers;
  report["inlier_threshold_px"] = args.inlier_threshold_px;
  report["images"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const std::string& name = initial[i].name;
    refined.push_back(PoseRecord::FromPose(name, results[i].pose));
    report["images"].push_back(RefineResultToJson(name, results[i]));
    WriteFileAtomic(out / "inliers" / (name + ".txt"),
                    WriteCorrespondences(name, results[i].inliers));
  }
  WriteFileAtomic(out / "poses.txt", WritePoses(refined));
  WriteFileAtomic(out / "results.json", report.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------ uncertainty

struct UncertaintyArgs {
  std::string poses;
  std::string cameras;
  std::string inliers;
  std::string out;
  std::string method = "sampling";
  double ratio = 0.5;
  std::size_t samples = 0;  // 0 picks the method default
  double sigma_px = 1.0;
  std::uint64_t seed = 0;
  int threads = 0;
};

int RunUncertainty(const UncertaintyArgs& args) {
  const UncertaintyMethod method = ParseUncertaintyMethod(args.method);
  const std::vector<PoseRecord> poses = ReadPosesFile(args.poses);
  const auto cameras = ReadCamerasFile(args.cameras);
  NoiseModel noise;
  noise.sigma_px = args.sigma_px;
  noise.Validate();
  const int threads = args.threads > 0 ? args.threads : DefaultParallelism();

  std::vector<NamedUncertainty> out(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const PoseRecord& record = poses[i];
    const Camera& camera = CameraForImage(cameras, record.name);
    const NamedCorrespondences inliers = ReadCorrespondencesFile(
        fs::path(args.inliers) / (record.name + ".txt"));
    const std::uint64_t seed = DeriveSeed(args.seed, {i});
    out[i].image = record.name;
    switch (method) {
      case UncertaintyMethod::kFirstOrder:
        out[i].estimate = FirstOrderUncertainty(
            inliers.corrs, record.ToPose(), camera, noise,
            args.samples ? args.samples : 1000, seed);
        break;
      case UncertaintyMethod::kMonteCarlo:
        out[i].estimate = MonteCarloUncertainty(
            inliers.corrs, record.ToPose(), camera, noise,
            args.samples ? args.samples : 200, seed, {}, threads);
        break;
      case UncertaintyMethod::kSampling:
        out[i].estimate = SamplingUncertainty(
            inliers.corrs, record.ToPose(), camera, args.ratio,
            args.samples ? args.samples : kDefaultSamplingDraws, seed, {}, {},
            threads);
        break;
    }
    Log(record.name + ": " + UncertaintySourceLabel(out[i].estimate) + " " +
        FormatDouble(out[i].estimate.position_unc) + " m " +
        FormatDouble(out[i].estimate.rotation_unc) + " deg");
  }
  WriteFileAtomic(args.out, WriteUncertainties(out));
  return 0;
}

// ------------------------------------------------------------ eval

struct EvalArgs {
  std::string reference;
  std::string estimate;
  std::string cameras;
  std::string inliers;
  std::vector<std::string> uncertainty;
  std::string reference_source = "reference";
  std::string pose_thresholds = "0.25:2,0.5:5,5:10";
  std::string reprojection_thresholds = "10,20,50,100";
  std::string out_json;
  std::string out_table;
};

int RunEval(const EvalArgs& args) {
  const auto reference = PosesByName(ReadPosesFile(args.reference));
  const auto estimate = PosesByName(ReadPosesFile(args.estimate));
  std::vector<std::string> only_ref;
  std::vector<std::string> only_est;
  for (const auto& [name, pose] : reference) {
    if (!estimate.contains(name)) only_ref.push_back(name);
  }
  for (const auto& [name, pose] : estimate) {
    if (!reference.contains(name)) only_est.push_back(name);
  }
  if (!only_ref.empty() || !only_est.empty()) {
    std::string msg = "image names differ between reference and estimate:";
    for (const auto& n : only_ref) msg += "\n  missing from estimate: " + n;
    for (const auto& n : only_est) msg += "\n  missing from reference: " + n;
    throw Error(ErrorCode::kLengthMismatch, msg);
  }

  const auto cameras = ReadCamerasFile(args.cameras);
  std::map<std::string, EvalImage> images;
  for (const auto& [name, pose] : reference) {
    EvalImage& image = images[name];
    image.name = name;
    image.reference = pose;
    image.estimate = estimate.at(name);
    image.camera = CameraForImage(cameras, name);
    const NamedCorrespondences corrs =
        ReadCorrespondencesFile(fs::path(args.inliers) / (name + ".txt"));
    for (const Correspondence& c : corrs.corrs) image.points.push_back(c.point);
  }
  for (const std::string& path : args.uncertainty) {
    for (const NamedUncertainty& u : ReadUncertaintiesFile(path)) {
      auto it = images.find(u.image);
      if (it == images.end()) {
        throw Error(ErrorCode::kLengthMismatch,
                    path + ": unknown image " + u.image);
      }
      it->second.uncertainties[UncertaintySourceLabel(u.estimate)] = u.estimate;
    }
  }
  std::vector<EvalImage> list;
  for (auto& [name, image] : images) list.push_back(std::move(image));

  const std::vector<double> reproj = ParseList(args.reprojection_thresholds);
  const EvalReport report =
      Evaluate(list, ParsePoseThresholds(args.pose_thresholds), reproj,
               args.reference_source);
  const std::string table = FormatEvalTable(report);
  if (!args.out_json.empty()) {
    WriteFileAtomic(args.out_json, EvalReportToJson(report).dump(2) + "\n");
  }
  if (!args.out_table.empty()) WriteFileAtomic(args.out_table, table);
  std::cout << table;
  return 0;
}

// ------------------------------------------------------------ synth

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 7;
  std::size_t images = 10;
  std::string layout = "box-courtyard";
  double extent_m = 20.0;
  double density = 0.4;
  int triangles = 600;
  double init_rotation_deg = 5.0;
  double init_translation_m = 1.0;
  double sigma_px = 1.0;
  double outlier_ratio = 0.2;
  double viewpoint_noise_gain = 0.02;
  int iterations = 5;
  bool emit_matches = true;
};

int RunSynth(const SynthArgs& args) {
  SceneSpec spec;
  spec.layout = ParseSceneLayout(args.layout);
  spec.extent_m = args.extent_m;
  spec.feature_density = args.density;
  spec.triangle_target = args.triangles;
  spec.rng_seed = DeriveSeed(args.seed, {0});
  const Scene scene = MakeScene(spec);
  const Camera camera = ReferenceCamera();
  const std::vector<Pose> truths =
      ReferencePoses(args.images, DeriveSeed(args.seed, {1}));

  const fs::path out(args.out);
  WriteFileAtomic(out / "scene.ply", WritePly(scene.mesh));
  WriteFileAtomic(out / "cameras.txt", WriteCameras({{"*", camera}}));

  std::vector<PoseRecord> gt;
  std::vector<PoseRecord> init;
  std::vector<PoseRecord> refined;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img%03zu", i);
    Rng rng(DeriveSeed(args.seed, {2, i}));
    const Pose start = RandomPerturbation(truths[i], args.init_rotation_deg,
                                          args.init_translation_m, rng);
    gt.push_back(PoseRecord::FromPose(name, truths[i]));
    // Written at full precision and read back so the file-driven run starts
    // from exactly the same pose.
    std::istringstream start_text(
        WritePoses({PoseRecord::FromPose(name, start)}));
    init.push_back(ReadPoses(start_text).front());
    if (!args.emit_matches) continue;

    SimMatcherSpec matcher;
    matcher.sigma_px = args.sigma_px;
    matcher.outlier_ratio = args.outlier_ratio;
    matcher.viewpoint_noise_gain = args.viewpoint_noise_gain;
    matcher.rng_seed = DeriveSeed(args.seed, {3, i});
    SimulatedMatcher sim(scene, truths[i], camera, matcher, name);
    RefineConfig config;
    config.iterations = args.iterations;
    config.ransac.rng_seed = 0;
    const RefineResult result =
        Refine(init.back().ToPose(), scene.mesh, camera, sim, config);
    for (std::size_t k = 0; k < sim.history().size(); ++k) {
      std::ostringstream text;
      WriteMatches(text, sim.history()[k]);
      WriteFileAtomic(out / "matches" / name /
                          ("iter" + std::to_string(k + 1) + ".txt"),
                      text.str());
    }
    refined.push_back(PoseRecord::FromPose(name, result.pose));
  }
  WriteFileAtomic(out / "poses_gt.txt", WritePoses(gt));
  WriteFileAtomic(out / "poses_init.txt", WritePoses(init));
  if (args.emit_matches) {
    WriteFileAtomic(out / "poses_refined_sim.txt", WritePoses(refined));
  }
  Log("wrote " + std::to_string(truths.size()) + " image(s), " +
      std::to_string(scene.features.size()) + " features, seed " +
      std::to_string(args.seed));
  return 0;
}

// ------------------------------------------------------------ sensitivity

struct SensitivityArgs {
  std::string out;
  std::uint64_t seed = 0;
  int trials = 50;
  int iterations = 5;
  std::string rotation_levels = "0,5,10,20,30";
  std::string translation_levels = "0,1,2.5,5,10";
  int threads = 0;
};

int RunSensitivity(const SensitivityArgs& args) {
  const Scene scene = MakeScene(ReferenceSceneSpec());
  SensitivityConfig config;
  config.rotation_levels_deg = ParseList(args.rotation_levels);
  config.translation_levels_m = ParseList(args.translation_levels);
  config.trials = args.trials;
  config.refine.iterations = args.iterations;
  config.seed = args.seed;
  config.threads = args.threads > 0 ? args.threads : DefaultParallelism();
  const SensitivityResult result =
      SensitivityGrid(scene, Pose::Identity(), ReferenceCamera(), config);
  const fs::path out(args.out);
  WriteFileAtomic(out / "sensitivity.csv",
                  "# seed " + std::to_string(args.seed) + "\n" +
                      SensitivityCsv(result));
  WriteFileAtomic(out / "heatmap.dat", SensitivityHeatmap(result));
  std::cout << SensitivityCsv(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Render-to-image pose refinement and localization evaluation"};
  app.require_subcommand(1);

  RefineArgs refine;
  auto* refine_cmd = app.add_subcommand(
      "refine",
      "Refine initial poses against a mesh from per-iteration match files "
      "<matches>/<image>/iter<k>[.<source>].txt. Writes poses.txt, "
      "results.json, inliers/<image>.txt and depth checkpoints.");
  refine_cmd->add_option("--mesh", refine.mesh, "ASCII PLY scene mesh")
      ->required()->check(CLI::ExistingFile);
  refine_cmd->add_option("--cameras", refine.cameras, "camera-v1 file")
      ->required()->check(CLI::ExistingFile);
  refine_cmd->add_option("--poses", refine.poses, "initial poses (poses-v1)")
      ->required()->check(CLI::ExistingFile);
  refine_cmd->add_option("--matches", refine.matches, "match directory")
      ->required()->check(CLI::ExistingDirectory);
  refine_cmd->add_option("--out", refine.out, "output directory")->required();
  refine_cmd->add_option("--iterations", refine.iterations,
                         "render-match-estimate rounds")
      ->capture_default_str();
  refine_cmd->add_option("--min-effective-inliers", refine.min_effective_inliers,
                         "accept when effective inliers exceed this")
      ->capture_default_str();
  refine_cmd->add_option("--inlier-threshold", refine.inlier_threshold_px,
                         "LO-RANSAC inlier threshold in pixels")
      ->capture_default_str();
  refine_cmd->add_option("--seed", refine.seed, "LO-RANSAC seed")
      ->envname("RENDERLOC_SEED")->capture_default_str();
  refine_cmd->add_option("--threads", refine.threads,
                         "worker threads (0: RENDERLOC_THREADS or all cores)")
      ->capture_default_str();
  refine_cmd->add_flag("--overlays", refine.overlays,
                       "also write color renders (PPM) next to checkpoints");
  refine_cmd->add_flag("!--no-checkpoints", refine.checkpoints,
                       "skip depth checkpoints");

  UncertaintyArgs unc;
  auto* unc_cmd = app.add_subcommand(
      "uncertainty", "Per-image pose uncertainty from refined poses and inliers");
  unc_cmd->add_option("--poses", unc.poses, "refined poses (poses-v1)")
      ->required()->check(CLI::ExistingFile);
  unc_cmd->add_option("--cameras", unc.cameras, "camera-v1 file")
      ->required()->check(CLI::ExistingFile);
  unc_cmd->add_option("--inliers", unc.inliers,
                      "directory of <image>.txt corr-v1 files")
      ->required()->check(CLI::ExistingDirectory);
  unc_cmd->add_option("--out", unc.out, "output uncertainty-v1 file")
      ->required();
  unc_cmd->add_option("--method", unc.method,
                      "first-order | monte-carlo | sampling")
      ->capture_default_str();
  unc_cmd->add_option("--ratio", unc.ratio, "subset ratio for sampling")
      ->capture_default_str();
  unc_cmd->add_option("--samples", unc.samples,
                      "draws (0: 1000 first-order, 200 monte-carlo, 50 "
                      "sampling)")
      ->capture_default_str();
  unc_cmd->add_option("--sigma", unc.sigma_px, "pixel noise std")
      ->capture_default_str();
  unc_cmd->add_option("--seed", unc.seed, "random seed")
      ->envname("RENDERLOC_SEED")->capture_default_str();
  unc_cmd->add_option("--threads", unc.threads,
                      "worker threads (0: RENDERLOC_THREADS or all cores)")
      ->capture_default_str();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Score estimated poses against reference poses");
  eval_cmd->add_option("--reference", eval.reference, "reference poses")
      ->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--estimate", eval.estimate, "estimated poses")
      ->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--cameras", eval.cameras, "camera-v1 file")
      ->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--inliers", eval.inliers,
                       "directory of reference inliers <image>.txt (corr-v1)")
      ->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--uncertainty", eval.uncertainty,
                       "uncertainty-v1 file(s) of the reference poses")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--reference-source", eval.reference_source,
                       "label of the reference poses in the report")
      ->capture_default_str();
  eval_cmd->add_option("--pose-thresholds", eval.pose_thresholds,
                       "comma list of <meters>:<degrees>")
      ->capture_default_str();
  eval_cmd->add_option("--reprojection-thresholds",
                       eval.reprojection_thresholds, "comma list of pixels")
      ->capture_default_str();
  eval_cmd->add_option("--json", eval.out_json, "write the JSON report here");
  eval_cmd->add_option("--table", eval.out_table, "write the text table here");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand(
      "synth",
      "Generate a synthetic scene, cameras, ground-truth and initial poses and "
      "simulated per-iteration match files");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "random seed")
      ->envname("RENDERLOC_SEED")->capture_default_str();
  synth_cmd->add_option("--images", synth.images, "number of images")
      ->capture_default_str();
  synth_cmd->add_option("--layout", synth.layout,
                        "plane-grid | box-courtyard | random-facade")
      ->capture_default_str();
  synth_cmd->add_option("--extent", synth.extent_m, "scene extent in meters")
      ->capture_default_str();
  synth_cmd->add_option("--density", synth.density, "features per square meter")
      ->capture_default_str();
  synth_cmd->add_option("--triangles", synth.triangles, "triangle count target")
      ->capture_default_str();
  synth_cmd->add_option("--init-rotation", synth.init_rotation_deg,
                        "initial pose rotation error in degrees")
      ->capture_default_str();
  synth_cmd->add_option("--init-translation", synth.init_translation_m,
                        "initial pose position error in meters")
      ->capture_default_str();
  synth_cmd->add_option("--sigma", synth.sigma_px, "match noise std in pixels")
      ->capture_default_str();
  synth_cmd->add_option("--outliers", synth.outlier_ratio, "outlier ratio")
      ->capture_default_str();
  synth_cmd->add_option("--viewpoint-noise", synth.viewpoint_noise_gain,
                        "extra noise per pixel of render displacement")
      ->capture_default_str();
  synth_cmd->add_option("--iterations", synth.iterations,
                        "rounds of match files to emit")
      ->capture_default_str();
  synth_cmd->add_flag("!--no-matches", synth.emit_matches,
                      "skip the simulated refinement and match files");

  SensitivityArgs sens;
  auto* sens_cmd = app.add_subcommand(
      "sensitivity",
      "Success rates of refinement from perturbed starts on the reference "
      "synthetic scene");
  sens_cmd->add_option("--out", sens.out, "output directory")->required();
  sens_cmd->add_option("--seed", sens.seed, "random seed")
      ->envname("RENDERLOC_SEED")->capture_default_str();
  sens_cmd->add_option("--trials", sens.trials, "trials per cell")
      ->capture_default_str();
  sens_cmd->add_option("--iterations", sens.iterations, "refinement rounds")
      ->capture_default_str();
  sens_cmd->add_option("--rotation-levels", sens.rotation_levels,
                       "comma list of degrees")
      ->capture_default_str();
  sens_cmd->add_option("--translation-levels", sens.translation_levels,
                       "comma list of meters")
      ->capture_default_str();
  sens_cmd->add_option("--threads", sens.threads,
                       "worker threads (0: RENDERLOC_THREADS or all cores)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*refine_cmd) return RunRefine(refine);
    if (*unc_cmd) return RunUncertainty(unc);
    if (*eval_cmd) return RunEval(eval);
    if (*synth_cmd) return RunSynth(synth);
    if (*sens_cmd) return RunSensitivity(sens);
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what()
              << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
