#include "catpose/cli.hpp"

#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "catpose/datagen.hpp"
#include "catpose/error.hpp"
#include "catpose/evaluation.hpp"
#include "catpose/geometry.hpp"
#include "catpose/io.hpp"
#include "catpose/losses.hpp"
#include "catpose/registration.hpp"
#include "catpose/report.hpp"
#include "catpose/symmetry.hpp"

namespace catpose::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

struct Options {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;

  // fit
  std::string corr_file;
  RansacParams ransac;

  // eval / perturb / synth
  std::string gt_file;
  std::string pred_file;
  std::string out;
  double curve_rot_max_cm = std::numeric_limits<double>::infinity();

  // synth
  std::string config_file;

  // losses
  std::string inputs_dir;
  LossWeights weights;

  // map-rot
  std::vector<double> rotation;

  // perturb
  PerturbErrors errors;
};

Json mat_json(const Mat3& m) {
  Json a = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  const CorrespondenceSet corr = io::correspondences_from_json(io::read_json(o.corr_file), o.corr_file);
  RansacParams params = o.ransac;
  params.seed = o.seed;
  try {
    const PoseFitResult fit = ransac_fit(corr, params, o.threads);
    Json j = io::transform_to_json(fit.transform);
    j["num_correspondences"] = corr.src.size();
    j["inliers"] = fit.inlier_count();
    j["inlier_ratio"] = static_cast<double>(fit.inlier_count()) / static_cast<double>(corr.src.size());
    j["inlier_rms"] = fit.inlier_rms;
    j["inlier_threshold"] = fit.inlier_threshold;
    j["iterations"] = fit.iterations_run;
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const FitFailure& f) {
    err << "fit failed: " << f.what() << " (best attempt: " << f.best().inlier_count() << " inliers after "
        << f.best().iterations_run << " iterations)\n";
    return kExitFitFailure;
  }
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto gts = io::ground_truth_from_json(io::read_json(o.gt_file), o.gt_file);
  const auto dets = io::detections_from_json(io::read_json(o.pred_file), o.pred_file);
  const EvaluationReport report = evaluate_report(dets, gts, o.threads);
  CurveSweep sweep = CurveSweep::standard();
  sweep.rotation_sweep_max_cm = o.curve_rot_max_cm;
  const CurveTable curves = ap_curves(dets, gts, sweep, o.threads);

  const std::string table = format_report_table(report);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  io::write_json(dir / "report.json", report_to_json(report));
  io::write_text(dir / "report.txt", table);
  io::write_text(dir / "curves_iou.csv", curves_to_csv(curves.iou));
  io::write_text(dir / "curves_rotation.csv", curves_to_csv(curves.rotation));
  io::write_text(dir / "curves_translation.csv", curves_to_csv(curves.translation));
  out << table;
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  SynthSceneConfig cfg;
  if (!o.config_file.empty()) cfg = synth_config_from_json(io::read_json(o.config_file));
  if (o.seed_given) cfg.seed = o.seed;
  validate(cfg);
  std::vector<std::string> warnings;
  const auto priors = resolve_priors(cfg, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const SynthDataset data = synth_scenes(cfg, priors, o.threads);
  write_dataset(data, cfg, o.out);

  std::map<std::string, std::size_t> per_category;
  std::size_t instances = 0;
  for (const auto& scene : data.scenes) {
    for (const auto& inst : scene.instances) {
      ++per_category[inst.gt.category];
      ++instances;
    }
  }
  out << "scenes: " << data.scenes.size() << '\n' << "instances: " << instances << '\n';
  for (const auto& [category, n] : per_category) out << "  " << category << ": " << n << '\n';
  return kExitOk;
}

PointCloud require_ply(const fs::path& path) {
  if (!fs::exists(path)) throw InvalidInput("missing input file '" + path.string() + "'");
  return io::read_ply(path);
}

int cmd_losses(const Options& o, std::ostream& out) {
  const fs::path dir(o.inputs_dir);
  if (!fs::is_directory(dir)) throw InvalidInput("'" + dir.string() + "' is not a directory");
  auto need = [&](const char* name) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw InvalidInput("missing input file '" + p.string() + "'");
    return p;
  };
  const DeformationField d = io::deformation_from_json(io::read_json(need("D.json")), (dir / "D.json").string());
  const CorrespondenceMatrix a =
      CorrespondenceMatrix::from_dense(io::matrix_from_json(io::read_json(need("A.json")), (dir / "A.json").string()));
  // M may be given directly or as prior + deformation; P may be given
  // directly or derived as A·M.
  const PointCloud m = fs::exists(dir / "M.ply") ? io::read_ply(dir / "M.ply")
                       : fs::exists(dir / "Mc.ply")
                           ? reconstruct_model(io::read_ply(dir / "Mc.ply"), d)
                           : throw InvalidInput("missing input file '" + (dir / "M.ply").string() + "'");
  const PointCloud m_gt = require_ply(dir / "M_gt.ply");
  const PointCloud p = fs::exists(dir / "P.ply") ? io::read_ply(dir / "P.ply") : nocs_coordinates(a, m);
  const PointCloud p_gt = require_ply(dir / "P_gt.ply");
  const LossBreakdown b = total_loss(m, m_gt, p, p_gt, a, d, o.weights);
  const Json j = {{"cd", b.cd}, {"corr", b.corr}, {"entropy", b.entropy}, {"def", b.def}, {"total", b.total}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_map_rot(const Options& o, std::ostream& out) {
  if (o.rotation.size() != 9) throw InvalidInput("map-rot expects 9 matrix entries, row-major");
  Mat3 r;
  for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = o.rotation[static_cast<std::size_t>(i)];
  if (!is_rotation(r)) throw InvalidInput("input is not a rotation matrix (orthonormal, det +1, tolerance 1e-6)");
  const MapResult m = map_rotation(r);
  const Json j = {{"theta_hat", m.theta_hat},
                  {"theta_hat_deg", m.theta_hat * 180.0 / std::numbers::pi},
                  {"ambiguous", m.ambiguous},
                  {"s_hat", mat_json(m.s_hat)},
                  {"mapped_rotation", mat_json(m.mapped_rotation)}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_perturb(const Options& o, std::ostream& out) {
  const auto gts = io::ground_truth_from_json(io::read_json(o.gt_file), o.gt_file);
  const auto dets = perturb_predictions(gts, o.errors, o.seed);
  io::write_json(o.out, io::detections_to_json(dets));
  out << "predictions: " << dets.size() << '\n';
  return kExitOk;
}

int cmd_symmetry_table(std::ostream& out) {
  for (const auto& row : category_symmetry_table()) out << row.category << '\t' << row.rule << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Category-level 6D pose and size toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Random seed")->each([&](const std::string&) { o.seed_given = true; });
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit", "RANSAC + Umeyama similarity fit from a correspondence file");
  fit->add_option("corr_file", o.corr_file, "Correspondence JSON {src, dst}")->required();
  fit->add_option("--ransac-iters", o.ransac.max_iterations, "Maximum RANSAC iterations")->capture_default_str();
  fit->add_option("--sample-size", o.ransac.sample_size, "Point pairs per hypothesis")->capture_default_str();
  fit->add_option("--inlier-frac", o.ransac.inlier_fraction_of_diameter,
                  "Inlier threshold as a fraction of the observed diameter")
      ->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Benchmark predictions against ground truth");
  eval->add_option("gt_file", o.gt_file, "Ground-truth split JSON")->required();
  eval->add_option("pred_file", o.pred_file, "Prediction split JSON")->required();
  eval->add_option("--out", o.out, "Output directory")->required();
  eval->add_option("--curve-rot-max-cm", o.curve_rot_max_cm,
                   "Translation limit held while sweeping rotation (default unconstrained)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic ground-truth split");
  synth->add_option("config_file", o.config_file, "Generator config JSON (defaults when omitted)");
  synth->add_option("--out", o.out, "Output directory")->required();

  auto* losses = app.add_subcommand("losses", "Evaluate all training losses from files");
  losses->add_option("inputs_dir", o.inputs_dir, "Directory with M/Mc, M_gt, P, P_gt (.ply), A.json, D.json")
      ->required();
  losses->add_option("--lambda1", o.weights.lambda1)->capture_default_str();
  losses->add_option("--lambda2", o.weights.lambda2)->capture_default_str();
  losses->add_option("--lambda3", o.weights.lambda3)->capture_default_str();
  losses->add_option("--lambda4", o.weights.lambda4)->capture_default_str();

  auto* map_rot = app.add_subcommand("map-rot", "Canonicalize a rotation under y-axis symmetry");
  map_rot->add_option("rotation", o.rotation, "Nine entries, row-major")->required()->expected(9);

  auto* perturb = app.add_subcommand("perturb", "Write predictions with exact pose errors");
  perturb->add_option("gt_file", o.gt_file, "Ground-truth split JSON")->required();
  perturb->add_option("--out", o.out, "Output prediction JSON")->required();
  perturb->add_option("--rot-deg", o.errors.rot_deg)->capture_default_str();
  perturb->add_option("--trans-cm", o.errors.trans_cm)->capture_default_str();
  perturb->add_option("--scale-factor", o.errors.scale_factor)->capture_default_str();
  perturb->add_flag("--symmetric-safe", o.errors.symmetric_safe, "Rotate y-symmetric instances about y only");

  auto* table = app.add_subcommand("symmetry-table", "Print the category symmetry table");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; every other parse error is an input error.
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*fit) return cmd_fit(o, out, err);
    if (*eval) return cmd_eval(o, out);
    if (*synth) return cmd_synth(o, out, err);
    if (*losses) return cmd_losses(o, out);
    if (*map_rot) return cmd_map_rot(o, out);
    if (*perturb) return cmd_perturb(o, out);
    if (*table) return cmd_symmetry_table(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace catpose::cli
