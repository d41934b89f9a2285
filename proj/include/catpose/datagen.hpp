#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "catpose/evaluation.hpp"
#include "catpose/image.hpp"
#include "catpose/losses.hpp"
#include "catpose/registration.hpp"
#include "catpose/types.hpp"

namespace catpose {

// One camera-frame point per masked pixel with nonzero depth, row-major.
// Throws InvalidInput on size mismatch or when no such pixel exists.
PointCloud backproject(const DepthImage& depth, const InstanceMask& mask, const CameraIntrinsics& k);

struct RenderedView {
  DepthImage depth;
  std::vector<InstanceMask> masks;  // one per input cloud
};

// Point splatting with a z-buffer: each point lands on its nearest pixel and
// the closest point per pixel wins. Points behind the camera or outside the
// image are dropped. Depth is rounded to millimeters.
RenderedView render_depth(const std::vector<PointCloud>& clouds, const CameraIntrinsics& k, int width,
                          int height);

// Latent vectors per category, all of one dimension.
class LatentEmbeddingSet {
 public:
  void add(const std::string& category, Eigen::VectorXd z);

  std::size_t dimension() const { return dim_; }
  const std::map<std::string, std::vector<Eigen::VectorXd>>& by_category() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<Eigen::VectorXd>> data_;
};

// Rows "category,v0,...,v(n-1)". A first line whose second field is not
// numeric is taken as a header.
LatentEmbeddingSet read_embeddings_csv(const std::filesystem::path& path);

// Component-wise mean of the category's vectors.
Eigen::VectorXd mean_embedding(const LatentEmbeddingSet& set, std::string_view category);

inline constexpr std::size_t kPriorPoints = 1024;

struct LoadedPrior {
  PointCloud cloud;
  std::vector<std::string> warnings;  // point count or scale deviations
};

// Reads a PLY prior as a NOCS-frame cloud, warning when the point count is
// not 1024 or the bounding-box diagonal is off 1 by more than 5%.
LoadedPrior load_prior(const std::filesystem::path& path);

// Procedural stand-in prior for one of the six categories, normalized and
// resampled to n points. Symmetric categories are surfaces of revolution
// about y; the mug handle points along +x.
PointCloud builtin_prior(std::string_view category, std::size_t n = kPriorPoints);

struct SynthSceneConfig {
  std::size_t scenes = 50;
  std::vector<std::string> categories{"bottle", "bowl", "camera", "can", "laptop", "mug"};
  std::size_t instances_per_scene = 3;
  std::size_t points_per_instance = kPriorPoints;
  double noise_sigma = 0.0;       // meters
  double outlier_fraction = 0.0;  // in [0, 1)
  double scale_min = 0.12;        // meters, NOCS diagonal maps to this length
  double scale_max = 0.30;
  Vec3 translation_min{-0.25, -0.2, 0.7};
  Vec3 translation_max{0.25, 0.2, 1.2};
  double deformation_amplitude = 0.03;  // NOCS units
  int image_width = 640;
  int image_height = 480;
  CameraIntrinsics intrinsics;
  std::uint64_t seed = 0;
  std::map<std::string, std::filesystem::path> prior_files;  // overrides builtin priors
};

// Throws InvalidInput on any out-of-range field.
void validate(const SynthSceneConfig& cfg);

SynthSceneConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json synth_config_to_json(const SynthSceneConfig& cfg);

struct SynthInstance {
  GroundTruthInstance gt;
  DeformationField deformation;  // model = prior + deformation
  PointCloud model;              // ground-truth NOCS model
  CorrespondenceSet corr;        // exact NOCS coordinates -> observed points
  std::vector<bool> outlier;     // per observed point
};

struct SynthScene {
  std::string id;
  std::vector<SynthInstance> instances;
  RenderedView view;
};

struct SynthDataset {
  std::vector<SynthScene> scenes;

  std::vector<GroundTruthInstance> ground_truth() const;
};

// Generates scenes in parallel; scene i uses seed (cfg.seed XOR i), so the
// output does not depend on `threads`.
SynthDataset synth_scenes(const SynthSceneConfig& cfg, const std::map<std::string, PointCloud>& priors,
                          int threads = 1);

// Priors for cfg.categories: files from cfg.prior_files, builtin otherwise.
std::map<std::string, PointCloud> resolve_priors(const SynthSceneConfig& cfg,
                                                 std::vector<std::string>* warnings = nullptr);

// Layout: <out>/gt.json (whole split), <out>/config.json and
// <out>/scenes/<id>/{depth.pgm, mask_<k>.pgm, gt.json, corr_<k>.json,
// deform_<k>.json}. corr files carry an "outlier" flag array next to
// src/dst.
void write_dataset(const SynthDataset& data, const SynthSceneConfig& cfg, const std::filesystem::path& out);

struct PerturbErrors {
  double rot_deg = 0.0;
  double trans_cm = 0.0;
  double scale_factor = 1.0;
  // Rotate y-symmetric instances about their symmetry axis only.
  bool symmetric_safe = false;
};

// Predictions with exactly the requested errors and score 1.0.
std::vector<Detection> perturb_predictions(const std::vector<GroundTruthInstance>& gts,
                                           const PerturbErrors& errors, std::uint64_t seed);

}  // namespace catpose
