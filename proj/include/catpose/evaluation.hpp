#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catpose/symmetry.hpp"
#include "catpose/types.hpp"

namespace catpose {

struct Detection {
  std::string image_id;
  std::string category;
  double score = 1.0;
  SimilarityTransform pose;
  Vec3 nocs_extents = Vec3::Ones();
};

struct GroundTruthInstance {
  std::string image_id;
  std::string category;
  SimilarityTransform pose;
  Vec3 nocs_extents = Vec3::Ones();
  std::optional<bool> handle_visible;  // mug only

  SymmetryClass symmetry() const { return symmetry_class_for(category, handle_visible); }
};

struct CurveSweep;
struct CurveTable;

class ThresholdSpec {
 public:
  enum class Kind { kIou, kPose };

  // t in (0, 1].
  static ThresholdSpec iou(double t);
  // Both limits > 0; pass infinity to leave one unconstrained.
  static ThresholdSpec pose(double max_deg, double max_cm);

  Kind kind() const { return kind_; }
  double iou_threshold() const { return iou_; }
  double max_deg() const { return max_deg_; }
  double max_cm() const { return max_cm_; }

  // "3D50", "5deg2cm", ...
  std::string label() const;

 private:
  friend CurveTable ap_curves(const std::vector<Detection>&, const std::vector<GroundTruthInstance>&,
                              const CurveSweep&, int);
  ThresholdSpec(Kind k, double iou, double deg, double cm) : kind_(k), iou_(iou), max_deg_(deg), max_cm_(cm) {}

  Kind kind_;
  double iou_;
  double max_deg_;
  double max_cm_;
};

// The seven report columns: 3D25, 3D50, 3D75, 5°2cm, 5°5cm, 10°2cm, 10°5cm.
std::vector<ThresholdSpec> standard_specs();

OrientedBox3D detection_box(const Detection& d);
OrientedBox3D ground_truth_box(const GroundTruthInstance& g);

// Degrees. Asymmetric: geodesic angle. y-symmetric: angle between the rotated
// y axes, which ignores rotation about the symmetry axis.
double rotation_error(const Mat3& predicted, const Mat3& ground_truth, SymmetryClass sym);

// Centimeters, from translations in meters.
double translation_error(const Vec3& predicted, const Vec3& ground_truth);

struct PrecisionRecall {
  std::vector<double> recall;     // per ranked detection
  std::vector<double> precision;  // per ranked detection
};

struct CategoryAp {
  std::string category;
  std::optional<double> ap;  // percent; empty when the category has no ground truth
  std::size_t num_ground_truth = 0;
  std::size_t num_detections = 0;
  PrecisionRecall pr;
};

struct ApResult {
  ThresholdSpec spec;
  std::vector<CategoryAp> categories;  // kCategories order
  std::optional<double> mean_ap;       // over categories with a defined AP
};

// Precomputed matching data (box IoUs, pose errors) for a fixed set of
// detections and ground truth, reusable across thresholds.
class EvaluationContext {
 public:
  EvaluationContext(const std::vector<Detection>& dets, const std::vector<GroundTruthInstance>& gts,
                    int threads = 1);

  ApResult evaluate(const ThresholdSpec& spec) const;

 private:
  struct Pair {
    double iou;
    double rot_deg;
    double trans_cm;
  };
  // One image of one category: detections in rank order and the pairwise
  // table against that image's ground truth of the same category.
  struct Group {
    std::vector<std::size_t> dets;  // indices into det_keys_, score-ranked
    std::size_t num_gt = 0;
    std::vector<Pair> pairs;        // dets.size() x num_gt, row-major
  };
  struct DetKey {
    double score;
    std::size_t order;  // input position, breaks score ties
  };

  std::vector<DetKey> det_keys_;
  std::map<std::string, std::vector<Group>> groups_;  // by category
  std::map<std::string, std::size_t> gt_count_;
  std::map<std::string, std::size_t> det_count_;
};

// Greedy score-ordered matching inside each (image, category); the gate is
// IoU >= 0.1 for pose specs and IoU >= t for IoU specs. AP uses all-point
// interpolation over the precision envelope.
ApResult compute_ap(const std::vector<Detection>& dets, const std::vector<GroundTruthInstance>& gts,
                    const ThresholdSpec& spec, int threads = 1);

// Matching gate for pose thresholds.
inline constexpr double kPoseMatchIou = 0.1;

struct EvaluationReport {
  std::vector<ApResult> results;  // standard_specs() order
};

EvaluationReport evaluate_report(const std::vector<Detection>& dets,
                                 const std::vector<GroundTruthInstance>& gts, int threads = 1);

struct CurveSweep {
  std::vector<double> iou;
  std::vector<double> deg;
  std::vector<double> cm;
  // Translation limit applied while sweeping rotation; infinity by default.
  double rotation_sweep_max_cm;

  // IoU 0..1 step 0.01, degrees 0..60 step 1, cm 0..10 step 0.1.
  static CurveSweep standard();
};

struct CurvePoint {
  std::string category;  // a category name or "mean"
  double threshold;
  std::optional<double> ap;
};

struct CurveTable {
  std::vector<CurvePoint> iou;
  std::vector<CurvePoint> rotation;
  std::vector<CurvePoint> translation;
};

// AP as a function of each swept threshold. The rotation sweep leaves
// translation at rotation_sweep_max_cm and the translation sweep leaves
// rotation unconstrained.
CurveTable ap_curves(const std::vector<Detection>& dets, const std::vector<GroundTruthInstance>& gts,
                     const CurveSweep& sweep, int threads = 1);

struct ReconstructionMetric {
  std::map<std::string, double> per_category;  // mean CD ×1e3
  double average = 0.0;                        // over categories
};

// Mean-normalized Chamfer distance averaged over instances, scaled by 1e3.
ReconstructionMetric reconstruction_metric(
    const std::map<std::string, std::vector<std::pair<PointCloud, PointCloud>>>& recons);

}  // namespace catpose
