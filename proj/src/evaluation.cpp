#include "catpose/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "catpose/box_iou.hpp"
#include "catpose/error.hpp"
#include "catpose/geometry.hpp"
#include "catpose/parallel.hpp"

namespace catpose {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Envelope-interpolated AP in percent. Each true positive raises recall by
// exactly 1/num_gt, so the all-point area is the mean of the envelope
// precision at the true-positive ranks.
double all_point_ap(const std::vector<bool>& tp, std::size_t num_gt, PrecisionRecall& pr) {
  pr.recall.resize(tp.size());
  pr.precision.resize(tp.size());
  std::size_t tps = 0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    tps += tp[k] ? 1 : 0;
    pr.recall[k] = static_cast<double>(tps) / static_cast<double>(num_gt);
    pr.precision[k] = static_cast<double>(tps) / static_cast<double>(k + 1);
  }
  double envelope = 0.0;
  double area = 0.0;
  for (std::size_t k = tp.size(); k-- > 0;) {
    envelope = std::max(envelope, pr.precision[k]);
    if (tp[k]) area += envelope;
  }
  return 100.0 * area / static_cast<double>(num_gt);
}

}  // namespace

ThresholdSpec ThresholdSpec::iou(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("IoU threshold must be in (0, 1]");
  return {Kind::kIou, t, 0.0, 0.0};
}

ThresholdSpec ThresholdSpec::pose(double max_deg, double max_cm) {
  if (!(max_deg > 0.0) || !(max_cm > 0.0)) {
    throw InvalidInput("pose thresholds must be positive");
  }
  return {Kind::kPose, kPoseMatchIou, max_deg, max_cm};
}

std::string ThresholdSpec::label() const {
  if (kind_ == Kind::kIou) return "3D" + format_number(std::round(iou_ * 100.0));
  return format_number(max_deg_) + "deg" + format_number(max_cm_) + "cm";
}

std::vector<ThresholdSpec> standard_specs() {
  return {ThresholdSpec::iou(0.25),     ThresholdSpec::iou(0.50),     ThresholdSpec::iou(0.75),
          ThresholdSpec::pose(5.0, 2.0),  ThresholdSpec::pose(5.0, 5.0),  ThresholdSpec::pose(10.0, 2.0),
          ThresholdSpec::pose(10.0, 5.0)};
}

OrientedBox3D detection_box(const Detection& d) {
  return {d.pose.translation, d.pose.rotation, d.pose.scale * d.nocs_extents};
}

OrientedBox3D ground_truth_box(const GroundTruthInstance& g) {
  return {g.pose.translation, g.pose.rotation, g.pose.scale * g.nocs_extents};
}

double rotation_error(const Mat3& predicted, const Mat3& ground_truth, SymmetryClass sym) {
  if (sym == SymmetryClass::kAsymmetric) return rotation_angle(predicted, ground_truth) * kRadToDeg;
  const Vec3 yp = predicted.col(1);
  const Vec3 yg = ground_truth.col(1);
  const double c = yp.dot(yg) / (yp.norm() * yg.norm());
  return std::acos(std::clamp(c, -1.0, 1.0)) * kRadToDeg;
}

double translation_error(const Vec3& predicted, const Vec3& ground_truth) {
  return 100.0 * (predicted - ground_truth).norm();
}

EvaluationContext::EvaluationContext(const std::vector<Detection>& dets,
                                     const std::vector<GroundTruthInstance>& gts, int threads) {
  // (category, image) -> member indices, in input order.
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      buckets;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!is_known_category(gts[i].category)) {
      throw InvalidInput("ground truth " + std::to_string(i) + ": unknown category '" + gts[i].category + "'");
    }
    buckets[{gts[i].category, gts[i].image_id}].second.push_back(i);
    ++gt_count_[gts[i].category];
  }
  det_keys_.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!is_known_category(dets[i].category)) {
      throw InvalidInput("detection " + std::to_string(i) + ": unknown category '" + dets[i].category + "'");
    }
    det_keys_.push_back({dets[i].score, i});
    buckets[{dets[i].category, dets[i].image_id}].first.push_back(i);
    ++det_count_[dets[i].category];
  }

  std::vector<std::pair<std::string, Group>> built(buckets.size());
  std::vector<const decltype(buckets)::value_type*> items;
  items.reserve(buckets.size());
  for (const auto& kv : buckets) items.push_back(&kv);

  parallel_for(items.size(), threads, [&](std::size_t b) {
    const auto& [key, members] = *items[b];
    const auto& [det_idx, gt_idx] = members;
    Group g;
    g.dets = det_idx;
    std::stable_sort(g.dets.begin(), g.dets.end(),
                     [&](std::size_t x, std::size_t y) { return dets[x].score > dets[y].score; });
    g.num_gt = gt_idx.size();
    g.pairs.resize(g.dets.size() * g.num_gt);
    for (std::size_t r = 0; r < g.dets.size(); ++r) {
      const Detection& d = dets[g.dets[r]];
      const OrientedBox3D dbox = detection_box(d);
      for (std::size_t c = 0; c < g.num_gt; ++c) {
        const GroundTruthInstance& gt = gts[gt_idx[c]];
        Pair& p = g.pairs[r * g.num_gt + c];
        p.iou = oriented_iou(dbox, ground_truth_box(gt));
        p.rot_deg = rotation_error(d.pose.rotation, gt.pose.rotation, gt.symmetry());
        p.trans_cm = translation_error(d.pose.translation, gt.pose.translation);
      }
    }
    built[b] = {key.first, std::move(g)};
  });
  for (auto& [category, g] : built) groups_[category].push_back(std::move(g));
}

ApResult EvaluationContext::evaluate(const ThresholdSpec& spec) const {
  ApResult result{spec, {}, std::nullopt};
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::string_view name : kCategories) {
    const std::string category(name);
    CategoryAp cat;
    cat.category = category;
    if (auto it = gt_count_.find(category); it != gt_count_.end()) cat.num_ground_truth = it->second;
    if (auto it = det_count_.find(category); it != det_count_.end()) cat.num_detections = it->second;

    // (detection index, true positive) for every detection of the category.
    std::vector<std::pair<std::size_t, bool>> outcomes;
    if (auto it = groups_.find(category); it != groups_.end()) {
      for (const Group& g : it->second) {
        std::vector<bool> taken(g.num_gt, false);
        for (std::size_t r = 0; r < g.dets.size(); ++r) {
          const double gate = spec.kind() == ThresholdSpec::Kind::kIou ? spec.iou_threshold() : kPoseMatchIou;
          std::size_t best = g.num_gt;
          double best_iou = -1.0;
          for (std::size_t c = 0; c < g.num_gt; ++c) {
            const double iou = g.pairs[r * g.num_gt + c].iou;
            if (!taken[c] && iou >= gate && iou > best_iou) {
              best = c;
              best_iou = iou;
            }
          }
          bool tp = false;
          if (best < g.num_gt) {
            taken[best] = true;
            const Pair& p = g.pairs[r * g.num_gt + best];
            tp = spec.kind() == ThresholdSpec::Kind::kIou ||
                 (p.rot_deg <= spec.max_deg() && p.trans_cm <= spec.max_cm());
          }
          outcomes.emplace_back(g.dets[r], tp);
        }
      }
    }

    if (cat.num_ground_truth > 0) {
      std::sort(outcomes.begin(), outcomes.end(), [&](const auto& a, const auto& b) {
        const DetKey& ka = det_keys_[a.first];
        const DetKey& kb = det_keys_[b.first];
        if (ka.score != kb.score) return ka.score > kb.score;
        return ka.order < kb.order;
      });
      std::vector<bool> tp(outcomes.size());
      for (std::size_t k = 0; k < outcomes.size(); ++k) tp[k] = outcomes[k].second;
      cat.ap = all_point_ap(tp, cat.num_ground_truth, cat.pr);
      sum += *cat.ap;
      ++defined;
    }
    result.categories.push_back(std::move(cat));
  }
  if (defined > 0) result.mean_ap = sum / static_cast<double>(defined);
  return result;
}

ApResult compute_ap(const std::vector<Detection>& dets, const std::vector<GroundTruthInstance>& gts,
                    const ThresholdSpec& spec, int threads) {
  return EvaluationContext(dets, gts, threads).evaluate(spec);
}

EvaluationReport evaluate_report(const std::vector<Detection>& dets,
                                 const std::vector<GroundTruthInstance>& gts, int threads) {
  const EvaluationContext ctx(dets, gts, threads);
  EvaluationReport report;
  for (const ThresholdSpec& spec : standard_specs()) report.results.push_back(ctx.evaluate(spec));
  return report;
}

CurveSweep CurveSweep::standard() {
  CurveSweep s;
  for (int i = 0; i <= 100; ++i) s.iou.push_back(i / 100.0);
  for (int i = 0; i <= 60; ++i) s.deg.push_back(i);
  for (int i = 0; i <= 100; ++i) s.cm.push_back(i / 10.0);
  s.rotation_sweep_max_cm = std::numeric_limits<double>::infinity();
  return s;
}

CurveTable ap_curves(const std::vector<Detection>& dets, const std::vector<GroundTruthInstance>& gts,
                     const CurveSweep& sweep, int threads) {
  const EvaluationContext ctx(dets, gts, threads);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto append = [](std::vector<CurvePoint>& out, double threshold, const ApResult& r) {
    for (const CategoryAp& c : r.categories) out.push_back({c.category, threshold, c.ap});
    out.push_back({"mean", threshold, r.mean_ap});
  };
  // Thresholds of zero are legal in a sweep even though ThresholdSpec's
  // public factories reject them.
  CurveTable table;
  for (double t : sweep.iou) {
    if (t < 0.0 || t > 1.0) throw InvalidInput("IoU sweep values must lie in [0, 1]");
    append(table.iou, t, ctx.evaluate(ThresholdSpec(ThresholdSpec::Kind::kIou, t, 0.0, 0.0)));
  }
  for (double d : sweep.deg) {
    if (d < 0.0) throw InvalidInput("rotation sweep values must be nonnegative");
    append(table.rotation, d,
           ctx.evaluate(ThresholdSpec(ThresholdSpec::Kind::kPose, kPoseMatchIou, d, sweep.rotation_sweep_max_cm)));
  }
  for (double cm : sweep.cm) {
    if (cm < 0.0) throw InvalidInput("translation sweep values must be nonnegative");
    append(table.translation, cm, ctx.evaluate(ThresholdSpec(ThresholdSpec::Kind::kPose, kPoseMatchIou, kInf, cm)));
  }
  return table;
}

ReconstructionMetric reconstruction_metric(
    const std::map<std::string, std::vector<std::pair<PointCloud, PointCloud>>>& recons) {
  if (recons.empty()) throw InvalidInput("reconstruction_metric: no categories");
  ReconstructionMetric out;
  for (const auto& [category, pairs] : recons) {
    if (pairs.empty()) throw InvalidInput("reconstruction_metric: no instances for '" + category + "'");
    double sum = 0.0;
    for (const auto& [m, m_gt] : pairs) sum += chamfer_distance(m, m_gt, ChamferMode::kMean);
    out.per_category[category] = 1e3 * sum / static_cast<double>(pairs.size());
  }
  double total = 0.0;
  for (const auto& [category, v] : out.per_category) total += v;
  out.average = total / static_cast<double>(out.per_category.size());
  return out;
}

}  // namespace catpose
