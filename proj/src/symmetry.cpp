#include "catpose/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "catpose/error.hpp"
#include "catpose/geometry.hpp"

namespace catpose {
namespace {

constexpr double kAmbiguityTolerance = 1e-12;

constexpr std::array<CategorySymmetryRule, 6> kTable = {{
    {"bottle", "y_axis_continuous"},
    {"bowl", "y_axis_continuous"},
    {"camera", "asymmetric"},
    {"can", "y_axis_continuous"},
    {"laptop", "asymmetric"},
    {"mug", "y_axis_continuous if handle not visible, else asymmetric"},
}};

}  // namespace

std::string_view to_string(SymmetryClass s) {
  return s == SymmetryClass::kAsymmetric ? "asymmetric" : "y_axis_continuous";
}

bool is_known_category(std::string_view category) {
  return std::find(kCategories.begin(), kCategories.end(), category) != kCategories.end();
}

const std::array<CategorySymmetryRule, 6>& category_symmetry_table() { return kTable; }

SymmetryClass symmetry_class_for(std::string_view category, std::optional<bool> handle_visible) {
  if (!is_known_category(category)) {
    throw InvalidInput("unknown category '" + std::string(category) + "'");
  }
  if (category == "mug") {
    if (!handle_visible) throw InvalidInput("mug requires the handle_visible flag");
    return *handle_visible ? SymmetryClass::kAsymmetric : SymmetryClass::kYAxisContinuous;
  }
  if (handle_visible) {
    throw InvalidInput("handle_visible is only meaningful for mug, got it for '" +
                       std::string(category) + "'");
  }
  if (category == "camera" || category == "laptop") return SymmetryClass::kAsymmetric;
  return SymmetryClass::kYAxisContinuous;
}

Mat3 y_rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 r;
  r << c, 0.0, -s,
       0.0, 1.0, 0.0,
       s, 0.0, c;
  return r;
}

MapResult map_rotation(const Mat3& rotation) {
  if (!is_rotation(rotation)) throw InvalidInput("map_rotation: input is not a rotation matrix");
  const double num = rotation(0, 2) - rotation(2, 0);
  const double den = rotation(0, 0) + rotation(2, 2);

  MapResult out;
  if (std::abs(num) <= kAmbiguityTolerance && std::abs(den) <= kAmbiguityTolerance) {
    out.ambiguous = true;
    out.theta_hat = 0.0;
  } else {
    out.theta_hat = std::atan2(num, den);
    if (out.theta_hat <= -std::numbers::pi) out.theta_hat = std::numbers::pi;
  }
  out.s_hat = y_rotation(out.theta_hat);
  out.mapped_rotation = rotation * out.s_hat;
  return out;
}

PointCloud canonicalize_nocs_labels(const PointCloud& nocs_gt, const Mat3& rotation_gt,
                                    SymmetryClass sym) {
  if (sym == SymmetryClass::kAsymmetric) return nocs_gt;
  const Mat3 st = map_rotation(rotation_gt).s_hat.transpose();
  PointCloud out;
  out.frame = nocs_gt.frame;
  out.points.reserve(nocs_gt.size());
  for (const Vec3& p : nocs_gt.points) out.points.push_back(st * p);
  return out;
}

}  // namespace catpose
