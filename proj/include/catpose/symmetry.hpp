#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "catpose/types.hpp"

namespace catpose {

enum class SymmetryClass {
  kAsymmetric,
  kYAxisContinuous,  // appearance invariant under any rotation about NOCS y
};

std::string_view to_string(SymmetryClass s);

// The six benchmark categories, in report order.
inline constexpr std::array<std::string_view, 6> kCategories = {"bottle", "bowl",   "camera",
                                                                 "can",    "laptop", "mug"};

bool is_known_category(std::string_view category);

struct CategorySymmetryRule {
  std::string_view category;
  std::string_view rule;
};

// Compiled-in category table, for display.
const std::array<CategorySymmetryRule, 6>& category_symmetry_table();

// bottle, bowl, can: y-symmetric. camera, laptop: asymmetric. mug: y-symmetric
// only when the handle is not visible; the flag is required for mug and
// rejected for everything else.
SymmetryClass symmetry_class_for(std::string_view category,
                                 std::optional<bool> handle_visible = std::nullopt);

// [[cos, 0, -sin], [0, 1, 0], [sin, 0, cos]]
Mat3 y_rotation(double theta);

struct MapResult {
  Mat3 mapped_rotation;  // rotation * s_hat
  Mat3 s_hat;            // y_rotation(theta_hat)
  double theta_hat = 0.0;
  // Set when R13 - R31 and R11 + R33 both vanish; theta_hat is then 0.
  bool ambiguous = false;
};

// Canonical representative of R under right-multiplication by y-rotations:
// theta_hat = atan2(R13 - R31, R11 + R33) minimizes ‖R·S − I‖_F.
// Throws InvalidInput if `rotation` is not a rotation matrix.
MapResult map_rotation(const Mat3& rotation);

// Applies s_hatᵀ to every point for y-symmetric classes; identity otherwise.
PointCloud canonicalize_nocs_labels(const PointCloud& nocs_gt, const Mat3& rotation_gt,
                                    SymmetryClass sym);

}  // namespace catpose
