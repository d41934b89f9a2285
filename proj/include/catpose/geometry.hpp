#pragma once

#include <cstddef>
#include <cstdint>

#include "catpose/types.hpp"

namespace catpose {

// Tolerance used when checking RᵀR = I and det(R) = +1.
inline constexpr double kRotationTolerance = 1e-6;

bool is_rotation(const Mat3& r, double tol = kRotationTolerance);

// Throws InvalidInput unless scale > 0 (and finite) and rotation is a rotation.
void validate(const SimilarityTransform& t);

// Projects an almost-orthonormal matrix onto SO(3) (nearest in Frobenius norm).
Mat3 orthonormalize(const Mat3& r);

inline Vec3 apply(const SimilarityTransform& t, const Vec3& p) {
  return t.scale * (t.rotation * p) + t.translation;
}

PointCloud transform_points(const SimilarityTransform& t, const PointCloud& cloud);

// compose(a, b) applies b first, then a.
SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b);
SimilarityTransform invert(const SimilarityTransform& t);

// Geodesic angle between two rotations, radians.
double rotation_angle(const Mat3& a, const Mat3& b);

// Rodrigues rotation about a unit axis.
Mat3 axis_angle(const Vec3& axis, double radians);

enum class ChamferMode {
  kSum,   // two directed sums of squared nearest-neighbour distances
  kMean,  // each directed sum divided by its own cloud size
};

double chamfer_distance(const PointCloud& x, const PointCloud& y,
                        ChamferMode mode = ChamferMode::kSum);

Aabb compute_aabb(const PointCloud& cloud);

// Length of the axis-aligned bounding-box diagonal. Throws on empty input.
double bbox_diameter(const PointCloud& cloud);

struct NormalizedCloud {
  PointCloud cloud;
  SimilarityTransform transform;  // maps the input onto `cloud`
};

// Centers the cloud on its bounding-box center and scales it uniformly so
// the bounding-box diagonal is 1. Output frame is kNocs.
NormalizedCloud nocs_normalize(const PointCloud& model);

// Exactly n points. With |cloud| < n points are drawn with replacement;
// otherwise n distinct points are drawn uniformly (a permutation when
// |cloud| == n).
PointCloud resample(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

}  // namespace catpose
