#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace catpose {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Frame { kCamera, kNocs };

// Ordered point set. Row i of a correspondence matrix refers to point i, so
// the ordering is part of the value.
struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::kCamera;

  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> pts, Frame f = Frame::kCamera)
      : points(std::move(pts)), frame(f) {}

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Vec3& operator[](std::size_t i) const { return points[i]; }
  Vec3& operator[](std::size_t i) { return points[i]; }
};

// x -> scale * rotation * x + translation
struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static SimilarityTransform identity() { return {}; }
};

// Amodal box; extents are full side lengths along the box axes (the columns
// of `rotation`).
struct OrientedBox3D {
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  Vec3 extents = Vec3::Ones();
};

struct CameraIntrinsics {
  double fx = 577.5;
  double fy = 577.5;
  double cx = 319.5;
  double cy = 239.5;
};

struct Aabb {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extents() const { return max - min; }
  double diagonal() const { return (max - min).norm(); }
};

}  // namespace catpose
