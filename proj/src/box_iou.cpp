#include "catpose/box_iou.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "catpose/error.hpp"

namespace catpose {
namespace {

// Distances to a clipping plane within this band count as on the plane.
constexpr double kPlaneTolerance = 1e-12;

using Polygon = std::vector<Vec3>;  // counter-clockwise seen from outside
using Polyhedron = std::vector<Polygon>;

Polyhedron box_faces(const OrientedBox3D& box) {
  const auto c = box_corners(box);
  // Corner index = x | y << 1 | z << 2. Each face is wound so its normal
  // (right-hand rule) points outward.
  return {
      {c[0], c[4], c[6], c[2]},  // -x
      {c[1], c[3], c[7], c[5]},  // +x
      {c[0], c[1], c[5], c[4]},  // -y
      {c[2], c[6], c[7], c[3]},  // +y
      {c[0], c[2], c[3], c[1]},  // -z
      {c[4], c[5], c[7], c[6]},  // +z
  };
}

// Keeps the part of `poly` with normal·x <= offset.
Polyhedron clip(const Polyhedron& poly, const Vec3& normal, double offset) {
  bool any_out = false;
  bool any_in = false;
  for (const auto& face : poly) {
    for (const Vec3& v : face) {
      const double d = normal.dot(v) - offset;
      any_out |= d > kPlaneTolerance;
      any_in |= d < -kPlaneTolerance;
    }
  }
  if (!any_out) return poly;
  if (!any_in) return {};

  Polyhedron out;
  std::vector<Vec3> cap;
  for (const auto& face : poly) {
    Polygon kept;
    const std::size_t n = face.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = face[i];
      const Vec3& q = face[(i + 1) % n];
      const double dp = normal.dot(p) - offset;
      const double dq = normal.dot(q) - offset;
      const bool p_in = dp <= kPlaneTolerance;
      if (p_in) {
        kept.push_back(p);
        if (std::abs(dp) <= kPlaneTolerance) cap.push_back(p);
      }
      if ((dp < -kPlaneTolerance && dq > kPlaneTolerance) ||
          (dp > kPlaneTolerance && dq < -kPlaneTolerance)) {
        const Vec3 x = p + (dp / (dp - dq)) * (q - p);
        kept.push_back(x);
        cap.push_back(x);
      }
    }
    if (kept.size() >= 3) out.push_back(std::move(kept));
  }

  // Cap polygon on the clipping plane: dedupe, then order by angle.
  std::vector<Vec3> unique;
  for (const Vec3& p : cap) {
    const bool seen = std::any_of(unique.begin(), unique.end(),
                                  [&](const Vec3& u) { return (u - p).squaredNorm() < 1e-20; });
    if (!seen) unique.push_back(p);
  }
  if (unique.size() >= 3) {
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : unique) centroid += p;
    centroid /= static_cast<double>(unique.size());
    const Vec3 axis_u = (std::abs(normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY())
                            .cross(normal)
                            .normalized();
    const Vec3 axis_v = normal.cross(axis_u);  // (u, v, n) right-handed
    std::sort(unique.begin(), unique.end(), [&](const Vec3& a, const Vec3& b) {
      const Vec3 da = a - centroid;
      const Vec3 db = b - centroid;
      return std::atan2(da.dot(axis_v), da.dot(axis_u)) < std::atan2(db.dot(axis_v), db.dot(axis_u));
    });
    out.push_back(std::move(unique));
  }
  return out;
}

double volume(const Polyhedron& poly) {
  double v = 0.0;
  for (const auto& face : poly) {
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      v += face[0].dot(face[i].cross(face[i + 1]));
    }
  }
  return v / 6.0;
}

}  // namespace

std::array<Vec3, 8> box_corners(const OrientedBox3D& box) {
  std::array<Vec3, 8> c;
  for (int i = 0; i < 8; ++i) {
    const Vec3 sign((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5);
    c[i] = box.center + box.rotation * sign.cwiseProduct(box.extents);
  }
  return c;
}

double box_volume(const OrientedBox3D& box) { return box.extents.prod(); }

bool contains(const OrientedBox3D& box, const Vec3& p) {
  const Vec3 local = box.rotation.transpose() * (p - box.center);
  return (local.cwiseAbs().array() <= 0.5 * box.extents.array()).all();
}

double intersection_volume(const OrientedBox3D& a, const OrientedBox3D& b) {
  if (!(a.extents.array() > 0.0).all() || !(b.extents.array() > 0.0).all()) {
    throw InvalidInput("oriented box extents must be positive");
  }
  Polyhedron poly = box_faces(a);
  for (int axis = 0; axis < 3 && !poly.empty(); ++axis) {
    const Vec3 n = b.rotation.col(axis);
    const double half = 0.5 * b.extents[axis];
    const double c = n.dot(b.center);
    poly = clip(poly, n, c + half);
    if (poly.empty()) break;
    poly = clip(poly, -n, -(c - half));
  }
  return std::max(0.0, volume(poly));
}

double oriented_iou(const OrientedBox3D& a, const OrientedBox3D& b) {
  // Box volumes use the same face summation as the intersection, so
  // identical boxes give exactly 1.
  const double inter = intersection_volume(a, b);
  const double uni = volume(box_faces(a)) + volume(box_faces(b)) - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace catpose
