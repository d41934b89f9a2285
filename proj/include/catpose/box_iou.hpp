#pragma once

#include <array>
#include <vector>

#include "catpose/types.hpp"

namespace catpose {

// Eight corners, index bits (x, y, z) choosing -/+ half extent.
std::array<Vec3, 8> box_corners(const OrientedBox3D& box);

double box_volume(const OrientedBox3D& box);

// Volume of the intersection of two oriented boxes, computed exactly by
// clipping one box's polyhedron against the six half-spaces of the other.
double intersection_volume(const OrientedBox3D& a, const OrientedBox3D& b);

// Intersection over union in [0, 1]; 0 for disjoint boxes.
double oriented_iou(const OrientedBox3D& a, const OrientedBox3D& b);

// Point-in-box test (closed box).
bool contains(const OrientedBox3D& box, const Vec3& p);

}  // namespace catpose
