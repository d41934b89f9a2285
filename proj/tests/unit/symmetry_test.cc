#include "catpose/symmetry.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "catpose/error.hpp"
#include "catpose/geometry.hpp"
#include "test_util.hpp"

namespace catpose {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(YRotation, MatchesClosedForm) {
  EXPECT_EQ(y_rotation(0.0), Mat3::Identity());
  EXPECT_LT(testing::max_abs_diff(y_rotation(kPi), Vec3(-1, 1, -1).asDiagonal().toDenseMatrix()), 1e-15);
  const double t = 0.3;
  Mat3 expected;
  expected << std::cos(t), 0, -std::sin(t), 0, 1, 0, std::sin(t), 0, std::cos(t);
  EXPECT_EQ(y_rotation(t), expected);
}

TEST(YRotation, GroupClosure) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-10, 10);
    const double b = rng.uniform(-10, 10);
    EXPECT_LT(testing::max_abs_diff(y_rotation(a) * y_rotation(b), y_rotation(a + b)), 1e-12);
  }
}

TEST(MapRotation, Identity) {
  const MapResult m = map_rotation(Mat3::Identity());
  EXPECT_EQ(m.theta_hat, 0.0);
  EXPECT_FALSE(m.ambiguous);
  EXPECT_LT(testing::max_abs_diff(m.mapped_rotation, Mat3::Identity()), 1e-15);
}

TEST(MapRotation, PureYRotationMapsToIdentity) {
  for (int i = -1000; i <= 1000; ++i) {
    const double t = kPi * i / 1000.0;
    const MapResult m = map_rotation(y_rotation(t));
    EXPECT_LT(testing::max_abs_diff(m.mapped_rotation, Mat3::Identity()), 1e-12) << "theta " << t;
  }
}

TEST(MapRotation, ThetaFormulaAndRange) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 r = rng.rotation();
    const MapResult m = map_rotation(r);
    EXPECT_EQ(m.theta_hat, std::atan2(r(0, 2) - r(2, 0), r(0, 0) + r(2, 2)));
    EXPECT_GT(m.theta_hat, -kPi);
    EXPECT_LE(m.theta_hat, kPi);
    EXPECT_EQ(m.s_hat, y_rotation(m.theta_hat));
    EXPECT_LT(testing::max_abs_diff(m.mapped_rotation, r * m.s_hat), 1e-12);
    EXPECT_TRUE(is_rotation(m.mapped_rotation, 1e-9));
  }
}

// ‖RS − I‖²_F = 6 − 2·Trace(RS) for rotations, so minimizing the distance
// means maximizing the trace; the oracle scans θ directly.
TEST(MapRotation, GridOptimality) {
  Rng rng(3);
  constexpr int kGrid = 100000;
  for (int i = 0; i < 50; ++i) {
    const Mat3 r = rng.rotation();
    const MapResult m = map_rotation(r);
    const double got = (m.mapped_rotation - Mat3::Identity()).squaredNorm();
    EXPECT_NEAR(got, 6.0 - 2.0 * m.mapped_rotation.trace(), 1e-12);
    double best = 1e300;
    for (int k = 0; k < kGrid; ++k) {
      const double t = -kPi + 2.0 * kPi * k / kGrid;
      best = std::min(best, (r * y_rotation(t) - Mat3::Identity()).squaredNorm());
    }
    EXPECT_LE(got, best + 1e-12);
    EXPECT_LE(best - got, 1e-6);  // grid spacing 6.3e-5 rad
  }
}

TEST(MapRotation, RightInvariance) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = rng.rotation();
    const Mat3 mapped = map_rotation(r).mapped_rotation;
    for (int k = 0; k < 20; ++k) {
      const double t = rng.uniform(-kPi, kPi);
      EXPECT_LT(testing::max_abs_diff(map_rotation(r * y_rotation(t)).mapped_rotation, mapped), 1e-9);
    }
  }
}

TEST(MapRotation, AmbiguousFlip) {
  // 180 degrees about x: R13 - R31 = 0 and R11 + R33 = 0.
  const Mat3 flip = Vec3(1, -1, -1).asDiagonal();
  const MapResult m = map_rotation(flip);
  EXPECT_TRUE(m.ambiguous);
  EXPECT_EQ(m.theta_hat, 0.0);
  EXPECT_EQ(m.mapped_rotation, flip);
}

TEST(MapRotation, RejectsNonRotation) {
  Mat3 r = Mat3::Identity();
  r(0, 0) = 1.1;
  EXPECT_THROW(map_rotation(r), InvalidInput);
  EXPECT_THROW(map_rotation(Vec3(1, 1, -1).asDiagonal()), InvalidInput);
}

TEST(Canonicalize, AsymmetricUnchanged) {
  Rng rng(5);
  const PointCloud p = testing::random_cloud(rng, 20, 0.5);
  const PointCloud out = canonicalize_nocs_labels(p, rng.rotation(), SymmetryClass::kAsymmetric);
  EXPECT_EQ(out.points, p.points);
}

TEST(Canonicalize, YRotationUndone) {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(-kPi, kPi);
    const PointCloud p = testing::random_cloud(rng, 10, 0.5);
    const PointCloud out = canonicalize_nocs_labels(p, y_rotation(t), SymmetryClass::kYAxisContinuous);
    // Right-handed rotation by -t about +y, written out.
    Mat3 back;
    back << std::cos(-t), 0, std::sin(-t), 0, 1, 0, -std::sin(-t), 0, std::cos(-t);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_LT((out[k] - back * p[k]).norm(), 1e-12);
  }
}

TEST(Canonicalize, SecondApplicationIsIdentity) {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = rng.rotation() * y_rotation(rng.uniform(-kPi, kPi));
    const PointCloud p = testing::random_cloud(rng, 10, 0.5);
    const PointCloud once = canonicalize_nocs_labels(p, r, SymmetryClass::kYAxisContinuous);
    const PointCloud twice =
        canonicalize_nocs_labels(once, map_rotation(r).mapped_rotation, SymmetryClass::kYAxisContinuous);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_LT((twice[k] - once[k]).norm(), 1e-12);
  }
}

TEST(SymmetryClassFor, Table) {
  EXPECT_EQ(symmetry_class_for("bottle"), SymmetryClass::kYAxisContinuous);
  EXPECT_EQ(symmetry_class_for("bowl"), SymmetryClass::kYAxisContinuous);
  EXPECT_EQ(symmetry_class_for("can"), SymmetryClass::kYAxisContinuous);
  EXPECT_EQ(symmetry_class_for("laptop"), SymmetryClass::kAsymmetric);
  EXPECT_EQ(symmetry_class_for("camera"), SymmetryClass::kAsymmetric);
  EXPECT_EQ(symmetry_class_for("mug", false), SymmetryClass::kYAxisContinuous);
  EXPECT_EQ(symmetry_class_for("mug", true), SymmetryClass::kAsymmetric);
}

TEST(SymmetryClassFor, Errors) {
  EXPECT_THROW(symmetry_class_for("teapot"), InvalidInput);
  EXPECT_THROW(symmetry_class_for("mug"), InvalidInput);
  EXPECT_THROW(symmetry_class_for("bottle", true), InvalidInput);
}

TEST(SymmetryClassFor, DisplayTableCoversCategories) {
  const auto& table = category_symmetry_table();
  for (std::size_t i = 0; i < kCategories.size(); ++i) EXPECT_EQ(table[i].category, kCategories[i]);
  EXPECT_EQ(to_string(SymmetryClass::kAsymmetric), "asymmetric");
  EXPECT_EQ(to_string(SymmetryClass::kYAxisContinuous), "y_axis_continuous");
}

}  // namespace
}  // namespace catpose
