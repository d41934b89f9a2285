#include "catpose/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "catpose/error.hpp"
#include "test_util.hpp"

namespace catpose {
namespace {

using testing::random_cloud;
using testing::random_transform;

PointCloud cube_corners(double half) {
  PointCloud c;
  for (int i = 0; i < 8; ++i) {
    c.points.emplace_back(i & 1 ? half : -half, i & 2 ? half : -half, i & 4 ? half : -half);
  }
  return c;
}

TEST(TransformPoints, Identity) {
  Rng rng(1);
  const PointCloud c = random_cloud(rng, 20);
  const PointCloud out = transform_points(SimilarityTransform::identity(), c);
  ASSERT_EQ(out.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(out[i], c[i]);
}

TEST(TransformPoints, PureScaling) {
  SimilarityTransform t;
  t.scale = 2.0;
  PointCloud c;
  c.points.emplace_back(1, 0, 0);
  const PointCloud out = transform_points(t, c);
  EXPECT_EQ(out[0], Vec3(2, 0, 0));
}

TEST(TransformPoints, InverseRoundTrip) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const SimilarityTransform t = random_transform(rng);
    const PointCloud c = random_cloud(rng, 30);
    const PointCloud back = transform_points(invert(t), transform_points(t, c));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT((back[i] - c[i]).norm(), 1e-9);
  }
}

TEST(TransformPoints, ScalesPairwiseDistances) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const SimilarityTransform t = random_transform(rng);
    const PointCloud c = random_cloud(rng, 10);
    const PointCloud out = transform_points(t, c);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        EXPECT_NEAR((out[i] - out[j]).norm(), t.scale * (c[i] - c[j]).norm(), 1e-9);
      }
    }
  }
}

TEST(TransformPoints, PreservesOrderAndFrame) {
  Rng rng(4);
  PointCloud c = random_cloud(rng, 5);
  c.frame = Frame::kNocs;
  SimilarityTransform t;
  t.translation = Vec3(1, 2, 3);
  const PointCloud out = transform_points(t, c);
  EXPECT_EQ(out.frame, Frame::kNocs);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(out[i], c[i] + Vec3(1, 2, 3));
}

TEST(TransformPoints, RejectsInvalidTransform) {
  SimilarityTransform t;
  t.scale = 0.0;
  EXPECT_THROW(transform_points(t, PointCloud{{Vec3::Zero()}}), InvalidInput);
  t.scale = 1.0;
  t.rotation = Vec3(1, 1, -1).asDiagonal();
  EXPECT_THROW(transform_points(t, PointCloud{{Vec3::Zero()}}), InvalidInput);
}

TEST(Compose, WithInverseIsIdentity) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SimilarityTransform t = random_transform(rng);
    const SimilarityTransform id = compose(t, invert(t));
    EXPECT_NEAR(id.scale, 1.0, 1e-12);
    EXPECT_LT(testing::max_abs_diff(id.rotation, Mat3::Identity()), 1e-12);
    EXPECT_LT(id.translation.norm(), 1e-9);
  }
}

TEST(Compose, IdentityIsNeutral) {
  Rng rng(6);
  const SimilarityTransform t = random_transform(rng);
  const SimilarityTransform c = compose(SimilarityTransform::identity(), t);
  EXPECT_EQ(c.scale, t.scale);
  EXPECT_EQ(c.rotation, t.rotation);
  EXPECT_EQ(c.translation, t.translation);
}

TEST(Compose, MatchesSequentialApplication) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const SimilarityTransform t1 = random_transform(rng);
    const SimilarityTransform t2 = random_transform(rng);
    const PointCloud c = random_cloud(rng, 20);
    const PointCloud a = transform_points(compose(t1, t2), c);
    const PointCloud b = transform_points(t1, transform_points(t2, c));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT((a[i] - b[i]).norm(), 1e-9);
  }
}

TEST(Chamfer, IdenticalCloudsAreZero) {
  Rng rng(8);
  const PointCloud c = random_cloud(rng, 40);
  EXPECT_EQ(chamfer_distance(c, c, ChamferMode::kSum), 0.0);
  EXPECT_EQ(chamfer_distance(c, c, ChamferMode::kMean), 0.0);
}

TEST(Chamfer, SinglePoints) {
  const double d = 0.3;
  const PointCloud x{{Vec3::Zero()}};
  const PointCloud y{{Vec3(0, 0, d)}};
  EXPECT_NEAR(chamfer_distance(x, y, ChamferMode::kSum), 2 * d * d, 1e-15);
  EXPECT_NEAR(chamfer_distance(x, y, ChamferMode::kMean), 2 * d * d, 1e-15);
}

TEST(Chamfer, MatchesBruteForce) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const PointCloud x = random_cloud(rng, 1 + rng.index(50));
    const PointCloud y = random_cloud(rng, 1 + rng.index(50));
    const double xy = testing::brute_directed(x, y);
    const double yx = testing::brute_directed(y, x);
    EXPECT_NEAR(chamfer_distance(x, y, ChamferMode::kSum), xy + yx, 1e-12);
    EXPECT_NEAR(chamfer_distance(x, y, ChamferMode::kMean),
                xy / static_cast<double>(x.size()) + yx / static_cast<double>(y.size()), 1e-12);
  }
}

TEST(Chamfer, LargeCloudsMatchBruteForce) {
  // Above the brute-force limit the k-d tree path is taken.
  Rng rng(10);
  const PointCloud x = random_cloud(rng, 3000);
  const PointCloud y = random_cloud(rng, 2500);
  const double expected = testing::brute_directed(x, y) + testing::brute_directed(y, x);
  EXPECT_NEAR(chamfer_distance(x, y), expected, 1e-9 * expected);
}

TEST(Chamfer, SymmetricAndQuadraticInScale) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud x = random_cloud(rng, 30);
    const PointCloud y = random_cloud(rng, 25);
    const double k = rng.uniform(0.1, 5.0);
    SimilarityTransform t;
    t.scale = k;
    for (ChamferMode mode : {ChamferMode::kSum, ChamferMode::kMean}) {
      const double d = chamfer_distance(x, y, mode);
      EXPECT_NEAR(d, chamfer_distance(y, x, mode), 1e-12);
      EXPECT_NEAR(chamfer_distance(transform_points(t, x), transform_points(t, y), mode), k * k * d,
                  1e-10 * k * k * d);
    }
  }
}

TEST(Chamfer, EmptyCloudThrows) {
  const PointCloud empty;
  const PointCloud one{{Vec3::Zero()}};
  EXPECT_THROW(chamfer_distance(empty, one), InvalidInput);
  EXPECT_THROW(chamfer_distance(one, empty), InvalidInput);
}

TEST(NocsNormalize, CubeCorners) {
  const NormalizedCloud n = nocs_normalize(cube_corners(0.5));
  EXPECT_NEAR(n.transform.scale, 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(bbox_diameter(n.cloud), 1.0, 1e-15);
  EXPECT_EQ(n.cloud.frame, Frame::kNocs);
}

TEST(NocsNormalize, AlreadyNormalized) {
  const PointCloud c = cube_corners(0.5 / std::sqrt(3.0));
  const NormalizedCloud n = nocs_normalize(c);
  EXPECT_NEAR(n.transform.scale, 1.0, 1e-12);
  EXPECT_LT(n.transform.translation.norm(), 1e-12);
}

TEST(NocsNormalize, UnitDiagonalCenteredAndIdempotent) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    PointCloud c = random_cloud(rng, 5 + rng.index(100), rng.uniform(0.01, 20));
    for (Vec3& p : c.points) p += Vec3(3, -7, 11);
    const NormalizedCloud n = nocs_normalize(c);
    EXPECT_NEAR(bbox_diameter(n.cloud), 1.0, 1e-9);
    EXPECT_LT(compute_aabb(n.cloud).center().norm(), 1e-9);
    const PointCloud mapped = transform_points(n.transform, c);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT((mapped[i] - n.cloud[i]).norm(), 1e-12);
    const NormalizedCloud again = nocs_normalize(n.cloud);
    EXPECT_NEAR(again.transform.scale, 1.0, 1e-9);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT((again.cloud[i] - n.cloud[i]).norm(), 1e-9);
  }
}

TEST(NocsNormalize, DegenerateThrows) {
  const PointCloud c{{Vec3(1, 2, 3), Vec3(1, 2, 3)}};
  EXPECT_THROW(nocs_normalize(c), DegenerateConfiguration);
  EXPECT_THROW(nocs_normalize(PointCloud{}), InvalidInput);
}

std::map<std::tuple<double, double, double>, int> multiset(const PointCloud& c) {
  std::map<std::tuple<double, double, double>, int> m;
  for (const Vec3& p : c.points) ++m[{p.x(), p.y(), p.z()}];
  return m;
}

TEST(Resample, SameSizeIsPermutation) {
  Rng rng(13);
  const PointCloud c = random_cloud(rng, 64);
  const PointCloud out = resample(c, 64, 99);
  EXPECT_EQ(multiset(out), multiset(c));
}

TEST(Resample, RepetitionFromSmallCloud) {
  const PointCloud c{{Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}};
  const PointCloud out = resample(c, 1024, 5);
  ASSERT_EQ(out.size(), 1024u);
  std::map<std::tuple<double, double, double>, int> seen = multiset(out);
  EXPECT_EQ(seen.size(), 3u);
  for (const auto& [key, count] : seen) EXPECT_TRUE(multiset(c).count(key));
}

TEST(Resample, DownsampleWithoutReplacement) {
  Rng rng(14);
  const PointCloud c = random_cloud(rng, 3000);
  const PointCloud out = resample(c, 1024, 7);
  ASSERT_EQ(out.size(), 1024u);
  const auto in = multiset(c);
  const auto got = multiset(out);
  EXPECT_EQ(got.size(), 1024u);  // distinct inputs, so no index was drawn twice
  for (const auto& [key, count] : got) {
    ASSERT_TRUE(in.count(key));
    EXPECT_LE(count, in.at(key));
  }
}

TEST(Resample, DeterministicPerSeed) {
  Rng rng(15);
  const PointCloud c = random_cloud(rng, 500);
  for (std::size_t n : {100u, 500u, 2000u}) {
    const PointCloud a = resample(c, n, 42);
    const PointCloud b = resample(c, n, 42);
    ASSERT_EQ(a.size(), n);
    EXPECT_EQ(a.points, b.points);
    EXPECT_NE(resample(c, n, 43).points, a.points);
  }
}

TEST(Resample, Errors) {
  EXPECT_THROW(resample(PointCloud{{Vec3::Zero()}}, 0, 1), InvalidInput);
  EXPECT_THROW(resample(PointCloud{}, 4, 1), InvalidInput);
}

TEST(BboxDiameter, Basics) {
  EXPECT_EQ(bbox_diameter(PointCloud{{Vec3(4, 5, 6)}}), 0.0);
  EXPECT_NEAR(bbox_diameter(cube_corners(0.5)), std::sqrt(3.0), 1e-15);
}

TEST(BboxDiameter, MatchesScanOracle) {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud c = random_cloud(rng, 1 + rng.index(200), rng.uniform(0.1, 10));
    double lo[3] = {1e300, 1e300, 1e300};
    double hi[3] = {-1e300, -1e300, -1e300};
    for (const Vec3& p : c.points) {
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
    const double d = std::sqrt((hi[0] - lo[0]) * (hi[0] - lo[0]) + (hi[1] - lo[1]) * (hi[1] - lo[1]) +
                               (hi[2] - lo[2]) * (hi[2] - lo[2]));
    EXPECT_NEAR(bbox_diameter(c), d, 1e-12);
  }
}

TEST(Rotation, ValidityTolerance) {
  EXPECT_TRUE(is_rotation(Mat3::Identity()));
  Mat3 r = Mat3::Identity();
  r(0, 1) = 5e-7;
  EXPECT_TRUE(is_rotation(r));
  r(0, 1) = 1e-4;
  EXPECT_FALSE(is_rotation(r));
  EXPECT_FALSE(is_rotation(Vec3(-1, 1, 1).asDiagonal()));
}

TEST(Rotation, AxisAngleAndGeodesic) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 axis = rng.unit_vector();
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const Mat3 r = axis_angle(axis, angle);
    EXPECT_LT(testing::max_abs_diff(r, testing::rodrigues(axis, angle)), 1e-12);
    const Mat3 base = rng.rotation();
    EXPECT_NEAR(rotation_angle(base * r, base), angle, 1e-7);
  }
}

}  // namespace
}  // namespace catpose
