#include "catpose/io.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "catpose/error.hpp"
#include "test_util.hpp"

namespace catpose {
namespace {

using io::Json;

PointCloud parse_ply(const std::string& text) {
  std::istringstream in(text);
  return io::read_ply(in, "t.ply");
}

// Returns the line number carried by the ParseError, or -1 if none was thrown.
long ply_error_line(const std::string& text) {
  try {
    parse_ply(text);
  } catch (const ParseError& e) {
    return static_cast<long>(e.line());
  }
  return -1;
}

const char* kHeader = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n";

TEST(Ply, RoundTripIsBitExact) {
  Rng rng(3);
  PointCloud c = testing::random_cloud(rng, 500, 1e3);
  c.points.emplace_back(1e-300, -0.0, 5e-324);
  c.points.emplace_back(0.1, 1.0 / 3.0, -2.0 / 7.0);
  std::stringstream ss;
  io::write_ply(ss, c);
  const PointCloud back = io::read_ply(ss);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(back[i], c[i]) << i;
}

TEST(Ply, RoundTripThroughFile) {
  testing::TempDir dir("ply");
  Rng rng(4);
  const PointCloud c = testing::random_cloud(rng, 64);
  io::write_ply(dir / "c.ply", c);
  const PointCloud back = io::read_ply(dir / "c.ply");
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(back[i], c[i]);
}

TEST(Ply, ReadsExtraPropertiesCommentsAndCrlf) {
  const std::string text =
      "ply\r\nformat ascii 1.0\r\ncomment made by hand\r\nelement vertex 2\r\nproperty float nx\r\n"
      "property double z\r\nproperty double x\r\nproperty uchar red\r\nproperty double y\r\n"
      "element face 1\r\nproperty list uchar int vertex_indices\r\nend_header\r\n"
      "9 3 1 255 2\r\n\t+8 -6  -4 0 -5e-1\r\n3 0 1 1\r\n";
  const PointCloud c = parse_ply(text);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], Vec3(1, 2, 3));
  EXPECT_EQ(c[1], Vec3(-4, -0.5, -6));
}

TEST(Ply, EmptyVertexElement) {
  const PointCloud c = parse_ply("ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\nproperty float y\n"
                                 "property float z\nend_header\n");
  EXPECT_TRUE(c.empty());
}

TEST(Ply, ErrorsCarryLineNumbers) {
  EXPECT_EQ(ply_error_line("plyx\n"), 1);
  EXPECT_EQ(ply_error_line(""), 1);
  EXPECT_EQ(ply_error_line("ply\nformat binary_little_endian 1.0\n"), 2);
  EXPECT_EQ(ply_error_line("ply\nformat ascii 1.0\nelement vertex 2\nproperty int x\n"), 4);
  EXPECT_EQ(ply_error_line("ply\nformat ascii 1.0\nelement vertex 2\nproperty list uchar float x\n"), 4);
  EXPECT_EQ(ply_error_line("ply\nformat ascii 1.0\nfoo bar\n"), 3);
  EXPECT_EQ(ply_error_line("ply\nformat ascii 1.0\nelement vertex 1\n"), 3);
  EXPECT_EQ(ply_error_line(std::string(kHeader) + "1 2 3\n4 5\n"), 9);
  EXPECT_EQ(ply_error_line(std::string(kHeader) + "1 2 3\n4 5 abc\n"), 9);
  EXPECT_EQ(ply_error_line(std::string(kHeader) + "1 2 3x\n4 5 6\n"), 8);
  EXPECT_EQ(ply_error_line(std::string(kHeader) + "1 2 3 4\n4 5 6\n"), 8);
  EXPECT_EQ(ply_error_line(std::string(kHeader) + "1 2 3\n"), 9);
  EXPECT_EQ(ply_error_line(std::string(kHeader) + "1 2 3\nnan 0 0\n"), 9);
  EXPECT_EQ(ply_error_line(std::string(kHeader) + "1 2 inf\n0 0 0\n"), 8);
}

TEST(Ply, HeaderWithoutFormatOrCoordinates) {
  EXPECT_THROW(parse_ply("ply\nelement vertex 0\nproperty float x\nproperty float y\nproperty float z\nend_header\n"),
               ParseError);
  EXPECT_THROW(parse_ply("ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\nproperty float y\nend_header\n"),
               ParseError);
  EXPECT_THROW(parse_ply("ply\nformat ascii 1.0\nend_header\n"), ParseError);
}

TEST(Ply, MessageNamesSourceAndLine) {
  try {
    parse_ply(std::string(kHeader) + "1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()), "t.ply:8: expected 3 numbers");
  }
}

TEST(Ply, MissingFileIsInvalidInput) {
  EXPECT_THROW(io::read_ply(std::filesystem::path("/nonexistent/catpose.ply")), InvalidInput);
}

TEST(TransformJson, RoundTripIsExact) {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const SimilarityTransform t = testing::random_transform(rng);
    const SimilarityTransform back = io::transform_from_json(Json::parse(io::transform_to_json(t).dump()));
    EXPECT_EQ(back.scale, t.scale);
    EXPECT_EQ(back.rotation, t.rotation);
    EXPECT_EQ(back.translation, t.translation);
  }
}

TEST(TransformJson, AcceptsNestedRotation) {
  const Json j = Json::parse(R"({"scale": 2, "rotation": [[0,-1,0],[1,0,0],[0,0,1]], "translation": [1,2,3]})");
  const SimilarityTransform t = io::transform_from_json(j);
  Mat3 r;
  r << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_EQ(t.rotation, r);
  EXPECT_EQ(t.scale, 2.0);
  EXPECT_EQ(t.translation, Vec3(1, 2, 3));
}

TEST(TransformJson, RejectsBadFields) {
  const auto bad = [](const char* text) { return io::transform_from_json(Json::parse(text), "pose"); };
  EXPECT_THROW(bad(R"({"scale": 0, "rotation": [1,0,0,0,1,0,0,0,1], "translation": [0,0,0]})"), ParseError);
  EXPECT_THROW(bad(R"({"scale": -1, "rotation": [1,0,0,0,1,0,0,0,1], "translation": [0,0,0]})"), ParseError);
  EXPECT_THROW(bad(R"({"scale": 1, "rotation": [1,0,0,0,1,0,0,0,-1], "translation": [0,0,0]})"), ParseError);
  EXPECT_THROW(bad(R"({"scale": 1, "rotation": [2,0,0,0,1,0,0,0,1], "translation": [0,0,0]})"), ParseError);
  EXPECT_THROW(bad(R"({"scale": 1, "rotation": [1,0,0,0,1,0,0,0], "translation": [0,0,0]})"), ParseError);
  EXPECT_THROW(bad(R"({"scale": 1, "rotation": [1,0,0,0,1,0,0,0,1], "translation": [0,0]})"), ParseError);
  EXPECT_THROW(bad(R"({"scale": "1", "rotation": [1,0,0,0,1,0,0,0,1], "translation": [0,0,0]})"), ParseError);
  EXPECT_THROW(bad(R"({"rotation": [1,0,0,0,1,0,0,0,1], "translation": [0,0,0]})"), ParseError);
  EXPECT_THROW(bad(R"([1, 2])"), ParseError);
  try {
    bad(R"({"scale": 1, "rotation": [1,0,0,0,1,0,0,0,-1], "translation": [0,0,0]})");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("pose.rotation"), std::string::npos) << e.what();
  }
}

TEST(CorrespondenceJson, RoundTripAndSizeMismatch) {
  Rng rng(6);
  CorrespondenceSet c;
  c.src = testing::random_cloud(rng, 10);
  c.dst = testing::random_cloud(rng, 10);
  const CorrespondenceSet back = io::correspondences_from_json(Json::parse(io::correspondences_to_json(c).dump()));
  ASSERT_EQ(back.src.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(back.src[i], c.src[i]);
    EXPECT_EQ(back.dst[i], c.dst[i]);
  }
  EXPECT_EQ(back.src.frame, Frame::kNocs);
  EXPECT_EQ(back.dst.frame, Frame::kCamera);

  EXPECT_THROW(io::correspondences_from_json(Json::parse(R"({"src": [[0,0,0]], "dst": []})")), ParseError);
  EXPECT_THROW(io::correspondences_from_json(Json::parse(R"({"src": [[0,0]], "dst": [[0,0,0]]})")), ParseError);
  EXPECT_THROW(io::correspondences_from_json(Json::parse(R"({"src": [[0,0,0]]})")), ParseError);
}

TEST(MatrixJson, RoundTripAndValidation) {
  Eigen::MatrixXd a(2, 3);
  a << 0.1, 0.2, 0.7, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  const Eigen::MatrixXd back = io::matrix_from_json(Json::parse(io::matrix_to_json(a).dump()));
  EXPECT_EQ(back, a);
  EXPECT_THROW(io::matrix_from_json(Json::parse(R"({"nv": 2, "nc": 2, "data": [1,2,3]})")), ParseError);
  EXPECT_THROW(io::matrix_from_json(Json::parse(R"({"nv": 0, "nc": 2, "data": []})")), ParseError);
  EXPECT_THROW(io::matrix_from_json(Json::parse(R"({"nv": -1, "nc": 2, "data": []})")), ParseError);
  EXPECT_THROW(io::matrix_from_json(Json::parse(R"({"nv": 1.5, "nc": 2, "data": [1,2]})")), ParseError);
}

TEST(DeformationJson, RoundTripAndValidation) {
  const DeformationField d{Vec3(0.1, -0.2, 0.3), Vec3(1e-9, 0, -1)};
  const DeformationField back = io::deformation_from_json(Json::parse(io::deformation_to_json(d).dump()));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], d[0]);
  EXPECT_EQ(back[1], d[1]);
  EXPECT_THROW(io::deformation_from_json(Json::parse(R"({"nc": 2, "data": [1,2,3]})")), ParseError);
}

TEST(Pgm, DepthRoundTrip) {
  testing::TempDir dir("pgm");
  DepthImage d(7, 5);
  for (std::size_t i = 0; i < d.mm.size(); ++i) d.mm[i] = static_cast<std::uint16_t>(i * 1871 % 65536);
  d.at(6, 4) = 65535;
  io::write_depth_pgm(dir / "d.pgm", d);
  const DepthImage back = io::read_depth_pgm(dir / "d.pgm");
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.height, 5);
  EXPECT_EQ(back.mm, d.mm);
}

TEST(Pgm, DepthIsBigEndian) {
  testing::TempDir dir("pgm");
  DepthImage d(1, 1);
  d.mm[0] = 0x1234;
  io::write_depth_pgm(dir / "d.pgm", d);
  const std::string bytes = io::read_text(dir / "d.pgm");
  EXPECT_EQ(bytes, std::string("P5\n1 1\n65535\n\x12\x34", 15));
}

TEST(Pgm, MaskRoundTripAndErrors) {
  testing::TempDir dir("pgm");
  InstanceMask m(4, 3);
  m.set(0, 0, true);
  m.set(3, 2, true);
  m.set(1, 1, true);
  io::write_mask_pgm(dir / "m.pgm", m);
  const InstanceMask back = io::read_mask_pgm(dir / "m.pgm");
  EXPECT_EQ(back.width, 4);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.on, m.on);

  // Mask files are not depth files and vice versa.
  EXPECT_THROW(io::read_depth_pgm(dir / "m.pgm"), ParseError);
  DepthImage d(2, 2);
  io::write_depth_pgm(dir / "d.pgm", d);
  EXPECT_THROW(io::read_mask_pgm(dir / "d.pgm"), ParseError);

  io::write_text(dir / "short.pgm", "P5\n4 4\n255\nabc");
  EXPECT_THROW(io::read_mask_pgm(dir / "short.pgm"), ParseError);
  io::write_text(dir / "p2.pgm", "P2\n1 1\n255\n0\n");
  EXPECT_THROW(io::read_mask_pgm(dir / "p2.pgm"), ParseError);
  io::write_text(dir / "comment.pgm", std::string("P5\n# c\n2 1\n255\n\xff\x00", 17));
  const InstanceMask c = io::read_mask_pgm(dir / "comment.pgm");
  EXPECT_TRUE(c.at(0, 0));
  EXPECT_FALSE(c.at(1, 0));
}

Json split_with(const Json& instance) {
  Json ok = {{"category", "can"},   {"scale", 0.2},          {"rotation", {1, 0, 0, 0, 1, 0, 0, 0, 1}},
             {"translation", {0, 0, 1}}, {"extents", {0.5, 1, 0.5}}};
  Json images = Json::array();
  images.push_back({{"id", "img0"}, {"instances", Json::array({ok})}});
  images.push_back({{"id", 7}, {"instances", Json::array({ok, instance})}});
  return {{"images", images}};
}

std::string split_error(const Json& instance) {
  try {
    io::detections_from_json(split_with(instance), "pred.json");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(SplitJson, RoundTripGroundTruthAndDetections) {
  Rng rng(7);
  std::vector<GroundTruthInstance> gts;
  std::vector<Detection> dets;
  for (int i = 0; i < 12; ++i) {
    GroundTruthInstance g;
    g.image_id = "scene_" + std::to_string(i % 4);
    g.category = std::string(kCategories[static_cast<std::size_t>(i) % kCategories.size()]);
    g.pose = testing::random_transform(rng);
    g.nocs_extents = Vec3(rng.uniform(0.1, 1), rng.uniform(0.1, 1), rng.uniform(0.1, 1));
    if (g.category == "mug") g.handle_visible = i % 2 == 0;
    gts.push_back(g);
    dets.push_back({g.image_id, g.category, rng.uniform(), g.pose, g.nocs_extents});
  }
  const auto gt_back = io::ground_truth_from_json(Json::parse(io::ground_truth_to_json(gts).dump()));
  ASSERT_EQ(gt_back.size(), gts.size());
  // Records come back grouped by image, in first-seen image order.
  std::size_t k = 0;
  for (int image = 0; image < 4; ++image) {
    for (std::size_t i = static_cast<std::size_t>(image); i < gts.size(); i += 4, ++k) {
      EXPECT_EQ(gt_back[k].image_id, gts[i].image_id);
      EXPECT_EQ(gt_back[k].category, gts[i].category);
      EXPECT_EQ(gt_back[k].pose.rotation, gts[i].pose.rotation);
      EXPECT_EQ(gt_back[k].pose.translation, gts[i].pose.translation);
      EXPECT_EQ(gt_back[k].pose.scale, gts[i].pose.scale);
      EXPECT_EQ(gt_back[k].nocs_extents, gts[i].nocs_extents);
      EXPECT_EQ(gt_back[k].handle_visible, gts[i].handle_visible);
    }
  }
  const auto det_back = io::detections_from_json(Json::parse(io::detections_to_json(dets).dump()));
  ASSERT_EQ(det_back.size(), dets.size());
  EXPECT_EQ(det_back[0].score, dets[0].score);
}

TEST(SplitJson, IntegerImageIdAndDefaultScore) {
  Json inst = split_with(Json::object())["images"][0]["instances"][0];
  const auto dets = io::detections_from_json(split_with(inst));
  ASSERT_EQ(dets.size(), 3u);
  EXPECT_EQ(dets[1].image_id, "7");
  EXPECT_EQ(dets[2].score, 1.0);
}

TEST(SplitJson, ErrorsNameTheRecord) {
  Json inst = split_with(Json::object())["images"][0]["instances"][0];
  const std::string where = "pred.json: images[1].instances[1]";

  Json bad = inst;
  bad["category"] = "teapot";
  EXPECT_NE(split_error(bad).find(where + ".category"), std::string::npos) << split_error(bad);

  bad = inst;
  bad["score"] = 1.5;
  EXPECT_NE(split_error(bad).find(where + ".score"), std::string::npos) << split_error(bad);

  bad = inst;
  bad["extents"] = {1, 0, 1};
  EXPECT_NE(split_error(bad).find(where + ".extents"), std::string::npos) << split_error(bad);

  bad = inst;
  bad["rotation"] = {1, 0, 0, 0, 1, 0, 0, 0, -1};
  EXPECT_NE(split_error(bad).find(where + ".rotation"), std::string::npos) << split_error(bad);

  bad = inst;
  bad.erase("translation");
  EXPECT_NE(split_error(bad).find(where), std::string::npos) << split_error(bad);

  bad = inst;
  bad["handle_visible"] = "yes";
  EXPECT_NE(split_error(bad).find(where + ".handle_visible"), std::string::npos) << split_error(bad);

  EXPECT_THROW(io::detections_from_json(Json::parse(R"({"images": {}})")), ParseError);
  EXPECT_THROW(io::detections_from_json(Json::parse(R"({"images": [{"id": 1.5, "instances": []}]})")), ParseError);
  EXPECT_THROW(io::detections_from_json(Json::parse(R"({})")), ParseError);
}

TEST(SplitJson, MugHandleFlagRules) {
  Json inst = split_with(Json::object())["images"][0]["instances"][0];
  inst["category"] = "mug";
  const Json no_flag = {{"images", {{{"id", "a"}, {"instances", Json::array({inst})}}}}};
  EXPECT_THROW(io::ground_truth_from_json(no_flag), ParseError);
  // Predictions never need the flag.
  EXPECT_NO_THROW(io::detections_from_json(no_flag));

  inst["handle_visible"] = false;
  const Json with_flag = {{"images", {{{"id", "a"}, {"instances", Json::array({inst})}}}}};
  const auto gts = io::ground_truth_from_json(with_flag);
  ASSERT_EQ(gts.size(), 1u);
  EXPECT_EQ(gts[0].symmetry(), SymmetryClass::kYAxisContinuous);

  Json can = split_with(Json::object())["images"][0]["instances"][0];
  can["handle_visible"] = true;
  EXPECT_THROW(io::ground_truth_from_json({{"images", {{{"id", "a"}, {"instances", Json::array({can})}}}}}),
               ParseError);
}

TEST(Json, ReadReportsMalformedFile) {
  testing::TempDir dir("json");
  io::write_text(dir / "bad.json", "{\"a\": ");
  EXPECT_THROW(io::read_json(dir / "bad.json"), ParseError);
  io::write_json(dir / "ok.json", {{"a", 1}});
  EXPECT_EQ(io::read_text(dir / "ok.json").back(), '\n');
  EXPECT_EQ(io::read_json(dir / "ok.json")["a"], 1);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(1.0), "1");
  EXPECT_EQ(io::format_double(-2.5e-7), "-2.5e-07");
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
}

}  // namespace
}  // namespace catpose
