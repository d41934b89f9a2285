#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "catpose/evaluation.hpp"
#include "catpose/image.hpp"
#include "catpose/losses.hpp"
#include "catpose/registration.hpp"
#include "catpose/types.hpp"

namespace catpose::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

// Shortest decimal text that round-trips the double.
std::string format_double(double v);

// ASCII PLY, one "vertex" element with x y z (extra vertex properties are
// ignored). Errors carry the 1-based line number.
PointCloud read_ply(std::istream& in, const std::string& source = "<stream>");
PointCloud read_ply(const fs::path& path);
void write_ply(std::ostream& out, const PointCloud& cloud);
void write_ply(const fs::path& path, const PointCloud& cloud);

// {"scale": s, "rotation": [9 values row-major], "translation": [3]}.
// The reader also accepts a nested 3x3 rotation.
Json transform_to_json(const SimilarityTransform& t);
SimilarityTransform transform_from_json(const Json& j, const std::string& where = "transform");

// {"src": [[x,y,z], ...], "dst": [[x,y,z], ...]}
CorrespondenceSet correspondences_from_json(const Json& j, const std::string& source = "correspondences");
Json correspondences_to_json(const CorrespondenceSet& corr);

// {"nv": .., "nc": .., "data": [row-major]}
Json matrix_to_json(const Eigen::MatrixXd& a);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& source = "matrix");

// {"nc": .., "data": [x0, y0, z0, x1, ...]}
Json deformation_to_json(const DeformationField& d);
DeformationField deformation_from_json(const Json& j, const std::string& source = "deformation");

// Binary PGM (P5). Depth is 16-bit big-endian millimeters, masks 8-bit 0/255.
void write_depth_pgm(const fs::path& path, const DepthImage& depth);
DepthImage read_depth_pgm(const fs::path& path);
void write_mask_pgm(const fs::path& path, const InstanceMask& mask);
InstanceMask read_mask_pgm(const fs::path& path);

// Split files: {"images": [{"id": .., "instances": [{category, score?, scale,
// rotation(9), translation(3), extents(3), handle_visible?}]}]}.
std::vector<GroundTruthInstance> ground_truth_from_json(const Json& j, const std::string& source = "ground truth");
std::vector<Detection> detections_from_json(const Json& j, const std::string& source = "predictions");
Json ground_truth_to_json(const std::vector<GroundTruthInstance>& gts);
Json detections_to_json(const std::vector<Detection>& dets);

Json read_json(const fs::path& path);
// Pretty-printed with a trailing newline.
void write_json(const fs::path& path, const Json& j);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace catpose::io
