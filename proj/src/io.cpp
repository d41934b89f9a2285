#include "catpose/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "catpose/error.hpp"
#include "catpose/geometry.hpp"

namespace catpose::io {
namespace {

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  return out;
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, 0, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where, 0, "number is not finite");
  return v;
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, 0, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where, 0, std::string("missing field '") + key + "'");
  return *it;
}

std::vector<double> numbers(const Json& j, std::size_t count, const std::string& where) {
  if (!j.is_array() || j.size() != count) {
    throw ParseError(where, 0, "expected an array of " + std::to_string(count) + " numbers");
  }
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Vec3> points_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, 0, "expected an array of [x, y, z] points");
  std::vector<Vec3> pts;
  pts.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto v = numbers(j[i], 3, where + "[" + std::to_string(i) + "]");
    pts.emplace_back(v[0], v[1], v[2]);
  }
  return pts;
}

Json points_to_json(const PointCloud& cloud) {
  Json arr = Json::array();
  for (const Vec3& p : cloud.points) arr.push_back({p.x(), p.y(), p.z()});
  return arr;
}

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PgmHeader read_pgm_header(std::istream& in, const std::string& source) {
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ParseError(source, 1, "not a binary PGM (P5) file");
  PgmHeader h;
  auto next_int = [&](const char* what) {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = 0;
    if (!(in >> v) || v <= 0) throw ParseError(source, 0, std::string("bad PGM ") + what);
    return v;
  };
  h.width = next_int("width");
  h.height = next_int("height");
  h.maxval = next_int("maxval");
  in.get();  // single whitespace before the raster
  return h;
}

Json instance_pose_json(const SimilarityTransform& pose, const Vec3& extents) {
  Json j;
  j["scale"] = pose.scale;
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation(r, c));
  j["rotation"] = rot;
  j["translation"] = {pose.translation.x(), pose.translation.y(), pose.translation.z()};
  j["extents"] = {extents.x(), extents.y(), extents.z()};
  return j;
}

struct RawInstance {
  std::string image_id;
  std::string category;
  std::optional<double> score;
  SimilarityTransform pose;
  Vec3 extents;
  std::optional<bool> handle_visible;
  std::string where;
};

std::vector<RawInstance> parse_split(const Json& j, const std::string& source) {
  const Json& images = member(j, "images", source);
  if (!images.is_array()) throw ParseError(source, 0, "'images' must be an array");
  std::vector<RawInstance> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string img_where = source + ": images[" + std::to_string(i) + "]";
    const Json& img = images[i];
    const Json& id = member(img, "id", img_where);
    std::string image_id;
    if (id.is_string()) {
      image_id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      image_id = std::to_string(id.get<long long>());
    } else {
      throw ParseError(img_where + ".id", 0, "expected a string or integer");
    }
    const Json& instances = member(img, "instances", img_where);
    if (!instances.is_array()) throw ParseError(img_where + ".instances", 0, "expected an array");
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const std::string where = img_where + ".instances[" + std::to_string(k) + "]";
      const Json& inst = instances[k];
      RawInstance r;
      r.where = where;
      r.image_id = image_id;
      const Json& cat = member(inst, "category", where);
      if (!cat.is_string()) throw ParseError(where + ".category", 0, "expected a string");
      r.category = cat.get<std::string>();
      if (!is_known_category(r.category)) {
        throw ParseError(where + ".category", 0, "unknown category '" + r.category + "'");
      }
      if (auto it = inst.find("score"); it != inst.end()) {
        r.score = as_number(*it, where + ".score");
        if (*r.score < 0.0 || *r.score > 1.0) throw ParseError(where + ".score", 0, "score must be in [0, 1]");
      }
      r.pose = transform_from_json(inst, where);
      const auto e = numbers(member(inst, "extents", where), 3, where + ".extents");
      r.extents = Vec3(e[0], e[1], e[2]);
      if (!(r.extents.array() > 0.0).all()) throw ParseError(where + ".extents", 0, "extents must be positive");
      if (auto it = inst.find("handle_visible"); it != inst.end() && !it->is_null()) {
        if (!it->is_boolean()) throw ParseError(where + ".handle_visible", 0, "expected a boolean");
        r.handle_visible = it->get<bool>();
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

template <typename T>
Json split_to_json(const std::vector<T>& items, const std::function<Json(const T&)>& encode) {
  Json images = Json::array();
  std::map<std::string, std::size_t> slot;
  for (const T& item : items) {
    auto [it, inserted] = slot.emplace(item.image_id, images.size());
    if (inserted) images.push_back({{"id", item.image_id}, {"instances", Json::array()}});
    images[it->second]["instances"].push_back(encode(item));
  }
  return {{"images", images}};
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

PointCloud read_ply(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw ParseError(source, line_no == 0 ? 1 : line_no, "missing 'ply' magic");
  bool ascii = false;
  bool in_vertex = false;
  bool seen_vertex = false;
  long long count = -1;
  int num_props = 0;
  std::array<int, 3> col = {-1, -1, -1};
  for (;;) {
    if (!next_line()) throw ParseError(source, line_no, "unexpected end of header");
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "comment" || word == "obj_info" || word.empty()) continue;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw ParseError(source, line_no, "only ASCII PLY is supported");
      ascii = true;
    } else if (word == "element") {
      std::string name;
      long long n = -1;
      ls >> name >> n;
      if (!ls || n < 0) throw ParseError(source, line_no, "malformed element line");
      if (name == "vertex") {
        in_vertex = true;
        seen_vertex = true;
        count = n;
      } else {
        if (!seen_vertex) throw ParseError(source, line_no, "element '" + name + "' precedes the vertex element");
        in_vertex = false;
      }
    } else if (word == "property") {
      std::string type;
      std::string name;
      ls >> type;
      if (type == "list") {
        if (in_vertex) throw ParseError(source, line_no, "list vertex properties are not supported");
        continue;
      }
      ls >> name;
      if (!ls) throw ParseError(source, line_no, "malformed property line");
      if (in_vertex) {
        const bool real = type == "float" || type == "double" || type == "float32" || type == "float64";
        if (name == "x" || name == "y" || name == "z") {
          if (!real) throw ParseError(source, line_no, "coordinate property '" + name + "' must be floating point");
          col[name[0] - 'x'] = num_props;
        }
        ++num_props;
      }
    } else {
      throw ParseError(source, line_no, "unrecognized header line '" + line + "'");
    }
  }
  if (!ascii) throw ParseError(source, line_no, "missing 'format ascii 1.0' line");
  if (!seen_vertex) throw ParseError(source, line_no, "no vertex element");
  if (col[0] < 0 || col[1] < 0 || col[2] < 0) throw ParseError(source, line_no, "vertex element lacks x, y or z");

  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(count));
  std::vector<double> values(static_cast<std::size_t>(num_props));
  for (long long i = 0; i < count; ++i) {
    if (!next_line()) throw ParseError(source, line_no + 1, "expected " + std::to_string(count) + " vertices, file ends after " + std::to_string(i));
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < num_props; ++k) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p < end && *p == '+') ++p;
      const auto res = std::from_chars(p, end, values[static_cast<std::size_t>(k)]);
      if (res.ec != std::errc() || (res.ptr < end && *res.ptr != ' ' && *res.ptr != '\t')) {
        throw ParseError(source, line_no, "expected " + std::to_string(num_props) + " numbers");
      }
      p = res.ptr;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) throw ParseError(source, line_no, "more values than the " + std::to_string(num_props) + " declared properties");
    const Vec3 v(values[static_cast<std::size_t>(col[0])], values[static_cast<std::size_t>(col[1])],
                 values[static_cast<std::size_t>(col[2])]);
    if (!v.allFinite()) throw ParseError(source, line_no, "non-finite coordinate");
    cloud.points.push_back(v);
  }
  return cloud;
}

PointCloud read_ply(const fs::path& path) {
  auto in = open_in(path);
  return read_ply(in, path.string());
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float64 x\nproperty float64 y\nproperty float64 z\nend_header\n";
  for (const Vec3& p : cloud.points) {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  }
}

void write_ply(const fs::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  write_ply(out, cloud);
}

Json transform_to_json(const SimilarityTransform& t) {
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(t.rotation(r, c));
  return {{"scale", t.scale},
          {"rotation", rot},
          {"translation", {t.translation.x(), t.translation.y(), t.translation.z()}}};
}

SimilarityTransform transform_from_json(const Json& j, const std::string& where) {
  SimilarityTransform t;
  t.scale = as_number(member(j, "scale", where), where + ".scale");
  const Json& rot = member(j, "rotation", where);
  Json flat = rot;
  if (rot.is_array() && rot.size() == 3 && rot[0].is_array()) {
    flat = Json::array();
    for (const auto& row : rot) {
      if (!row.is_array()) throw ParseError(where + ".rotation", 0, "expected 3 rows of 3 numbers");
      for (const auto& v : row) flat.push_back(v);
    }
  }
  const auto r = numbers(flat, 9, where + ".rotation");
  for (int i = 0; i < 9; ++i) t.rotation(i / 3, i % 3) = r[static_cast<std::size_t>(i)];
  const auto tr = numbers(member(j, "translation", where), 3, where + ".translation");
  t.translation = Vec3(tr[0], tr[1], tr[2]);
  if (!(t.scale > 0.0)) throw ParseError(where + ".scale", 0, "scale must be positive");
  if (!is_rotation(t.rotation)) {
    throw ParseError(where + ".rotation", 0, "not a rotation matrix (orthonormal, det +1, tolerance 1e-6)");
  }
  return t;
}

CorrespondenceSet correspondences_from_json(const Json& j, const std::string& source) {
  CorrespondenceSet c;
  c.src = PointCloud(points_from_json(member(j, "src", source), source + ": src"), Frame::kNocs);
  c.dst = PointCloud(points_from_json(member(j, "dst", source), source + ": dst"), Frame::kCamera);
  if (c.src.size() != c.dst.size()) {
    throw ParseError(source, 0, "src has " + std::to_string(c.src.size()) + " points but dst has " +
                                    std::to_string(c.dst.size()));
  }
  return c;
}

Json correspondences_to_json(const CorrespondenceSet& corr) {
  return {{"src", points_to_json(corr.src)}, {"dst", points_to_json(corr.dst)}};
}

Json matrix_to_json(const Eigen::MatrixXd& a) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) data.push_back(a(i, k));
  return {{"nv", a.rows()}, {"nc", a.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& source) {
  const Json& nv = member(j, "nv", source);
  const Json& nc = member(j, "nc", source);
  if (!nv.is_number_unsigned() || !nc.is_number_unsigned() || nv.get<std::size_t>() == 0 || nc.get<std::size_t>() == 0) {
    throw ParseError(source, 0, "'nv' and 'nc' must be positive integers");
  }
  const auto rows = nv.get<std::size_t>();
  const auto cols = nc.get<std::size_t>();
  const auto data = numbers(member(j, "data", source), rows * cols, source + ": data");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = data[i * cols + k];
  return a;
}

Json deformation_to_json(const DeformationField& d) {
  Json data = Json::array();
  for (const Vec3& v : d) {
    data.push_back(v.x());
    data.push_back(v.y());
    data.push_back(v.z());
  }
  return {{"nc", d.size()}, {"data", data}};
}

DeformationField deformation_from_json(const Json& j, const std::string& source) {
  const Json& nc = member(j, "nc", source);
  if (!nc.is_number_unsigned()) throw ParseError(source, 0, "'nc' must be a nonnegative integer");
  const auto n = nc.get<std::size_t>();
  const auto data = numbers(member(j, "data", source), 3 * n, source + ": data");
  DeformationField d;
  d.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.emplace_back(data[3 * i], data[3 * i + 1], data[3 * i + 2]);
  return d;
}

void write_depth_pgm(const fs::path& path, const DepthImage& depth) {
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << depth.width << ' ' << depth.height << "\n65535\n";
  std::string raster(depth.mm.size() * 2, '\0');
  for (std::size_t i = 0; i < depth.mm.size(); ++i) {
    raster[2 * i] = static_cast<char>(depth.mm[i] >> 8);
    raster[2 * i + 1] = static_cast<char>(depth.mm[i] & 0xff);
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

DepthImage read_depth_pgm(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  const PgmHeader h = read_pgm_header(in, path.string());
  if (h.maxval < 256) throw ParseError(path.string(), 0, "depth PGM must be 16-bit");
  DepthImage depth(h.width, h.height);
  std::string raster(depth.mm.size() * 2, '\0');
  if (!in.read(raster.data(), static_cast<std::streamsize>(raster.size()))) {
    throw ParseError(path.string(), 0, "truncated PGM raster");
  }
  for (std::size_t i = 0; i < depth.mm.size(); ++i) {
    depth.mm[i] = static_cast<std::uint16_t>((static_cast<unsigned char>(raster[2 * i]) << 8) |
                                             static_cast<unsigned char>(raster[2 * i + 1]));
  }
  return depth;
}

void write_mask_pgm(const fs::path& path, const InstanceMask& mask) {
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  std::string raster(mask.on.size(), '\0');
  for (std::size_t i = 0; i < mask.on.size(); ++i) raster[i] = mask.on[i] ? static_cast<char>(255) : '\0';
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

InstanceMask read_mask_pgm(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  const PgmHeader h = read_pgm_header(in, path.string());
  if (h.maxval > 255) throw ParseError(path.string(), 0, "mask PGM must be 8-bit");
  InstanceMask mask(h.width, h.height);
  std::string raster(mask.on.size(), '\0');
  if (!in.read(raster.data(), static_cast<std::streamsize>(raster.size()))) {
    throw ParseError(path.string(), 0, "truncated PGM raster");
  }
  for (std::size_t i = 0; i < raster.size(); ++i) mask.on[i] = raster[i] != '\0' ? 1 : 0;
  return mask;
}

std::vector<GroundTruthInstance> ground_truth_from_json(const Json& j, const std::string& source) {
  std::vector<GroundTruthInstance> out;
  for (RawInstance& r : parse_split(j, source)) {
    if (r.category == "mug" && !r.handle_visible) {
      throw ParseError(r.where, 0, "mug ground truth requires 'handle_visible'");
    }
    if (r.category != "mug" && r.handle_visible) {
      throw ParseError(r.where, 0, "'handle_visible' is only allowed for mug");
    }
    out.push_back({r.image_id, r.category, r.pose, r.extents, r.handle_visible});
  }
  return out;
}

std::vector<Detection> detections_from_json(const Json& j, const std::string& source) {
  std::vector<Detection> out;
  for (RawInstance& r : parse_split(j, source)) {
    out.push_back({r.image_id, r.category, r.score.value_or(1.0), r.pose, r.extents});
  }
  return out;
}

Json ground_truth_to_json(const std::vector<GroundTruthInstance>& gts) {
  return split_to_json<GroundTruthInstance>(gts, [](const GroundTruthInstance& g) {
    Json j = instance_pose_json(g.pose, g.nocs_extents);
    j["category"] = g.category;
    if (g.handle_visible) j["handle_visible"] = *g.handle_visible;
    return j;
  });
}

Json detections_to_json(const std::vector<Detection>& dets) {
  return split_to_json<Detection>(dets, [](const Detection& d) {
    Json j = instance_pose_json(d.pose, d.nocs_extents);
    j["category"] = d.category;
    j["score"] = d.score;
    return j;
  });
}

Json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string read_text(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::binary);
  out << text;
}

}  // namespace catpose::io
