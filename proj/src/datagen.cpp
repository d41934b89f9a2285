#include "catpose/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "catpose/error.hpp"
#include "catpose/geometry.hpp"
#include "catpose/io.hpp"
#include "catpose/parallel.hpp"
#include "catpose/random.hpp"
#include "catpose/symmetry.hpp"

namespace catpose {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kRawPriorPoints = 8192;

// --- procedural prior shapes (raw units, normalized afterwards) ---

Vec3 on_box_surface(Rng& rng, const Vec3& lo, const Vec3& hi) {
  const Vec3 e = hi - lo;
  const double areas[3] = {e.y() * e.z(), e.x() * e.z(), e.x() * e.y()};
  double pick = rng.uniform(0.0, areas[0] + areas[1] + areas[2]);
  int axis = 0;
  while (axis < 2 && pick >= areas[axis]) pick -= areas[axis++];
  Vec3 p(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), rng.uniform(lo.z(), hi.z()));
  p[axis] = rng.uniform() < 0.5 ? lo[axis] : hi[axis];
  return p;
}

// Disk of radius r in the plane y = h, around the y axis.
Vec3 on_disk(Rng& rng, double r, double h) {
  const double rho = r * std::sqrt(rng.uniform());
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  return {rho * std::cos(phi), h, rho * std::sin(phi)};
}

// Surface of revolution about y with radius profile r(y), y in [y0, y1].
template <typename Profile>
Vec3 on_revolution(Rng& rng, double y0, double y1, double r_max, Profile radius) {
  for (;;) {
    const double y = rng.uniform(y0, y1);
    const double r = radius(y);
    if (rng.uniform() * r_max <= r) {
      const double phi = rng.uniform(0.0, 2.0 * kPi);
      return {r * std::cos(phi), y, r * std::sin(phi)};
    }
  }
}

std::vector<Vec3> raw_shape(std::string_view category, Rng& rng) {
  std::vector<Vec3> pts;
  pts.reserve(kRawPriorPoints);
  for (std::size_t i = 0; i < kRawPriorPoints; ++i) {
    const double part = rng.uniform();
    if (category == "can") {
      if (part < 0.7) {
        pts.push_back(on_revolution(rng, -0.6, 0.6, 0.5, [](double) { return 0.5; }));
      } else {
        pts.push_back(on_disk(rng, 0.5, part < 0.85 ? -0.6 : 0.6));
      }
    } else if (category == "bottle") {
      if (part < 0.9) {
        pts.push_back(on_revolution(rng, -0.7, 0.8, 0.35, [](double y) {
          if (y < 0.3) return 0.35;
          if (y < 0.5) return 0.35 + (0.12 - 0.35) * (y - 0.3) / 0.2;
          return 0.12;
        }));
      } else {
        pts.push_back(on_disk(rng, 0.35, -0.7));
      }
    } else if (category == "bowl") {
      // Lower half of a sphere shell plus a small foot ring.
      if (part < 0.9) {
        Vec3 d;
        do {
          d = rng.unit_vector();
        } while (d.y() > 0.0);
        pts.push_back(Vec3(0.5 * d.x(), 0.5 * d.y() + 0.2, 0.5 * d.z()));
      } else {
        pts.push_back(on_disk(rng, 0.2, -0.3));
      }
    } else if (category == "mug") {
      if (part < 0.7) {
        pts.push_back(on_revolution(rng, -0.5, 0.5, 0.4, [](double) { return 0.4; }));
      } else if (part < 0.8) {
        pts.push_back(on_disk(rng, 0.4, -0.5));
      } else {
        // Handle: partial torus in the xy plane on the +x side.
        double phi;
        do {
          phi = rng.uniform(-kPi, kPi);
        } while (0.45 + 0.22 * std::cos(phi) < 0.4);
        const double psi = rng.uniform(0.0, 2.0 * kPi);
        const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
        const Vec3 center = Vec3(0.45, 0.0, 0.0) + 0.22 * radial;
        pts.push_back(center + 0.05 * (std::cos(psi) * radial + std::sin(psi) * Vec3::UnitZ()));
      }
    } else if (category == "laptop") {
      if (part < 0.5) {
        pts.push_back(on_box_surface(rng, Vec3(-0.5, -0.02, -0.35), Vec3(0.5, 0.02, 0.35)));
      } else {
        // Screen hinged at the back edge, opened to 105 degrees.
        const Vec3 local = on_box_surface(rng, Vec3(-0.5, 0.0, -0.01), Vec3(0.5, 0.7, 0.01));
        const double tilt = 15.0 * kPi / 180.0;
        const Vec3 up(0.0, std::cos(tilt), -std::sin(tilt));
        const Vec3 normal(0.0, std::sin(tilt), std::cos(tilt));
        pts.push_back(Vec3(local.x(), 0.02, -0.35) + local.y() * up + local.z() * normal);
      }
    } else if (category == "camera") {
      if (part < 0.75) {
        pts.push_back(on_box_surface(rng, Vec3(-0.5, -0.35, -0.2), Vec3(0.5, 0.35, 0.2)));
      } else {
        // Lens barrel along +z.
        const double z = rng.uniform(0.2, 0.55);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        if (part < 0.93) {
          pts.push_back(Vec3(0.1 + 0.22 * std::cos(phi), 0.22 * std::sin(phi), z));
        } else {
          const double rho = 0.22 * std::sqrt(rng.uniform());
          pts.push_back(Vec3(0.1 + rho * std::cos(phi), rho * std::sin(phi), 0.55));
        }
      }
    } else {
      throw InvalidInput("no builtin prior for category '" + std::string(category) + "'");
    }
  }
  return pts;
}

std::uint64_t category_seed(std::string_view category) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (char c : category) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

// --- scene synthesis ---

bool is_y_symmetric_shape(std::string_view category) {
  return category == "bottle" || category == "bowl" || category == "can";
}

DeformationField sample_deformation(std::string_view category, const PointCloud& prior, double amplitude,
                                    Rng& rng) {
  DeformationField d(prior.size(), Vec3::Zero());
  if (amplitude <= 0.0) return d;
  if (is_y_symmetric_shape(category)) {
    // Radial bulge and axial shift varying smoothly along y keep the shape a
    // surface of revolution.
    const double a = amplitude * rng.uniform(-1.0, 1.0) / 0.5;
    const double b = amplitude * rng.uniform(-1.0, 1.0);
    const double wa = rng.uniform(1.0, 3.0) * kPi;
    const double wb = rng.uniform(1.0, 3.0) * kPi;
    const double pa = rng.uniform(0.0, 2.0 * kPi);
    const double pb = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < prior.size(); ++i) {
      const Vec3& p = prior[i];
      const double radial = a * std::sin(wa * p.y() + pa);
      d[i] = Vec3(radial * p.x(), b * std::sin(wb * p.y() + pb), radial * p.z());
    }
    return d;
  }
  for (int axis = 0; axis < 3; ++axis) {
    const double amp = amplitude * rng.uniform(-1.0, 1.0);
    const Vec3 wave = rng.unit_vector() * rng.uniform(1.0, 3.0) * kPi;
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < prior.size(); ++i) d[i][axis] = amp * std::sin(wave.dot(prior[i]) + phase);
  }
  return d;
}

std::string scene_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

SynthScene make_scene(const SynthSceneConfig& cfg, const std::map<std::string, PointCloud>& priors,
                      std::size_t scene_index) {
  Rng rng(cfg.seed ^ static_cast<std::uint64_t>(scene_index));
  SynthScene scene;
  scene.id = scene_name(scene_index);
  const Vec3 margin = Vec3::Constant(0.5 * cfg.scale_max);
  const Vec3 bounds_lo = cfg.translation_min - margin;
  const Vec3 bounds_hi = cfg.translation_max + margin;

  std::vector<PointCloud> observed;
  for (std::size_t k = 0; k < cfg.instances_per_scene; ++k) {
    const std::string& category =
        cfg.categories[(scene_index * cfg.instances_per_scene + k) % cfg.categories.size()];
    const PointCloud& prior = priors.at(category);

    SynthInstance inst;
    const DeformationField raw = sample_deformation(category, prior, cfg.deformation_amplitude, rng);
    inst.model = nocs_normalize(reconstruct_model(prior, raw)).cloud;
    inst.deformation.resize(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) inst.deformation[i] = inst.model[i] - prior[i];

    SimilarityTransform pose;
    pose.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
    pose.rotation = rng.rotation();
    for (int a = 0; a < 3; ++a) pose.translation[a] = rng.uniform(cfg.translation_min[a], cfg.translation_max[a]);

    // Partial view: keep one side of a random plane through the model.
    const PointCloud dense = resample(inst.model, cfg.points_per_instance, rng.next());
    const Vec3 view_dir = rng.unit_vector();
    const double offset = rng.uniform(-0.15, 0.0);
    PointCloud nocs(std::vector<Vec3>{}, Frame::kNocs);
    for (const Vec3& p : dense.points) {
      if (p.dot(view_dir) >= offset) nocs.points.push_back(p);
    }
    if (nocs.size() < 16) nocs.points = dense.points;

    inst.corr.src = nocs;
    inst.corr.dst = transform_points(pose, nocs);
    inst.corr.dst.frame = Frame::kCamera;
    if (cfg.noise_sigma > 0.0) {
      for (Vec3& p : inst.corr.dst.points) {
        p += cfg.noise_sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
      }
    }
    const std::size_t nv = nocs.size();
    const auto num_outliers = static_cast<std::size_t>(std::floor(cfg.outlier_fraction * static_cast<double>(nv)));
    inst.outlier.assign(nv, false);
    {
      std::vector<std::size_t> idx(nv);
      for (std::size_t i = 0; i < nv; ++i) idx[i] = i;
      for (std::size_t i = 0; i < num_outliers; ++i) {
        std::swap(idx[i], idx[i + rng.index(nv - i)]);
        inst.outlier[idx[i]] = true;
        Vec3& p = inst.corr.dst[idx[i]];
        for (int a = 0; a < 3; ++a) p[a] = rng.uniform(bounds_lo[a], bounds_hi[a]);
      }
    }

    inst.gt.image_id = scene.id;
    inst.gt.category = category;
    inst.gt.pose = pose;
    inst.gt.nocs_extents = compute_aabb(inst.model).extents();
    if (category == "mug") {
      // The handle is the part of the model beyond 75% of its +x reach.
      const double reach = compute_aabb(inst.model).max.x();
      inst.gt.handle_visible = std::any_of(nocs.points.begin(), nocs.points.end(),
                                           [&](const Vec3& p) { return p.x() > 0.75 * reach; });
    }
    observed.push_back(inst.corr.dst);
    scene.instances.push_back(std::move(inst));
  }
  scene.view = render_depth(observed, cfg.intrinsics, cfg.image_width, cfg.image_height);
  return scene;
}

Vec3 vec3_from(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput(std::string("config: '") + key + "' must be [x, y, z]");
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidInput(std::string("config: '") + key + "' must hold numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

PointCloud backproject(const DepthImage& depth, const InstanceMask& mask, const CameraIntrinsics& k) {
  if (depth.width != mask.width || depth.height != mask.height) {
    throw InvalidInput("backproject: depth is " + std::to_string(depth.width) + "x" + std::to_string(depth.height) +
                       " but mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height));
  }
  if (!(k.fx > 0.0) || !(k.fy > 0.0)) throw InvalidInput("backproject: focal lengths must be positive");
  PointCloud cloud;
  cloud.frame = Frame::kCamera;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const std::uint16_t d = depth.at(u, v);
      if (!mask.at(u, v) || d == 0) continue;
      const double z = d / 1000.0;
      cloud.points.emplace_back((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z);
    }
  }
  if (cloud.empty()) throw InvalidInput("backproject: no masked pixel has a valid depth");
  return cloud;
}

RenderedView render_depth(const std::vector<PointCloud>& clouds, const CameraIntrinsics& k, int width,
                          int height) {
  if (width <= 0 || height <= 0) throw InvalidInput("render_depth: image size must be positive");
  RenderedView view;
  view.depth = DepthImage(width, height);
  std::vector<double> zbuf(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::infinity());
  std::vector<int> owner(zbuf.size(), -1);
  for (std::size_t c = 0; c < clouds.size(); ++c) {
    for (const Vec3& p : clouds[c].points) {
      if (!(p.z() > 0.0)) continue;
      const double u = std::round(k.fx * p.x() / p.z() + k.cx);
      const double v = std::round(k.fy * p.y() / p.z() + k.cy);
      if (u < 0.0 || v < 0.0 || u >= width || v >= height) continue;
      const std::size_t idx = static_cast<std::size_t>(v) * width + static_cast<std::size_t>(u);
      if (p.z() < zbuf[idx]) {
        zbuf[idx] = p.z();
        owner[idx] = static_cast<int>(c);
      }
    }
  }
  view.masks.assign(clouds.size(), InstanceMask(width, height));
  for (std::size_t idx = 0; idx < zbuf.size(); ++idx) {
    if (owner[idx] < 0) continue;
    const double mm = std::round(zbuf[idx] * 1000.0);
    if (mm < 1.0 || mm > 65535.0) continue;
    view.depth.mm[idx] = static_cast<std::uint16_t>(mm);
    view.masks[static_cast<std::size_t>(owner[idx])].on[idx] = 1;
  }
  return view;
}

void LatentEmbeddingSet::add(const std::string& category, Eigen::VectorXd z) {
  if (z.size() == 0) throw InvalidInput("embedding vectors must be nonempty");
  if (!z.allFinite()) throw InvalidInput("embedding for '" + category + "' is not finite");
  if (dim_ == 0) dim_ = static_cast<std::size_t>(z.size());
  if (static_cast<std::size_t>(z.size()) != dim_) {
    throw InvalidInput("embedding for '" + category + "' has dimension " + std::to_string(z.size()) +
                       ", expected " + std::to_string(dim_));
  }
  data_[category].push_back(std::move(z));
}

LatentEmbeddingSet read_embeddings_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "' for reading");
  LatentEmbeddingSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() < 2) throw ParseError(path.string(), line_no, "expected category followed by values");
    std::vector<double> values;
    bool numeric = true;
    for (std::size_t i = 1; i < fields.size() && numeric; ++i) {
      const std::string& s = fields[i];
      const char* b = s.data();
      const char* e = s.data() + s.size();
      while (b < e && *b == ' ') ++b;
      double v = 0.0;
      const auto res = std::from_chars(b, e, v);
      numeric = res.ec == std::errc() && res.ptr == e;
      values.push_back(v);
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header
      throw ParseError(path.string(), line_no, "non-numeric embedding value");
    }
    try {
      set.add(fields[0], Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    } catch (const InvalidInput& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return set;
}

Eigen::VectorXd mean_embedding(const LatentEmbeddingSet& set, std::string_view category) {
  const auto it = set.by_category().find(std::string(category));
  if (it == set.by_category().end() || it->second.empty()) {
    throw InvalidInput("no embeddings for category '" + std::string(category) + "'");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.dimension()));
  for (const auto& z : it->second) sum += z;
  return sum / static_cast<double>(it->second.size());
}

LoadedPrior load_prior(const std::filesystem::path& path) {
  LoadedPrior out;
  out.cloud = io::read_ply(path);
  out.cloud.frame = Frame::kNocs;
  if (out.cloud.empty()) throw ParseError(path.string(), 0, "prior has no points");
  if (out.cloud.size() != kPriorPoints) {
    out.warnings.push_back(path.string() + ": prior has " + std::to_string(out.cloud.size()) + " points, expected " +
                           std::to_string(kPriorPoints));
  }
  const double diag = bbox_diameter(out.cloud);
  if (std::abs(diag - 1.0) > 0.05) {
    out.warnings.push_back(path.string() + ": bounding-box diagonal is " + io::format_double(diag) +
                           ", expected 1 (NOCS)");
  }
  return out;
}

PointCloud builtin_prior(std::string_view category, std::size_t n) {
  Rng rng(category_seed(category));
  PointCloud raw(raw_shape(category, rng), Frame::kNocs);
  PointCloud normalized = nocs_normalize(raw).cloud;
  return resample(normalized, n, rng.next());
}

void validate(const SynthSceneConfig& cfg) {
  if (cfg.scenes == 0) throw InvalidInput("config: at least one scene is required");
  if (cfg.categories.empty()) throw InvalidInput("config: no categories");
  for (const auto& c : cfg.categories) {
    if (!is_known_category(c)) throw InvalidInput("config: unknown category '" + c + "'");
  }
  if (cfg.instances_per_scene == 0) throw InvalidInput("config: instances_per_scene must be positive");
  if (cfg.points_per_instance < 16) throw InvalidInput("config: points_per_instance must be at least 16");
  if (!(cfg.noise_sigma >= 0.0)) throw InvalidInput("config: noise_sigma must be nonnegative");
  if (!(cfg.outlier_fraction >= 0.0 && cfg.outlier_fraction < 1.0)) {
    throw InvalidInput("config: outlier_fraction must be in [0, 1)");
  }
  if (!(cfg.scale_min > 0.0 && cfg.scale_min <= cfg.scale_max)) {
    throw InvalidInput("config: scale_range must satisfy 0 < min <= max");
  }
  if (!(cfg.translation_min.array() <= cfg.translation_max.array()).all()) {
    throw InvalidInput("config: translation_min must not exceed translation_max");
  }
  if (!(cfg.translation_min.z() - 0.5 * cfg.scale_max > 0.0)) {
    throw InvalidInput("config: objects must lie in front of the camera (translation_min z too small)");
  }
  if (!(cfg.deformation_amplitude >= 0.0 && cfg.deformation_amplitude < 0.25)) {
    throw InvalidInput("config: deformation_amplitude must be in [0, 0.25)");
  }
  if (cfg.image_width <= 0 || cfg.image_height <= 0) throw InvalidInput("config: image size must be positive");
  if (!(cfg.intrinsics.fx > 0.0) || !(cfg.intrinsics.fy > 0.0)) {
    throw InvalidInput("config: focal lengths must be positive");
  }
}

SynthSceneConfig synth_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  SynthSceneConfig cfg;
  auto number = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw InvalidInput("config: '" + key + "' must be a number");
    return v.get<double>();
  };
  auto count = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw InvalidInput("config: '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "scenes") {
      cfg.scenes = count(v, key);
    } else if (key == "categories") {
      if (!v.is_array()) throw InvalidInput("config: 'categories' must be an array of names");
      cfg.categories.clear();
      for (const auto& c : v) {
        if (!c.is_string()) throw InvalidInput("config: 'categories' must be an array of names");
        cfg.categories.push_back(c.get<std::string>());
      }
    } else if (key == "instances_per_scene") {
      cfg.instances_per_scene = count(v, key);
    } else if (key == "points_per_instance") {
      cfg.points_per_instance = count(v, key);
    } else if (key == "noise_sigma") {
      cfg.noise_sigma = number(v, key);
    } else if (key == "outlier_fraction") {
      cfg.outlier_fraction = number(v, key);
    } else if (key == "scale_range") {
      if (!v.is_array() || v.size() != 2) throw InvalidInput("config: 'scale_range' must be [min, max]");
      cfg.scale_min = number(v[0], key);
      cfg.scale_max = number(v[1], key);
    } else if (key == "translation_min") {
      cfg.translation_min = vec3_from(v, "translation_min");
    } else if (key == "translation_max") {
      cfg.translation_max = vec3_from(v, "translation_max");
    } else if (key == "deformation_amplitude") {
      cfg.deformation_amplitude = number(v, key);
    } else if (key == "image_size") {
      if (!v.is_array() || v.size() != 2) throw InvalidInput("config: 'image_size' must be [width, height]");
      cfg.image_width = static_cast<int>(count(v[0], key));
      cfg.image_height = static_cast<int>(count(v[1], key));
    } else if (key == "intrinsics") {
      if (!v.is_object()) throw InvalidInput("config: 'intrinsics' must be an object");
      auto field = [&](const char* name) {
        if (!v.contains(name)) throw InvalidInput(std::string("config: 'intrinsics' lacks '") + name + "'");
        return number(v[name], std::string("intrinsics.") + name);
      };
      cfg.intrinsics.fx = field("fx");
      cfg.intrinsics.fy = field("fy");
      cfg.intrinsics.cx = field("cx");
      cfg.intrinsics.cy = field("cy");
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw InvalidInput("config: 'seed' must be a nonnegative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "priors") {
      if (!v.is_object()) throw InvalidInput("config: 'priors' must map category to PLY path");
      for (const auto& [cat, p] : v.items()) {
        if (!p.is_string()) throw InvalidInput("config: prior path for '" + cat + "' must be a string");
        cfg.prior_files[cat] = p.get<std::string>();
      }
    } else {
      throw InvalidInput("config: unknown field '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

nlohmann::json synth_config_to_json(const SynthSceneConfig& cfg) {
  nlohmann::json j;
  j["scenes"] = cfg.scenes;
  j["categories"] = cfg.categories;
  j["instances_per_scene"] = cfg.instances_per_scene;
  j["points_per_instance"] = cfg.points_per_instance;
  j["noise_sigma"] = cfg.noise_sigma;
  j["outlier_fraction"] = cfg.outlier_fraction;
  j["scale_range"] = {cfg.scale_min, cfg.scale_max};
  j["translation_min"] = {cfg.translation_min.x(), cfg.translation_min.y(), cfg.translation_min.z()};
  j["translation_max"] = {cfg.translation_max.x(), cfg.translation_max.y(), cfg.translation_max.z()};
  j["deformation_amplitude"] = cfg.deformation_amplitude;
  j["image_size"] = {cfg.image_width, cfg.image_height};
  j["intrinsics"] = {{"fx", cfg.intrinsics.fx}, {"fy", cfg.intrinsics.fy}, {"cx", cfg.intrinsics.cx}, {"cy", cfg.intrinsics.cy}};
  j["seed"] = cfg.seed;
  nlohmann::json priors = nlohmann::json::object();
  for (const auto& [cat, p] : cfg.prior_files) priors[cat] = p.string();
  j["priors"] = priors;
  return j;
}

std::vector<GroundTruthInstance> SynthDataset::ground_truth() const {
  std::vector<GroundTruthInstance> out;
  for (const auto& scene : scenes)
    for (const auto& inst : scene.instances) out.push_back(inst.gt);
  return out;
}

std::map<std::string, PointCloud> resolve_priors(const SynthSceneConfig& cfg, std::vector<std::string>* warnings) {
  std::map<std::string, PointCloud> priors;
  for (const auto& category : cfg.categories) {
    if (priors.count(category)) continue;
    if (auto it = cfg.prior_files.find(category); it != cfg.prior_files.end()) {
      LoadedPrior loaded = load_prior(it->second);
      if (warnings) warnings->insert(warnings->end(), loaded.warnings.begin(), loaded.warnings.end());
      priors[category] = std::move(loaded.cloud);
    } else {
      priors[category] = builtin_prior(category);
    }
  }
  return priors;
}

SynthDataset synth_scenes(const SynthSceneConfig& cfg, const std::map<std::string, PointCloud>& priors, int threads) {
  validate(cfg);
  for (const auto& c : cfg.categories) {
    if (!priors.count(c)) throw InvalidInput("synth_scenes: no prior for category '" + c + "'");
    if (priors.at(c).empty()) throw InvalidInput("synth_scenes: empty prior for category '" + c + "'");
  }
  SynthDataset data;
  data.scenes.resize(cfg.scenes);
  parallel_for(cfg.scenes, threads, [&](std::size_t i) { data.scenes[i] = make_scene(cfg, priors, i); });
  return data;
}

void write_dataset(const SynthDataset& data, const SynthSceneConfig& cfg, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  fs::create_directories(out / "scenes");
  io::write_json(out / "config.json", synth_config_to_json(cfg));
  io::write_json(out / "gt.json", io::ground_truth_to_json(data.ground_truth()));
  for (const auto& scene : data.scenes) {
    const fs::path dir = out / "scenes" / scene.id;
    fs::create_directories(dir);
    io::write_depth_pgm(dir / "depth.pgm", scene.view.depth);
    std::vector<GroundTruthInstance> gts;
    for (std::size_t k = 0; k < scene.instances.size(); ++k) {
      const SynthInstance& inst = scene.instances[k];
      gts.push_back(inst.gt);
      const std::string suffix = std::to_string(k);
      io::write_mask_pgm(dir / ("mask_" + suffix + ".pgm"), scene.view.masks[k]);
      io::Json corr = io::correspondences_to_json(inst.corr);
      corr["outlier"] = inst.outlier;
      io::write_json(dir / ("corr_" + suffix + ".json"), corr);
      io::write_json(dir / ("deform_" + suffix + ".json"), io::deformation_to_json(inst.deformation));
    }
    io::write_json(dir / "gt.json", io::ground_truth_to_json(gts));
  }
}

std::vector<Detection> perturb_predictions(const std::vector<GroundTruthInstance>& gts, const PerturbErrors& errors,
                                           std::uint64_t seed) {
  if (!(errors.scale_factor > 0.0)) throw InvalidInput("perturb: scale_factor must be positive");
  if (!(errors.rot_deg >= 0.0) || !(errors.trans_cm >= 0.0)) {
    throw InvalidInput("perturb: rotation and translation errors must be nonnegative");
  }
  Rng rng(seed);
  std::vector<Detection> out;
  out.reserve(gts.size());
  const double radians = errors.rot_deg * kPi / 180.0;
  for (const GroundTruthInstance& g : gts) {
    // Always draw both directions so the stream does not depend on the flags.
    const Vec3 axis = rng.unit_vector();
    const Vec3 direction = rng.unit_vector();
    Detection d{g.image_id, g.category, 1.0, g.pose, g.nocs_extents};
    if (errors.rot_deg != 0.0) {
      const bool about_y = errors.symmetric_safe && g.symmetry() == SymmetryClass::kYAxisContinuous;
      d.pose.rotation = g.pose.rotation * (about_y ? y_rotation(radians) : axis_angle(axis, radians));
    }
    if (errors.trans_cm != 0.0) d.pose.translation = g.pose.translation + direction * (errors.trans_cm / 100.0);
    d.pose.scale = g.pose.scale * errors.scale_factor;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace catpose
