#include "chordix/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace chordix {
namespace {

using nlohmann::json;

// Internal streams for body measurement and pair classification; fixed so a
// scene assembles identically on every run.
constexpr std::uint64_t kMeasureSeed = 0x7c7367a1d2b45f09ULL;
constexpr std::uint64_t kClassifySeed = 0x51a9e0c33b86d471ULL;

constexpr std::uint64_t kClassifyPoints = 200000;

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(std::string(what) + " must be a 3-element array");
  Vec3 v;
  v.x = j.at(0).get<double>();
  v.y = j.at(1).get<double>();
  v.z = j.at(2).get<double>();
  return v;
}

Shape parse_shape(const json& j) {
  if (!j.is_object()) throw ParseError("shape must be an object");
  const std::string type = j.value("type", std::string{});
  if (type == "sphere") {
    Sphere s;
    s.center = parse_vec3(j.at("center"), "sphere center");
    s.radius = j.at("radius").get<double>();
    if (!(s.radius > 0.0)) throw ParseError("sphere radius must be positive");
    return s;
  }
  if (type == "box") {
    AxisBox b;
    b.lo = parse_vec3(j.at("min"), "box min");
    b.hi = parse_vec3(j.at("max"), "box max");
    return b;
  }
  if (type == "csg") {
    const std::string op = j.value("op", std::string{});
    CsgOp o;
    if (op == "union") {
      o = CsgOp::Union;
    } else if (op == "intersect") {
      o = CsgOp::Intersect;
    } else if (op == "subtract") {
      o = CsgOp::Subtract;
    } else {
      throw ParseError("unknown csg op \"" + op + "\"");
    }
    return make_csg(o, parse_shape(j.at("left")), parse_shape(j.at("right")));
  }
  throw ParseError("unknown shape type \"" + type + "\"");
}

DensityField parse_density(const json& j) {
  if (!j.is_object()) throw ParseError("density must be an object");
  const std::string type = j.value("type", std::string{});
  if (type == "constant") return DensityField::constant(j.value("value", 1.0));
  if (type == "radial_linear") {
    return DensityField::radial_linear(parse_vec3(j.at("center"), "density center"),
                                       j.at("a").get<double>(), j.at("b").get<double>());
  }
  throw ParseError("unknown density type \"" + type + "\"");
}

Body parse_body(const json& j) {
  if (!j.is_object()) throw ParseError("body must be an object");
  Body b;
  b.shape = parse_shape(j.at("shape"));
  b.density = j.contains("density") ? parse_density(j.at("density"))
                                    : DensityField::constant(1.0);
  return b;
}

PairStatus classify_spheres(const Sphere& a, const Sphere& b, double tol) {
  const double d = distance(a.center, b.center);
  if (d <= tol && std::abs(a.radius - b.radius) <= tol) return PairStatus::Identical;
  if (std::abs(d - (a.radius + b.radius)) <= tol)
    throw SharedBoundaryError("spheres are externally tangent");
  if (d < a.radius + b.radius) {
    if (std::abs(d - std::abs(a.radius - b.radius)) <= tol)
      throw SharedBoundaryError("spheres are internally tangent");
    return PairStatus::Overlapping;
  }
  return PairStatus::Disjoint;
}

PairStatus classify_boxes(const AxisBox& a, const AxisBox& b, double tol) {
  const double* alo = &a.lo.x;
  const double* ahi = &a.hi.x;
  const double* blo = &b.lo.x;
  const double* bhi = &b.hi.x;
  bool identical = true;
  double m_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    identical = identical && std::abs(alo[k] - blo[k]) <= tol &&
                std::abs(ahi[k] - bhi[k]) <= tol;
    m_min = std::min(m_min, std::min(ahi[k], bhi[k]) - std::max(alo[k], blo[k]));
  }
  if (identical) return PairStatus::Identical;
  if (m_min < -tol) return PairStatus::Disjoint;
  if (m_min <= tol) throw SharedBoundaryError("boxes touch on a face, edge or corner");
  return PairStatus::Overlapping;
}

// Monte Carlo fallback for pairs without an analytic test: sample the
// intersection of the bounding boxes and call the pair overlapping once the
// common-hit estimate clears 3 sigma (Poisson: at least 10 hits).
PairStatus classify_mc(const Shape& a, const Shape& b, const Ball& ball_a,
                       const Ball& ball_b, RandomStream rng) {
  if (distance(ball_a.center, ball_b.center) > ball_a.radius + ball_b.radius)
    return PairStatus::Disjoint;
  const AxisBox box_a = bounding_box(a);
  const AxisBox box_b = bounding_box(b);
  AxisBox common;
  common.lo = Vec3{std::max(box_a.lo.x, box_b.lo.x), std::max(box_a.lo.y, box_b.lo.y),
                   std::max(box_a.lo.z, box_b.lo.z)};
  common.hi = Vec3{std::min(box_a.hi.x, box_b.hi.x), std::min(box_a.hi.y, box_b.hi.y),
                   std::min(box_a.hi.z, box_b.hi.z)};
  if (!(common.hi.x > common.lo.x) || !(common.hi.y > common.lo.y) ||
      !(common.hi.z > common.lo.z))
    return PairStatus::Disjoint;
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < kClassifyPoints; ++s) {
    const Vec3 p{rng.uniform(common.lo.x, common.hi.x),
                 rng.uniform(common.lo.y, common.hi.y),
                 rng.uniform(common.lo.z, common.hi.z)};
    if (contains(a, p) && contains(b, p)) ++hits;
  }
  return hits >= 10 ? PairStatus::Overlapping : PairStatus::Disjoint;
}

PairStatus classify_pair(const Body& a, const Body& b, const Ball& ball_a,
                         const Ball& ball_b, double tol, RandomStream rng) {
  const auto* sa = std::get_if<Sphere>(&a.shape);
  const auto* sb = std::get_if<Sphere>(&b.shape);
  if (sa && sb) return classify_spheres(*sa, *sb, tol);
  const auto* ba = std::get_if<AxisBox>(&a.shape);
  const auto* bb = std::get_if<AxisBox>(&b.shape);
  if (ba && bb) return classify_boxes(*ba, *bb, tol);
  return classify_mc(a.shape, b.shape, ball_a, ball_b, rng);
}

}  // namespace

bool Scene::all_disjoint() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (status(i, j) != PairStatus::Disjoint) return false;
  return true;
}

bool Scene::all_unit_density() const {
  return std::all_of(bodies.begin(), bodies.end(),
                     [](const Body& b) { return b.density.is_unit(); });
}

Scene assemble_scene(std::vector<std::string> ids, std::vector<Body> bodies,
                     const std::vector<std::optional<Measures>>& known) {
  if (bodies.empty()) throw ParseError("scene needs at least one body");
  if (ids.size() != bodies.size()) throw ParseError("body/id count mismatch");
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      if (ids[i] == ids[j]) throw DuplicateIdError("duplicate body id \"" + ids[i] + "\"");

  Scene scene;
  scene.ids = std::move(ids);
  scene.bodies = std::move(bodies);
  const std::size_t n = scene.bodies.size();

  scene.bounds.reserve(n);
  for (const Body& b : scene.bodies) scene.bounds.push_back(bounding_sphere(b.shape));

  double diameter = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double far = (i == j) ? 2.0 * scene.bounds[i].radius
                                  : distance(scene.bounds[i].center, scene.bounds[j].center) +
                                        scene.bounds[i].radius + scene.bounds[j].radius;
      diameter = std::max(diameter, far);
    }
  }
  scene.diameter = diameter;
  scene.default_l_max = 1.05 * diameter;

  Ball bound = scene.bounds[0];
  for (std::size_t k = 1; k < n; ++k) bound = merge_balls(bound, scene.bounds[k]);
  scene.bounding = bound;

  scene.measures.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < known.size() && known[k]) {
      scene.measures.push_back(*known[k]);
    } else {
      scene.measures.push_back(measure(scene.bodies[k], RandomStream(kMeasureSeed, k)));
    }
    scene.v_union += scene.measures[k].volume;
    scene.s_union += scene.measures[k].surface;
    scene.m_union += scene.measures[k].mass;
  }

  scene.pair_status.assign(n * n, PairStatus::Identical);
  const double tol = 1e-9 * diameter;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const PairStatus st =
          classify_pair(scene.bodies[i], scene.bodies[j], scene.bounds[i], scene.bounds[j],
                        tol, RandomStream(kClassifySeed, i * n + j));
      scene.pair_status[i * n + j] = st;
      scene.pair_status[j * n + i] = st;
    }
  }
  return scene;
}

Scene build_scene(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  std::vector<std::string> ids;
  std::vector<Body> bodies;
  try {
    if (!doc.is_object() || !doc.contains("bodies"))
      throw ParseError("top-level object with a \"bodies\" array required");
    const json& arr = doc.at("bodies");
    if (!arr.is_array() || arr.empty())
      throw ParseError("\"bodies\" must be a non-empty array");
    for (const json& jb : arr) {
      if (!jb.is_object() || !jb.contains("id")) throw ParseError("body missing \"id\"");
      ids.push_back(jb.at("id").get<std::string>());
      bodies.push_back(parse_body(jb));
    }
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  return assemble_scene(std::move(ids), std::move(bodies));
}

Scene build_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scene file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return build_scene(buf.str());
}

Scene decompose_overlaps(const Scene& scene) {
  if (scene.all_disjoint()) return scene;
  if (scene.size() != 2)
    throw UnsupportedOverlapChainError(
        "overlap decomposition supports exactly two overlapping bodies");
  if (!scene.all_unit_density())
    throw UnsupportedGeometryError("overlap decomposition requires unit densities");

  const Shape& a = scene.bodies[0].shape;
  const Shape& b = scene.bodies[1].shape;
  std::vector<std::string> ids{scene.ids[0] + "_only", scene.ids[1] + "_only",
                               scene.ids[0] + "_" + scene.ids[1] + "_cap"};
  std::vector<Body> bodies{{make_csg(CsgOp::Subtract, a, b), DensityField::constant(1.0)},
                           {make_csg(CsgOp::Subtract, b, a), DensityField::constant(1.0)},
                           {make_csg(CsgOp::Intersect, a, b), DensityField::constant(1.0)}};
  return assemble_scene(std::move(ids), std::move(bodies));
}

std::size_t pick_body(const Scene& scene, RandomStream& rng) {
  const std::size_t n = scene.size();
  const double u = rng.uniform() * scene.v_union;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    acc += scene.measures[k].volume;
    if (u < acc) return k;
  }
  return n - 1;
}

}  // namespace chordix
