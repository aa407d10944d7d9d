#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chordix/geometry.hpp"

namespace chordix {

enum class PairStatus { Disjoint, Overlapping, Identical };

/// Validated collection of bodies.  Immutable after construction; all reads
/// are thread-safe.
struct Scene {
  std::vector<std::string> ids;
  std::vector<Body> bodies;
  std::vector<Measures> measures;
  std::vector<Ball> bounds;               // per-body bounding spheres
  std::vector<PairStatus> pair_status;    // row-major n*n

  double v_union = 0.0;   // sum of body volumes
  double s_union = 0.0;   // sum of body surfaces
  double m_union = 0.0;   // sum of body masses
  Ball bounding{};        // bounding sphere of the whole scene
  double diameter = 0.0;  // max farthest-point distance over body pairs
  double default_l_max = 0.0;

  std::size_t size() const { return bodies.size(); }
  PairStatus status(std::size_t i, std::size_t j) const { return pair_status[i * size() + j]; }
  bool all_disjoint() const;
  bool all_unit_density() const;
};

/// Assemble and validate a scene from bodies.  `known` overrides the Monte
/// Carlo measures for bodies whose exact values the caller can supply (e.g. a
/// union of already-measured disjoint parts, whose surface the silhouette
/// estimator would under-count).
Scene assemble_scene(std::vector<std::string> ids, std::vector<Body> bodies,
                     const std::vector<std::optional<Measures>>& known = {});

/// Parse the JSON scene document and assemble it.
Scene build_scene(const std::string& json_text);
Scene build_scene_file(const std::string& path);

/// Two overlapping bodies become the three disjoint pieces B1 \ B2, B2 \ B1
/// and B1 * B2.  Disjoint scenes pass through unchanged.
Scene decompose_overlaps(const Scene& scene);

/// Index k with probability V_k / V_union.
std::size_t pick_body(const Scene& scene, RandomStream& rng);

}  // namespace chordix
