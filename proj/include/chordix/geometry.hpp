#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <variant>

#include "chordix/errors.hpp"
#include "chordix/intervals.hpp"
#include "chordix/rng.hpp"
#include "chordix/vec.hpp"

namespace chordix {

struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

struct AxisBox {
  Vec3 lo;
  Vec3 hi;
};

struct Csg;
using Shape = std::variant<Sphere, AxisBox, Csg>;

enum class CsgOp { Union, Intersect, Subtract };

/// Children are immutable and shared so shapes copy cheaply.
struct Csg {
  CsgOp op = CsgOp::Union;
  std::shared_ptr<const Shape> left;
  std::shared_ptr<const Shape> right;
};

inline Shape make_csg(CsgOp op, Shape left, Shape right) {
  return Csg{op, std::make_shared<const Shape>(std::move(left)),
             std::make_shared<const Shape>(std::move(right))};
}

/// rho(r) = max(0, a + b * |r - center|) for RadialLinear, else a constant.
struct DensityField {
  enum class Type { Constant, RadialLinear };
  Type type = Type::Constant;
  double value = 1.0;
  Vec3 center;
  double a = 0.0;
  double b = 0.0;

  double rho(Vec3 p) const {
    if (type == Type::Constant) return value;
    const double r = distance(p, center);
    const double v = a + b * r;
    return v > 0.0 ? v : 0.0;
  }

  bool is_unit() const { return type == Type::Constant && value == 1.0; }

  static DensityField constant(double v) {
    DensityField d;
    d.type = Type::Constant;
    d.value = v;
    return d;
  }
  static DensityField radial_linear(Vec3 center, double a, double b) {
    DensityField d;
    d.type = Type::RadialLinear;
    d.center = center;
    d.a = a;
    d.b = b;
    return d;
  }
};

struct Body {
  Shape shape;
  DensityField density;
};

struct Ball {
  Vec3 center;
  double radius = 0.0;
};

struct Measures {
  double volume = 0.0;
  double surface = 0.0;
  double mass = 0.0;
  double volume_stderr = 0.0;
  double surface_stderr = 0.0;
  double mass_stderr = 0.0;
};

bool contains(const Shape& shape, Vec3 p);

/// Sorted disjoint t-intervals of the full line origin + t * dir inside the
/// shape.  dir must be unit length.  Grazing hits (sphere discriminant below
/// 1e-12) count as misses.
IntervalList line_intervals(const Shape& shape, Vec3 origin, Vec3 dir);

/// Same, restricted to t >= 0; an interior origin yields a first interval
/// starting exactly at 0.
IntervalList ray_intervals(const Shape& shape, Vec3 origin, Vec3 dir);

/// Axis-aligned bound; intersections may come back inverted (empty).
AxisBox bounding_box(const Shape& shape);

/// Bounding ball, exact for primitives, within 2x of the trivial
/// child-merge bound for Csg nodes.
Ball bounding_sphere(const Shape& shape);

Ball merge_balls(const Ball& a, const Ball& b);

/// Uniform point strictly inside the shape, by rejection from its bounding
/// box.  Throws RejectionOverflowError after 1e6 consecutive misses.
Vec3 sample_point(const Shape& shape, RandomStream& rng);

/// Cauchy silhouette surface estimate: 4 * (hit fraction) * disk area over
/// isotropic lines through the bounding sphere.  Returns (value, stderr).
std::pair<double, double> cauchy_surface(const Shape& shape, RandomStream rng,
                                         std::uint64_t n_lines);

/// Volume/surface/mass.  Primitives are analytic (including the
/// sphere-centered radial-linear mass when the clamp is inactive); Csg
/// bodies use point-containment MC for volume and mass and the Cauchy
/// silhouette estimator for surface: S = 4 * (line-hit fraction) * disk
/// area.  The silhouette estimate is exact for convex bodies and a lower
/// bound for nonconvex ones (interior cavity surfaces cast no silhouette).
/// Throws EmptyBodyError when the volume estimate is below 3 sigma.
Measures measure(const Body& body, RandomStream rng, std::uint64_t mc_points = 1000000);

}  // namespace chordix
