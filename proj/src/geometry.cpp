#include "chordix/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace chordix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGrazeDisc = 1e-12;

bool sphere_contains(const Sphere& s, Vec3 p) { return norm2(p - s.center) < s.radius * s.radius; }

bool box_contains(const AxisBox& b, Vec3 p) {
  return p.x > b.lo.x && p.x < b.hi.x && p.y > b.lo.y && p.y < b.hi.y && p.z > b.lo.z &&
         p.z < b.hi.z;
}

IntervalList sphere_line(const Sphere& s, Vec3 o, Vec3 d) {
  const Vec3 oc = o - s.center;
  const double b = dot(oc, d);
  const double c0 = norm2(oc) - s.radius * s.radius;
  const double disc = b * b - c0;
  if (disc < kGrazeDisc) return {};
  const double sq = std::sqrt(disc);
  // Stable quadratic: compute the root far from cancellation first.
  const double q = -(b + std::copysign(sq, b));
  double t0 = q;
  double t1 = (q != 0.0) ? c0 / q : -b + sq;
  if (t0 > t1) std::swap(t0, t1);
  return {{t0, t1}};
}

IntervalList box_line(const AxisBox& bx, Vec3 o, Vec3 d) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  const double olist[3] = {o.x, o.y, o.z};
  const double dlist[3] = {d.x, d.y, d.z};
  const double lolist[3] = {bx.lo.x, bx.lo.y, bx.lo.z};
  const double hilist[3] = {bx.hi.x, bx.hi.y, bx.hi.z};
  for (int k = 0; k < 3; ++k) {
    if (std::fabs(dlist[k]) < 1e-300) {
      if (olist[k] <= lolist[k] || olist[k] >= hilist[k]) return {};
      continue;
    }
    double t0 = (lolist[k] - olist[k]) / dlist[k];
    double t1 = (hilist[k] - olist[k]) / dlist[k];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
  }
  if (tmax - tmin <= 1e-12) return {};
  return {{tmin, tmax}};
}

BoolOp to_bool_op(CsgOp op) {
  switch (op) {
    case CsgOp::Union: return BoolOp::Union;
    case CsgOp::Intersect: return BoolOp::Intersect;
    case CsgOp::Subtract: return BoolOp::Subtract;
  }
  return BoolOp::Union;
}

AxisBox box_hull(const AxisBox& a, const AxisBox& b) {
  return {{std::min(a.lo.x, b.lo.x), std::min(a.lo.y, b.lo.y), std::min(a.lo.z, b.lo.z)},
          {std::max(a.hi.x, b.hi.x), std::max(a.hi.y, b.hi.y), std::max(a.hi.z, b.hi.z)}};
}

AxisBox box_meet(const AxisBox& a, const AxisBox& b) {
  return {{std::max(a.lo.x, b.lo.x), std::max(a.lo.y, b.lo.y), std::max(a.lo.z, b.lo.z)},
          {std::min(a.hi.x, b.hi.x), std::min(a.hi.y, b.hi.y), std::min(a.hi.z, b.hi.z)}};
}

bool box_empty(const AxisBox& b) {
  return b.hi.x <= b.lo.x || b.hi.y <= b.lo.y || b.hi.z <= b.lo.z;
}

double box_volume(const AxisBox& b) {
  if (box_empty(b)) return 0.0;
  return (b.hi.x - b.lo.x) * (b.hi.y - b.lo.y) * (b.hi.z - b.lo.z);
}

}  // namespace

bool contains(const Shape& shape, Vec3 p) {
  if (const auto* s = std::get_if<Sphere>(&shape)) return sphere_contains(*s, p);
  if (const auto* b = std::get_if<AxisBox>(&shape)) return box_contains(*b, p);
  const auto& c = std::get<Csg>(shape);
  const bool in_l = contains(*c.left, p);
  switch (c.op) {
    case CsgOp::Union: return in_l || contains(*c.right, p);
    case CsgOp::Intersect: return in_l && contains(*c.right, p);
    case CsgOp::Subtract: return in_l && !contains(*c.right, p);
  }
  return false;
}

IntervalList line_intervals(const Shape& shape, Vec3 origin, Vec3 dir) {
  if (const auto* s = std::get_if<Sphere>(&shape)) return sphere_line(*s, origin, dir);
  if (const auto* b = std::get_if<AxisBox>(&shape)) return box_line(*b, origin, dir);
  const auto& c = std::get<Csg>(shape);
  return interval_bool(line_intervals(*c.left, origin, dir),
                       line_intervals(*c.right, origin, dir), to_bool_op(c.op));
}

IntervalList ray_intervals(const Shape& shape, Vec3 origin, Vec3 dir) {
  return clip_to_ray(line_intervals(shape, origin, dir));
}

AxisBox bounding_box(const Shape& shape) {
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    const Vec3 r{s->radius, s->radius, s->radius};
    return {s->center - r, s->center + r};
  }
  if (const auto* b = std::get_if<AxisBox>(&shape)) return *b;
  const auto& c = std::get<Csg>(shape);
  const AxisBox lb = bounding_box(*c.left);
  switch (c.op) {
    case CsgOp::Union: return box_hull(lb, bounding_box(*c.right));
    case CsgOp::Intersect: return box_meet(lb, bounding_box(*c.right));
    case CsgOp::Subtract: return lb;
  }
  return lb;
}

Ball merge_balls(const Ball& a, const Ball& b) {
  const double d = distance(a.center, b.center);
  if (d + b.radius <= a.radius) return a;
  if (d + a.radius <= b.radius) return b;
  const double r = 0.5 * (d + a.radius + b.radius);
  if (d < 1e-300) return {a.center, r};
  const double t = (r - a.radius) / d;
  return {a.center + t * (b.center - a.center), r};
}

Ball bounding_sphere(const Shape& shape) {
  if (const auto* s = std::get_if<Sphere>(&shape)) return {s->center, s->radius};
  if (const auto* b = std::get_if<AxisBox>(&shape)) {
    const Vec3 c = 0.5 * (b->lo + b->hi);
    return {c, distance(c, b->hi)};
  }
  const auto& c = std::get<Csg>(shape);
  const Ball lb = bounding_sphere(*c.left);
  switch (c.op) {
    case CsgOp::Union: return merge_balls(lb, bounding_sphere(*c.right));
    case CsgOp::Intersect: {
      const Ball rb = bounding_sphere(*c.right);
      return lb.radius <= rb.radius ? lb : rb;
    }
    case CsgOp::Subtract: return lb;
  }
  return lb;
}

std::pair<double, double> cauchy_surface(const Shape& shape, RandomStream rng,
                                         std::uint64_t n_lines) {
  const Ball bs = bounding_sphere(shape);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_lines; ++i) {
    const Vec3 dir = rng.unit_vector();
    Vec3 e1, e2;
    orthonormal_frame(dir, e1, e2);
    double a, b;
    rng.disk_point(bs.radius, a, b);
    const Vec3 o = bs.center + a * e1 + b * e2;
    if (!line_intervals(shape, o, dir).empty()) ++hits;
  }
  const double n = static_cast<double>(n_lines);
  const double f = static_cast<double>(hits) / n;
  const double disk = kPi * bs.radius * bs.radius;
  return {4.0 * f * disk, 4.0 * disk * std::sqrt(std::max(0.0, f * (1.0 - f) / n))};
}

Vec3 sample_point(const Shape& shape, RandomStream& rng) {
  const AxisBox bb = bounding_box(shape);
  if (box_empty(bb)) throw RejectionOverflowError("sample_point: empty bounding box");
  for (std::uint64_t attempt = 0; attempt < 1000000; ++attempt) {
    const Vec3 p{rng.uniform(bb.lo.x, bb.hi.x), rng.uniform(bb.lo.y, bb.hi.y),
                 rng.uniform(bb.lo.z, bb.hi.z)};
    if (contains(shape, p)) return p;
  }
  throw RejectionOverflowError("sample_point: 1e6 consecutive rejections");
}

namespace {

/// Sphere-centered radial-linear mass with inactive clamp:
/// 4 pi integral (a + b r) r^2 dr = (4 pi / 3) a R^3 + pi b R^4.
bool analytic_radial_mass(const Sphere& s, const DensityField& d, double& mass) {
  if (distance(d.center, s.center) > 1e-12 * std::max(1.0, s.radius)) return false;
  if (d.a < 0.0 || d.a + d.b * s.radius < 0.0) return false;
  const double r = s.radius;
  mass = (4.0 * kPi / 3.0) * d.a * r * r * r + kPi * d.b * r * r * r * r;
  return true;
}

}  // namespace

Measures measure(const Body& body, RandomStream rng, std::uint64_t mc_points) {
  Measures m;
  const Shape& shape = body.shape;
  bool analytic_vs = false;
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    m.volume = (4.0 * kPi / 3.0) * s->radius * s->radius * s->radius;
    m.surface = 4.0 * kPi * s->radius * s->radius;
    analytic_vs = true;
  } else if (const auto* b = std::get_if<AxisBox>(&shape)) {
    const Vec3 e = b->hi - b->lo;
    if (e.x <= 0.0 || e.y <= 0.0 || e.z <= 0.0) throw EmptyBodyError("degenerate box");
    m.volume = e.x * e.y * e.z;
    m.surface = 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
    analytic_vs = true;
  }

  bool need_mass_mc = false;
  if (body.density.type == DensityField::Type::Constant) {
    // mass = value * volume once the volume is known.
  } else if (const auto* s = std::get_if<Sphere>(&shape)) {
    if (!analytic_radial_mass(*s, body.density, m.mass)) need_mass_mc = true;
  } else {
    need_mass_mc = true;
  }

  if (!analytic_vs || need_mass_mc) {
    const AxisBox bb = bounding_box(shape);
    const double vb = box_volume(bb);
    if (vb <= 0.0) throw EmptyBodyError("empty bounding box");
    RandomStream pts = rng.substream(1);
    std::uint64_t hits = 0;
    double rho_sum = 0.0;
    double rho_sumsq = 0.0;
    for (std::uint64_t i = 0; i < mc_points; ++i) {
      const Vec3 p{pts.uniform(bb.lo.x, bb.hi.x), pts.uniform(bb.lo.y, bb.hi.y),
                   pts.uniform(bb.lo.z, bb.hi.z)};
      if (!contains(shape, p)) continue;
      ++hits;
      if (need_mass_mc) {
        const double r = body.density.rho(p);
        rho_sum += r;
        rho_sumsq += r * r;
      }
    }
    const double n = static_cast<double>(mc_points);
    const double frac = static_cast<double>(hits) / n;
    if (!analytic_vs) {
      m.volume = vb * frac;
      m.volume_stderr = vb * std::sqrt(std::max(0.0, frac * (1.0 - frac) / n));
      if (m.volume < 3.0 * m.volume_stderr || hits == 0)
        throw EmptyBodyError("volume estimate below 3 sigma");
    }
    if (need_mass_mc) {
      const double mean = rho_sum / n;
      const double var = std::max(0.0, rho_sumsq / n - mean * mean);
      m.mass = vb * mean;
      m.mass_stderr = vb * std::sqrt(var / n);
    }
  }

  if (!analytic_vs) {
    const auto [s, se] = cauchy_surface(shape, rng.substream(2), mc_points);
    m.surface = s;
    m.surface_stderr = se;
  }

  if (body.density.type == DensityField::Type::Constant) {
    m.mass = body.density.value * m.volume;
    m.mass_stderr = body.density.value * m.volume_stderr;
  }
  return m;
}

}  // namespace chordix
