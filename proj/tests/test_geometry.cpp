#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chordix/geometry.hpp"
#include "chordix/intervals.hpp"
#include "chordix/rng.hpp"

using namespace chordix;

namespace {

constexpr double kPi = std::numbers::pi;

Shape two_bead_csg() {
  // Two unit spheres threaded on the x axis; a ray from the origin along +x
  // crosses them at [2,4] and [5,7].
  return make_csg(CsgOp::Union, Sphere{{3.0, 0.0, 0.0}, 1.0}, Sphere{{6.0, 0.0, 0.0}, 1.0});
}

}  // namespace

TEST_CASE("interval boolean: union merges touching spans") {
  const auto u = interval_bool({{0.0, 1.0}}, {{1.0, 2.0}}, BoolOp::Union);
  REQUIRE(u.size() == 1);
  CHECK(u[0].lo == doctest::Approx(0.0));
  CHECK(u[0].hi == doctest::Approx(2.0));
}

TEST_CASE("interval boolean: intersect and subtract") {
  const IntervalList a{{0.0, 4.0}};
  const IntervalList b{{1.0, 2.0}, {3.0, 5.0}};
  const auto i = interval_bool(a, b, BoolOp::Intersect);
  REQUIRE(i.size() == 2);
  CHECK(i[0].lo == doctest::Approx(1.0));
  CHECK(i[0].hi == doctest::Approx(2.0));
  CHECK(i[1].lo == doctest::Approx(3.0));
  CHECK(i[1].hi == doctest::Approx(4.0));

  const auto s = interval_bool(a, b, BoolOp::Subtract);
  REQUIRE(s.size() == 2);
  CHECK(s[0].lo == doctest::Approx(0.0));
  CHECK(s[0].hi == doctest::Approx(1.0));
  CHECK(s[1].lo == doctest::Approx(2.0));
  CHECK(s[1].hi == doctest::Approx(3.0));
}

TEST_CASE("sphere chords: through-center, offset, grazing, miss") {
  const Sphere s{{0.0, 0.0, 0.0}, 1.0};
  auto hit = line_intervals(Shape{s}, {-5.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].length() == doctest::Approx(2.0));

  const double b = 0.6;
  hit = line_intervals(Shape{s}, {-5.0, b, 0.0}, {1.0, 0.0, 0.0});
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].length() == doctest::Approx(2.0 * std::sqrt(1.0 - b * b)));

  CHECK(line_intervals(Shape{s}, {-5.0, 1.0 + 1e-9, 0.0}, {1.0, 0.0, 0.0}).empty());
  CHECK(line_intervals(Shape{s}, {-5.0, 2.0, 0.0}, {1.0, 0.0, 0.0}).empty());
}

TEST_CASE("ray through a two-bead union") {
  const Shape beads = two_bead_csg();
  const auto ivs = ray_intervals(beads, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  REQUIRE(ivs.size() == 2);
  CHECK(ivs[0].lo == doctest::Approx(2.0));
  CHECK(ivs[0].hi == doctest::Approx(4.0));
  CHECK(ivs[1].lo == doctest::Approx(5.0));
  CHECK(ivs[1].hi == doctest::Approx(7.0));
}

TEST_CASE("ray from an interior origin starts exactly at zero") {
  const Sphere s{{0.0, 0.0, 0.0}, 1.0};
  const auto ivs = ray_intervals(Shape{s}, {0.2, 0.1, 0.0}, {0.0, 1.0, 0.0});
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].lo == 0.0);  // clamped, not merely small
  CHECK(ivs[0].hi > 0.5);
}

TEST_CASE("box chords, straight and diagonal") {
  const AxisBox b{{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}};
  auto ivs = line_intervals(Shape{b}, {0.5, 1.0, -4.0}, {0.0, 0.0, 1.0});
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].length() == doctest::Approx(3.0));

  const Vec3 d = normalized({1.0, 2.0, 3.0});
  ivs = line_intervals(Shape{b}, {-1.0 * d.x, -1.0 * d.y, -1.0 * d.z}, d);
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].length() == doctest::Approx(std::sqrt(14.0)));
}

TEST_CASE("spherical shell: line through the center crosses twice") {
  const Shape shell = make_csg(CsgOp::Subtract, Sphere{{0.0, 0.0, 0.0}, 1.0},
                               Sphere{{0.0, 0.0, 0.0}, 0.6});
  const auto ivs = line_intervals(shell, {-5.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  REQUIRE(ivs.size() == 2);
  CHECK(ivs[0].length() == doctest::Approx(0.4));
  CHECK(ivs[1].length() == doctest::Approx(0.4));
}

TEST_CASE("line intervals agree with membership tests along the line") {
  const Shape shape = make_csg(
      CsgOp::Subtract,
      make_csg(CsgOp::Union, Sphere{{0.0, 0.0, 0.0}, 1.0}, AxisBox{{0.5, -0.4, -0.4}, {2.0, 0.4, 0.4}}),
      Sphere{{0.8, 0.0, 0.0}, 0.3});
  RandomStream rng(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 dir = rng.unit_vector();
    const Vec3 origin{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    const auto ivs = line_intervals(shape, origin, dir);
    for (double t = -4.0; t <= 4.0; t += 0.037) {
      const Vec3 p = origin + t * dir;
      bool in_interval = false;
      for (const Interval& iv : ivs) in_interval = in_interval || (t > iv.lo && t < iv.hi);
      // Skip points hugging a boundary; the scan step is arbitrary.
      bool near_edge = false;
      for (const Interval& iv : ivs)
        near_edge = near_edge || std::abs(t - iv.lo) < 1e-6 || std::abs(t - iv.hi) < 1e-6;
      if (!near_edge) CHECK(in_interval == contains(shape, p));
    }
  }
}

TEST_CASE("bounding sphere covers sampled points") {
  const Shape shape = two_bead_csg();
  const Ball bound = bounding_sphere(shape);
  RandomStream rng(11, 0);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 p = sample_point(shape, rng);
    CHECK(distance(p, bound.center) <= bound.radius + 1e-9);
  }
}

TEST_CASE("sample_point is uniform enough to recover the centroid") {
  const Sphere s{{2.0, -1.0, 0.5}, 1.5};
  RandomStream rng(13, 0);
  Vec3 mean{0.0, 0.0, 0.0};
  const int n = 20000;
  for (int k = 0; k < n; ++k) mean = mean + sample_point(Shape{s}, rng);
  mean = (1.0 / n) * mean;
  // stderr of each coordinate is r/sqrt(5 n) ~ 0.005
  CHECK(std::abs(mean.x - 2.0) < 0.02);
  CHECK(std::abs(mean.y + 1.0) < 0.02);
  CHECK(std::abs(mean.z - 0.5) < 0.02);
}

TEST_CASE("sample_point refuses an empty intersection") {
  const Shape empty = make_csg(CsgOp::Intersect, Sphere{{0.0, 0.0, 0.0}, 1.0},
                               Sphere{{5.0, 0.0, 0.0}, 1.0});
  RandomStream rng(17, 0);
  CHECK_THROWS_AS(sample_point(empty, rng), RejectionOverflowError);
}

TEST_CASE("measure: analytic sphere and box") {
  const Body ball{Sphere{{0.0, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)};
  const Measures m = measure(ball, RandomStream(1, 0));
  CHECK(m.volume == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(m.surface == doctest::Approx(4.0 * kPi));
  CHECK(m.mass == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(m.volume_stderr == 0.0);

  const Body brick{AxisBox{{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}}, DensityField::constant(2.0)};
  const Measures mb = measure(brick, RandomStream(1, 0));
  CHECK(mb.volume == doctest::Approx(6.0));
  CHECK(mb.surface == doctest::Approx(22.0));
  CHECK(mb.mass == doctest::Approx(12.0));
}

TEST_CASE("measure: radial-linear mass over a ball") {
  // rho = a + b r integrates to 4 pi (a R^3 / 3 + b R^4 / 4).
  const double a = 0.7, b = 0.4, R = 1.3;
  const Body body{Sphere{{1.0, 2.0, 3.0}, R},
                  DensityField::radial_linear({1.0, 2.0, 3.0}, a, b)};
  const Measures m = measure(body, RandomStream(1, 0));
  const double expected = (4.0 * kPi / 3.0) * a * R * R * R + kPi * b * R * R * R * R;
  CHECK(m.mass == doctest::Approx(expected).epsilon(1e-9));
  CHECK(m.mass_stderr == 0.0);
}

TEST_CASE("measure: Monte Carlo volume of a spherical shell") {
  const Shape shell = make_csg(CsgOp::Subtract, Sphere{{0.0, 0.0, 0.0}, 1.0},
                               Sphere{{0.0, 0.0, 0.0}, 0.6});
  const Body body{shell, DensityField::constant(1.0)};
  const Measures m = measure(body, RandomStream(5, 0));
  const double expected = (4.0 * kPi / 3.0) * (1.0 - 0.216);
  CHECK(m.volume_stderr > 0.0);
  CHECK(std::abs(m.volume - expected) < 4.0 * m.volume_stderr);
}

TEST_CASE("measure: degenerate and empty bodies are refused") {
  const Body flat{AxisBox{{0.0, 0.0, 0.0}, {1.0, 0.0, 1.0}}, DensityField::constant(1.0)};
  CHECK_THROWS_AS(measure(flat, RandomStream(1, 0)), EmptyBodyError);

  const Shape nothing = make_csg(CsgOp::Intersect, Sphere{{0.0, 0.0, 0.0}, 1.0},
                                 Sphere{{5.0, 0.0, 0.0}, 1.0});
  const Body empty{nothing, DensityField::constant(1.0)};
  CHECK_THROWS_AS(measure(empty, RandomStream(1, 0)), EmptyBodyError);
}

TEST_CASE("cauchy_surface recovers a unit sphere to a percent") {
  // Every line through the bounding disk hits the sphere itself, so the
  // estimate is exact and the error bar collapses to zero.
  const auto [s, se] = cauchy_surface(Shape{Sphere{{0.0, 0.0, 0.0}, 1.0}},
                                      RandomStream(23, 0), 1000000);
  CHECK(std::abs(s - 4.0 * kPi) / (4.0 * kPi) < 1e-12);
  CHECK(se == 0.0);
}

TEST_CASE("cauchy_surface recovers a box surface to a percent") {
  const auto [s, se] = cauchy_surface(
      Shape{AxisBox{{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}}}, RandomStream(29, 0), 1000000);
  const double exact = 22.0;
  CHECK(std::abs(s - exact) / exact < 0.01);
  CHECK(se > 0.0);
  CHECK(std::abs(s - exact) < 4.0 * se);
}
