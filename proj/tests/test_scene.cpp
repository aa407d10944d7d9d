#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chordix/rng.hpp"
#include "chordix/scene.hpp"

using namespace chordix;

namespace {

constexpr double kPi = std::numbers::pi;

Body unit_sphere(double x) {
  return Body{Sphere{{x, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)};
}

}  // namespace

TEST_CASE("scene json happy path") {
  const char* text = R"({
    "bodies": [
      {"id": "a", "shape": {"type": "sphere", "center": [0, 0, 0], "radius": 1.0}},
      {"id": "b", "shape": {"type": "box", "min": [2, -1, -1], "max": [4, 1, 1]},
       "density": {"type": "constant", "value": 2.0}}
    ]
  })";
  const Scene s = build_scene(text);
  REQUIRE(s.size() == 2);
  CHECK(s.ids[0] == "a");
  CHECK(s.measures[0].volume == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(s.measures[1].volume == doctest::Approx(8.0));
  CHECK(s.measures[1].mass == doctest::Approx(16.0));
  CHECK(s.v_union == doctest::Approx(4.0 * kPi / 3.0 + 8.0));
  CHECK(s.status(0, 1) == PairStatus::Disjoint);
  CHECK(s.all_disjoint());
  // farthest point pair: sphere back (-1) to box corner (4, 1, 1)
  CHECK(s.diameter >= 5.0);
  CHECK(s.default_l_max == doctest::Approx(1.05 * s.diameter));
}

TEST_CASE("scene json rejects malformed input") {
  CHECK_THROWS_AS(build_scene("not json"), ParseError);
  CHECK_THROWS_AS(build_scene("{}"), ParseError);
  CHECK_THROWS_AS(build_scene(R"({"bodies": []})"), ParseError);
  CHECK_THROWS_AS(build_scene(R"({"bodies": [{"id": "a"}]})"), ParseError);
  CHECK_THROWS_AS(
      build_scene(
          R"({"bodies": [{"id": "a", "shape": {"type": "sphere", "center": [0,0], "radius": 1}}]})"),
      ParseError);
  CHECK_THROWS_AS(
      build_scene(
          R"({"bodies": [{"id": "a", "shape": {"type": "sphere", "center": [0,0,0], "radius": -1}}]})"),
      ParseError);
  CHECK_THROWS_AS(
      build_scene(
          R"({"bodies": [{"id": "a", "shape": {"type": "cone", "center": [0,0,0]}}]})"),
      ParseError);
}

TEST_CASE("duplicate ids are refused") {
  CHECK_THROWS_AS(assemble_scene({"a", "a"}, {unit_sphere(0.0), unit_sphere(3.0)}),
                  DuplicateIdError);
}

TEST_CASE("pair classification for spheres") {
  const Scene far = assemble_scene({"a", "b"}, {unit_sphere(0.0), unit_sphere(3.0)});
  CHECK(far.status(0, 1) == PairStatus::Disjoint);
  CHECK(far.status(0, 0) == PairStatus::Identical);

  const Scene close = assemble_scene({"a", "b"}, {unit_sphere(0.0), unit_sphere(1.0)});
  CHECK(close.status(0, 1) == PairStatus::Overlapping);
  CHECK_FALSE(close.all_disjoint());

  const Scene same = assemble_scene({"a", "b"}, {unit_sphere(0.0), unit_sphere(0.0)});
  CHECK(same.status(0, 1) == PairStatus::Identical);

  CHECK_THROWS_AS(assemble_scene({"a", "b"}, {unit_sphere(0.0), unit_sphere(2.0)}),
                  SharedBoundaryError);
}

TEST_CASE("pair classification for boxes and csg bodies") {
  const Body b1{AxisBox{{0, 0, 0}, {1, 1, 1}}, DensityField::constant(1.0)};
  const Body b2{AxisBox{{2, 0, 0}, {3, 1, 1}}, DensityField::constant(1.0)};
  const Body b3{AxisBox{{0.5, 0.5, 0.5}, {1.5, 1.5, 1.5}}, DensityField::constant(1.0)};
  const Body touch{AxisBox{{1, 0, 0}, {2, 1, 1}}, DensityField::constant(1.0)};
  CHECK(assemble_scene({"a", "b"}, {b1, b2}).status(0, 1) == PairStatus::Disjoint);
  CHECK(assemble_scene({"a", "b"}, {b1, b3}).status(0, 1) == PairStatus::Overlapping);
  CHECK_THROWS_AS(assemble_scene({"a", "b"}, {b1, touch}), SharedBoundaryError);

  // csg vs sphere falls back to sampling
  const Body shell{make_csg(CsgOp::Subtract, Sphere{{0, 0, 0}, 1.0}, Sphere{{0, 0, 0}, 0.6}),
                   DensityField::constant(1.0)};
  const Body inside{Sphere{{0.0, 0.0, 0.0}, 0.4}, DensityField::constant(1.0)};
  const Body piercing{Sphere{{0.9, 0.0, 0.0}, 0.3}, DensityField::constant(1.0)};
  CHECK(assemble_scene({"s", "c"}, {shell, inside}).status(0, 1) == PairStatus::Disjoint);
  CHECK(assemble_scene({"s", "c"}, {shell, piercing}).status(0, 1) ==
        PairStatus::Overlapping);
}

TEST_CASE("pick_body draws proportionally to volume") {
  const Body big{Sphere{{0, 0, 0}, 1.0}, DensityField::constant(1.0)};
  const Body small{Sphere{{4, 0, 0}, 0.5}, DensityField::constant(1.0)};
  const Scene s = assemble_scene({"big", "small"}, {big, small});
  RandomStream rng(3, 0);
  int hits = 0;
  const int n = 40000;
  for (int k = 0; k < n; ++k)
    if (pick_body(s, rng) == 1) ++hits;
  const double p = 0.125 / 1.125;  // volume ratio 1 : 1/8
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(hits) / n - p) < 4.0 * se);
}

TEST_CASE("overlap decomposition splits two spheres into three disjoint parts") {
  const Scene s = assemble_scene({"a", "b"}, {unit_sphere(0.0), unit_sphere(1.0)});
  const Scene d = decompose_overlaps(s);
  REQUIRE(d.size() == 3);
  CHECK(d.ids[0] == "a_only");
  CHECK(d.ids[1] == "b_only");
  CHECK(d.ids[2] == "a_b_cap");
  CHECK(d.all_disjoint());

  const double cap = 5.0 * kPi / 12.0;  // lens of unit spheres one radius apart
  const double v = 4.0 * kPi / 3.0;
  CHECK(std::abs(d.measures[2].volume - cap) < 4.0 * d.measures[2].volume_stderr);
  CHECK(std::abs(d.measures[0].volume - (v - cap)) < 4.0 * d.measures[0].volume_stderr);
  const double sum = d.measures[0].volume + d.measures[1].volume + d.measures[2].volume;
  CHECK(sum == doctest::Approx(2.0 * v - cap).epsilon(0.01));

  // disjoint input passes through untouched
  const Scene far = assemble_scene({"a", "b"}, {unit_sphere(0.0), unit_sphere(3.0)});
  CHECK(decompose_overlaps(far).size() == 2);
}

TEST_CASE("overlap decomposition rejects what it cannot split") {
  const Scene same = assemble_scene({"a", "b"}, {unit_sphere(0.0), unit_sphere(0.0)});
  CHECK_THROWS_AS(decompose_overlaps(same), EmptyBodyError);  // a_only is empty

  // b overlaps both neighbours while a and c stay cleanly apart: a genuine
  // three-body overlap chain (centres 0 and 2 would make a and c tangent and
  // trip the shared-boundary check before decomposition even starts).
  const Scene chain = assemble_scene(
      {"a", "b", "c"}, {unit_sphere(0.0), unit_sphere(1.0), unit_sphere(2.2)});
  CHECK_THROWS_AS(decompose_overlaps(chain), UnsupportedOverlapChainError);

  const Body heavy{Sphere{{1.0, 0.0, 0.0}, 1.0}, DensityField::constant(2.0)};
  const Scene weighted = assemble_scene({"a", "b"}, {unit_sphere(0.0), heavy});
  CHECK_THROWS_AS(decompose_overlaps(weighted), UnsupportedGeometryError);
}

TEST_CASE("known measures short-circuit estimation") {
  Measures given;
  given.volume = 123.0;
  given.surface = 45.0;
  given.mass = 99.0;
  const Scene s = assemble_scene({"a"}, {unit_sphere(0.0)}, {given});
  CHECK(s.measures[0].volume == 123.0);
  CHECK(s.v_union == 123.0);
  CHECK(s.s_union == 45.0);
  CHECK(s.m_union == 99.0);
}
