#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chordix/scene.hpp"
#include "chordix/transfer.hpp"

using namespace chordix;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBallV = 4.0 * kPi / 3.0;

Scene two_far_spheres() {
  return assemble_scene({"a", "b"},
                        {Body{Sphere{{0.0, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)},
                         Body{Sphere{{3.0, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)}});
}

Scene one_sphere() {
  return assemble_scene({"s"},
                        {Body{Sphere{{0.0, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)}});
}

EstimatorOptions mc_opts(std::uint64_t samples) {
  EstimatorOptions opt;
  opt.samples = samples;
  opt.bins = 200;
  return opt;
}

}  // namespace

TEST_CASE("route names round-trip") {
  for (Route r : {Route::Direct, Route::Eta, Route::Gamma, Route::Radii, Route::Chords,
                  Route::Lambda})
    CHECK(parse_route(to_string(r)) == r);
  CHECK_THROWS_AS(parse_route("teleport"), ParseError);
}

TEST_CASE("constant kernel on a single ball: quadrature gives pi") {
  const Scene s = one_sphere();
  const Kernel constk{Kernel::Type::Const, 1.0};
  const TransferResult t = transfer_via_gamma(s, 0, 0, constk);
  CHECK(t.value == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("chord route agrees with quadrature on the singular diagonal") {
  const Scene s = one_sphere();
  const Kernel constk{Kernel::Type::Const, 1.0};
  const TransferResult mc =
      transfer_via_chords(s, 0, 0, constk, mc_opts(400000), RandomStream(3, 0));
  CHECK(std::abs(mc.value - kPi) < 3.0 * mc.std_err + 0.01 * kPi);
  // while the direct route must refuse it outright
  CHECK_THROWS_AS(
      transfer_direct(s, 0, 0, constk, mc_opts(1000), RandomStream(3, 0)),
      SingularDiagonalError);
  CHECK_THROWS_AS(
      transfer_direct(s, 0, 0, Kernel{Kernel::Type::Exp, 1.0}, mc_opts(1000),
                      RandomStream(3, 0)),
      SingularDiagonalError);
}

TEST_CASE("ball kernel: every route returns the volume product") {
  const Scene s = two_far_spheres();
  const Kernel ball{Kernel::Type::Ball, 1.0};
  const double expected = kBallV * kBallV;
  const auto results = transfer_all_routes(s, 0, 1, ball, mc_opts(500000), RandomStream(5, 0));
  REQUIRE(results.size() == 6);
  for (const TransferResult& t : results) {
    INFO(to_string(t.route));
    CHECK(t.warning.empty());
    const double tol = t.route == Route::Gamma ? 1e-6 * expected : 0.01 * expected;
    CHECK(std::abs(t.value - expected) < tol);
  }
}

TEST_CASE("exp kernel: Monte Carlo routes track the quadrature reference") {
  const Scene s = two_far_spheres();
  const Kernel expk{Kernel::Type::Exp, 1.0};
  const double ref = transfer_via_gamma(s, 0, 1, expk).value;
  const auto results = transfer_all_routes(s, 0, 1, expk, mc_opts(500000), RandomStream(7, 0));
  for (const TransferResult& t : results) {
    if (t.route == Route::Gamma) {
      CHECK(t.value == doctest::Approx(ref).epsilon(1e-9));
      continue;
    }
    INFO(to_string(t.route));
    CHECK(std::abs(t.value - ref) < 3.0 * t.std_err + 0.01 * std::abs(ref));
    if (t.has_alt)
      CHECK(std::abs(t.alt_value - ref) < 3.0 * t.alt_std_err + 0.01 * std::abs(ref));
  }
}

TEST_CASE("lambda route is the chord histogram functional in disguise") {
  const Scene s = two_far_spheres();
  const Kernel expk{Kernel::Type::Exp, 1.0};
  const auto results = transfer_all_routes(s, 0, 1, expk, mc_opts(200000), RandomStream(9, 0));
  const TransferResult* chords = nullptr;
  const TransferResult* lambda = nullptr;
  for (const TransferResult& t : results) {
    if (t.route == Route::Chords) chords = &t;
    if (t.route == Route::Lambda) lambda = &t;
  }
  REQUIRE(chords != nullptr);
  REQUIRE(lambda != nullptr);
  REQUIRE(chords->has_alt);
  // same run, same bins, algebraically identical weights
  CHECK(lambda->value == doctest::Approx(chords->alt_value).epsilon(1e-9));
}

TEST_CASE("gamma route wants spheres") {
  const Scene s = assemble_scene(
      {"a", "b"}, {Body{Sphere{{0.0, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)},
                   Body{AxisBox{{2.5, -0.5, -0.5}, {3.5, 0.5, 0.5}}, DensityField::constant(1.0)}});
  CHECK_THROWS_AS(transfer_via_gamma(s, 0, 1, Kernel{Kernel::Type::Ball, 1.0}),
                  UnsupportedGeometryError);
}

TEST_CASE("an empty eta histogram yields a warning, not a value") {
  const Scene s = two_far_spheres();
  MatrixDensity empty(HistKind::Eta, 2, 50, s.default_l_max);
  const TransferResult t =
      transfer_via_eta(s, 0, 1, Kernel{Kernel::Type::Ball, 1.0}, empty);
  CHECK_FALSE(t.warning.empty());
  CHECK(std::isnan(t.value));
}

TEST_CASE("overlapping scenes: line routes bow out with warnings") {
  const Scene overlap = assemble_scene(
      {"a", "b"}, {Body{Sphere{{0.0, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)},
                   Body{Sphere{{1.0, 0.0, 0.0}, 1.0}, DensityField::constant(1.0)}});
  const Kernel ball{Kernel::Type::Ball, 1.0};
  const auto results =
      transfer_all_routes(overlap, 0, 1, ball, mc_opts(200000), RandomStream(11, 0));
  int warned = 0;
  for (const TransferResult& t : results) {
    if (t.route == Route::Radii || t.route == Route::Chords || t.route == Route::Lambda) {
      CHECK_FALSE(t.warning.empty());
      CHECK(std::isnan(t.value));
      ++warned;
    }
    if (t.route == Route::Direct) {
      // overlap shrinks nothing here: direct sampling is still exact in mean
      CHECK(std::abs(t.value - kBallV * kBallV) < 4.0 * t.std_err);
    }
  }
  CHECK(warned == 3);
}

TEST_CASE("weighted transfer reduces exactly to direct at unit density") {
  const Scene s = two_far_spheres();
  const Kernel expk{Kernel::Type::Exp, 1.0};
  const auto opt = mc_opts(200000);
  const RandomStream rng(13, 0);
  const TransferResult direct = transfer_direct(s, 0, 1, expk, opt, rng);
  const NonuniformResult weighted = transfer_nonuniform(s, 0, 1, expk, opt, rng);
  CHECK(weighted.transfer.value == direct.value);
  CHECK(weighted.transfer.std_err == direct.std_err);
}

TEST_CASE("nonuniform ball transfer recovers the mass product") {
  const Scene s = assemble_scene(
      {"a", "b"},
      {Body{Sphere{{0.0, 0.0, 0.0}, 1.0}, DensityField::radial_linear({0.0, 0.0, 0.0}, 1.0, 0.5)},
       Body{Sphere{{3.0, 0.0, 0.0}, 1.0}, DensityField::radial_linear({3.0, 0.0, 0.0}, 0.5, 1.0)}});
  const Kernel ball{Kernel::Type::Ball, 1.0};
  const NonuniformResult r =
      transfer_nonuniform(s, 0, 1, ball, mc_opts(500000), RandomStream(17, 0));
  const double m1 = s.measures[0].mass, m2 = s.measures[1].mass;
  CHECK(std::abs(r.transfer.value - m1 * m2) < 3.0 * r.transfer.std_err);
  CHECK(r.c_lambda == doctest::Approx(3.0 * r.transfer.value / kPi));
}
