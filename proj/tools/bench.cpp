// Timing comparison between the OpenMP estimators and the serial reference
// drivers, plus a bit-for-bit audit of every accumulator.  The two paths share
// chunk seeding and merge order, so any difference at all is a bug.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "chordix/estimators.hpp"
#include "chordix/scene.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool same_hist(const chordix::SignedHistogram& a, const chordix::SignedHistogram& b) {
  if (a.bins() != b.bins() || a.n_events() != b.n_events()) return false;
  for (std::size_t k = 0; k < a.bins(); ++k)
    if (a.raw_weight(k) != b.raw_weight(k) || a.raw_sumsq(k) != b.raw_sumsq(k)) return false;
  return a.overflow() == b.overflow();
}

bool same_matrix(const chordix::MatrixDensity& a, const chordix::MatrixDensity& b) {
  if (a.n_bodies() != b.n_bodies()) return false;
  for (std::size_t i = 0; i < a.n_bodies(); ++i)
    for (std::size_t j = i; j < a.n_bodies(); ++j)
      if (!same_hist(a.cell(i, j), b.cell(i, j))) return false;
  return true;
}

bool same_balance(const chordix::EventBalance& a, const chordix::EventBalance& b) {
  if (a.n != b.n) return false;
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; j < a.n; ++j)
      if (a.plus(i, j) != b.plus(i, j) || a.minus(i, j) != b.minus(i, j)) return false;
  return true;
}

struct Row {
  const char* family;
  double serial_s;
  double parallel_s;
  bool identical;
};

template <typename EstimateFn, typename ReferenceFn, typename CompareFn>
Row bench_family(const char* family, EstimateFn est, ReferenceFn ref, CompareFn same) {
  Row row{family, 0.0, 0.0, false};
  auto t0 = Clock::now();
  const auto serial = ref();
  row.serial_s = seconds_since(t0);
  t0 = Clock::now();
  const auto parallel = est();
  row.parallel_s = seconds_since(t0);
  row.identical = same(serial, parallel);
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial-vs-parallel estimator benchmark"};
  std::string scene_path;
  std::uint64_t samples = 2000000;
  std::size_t bins = 200;
  std::uint64_t seed = 42;
  app.add_option("scene", scene_path, "scene description (JSON); default: two unit spheres");
  app.add_option("--samples", samples, "primary events per family");
  app.add_option("--bins", bins, "histogram bins");
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  chordix::Scene scene;
  try {
    if (scene_path.empty()) {
      scene = chordix::assemble_scene(
          {"a", "b"},
          {chordix::Body{chordix::Sphere{{0.0, 0.0, 0.0}, 1.0},
                         chordix::DensityField::constant(1.0)},
           chordix::Body{chordix::Sphere{{3.0, 0.0, 0.0}, 1.0},
                         chordix::DensityField::constant(1.0)}});
    } else {
      scene = chordix::build_scene_file(scene_path);
    }
  } catch (const chordix::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  chordix::EstimatorOptions opt;
  opt.samples = samples;
  opt.bins = bins;

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("samples %llu, bins %zu, seed %llu, %d worker thread(s)\n",
              static_cast<unsigned long long>(samples), bins,
              static_cast<unsigned long long>(seed), threads);

  const chordix::RandomStream rng(seed, 0);
  Row rows[3];

  rows[0] = bench_family(
      "eta", [&] { return chordix::estimate_eta(scene, opt, rng); },
      [&] { return chordix::reference::estimate_eta(scene, opt, rng); },
      [](const chordix::EtaResult& a, const chordix::EtaResult& b) {
        return same_matrix(a.matrix, b.matrix) && same_hist(a.union_hist, b.union_hist) &&
               same_balance(a.balance, b.balance);
      });
  rows[1] = bench_family(
      "radii", [&] { return chordix::estimate_radii(scene, opt, rng); },
      [&] { return chordix::reference::estimate_radii(scene, opt, rng); },
      [](const chordix::RadiiResult& a, const chordix::RadiiResult& b) {
        if (a.ordered.size() != b.ordered.size()) return false;
        for (std::size_t k = 0; k < a.ordered.size(); ++k)
          if (!same_hist(a.ordered[k], b.ordered[k])) return false;
        return same_matrix(a.matrix, b.matrix) && same_hist(a.union_hist, b.union_hist) &&
               same_balance(a.balance, b.balance);
      });
  rows[2] = bench_family(
      "chords", [&] { return chordix::estimate_chords(scene, opt, rng); },
      [&] { return chordix::reference::estimate_chords(scene, opt, rng); },
      [](const chordix::ChordsResult& a, const chordix::ChordsResult& b) {
        return same_matrix(a.matrix, b.matrix) && same_hist(a.union_hist, b.union_hist) &&
               same_balance(a.balance, b.balance) &&
               a.max_quad_residual == b.max_quad_residual;
      });

  std::printf("%-8s %12s %12s %9s %11s  %s\n", "family", "serial_s", "parallel_s",
              "speedup", "events/s", "identical");
  bool all_ok = true;
  for (const Row& r : rows) {
    const double speedup = r.parallel_s > 0.0 ? r.serial_s / r.parallel_s : 0.0;
    const double rate = r.parallel_s > 0.0 ? static_cast<double>(samples) / r.parallel_s : 0.0;
    std::printf("%-8s %12.3f %12.3f %9.2f %11.3g  %s\n", r.family, r.serial_s, r.parallel_s,
                speedup, rate, r.identical ? "yes" : "NO");
    all_ok = all_ok && r.identical;
  }
  if (!all_ok) {
    std::fprintf(stderr, "accumulator mismatch between serial and parallel drivers\n");
    return 1;
  }
  return 0;
}
