#include "chordix/transfer.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

#include "chordix/analytic.hpp"
#include "estimator_core.hpp"

namespace chordix {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_pair(const Scene& scene, std::size_t i, std::size_t j) {
  if (i >= scene.size() || j >= scene.size())
    throw ParseError("body index out of range");
}

/// Mean and standard error of the per-event streaming sums.
void fill_scalar(TransferResult& t, double sum, double sumsq, std::uint64_t n) {
  const double dn = static_cast<double>(n);
  t.value = sum / dn;
  t.std_err = std::sqrt(std::max(0.0, sumsq - sum * sum / dn)) / dn;
  t.n_samples = n;
}

/// Bin sum of density * g(center) * width with propagated error bars.
template <typename F>
std::pair<double, double> hist_functional(const SignedHistogram& h, std::size_t skip, F g) {
  double sum = 0.0;
  double var = 0.0;
  for (std::size_t b = skip; b < h.bins(); ++b) {
    const double gw = g(h.bin_center(b)) * h.bin_width();
    sum += h.density(b) * gw;
    const double se = h.density_stderr(b) * gw;
    var += se * se;
  }
  return {sum, std::sqrt(var)};
}

struct RadiiRun {
  TransferResult result;
  RadiiResult estimate;
};

RadiiRun run_radii_route(const Scene& scene, std::size_t i, std::size_t j,
                         const Kernel& kernel, const EstimatorOptions& opt,
                         RandomStream rng) {
  const auto t0 = Clock::now();
  check_pair(scene, i, j);
  core::require_disjoint(scene, "the radii route");
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const core::RadiiConfig cfg{&scene, r.bins, r.l_max, {&kernel, i, j}};
  core::RadiiPartial proto(scene.size(), r.bins, r.l_max);
  core::RadiiPartial global = proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&cfg](core::RadiiPartial& p, RandomStream stream, std::uint64_t m) {
                       core::radii_chunk(cfg, p, stream, m);
                     });
  RadiiRun run;
  run.result.route = Route::Radii;
  fill_scalar(run.result, global.tap.sum, global.tap.sumsq, r.samples);
  run.estimate = core::finalize_radii(std::move(global), scene, r.bins, r.l_max, rng.seed());
  const auto [alt, alt_se] = hist_functional(
      run.estimate.matrix.cell(i, j), 0, [&](double x) { return kernel.Phi1(x); });
  run.result.has_alt = true;
  run.result.alt_value = scene.v_union * alt;
  run.result.alt_std_err = scene.v_union * alt_se;
  run.result.wall_seconds = seconds_since(t0);
  return run;
}

struct ChordsRun {
  TransferResult result;
  ChordsResult estimate;
};

ChordsRun run_chords_route(const Scene& scene, std::size_t i, std::size_t j,
                           const Kernel& kernel, const EstimatorOptions& opt,
                           RandomStream rng) {
  const auto t0 = Clock::now();
  check_pair(scene, i, j);
  core::require_disjoint(scene, "the chord route");
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const core::ChordsConfig cfg{&scene, r.bins, r.l_max, {&kernel, i, j}};
  core::ChordsPartial proto(scene.size(), r.bins, r.l_max);
  core::ChordsPartial global = proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&cfg](core::ChordsPartial& p, RandomStream stream, std::uint64_t m) {
                       core::chords_chunk(cfg, p, stream, m);
                     });
  ChordsRun run;
  run.result.route = Route::Chords;
  fill_scalar(run.result, global.tap.sum, global.tap.sumsq, r.samples);
  run.estimate = core::finalize_chords(std::move(global), scene, rng.seed());
  const auto [alt, alt_se] = hist_functional(
      run.estimate.matrix.cell(i, j), 0, [&](double x) { return kernel.Phi2(x); });
  run.result.has_alt = true;
  run.result.alt_value = 0.25 * scene.s_union * alt;
  run.result.alt_std_err = 0.25 * scene.s_union * alt_se;
  run.result.wall_seconds = seconds_since(t0);
  return run;
}

TransferResult unavailable(Route route, const std::string& why) {
  TransferResult t;
  t.route = route;
  t.value = std::numeric_limits<double>::quiet_NaN();
  t.std_err = std::numeric_limits<double>::quiet_NaN();
  t.warning = why;
  return t;
}

}  // namespace

std::string to_string(Route route) {
  switch (route) {
    case Route::Direct: return "direct";
    case Route::Eta: return "eta";
    case Route::Gamma: return "gamma";
    case Route::Radii: return "radii";
    case Route::Chords: return "chords";
    case Route::Lambda: return "lambda";
  }
  return "?";
}

Route parse_route(std::string_view name) {
  if (name == "direct") return Route::Direct;
  if (name == "eta") return Route::Eta;
  if (name == "gamma") return Route::Gamma;
  if (name == "radii") return Route::Radii;
  if (name == "chords") return Route::Chords;
  if (name == "lambda") return Route::Lambda;
  throw ParseError("unknown route \"" + std::string(name) + "\"");
}

std::string Kernel::name() const {
  switch (type) {
    case Type::Ball: return "ball";
    case Type::Const: return "const";
    case Type::Exp: return "exp:sigma=" + fmt9(sigma);
  }
  return "?";
}

Kernel parse_kernel(std::string_view spec) {
  if (spec == "ball") return Kernel{Kernel::Type::Ball, 1.0};
  if (spec == "const") return Kernel{Kernel::Type::Const, 1.0};
  if (spec == "exp") return Kernel{Kernel::Type::Exp, 1.0};
  constexpr std::string_view prefix = "exp:sigma=";
  if (spec.substr(0, prefix.size()) == prefix) {
    const std::string_view num = spec.substr(prefix.size());
    double sigma = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), sigma);
    if (ec != std::errc{} || ptr != num.data() + num.size() || !(sigma > 0.0))
      throw ParseError("bad exp kernel parameter \"" + std::string(num) + "\"");
    return Kernel{Kernel::Type::Exp, sigma};
  }
  throw ParseError("unknown kernel \"" + std::string(spec) + "\"");
}

TransferResult transfer_direct(const Scene& scene, std::size_t i, std::size_t j,
                               const Kernel& kernel, const EstimatorOptions& opt,
                               RandomStream rng) {
  const auto t0 = Clock::now();
  check_pair(scene, i, j);
  if (i == j && kernel.singular_at_zero())
    throw SingularDiagonalError("kernel \"" + kernel.name() +
                                "\" diverges at zero distance; the direct route cannot "
                                "sample a body against itself");
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const Shape& si = scene.bodies[i].shape;
  const Shape& sj = scene.bodies[j].shape;
  const double vij = scene.measures[i].volume * scene.measures[j].volume;
  core::ScalarPartial global, proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&](core::ScalarPartial& p, RandomStream stream, std::uint64_t m) {
                       for (std::uint64_t e = 0; e < m; ++e) {
                         const Vec3 a = sample_point(si, stream);
                         const Vec3 b = sample_point(sj, stream);
                         const double val = vij * kernel.Phi(distance(a, b));
                         p.sum += val;
                         p.sumsq += val * val;
                       }
                     });
  TransferResult t;
  t.route = Route::Direct;
  fill_scalar(t, global.sum, global.sumsq, r.samples);
  t.wall_seconds = seconds_since(t0);
  return t;
}

TransferResult transfer_via_eta(const Scene& scene, std::size_t i, std::size_t j,
                                const Kernel& kernel, const MatrixDensity& eta) {
  const auto t0 = Clock::now();
  check_pair(scene, i, j);
  TransferResult t;
  t.route = Route::Eta;
  const SignedHistogram& h = eta.cell(i, j);
  if (h.n_events() == 0) {
    t.warning = "eta histogram holds no events";
    t.value = std::numeric_limits<double>::quiet_NaN();
    t.std_err = std::numeric_limits<double>::quiet_NaN();
    t.wall_seconds = seconds_since(t0);
    return t;
  }
  const auto [sum, se] =
      hist_functional(h, 2, [&](double x) { return kernel.Phi(x); });
  const double vu2 = scene.v_union * scene.v_union;
  t.value = vu2 * sum;
  t.std_err = vu2 * se;
  t.n_samples = h.n_events();
  t.wall_seconds = seconds_since(t0);
  return t;
}

TransferResult transfer_via_gamma(const Scene& scene, std::size_t i, std::size_t j,
                                  const Kernel& kernel) {
  const auto t0 = Clock::now();
  check_pair(scene, i, j);
  const auto* si = std::get_if<Sphere>(&scene.bodies[i].shape);
  const auto* sj = std::get_if<Sphere>(&scene.bodies[j].shape);
  if (!si || !sj)
    throw UnsupportedGeometryError("the gamma route has closed forms for spheres only");
  const double separation = i == j ? 0.0 : distance(si->center, sj->center);
  TransferResult t;
  t.route = Route::Gamma;
  t.value = analytic::pair_transfer(kernel, si->radius, sj->radius, separation);
  t.std_err = 0.0;
  t.wall_seconds = seconds_since(t0);
  return t;
}

TransferResult transfer_via_radii(const Scene& scene, std::size_t i, std::size_t j,
                                  const Kernel& kernel, const EstimatorOptions& opt,
                                  RandomStream rng) {
  return run_radii_route(scene, i, j, kernel, opt, rng).result;
}

TransferResult transfer_via_chords(const Scene& scene, std::size_t i, std::size_t j,
                                   const Kernel& kernel, const EstimatorOptions& opt,
                                   RandomStream rng) {
  return run_chords_route(scene, i, j, kernel, opt, rng).result;
}

TransferResult transfer_via_lambda(const Scene& scene, std::size_t i, std::size_t j,
                                   const Kernel& kernel, const MatrixDensity& lambda) {
  const auto t0 = Clock::now();
  check_pair(scene, i, j);
  TransferResult t;
  t.route = Route::Lambda;
  const SignedHistogram& h = lambda.cell(i, j);
  if (h.n_events() == 0) {
    t.warning = "lambda histogram holds no events";
    t.value = std::numeric_limits<double>::quiet_NaN();
    t.std_err = std::numeric_limits<double>::quiet_NaN();
    t.wall_seconds = seconds_since(t0);
    return t;
  }
  const auto [sum, se] = hist_functional(h, 0, [&](double x) {
    return kernel.Phi2(x) / (x * x * x * x);
  });
  const double pre =
      3.0 * scene.measures[i].volume * scene.measures[j].volume / std::numbers::pi;
  t.value = pre * sum;
  t.std_err = pre * se;
  t.n_samples = h.n_events();
  t.wall_seconds = seconds_since(t0);
  return t;
}

NonuniformResult transfer_nonuniform(const Scene& scene, std::size_t i, std::size_t j,
                                     const Kernel& kernel, const EstimatorOptions& opt,
                                     RandomStream rng) {
  const auto t0 = Clock::now();
  check_pair(scene, i, j);
  if (i == j && kernel.singular_at_zero())
    throw SingularDiagonalError("kernel \"" + kernel.name() +
                                "\" diverges at zero distance; the direct route cannot "
                                "sample a body against itself");
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const Body& bi = scene.bodies[i];
  const Body& bj = scene.bodies[j];
  const double vij = scene.measures[i].volume * scene.measures[j].volume;
  core::ScalarPartial global, proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&](core::ScalarPartial& p, RandomStream stream, std::uint64_t m) {
                       for (std::uint64_t e = 0; e < m; ++e) {
                         const Vec3 a = sample_point(bi.shape, stream);
                         const Vec3 b = sample_point(bj.shape, stream);
                         const double val = vij * bi.density.rho(a) * bj.density.rho(b) *
                                            kernel.Phi(distance(a, b));
                         p.sum += val;
                         p.sumsq += val * val;
                       }
                     });
  NonuniformResult out;
  out.transfer.route = Route::Direct;
  fill_scalar(out.transfer, global.sum, global.sumsq, r.samples);
  out.transfer.wall_seconds = seconds_since(t0);
  out.c_lambda = 3.0 * out.transfer.value / std::numbers::pi;
  return out;
}

std::vector<TransferResult> transfer_all_routes(const Scene& scene, std::size_t i,
                                                std::size_t j, const Kernel& kernel,
                                                const EstimatorOptions& opt,
                                                RandomStream rng) {
  check_pair(scene, i, j);
  std::vector<TransferResult> out;

  try {
    out.push_back(transfer_direct(scene, i, j, kernel, opt, rng.substream(1)));
  } catch (const SingularDiagonalError& e) {
    out.push_back(unavailable(Route::Direct, e.what()));
  }

  {
    const auto t0 = Clock::now();
    const EtaResult eta = estimate_eta(scene, opt, rng.substream(2));
    TransferResult t = transfer_via_eta(scene, i, j, kernel, eta.matrix);
    t.wall_seconds = seconds_since(t0);
    out.push_back(std::move(t));
  }

  try {
    out.push_back(transfer_via_gamma(scene, i, j, kernel));
  } catch (const UnsupportedGeometryError& e) {
    out.push_back(unavailable(Route::Gamma, e.what()));
  }

  try {
    out.push_back(transfer_via_radii(scene, i, j, kernel, opt, rng.substream(3)));
    const auto t0 = Clock::now();
    ChordsRun chords = run_chords_route(scene, i, j, kernel, opt, rng.substream(4));
    out.push_back(chords.result);
    const MatrixDensity lambda = lambda_from_mu(chords.estimate.matrix, scene);
    TransferResult t = transfer_via_lambda(scene, i, j, kernel, lambda);
    t.wall_seconds = seconds_since(t0);
    out.push_back(std::move(t));
  } catch (const OverlappingSceneError& e) {
    out.push_back(unavailable(Route::Radii, e.what()));
    out.push_back(unavailable(Route::Chords, e.what()));
    out.push_back(unavailable(Route::Lambda, e.what()));
  }

  return out;
}

}  // namespace chordix
