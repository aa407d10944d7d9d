#include "chordix/estimators.hpp"

#include <cmath>
#include <numbers>

#include "estimator_core.hpp"

namespace chordix {

void EventBalance::merge(const EventBalance& other) {
  if (n != other.n) throw BinningMismatchError("event balance size mismatch");
  for (std::size_t k = 0; k < n_plus.size(); ++k) {
    n_plus[k] += other.n_plus[k];
    n_minus[k] += other.n_minus[k];
  }
}

EtaResult estimate_eta(const Scene& scene, const EstimatorOptions& opt, RandomStream rng) {
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const core::EtaConfig cfg{&scene, r.bins, r.l_max, false};
  core::EtaPartial proto(scene.size(), r.bins, r.l_max);
  core::EtaPartial global = proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&cfg](core::EtaPartial& p, RandomStream stream, std::uint64_t m) {
                       core::eta_chunk(cfg, p, stream, m);
                     });
  return core::finalize_eta(std::move(global), scene, rng.seed());
}

WeightedEtaResult estimate_eta_weighted(const Scene& scene, const EstimatorOptions& opt,
                                        RandomStream rng) {
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const core::EtaConfig cfg{&scene, r.bins, r.l_max, true};
  core::EtaPartial proto(scene.size(), r.bins, r.l_max);
  core::EtaPartial global = proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&cfg](core::EtaPartial& p, RandomStream stream, std::uint64_t m) {
                       core::eta_chunk(cfg, p, stream, m);
                     });
  return core::finalize_weighted(std::move(global), scene, rng.seed());
}

RadiiResult estimate_radii(const Scene& scene, const EstimatorOptions& opt, RandomStream rng) {
  core::require_disjoint(scene, "the radii estimator");
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const core::RadiiConfig cfg{&scene, r.bins, r.l_max, {}};
  core::RadiiPartial proto(scene.size(), r.bins, r.l_max);
  core::RadiiPartial global = proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&cfg](core::RadiiPartial& p, RandomStream stream, std::uint64_t m) {
                       core::radii_chunk(cfg, p, stream, m);
                     });
  return core::finalize_radii(std::move(global), scene, r.bins, r.l_max, rng.seed());
}

ChordsResult estimate_chords(const Scene& scene, const EstimatorOptions& opt, RandomStream rng) {
  core::require_disjoint(scene, "the chord estimator");
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const core::ChordsConfig cfg{&scene, r.bins, r.l_max, {}};
  core::ChordsPartial proto(scene.size(), r.bins, r.l_max);
  core::ChordsPartial global = proto;
  core::run_parallel(global, proto, r.samples, rng, r.threads,
                     [&cfg](core::ChordsPartial& p, RandomStream stream, std::uint64_t m) {
                       core::chords_chunk(cfg, p, stream, m);
                     });
  return core::finalize_chords(std::move(global), scene, rng.seed());
}

MatrixDensity gamma_from_eta(const MatrixDensity& eta, const Scene& scene) {
  MatrixDensity out = eta;
  std::vector<double> factors(eta.bins());
  const double vu2 = scene.v_union * scene.v_union;
  for (std::size_t b = 0; b < eta.bins(); ++b) {
    const double c = eta.cell(0, 0).bin_center(b);
    factors[b] = vu2 / (4.0 * std::numbers::pi * c * c);
  }
  const std::size_t n = eta.n_bodies();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.cell(i, j).scale_bins(factors);
  out.set_kind(HistKind::Gamma);
  return out;
}

MatrixDensity eta_normalized(const MatrixDensity& eta, const Scene& scene) {
  MatrixDensity out = eta;
  const double vu2 = scene.v_union * scene.v_union;
  const std::size_t n = eta.n_bodies();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      out.cell(i, j).scale(vu2 / (scene.measures[i].volume * scene.measures[j].volume));
  return out;
}

MatrixDensity lambda_from_mu(const MatrixDensity& mu, const Scene& scene) {
  MatrixDensity out = mu;
  std::vector<double> factors(mu.bins());
  const std::size_t n = mu.n_bodies();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t b = 0; b < mu.bins(); ++b) {
        const double x = mu.cell(0, 0).bin_center(b);
        factors[b] = std::numbers::pi * x * x * x * x * (scene.s_union / 4.0) /
                     (3.0 * scene.measures[i].volume * scene.measures[j].volume);
      }
      out.cell(i, j).scale_bins(factors);
    }
  }
  out.set_kind(HistKind::Lambda);
  return out;
}

std::pair<double, double> mutual_projection_area(const Body& a, const Body& b,
                                                 std::uint64_t n_lines, RandomStream rng) {
  const Ball bound = merge_balls(bounding_sphere(a.shape), bounding_sphere(b.shape));
  const double area = std::numbers::pi * bound.radius * bound.radius;
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < n_lines; ++k) {
    const Vec3 dir = rng.unit_vector();
    Vec3 e1, e2;
    orthonormal_frame(dir, e1, e2);
    double u = 0.0, v = 0.0;
    rng.disk_point(bound.radius, u, v);
    const Vec3 origin = bound.center + u * e1 + v * e2;
    if (!line_intervals(a.shape, origin, dir).empty() &&
        !line_intervals(b.shape, origin, dir).empty())
      ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_lines);
  const double se = std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(n_lines)));
  return {area * p, area * se};
}

}  // namespace chordix
