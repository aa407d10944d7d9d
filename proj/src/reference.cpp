#include "chordix/estimators.hpp"
#include "estimator_core.hpp"

// Straight serial drivers over the shared event cores.  These exist to pin
// down the parallel implementations: merge order is fixed, so results must
// match estimators.cpp bit for bit at any thread count.

namespace chordix::reference {

EtaResult estimate_eta(const Scene& scene, const EstimatorOptions& opt, RandomStream rng) {
  const core::ResolvedOptions r = core::resolve(scene, opt);
  const core::EtaConfig cfg{&scene, r.bins, r.l_max, false};
  core::EtaPartial proto(scene.size(), r.bins, r.l_max);
  core::EtaPartial global = proto;
  core::run_serial(global, proto, r.samples, rng,
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
  core::run_serial(global, proto, r.samples, rng,
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
  core::run_serial(global, proto, r.samples, rng,
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
  core::run_serial(global, proto, r.samples, rng,
                   [&cfg](core::ChordsPartial& p, RandomStream stream, std::uint64_t m) {
                     core::chords_chunk(cfg, p, stream, m);
                   });
  return core::finalize_chords(std::move(global), scene, rng.seed());
}

}  // namespace chordix::reference
