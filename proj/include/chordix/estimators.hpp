#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "chordix/scene.hpp"
#include "chordix/signed_hist.hpp"

namespace chordix {

struct EstimatorOptions {
  std::uint64_t samples = 1000000;
  std::size_t bins = 200;
  double l_max = 0.0;  // <= 0 picks the scene default
  int threads = 0;     // <= 0 uses the OpenMP default
};

/// Signed-deposit bookkeeping per ordered (source, target) pair.
struct EventBalance {
  std::size_t n = 0;
  std::vector<std::uint64_t> n_plus;   // row-major n*n
  std::vector<std::uint64_t> n_minus;

  EventBalance() = default;
  explicit EventBalance(std::size_t bodies)
      : n(bodies), n_plus(bodies * bodies, 0), n_minus(bodies * bodies, 0) {}

  std::uint64_t plus(std::size_t i, std::size_t j) const { return n_plus[i * n + j]; }
  std::uint64_t minus(std::size_t i, std::size_t j) const { return n_minus[i * n + j]; }
  void count(std::size_t i, std::size_t j, double w) {
    if (w >= 0.0) ++n_plus[i * n + j]; else ++n_minus[i * n + j];
  }
  void merge(const EventBalance& other);
};

struct EtaResult {
  MatrixDensity matrix;        // eta-checked cells
  SignedHistogram union_hist;  // direct union binning of the same pairs
  EventBalance balance;
};

struct RadiiResult {
  MatrixDensity matrix;        // iota-checked, symmetrized
  std::vector<SignedHistogram> ordered;  // row-major n*n source->target accumulators
  SignedHistogram union_hist;
  EventBalance balance;
};

struct ChordsResult {
  MatrixDensity matrix;        // mu-checked
  SignedHistogram union_hist;
  EventBalance balance;
  double max_quad_residual = 0.0;  // worst |(pos lengths) - (neg lengths)| per quadruplet
};

struct WeightedEtaResult {
  MatrixDensity matrix;  // rho-weighted eta-checked analogue
  EventBalance balance;
};

/// Distances between uniform point pairs over the union.
EtaResult estimate_eta(const Scene& scene, const EstimatorOptions& opt, RandomStream rng);

/// Signed ray-crossing distances; scene must be pairwise disjoint.
RadiiResult estimate_radii(const Scene& scene, const EstimatorOptions& opt, RandomStream rng);

/// Signed line-crossing pair differences; scene must be pairwise disjoint.
ChordsResult estimate_chords(const Scene& scene, const EstimatorOptions& opt, RandomStream rng);

/// Point pairs weighted by the bodies' density fields.
WeightedEtaResult estimate_eta_weighted(const Scene& scene, const EstimatorOptions& opt,
                                        RandomStream rng);

/// gamma_ij(l) = V_union^2 * eta_checked_ij(l) / (4 pi l^2) at bin centers.
/// The first bins are kept but unreliable (1/l^2 amplification).
MatrixDensity gamma_from_eta(const MatrixDensity& eta, const Scene& scene);

/// eta_ij = (V_union^2 / (V_i V_j)) * eta_checked_ij.
MatrixDensity eta_normalized(const MatrixDensity& eta, const Scene& scene);

/// lambda_ij(x) = pi x^4 (S_union/4) mu_checked_ij(x) / (3 V_i V_j).
MatrixDensity lambda_from_mu(const MatrixDensity& mu, const Scene& scene);

/// Mean area of the direction-averaged common projection of two bodies:
/// pi R_b^2 times the fraction of isotropic lines hitting both.
std::pair<double, double> mutual_projection_area(const Body& a, const Body& b,
                                                 std::uint64_t n_lines, RandomStream rng);

/// Serial reference implementations; bit-identical to the parallel ones.
namespace reference {
EtaResult estimate_eta(const Scene& scene, const EstimatorOptions& opt, RandomStream rng);
RadiiResult estimate_radii(const Scene& scene, const EstimatorOptions& opt, RandomStream rng);
ChordsResult estimate_chords(const Scene& scene, const EstimatorOptions& opt, RandomStream rng);
WeightedEtaResult estimate_eta_weighted(const Scene& scene, const EstimatorOptions& opt,
                                        RandomStream rng);
}  // namespace reference

}  // namespace chordix
