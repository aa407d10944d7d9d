#pragma once

#include <string>

#include "chordix/estimators.hpp"
#include "chordix/kernels.hpp"

namespace chordix {

enum class Route { Direct, Eta, Gamma, Radii, Chords, Lambda };

std::string to_string(Route route);
Route parse_route(std::string_view name);

struct TransferResult {
  Route route = Route::Direct;
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t n_samples = 0;
  double wall_seconds = 0.0;

  // Radii and chords also integrate their histogram against the kernel;
  // the two forms must agree within noise plus binning bias.
  bool has_alt = false;
  double alt_value = 0.0;
  double alt_std_err = 0.0;

  std::string warning;
};

/// V_i V_j * mean of phi(R)/(4 pi R^2) over uniform pairs.  Refuses i = j for
/// kernels singular at zero distance.
TransferResult transfer_direct(const Scene& scene, std::size_t i, std::size_t j,
                               const Kernel& kernel, const EstimatorOptions& opt,
                               RandomStream rng);

/// Bin sum of the eta histogram against phi(l)/(4 pi l^2), skipping the first
/// two bins; their omitted contribution is the documented bias.
TransferResult transfer_via_eta(const Scene& scene, std::size_t i, std::size_t j,
                                const Kernel& kernel, const MatrixDensity& eta);

/// Adaptive quadrature against the closed-form sphere cross covariogram.
/// Sphere bodies only; the reference for every Monte Carlo route.
TransferResult transfer_via_gamma(const Scene& scene, std::size_t i, std::size_t j,
                                  const Kernel& kernel);

/// Streaming signed sum of Phi1 over ray crossings, V_union-scaled, plus the
/// histogram-integrated companion value.
TransferResult transfer_via_radii(const Scene& scene, std::size_t i, std::size_t j,
                                  const Kernel& kernel, const EstimatorOptions& opt,
                                  RandomStream rng);

/// Streaming signed sum of Phi2 over line-crossing pairs, line-measure scaled,
/// plus the histogram-integrated companion value.
TransferResult transfer_via_chords(const Scene& scene, std::size_t i, std::size_t j,
                                   const Kernel& kernel, const EstimatorOptions& opt,
                                   RandomStream rng);

/// (3 V_i V_j / pi) * bin sum of lambda(x)/x^4 * Phi2(x).
TransferResult transfer_via_lambda(const Scene& scene, std::size_t i, std::size_t j,
                                   const Kernel& kernel, const MatrixDensity& lambda);

struct NonuniformResult {
  TransferResult transfer;
  double c_lambda = 0.0;  // 3 * value / pi, to compare against 3 M_i M_j / pi
};

/// Density-weighted direct route: uniform pair sampling with rho weights.
NonuniformResult transfer_nonuniform(const Scene& scene, std::size_t i, std::size_t j,
                                     const Kernel& kernel, const EstimatorOptions& opt,
                                     RandomStream rng);

/// All six routes on one pair.  Monte Carlo routes draw from disjoint
/// substreams of `rng`; eta/lambda share their estimator run.
std::vector<TransferResult> transfer_all_routes(const Scene& scene, std::size_t i, std::size_t j,
                                                const Kernel& kernel, const EstimatorOptions& opt,
                                                RandomStream rng);

}  // namespace chordix
