#pragma once

#include <functional>
#include <vector>

#include "chordix/kernels.hpp"

namespace chordix::analytic {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod 15(7) integration of `f` over [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-8, double abs_tol = 0.0);

/// Same, but pre-split at the given interior breakpoints.
QuadResult integrate_split(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints, double rel_tol = 1e-8,
                           double abs_tol = 0.0);

/// Intersection volume of two balls with center distance d.
double lens_volume(double r1, double r2, double d);

/// Self-covariogram of a ball: volume of overlap with a copy shifted by d.
double ball_covariogram(double radius, double d);

/// Direction-averaged cross covariogram gamma_12(l) of two balls whose centers
/// sit `separation` apart.  gamma_12(0) is the overlap volume.
double pair_cross_gamma(double r1, double r2, double separation, double l);

/// Transfer integral of a kernel between two balls,
/// integral_0^inf phi(l) gamma_12(l) dl, by adaptive quadrature.
double pair_transfer(const Kernel& kernel, double r1, double r2, double separation);

// Closed-form signed densities of a single ball of radius R (support (0, 2R)).
double sphere_eta(double radius, double l);
double sphere_iota(double radius, double l);
double sphere_mu(double radius, double l);
/// Second derivative of the ball covariogram: pi l / 2 inside the support.
double sphere_gamma_second(double radius, double l);
double sphere_lambda(double radius, double l);

/// Average of f over [lo, hi] for an f that vanishes outside [0, support].
/// A histogram bin reports the bin-averaged density, so bin-wise comparisons
/// against a closed form must average the form over the bin as well -- a bin
/// straddling the support edge would otherwise disagree by O(1) of the peak.
/// Uses 5-point Gauss-Legendre on the clipped interval, exact for the
/// polynomial sphere densities (degree <= 5).
double bin_average(const std::function<double(double)>& f, double lo, double hi,
                   double support);

}  // namespace chordix::analytic
