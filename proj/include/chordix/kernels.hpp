#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "chordix/errors.hpp"

namespace chordix {

/// Radial kernel phi(r) defining the transfer weight Phi(R) = phi(R)/(4 pi R^2),
/// together with its running integrals
///   Phi1(x) = integral_0^x phi(r) dr,
///   Phi2(x) = integral_0^x Phi1(r) dr.
///
/// `ball` is phi(r) = 4 pi r^2 (Phi identically 1), `const` is phi(r) = 1,
/// `exp:sigma=s` is phi(r) = exp(-s r).
struct Kernel {
  enum class Type { Ball, Const, Exp };

  Type type = Type::Ball;
  double sigma = 1.0;

  double phi(double r) const {
    switch (type) {
      case Type::Ball: return 4.0 * std::numbers::pi * r * r;
      case Type::Const: return 1.0;
      case Type::Exp: return std::exp(-sigma * r);
    }
    return 0.0;
  }

  /// Phi(R) = phi(R)/(4 pi R^2); identically 1 for `ball`, divergent at
  /// R = 0 otherwise.
  double Phi(double r) const {
    if (type == Type::Ball) return 1.0;
    return phi(r) / (4.0 * std::numbers::pi * r * r);
  }

  double phi0() const { return type == Type::Ball ? 0.0 : 1.0; }

  /// True when Phi(R) diverges at R = 0, i.e. phi(0) != 0.
  bool singular_at_zero() const { return phi0() != 0.0; }

  double Phi1(double x) const {
    switch (type) {
      case Type::Ball: return (4.0 * std::numbers::pi / 3.0) * x * x * x;
      case Type::Const: return x;
      case Type::Exp: return x == 0.0 ? 0.0 : -x * std::expm1(-sigma * x) / (sigma * x);
    }
    return 0.0;
  }

  double Phi2(double x) const {
    switch (type) {
      case Type::Ball: return (std::numbers::pi / 3.0) * x * x * x * x;
      case Type::Const: return 0.5 * x * x;
      case Type::Exp: {
        const double u = sigma * x;
        if (u < 1e-3) {
          // (u + expm1(-u))/u^2 by series; the direct form cancels badly here.
          return x * x * (0.5 - u / 6.0 + u * u / 24.0 - u * u * u / 120.0);
        }
        return (u + std::expm1(-u)) / (sigma * sigma);
      }
    }
    return 0.0;
  }

  /// Canonical spec string; parse(name()) reproduces the kernel.
  std::string name() const;

  static Kernel parse(std::string_view spec);
};

Kernel parse_kernel(std::string_view spec);

inline Kernel Kernel::parse(std::string_view spec) { return parse_kernel(spec); }

}  // namespace chordix
