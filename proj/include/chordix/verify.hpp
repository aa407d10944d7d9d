#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chordix/scene.hpp"
#include "chordix/transfer.hpp"

namespace chordix {

enum class CheckStatus { ExactPass, StatPass, Fail, Skipped };

std::string to_string(CheckStatus status);

struct IdentityCheck {
  std::string identity;
  CheckStatus status = CheckStatus::Skipped;
  double z = 0.0;        // worst |z| over the compared quantities
  double lhs = 0.0;      // representative scalar pair (for bin-wise checks,
  double rhs = 0.0;      // the worst-z bin)
  double std_err = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<IdentityCheck> checks;
  double z_threshold = 0.0;  // Bonferroni-corrected acceptance threshold
  bool all_passed() const;
};

struct VerifyOptions {
  std::uint64_t samples = 1000000;
  std::size_t bins = 200;
  int threads = 0;
  std::uint64_t seed = 42;
};

/// Inter-route and union/decomposition identities.  Overlapping two-body
/// scenes get the decomposition identity; disjoint scenes get the full
/// battery.  Failures are report entries, never exceptions.
VerificationReport verify_identities(const Scene& scene, const VerifyOptions& opt);

/// Closed-form sphere oracles (per-bin distribution comparisons); entries are
/// skipped for bodies without closed forms.
VerificationReport verify_oracles(const Scene& scene, const VerifyOptions& opt);

std::string report_json(const VerificationReport& report);
void report_table(std::ostream& os, const VerificationReport& report);

/// Two-sided critical value: solves erfc(z / sqrt(2)) = alpha.
double z_critical(double two_sided_alpha);

}  // namespace chordix
