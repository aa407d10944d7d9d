#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chordix/errors.hpp"

namespace chordix {

enum class HistKind { Eta, Gamma, Iota, Mu, Lambda };

std::string to_string(HistKind kind);

/// Uniform-bin histogram of signed density deposits.
///
/// A deposit of weight `w` at abscissa `l` adds `w / bin_width` to the bin
/// holding `l`, so `density(b)` estimates a density in `l` once divided by the
/// number of primary events.  Weights may be negative; abscissae may not.
/// Deposits at or beyond `l_max` accumulate in the overflow bucket.
///
/// Error bars treat deposits as independent across primary events; squared
/// weights are accumulated per deposit, which over-counts the variance of
/// sign-cancelling deposits from a single event (the usual case here), so the
/// reported error is conservative.
class SignedHistogram {
 public:
  SignedHistogram() = default;
  SignedHistogram(std::size_t bins, double l_max);

  std::size_t bins() const { return weight_.size(); }
  double l_max() const { return l_max_; }
  double bin_width() const { return width_; }
  double bin_left(std::size_t b) const { return static_cast<double>(b) * width_; }
  double bin_right(std::size_t b) const { return static_cast<double>(b + 1) * width_; }
  double bin_center(std::size_t b) const { return (static_cast<double>(b) + 0.5) * width_; }

  void deposit(double l, double w);
  /// Count `n` primary sampling events.  Every normalization divides by this.
  void add_events(std::uint64_t n) { n_events_ += n; }

  std::uint64_t n_events() const { return n_events_; }
  double overflow() const { return overflow_; }

  double density(std::size_t b) const;
  double density_stderr(std::size_t b) const;

  /// Integral of the density over [0, l_max), ignoring overflow.
  double integral() const;
  double integral_stderr() const;
  /// k-th moment, bin centers as abscissae.
  double moment(int k) const;
  double moment_stderr(int k) const;

  /// Accumulate `other` into this histogram (same binning required), adding
  /// its event count: the two argument histograms must come from disjoint
  /// event streams.
  void merge(const SignedHistogram& other);
  /// Add `c * other` leaving the event count alone: `other` must share this
  /// histogram's event stream.  Squared weights pick up `c^2`.
  void add_scaled(const SignedHistogram& other, double c);
  /// In place: weights *= c, squared weights *= c^2.  Event count unchanged.
  void scale(double c);
  /// Per-bin variant; `factors` must have one entry per bin.
  void scale_bins(const std::vector<double>& factors);

  // Raw accumulators, exposed for exact-reproducibility comparisons.
  double raw_weight(std::size_t b) const { return weight_[b]; }
  double raw_sumsq(std::size_t b) const { return sumsq_[b]; }

 private:
  void check_same_binning(const SignedHistogram& other) const;

  double l_max_ = 0.0;
  double width_ = 0.0;
  std::vector<double> weight_;
  std::vector<double> sumsq_;
  double overflow_ = 0.0;
  std::uint64_t n_events_ = 0;
};

/// `a*x + b*y` as a fresh histogram; event counts must agree.
SignedHistogram linear_combine(double a, const SignedHistogram& x, double b,
                               const SignedHistogram& y);

/// Symmetric matrix of per-pair histograms, stored as the upper triangle.
///
/// All cells share one event counter: a single sampling event (one line, one
/// ray, one point pair) may deposit into several cells at once.
class MatrixDensity {
 public:
  MatrixDensity() = default;
  MatrixDensity(HistKind kind, std::size_t n_bodies, std::size_t bins, double l_max);

  HistKind kind() const { return kind_; }
  void set_kind(HistKind k) { kind_ = k; }
  std::size_t n_bodies() const { return n_bodies_; }
  std::size_t bins() const { return bins_; }
  double l_max() const { return l_max_; }

  SignedHistogram& cell(std::size_t i, std::size_t j);
  const SignedHistogram& cell(std::size_t i, std::size_t j) const;

  void add_events(std::uint64_t n);
  std::uint64_t n_events() const;

  void merge(const MatrixDensity& other);

  /// Sum over ordered pairs: diagonal cells once, off-diagonal cells twice
  /// (squared weights four times).
  SignedHistogram matrix_sum() const;

  // Provenance recorded by the estimator that filled the matrix.
  std::uint64_t seed = 0;
  std::vector<double> volumes;
  double v_union = 0.0;
  double s_union = 0.0;

 private:
  std::size_t cell_index(std::size_t i, std::size_t j) const;

  HistKind kind_ = HistKind::Eta;
  std::size_t n_bodies_ = 0;
  std::size_t bins_ = 0;
  double l_max_ = 0.0;
  std::vector<SignedHistogram> cells_;
};

/// One CSV block per cell: a `#` metadata line, then
/// `bin_left,bin_right,density,stderr` rows at nine significant digits.
void write_csv(std::ostream& os, const MatrixDensity& m);
void write_csv(std::ostream& os, const SignedHistogram& h, HistKind kind, std::size_t i,
               std::size_t j, std::uint64_t seed);

/// Locale-independent formatting, nine significant digits.
std::string fmt9(double v);

}  // namespace chordix
