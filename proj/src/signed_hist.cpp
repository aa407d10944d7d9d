#include "chordix/signed_hist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace chordix {

std::string to_string(HistKind kind) {
  switch (kind) {
    case HistKind::Eta: return "eta";
    case HistKind::Gamma: return "gamma";
    case HistKind::Iota: return "iota";
    case HistKind::Mu: return "mu";
    case HistKind::Lambda: return "lambda";
  }
  return "?";
}

std::string fmt9(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

SignedHistogram::SignedHistogram(std::size_t bins, double l_max)
    : l_max_(l_max), width_(l_max / static_cast<double>(bins)), weight_(bins, 0.0),
      sumsq_(bins, 0.0) {
  if (bins == 0 || !(l_max > 0.0)) throw BinningMismatchError("histogram needs bins > 0, l_max > 0");
}

void SignedHistogram::deposit(double l, double w) {
  if (l < 0.0) throw NegativeValueError("deposit at negative abscissa");
  if (l >= l_max_) {
    overflow_ += w;
    return;
  }
  auto b = static_cast<std::size_t>(l / width_);
  if (b >= weight_.size()) b = weight_.size() - 1;  // l just under l_max after rounding
  const double d = w / width_;
  weight_[b] += d;
  sumsq_[b] += d * d;
}

double SignedHistogram::density(std::size_t b) const {
  if (n_events_ == 0) return 0.0;
  return weight_[b] / static_cast<double>(n_events_);
}

double SignedHistogram::density_stderr(std::size_t b) const {
  if (n_events_ == 0) return 0.0;
  const double n = static_cast<double>(n_events_);
  const double var = std::max(0.0, sumsq_[b] - weight_[b] * weight_[b] / n);
  return std::sqrt(var) / n;
}

double SignedHistogram::integral() const {
  if (n_events_ == 0) return 0.0;
  double s = 0.0;
  for (double w : weight_) s += w;
  return s * width_ / static_cast<double>(n_events_);
}

double SignedHistogram::integral_stderr() const {
  if (n_events_ == 0) return 0.0;
  const double n = static_cast<double>(n_events_);
  double s = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < weight_.size(); ++b) {
    s += weight_[b] * width_;
    s2 += sumsq_[b] * width_ * width_;
  }
  const double var = std::max(0.0, s2 - s * s / n);
  return std::sqrt(var) / n;
}

double SignedHistogram::moment(int k) const {
  if (n_events_ == 0) return 0.0;
  double s = 0.0;
  for (std::size_t b = 0; b < weight_.size(); ++b)
    s += std::pow(bin_center(b), k) * weight_[b] * width_;
  return s / static_cast<double>(n_events_);
}

double SignedHistogram::moment_stderr(int k) const {
  if (n_events_ == 0) return 0.0;
  const double n = static_cast<double>(n_events_);
  double s = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < weight_.size(); ++b) {
    const double c = std::pow(bin_center(b), k) * width_;
    s += c * weight_[b];
    s2 += c * c * sumsq_[b];
  }
  const double var = std::max(0.0, s2 - s * s / n);
  return std::sqrt(var) / n;
}

void SignedHistogram::check_same_binning(const SignedHistogram& other) const {
  if (weight_.size() != other.weight_.size() || l_max_ != other.l_max_)
    throw BinningMismatchError("histogram binning mismatch");
}

void SignedHistogram::merge(const SignedHistogram& other) {
  check_same_binning(other);
  for (std::size_t b = 0; b < weight_.size(); ++b) {
    weight_[b] += other.weight_[b];
    sumsq_[b] += other.sumsq_[b];
  }
  overflow_ += other.overflow_;
  n_events_ += other.n_events_;
}

void SignedHistogram::add_scaled(const SignedHistogram& other, double c) {
  check_same_binning(other);
  for (std::size_t b = 0; b < weight_.size(); ++b) {
    weight_[b] += c * other.weight_[b];
    sumsq_[b] += c * c * other.sumsq_[b];
  }
  overflow_ += c * other.overflow_;
}

void SignedHistogram::scale(double c) {
  for (std::size_t b = 0; b < weight_.size(); ++b) {
    weight_[b] *= c;
    sumsq_[b] *= c * c;
  }
  overflow_ *= c;
}

void SignedHistogram::scale_bins(const std::vector<double>& factors) {
  if (factors.size() != weight_.size())
    throw BinningMismatchError("per-bin factor count differs from bin count");
  for (std::size_t b = 0; b < weight_.size(); ++b) {
    weight_[b] *= factors[b];
    sumsq_[b] *= factors[b] * factors[b];
  }
}

SignedHistogram linear_combine(double a, const SignedHistogram& x, double b,
                               const SignedHistogram& y) {
  if (x.n_events() != y.n_events())
    throw BinningMismatchError("linear_combine: event count mismatch");
  SignedHistogram res = x;
  res.scale(a);
  res.add_scaled(y, b);
  return res;
}

MatrixDensity::MatrixDensity(HistKind kind, std::size_t n_bodies, std::size_t bins, double l_max)
    : kind_(kind), n_bodies_(n_bodies), bins_(bins), l_max_(l_max) {
  const std::size_t cells = n_bodies * (n_bodies + 1) / 2;
  cells_.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) cells_.emplace_back(bins, l_max);
}

std::size_t MatrixDensity::cell_index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return i * n_bodies_ - i * (i - 1) / 2 + (j - i);
}

SignedHistogram& MatrixDensity::cell(std::size_t i, std::size_t j) {
  return cells_[cell_index(i, j)];
}

const SignedHistogram& MatrixDensity::cell(std::size_t i, std::size_t j) const {
  return cells_[cell_index(i, j)];
}

void MatrixDensity::add_events(std::uint64_t n) {
  for (auto& c : cells_) c.add_events(n);
}

std::uint64_t MatrixDensity::n_events() const {
  return cells_.empty() ? 0 : cells_.front().n_events();
}

void MatrixDensity::merge(const MatrixDensity& other) {
  if (n_bodies_ != other.n_bodies_ || bins_ != other.bins_ || l_max_ != other.l_max_ ||
      kind_ != other.kind_)
    throw BinningMismatchError("matrix merge: layout mismatch");
  for (std::size_t c = 0; c < cells_.size(); ++c) cells_[c].merge(other.cells_[c]);
}

SignedHistogram MatrixDensity::matrix_sum() const {
  SignedHistogram sum(bins_, l_max_);
  sum.add_events(n_events());
  for (std::size_t i = 0; i < n_bodies_; ++i)
    for (std::size_t j = i; j < n_bodies_; ++j) sum.add_scaled(cell(i, j), j == i ? 1.0 : 2.0);
  return sum;
}

void write_csv(std::ostream& os, const SignedHistogram& h, HistKind kind, std::size_t i,
               std::size_t j, std::uint64_t seed) {
  os << "# kind=" << to_string(kind) << " pair=" << i << "," << j << " l_max=" << fmt9(h.l_max())
     << " bins=" << h.bins() << " seed=" << seed << "\n";
  for (std::size_t b = 0; b < h.bins(); ++b) {
    os << fmt9(h.bin_left(b)) << "," << fmt9(h.bin_right(b)) << "," << fmt9(h.density(b)) << ","
       << fmt9(h.density_stderr(b)) << "\n";
  }
}

void write_csv(std::ostream& os, const MatrixDensity& m) {
  for (std::size_t i = 0; i < m.n_bodies(); ++i)
    for (std::size_t j = i; j < m.n_bodies(); ++j)
      write_csv(os, m.cell(i, j), m.kind(), i, j, m.seed);
}

}  // namespace chordix
