#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace chordix {

/// Half-open is never needed here: intervals carry positive length and the
/// lists are kept sorted and pairwise disjoint.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

using IntervalList = std::vector<Interval>;

enum class BoolOp { Union, Intersect, Subtract };

/// Tolerance used to merge touching intervals and drop degenerate ones,
/// scaled by the largest coordinate in play (>= 1e-12 absolute).
inline double interval_eps(const IntervalList& a, const IntervalList& b) {
  double scale = 1.0;
  for (const auto& iv : a) scale = std::max({scale, std::fabs(iv.lo), std::fabs(iv.hi)});
  for (const auto& iv : b) scale = std::max({scale, std::fabs(iv.lo), std::fabs(iv.hi)});
  return 1e-12 * scale;
}

/// Sort, merge gaps <= eps, drop lengths <= eps.
inline void normalize_intervals(IntervalList& list, double eps) {
  std::sort(list.begin(), list.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  IntervalList out;
  for (const auto& iv : list) {
    if (!out.empty() && iv.lo <= out.back().hi + eps) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [eps](const Interval& iv) { return iv.length() <= eps; }),
            out.end());
  list.swap(out);
}

/// Pointwise boolean of two sorted disjoint interval lists.
inline IntervalList interval_bool(const IntervalList& a, const IntervalList& b, BoolOp op) {
  struct Event {
    double t;
    int which;  // 0 = a, 1 = b
    bool open;
  };
  std::vector<Event> events;
  events.reserve(2 * (a.size() + b.size()));
  for (const auto& iv : a) {
    events.push_back({iv.lo, 0, true});
    events.push_back({iv.hi, 0, false});
  }
  for (const auto& iv : b) {
    events.push_back({iv.lo, 1, true});
    events.push_back({iv.hi, 1, false});
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    if (x.t != y.t) return x.t < y.t;
    return x.open < y.open;  // close before open at equal t
  });

  const auto combine = [op](bool in_a, bool in_b) {
    switch (op) {
      case BoolOp::Union: return in_a || in_b;
      case BoolOp::Intersect: return in_a && in_b;
      case BoolOp::Subtract: return in_a && !in_b;
    }
    return false;
  };

  IntervalList out;
  bool in_a = false;
  bool in_b = false;
  bool inside = false;
  double open_t = 0.0;
  for (const auto& ev : events) {
    if (ev.which == 0) in_a = ev.open; else in_b = ev.open;
    const bool now = combine(in_a, in_b);
    if (now && !inside) {
      open_t = ev.t;
      inside = true;
    } else if (!now && inside) {
      out.push_back({open_t, ev.t});
      inside = false;
    }
  }
  normalize_intervals(out, interval_eps(a, b));
  return out;
}

/// Restrict to t >= 0 (ray parameterization); interval containing the
/// origin is cut exactly at 0.
inline IntervalList clip_to_ray(IntervalList list) {
  IntervalList out;
  for (auto iv : list) {
    if (iv.hi <= 0.0) continue;
    iv.lo = std::max(iv.lo, 0.0);
    if (iv.hi > iv.lo) out.push_back(iv);
  }
  return out;
}

/// Total covered length.
inline double intervals_length(const IntervalList& list) {
  double s = 0.0;
  for (const auto& iv : list) s += iv.length();
  return s;
}

}  // namespace chordix
