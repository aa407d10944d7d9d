#pragma once

// Shared per-event sampling cores and the chunk-merge driver.  The parallel
// estimators (estimators.cpp) and the serial reference (reference.cpp) both
// run these exact cores; only the driver differs, and the merge order is
// fixed, so the two produce bit-identical accumulators.

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <vector>

#include "chordix/estimators.hpp"
#include "chordix/kernels.hpp"
#include "chordix/scene.hpp"
#include "chordix/signed_hist.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chordix::core {

// Events are dealt out in fixed chunks, one RNG substream per chunk, so the
// event-to-random-draw mapping is independent of thread count.
constexpr std::uint64_t kChunkEvents = 65536;

inline std::uint64_t n_chunks_for(std::uint64_t n_events) {
  return (n_events + kChunkEvents - 1) / kChunkEvents;
}

/// Optional streaming kernel accumulation for one body pair, riding along
/// with the histogram deposits of the same events.
struct PairTap {
  const Kernel* kernel = nullptr;
  std::size_t i = 0;
  std::size_t j = 0;
};

struct TapAccum {
  double sum = 0.0;
  double sumsq = 0.0;
  void merge(const TapAccum& o) {
    sum += o.sum;
    sumsq += o.sumsq;
  }
};

// ---------------------------------------------------------------------------
// Point-pair core (eta and its density-weighted variant)

struct EtaConfig {
  const Scene* scene = nullptr;
  std::size_t bins = 0;
  double l_max = 0.0;
  bool weighted = false;
};

struct EtaPartial {
  MatrixDensity matrix;
  SignedHistogram union_hist;
  EventBalance balance;

  EtaPartial(std::size_t n, std::size_t bins, double l_max)
      : matrix(HistKind::Eta, n, bins, l_max), union_hist(bins, l_max), balance(n) {}

  void merge(const EtaPartial& o) {
    matrix.merge(o.matrix);
    union_hist.merge(o.union_hist);
    balance.merge(o.balance);
  }
};

inline void eta_chunk(const EtaConfig& cfg, EtaPartial& p, RandomStream rng,
                      std::uint64_t m) {
  const Scene& s = *cfg.scene;
  for (std::uint64_t e = 0; e < m; ++e) {
    const std::size_t i = pick_body(s, rng);
    const Vec3 r = sample_point(s.bodies[i].shape, rng);
    const std::size_t j = pick_body(s, rng);
    const Vec3 r2 = sample_point(s.bodies[j].shape, rng);
    const double l = distance(r, r2);
    const double w =
        cfg.weighted ? s.bodies[i].density.rho(r) * s.bodies[j].density.rho(r2) : 1.0;
    p.union_hist.deposit(l, w);
    // Both orders of an unordered pair land in one cell; half weight keeps
    // the cell density at the per-ordered-pair value.
    p.matrix.cell(i, j).deposit(l, i == j ? w : 0.5 * w);
    p.balance.count(i, j, w);
  }
  p.matrix.add_events(m);
  p.union_hist.add_events(m);
}

// ---------------------------------------------------------------------------
// Ray-crossing core (signed radii)

struct RadiiConfig {
  const Scene* scene = nullptr;
  std::size_t bins = 0;
  double l_max = 0.0;
  PairTap tap;
};

struct RadiiPartial {
  std::size_t n = 0;
  std::vector<SignedHistogram> ordered;  // row-major n*n, source -> target
  SignedHistogram union_hist;
  EventBalance balance;
  TapAccum tap;

  RadiiPartial(std::size_t bodies, std::size_t bins, double l_max)
      : n(bodies),
        ordered(bodies * bodies, SignedHistogram(bins, l_max)),
        union_hist(bins, l_max),
        balance(bodies) {}

  void merge(const RadiiPartial& o) {
    for (std::size_t k = 0; k < ordered.size(); ++k) ordered[k].merge(o.ordered[k]);
    union_hist.merge(o.union_hist);
    balance.merge(o.balance);
    tap.merge(o.tap);
  }
};

inline void radii_chunk(const RadiiConfig& cfg, RadiiPartial& p, RandomStream rng,
                        std::uint64_t m) {
  const Scene& s = *cfg.scene;
  const std::size_t n = s.size();
  const PairTap& tap = cfg.tap;
  for (std::uint64_t e = 0; e < m; ++e) {
    const std::size_t a = pick_body(s, rng);
    const Vec3 origin = sample_point(s.bodies[a].shape, rng);
    const Vec3 dir = rng.unit_vector();
    double phi_event = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const IntervalList iv = ray_intervals(s.bodies[j].shape, origin, dir);
      SignedHistogram& acc = p.ordered[a * n + j];
      const bool tapped =
          tap.kernel && ((a == tap.i && j == tap.j) || (a == tap.j && j == tap.i));
      double phi_sum = 0.0;
      for (const Interval& t : iv) {
        // Entry crossings count negative, exits positive; the interval
        // containing the origin starts at exactly 0 and its entry is the
        // origin itself, which is not a crossing.
        if (t.lo > 0.0) {
          acc.deposit(t.lo, -1.0);
          p.union_hist.deposit(t.lo, -1.0);
          p.balance.count(a, j, -1.0);
          if (tapped) phi_sum -= tap.kernel->Phi1(t.lo);
        }
        acc.deposit(t.hi, 1.0);
        p.union_hist.deposit(t.hi, 1.0);
        p.balance.count(a, j, 1.0);
        if (tapped) phi_sum += tap.kernel->Phi1(t.hi);
      }
      if (tapped) phi_event += phi_sum;
    }
    if (tap.kernel) {
      const double c = s.v_union * phi_event * (tap.i == tap.j ? 1.0 : 0.5);
      p.tap.sum += c;
      p.tap.sumsq += c * c;
    }
  }
  for (SignedHistogram& h : p.ordered) h.add_events(m);
  p.union_hist.add_events(m);
}

// ---------------------------------------------------------------------------
// Line-crossing-pair core (signed chords)

struct ChordsConfig {
  const Scene* scene = nullptr;
  std::size_t bins = 0;
  double l_max = 0.0;
  PairTap tap;
};

struct ChordsPartial {
  MatrixDensity matrix;
  SignedHistogram union_hist;
  EventBalance balance;
  double max_quad_residual = 0.0;
  TapAccum tap;

  ChordsPartial(std::size_t n, std::size_t bins, double l_max)
      : matrix(HistKind::Mu, n, bins, l_max), union_hist(bins, l_max), balance(n) {}

  void merge(const ChordsPartial& o) {
    matrix.merge(o.matrix);
    union_hist.merge(o.union_hist);
    balance.merge(o.balance);
    max_quad_residual = std::max(max_quad_residual, o.max_quad_residual);
    tap.merge(o.tap);
  }
};

inline void chords_chunk(const ChordsConfig& cfg, ChordsPartial& p, RandomStream rng,
                         std::uint64_t m) {
  const Scene& s = *cfg.scene;
  const std::size_t n = s.size();
  const double rb = s.bounding.radius;
  // Lines are isotropic directions with feet uniform on the central disk of
  // the scene's bounding sphere; with that measure the crossing-pair sum
  // times pi rb^2 estimates the second covariogram derivative, and the
  // mu-normalization folds in 4/S_union.
  const double w_full = 4.0 * std::numbers::pi * rb * rb / s.s_union;
  const PairTap& tap = cfg.tap;
  struct Seg {
    double lo, hi;
    std::size_t body;
  };
  std::vector<Seg> segs;
  for (std::uint64_t e = 0; e < m; ++e) {
    const Vec3 dir = rng.unit_vector();
    Vec3 e1, e2;
    orthonormal_frame(dir, e1, e2);
    double u = 0.0, v = 0.0;
    rng.disk_point(rb, u, v);
    const Vec3 origin = s.bounding.center + u * e1 + v * e2;

    segs.clear();
    for (std::size_t j = 0; j < n; ++j)
      for (const Interval& iv : line_intervals(s.bodies[j].shape, origin, dir))
        segs.push_back({iv.lo, iv.hi, j});

    double phi_event = 0.0;
    for (const Seg& g : segs) {
      // The entry/exit pair of one interval: opposite boundary parity,
      // positive chord.
      const double l = g.hi - g.lo;
      p.matrix.cell(g.body, g.body).deposit(l, w_full);
      p.union_hist.deposit(l, w_full);
      p.balance.count(g.body, g.body, 1.0);
      if (tap.kernel && tap.i == tap.j && g.body == tap.i)
        phi_event += w_full * tap.kernel->Phi2(l);
    }
    for (std::size_t x = 0; x < segs.size(); ++x) {
      for (std::size_t y = x + 1; y < segs.size(); ++y) {
        // Intervals never overlap (bodies are disjoint, per-body lists are
        // normalized), so one of the two strictly precedes the other.
        const Seg& f = segs[x].lo <= segs[y].lo ? segs[x] : segs[y];
        const Seg& g = segs[x].lo <= segs[y].lo ? segs[y] : segs[x];
        const double w_cell = f.body == g.body ? w_full : 0.5 * w_full;
        const bool tapped =
            tap.kernel && ((f.body == tap.i && g.body == tap.j) ||
                           (f.body == tap.j && g.body == tap.i));
        const double ll = g.lo - f.lo;
        const double lh = g.hi - f.lo;
        const double hl = g.lo - f.hi;
        const double hh = g.hi - f.hi;
        // Same-parity crossing pairs count negative, opposite-parity
        // positive; the four signed lengths of an interval pair cancel.
        p.max_quad_residual =
            std::max(p.max_quad_residual, std::abs(lh + hl - ll - hh));
        SignedHistogram& cell = p.matrix.cell(f.body, g.body);
        cell.deposit(ll, -w_cell);
        cell.deposit(lh, w_cell);
        cell.deposit(hl, w_cell);
        cell.deposit(hh, -w_cell);
        p.union_hist.deposit(ll, -w_full);
        p.union_hist.deposit(lh, w_full);
        p.union_hist.deposit(hl, w_full);
        p.union_hist.deposit(hh, -w_full);
        p.balance.count(f.body, g.body, -1.0);
        p.balance.count(f.body, g.body, 1.0);
        p.balance.count(f.body, g.body, 1.0);
        p.balance.count(f.body, g.body, -1.0);
        if (tapped)
          phi_event += w_cell * (tap.kernel->Phi2(lh) + tap.kernel->Phi2(hl) -
                                 tap.kernel->Phi2(ll) - tap.kernel->Phi2(hh));
      }
    }
    if (tap.kernel) {
      const double c = 0.25 * s.s_union * phi_event;
      p.tap.sum += c;
      p.tap.sumsq += c * c;
    }
  }
  p.matrix.add_events(m);
  p.union_hist.add_events(m);
}

// ---------------------------------------------------------------------------
// Scalar core (direct transfer routes)

struct ScalarPartial {
  double sum = 0.0;
  double sumsq = 0.0;
  void merge(const ScalarPartial& o) {
    sum += o.sum;
    sumsq += o.sumsq;
  }
};

// ---------------------------------------------------------------------------
// Drivers.  Both iterate chunks in ascending order and merge partials in
// ascending order, so accumulator contents are bit-identical between them.

template <typename Partial, typename ChunkFn>
void run_serial(Partial& global, const Partial& proto, std::uint64_t n_events,
                const RandomStream& rng, ChunkFn&& fn) {
  const std::uint64_t chunks = n_chunks_for(n_events);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    Partial part = proto;
    const std::uint64_t lo = c * kChunkEvents;
    const std::uint64_t hi = std::min(lo + kChunkEvents, n_events);
    fn(part, rng.substream(c), hi - lo);
    global.merge(part);
  }
}

template <typename Partial, typename ChunkFn>
void run_parallel(Partial& global, const Partial& proto, std::uint64_t n_events,
                  const RandomStream& rng, int threads, ChunkFn&& fn) {
#ifndef _OPENMP
  (void)threads;
  run_serial(global, proto, n_events, rng, fn);
#else
  const std::uint64_t chunks = n_chunks_for(n_events);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  const std::uint64_t block = std::max<std::uint64_t>(64, static_cast<std::uint64_t>(nt) * 8);
  std::vector<Partial> parts;
  parts.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(block, chunks)));
  for (std::uint64_t base = 0; base < chunks; base += block) {
    const std::uint64_t mblk = std::min(block, chunks - base);
    parts.assign(static_cast<std::size_t>(mblk), proto);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(mblk); ++t) {
      const std::uint64_t c = base + static_cast<std::uint64_t>(t);
      const std::uint64_t lo = c * kChunkEvents;
      const std::uint64_t hi = std::min(lo + kChunkEvents, n_events);
      fn(parts[static_cast<std::size_t>(t)], rng.substream(c), hi - lo);
    }
    for (std::size_t t = 0; t < mblk; ++t) global.merge(parts[t]);
  }
#endif
}

// ---------------------------------------------------------------------------
// Shared option resolution and finalization, so the parallel and reference
// wrappers cannot drift apart.

struct ResolvedOptions {
  std::uint64_t samples = 0;
  std::size_t bins = 0;
  double l_max = 0.0;
  int threads = 0;
};

inline ResolvedOptions resolve(const Scene& scene, const EstimatorOptions& opt) {
  if (opt.samples == 0) throw BinningMismatchError("sample count must be positive");
  if (opt.bins == 0) throw BinningMismatchError("bin count must be positive");
  ResolvedOptions r;
  r.samples = opt.samples;
  r.bins = opt.bins;
  r.l_max = opt.l_max > 0.0 ? opt.l_max : scene.default_l_max;
  r.threads = opt.threads;
  return r;
}

inline void require_disjoint(const Scene& scene, const char* what) {
  if (!scene.all_disjoint())
    throw OverlappingSceneError(std::string(what) +
                                " requires a pairwise disjoint scene");
}

inline void stamp_metadata(MatrixDensity& m, const Scene& scene, std::uint64_t seed) {
  m.seed = seed;
  m.volumes.clear();
  for (const Measures& meas : scene.measures) m.volumes.push_back(meas.volume);
  m.v_union = scene.v_union;
  m.s_union = scene.s_union;
}

inline EtaResult finalize_eta(EtaPartial&& g, const Scene& scene, std::uint64_t seed) {
  EtaResult r{std::move(g.matrix), std::move(g.union_hist), std::move(g.balance)};
  stamp_metadata(r.matrix, scene, seed);
  return r;
}

inline WeightedEtaResult finalize_weighted(EtaPartial&& g, const Scene& scene,
                                           std::uint64_t seed) {
  WeightedEtaResult r{std::move(g.matrix), std::move(g.balance)};
  stamp_metadata(r.matrix, scene, seed);
  return r;
}

inline RadiiResult finalize_radii(RadiiPartial&& g, const Scene& scene, std::size_t bins,
                                  double l_max, std::uint64_t seed) {
  const std::size_t n = g.n;
  RadiiResult r;
  r.matrix = MatrixDensity(HistKind::Iota, n, bins, l_max);
  for (std::size_t i = 0; i < n; ++i) {
    r.matrix.cell(i, i) = g.ordered[i * n + i];
    for (std::size_t j = i + 1; j < n; ++j)
      r.matrix.cell(i, j) =
          linear_combine(0.5, g.ordered[i * n + j], 0.5, g.ordered[j * n + i]);
  }
  stamp_metadata(r.matrix, scene, seed);
  r.ordered = std::move(g.ordered);
  r.union_hist = std::move(g.union_hist);
  r.balance = std::move(g.balance);
  return r;
}

inline ChordsResult finalize_chords(ChordsPartial&& g, const Scene& scene,
                                    std::uint64_t seed) {
  ChordsResult r;
  r.matrix = std::move(g.matrix);
  r.union_hist = std::move(g.union_hist);
  r.balance = std::move(g.balance);
  r.max_quad_residual = g.max_quad_residual;
  stamp_metadata(r.matrix, scene, seed);
  return r;
}

}  // namespace chordix::core
