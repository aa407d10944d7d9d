#include "chordix/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chordix::analytic {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1].
constexpr double kXgk[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                            0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                            0.2077849550078985, 0.0};
constexpr double kWgk[8] = {0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
                            0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
                            0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                           0.4179591836734694};

struct Panel {
  double a, b;
  double value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double fsum = f(c - x) + f(c + x);
    kronrod += kWgk[i] * fsum;
    if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
  }
  return {a, b, kronrod * h, std::fabs(kronrod - gauss) * h};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     double abs_tol) {
  if (!(b > a)) return {};
  std::vector<Panel> stack{gk15(f, a, b)};
  QuadResult out;
  int splits = 0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double tol =
        std::max(abs_tol * (p.b - p.a) / (b - a), rel_tol * std::fabs(p.value));
    if (p.error <= tol || p.b - p.a < 1e-14 * (b - a) || splits > 20000) {
      out.value += p.value;
      out.error += p.error;
      continue;
    }
    ++splits;
    const double m = 0.5 * (p.a + p.b);
    stack.push_back(gk15(f, p.a, m));
    stack.push_back(gk15(f, m, p.b));
  }
  return out;
}

QuadResult integrate_split(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints, double rel_tol,
                           double abs_tol) {
  std::vector<double> pts{a, b};
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  std::sort(pts.begin(), pts.end());
  QuadResult out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const QuadResult r = integrate(f, pts[i], pts[i + 1], rel_tol, abs_tol);
    out.value += r.value;
    out.error += r.error;
  }
  return out;
}

double lens_volume(double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  const double rmax = std::max(r1, r2);
  if (d <= rmax - rmin) return (4.0 * kPi / 3.0) * rmin * rmin * rmin;
  const double a = r1 + r2 - d;
  return kPi * a * a * (d * d + 2.0 * d * (r1 + r2) - 3.0 * (r1 - r2) * (r1 - r2)) / (12.0 * d);
}

double ball_covariogram(double radius, double d) {
  if (d >= 2.0 * radius) return 0.0;
  return (kPi / 12.0) * (4.0 * radius + d) * (2.0 * radius - d) * (2.0 * radius - d);
}

double pair_cross_gamma(double r1, double r2, double separation, double l) {
  const double d = separation;
  if (l < 0.0) return 0.0;
  if (l == 0.0) return lens_volume(r1, r2, d);
  if (d < 1e-14 * (r1 + r2 + l)) return lens_volume(r1, r2, l);
  double lo = std::fabs(d - l);
  double hi = d + l;
  const double sup = r1 + r2;
  if (lo >= sup) return 0.0;
  hi = std::min(hi, sup);
  const double v1 = (4.0 * kPi / 3.0) * r1 * r1 * r1;
  const double v2 = (4.0 * kPi / 3.0) * r2 * r2 * r2;
  const auto f = [&](double s) { return lens_volume(r1, r2, s) * s / (2.0 * d * l); };
  const QuadResult q =
      integrate_split(f, lo, hi, {std::fabs(r1 - r2), sup}, 1e-10, 1e-14 * v1 * v2);
  return q.value;
}

double pair_transfer(const Kernel& kernel, double r1, double r2, double separation) {
  const double d = separation;
  const double sup = d + r1 + r2;
  const auto f = [&](double l) { return kernel.phi(l) * pair_cross_gamma(r1, r2, d, l); };
  std::vector<double> brk;
  for (double s : {r1 + r2, std::fabs(r1 - r2)}) {
    brk.push_back(std::fabs(d - s));
    brk.push_back(d + s);
  }
  const double v1 = (4.0 * kPi / 3.0) * r1 * r1 * r1;
  const double v2 = (4.0 * kPi / 3.0) * r2 * r2 * r2;
  const QuadResult q = integrate_split(f, 0.0, sup, brk, 1e-8, 1e-12 * v1 * v2);
  return q.value;
}

double sphere_eta(double radius, double l) {
  if (l < 0.0 || l > 2.0 * radius) return 0.0;
  const double v = (4.0 * kPi / 3.0) * radius * radius * radius;
  return 3.0 * l * l * (ball_covariogram(radius, l) / v) / (radius * radius * radius);
}

double sphere_iota(double radius, double l) {
  if (l < 0.0 || l > 2.0 * radius) return 0.0;
  return 3.0 / (4.0 * radius) - 3.0 * l * l / (16.0 * radius * radius * radius);
}

double sphere_mu(double radius, double l) {
  if (l < 0.0 || l > 2.0 * radius) return 0.0;
  return l / (2.0 * radius * radius);
}

double sphere_gamma_second(double radius, double l) {
  if (l < 0.0 || l > 2.0 * radius) return 0.0;
  return kPi * l / 2.0;
}

double sphere_lambda(double radius, double l) {
  if (l < 0.0 || l > 2.0 * radius) return 0.0;
  const double r6 = std::pow(radius, 6);
  return 3.0 * std::pow(l, 5) / (32.0 * r6);
}

double bin_average(const std::function<double(double)>& f, double lo, double hi,
                   double support) {
  if (hi <= lo) return 0.0;
  const double a = std::max(lo, 0.0);
  const double b = std::min(hi, support);
  if (b <= a) return 0.0;
  // 5-point Gauss-Legendre nodes/weights on [-1, 1].
  static constexpr double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                  0.5384693101056831, 0.9061798459386640};
  static constexpr double w[5] = {0.2369268850561891, 0.4786286704993665,
                                  0.5688888888888889, 0.4786286704993665,
                                  0.2369268850561891};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double integral = 0.0;
  for (int k = 0; k < 5; ++k) integral += w[k] * f(mid + half * x[k]);
  integral *= half;
  return integral / (hi - lo);
}

}  // namespace chordix::analytic
