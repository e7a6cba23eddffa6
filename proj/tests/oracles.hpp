#pragma once

// Shared helpers for the test binaries: a platform-stable RNG and
// extended-precision finite-difference references for the derivative code.
// The references deliberately avoid the closed forms under test: they
// evaluate log2 of the boundary rates directly in long double.

#include <rra/core.hpp>

#include <cmath>
#include <random>

namespace testutil {

// 53-bit uniform in [0, 1); bit-identical for a fixed seed on every
// implementation, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

inline long double lf_log2(const rra::LinearFractional<double>& lf, long double eta) {
  const long double num = static_cast<long double>(lf.p) * eta + lf.q;
  const long double den = static_cast<long double>(lf.r) * eta + lf.s;
  return std::log2(num / den);
}

inline long double fd_first(const rra::LinearFractional<double>& lf, long double eta,
                            long double h) {
  return (lf_log2(lf, eta + h) - lf_log2(lf, eta - h)) / (2.0L * h);
}

inline long double fd_second(const rra::LinearFractional<double>& lf, long double eta,
                             long double h) {
  return (lf_log2(lf, eta + h) - 2.0L * lf_log2(lf, eta) + lf_log2(lf, eta - h)) / (h * h);
}

// One Richardson step on the O(h^2) truncation error of the centered second
// difference; the fourth derivative of these logs can exceed the second by
// several orders of magnitude when r/s is large, so the raw stencil is not
// accurate enough at any single step size.
inline long double fd_second_ref(const rra::LinearFractional<double>& lf, long double eta,
                                 long double h = 1e-4L) {
  const long double coarse = fd_second(lf, eta, h);
  const long double fine = fd_second(lf, eta, h / 2.0L);
  return (4.0L * fine - coarse) / 3.0L;
}

// Curvature d2y/dx2 of the parametric curve (x, y) = (log2 g(u), log2 f(u))
// from three nearby samples: twice the second divided difference.
inline long double curvature_divided_difference(const rra::LinearFractional<double>& f,
                                                const rra::LinearFractional<double>& g,
                                                long double u, long double d) {
  const long double xm = lf_log2(g, u - d), x0 = lf_log2(g, u), xp = lf_log2(g, u + d);
  const long double ym = lf_log2(f, u - d), y0 = lf_log2(f, u), yp = lf_log2(f, u + d);
  const long double left = (y0 - ym) / (x0 - xm);
  const long double right = (yp - y0) / (xp - x0);
  return 2.0L * (right - left) / (xp - xm);
}

// One Richardson step on the O(d^2) truncation error.
inline long double curvature_reference(const rra::LinearFractional<double>& f,
                                       const rra::LinearFractional<double>& g,
                                       long double u, long double d = 1e-4L) {
  const long double coarse = curvature_divided_difference(f, g, u, d);
  const long double fine = curvature_divided_difference(f, g, u, d / 2.0L);
  return (4.0L * fine - coarse) / 3.0L;
}

inline double rel_err(double got, long double want) {
  const long double denom = std::max<long double>(std::abs(want), 1e-300L);
  return static_cast<double>(std::abs(got - want) / denom);
}

}  // namespace testutil
