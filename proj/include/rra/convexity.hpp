#pragma once

// Convexity decisions for the two-user rate regions.
//
// The analytic path: each boundary rate is a linear-fractional function of
// the free power coefficient (see core.hpp), so the curvature of R1 as a
// function of R2 along the boundary has a closed form.  A region is convex
// iff that curvature is <= 0 everywhere on every segment and, for uplink,
// the two segments meet at their corner without a convexity-breaking kink.
//
// The oracle path ignores all of that and tests the definition directly on
// sampled boundary points: midpoints of chords must not rise above the
// boundary.

#include <rra/core.hpp>
#include <rra/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace rra {

inline constexpr double kConvexityTol = 1e-9;   // absolute, on curvature grid max
inline constexpr double kMarginalFactor = 10;   // |worst| <= factor*tol -> marginal
inline constexpr Eigen::Index kDefaultGridN = 1001;
inline constexpr Eigen::Index kDefaultOracleN = 512;

/// First/second derivative of log2(LF(eta)) at a point.
template <typename Scalar = double>
struct DerivativeBundle {
  Scalar d1{0}, d2{0};
};

template <typename Scalar>
DerivativeBundle<Scalar> lf_derivatives(const LinearFractional<Scalar>& lf, Scalar eta) {
  const Scalar num = lf.p * eta + lf.q;
  const Scalar den = lf.r * eta + lf.s;
  if (!(num > Scalar(0)) || !(den > Scalar(0)))
    throw std::domain_error("lf_derivatives: affine parts must stay positive on [0, 1]");
  constexpr Scalar zeta = std::numbers::log2e_v<Scalar>;
  return {zeta * (lf.p / num - lf.r / den),
          zeta * (lf.r * lf.r / (den * den) - lf.p * lf.p / (num * num))};
}

/// d2y/dx2 of a parametric curve (x, y) = (g(u), f(u)) from the pointwise
/// derivatives f1 = f', f2 = f'', g1 = g', g2 = g''.
template <typename Scalar>
Scalar parametric_second_derivative(Scalar f1, Scalar f2, Scalar g1, Scalar g2) {
  if (g1 == Scalar(0))
    throw std::domain_error("parametric_second_derivative: singular parametrization (g' = 0)");
  return (f2 * g1 - f1 * g2) / (g1 * g1 * g1);
}

enum class CheckMethod { Analytic, Oracle };

inline const char* to_string(CheckMethod m) {
  return m == CheckMethod::Analytic ? "analytic" : "oracle";
}

/// Verdict plus diagnostics.  For the analytic method,
/// worst_second_derivative is the signed grid maximum of the boundary
/// curvature d2R1/dR2^2 (convex iff <= tol) and worst_location the parameter
/// value attaining it.  For the oracle method the same fields carry the worst
/// chord-midpoint excess above the boundary and the R2 coordinate where it
/// occurs.
template <typename Scalar = double>
struct ConvexityVerdict {
  bool convex{false};
  Scalar worst_second_derivative{0};
  Scalar worst_location{0};
  std::string worst_segment;             // "bd", "bd1" or "bd2" (analytic only)
  std::optional<Scalar> kink_margin;     // uplink analytic only; +inf if segment 2 is vertical
  bool marginal{false};                  // |worst| within kMarginalFactor*tol of the fence
  bool degenerate{false};                // some alpha_k = 0: region collapses, trivially convex
  CheckMethod method{CheckMethod::Analytic};
};

namespace detail {

template <typename Scalar>
ConvexityVerdict<Scalar> degenerate_verdict(CheckMethod method) {
  ConvexityVerdict<Scalar> v;
  v.convex = true;
  v.degenerate = true;
  v.method = method;
  return v;
}

// Signed grid maximum of d2R1/dR2^2 along one boundary segment whose rates
// are the given LF forms of a common parameter.
template <typename Scalar>
void scan_segment(const LinearFractional<Scalar>& f, const LinearFractional<Scalar>& g,
                  Eigen::Index grid_n, const char* segment_id,
                  ConvexityVerdict<Scalar>& acc, bool& first) {
  const Eigen::ArrayX<Scalar> grid =
      Eigen::ArrayX<Scalar>::LinSpaced(grid_n, Scalar(0), Scalar(1));
  for (Eigen::Index i = 0; i < grid_n; ++i) {
    const DerivativeBundle<Scalar> df = lf_derivatives(f, grid[i]);
    const DerivativeBundle<Scalar> dg = lf_derivatives(g, grid[i]);
    const Scalar d2 = parametric_second_derivative(df.d1, df.d2, dg.d1, dg.d2);
    if (first || d2 > acc.worst_second_derivative) {
      acc.worst_second_derivative = d2;
      acc.worst_location = grid[i];
      acc.worst_segment = segment_id;
      first = false;
    }
  }
}

}  // namespace detail

/// Kink margin at the uplink corner eta1 = eta2 = 1: slope of the boundary
/// (dR1/dR2) approaching along segment 1 minus the slope leaving along
/// segment 2.  Both slopes are negative; the corner preserves convexity iff
/// the margin is >= 0.
template <typename Scalar>
Scalar kink_condition(const GeneralRateModel<Scalar>& m) {
  if (m.direction != Direction::UL)
    throw std::invalid_argument("kink_condition requires an uplink model");
  validate(m);
  const auto f_left = lf_derivatives(as_linear_fractional(m, BoundaryRate::Ul1R1), Scalar(1));
  const auto g_left = lf_derivatives(as_linear_fractional(m, BoundaryRate::Ul1R2), Scalar(1));
  const auto f_right = lf_derivatives(as_linear_fractional(m, BoundaryRate::Ul2R1), Scalar(1));
  const auto g_right = lf_derivatives(as_linear_fractional(m, BoundaryRate::Ul2R2), Scalar(1));
  if (g_left.d1 == Scalar(0) || g_right.d1 == Scalar(0))
    throw std::domain_error("kink_condition: R2 has zero derivative at the junction");
  return f_left.d1 / g_left.d1 - f_right.d1 / g_right.d1;
}

/// Downlink convexity via the closed-form curvature on a grid.
template <typename Scalar>
ConvexityVerdict<Scalar> dl_convexity(const GeneralRateModel<Scalar>& m,
                                      Eigen::Index grid_n = kDefaultGridN,
                                      Scalar tol = Scalar(kConvexityTol)) {
  if (m.direction != Direction::DL)
    throw std::invalid_argument("dl_convexity requires a downlink model");
  validate(m);
  if (grid_n < 2) throw std::invalid_argument("dl_convexity: grid_n must be >= 2");
  if (m.alpha1 == Scalar(0) || m.alpha2 == Scalar(0))
    return detail::degenerate_verdict<Scalar>(CheckMethod::Analytic);

  ConvexityVerdict<Scalar> v;
  bool first = true;
  detail::scan_segment(as_linear_fractional(m, BoundaryRate::DlR1),
                       as_linear_fractional(m, BoundaryRate::DlR2), grid_n, "bd", v, first);
  v.convex = v.worst_second_derivative <= tol;
  v.marginal = std::abs(v.worst_second_derivative) <= Scalar(kMarginalFactor) * tol;
  v.method = CheckMethod::Analytic;
  return v;
}

/// Uplink convexity: curvature on both segments plus the corner condition.
/// A vertical segment 2 (mu21 = 0 makes R2 constant there) has no curvature
/// in the (R2, R1) plane and makes the corner trivially convex.
template <typename Scalar>
ConvexityVerdict<Scalar> ul_convexity(const GeneralRateModel<Scalar>& m,
                                      Eigen::Index grid_n = kDefaultGridN,
                                      Scalar tol = Scalar(kConvexityTol)) {
  if (m.direction != Direction::UL)
    throw std::invalid_argument("ul_convexity requires an uplink model");
  validate(m);
  if (grid_n < 2) throw std::invalid_argument("ul_convexity: grid_n must be >= 2");
  if (m.alpha1 == Scalar(0) || m.alpha2 == Scalar(0))
    return detail::degenerate_verdict<Scalar>(CheckMethod::Analytic);

  ConvexityVerdict<Scalar> v;
  bool first = true;
  detail::scan_segment(as_linear_fractional(m, BoundaryRate::Ul1R1),
                       as_linear_fractional(m, BoundaryRate::Ul1R2), grid_n, "bd1", v, first);
  const bool vertical2 = m.mu21 == Scalar(0);
  if (!vertical2) {
    detail::scan_segment(as_linear_fractional(m, BoundaryRate::Ul2R1),
                         as_linear_fractional(m, BoundaryRate::Ul2R2), grid_n, "bd2", v, first);
  }
  const Scalar margin = vertical2 ? std::numeric_limits<Scalar>::infinity() : kink_condition(m);
  v.kink_margin = margin;
  v.convex = v.worst_second_derivative <= tol && margin >= -tol;
  v.marginal = std::abs(v.worst_second_derivative) <= Scalar(kMarginalFactor) * tol ||
               (std::isfinite(margin) && std::abs(margin) <= Scalar(kMarginalFactor) * tol);
  v.method = CheckMethod::Analytic;
  return v;
}

/// Direction-dispatching convenience wrapper.
template <typename Scalar>
ConvexityVerdict<Scalar> check_convexity(const GeneralRateModel<Scalar>& m,
                                         Eigen::Index grid_n = kDefaultGridN,
                                         Scalar tol = Scalar(kConvexityTol)) {
  return m.direction == Direction::DL ? dl_convexity(m, grid_n, tol)
                                      : ul_convexity(m, grid_n, tol);
}

/// Definition-based check: sample the boundary, then test every pair's chord
/// midpoint against the piecewise-linear boundary at the midpoint's R2.  A
/// midpoint more than tol above the boundary certifies non-convexity.
template <typename Scalar>
ConvexityVerdict<Scalar> chord_oracle(const GeneralRateModel<Scalar>& m,
                                      Eigen::Index resolution = kDefaultOracleN,
                                      Scalar tol = Scalar(kConvexityTol)) {
  if (resolution < 16) throw std::invalid_argument("chord_oracle: resolution must be >= 16");
  const ParetoBoundary<Scalar> boundary = sample_boundary(m, resolution);

  std::vector<std::pair<Scalar, Scalar>> pts;  // (x = R2, y = R1)
  for (const auto& seg : boundary.segments)
    for (Eigen::Index i = 0; i < seg.eta.size(); ++i)
      pts.emplace_back(seg.r2[i], seg.r1[i]);
  std::sort(pts.begin(), pts.end());

  // Collapse duplicate abscissae keeping the highest rate (the boundary is
  // the upper envelope).
  std::vector<Scalar> ux, uy;
  ux.reserve(pts.size());
  uy.reserve(pts.size());
  for (const auto& [x, y] : pts) {
    if (!ux.empty() && x == ux.back())
      uy.back() = std::max(uy.back(), y);
    else {
      ux.push_back(x);
      uy.push_back(y);
    }
  }

  ConvexityVerdict<Scalar> v;
  v.method = CheckMethod::Oracle;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ux.size());
  if (n < 3) {  // region collapsed to a point or a single chord
    v.convex = true;
    v.degenerate = true;
    return v;
  }

  const auto boundary_y = [&](Scalar x) {
    const auto it = std::upper_bound(ux.begin(), ux.end(), x);
    if (it == ux.begin()) return uy.front();
    if (it == ux.end()) return uy.back();
    const std::ptrdiff_t k = it - ux.begin();
    const Scalar t = (x - ux[k - 1]) / (ux[k] - ux[k - 1]);
    return uy[k - 1] + t * (uy[k] - uy[k - 1]);
  };

  // Per-row worst excess, filled in parallel, reduced serially so the result
  // never depends on thread count.
  std::vector<Scalar> row_worst(static_cast<size_t>(n),
                                -std::numeric_limits<Scalar>::infinity());
  std::vector<Scalar> row_where(static_cast<size_t>(n), Scalar(0));
  parallel_for(n - 1, [&](std::ptrdiff_t i) {
    Scalar worst = -std::numeric_limits<Scalar>::infinity();
    Scalar where = 0;
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      const Scalar xm = (ux[i] + ux[j]) / Scalar(2);
      const Scalar ym = (uy[i] + uy[j]) / Scalar(2);
      const Scalar excess = ym - boundary_y(xm);
      if (excess > worst) {
        worst = excess;
        where = xm;
      }
    }
    row_worst[static_cast<size_t>(i)] = worst;
    row_where[static_cast<size_t>(i)] = where;
  });

  bool first = true;
  for (std::ptrdiff_t i = 0; i < n - 1; ++i) {
    if (first || row_worst[static_cast<size_t>(i)] > v.worst_second_derivative) {
      v.worst_second_derivative = row_worst[static_cast<size_t>(i)];
      v.worst_location = row_where[static_cast<size_t>(i)];
      first = false;
    }
  }
  v.convex = v.worst_second_derivative <= tol;
  v.marginal = std::abs(v.worst_second_derivative) <= Scalar(kMarginalFactor) * tol;
  return v;
}

}  // namespace rra
