#pragma once

// Two-user rate model and Pareto boundary sampling.
//
// Everything downstream (convexity checks, channel scenarios, sweeps) is
// built on the general interference model defined here: each user's rate is
// log2(1 + alpha_k eta_k / (mu_k1 eta_1 + mu_k2 eta_2 + 1)) with power
// weights eta_k.  Downlink shares one power budget (eta1 + eta2 <= 1),
// uplink constrains each user separately (eta_k <= 1).

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rra {

enum class Direction { DL, UL };

inline const char* to_string(Direction d) { return d == Direction::DL ? "dl" : "ul"; }

/// Interference model coefficients.  All six must be finite and >= 0.
template <typename Scalar = double>
struct GeneralRateModel {
  Scalar alpha1{0}, alpha2{0};          // useful-signal gains
  Scalar mu11{0}, mu12{0};              // interference into user 1 from eta1, eta2
  Scalar mu21{0}, mu22{0};              // interference into user 2
  Direction direction{Direction::DL};
};

template <typename Scalar = double>
struct PowerAllocation {
  Scalar eta1{0}, eta2{0};
};

template <typename Scalar = double>
struct RatePair {
  Scalar r1{0}, r2{0};                  // bits/s/Hz
};

namespace detail {

template <typename Scalar>
void require_coeff(Scalar v, const char* name) {
  if (!(std::isfinite(v) && v >= Scalar(0)))
    throw std::invalid_argument(std::string("model coefficient ") + name +
                                " must be finite and nonnegative");
}

// eta1 + (1 - eta1) can round a few ulps above 1; leave slack so boundary
// sampling never trips its own validation.
template <typename Scalar>
constexpr Scalar power_sum_slack() {
  return Scalar(4) * std::numeric_limits<Scalar>::epsilon();
}

}  // namespace detail

template <typename Scalar>
void validate(const GeneralRateModel<Scalar>& m) {
  detail::require_coeff(m.alpha1, "alpha1");
  detail::require_coeff(m.alpha2, "alpha2");
  detail::require_coeff(m.mu11, "mu11");
  detail::require_coeff(m.mu12, "mu12");
  detail::require_coeff(m.mu21, "mu21");
  detail::require_coeff(m.mu22, "mu22");
}

template <typename Scalar>
void validate(const GeneralRateModel<Scalar>& m, const PowerAllocation<Scalar>& a) {
  validate(m);
  if (!(std::isfinite(a.eta1) && a.eta1 >= Scalar(0) && a.eta1 <= Scalar(1)))
    throw std::invalid_argument("eta1 must lie in [0, 1]");
  if (!(std::isfinite(a.eta2) && a.eta2 >= Scalar(0) && a.eta2 <= Scalar(1)))
    throw std::invalid_argument("eta2 must lie in [0, 1]");
  if (m.direction == Direction::DL &&
      a.eta1 + a.eta2 > Scalar(1) + detail::power_sum_slack<Scalar>())
    throw std::invalid_argument("downlink requires eta1+eta2 <= 1");
}

/// Instantaneous rate pair for a validated model/allocation.
template <typename Scalar>
RatePair<Scalar> rate_pair(const GeneralRateModel<Scalar>& m, const PowerAllocation<Scalar>& a) {
  validate(m, a);
  constexpr Scalar zeta = std::numbers::log2e_v<Scalar>;  // 1/ln 2
  const Scalar den1 = m.mu11 * a.eta1 + m.mu12 * a.eta2 + Scalar(1);
  const Scalar den2 = m.mu21 * a.eta1 + m.mu22 * a.eta2 + Scalar(1);
  return {zeta * std::log1p(m.alpha1 * a.eta1 / den1),
          zeta * std::log1p(m.alpha2 * a.eta2 / den2)};
}

/// Downlink Pareto boundary point at eta1 (eta2 = 1 - eta1).
template <typename Scalar>
RatePair<Scalar> dl_boundary(const GeneralRateModel<Scalar>& m, Scalar eta1) {
  if (m.direction != Direction::DL)
    throw std::invalid_argument("dl_boundary requires a downlink model");
  if (!(std::isfinite(eta1) && eta1 >= Scalar(0) && eta1 <= Scalar(1)))
    throw std::domain_error("dl_boundary: eta1 must lie in [0, 1]");
  return rate_pair(m, PowerAllocation<Scalar>{eta1, Scalar(1) - eta1});
}

/// Uplink Pareto boundary.  Segment 1 fixes eta1 = 1 and varies eta2 = t;
/// segment 2 fixes eta2 = 1 and varies eta1 = t.  The segments meet at the
/// full-power corner t = 1.
template <typename Scalar>
RatePair<Scalar> ul_boundary_segment(const GeneralRateModel<Scalar>& m, int segment, Scalar t) {
  if (m.direction != Direction::UL)
    throw std::invalid_argument("ul_boundary_segment requires an uplink model");
  if (segment != 1 && segment != 2)
    throw std::invalid_argument("ul_boundary_segment: segment must be 1 or 2");
  if (!(std::isfinite(t) && t >= Scalar(0) && t <= Scalar(1)))
    throw std::domain_error("ul_boundary_segment: t must lie in [0, 1]");
  const PowerAllocation<Scalar> a = segment == 1 ? PowerAllocation<Scalar>{Scalar(1), t}
                                                 : PowerAllocation<Scalar>{t, Scalar(1)};
  return rate_pair(m, a);
}

/// One boundary rate as a function of the free parameter eta:
/// R(eta) = log2((p eta + q) / (r eta + s)).
template <typename Scalar = double>
struct LinearFractional {
  Scalar p{0}, q{0}, r{0}, s{0};

  Scalar value(Scalar eta) const { return (p * eta + q) / (r * eta + s); }

  /// log2(value(eta)), evaluated through log1p of the numerator excess so
  /// that rates near zero keep full relative accuracy.
  Scalar log2_value(Scalar eta) const {
    const Scalar den = r * eta + s;
    if (!(den > Scalar(0)))
      throw std::domain_error("LinearFractional: denominator must stay positive on [0, 1]");
    Scalar excess = ((p - r) * eta + (q - s)) / den;
    if (excess < Scalar(0)) {
      if (excess < Scalar(-1e-12))
        throw std::domain_error("LinearFractional: value dropped below 1 (rate would be negative)");
      excess = Scalar(0);
    }
    return std::numbers::log2e_v<Scalar> * std::log1p(excess);
  }
};

/// Which boundary rate to express in closed form.
enum class BoundaryRate {
  DlR1,   // R1 along the downlink boundary, parameter eta1
  DlR2,   // R2 along the downlink boundary, parameter eta1
  Ul1R1,  // R1 along uplink segment 1, parameter eta2
  Ul1R2,  // R2 along uplink segment 1, parameter eta2
  Ul2R1,  // R1 along uplink segment 2, parameter eta1
  Ul2R2,  // R2 along uplink segment 2, parameter eta1
};

/// Closed-form coefficients of the selected boundary rate.  Substituting the
/// boundary's power coupling into the rate expression always yields a ratio
/// of two affine functions of the free parameter; these are its coefficients.
template <typename Scalar>
LinearFractional<Scalar> as_linear_fractional(const GeneralRateModel<Scalar>& m,
                                              BoundaryRate which) {
  validate(m);
  const bool dl = which == BoundaryRate::DlR1 || which == BoundaryRate::DlR2;
  if (dl != (m.direction == Direction::DL))
    throw std::invalid_argument("as_linear_fractional: boundary selector does not match "
                                "the model's direction");
  switch (which) {
    case BoundaryRate::DlR1:  // eta2 = 1 - eta1
      return {m.alpha1 + m.mu11 - m.mu12, m.mu12 + Scalar(1),
              m.mu11 - m.mu12, m.mu12 + Scalar(1)};
    case BoundaryRate::DlR2:
      return {m.mu21 - m.mu22 - m.alpha2, m.alpha2 + m.mu22 + Scalar(1),
              m.mu21 - m.mu22, m.mu22 + Scalar(1)};
    case BoundaryRate::Ul1R1:  // eta1 = 1, parameter eta2
      return {m.mu12, m.alpha1 + m.mu11 + Scalar(1), m.mu12, m.mu11 + Scalar(1)};
    case BoundaryRate::Ul1R2:
      return {m.alpha2 + m.mu22, m.mu21 + Scalar(1), m.mu22, m.mu21 + Scalar(1)};
    case BoundaryRate::Ul2R1:  // eta2 = 1, parameter eta1
      return {m.alpha1 + m.mu11, m.mu12 + Scalar(1), m.mu11, m.mu12 + Scalar(1)};
    case BoundaryRate::Ul2R2:
      return {m.mu21, m.alpha2 + m.mu22 + Scalar(1), m.mu21, m.mu22 + Scalar(1)};
  }
  throw std::invalid_argument("as_linear_fractional: unknown boundary selector");
}

template <typename Scalar = double>
struct BoundarySegment {
  std::string id;         // "bd" (downlink), "bd1" or "bd2" (uplink)
  std::string parameter;  // name of the free parameter: "eta1" or "eta2"
  Eigen::ArrayX<Scalar> eta;  // parameter grid, ascending
  Eigen::ArrayX<Scalar> r1, r2;
};

template <typename Scalar = double>
struct ParetoBoundary {
  std::vector<BoundarySegment<Scalar>> segments;
};

/// Sample the Pareto boundary on n evenly spaced parameter values per
/// segment.  Downlink yields one segment, uplink two (sharing the corner
/// eta1 = eta2 = 1, which appears in both).
template <typename Scalar>
ParetoBoundary<Scalar> sample_boundary(const GeneralRateModel<Scalar>& m, Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("sample_boundary: need at least 2 points per segment");
  validate(m);

  ParetoBoundary<Scalar> b;
  const Eigen::ArrayX<Scalar> grid =
      Eigen::ArrayX<Scalar>::LinSpaced(n, Scalar(0), Scalar(1));

  if (m.direction == Direction::DL) {
    BoundarySegment<Scalar> seg{"bd", "eta1", grid,
                                Eigen::ArrayX<Scalar>(n), Eigen::ArrayX<Scalar>(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      const RatePair<Scalar> rp = dl_boundary(m, grid[i]);
      seg.r1[i] = rp.r1;
      seg.r2[i] = rp.r2;
    }
    b.segments.push_back(std::move(seg));
    return b;
  }

  for (int segment : {1, 2}) {
    BoundarySegment<Scalar> seg{segment == 1 ? "bd1" : "bd2",
                                segment == 1 ? "eta2" : "eta1", grid,
                                Eigen::ArrayX<Scalar>(n), Eigen::ArrayX<Scalar>(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      const RatePair<Scalar> rp = ul_boundary_segment(m, segment, grid[i]);
      seg.r1[i] = rp.r1;
      seg.r2[i] = rp.r2;
    }
    b.segments.push_back(std::move(seg));
  }
  return b;
}

}  // namespace rra
