#pragma once

// Physical channel scenarios compiled into the general interference model,
// plus the line-of-sight array gain and the closed-form convexity thresholds
// for the equal-gain case.

#include <rra/core.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rra {

template <typename Scalar>
constexpr Scalar degrees_to_radians(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

/// i.i.d. Rayleigh fading with maximum-ratio processing.  rho is the
/// direction's power-to-noise ratio, beta_k the large-scale gains and
/// gamma_k the mean-square channel estimates (0 < gamma_k <= beta_k).
template <typename Scalar = double>
struct RayleighScenario {
  int M{1};
  Scalar rho{0};
  Scalar beta1{1}, beta2{1};
  Scalar gamma1{1}, gamma2{1};
  Direction direction{Direction::DL};
};

/// Line-of-sight uniform linear array with maximum-ratio processing.
/// dH is the antenna spacing in wavelengths, angles are in radians.
template <typename Scalar = double>
struct LoSScenario {
  int M{1};
  Scalar dH{Scalar(0.5)};
  Scalar rho{0};
  Scalar beta1{1}, beta2{1};
  Scalar theta1{0}, theta2{0};
  Direction direction{Direction::DL};
};

namespace detail {

template <typename Scalar>
void require_positive(Scalar v, const char* name) {
  if (!(std::isfinite(v) && v > Scalar(0)))
    throw std::invalid_argument(std::string(name) + " must be finite and positive");
}

}  // namespace detail

template <typename Scalar>
void validate(const RayleighScenario<Scalar>& s) {
  if (s.M < 1) throw std::invalid_argument("M must be a positive integer");
  if (!(std::isfinite(s.rho) && s.rho >= Scalar(0)))
    throw std::invalid_argument("rho must be finite and nonnegative");
  detail::require_positive(s.beta1, "beta1");
  detail::require_positive(s.beta2, "beta2");
  detail::require_positive(s.gamma1, "gamma1");
  detail::require_positive(s.gamma2, "gamma2");
  if (s.gamma1 > s.beta1) throw std::invalid_argument("gamma1 must not exceed beta1");
  if (s.gamma2 > s.beta2) throw std::invalid_argument("gamma2 must not exceed beta2");
}

template <typename Scalar>
void validate(const LoSScenario<Scalar>& s) {
  if (s.M < 1) throw std::invalid_argument("M must be a positive integer");
  if (!(std::isfinite(s.dH) && s.dH > Scalar(0) && s.dH <= Scalar(0.5)))
    throw std::invalid_argument("dH must lie in (0, 0.5] wavelengths");
  if (!(std::isfinite(s.rho) && s.rho >= Scalar(0)))
    throw std::invalid_argument("rho must be finite and nonnegative");
  detail::require_positive(s.beta1, "beta1");
  detail::require_positive(s.beta2, "beta2");
  if (!std::isfinite(s.theta1) || !std::isfinite(s.theta2))
    throw std::invalid_argument("theta1/theta2 must be finite");
}

template <typename Scalar>
GeneralRateModel<Scalar> rayleigh_model(const RayleighScenario<Scalar>& s) {
  validate(s);
  GeneralRateModel<Scalar> m;
  m.direction = s.direction;
  m.alpha1 = Scalar(s.M) * s.rho * s.gamma1;
  m.alpha2 = Scalar(s.M) * s.rho * s.gamma2;
  if (s.direction == Direction::DL) {
    m.mu11 = m.mu12 = s.rho * s.beta1;  // user 1 hears the whole DL budget
    m.mu21 = m.mu22 = s.rho * s.beta2;
  } else {
    m.mu11 = m.mu21 = s.rho * s.beta1;  // every receiver combiner picks up both transmitters
    m.mu12 = m.mu22 = s.rho * s.beta2;
  }
  return m;
}

/// Normalized array gain between two angles: sin^2(pi dH M delta) /
/// (M sin^2(pi dH delta)) with delta = sin(theta_k) - sin(theta_j).
/// Equal sines give the coherent maximum M.  Near the removable singularity
/// (1e-12 <= |delta| < 1e-8) a series expansion avoids the unstable ratio of
/// two vanishing sines.
template <typename Scalar>
Scalar los_gain(Scalar theta_k, Scalar theta_j, int M, Scalar dH) {
  if (M < 1) throw std::invalid_argument("los_gain: M must be a positive integer");
  if (!(std::isfinite(dH) && dH > Scalar(0) && dH <= Scalar(0.5)))
    throw std::invalid_argument("los_gain: dH must lie in (0, 0.5]");
  const Scalar delta = std::sin(theta_k) - std::sin(theta_j);
  const Scalar mag = std::abs(delta);
  const Scalar Ms = Scalar(M);
  if (mag < Scalar(1e-12)) return Ms;
  const Scalar x = std::numbers::pi_v<Scalar> * dH * delta;
  if (mag < Scalar(1e-8)) {
    const Scalar g = Ms * (Scalar(1) - (Ms * Ms - Scalar(1)) * x * x / Scalar(3));
    return std::max(Scalar(0), g);
  }
  const Scalar sx = std::sin(x);
  const Scalar sMx = std::sin(Ms * x);
  const Scalar g = sMx * sMx / (Ms * sx * sx);
  return std::min(Ms, std::max(Scalar(0), g));
}

template <typename Scalar>
GeneralRateModel<Scalar> los_model(const LoSScenario<Scalar>& s) {
  validate(s);
  const Scalar g = los_gain(s.theta1, s.theta2, s.M, s.dH);
  GeneralRateModel<Scalar> m;
  m.direction = s.direction;
  m.alpha1 = Scalar(s.M) * s.rho * s.beta1;
  m.alpha2 = Scalar(s.M) * s.rho * s.beta2;
  m.mu11 = m.mu22 = Scalar(0);  // perfect CSI, no self-interference
  if (s.direction == Direction::DL) {
    m.mu12 = g * s.rho * s.beta1;  // leakage of user 2's beam into user 1's channel
    m.mu21 = g * s.rho * s.beta2;
  } else {
    m.mu12 = g * s.rho * s.beta2;  // user 2's signal caught by user 1's combiner
    m.mu21 = g * s.rho * s.beta1;
  }
  return m;
}

/// Largest array gain for which the equal-gain (beta1 = beta2, SNR = rho*beta)
/// downlink region stays convex: (sqrt(M*SNR + 1) - 1)/SNR, written in a form
/// that stays accurate as SNR -> 0 (limit M/2).
template <typename Scalar>
Scalar dl_threshold(int M, Scalar snr) {
  if (M < 1) throw std::invalid_argument("dl_threshold: M must be a positive integer");
  if (!(std::isfinite(snr) && snr > Scalar(0)))
    throw std::domain_error("dl_threshold: snr must be positive");
  return Scalar(M) / (Scalar(1) + std::sqrt(Scalar(1) + Scalar(M) * snr));
}

/// Uplink counterpart: (sqrt(2M*SNR + 1) - 1)/(2 SNR), same SNR -> 0 limit,
/// always at or below dl_threshold.
template <typename Scalar>
Scalar ul_threshold(int M, Scalar snr) {
  if (M < 1) throw std::invalid_argument("ul_threshold: M must be a positive integer");
  if (!(std::isfinite(snr) && snr > Scalar(0)))
    throw std::domain_error("ul_threshold: snr must be positive");
  return Scalar(M) / (Scalar(1) + std::sqrt(Scalar(1) + Scalar(2 * M) * snr));
}

/// Equal-gain downlink convexity in coefficient form: alpha1 >= mu12*(2 + mu12).
template <typename Scalar>
bool dl_special_case_condition(Scalar alpha1, Scalar mu12) {
  return alpha1 >= mu12 * (Scalar(2) + mu12);
}

/// Equal-gain uplink convexity in coefficient form: alpha1 >= 2*mu12*(1 + mu12).
template <typename Scalar>
bool ul_special_case_condition(Scalar alpha1, Scalar mu12) {
  return alpha1 >= Scalar(2) * mu12 * (Scalar(1) + mu12);
}

/// Left-hand side of the uplink curvature condition as a function of eta2;
/// the segment is concave at eta2 iff this is <= 0.  It increases
/// monotonically in eta2, so its value at eta2 = 1 decides the verdict
/// (which is where ul_special_case_condition comes from).
template <typename Scalar>
Scalar ul_condition_quadratic_lhs(Scalar alpha1, Scalar mu12, Scalar eta2) {
  return -alpha1 * alpha1 +
         Scalar(2) * mu12 * (Scalar(1) + mu12) * (Scalar(1) + mu12 * eta2) +
         alpha1 * (Scalar(-1) + mu12 + mu12 * mu12 * (Scalar(1) + eta2 * eta2));
}

}  // namespace rra
