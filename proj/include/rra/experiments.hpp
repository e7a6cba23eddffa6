#pragma once

// Sweep drivers over line-of-sight scenarios: convexity statistics across
// user angles, multiplexing vs. scheduling sum rates, and the aperture
// scaling of the non-convex angle fraction.

#include <rra/channels.hpp>
#include <rra/convexity.hpp>
#include <rra/core.hpp>
#include <rra/parallel.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rra {

/// Convexity status across theta2 in [0, 90] degrees with theta1 fixed at 0
/// (equal-gain users, beta1 = beta2 = 1, so snr = rho).
struct AngleSweepResult {
  int M{0};
  double snr{0};
  double theta1{0};  // radians, fixed
  Direction direction{Direction::DL};
  Eigen::ArrayXd theta2_deg;
  Eigen::ArrayXd gain;                    // g(theta1, theta2)
  Eigen::Array<bool, Eigen::Dynamic, 1> convex;
  double nonconvex_fraction{0};           // non-convex points / grid size
  int nonconvex_interval_count{0};        // maximal contiguous non-convex runs
};

/// Sum-rate curves versus angle separation |theta1 - theta2| (theta1 = 0).
struct SumRateComparison {
  int M{0};
  double snr{0};
  Eigen::ArrayXd separation_deg;
  Eigen::ArrayXd multiplexing;            // bits/s/Hz, equal power split
  Eigen::ArrayXd scheduling;              // bits/s/Hz, orthogonal equal-resource
  std::vector<double> crossover_separations_deg;  // where the better policy flips
};

struct ScalingRow {
  int M{0};
  double nonconvex_fraction{0};
  double fraction_times_M{0};
};

/// Both users served together with half the downlink budget each.
inline double sum_rate_multiplexing(const LoSScenario<double>& s) {
  if (s.direction != Direction::DL)
    throw std::invalid_argument("sum_rate_multiplexing requires a downlink scenario");
  const RatePair<double> rp = rate_pair(los_model(s), PowerAllocation<double>{0.5, 0.5});
  return rp.r1 + rp.r2;
}

/// Each user served alone in half the resources with the full budget;
/// independent of the angles.
inline double sum_rate_scheduling(const LoSScenario<double>& s) {
  if (s.direction != Direction::DL)
    throw std::invalid_argument("sum_rate_scheduling requires a downlink scenario");
  validate(s);
  constexpr double zeta = std::numbers::log2e;
  return 0.5 * zeta * std::log1p(double(s.M) * s.rho * s.beta1) +
         0.5 * zeta * std::log1p(double(s.M) * s.rho * s.beta2);
}

inline double scheduling_gain(const LoSScenario<double>& s) {
  const double mux = sum_rate_multiplexing(s);
  if (mux == 0.0)
    throw std::domain_error("scheduling_gain: multiplexing sum rate is zero");
  return sum_rate_scheduling(s) / mux;
}

namespace detail {

inline Eigen::ArrayXd degree_grid(double lo, double hi, double step) {
  if (!(std::isfinite(step) && step > 0))
    throw std::invalid_argument("grid step must be positive");
  const auto n = static_cast<Eigen::Index>(std::floor((hi - lo) / step + 1e-9)) + 1;
  Eigen::ArrayXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = lo + double(i) * step;
  return g;
}

}  // namespace detail

/// Sweep theta2 over [0, 90] degrees, deciding convexity per point from the
/// equal-gain threshold.  Every tenth point is cross-validated against the
/// grid-based checker on the compiled model; a non-marginal disagreement
/// means one of the two paths is wrong and raises logic_error.
inline AngleSweepResult angle_sweep(int M, double snr, Direction direction,
                                    double grid_step_deg, double dH = 0.5,
                                    bool cross_validate = true) {
  const double threshold =
      direction == Direction::DL ? dl_threshold(M, snr) : ul_threshold(M, snr);

  AngleSweepResult res;
  res.M = M;
  res.snr = snr;
  res.theta1 = 0.0;
  res.direction = direction;
  res.theta2_deg = detail::degree_grid(0.0, 90.0, grid_step_deg);
  const Eigen::Index n = res.theta2_deg.size();
  res.gain.resize(n);
  res.convex.resize(n);

  parallel_for(n, [&](std::ptrdiff_t i) {
    const double g = los_gain(0.0, degrees_to_radians(res.theta2_deg[i]), M, dH);
    res.gain[i] = g;
    res.convex[i] = g <= threshold;
  });

  if (cross_validate) {
    for (Eigen::Index i = 0; i < n; i += 10) {
      LoSScenario<double> s{M, dH, snr, 1.0, 1.0,
                            0.0, degrees_to_radians(res.theta2_deg[i]), direction};
      const ConvexityVerdict<double> v = check_convexity(los_model(s));
      if (!v.marginal && v.convex != res.convex[i])
        throw std::logic_error("angle_sweep: threshold and grid checker disagree on a "
                               "non-marginal point");
    }
  }

  Eigen::Index bad = 0;
  int runs = 0;
  bool in_run = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!res.convex[i]) {
      ++bad;
      if (!in_run) ++runs;
      in_run = true;
    } else {
      in_run = false;
    }
  }
  res.nonconvex_fraction = double(bad) / double(n);
  res.nonconvex_interval_count = runs;
  return res;
}

/// Multiplexing vs. scheduling sum rates over a list of angle separations in
/// degrees.  Crossovers are linearly interpolated between adjacent grid
/// points where the sign of (multiplexing - scheduling) flips.
inline SumRateComparison sum_rate_comparison(int M, double snr,
                                             const std::vector<double>& separations_deg,
                                             double dH = 0.5) {
  if (separations_deg.empty())
    throw std::invalid_argument("sum_rate_comparison: separation grid must not be empty");

  SumRateComparison res;
  res.M = M;
  res.snr = snr;
  const auto n = static_cast<Eigen::Index>(separations_deg.size());
  res.separation_deg.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) res.separation_deg[i] = separations_deg[i];
  res.multiplexing.resize(n);

  LoSScenario<double> base{M, dH, snr, 1.0, 1.0, 0.0, 0.0, Direction::DL};
  const double sched = sum_rate_scheduling(base);
  res.scheduling = Eigen::ArrayXd::Constant(n, sched);

  parallel_for(n, [&](std::ptrdiff_t i) {
    LoSScenario<double> s = base;
    s.theta2 = degrees_to_radians(res.separation_deg[i]);
    res.multiplexing[i] = sum_rate_multiplexing(s);
  });

  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d0 = res.multiplexing[i] - sched;
    const double d1 = res.multiplexing[i + 1] - sched;
    if (d0 == 0.0)
      res.crossover_separations_deg.push_back(res.separation_deg[i]);
    else if ((d0 < 0.0) != (d1 < 0.0)) {
      const double t = d0 / (d0 - d1);
      res.crossover_separations_deg.push_back(
          res.separation_deg[i] + t * (res.separation_deg[i + 1] - res.separation_deg[i]));
    }
  }
  if (n > 0 && res.multiplexing[n - 1] == sched)
    res.crossover_separations_deg.push_back(res.separation_deg[n - 1]);
  return res;
}

/// Non-convex angle fraction for each antenna count; under uniformly
/// distributed angles the fraction shrinks like 1/M, so fraction*M should be
/// roughly constant (callers decide how much spread they accept).
inline std::vector<ScalingRow> scaling_check(const std::vector<int>& M_list, double snr,
                                             Direction direction = Direction::DL,
                                             double grid_step_deg = 0.01, double dH = 0.5) {
  std::vector<ScalingRow> rows;
  rows.reserve(M_list.size());
  for (int M : M_list) {
    const AngleSweepResult sweep = angle_sweep(M, snr, direction, grid_step_deg, dH);
    rows.push_back({M, sweep.nonconvex_fraction, sweep.nonconvex_fraction * double(M)});
  }
  return rows;
}

}  // namespace rra
