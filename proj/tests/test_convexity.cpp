#include <rra/convexity.hpp>

#include <doctest.h>

#include "oracles.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

using namespace rra;

namespace {

GeneralRateModel<double> fig_model(double cross, Direction dir) {
  return {5.0, 10.0, 1.0, cross, cross, 1.0, dir};
}

GeneralRateModel<double> random_model(std::mt19937_64& rng, Direction dir, double lo,
                                      double hi) {
  return {testutil::log_uniform(rng, lo, hi), testutil::log_uniform(rng, lo, hi),
          testutil::log_uniform(rng, lo, hi), testutil::log_uniform(rng, lo, hi),
          testutil::log_uniform(rng, lo, hi), testutil::log_uniform(rng, lo, hi),
          dir};
}

GeneralRateModel<double> swap_users(const GeneralRateModel<double>& m) {
  return {m.alpha2, m.alpha1, m.mu22, m.mu21, m.mu12, m.mu11, m.direction};
}

// log2 boundary rates in long double, straight from the definition; used to
// cross-check the kink slopes without going through the closed forms.
long double ul_rate1(const GeneralRateModel<double>& m, long double e1, long double e2) {
  return std::log2(1.0L + m.alpha1 * e1 / (m.mu11 * e1 + m.mu12 * e2 + 1.0L));
}
long double ul_rate2(const GeneralRateModel<double>& m, long double e1, long double e2) {
  return std::log2(1.0L + m.alpha2 * e2 / (m.mu21 * e1 + m.mu22 * e2 + 1.0L));
}

}  // namespace

TEST_SUITE("convexity") {

TEST_CASE("derivatives of the closed-form rate") {
  SUBCASE("hand-checked values") {
    const LinearFractional<double> lf{5.0, 2.0, 0.0, 2.0};
    const auto d = lf_derivatives(lf, 0.0);
    CHECK(d.d1 == doctest::Approx(2.5 * std::numbers::log2e).epsilon(1e-14));
    CHECK(d.d2 == doctest::Approx(-6.25 * std::numbers::log2e).epsilon(1e-14));
  }
  SUBCASE("constant-zero rate has zero derivatives") {
    const LinearFractional<double> lf{3.0, 4.0, 3.0, 4.0};
    const auto d = lf_derivatives(lf, 0.37);
    CHECK(d.d1 == 0.0);
    CHECK(d.d2 == 0.0);
  }
  SUBCASE("nonpositive affine parts are rejected") {
    CHECK_THROWS_AS(lf_derivatives(LinearFractional<double>{1.0, -1.0, 0.0, 1.0}, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(lf_derivatives(LinearFractional<double>{1.0, 1.0, -2.0, 1.0}, 1.0),
                    std::domain_error);
  }
}

TEST_CASE("derivatives match extended-precision finite differences") {
  std::mt19937_64 rng(0xfdfdULL);
  constexpr BoundaryRate kDl[] = {BoundaryRate::DlR1, BoundaryRate::DlR2};
  constexpr BoundaryRate kUl[] = {BoundaryRate::Ul1R1, BoundaryRate::Ul1R2,
                                  BoundaryRate::Ul2R1, BoundaryRate::Ul2R2};
  for (int trial = 0; trial < 30; ++trial) {
    GeneralRateModel<double> m;
    m.alpha1 = testutil::log_uniform(rng, 0.5, 50.0);
    m.alpha2 = testutil::log_uniform(rng, 0.5, 50.0);
    m.mu11 = testutil::log_uniform(rng, 0.05, 20.0);
    m.mu12 = testutil::log_uniform(rng, 0.05, 20.0);
    m.mu21 = testutil::log_uniform(rng, 0.05, 20.0);
    m.mu22 = testutil::log_uniform(rng, 0.05, 20.0);

    const auto check_form = [&](const LinearFractional<double>& lf) {
      for (int k = 0; k < 5; ++k) {
        const double eta = testutil::uniform(rng, 0.05, 0.95);
        const auto d = lf_derivatives(lf, eta);
        CHECK(testutil::rel_err(d.d1, testutil::fd_first(lf, eta, 1e-5L)) < 1e-6);
        // When p == r the second derivative nearly cancels and the stencil's
        // rounding noise (~1e-10) can exceed 1e-6 of it, so allow a small
        // absolute floor alongside the relative bound.
        const long double ref2 = testutil::fd_second_ref(lf, eta);
        const bool d2_ok = testutil::rel_err(d.d2, ref2) < 1e-6 ||
                           std::abs(d.d2 - static_cast<double>(ref2)) < 1e-9;
        CHECK(d2_ok);
      }
    };
    m.direction = Direction::DL;
    for (BoundaryRate which : kDl) check_form(as_linear_fractional(m, which));
    m.direction = Direction::UL;
    for (BoundaryRate which : kUl) check_form(as_linear_fractional(m, which));
  }
}

TEST_CASE("parametric second derivative") {
  CHECK(parametric_second_derivative(1.0, 0.0, 1.0, 0.0) == 0.0);
  CHECK(parametric_second_derivative(0.0, -1.0, 1.0, 0.0) == -1.0);
  const double h = std::sqrt(2.0) / 2.0;  // unit circle at the 45-degree point
  CHECK(parametric_second_derivative(h, -h, -h, -h) ==
        doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(parametric_second_derivative(1.0, 1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("composed boundary curvature matches a divided-difference reference") {
  std::mt19937_64 rng(0xcafeULL);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Direction dir = trial % 2 == 0 ? Direction::DL : Direction::UL;
    GeneralRateModel<double> m = random_model(rng, dir, 0.1, 50.0);
    const auto pair =
        dir == Direction::DL
            ? std::pair{as_linear_fractional(m, BoundaryRate::DlR1),
                        as_linear_fractional(m, BoundaryRate::DlR2)}
            : (trial % 4 == 1 ? std::pair{as_linear_fractional(m, BoundaryRate::Ul1R1),
                                          as_linear_fractional(m, BoundaryRate::Ul1R2)}
                              : std::pair{as_linear_fractional(m, BoundaryRate::Ul2R1),
                                          as_linear_fractional(m, BoundaryRate::Ul2R2)});
    for (double u : {0.2, 0.5, 0.8}) {
      const auto df = lf_derivatives(pair.first, u);
      const auto dg = lf_derivatives(pair.second, u);
      const double analytic = parametric_second_derivative(df.d1, df.d2, dg.d1, dg.d2);
      const long double reference = testutil::curvature_reference(pair.first, pair.second, u);
      const bool ok = testutil::rel_err(analytic, reference) < 1e-4 ||
                      std::abs(analytic - double(reference)) < 1e-5;
      CHECK(ok);
      ++checked;
    }
  }
  CHECK(checked == 120);
}

TEST_CASE("reference verdicts for the crossed-interference models") {
  SUBCASE("downlink") {
    const auto mild = dl_convexity(fig_model(1.0, Direction::DL));
    CHECK(mild.convex);
    CHECK(mild.worst_second_derivative < 0.0);
    CHECK(mild.worst_segment == "bd");
    CHECK(!mild.marginal);
    CHECK(!mild.degenerate);
    CHECK(mild.method == CheckMethod::Analytic);
    CHECK(!mild.kink_margin.has_value());

    const auto strong = dl_convexity(fig_model(10.0, Direction::DL));
    CHECK(!strong.convex);
    CHECK(strong.worst_second_derivative > 1.0);
    CHECK(!strong.marginal);
  }
  SUBCASE("uplink") {
    const auto mild = ul_convexity(fig_model(1.0, Direction::UL));
    CHECK(mild.convex);
    CHECK(mild.worst_second_derivative < 0.0);
    REQUIRE(mild.kink_margin.has_value());
    CHECK(*mild.kink_margin >= 0.0);

    const auto strong = ul_convexity(fig_model(10.0, Direction::UL));
    CHECK(!strong.convex);
    CHECK(strong.worst_second_derivative > 1.0);
  }
  SUBCASE("direction dispatch") {
    CHECK_THROWS_AS(dl_convexity(fig_model(1.0, Direction::UL)), std::invalid_argument);
    CHECK_THROWS_AS(ul_convexity(fig_model(1.0, Direction::DL)), std::invalid_argument);
    CHECK(check_convexity(fig_model(1.0, Direction::UL)).kink_margin.has_value());
    CHECK(!check_convexity(fig_model(1.0, Direction::DL)).kink_margin.has_value());
  }
}

TEST_CASE("equal-row interference structure is always convex") {
  std::mt19937_64 rng(0x4a11ULL);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = testutil::log_uniform(rng, 0.05, 50.0);
    const double b = testutil::log_uniform(rng, 0.05, 50.0);
    const double alpha1 = testutil::log_uniform(rng, 0.05, 50.0);
    const double alpha2 = testutil::log_uniform(rng, 0.05, 50.0);

    // joint-budget case: each user hears the whole transmit power
    GeneralRateModel<double> dl{alpha1, alpha2, a, a, b, b, Direction::DL};
    const auto vd = dl_convexity(dl);
    CHECK(vd.convex);
    CHECK(vd.worst_second_derivative < 0.0);

    // per-user-budget case: both transmitters reach both combiners
    GeneralRateModel<double> ul{alpha1, alpha2, a, b, a, b, Direction::UL};
    const auto vu = ul_convexity(ul);
    CHECK(vu.convex);
    REQUIRE(vu.kink_margin.has_value());
    CHECK(*vu.kink_margin >= 0.0);
  }
}

TEST_CASE("kink margin") {
  SUBCASE("matches finite-difference slopes at the corner") {
    std::mt19937_64 rng(0x1234ULL);
    for (int trial = 0; trial < 20; ++trial) {
      GeneralRateModel<double> m = random_model(rng, Direction::UL, 0.2, 20.0);
      if (trial == 0) {  // symmetric case called out explicitly
        m = GeneralRateModel<double>{7.0, 7.0, 2.0, 3.0, 3.0, 2.0, Direction::UL};
      }
      const double margin = kink_condition(m);
      const long double h = 1e-6L;
      const long double left =
          (ul_rate1(m, 1.0L, 1.0L) - ul_rate1(m, 1.0L, 1.0L - h)) /
          (ul_rate2(m, 1.0L, 1.0L) - ul_rate2(m, 1.0L, 1.0L - h));
      const long double right =
          (ul_rate1(m, 1.0L, 1.0L) - ul_rate1(m, 1.0L - h, 1.0L)) /
          (ul_rate2(m, 1.0L, 1.0L) - ul_rate2(m, 1.0L - h, 1.0L));
      CHECK(testutil::rel_err(margin, left - right) < 1e-4);
    }
  }
  SUBCASE("singular junctions are rejected") {
    GeneralRateModel<double> no_cross{5.0, 10.0, 1.0, 2.0, 0.0, 1.0, Direction::UL};
    CHECK_THROWS_AS(kink_condition(no_cross), std::domain_error);
    GeneralRateModel<double> dead_user{5.0, 0.0, 1.0, 2.0, 3.0, 1.0, Direction::UL};
    CHECK_THROWS_AS(kink_condition(dead_user), std::domain_error);
    CHECK_THROWS_AS(kink_condition(fig_model(1.0, Direction::DL)), std::invalid_argument);
  }
}

TEST_CASE("degenerate and vertical-segment cases") {
  SUBCASE("zero signal gain collapses the region") {
    GeneralRateModel<double> m{0.0, 10.0, 1.0, 5.0, 5.0, 1.0, Direction::DL};
    const auto v = dl_convexity(m);
    CHECK(v.convex);
    CHECK(v.degenerate);
    GeneralRateModel<double> u{5.0, 0.0, 1.0, 5.0, 5.0, 1.0, Direction::UL};
    const auto w = ul_convexity(u);
    CHECK(w.convex);
    CHECK(w.degenerate);
  }
  SUBCASE("vertical second segment: corner is harmless, curvature still counts") {
    GeneralRateModel<double> bad{5.0, 10.0, 0.0, 10.0, 0.0, 1.0, Direction::UL};
    const auto vb = ul_convexity(bad);
    CHECK(!vb.convex);  // alpha1 < 2*mu12*(1+mu12)
    REQUIRE(vb.kink_margin.has_value());
    CHECK(std::isinf(*vb.kink_margin));

    GeneralRateModel<double> good{500.0, 10.0, 0.0, 10.0, 0.0, 1.0, Direction::UL};
    const auto vg = ul_convexity(good);
    CHECK(vg.convex);
  }
}

TEST_CASE("chord oracle") {
  SUBCASE("agrees with the analytic checker on the reference models") {
    for (double cross : {1.0, 10.0}) {
      const auto dl = fig_model(cross, Direction::DL);
      CHECK(chord_oracle(dl, 512).convex == dl_convexity(dl).convex);
      const auto ul = fig_model(cross, Direction::UL);
      CHECK(chord_oracle(ul, 512).convex == ul_convexity(ul).convex);
    }
  }
  SUBCASE("near-linear boundary is convex") {
    GeneralRateModel<double> m{1e-3, 1e-3, 1e-6, 1e-6, 1e-6, 1e-6, Direction::DL};
    CHECK(chord_oracle(m, 256).convex);
  }
  SUBCASE("resolution bound") {
    CHECK_THROWS_AS(chord_oracle(fig_model(1.0, Direction::DL), 15), std::invalid_argument);
    CHECK_NOTHROW(chord_oracle(fig_model(1.0, Direction::DL), 16));
  }
  SUBCASE("oracle verdict fields") {
    const auto v = chord_oracle(fig_model(10.0, Direction::DL), 256);
    CHECK(v.method == CheckMethod::Oracle);
    CHECK(!v.convex);
    CHECK(v.worst_second_derivative > 0.0);  // worst chord excess
    CHECK(v.worst_location > 0.0);
    CHECK(!v.kink_margin.has_value());
  }
  SUBCASE("randomized agreement with the analytic verdict") {
    std::mt19937_64 rng(0x02ac1eULL);
    int compared = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const Direction dir = trial % 2 == 0 ? Direction::DL : Direction::UL;
      const auto m = random_model(rng, dir, 0.01, 100.0);
      const auto analytic = check_convexity(m);
      if (analytic.marginal) continue;
      const auto oracle = chord_oracle(m, 256);
      CHECK(oracle.convex == analytic.convex);
      ++compared;
    }
    CHECK(compared > 40);
  }
}

TEST_CASE("verdicts are invariant under user relabeling") {
  std::mt19937_64 rng(0x51a9ULL);
  for (int trial = 0; trial < 50; ++trial) {
    const Direction dir = trial % 2 == 0 ? Direction::DL : Direction::UL;
    const auto m = random_model(rng, dir, 0.02, 50.0);
    const auto v1 = check_convexity(m);
    const auto v2 = check_convexity(swap_users(m));
    CHECK(v1.convex == v2.convex);
  }
}

TEST_CASE("oracle result does not depend on the thread count") {
  const auto m = fig_model(10.0, Direction::UL);
  setenv("RRA_THREADS", "1", 1);
  const auto serial = chord_oracle(m, 256);
  setenv("RRA_THREADS", "7", 1);
  const auto parallel = chord_oracle(m, 256);
  unsetenv("RRA_THREADS");
  CHECK(serial.worst_second_derivative == parallel.worst_second_derivative);
  CHECK(serial.worst_location == parallel.worst_location);
  CHECK(serial.convex == parallel.convex);
}

}  // TEST_SUITE
