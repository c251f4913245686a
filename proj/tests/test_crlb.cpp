#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "uavloc/crlb.hpp"
#include "uavloc/rng.hpp"

using namespace uavloc;
using Catch::Approx;

TEST_CASE("crlb_sigma closed form") {
    ChannelParams p;
    CHECK(crlb_sigma(200.0, kPi / 4.0, LinkClass::kLos, p) == Approx(47.87).margin(0.05));
    CHECK(crlb_sigma(200.0, 0.0, LinkClass::kLos, p) ==
          Approx(200.0 * std::log(10.0) / 20.0 * 10.0).epsilon(1e-12));
    CHECK(crlb_sigma(400.0, 0.7, LinkClass::kNlos, p) ==
          Approx(2.0 * crlb_sigma(200.0, 0.7, LinkClass::kNlos, p)).epsilon(1e-12));
    CHECK_THROWS_AS(crlb_sigma(0.0, 0.3, LinkClass::kLos, p), std::invalid_argument);
}

TEST_CASE("squared-weight combination") {
    CHECK(detail::squared_weight_rms(1.0, 3.0, 9.0) == Approx(3.0).epsilon(1e-12));
    CHECK(detail::squared_weight_rms(0.0, 3.0, 9.0) == Approx(9.0).epsilon(1e-12));
    CHECK(detail::squared_weight_rms(0.5, 4.0, 4.0) ==
          Approx(4.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("crlb_avg collapses at the probability extremes") {
    ChannelParams p;
    const double d = 300.0;
    CHECK(crlb_avg(d, kPi / 2.0, p) ==
          Approx(crlb_sigma(d, kPi / 2.0, LinkClass::kLos, p)).epsilon(1e-9));
    for (double theta : {0.1, 0.5, 1.0}) {
        const double avg = crlb_avg(d, theta, p);
        const double lo = crlb_sigma(d, theta, LinkClass::kLos, p);
        const double hi = crlb_sigma(d, theta, LinkClass::kNlos, p);
        CHECK(avg <= std::max(lo, hi) + 1e-12);
    }
}

TEST_CASE("Fisher oracle validates the closed form") {
    ChannelParams p;
    for (double d : {50.0, 200.0, 1000.0}) {
        for (double theta : {0.1, 0.7, 1.4}) {
            for (LinkClass cls : {LinkClass::kLos, LinkClass::kNlos}) {
                const double numeric = fisher_crlb_oracle(d, theta, cls, p);
                const double closed = crlb_sigma(d, theta, cls, p);
                CHECK(numeric == Approx(closed).epsilon(5e-3));
            }
        }
    }
}

TEST_CASE("Fisher oracle scales with the shadowing scale") {
    ChannelParams p;
    ChannelParams halved = p;
    halved.a_los = p.a_los / 2.0;
    const double full = fisher_crlb_oracle(300.0, 0.6, LinkClass::kLos, p);
    const double half = fisher_crlb_oracle(300.0, 0.6, LinkClass::kLos, halved);
    CHECK(half == Approx(full / 2.0).epsilon(1e-3));
}

TEST_CASE("Fisher oracle is independent of the link budget constant") {
    ChannelParams p;
    ChannelParams shifted = p;
    shifted.c_offset_dbm = -55.0;
    const double a = fisher_crlb_oracle(250.0, 0.9, LinkClass::kNlos, p);
    const double b = fisher_crlb_oracle(250.0, 0.9, LinkClass::kNlos, shifted);
    CHECK(a == Approx(b).epsilon(1e-12));
}

TEST_CASE("estimator_std exact and simulated") {
    ChannelParams p;
    CHECK(detail::lognormal_range_std(500.0, 0.0) == 0.0);

    const double d = 300.0, theta = 0.8;
    const int n = 4;
    const double formula = estimator_std(d, theta, LinkClass::kLos, n, p);

    // Monte-Carlo oracle: simulate the averaged-RSS distance estimator
    const double sigma_eff = shadowing_sigma(theta, LinkClass::kLos, p) / std::sqrt(double(n));
    std::mt19937_64 rng = substream(29, 0);
    std::normal_distribution<double> normal(0.0, sigma_eff);
    const int trials = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double d_hat = d * std::pow(10.0, normal(rng) / 20.0);
        sum += d_hat;
        sum2 += d_hat * d_hat;
    }
    const double empirical = std::sqrt((sum2 - sum * sum / trials) / (trials - 1));
    CHECK(empirical == Approx(formula).epsilon(0.01));
}

TEST_CASE("estimator_std small-noise expansion") {
    const double d = 150.0;
    const double sigma = 0.1;
    const double linear = d * kLn10Over20 * sigma;
    CHECK(detail::lognormal_range_std(d, sigma) / linear == Approx(1.0).epsilon(0.01));
}

TEST_CASE("estimator deviation never beats the per-sample bound") {
    ChannelParams p;
    const double d = 100.0;
    for (double sigma : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        for (int n : {1, 4, 100}) {
            const double eff = sigma / std::sqrt(double(n));
            CHECK(detail::lognormal_range_std(d, eff) >=
                  d * kLn10Over20 * eff * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("coverage radius brackets and extremes") {
    ChannelParams p;
    CoverageSpec relaxed;
    relaxed.delta = 1e6;
    const CoverageRadius wide = coverage_radius(200.0, relaxed, p);
    CHECK(wide.unbounded);
    CHECK(wide.radius_m == Approx(100.0 * 200.0));

    CoverageSpec strict;
    strict.delta = 1e-6;
    const CoverageRadius none = coverage_radius(200.0, strict, p);
    CHECK_FALSE(none.unbounded);
    CHECK(none.radius_m == 0.0);
}

TEST_CASE("coverage radius agrees with a 1 m scan of the condition") {
    ChannelParams p;
    CoverageSpec spec;  // delta = 2, n = 1
    const double h = 200.0;
    const CoverageRadius rc = coverage_radius(h, spec, p);
    CHECK_FALSE(rc.unbounded);
    CHECK(rc.radius_m > 0.0);

    auto within = [&](double r) {
        const double d = std::hypot(h, r);
        const double theta = std::atan2(h, r);
        return mixture_estimator_std(d, theta, spec.n_samples, p) <=
               spec.delta * crlb_avg(d, theta, p);
    };
    double first_violation = -1.0;
    for (double r = 0.0; r <= 100.0 * h; r += 1.0) {
        if (!within(r)) {
            first_violation = r;
            break;
        }
    }
    REQUIRE(first_violation > 0.0);
    CHECK(rc.radius_m <= first_violation);
    CHECK(rc.radius_m >= first_violation - 1.0 - 0.1);
}

TEST_CASE("coverage radius monotone in delta and n_samples") {
    ChannelParams p;
    double prev = 0.0;
    for (double delta : {1.2, 2.0, 3.0}) {
        CoverageSpec spec;
        spec.delta = delta;
        const double r = coverage_radius(250.0, spec, p).radius_m;
        CHECK(r >= prev);
        prev = r;
    }
    prev = 0.0;
    for (int n : {1, 2, 10}) {
        CoverageSpec spec;
        spec.n_samples = n;
        const double r = coverage_radius(250.0, spec, p).radius_m;
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("three-circle closed form") {
    CHECK(coverage_area_three(80.0, 0.0) == Approx(kPi * 80.0 * 80.0).epsilon(1e-9));
    CHECK(coverage_area_three(80.0, std::sqrt(3.0) * 80.0) == Approx(0.0).margin(1e-4));
    CHECK(coverage_area_three(80.0, 200.0) == 0.0);  // no common region

    // numeric-integration oracle
    const double r = 100.0, l = 120.0;
    const std::vector<Vec2> centers{
        {0.0, 0.0}, {l, 0.0}, {l / 2.0, l * std::sqrt(3.0) / 2.0}};
    const std::vector<double> radii{r, r, r};
    const double numeric = coverage_area_numeric(centers, radii, 0.05);
    CHECK(coverage_area_three(r, l) == Approx(numeric).epsilon(1e-3));
}

TEST_CASE("three-circle closed form vs grid on random configurations") {
    std::mt19937_64 rng = substream(31, 0);
    std::uniform_real_distribution<double> radius(30.0, 150.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int i = 0; i < 6; ++i) {
        const double r = radius(rng);
        const double l = frac(rng) * std::sqrt(3.0) * r;
        const std::vector<Vec2> centers{
            {0.0, 0.0}, {l, 0.0}, {l / 2.0, l * std::sqrt(3.0) / 2.0}};
        const std::vector<double> radii{r, r, r};
        const double numeric = coverage_area_numeric(centers, radii, r / 500.0);
        CHECK(coverage_area_three(r, l) == Approx(numeric).epsilon(2e-3));
    }
}

TEST_CASE("numeric area on known shapes") {
    const std::vector<Vec2> single{{5.0, -3.0}};
    const std::vector<double> r50{50.0};
    CHECK(coverage_area_numeric(single, r50, 0.1) ==
          Approx(kPi * 2500.0).epsilon(2e-3));

    const std::vector<Vec2> apart{{0.0, 0.0}, {1000.0, 0.0}};
    const std::vector<double> radii{100.0, 100.0};
    CHECK(coverage_area_numeric(apart, radii, 0.5) == 0.0);

    CHECK_THROWS_AS(coverage_area_numeric({}, {}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(coverage_area_numeric(single, r50, 0.0), std::invalid_argument);
}

TEST_CASE("localization coverage end to end") {
    ChannelParams p;
    CoverageSpec spec;

    Trajectory t;  // M = 3, R = 120, h = 200
    const CoverageResult three = localization_coverage(t, spec, p);
    CHECK(three.method == CoverageMethod::kClosedFormThree);
    CHECK(three.per_waypoint_radius_m.size() == 3);
    CHECK(three.area_m2 > 0.0);
    CHECK(three.area_m2 <=
          kPi * three.per_waypoint_radius_m[0] * three.per_waypoint_radius_m[0] * 1.005);

    Trajectory four = t;
    four.n_waypoints = 4;
    const CoverageResult numeric = localization_coverage(four, spec, p);
    CHECK(numeric.method == CoverageMethod::kNumeric);
    CHECK(numeric.area_m2 > 0.0);
    CHECK(numeric.area_m2 < three.area_m2);  // one more disk can only shrink it

    // all circles coincide when the path radius vanishes
    Trajectory point = t;
    point.n_waypoints = 4;
    point.radius_m = 1e-6;
    const CoverageResult full = localization_coverage(point, spec, p);
    const double rc = full.per_waypoint_radius_m[0];
    CHECK(full.area_m2 == Approx(kPi * rc * rc).epsilon(5e-3));

    // a barely-passing delta leaves disks too small to intersect
    CoverageSpec tight;
    tight.delta = 1.01;
    const CoverageResult empty = localization_coverage(t, tight, p);
    CHECK(empty.per_waypoint_radius_m[0] > 0.0);
    CHECK(empty.per_waypoint_radius_m[0] < leg_length(t) / std::sqrt(3.0));
    CHECK(empty.area_m2 == 0.0);
}
