#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shrinker/abresch_langer.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/tensor_lab.hpp"
#include "shrinker/shrinker_analysis.hpp"

using namespace shrinker;

namespace {
constexpr double kPi = std::numbers::pi;
double crit(double k) { return k * std::exp(-0.5 * k * k); }
}  // namespace

TEST_CASE("right-hand side on hand-computed states") {
    auto d = al_rhs({0.0, std::cos(0.3), std::sin(0.3), 0.3 + kPi / 2, 1.0});
    CHECK(d[3] == doctest::Approx(0.0).epsilon(1e-15));
    d = al_rhs({0.0, 1.5, 0.0, kPi / 2, 0.5});
    CHECK(std::abs(d[3]) < 1e-15);
    CHECK(d[2] == 0.5);
    d = al_rhs({0.0, 1.0, 1.0, 0.0, 0.8});
    CHECK(d[3] == doctest::Approx(0.8));
    CHECK(d[0] == 1.0);
}

TEST_CASE("k0 = 1 is the unit circle") {
    const auto tr = integrate(1.0, 2 * kPi);
    const auto& e = tr.states.back();
    CHECK(std::hypot(e.x - 1.0, e.y) <= 1e-9);
    CHECK(tr.c_gamma == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(tr.max_drift <= 1e-10);
    const auto info = curve_period(1.0);
    CHECK(info.rotation_ratio() == 1.0);
}

TEST_CASE("critical values of k exp(-k^2/2) = c") {
    const auto [a, b] = critical_values(std::exp(-0.5));
    CHECK(a == 1.0);
    CHECK(b == 1.0);
    const auto [lo, hi] = critical_values(0.55);
    CHECK(lo < 1.0);
    CHECK(hi > 1.0);
    CHECK(std::abs(crit(lo) - 0.55) <= 1e-12);
    CHECK(std::abs(crit(hi) - 0.55) <= 1e-12);
    CHECK_THROWS_AS(critical_values(0.7), NoRootError);
    CHECK_THROWS_AS(critical_values(-0.1), NoRootError);
}

TEST_CASE("curvature oscillates between the two critical values") {
    const double c = crit(0.7);
    const auto [lo, hi] = critical_values(c);
    CHECK(lo == doctest::Approx(0.7).epsilon(1e-12));
    const auto ext = curvature_extrema(0.7, 20.0);
    REQUIRE(ext.size() >= 6);
    for (std::size_t i = 0; i < ext.size(); ++i) {
        const double expect = i % 2 == 0 ? hi : lo;
        CHECK(std::abs(ext[i].k - expect) <= 1e-6);
        CHECK(std::abs(std::hypot(ext[i].x, ext[i].y) - ext[i].k) <= 1e-6);
    }
}

TEST_CASE("rotation ratio and period agree with an independent RK45 integration") {
    // Reference values from scipy solve_ivp (RK45, rtol 1e-12) of the same system.
    const auto info = curve_period(0.7);
    CHECK(info.rotation_ratio() == doctest::Approx(0.70113).epsilon(2e-5));
    CHECK(info.period == doctest::Approx(4.518).epsilon(2e-4));
    CHECK(info.k_partner == doctest::Approx(1.33413).epsilon(1e-5));
    CHECK(curve_period(0.3).rotation_ratio() == doctest::Approx(0.66457).epsilon(2e-5));
}

TEST_CASE("conserved quantity holds to 100 rel_tol over length 50") {
    for (double k0 : {0.3, 0.5, 0.8, 1.2, 2.0, 3.0}) {
        const auto tr = integrate(k0, 50.0, 1e-12);
        INFO("k0 = " << k0);
        CHECK(tr.max_drift <= 100 * 1e-12);
    }
}

TEST_CASE("equal conserved values give congruent curves") {
    const auto [lo, hi] = critical_values(crit(0.6));
    const auto info = curve_period(lo);
    std::vector<double> sa, sb;
    for (int i = 0; i < 40; ++i) {
        sb.push_back(0.1 * i);
        sa.push_back(0.5 * info.period + 0.1 * i);
    }
    const auto A = sample_states(lo, sa);
    const auto B = sample_states(hi, sb);
    for (int i = 0; i < 40; ++i) {
        CHECK(std::abs(A[i].k - B[i].k) <= 1e-8);
        CHECK(std::abs(std::hypot(A[i].x, A[i].y) - std::hypot(B[i].x, B[i].y)) <= 1e-8);
    }
}

TEST_CASE("best rational approximation") {
    const auto r = best_rational(0.70113, 10);
    CHECK(r.p == 7);
    CHECK(r.q == 10);
    const auto s = best_rational(std::sqrt(0.5), 20);
    CHECK(s.p == 12);
    CHECK(s.q == 17);
}

TEST_CASE("closed curve search finds the circle and a non-circular curve") {
    ClosedSearchOptions o;
    o.samples = 64;
    const auto found = find_closed(0.3, 1.0, o);
    REQUIRE(found.size() >= 2);
    CHECK(found.back().k0 == 1.0);
    CHECK(found.back().closure_defect <= 1e-9);
    const auto& first = found.front();
    CHECK(first.k0 < 0.99);
    CHECK(first.closure_defect <= 1e-6);
    const auto chart = al_closed_chart(first.k0, first.length, 512);
    const auto f = compute_fields(chart);
    CHECK(shrinker_residual(f, 1e-6).pass);
}

TEST_CASE("nearest closed curve to k0 = 0.7 has rotation 7/10") {
    const auto c = nearest_closed(0.7);
    CHECK(c.rotation.p == 7);
    CHECK(c.rotation.q == 10);
    CHECK(c.k0 == doctest::Approx(0.68).epsilon(0.02));
    CHECK(c.closure_defect <= 1e-6);
}

TEST_CASE("embedding into higher dimensions") {
    const auto circle = al_closed_chart(1.0, 2 * kPi, 128);
    const double a = 0.4;
    // Rotation in the (x0, x2) plane of R^4.
    std::vector<double> R{std::cos(a), 0, -std::sin(a), 0, 0, 1, 0, 0, std::sin(a), 0, std::cos(a), 0, 0, 0, 0, 1};
    const auto rot = embed(circle, 4, R, {0, 0, 0, 0});
    CHECK_FALSE(rot.warning.has_value());
    CHECK(shrinker_residual(compute_fields(rot.chart), 1e-12).pass);
    std::vector<double> I3{1, 0, 0, 0, 1, 0, 0, 0, 1};
    const auto moved = embed(circle, 3, I3, {1, 0, 0});
    CHECK(moved.warning.has_value());
    CHECK(shrinker_residual(compute_fields(moved.chart), 1.0).max >= 0.5);
    const auto arc = al_arc_chart(0.7, -2.0, 2.0, 101);
    const auto planar = shrinker_residual(compute_fields(arc), 1.0).max;
    const auto lifted = shrinker_residual(compute_fields(embed(arc, 3, I3, {0, 0, 0}).chart), 1.0).max;
    CHECK(std::abs(planar - lifted) < 1e-12);
}
