#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "shrinker/chart.hpp"
#include "shrinker/errors.hpp"

using namespace shrinker;

namespace {

ImmersionSpec torus_spec(double R, double r) {
    return immersion_from_jets(3, [R, r](std::span<const Jet> x, std::span<Jet> out) {
        const Jet rho = R + r * cos(x[1]);
        out[0] = rho * cos(x[0]);
        out[1] = rho * sin(x[0]);
        out[2] = r * sin(x[1]);
    });
}

ParameterGrid torus_grid(int n) {
    const double two_pi = 2.0 * std::numbers::pi;
    return ParameterGrid({Axis::periodic(n, two_pi), Axis::periodic(n, two_pi)});
}

}  // namespace

TEST_CASE("jet derivatives agree with hand-computed torus partials") {
    const auto spec = torus_spec(2.0, 0.5);
    const std::vector<double> x{0.3, 1.1};
    std::vector<double> d1(6), d2(12), d3(24);
    spec.first(x, d1);
    spec.second(x, d2);
    spec.third(x, d3);
    const double rho = 2.0 + 0.5 * std::cos(1.1);
    CHECK(d1[0] == doctest::Approx(-rho * std::sin(0.3)));
    CHECK(d1[3 + 2] == doctest::Approx(0.5 * std::cos(1.1)));
    // d^2 x / du dv = 0.5 sin v sin u
    CHECK(d2[(0 * 2 + 1) * 3 + 0] == doctest::Approx(0.5 * std::sin(1.1) * std::sin(0.3)));
    // d^3 y / du^3 = -rho cos u
    CHECK(d3[0 * 3 + 1] == doctest::Approx(-rho * std::cos(0.3)));
}

TEST_CASE("finite-difference refit converges to the analytic derivatives") {
    double prev = 0;
    for (int n : {32, 64}) {
        const auto exact = evaluate_chart(torus_spec(2.0, 0.5), torus_grid(n));
        const auto fdc = refit_finite_difference(exact);
        CHECK(fdc.source == DerivativeSource::finite_difference);
        double err = 0;
        for (std::size_t k = 0; k < exact.d3F.size(); ++k) err = std::max(err, std::abs(exact.d3F[k] - fdc.d3F[k]));
        if (prev > 0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.1));
        prev = err;
        CHECK(second_derivative_symmetry_defect(fdc) < 1e-12);
    }
}

TEST_CASE("a collapsed direction is reported as a degenerate immersion") {
    const auto spec = immersion_from_jets(3, [](std::span<const Jet> x, std::span<Jet> out) {
        out[0] = cos(x[0]);
        out[1] = sin(x[0]);
        out[2] = x[1] * x[1];
    });
    const ParameterGrid g({Axis::periodic(16, 2.0 * std::numbers::pi), Axis::truncated(-1.0, 1.0, 11)});
    CHECK_THROWS_AS(evaluate_chart(spec, g), DegenerateImmersionError);
}

TEST_CASE("product chart keeps factors in separate ambient blocks") {
    const auto a = evaluate_chart(torus_spec(2.0, 0.5), torus_grid(8));
    const auto flat = flat_chart(1, 1.0, 9);
    const auto c = make_product(a, flat);
    CHECK(c.m == 3);
    CHECK(c.n == 4);
    CHECK(c.points() == a.points() * flat.points());
    const std::size_t p = 5 * flat.points() + 7;
    CHECK(c.first(p, 2)[3] == doctest::Approx(1.0));
    CHECK(c.first(p, 0)[3] == 0.0);
    CHECK(c.second(p, 0, 1)[0] == a.second(5, 0, 1)[0]);
    CHECK(c.third(p, 1, 1, 1)[2] == a.third(5, 1, 1, 1)[2]);
}

TEST_CASE("chart dump round-trips positions bit for bit") {
    const auto c = evaluate_chart(torus_spec(2.0, 0.5), torus_grid(12));
    std::stringstream cols;
    write_chart_columns(c, cols);
    const auto back = read_chart(cols, chart_metadata_json(c));
    CHECK(back.F == c.F);
    CHECK(back.source == DerivativeSource::finite_difference);
}
