#include <cmath>
#include <string>

#include "doctest.h"
#include "shrinker/catalog.hpp"
#include "shrinker/errors.hpp"

using namespace shrinker;

TEST_CASE("every catalog entry meets its declared expectations") {
    for (const auto& name : example_names()) {
        CAPTURE(name);
        const auto ex = make_example(name);
        CHECK(ex.spec.name == name);
        CHECK_FALSE(ex.spec.expectations.empty());
        for (const auto& e : ex.spec.expectations) CHECK_FALSE(e.oracle.empty());
        const auto report = verify_example(ex);
        for (const auto& o : report.outcomes) {
            CAPTURE(o.expected.property);
            CAPTURE(o.measured);
            CHECK(o.pass);
        }
        CHECK(report.pass);
    }
}

TEST_CASE("sphere family in several dimensions") {
    for (int m = 1; m <= 3; ++m) {
        CAPTURE(m);
        const auto ex = make_example("sphere", {{"m", m}, {"grid", m == 3 ? 16 : 48}});
        CHECK(ex.chart.m == m);
        CHECK(ex.chart.n == m + 1);
        CHECK(verify_example(ex).pass);
    }
    CHECK_THROWS_AS(make_example("sphere", {{"m", 4}}), ConfigError);
    CHECK_THROWS_AS(make_example("sphere", {{"m", 2}, {"n", 2}}), ConfigError);
}

TEST_CASE("non-closing Abresch-Langer parameters are snapped and reported") {
    const auto ex = make_example("al_product", {{"grid", 48}});
    REQUIRE(ex.spec.note);
    CHECK(ex.spec.note->find("7/10") != std::string::npos);
    CHECK(ex.spec.params["k0_a_closed"].get<double>() == doctest::Approx(0.674846).epsilon(1e-5));
    CHECK(ex.chart.m == 2);
    CHECK(ex.chart.n == 4);
    CHECK(ex.chart.grid.all_periodic());
}

TEST_CASE("configuration errors") {
    try {
        make_example("ellipse");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("ellipse") != std::string::npos);
        for (const auto& name : example_names()) CHECK(msg.find(name) != std::string::npos);
    }
    CHECK_THROWS_AS(make_example("circle", {{"radius", 2}}), ConfigError);
    CHECK_THROWS_AS(make_example("circle", {{"grid", 2.5}}), ConfigError);
    CHECK_THROWS_AS(make_example("cylinder", {{"curve", "parabola"}}), ConfigError);
}

TEST_CASE("report JSON names every expectation with its provenance") {
    const auto report = verify_example(make_example("clifford_torus", {{"grid", 32}}));
    const auto j = to_json(report);
    CHECK(j["example"] == "clifford_torus");
    CHECK(j["pass"] == true);
    CHECK(j["expectations"].size() == report.outcomes.size());
    for (const auto& e : j["expectations"]) {
        CHECK(e.contains("provenance"));
        CHECK(e.contains("oracle"));
    }
    CHECK(j["classification"]["verdict"] == "spherical");
}
