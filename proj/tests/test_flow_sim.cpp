#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shrinker/abresch_langer.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/flow_sim.hpp"

using namespace shrinker;

namespace {

double mean_radius(const DiscreteCurve& c) {
    double r = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) r += std::hypot(c.point(i)[0], c.point(i)[1]);
    return r / static_cast<double>(c.size());
}

}  // namespace

TEST_CASE("circle radius follows R^2 = R0^2 - 2t") {
    const auto c = circle_curve(2.0, 512);
    const double dt = 1e-4;
    const auto next = step(c, dt);
    // dR/dt = -1/R, discrete curvature of a regular polygon is 2 sin(pi/N)/(R cos... ) to O(h^2)
    CHECK(mean_radius(next) == doctest::Approx(2.0 - dt / 2.0).epsilon(1e-6));

    StopCriteria stop;
    stop.t_max = 1.0;
    const auto s = run(c, stop);
    CHECK(s.stop_reason == "time");
    CHECK(s.times.back() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean_radius(s.snapshots.back().curve) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    CHECK(s.area.back() == doctest::Approx(2.0 * M_PI).epsilon(2e-3));
}

TEST_CASE("parabolic scaling: lambda F at lambda^2 t") {
    StopCriteria a_stop, b_stop;
    a_stop.t_max = 0.05;
    b_stop.t_max = 0.2;
    const auto a = run(ellipse_curve(1.2, 0.8, 256), a_stop);
    const auto b = run(ellipse_curve(2.4, 1.6, 256), b_stop);
    auto scaled = a.snapshots.back().curve;
    for (double& v : scaled.points) v *= 2.0;
    CHECK(hausdorff_distance(scaled, b.snapshots.back().curve) < 2e-3);
}

TEST_CASE("planar curve stays planar in R^3") {
    StopCriteria stop;
    stop.t_max = 0.2;
    const auto s = run(ellipse_curve(1.2, 0.8, 256, 3), stop);
    for (const auto& snap : s.snapshots) {
        double z = 0.0;
        for (std::size_t i = 0; i < snap.curve.size(); ++i) z = std::max(z, std::abs(snap.curve.point(i)[2]));
        CHECK(z <= 1e-12);
    }
}

TEST_CASE("circle blow-up time and type-1 statistic") {
    StopCriteria stop;
    stop.sup_curvature2 = 400.0;
    const auto s = run(circle_curve(2.0, 256), stop);
    CHECK(s.stop_reason == "curvature");
    const auto fit = estimate_blowup(s);
    CHECK(fit.T_hat == doctest::Approx(2.0).epsilon(0.01));
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.01));
    for (std::size_t i = fit.window_begin; i < fit.type1.size(); ++i)
        CHECK(fit.type1[i] == doctest::Approx(0.5).epsilon(0.05));

    const auto rescaled = huisken_rescale(s, fit.T_hat);
    REQUIRE(!rescaled.empty());
    for (const auto& r : rescaled) {
        CHECK(mean_radius(r.curve) == doctest::Approx(1.0).epsilon(0.01));
        CHECK(r.shrinker_residual < 0.01);
    }
}

TEST_CASE("ellipse rounds out under rescaling") {
    StopCriteria stop;
    stop.sup_curvature2 = 400.0;
    const auto s = run(ellipse_curve(1.2, 0.8, 256), stop);
    // The pointed ends round off first, so sup k^2 dips before it grows without bound.
    const auto lowest = std::min_element(s.sup_curvature2.begin(), s.sup_curvature2.end()) - s.sup_curvature2.begin();
    CHECK(s.sup_curvature2[lowest] < s.sup_curvature2.front());
    for (std::size_t i = lowest + 1; i < s.sup_curvature2.size(); ++i)
        CHECK(s.sup_curvature2[i] >= s.sup_curvature2[i - 1]);
    const auto fit = estimate_blowup(s);
    CHECK(fit.T_hat > s.times.back());
    for (std::size_t i = fit.window_begin; i < fit.type1.size(); ++i) {
        CHECK(fit.type1[i] >= 0.3);
        CHECK(fit.type1[i] <= 0.7);
    }
    CHECK(fit.type1.back() == doctest::Approx(0.5).epsilon(0.1));

    const auto rescaled = huisken_rescale(s, fit.T_hat);
    CHECK(rescaled.front().shrinker_residual >= 0.1);
    double below = 1.0;
    for (std::size_t i = 0; i < rescaled.size() && rescaled[i].t < 0.95 * fit.T_hat; ++i) {
        if (i > 0) CHECK(rescaled[i].shrinker_residual <= rescaled[i - 1].shrinker_residual);
        below = rescaled[i].shrinker_residual;
    }
    CHECK(below <= 0.05);
}

TEST_CASE("closed Abresch-Langer curve shrinks self-similarly") {
    const auto cc = nearest_closed(0.7);
    const auto c0 = resample(curve_from_chart(al_closed_chart(cc.k0, cc.length, 1024)), 1024);
    StopCriteria stop;
    stop.t_max = 0.25;
    const auto s = run(c0, stop);
    const double size = std::sqrt(2.0 * c0.length());
    for (const auto& r : huisken_rescale(s, 0.5)) {
        CHECK(hausdorff_distance(r.curve, c0) <= 0.02 * size);
        CHECK(r.shrinker_residual < 1e-2);
    }
}

TEST_CASE("no blow-up is reported as such") {
    FlowSeries flat;
    for (int i = 0; i < 30; ++i) {
        flat.times.push_back(0.1 * i);
        flat.sup_curvature2.push_back(1.0);
    }
    CHECK_THROWS_AS(estimate_blowup(flat), NoBlowupError);

    FlowSeries shrinking = flat;
    for (int i = 0; i < 30; ++i) shrinking.sup_curvature2[i] = 1.0 / (1.0 + i);
    CHECK_THROWS_AS(estimate_blowup(shrinking), NoBlowupError);

    FlowSeries short_series;
    short_series.times = {0.0, 0.1};
    short_series.sup_curvature2 = {1.0, 2.0};
    CHECK_THROWS_AS(estimate_blowup(short_series), NoBlowupError);
}
