#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "shrinker/catalog.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/shrinker_analysis.hpp"

using namespace shrinker;

namespace {

constexpr double kPi = std::numbers::pi;

SampledChart ellipse_chart(int count) {
    auto spec = immersion_from_jets(2, [](std::span<const Jet> x, std::span<Jet> out) {
        out[0] = 1.2 * cos(x[0]);
        out[1] = 0.8 * sin(x[0]);
    });
    return evaluate_chart(spec, ParameterGrid({Axis::periodic(count, 2 * kPi)}));
}

// Surface in R^4 with non-parallel principal normal and distinct principal curvatures.
SampledChart generic_surface(int count) {
    auto spec = immersion_from_jets(4, [](std::span<const Jet> x, std::span<Jet> out) {
        out[0] = x[0];
        out[1] = x[1];
        out[2] = 0.7 * x[0] * x[0] + 0.2 * x[1] * x[1] + 1.0;
        out[3] = 0.5 * x[0] * x[1] - 0.3 * x[1] * x[1] * x[1];
    });
    return evaluate_chart(spec, ParameterGrid({Axis::truncated(-0.5, 0.5, count), Axis::truncated(-0.5, 0.5, count)}));
}

// Keeps the chart alive alongside the fields that point into it.
struct Loaded {
    std::unique_ptr<SampledChart> chart;
    GeometryFields fields;
};

Loaded load(SampledChart chart, const FieldOptions& opts = {}) {
    Loaded l{std::make_unique<SampledChart>(std::move(chart)), {}};
    l.fields = compute_fields(*l.chart, opts);
    return l;
}

Loaded load(const std::string& name, const nlohmann::json& params = nlohmann::json::object()) {
    return load(make_example(name, params).chart);
}

ClassifyOptions options_for(const Example& ex) { return classify_options(ex.spec, ex.chart); }

}  // namespace

TEST_CASE("shrinker equation on circle, ellipse and a codimension-2 sphere") {
    CHECK(shrinker_residual(load("circle").fields, 1e-12).max <= 1e-12);

    // At (1.2, 0) the curvature is a/b^2 = 1.875 and F^perp = F, so |H + F^perp| = 1.875 - 1.2.
    const auto ellipse_loaded = load(ellipse_chart(256));
    const auto& ellipse = ellipse_loaded.fields;
    const auto field = shrinker_field(ellipse);
    CHECK(field.values[0] == doctest::Approx(0.675).epsilon(1e-10));
    const auto report = shrinker_residual(ellipse, 1e-6);
    CHECK(report.max >= 0.1);
    CHECK_FALSE(report.pass);

    const auto s3_loaded = load("sphere", {{"m", 3}, {"n", 5}, {"grid", 16}});
    const auto& s3 = s3_loaded.fields;
    CHECK(s3.n() == 5);
    CHECK(shrinker_residual(s3, 1e-12).max <= 1e-12);
}

TEST_CASE("ss7 vanishes on S^2(sqrt 2)") {
    const auto l = load("sphere");
    const auto& f = l.fields;
    const auto r = identity_residual(IdentityKind::ss7, f, 1e-9, default_hypotheses(*f.chart));
    CHECK(r.max <= 1e-9);
    CHECK(r.pass);
}

TEST_CASE("P is a projection and theta^i A_ij = 0 on the round cylinder") {
    const auto l = load("cylinder", {{"grid", 64}});
    const auto& f = l.fields;
    const auto hyp = default_hypotheses(*f.chart);
    const auto e0 = identity_residual(IdentityKind::extra0, f, 1e-10, hyp);
    const auto e9 = identity_residual(IdentityKind::extra9, f, 1e-9, hyp);
    CHECK(e0.max <= 1e-10);
    CHECK(e9.max <= 1e-9);
    CHECK(e0.mask_fraction == 0.0);

    const auto scl = load("sphere_cylinder", {{"d", 2}, {"grid", 24}});
    const auto& sc = scl.fields;
    CHECK(identity_residual(IdentityKind::extra9, sc, 1e-9, default_hypotheses(*sc.chart)).max <= 1e-9);
}

TEST_CASE("pinching ratio on closed-form examples") {
    const auto sphere = pinching_ratio(load("sphere").fields);
    CHECK(sphere.mean == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(sphere.spread <= 1e-10);
    const auto circle = pinching_ratio(load("circle").fields);
    CHECK(circle.min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(circle.max == doctest::Approx(1.0).epsilon(1e-12));
    const auto torus = pinching_ratio(load("clifford_torus").fields);
    CHECK(torus.mean == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(torus.spread <= 1e-8);
    CHECK_THROWS_AS(pinching_ratio(load("plane").fields), MaskedError);
}

TEST_CASE("pointwise invariants on a generic surface") {
    const auto c = generic_surface(24);
    const auto f = compute_fields(c);
    const auto stats = pinching_ratio(f);
    const auto reduced = reduced_tensor_norm2(f);
    const int m = f.m();
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!c.grid.is_interior(p) || !f.sff.nu_defined[p]) continue;
        CHECK(stats.ratio[p] >= 1.0 / m - 1e-12);
        CHECK(reduced[p] >= -1e-12);
        CHECK(reduced[p] == doctest::Approx(f.derived.A2[p] - f.derived.P2[p] / f.derived.H2[p]).epsilon(1e-9));
        double tr = 0.0;
        const double* gi = f.metric.ginv_at(p);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) tr += gi[i * m + j] * f.derived.P[(p * m + i) * m + j];
        CHECK(tr == doctest::Approx(f.derived.H2[p]).epsilon(1e-10));
    }
    CHECK(parallel_nu_defect(f) > 1e-3);
    const auto lemma1 = identity_residual(IdentityKind::lemma1_sym, f, 1e-9, default_hypotheses(c));
    CHECK(lemma1.mask_fraction == 1.0);
    CHECK(lemma1.mask_warning);
}

TEST_CASE("principal rank") {
    const auto cyl = principal_rank(load("cylinder", {{"grid", 64}}).fields);
    CHECK(cyl.mode == 1);
    CHECK_FALSE(cyl.ambiguous);
    const auto torus = principal_rank(load("clifford_torus").fields);
    CHECK(torus.mode == 2);
    const auto plane = principal_rank(load("plane").fields);
    CHECK(plane.mode == -1);
    CHECK(std::all_of(plane.rank.begin(), plane.rank.end(), [](int r) { return r == -1; }));
    CHECK_FALSE(plane.warnings.empty());
}

TEST_CASE("Gaussian weighted integrals") {
    const auto cl = load("circle");
    const auto& circle = cl.fields;
    const std::vector<double> one(circle.points(), 1.0);
    const auto w = gaussian_weighted_integral(circle, one, "unit");
    CHECK(w.value == doctest::Approx(2 * kPi * std::exp(-0.5)).epsilon(1e-12));
    CHECK(std::abs(w.value - 3.8110) < 1e-4);

    for (const char* name : {"clifford_torus", "sphere"}) {
        const auto l = load(name);
        const auto& f = l.fields;
        const auto t1 = gaussian_weighted_integral(f, lemma4_term1(f), "lemma4_term1");
        const auto t2 = gaussian_weighted_integral(f, lemma4_term2(f), "lemma4_term2");
        CHECK(std::abs(t1.value + t2.value) <= 1e-9);
    }

    const auto pl = load("plane");
    const auto& plane = pl.fields;
    const std::vector<double> ones(plane.points(), 1.0);
    CHECK_THROWS_AS(gaussian_weighted_integral(plane, ones, "unit"), Error);
}

TEST_CASE("classification of catalog examples") {
    auto verdict = [](const std::string& name, const nlohmann::json& params = nlohmann::json::object()) {
        const auto ex = make_example(name, params);
        return classify(compute_fields(ex.chart), options_for(ex));
    };
    const auto torus = verdict("clifford_torus");
    CHECK(torus.verdict == Verdict::spherical);
    CHECK(torus.evidence["F2_minus_m_max"].get<double>() <= 1e-8);

    CHECK(verdict("al_cylinder", {{"grid", 64}}).verdict == Verdict::class_i_curve_cylinder);

    const auto round = verdict("sphere_cylinder", {{"d", 1}, {"k", 1}});
    CHECK(round.verdict == Verdict::class_ii_product);
    CHECK(round.rank == 1);

    const auto s2r = verdict("sphere_cylinder", {{"d", 2}, {"grid", 24}});
    CHECK(s2r.verdict == Verdict::class_ii_product);
    CHECK(s2r.rank == 2);
    CHECK(std::sqrt(s2r.evidence["H2_min"].get<double>()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(s2r.evidence["vanish_max"].get<double>() <= 1e-8);

    const auto product = verdict("al_product", {{"grid", 64}});
    CHECK(product.verdict == Verdict::non_spherical);
    CHECK(product.evidence["parallel_nu_defect"].get<double>() >= 0.01);

    CHECK(verdict("plane").verdict == Verdict::unknown);

    ClassifyOptions o;
    o.compact = true;
    CHECK(classify(compute_fields(ellipse_chart(128)), o).verdict == Verdict::non_shrinker);
}

TEST_CASE("differential identities converge on the Abresch-Langer cylinder") {
    std::vector<ResidualReport> mean, ss24;
    for (int grid : {64, 128}) {
        const auto ex = make_example("al_cylinder", {{"grid", grid}});
        const auto fd = refit_finite_difference(ex.chart);
        const auto f = compute_fields(fd);
        HypothesisOptions hyp = default_hypotheses(fd);
        mean.push_back(identity_residual(IdentityKind::mean, f, 1.0, hyp));
        ss24.push_back(identity_residual(IdentityKind::ss24, f, 1.0, hyp));
    }
    const auto mean_order = convergence_order(mean);
    const auto ss24_order = convergence_order(ss24);
    REQUIRE(mean_order);
    REQUIRE(ss24_order);
    CHECK(*mean_order == doctest::Approx(2.0).epsilon(0.15));
    CHECK(*ss24_order == doctest::Approx(2.0).epsilon(0.15));
    CHECK(ss24.back().mask_fraction == 0.0);
}

TEST_CASE("identities needing normal derivatives report the missing capability") {
    FieldOptions opts;
    opts.normal_derivatives = false;
    const auto l = load(make_example("sphere", {{"grid", 16}}).chart, opts);
    const auto& f = l.fields;
    CHECK_THROWS_AS(identity_residual(IdentityKind::ss7, f, 1e-9, HypothesisOptions{}), CapabilityError);
    CHECK_NOTHROW(shrinker_residual(f, 1e-9));
    CHECK_THROWS_AS(parse_identity_kind("ss99"), ConfigError);
    CHECK(to_string(parse_identity_kind("lemma3")) == "lemma3");
}
