#include "shrinker/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "shrinker/abresch_langer.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/report.hpp"

namespace shrinker {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPolarCut = 0.4;

/// Defaults overlaid with user parameters; unknown keys are rejected.
ordered_json merge_params(const std::string& name, ordered_json defaults, const json& given) {
    if (!given.is_null() && !given.is_object()) throw ConfigError(name + ": parameters must be an object");
    for (const auto& [key, value] : given.items()) {
        if (!defaults.contains(key)) {
            std::string known;
            for (const auto& [k, v] : defaults.items()) known += (known.empty() ? "" : ", ") + k;
            throw ConfigError(name + ": unknown parameter '" + key + "' (accepted: " + known + ")");
        }
        if (defaults[key].is_number() != value.is_number() && !defaults[key].is_null())
            throw ConfigError(name + ": parameter '" + key + "' has the wrong type");
        defaults[key] = value;
    }
    return defaults;
}

int positive_int(const ordered_json& p, const char* key, int minimum) {
    const double v = p.at(key).get<double>();
    if (v != std::floor(v) || v < minimum)
        throw ConfigError(std::string("parameter '") + key + "' must be an integer >= " + std::to_string(minimum));
    return static_cast<int>(v);
}

double positive_real(const ordered_json& p, const char* key) {
    const double v = p.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("parameter '") + key + "' must be positive");
    return v;
}

Expectation expect(std::string property, Relation rel, double value, double tol, Provenance prov, std::string oracle) {
    Expectation e;
    e.property = std::move(property);
    e.relation = rel;
    e.value = value;
    e.tolerance = tol;
    e.provenance = prov;
    e.oracle = std::move(oracle);
    return e;
}

Expectation expect_verdict(Verdict v, Provenance prov, std::string oracle) {
    Expectation e = expect("verdict", Relation::equals, 0.0, 0.0, prov, std::move(oracle));
    e.text = to_string(v);
    return e;
}

/// S^m(radius) in R^n through hyperspherical angles; all but the last angle are
/// truncated away from the coordinate poles.
SampledChart round_sphere(int m, int n, double radius, int count) {
    if (m < 1 || m > 3) throw ConfigError("sphere: m must be 1, 2 or 3");
    if (n < m + 1) throw ConfigError("sphere: ambient dimension must be at least m + 1");
    auto spec = immersion_from_jets(n, [m, n, radius](std::span<const Jet> x, std::span<Jet> out) {
        Jet prod = Jet(radius);
        for (int a = 0; a < m; ++a) {
            out[a] = prod * cos(x[a]);
            prod = prod * sin(x[a]);
        }
        out[m] = prod;
        for (int a = m + 1; a < n; ++a) out[a] = Jet(0.0);
    });
    std::vector<Axis> axes;
    for (int a = 0; a + 1 < m; ++a) axes.push_back(Axis::truncated(kPolarCut, kPi - kPolarCut, count));
    axes.push_back(Axis::periodic(count, 2 * kPi));
    return evaluate_chart(spec, ParameterGrid(std::move(axes)));
}

SampledChart clifford_chart(int count) {
    const double r = 1.0;
    auto spec = immersion_from_jets(4, [r](std::span<const Jet> x, std::span<Jet> out) {
        out[0] = r * cos(x[0]);
        out[1] = r * sin(x[0]);
        out[2] = r * cos(x[1]);
        out[3] = r * sin(x[1]);
    });
    return evaluate_chart(spec, ParameterGrid({Axis::periodic(count, 2 * kPi), Axis::periodic(count, 2 * kPi)}));
}

SampledChart plane_chart(int n, double half, int count) {
    auto spec = immersion_from_jets(n, [n](std::span<const Jet> x, std::span<Jet> out) {
        out[0] = x[0];
        out[1] = x[1];
        for (int a = 2; a < n; ++a) out[a] = Jet(0.0);
    });
    return evaluate_chart(spec, ParameterGrid({Axis::truncated(-half, half, count), Axis::truncated(-half, half, count)}));
}

// Cone over the Clifford torus of S^3, radius r in [r0, r1].
SampledChart cone_chart(double r0, double r1, int radial, int angular) {
    auto spec = immersion_from_jets(4, [](std::span<const Jet> x, std::span<Jet> out) {
        const Jet s = x[0] * std::sqrt(0.5);
        out[0] = s * cos(x[1]);
        out[1] = s * sin(x[1]);
        out[2] = s * cos(x[2]);
        out[3] = s * sin(x[2]);
    });
    return evaluate_chart(spec, ParameterGrid({Axis::truncated(r0, r1, radial), Axis::periodic(angular, 2 * kPi),
                                               Axis::periodic(angular, 2 * kPi)}));
}

SampledChart al_period_arc(double k0, int count) {
    const double T = curve_period(k0).period;
    return al_arc_chart(k0, -0.5 * T, 0.5 * T, count);
}

int flat_count(const ordered_json& p, int grid) {
    if (p.at("flat_grid").is_null()) return std::max(9, grid / 2);
    return positive_int(p, "flat_grid", 3);
}

const char* kShrinkerOracle = "H = -F checked by hand on the closed form";

void sphere_expectations(ExampleSpec& s, int m) {
    using P = Provenance;
    s.expectations.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-10, P::reference_result,
                                    "round sphere of radius sqrt(m) is a self-shrinker"));
    s.expectations.push_back(expect("H2", Relation::approx, m, 1e-10, P::closed_form, "|H| = m / sqrt(m)"));
    s.expectations.push_back(expect("ratio", Relation::approx, 1.0 / m, 1e-10, P::oracle, "P = g, |P|^2 = m, |H|^4 = m^2"));
    s.expectations.push_back(expect("ratio_spread", Relation::at_most, 0.0, 1e-10, P::oracle, "constant ratio"));
    s.expectations.push_back(expect("rank", Relation::equals, m, 0.0, P::oracle, "P = g has full rank"));
    s.expectations.push_back(expect("parallel_nu", Relation::at_most, 0.0, 1e-8, P::closed_form, "nu = -F/|F| in a fixed R^{m+1}"));
    s.expectations.push_back(expect("F2", Relation::approx, m, 1e-10, P::closed_form, "|F|^2 = radius^2"));
    s.expectations.push_back(expect_verdict(Verdict::spherical, P::reference_result,
                                            "compact shrinker with parallel principal normal and |F|^2 = m"));
}

void curve_shrinker_expectations(ExampleSpec& s) {
    using P = Provenance;
    s.expectations.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-6, P::oracle,
                                    "ODE solution of k' = k<F,T> satisfies H = -F^perp to integrator tolerance"));
    s.expectations.push_back(expect("ratio", Relation::approx, 1.0, 1e-5, P::oracle, "one principal curvature: |P|^2 = k^4 = |H|^4"));
    s.expectations.push_back(expect("rank", Relation::equals, 1.0, 0.0, P::oracle, "single nonzero eigenvalue k^2"));
}

using Builder = std::function<Example(const json&)>;

Example build_plane(const json& given) {
    Example e;
    auto p = merge_params("plane", {{"n", 3}, {"L", 1.0}, {"grid", 17}}, given);
    const int n = positive_int(p, "n", 2);
    e.chart = plane_chart(n, positive_real(p, "L"), positive_int(p, "grid", 5));
    e.spec.recipe = "coordinate 2-plane through the origin";
    e.spec.params = p;
    using P = Provenance;
    e.spec.expectations.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-10, P::closed_form, "H = 0 and F is tangent"));
    e.spec.expectations.push_back(expect("H2", Relation::approx, 0.0, 1e-10, P::closed_form, "flat"));
    e.spec.expectations.push_back(expect_verdict(Verdict::unknown, P::closed_form, "H = 0, principal normal undefined"));
    return e;
}

Example build_circle(const json& given) {
    Example e;
    auto p = merge_params("circle", {{"n", 2}, {"grid", 256}}, given);
    e.chart = round_sphere(1, positive_int(p, "n", 2), 1.0, positive_int(p, "grid", 8));
    e.spec.recipe = "unit circle";
    e.spec.params = p;
    e.spec.compact = true;
    sphere_expectations(e.spec, 1);
    return e;
}

Example build_sphere(const json& given) {
    Example e;
    auto p = merge_params("sphere", {{"m", 2}, {"n", nullptr}, {"grid", 48}}, given);
    const int m = positive_int(p, "m", 1);
    if (p["n"].is_null()) p["n"] = m + 1;
    const int n = positive_int(p, "n", m + 1);
    e.chart = round_sphere(m, n, std::sqrt(static_cast<double>(m)), positive_int(p, "grid", 8));
    e.spec.recipe = "S^m(sqrt m) in the first m+1 coordinates of R^n";
    e.spec.params = p;
    e.spec.compact = true;
    e.spec.note = "polar angles truncated to [0.4, pi - 0.4]";
    sphere_expectations(e.spec, m);
    if (n > m + 1) e.spec.expectations.front().provenance = Provenance::oracle;
    return e;
}

Example build_clifford(const json& given) {
    Example e;
    auto p = merge_params("clifford_torus", {{"grid", 64}}, given);
    e.chart = clifford_chart(positive_int(p, "grid", 8));
    e.spec.recipe = "S^1(1) x S^1(1) in R^4";
    e.spec.params = p;
    e.spec.compact = true;
    using P = Provenance;
    auto& x = e.spec.expectations;
    x.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-10, P::oracle, kShrinkerOracle));
    x.push_back(expect("H2", Relation::approx, 2.0, 1e-10, P::closed_form, "H = -F, |F|^2 = 2"));
    x.push_back(expect("ratio", Relation::approx, 0.5, 1e-8, P::oracle, "block computation: P = g"));
    x.push_back(expect("ratio_spread", Relation::at_most, 0.0, 1e-8, P::oracle, "constant ratio"));
    x.push_back(expect("rank", Relation::equals, 2.0, 0.0, P::oracle, "P = g"));
    x.push_back(expect("parallel_nu", Relation::at_most, 0.0, 1e-8, P::oracle, "nu = -F/sqrt 2 and dF is tangent"));
    x.push_back(expect("F2", Relation::approx, 2.0, 1e-8, P::closed_form, "|F|^2 = 1 + 1"));
    x.push_back(expect_verdict(Verdict::spherical, P::reference_result,
                               "compact shrinker with parallel principal normal lies in a sphere of radius sqrt m"));
    return e;
}

Example build_cylinder_from(const std::string& name, const std::string& curve, double k0, const ordered_json& p) {
    Example e;
    const int grid = positive_int(p, "grid", 8);
    const int k = positive_int(p, "k", 1);
    const double L = positive_real(p, "L");
    using P = Provenance;
    if (curve == "circle") {
        e.chart = make_cylinder(round_sphere(1, 2, 1.0, grid), k, L, flat_count(p, grid));
        e.spec.recipe = "S^1(1) x R^k";
        auto& x = e.spec.expectations;
        x.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-10, P::oracle, kShrinkerOracle));
        x.push_back(expect("H2", Relation::approx, 1.0, 1e-10, P::closed_form, "unit circle factor"));
        x.push_back(expect("ratio", Relation::approx, 1.0, 1e-10, P::oracle, "single eigenvalue 1"));
        x.push_back(expect("rank", Relation::equals, 1.0, 0.0, P::reference_result, "one curved direction"));
        x.push_back(expect_verdict(Verdict::class_ii_product, P::reference_result, "S^r(sqrt r) x R^{m-r} with r = 1"));
    } else if (curve == "al") {
        e.chart = make_cylinder(al_period_arc(k0, grid), k, L, flat_count(p, grid));
        e.spec.recipe = "one curvature period of an Abresch-Langer curve x R^k";
        e.spec.tolerance = 1e-6;
        curve_shrinker_expectations(e.spec);
        e.spec.expectations.push_back(expect_verdict(Verdict::class_i_curve_cylinder, P::reference_result,
                                                     "self-shrinking curve times a flat factor"));
    } else {
        throw ConfigError(name + ": curve must be 'circle' or 'al'");
    }
    e.spec.params = p;
    return e;
}

Example build_cylinder(const json& given) {
    auto p = merge_params("cylinder", {{"curve", "circle"}, {"k0", 0.7}, {"k", 1}, {"L", 1.0}, {"grid", 128}, {"flat_grid", nullptr}},
                          given);
    if (!p["curve"].is_string()) throw ConfigError("cylinder: curve must be a string");
    return build_cylinder_from("cylinder", p["curve"].get<std::string>(), positive_real(p, "k0"), p);
}

Example build_al_cylinder(const json& given) {
    auto p = merge_params("al_cylinder", {{"k0", 0.7}, {"k", 1}, {"L", 1.0}, {"grid", 128}, {"flat_grid", nullptr}}, given);
    return build_cylinder_from("al_cylinder", "al", positive_real(p, "k0"), p);
}

Example build_sphere_cylinder(const json& given) {
    Example e;
    auto p = merge_params("sphere_cylinder", {{"d", 1}, {"k", 1}, {"L", 1.0}, {"grid", 48}, {"flat_grid", nullptr}}, given);
    const int d = positive_int(p, "d", 1);
    const int k = positive_int(p, "k", 1);
    const int grid = positive_int(p, "grid", 8);
    if (d > 3) throw ConfigError("sphere_cylinder: d must be at most 3");
    const auto sphere = round_sphere(d, d + 1, std::sqrt(static_cast<double>(d)), grid);
    e.chart = make_product(sphere, flat_chart(k, positive_real(p, "L"), flat_count(p, grid), sphere.source, sphere.has_third));
    e.spec.recipe = "S^d(sqrt d) x R^k";
    e.spec.params = p;
    using P = Provenance;
    auto& x = e.spec.expectations;
    x.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-10, P::reference_result,
                       "S^r(sqrt r) x R^{m-r} is a self-shrinker"));
    x.push_back(expect("H2", Relation::approx, d, 1e-10, P::reference_result, "|H| = sqrt r"));
    x.push_back(expect("ratio", Relation::approx, 1.0 / d, 1e-10, P::oracle, "P = identity on the sphere factor"));
    x.push_back(expect("rank", Relation::equals, d, 0.0, P::reference_result, "rank r = d"));
    x.push_back(expect_verdict(Verdict::class_ii_product, P::reference_result, "S^r(sqrt r) x R^{m-r}"));
    return e;
}

Example build_al_curve(const json& given) {
    Example e;
    auto p = merge_params("al_curve", {{"k0", 0.7}, {"grid", 256}}, given);
    e.chart = al_period_arc(positive_real(p, "k0"), positive_int(p, "grid", 8));
    e.spec.recipe = "one curvature period of the Abresch-Langer curve centred at a curvature maximum";
    e.spec.params = p;
    e.spec.tolerance = 1e-6;
    curve_shrinker_expectations(e.spec);
    return e;
}

ClosedCurveResult snap_closed(const ordered_json& p, const char* key, ExampleSpec& spec) {
    const double k0 = positive_real(p, key);
    const auto closed = nearest_closed(k0, positive_int(p, "max_den", 1));
    if (std::abs(closed.k0 - k0) > 1e-12) {
        const std::string msg = std::string(key) + " = " + format_double(k0) + " does not close up; using " +
                                format_double(closed.k0) + " (rotation " + std::to_string(closed.rotation.p) + "/" +
                                std::to_string(closed.rotation.q) + ")";
        spec.note = spec.note ? *spec.note + "; " + msg : msg;
    }
    spec.params[std::string(key) + "_closed"] = closed.k0;
    return closed;
}

Example build_al_closed(const json& given) {
    Example e;
    auto p = merge_params("al_closed", {{"k0", 0.7}, {"max_den", 10}, {"grid", 512}}, given);
    e.spec.params = p;
    const auto c = snap_closed(p, "k0", e.spec);
    e.chart = al_closed_chart(c.k0, c.length, positive_int(p, "grid", 8));
    e.spec.recipe = "closed Abresch-Langer curve";
    e.spec.compact = true;
    e.spec.tolerance = 1e-6;
    curve_shrinker_expectations(e.spec);
    return e;
}

Example build_al_product(const json& given) {
    Example e;
    auto p = merge_params("al_product", {{"k0_a", 0.7}, {"k0_b", 0.7}, {"max_den", 10}, {"grid", 128}}, given);
    e.spec.params = p;
    const int grid = positive_int(p, "grid", 8);
    const auto a = snap_closed(p, "k0_a", e.spec);
    const auto b = snap_closed(p, "k0_b", e.spec);
    e.chart = make_product(al_closed_chart(a.k0, a.length, grid), al_closed_chart(b.k0, b.length, grid));
    e.spec.recipe = "product of two closed Abresch-Langer curves in R^4";
    e.spec.compact = true;
    e.spec.tolerance = 1e-6;
    using P = Provenance;
    auto& x = e.spec.expectations;
    x.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-6, P::reference_result,
                       "product of self-shrinkers is a self-shrinker with |H| > 0"));
    x.push_back(expect("parallel_nu", Relation::at_least, 0.01, 0.0, P::oracle,
                       "principal normal mixes the two factor normals with varying weights"));
    x.push_back(expect_verdict(Verdict::non_spherical, P::reference_result,
                               "compact, |H| > 0, not a sphere, so the principal normal cannot be parallel"));
    return e;
}

Example build_cone(const json& given) {
    Example e;
    auto p = merge_params("minimal_cone_annulus", {{"r_min", 0.5}, {"r_max", 2.0}, {"grid", 32}}, given);
    const double r0 = positive_real(p, "r_min"), r1 = positive_real(p, "r_max");
    if (!(r1 > r0)) throw ConfigError("minimal_cone_annulus: r_max must exceed r_min");
    const int grid = positive_int(p, "grid", 8);
    e.chart = cone_chart(r0, r1, std::max(9, grid / 2), grid);
    e.spec.recipe = "cone over the Clifford torus S^1(1/sqrt 2) x S^1(1/sqrt 2) in S^3, radial annulus";
    e.spec.params = p;
    e.spec.tolerance = 1e-6;
    e.spec.note = "verification corpus only; never classified";
    e.spec.classifiable = false;
    using P = Provenance;
    auto& x = e.spec.expectations;
    x.push_back(expect("shrinker_max", Relation::at_most, 0.0, 1e-6, P::oracle, "minimal cone: H = 0 and F tangent"));
    x.push_back(expect("F_perp_max", Relation::at_most, 0.0, 1e-9, P::oracle, "F = r dF/dr is tangent"));
    x.push_back(expect("H2", Relation::approx, 0.0, 1e-9, P::oracle, "cone over a minimal surface of S^3 is minimal"));
    return e;
}

const std::map<std::string, Builder>& builders() {
    static const std::map<std::string, Builder> table = {
        {"plane", build_plane},
        {"circle", build_circle},
        {"sphere", build_sphere},
        {"clifford_torus", build_clifford},
        {"cylinder", build_cylinder},
        {"sphere_cylinder", build_sphere_cylinder},
        {"al_curve", build_al_curve},
        {"al_cylinder", build_al_cylinder},
        {"al_closed", build_al_closed},
        {"al_product", build_al_product},
        {"minimal_cone_annulus", build_cone},
    };
    return table;
}

double interior_extreme(const ParameterGrid& grid, const std::vector<double>& field, double target) {
    double worst = target, dev = -1.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (!grid.is_interior(p)) continue;
        const double d = std::abs(field[p] - target);
        if (!(d <= dev)) {
            dev = d;
            worst = field[p];
        }
    }
    return worst;
}

}  // namespace

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::reference_result: return "reference_result";
        case Provenance::closed_form: return "closed_form";
        case Provenance::oracle: return "oracle";
    }
    return "?";
}

std::string to_string(Relation r) {
    switch (r) {
        case Relation::at_most: return "at_most";
        case Relation::at_least: return "at_least";
        case Relation::approx: return "approx";
        case Relation::equals: return "equals";
    }
    return "?";
}

const std::vector<std::string>& example_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, b] : builders()) v.push_back(k);
        return v;
    }();
    return names;
}

Example make_example(const std::string& name, const json& params) {
    const auto it = builders().find(name);
    if (it == builders().end()) {
        std::string list;
        for (const auto& n : example_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("unknown example '" + name + "'; available: " + list);
    }
    Example e = it->second(params);
    e.spec.name = name;
    return e;
}

ClassifyOptions classify_options(const ExampleSpec& spec, const SampledChart& chart) {
    ClassifyOptions o;
    const auto hyp = default_hypotheses(chart);
    o.shrinker_tol = std::max(spec.tolerance, 1e-9);
    o.parallel_tol = hyp.parallel_tol;
    o.sphere_tol = std::max(1e-6, hyp.parallel_tol);
    o.vanish_tol = std::max(1e-8, hyp.parallel_tol);
    o.cluster_tol = hyp.cluster_tol;
    o.compact = spec.compact;
    return o;
}

ExampleReport verify_example(const Example& ex) {
    ExampleReport r;
    r.name = ex.spec.name;
    r.params = ex.spec.params;
    const auto f = compute_fields(ex.chart);
    const auto& grid = ex.chart.grid;
    const int n = ex.chart.n;

    std::optional<PinchingStats> pinch;
    auto pinching = [&]() -> const PinchingStats& {
        if (!pinch) pinch = pinching_ratio(f);
        return *pinch;
    };
    std::optional<Classification> cls;
    auto classification = [&]() -> const Classification& {
        if (!cls) cls = classify(f, classify_options(ex.spec, ex.chart));
        return *cls;
    };

    for (const auto& e : ex.spec.expectations) {
        ExpectationOutcome o;
        o.expected = e;
        try {
            if (e.property == "shrinker_max") {
                o.measured = shrinker_residual(f, e.tolerance).max;
            } else if (e.property == "H2") {
                o.measured = interior_extreme(grid, f.derived.H2, e.value);
            } else if (e.property == "ratio") {
                const auto& s = pinching();
                o.measured = std::abs(s.max - e.value) > std::abs(s.min - e.value) ? s.max : s.min;
            } else if (e.property == "ratio_spread") {
                o.measured = pinching().spread;
            } else if (e.property == "rank") {
                o.measured = principal_rank(f, classify_options(ex.spec, ex.chart).cluster_tol).mode;
            } else if (e.property == "parallel_nu") {
                o.measured = parallel_nu_defect(f);
            } else if (e.property == "F_perp_max") {
                double w = 0.0;
                for (std::size_t p = 0; p < grid.size(); ++p) {
                    if (!grid.is_interior(p)) continue;
                    double s = 0.0;
                    for (int a = 0; a < n; ++a) s += f.sff.F_perp[p * n + a] * f.sff.F_perp[p * n + a];
                    w = std::max(w, std::sqrt(s));
                }
                o.measured = w;
            } else if (e.property == "F2") {
                std::vector<double> f2(grid.size());
                for (std::size_t p = 0; p < grid.size(); ++p) {
                    const double* F = ex.chart.position(p);
                    for (int a = 0; a < n; ++a) f2[p] += F[a] * F[a];
                }
                o.measured = interior_extreme(grid, f2, e.value);
            } else if (e.property == "verdict") {
                o.measured_text = to_string(classification().verdict);
                o.measured = std::numeric_limits<double>::quiet_NaN();
            } else {
                throw ConfigError("unknown expectation property '" + e.property + "'");
            }
        } catch (const MaskedError& err) {
            o.measured = std::numeric_limits<double>::quiet_NaN();
            o.measured_text = err.what();
        }
        switch (e.relation) {
            case Relation::at_most: o.pass = o.measured <= e.value + e.tolerance; break;
            case Relation::at_least: o.pass = o.measured >= e.value - e.tolerance; break;
            case Relation::approx: o.pass = std::abs(o.measured - e.value) <= e.tolerance; break;
            case Relation::equals:
                o.pass = e.property == "verdict" ? o.measured_text == e.text : o.measured == e.value;
                break;
        }
        r.pass = r.pass && o.pass;
        r.outcomes.push_back(std::move(o));
    }
    if (ex.spec.classifiable) {
        r.classification = classification();
    } else {
        r.classification.note = "not classified";
    }
    return r;
}

ordered_json to_json(const ExampleReport& r) {
    ordered_json j;
    j["example"] = r.name;
    j["params"] = r.params;
    j["pass"] = r.pass;
    j["expectations"] = ordered_json::array();
    for (const auto& o : r.outcomes) {
        ordered_json e;
        e["property"] = o.expected.property;
        e["relation"] = to_string(o.expected.relation);
        if (o.expected.property == "verdict") {
            e["expected"] = o.expected.text;
            e["measured"] = o.measured_text;
        } else {
            e["expected"] = o.expected.value;
            e["tolerance"] = o.expected.tolerance;
            e["measured"] = o.measured;
        }
        e["provenance"] = to_string(o.expected.provenance);
        e["oracle"] = o.expected.oracle;
        e["pass"] = o.pass;
        j["expectations"].push_back(std::move(e));
    }
    j["classification"] = {{"verdict", to_string(r.classification.verdict)},
                           {"rank", r.classification.rank},
                           {"note", r.classification.note},
                           {"evidence", r.classification.evidence}};
    return j;
}

}  // namespace shrinker
