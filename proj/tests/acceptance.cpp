// Acceptance run: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated; --strict makes any FAIL a nonzero exit.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "shrinker/abresch_langer.hpp"
#include "shrinker/catalog.hpp"
#include "shrinker/cli.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/flow_sim.hpp"
#include "shrinker/shrinker_analysis.hpp"

using namespace shrinker;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct Loaded {
    Example example;
    std::unique_ptr<SampledChart> chart;
    GeometryFields fields;
};

Loaded load(const std::string& name, const nlohmann::json& params = nlohmann::json::object(), bool fd = false) {
    Loaded l{make_example(name, params), nullptr, {}};
    l.chart = std::make_unique<SampledChart>(fd ? refit_finite_difference(l.example.chart) : l.example.chart);
    l.fields = compute_fields(*l.chart);
    return l;
}

Outcome shrinker_residuals() {
    struct Case {
        const char* name;
        nlohmann::json params;
        double tol;
    };
    const std::vector<Case> cases = {
        {"circle", {}, 1e-10},
        {"sphere", {{"m", 1}}, 1e-10},
        {"sphere", {{"m", 2}}, 1e-10},
        {"sphere", {{"m", 3}, {"grid", 24}}, 1e-10},
        {"clifford_torus", {}, 1e-10},
        {"cylinder", {}, 1e-10},
        {"sphere_cylinder", {{"d", 1}, {"k", 1}}, 1e-10},
        {"sphere_cylinder", {{"d", 2}, {"k", 1}}, 1e-10},
        {"al_curve", {}, 1e-6},
        {"al_cylinder", {}, 1e-6},
        {"al_closed", {}, 1e-6},
        {"al_product", {}, 1e-6},
    };
    Outcome o;
    double analytic = 0.0, al = 0.0, slowest = 0.0;
    for (const auto& c : cases) {
        Stopwatch sw;
        const auto l = load(c.name, c.params);
        const double r = shrinker_residual(l.fields, c.tol).max;
        const double t = sw.seconds();
        slowest = std::max(slowest, t);
        (c.tol < 1e-8 ? analytic : al) = std::max(c.tol < 1e-8 ? analytic : al, r);
        if (!(r <= c.tol) || t >= 10.0) {
            o.pass = false;
            o.detail += std::string(" [") + c.name + " " + fmt("%.2e", r) + "]";
        }
    }
    o.detail = "analytic max " + fmt("%.2e", analytic) + " (<= 1e-10), AL max " + fmt("%.2e", al) +
               " (<= 1e-6), slowest " + fmt("%.2f", slowest) + " s" + o.detail;
    return o;
}

Outcome al_conservation() {
    Outcome o;
    double drift = 0.0, root_err = 0.0, match = 0.0;
    for (double k0 : {0.4, 0.7, 0.95, 1.0, 1.5}) {
        const auto tr = integrate(k0, 50.0);
        drift = std::max(drift, tr.max_drift);
        const auto [lo, hi] = critical_values(tr.c_gamma);
        for (double r : {lo, hi}) root_err = std::max(root_err, std::abs(r * std::exp(-0.5 * r * r) - tr.c_gamma));
        auto observed = curvature_extrema(k0, 50.0);
        observed.push_back(al_initial_state(k0));
        for (const auto& st : observed) match = std::max(match, std::min(std::abs(st.k - lo), std::abs(st.k - hi)));
    }
    o.pass = drift <= 1e-8 && root_err <= 1e-10 && match <= 1e-6;
    o.detail = "drift " + fmt("%.2e", drift) + " (<= 1e-8), root residual " + fmt("%.2e", root_err) +
               " (<= 1e-10), extrema vs roots " + fmt("%.2e", match) + " (<= 1e-6)";
    return o;
}

Outcome closed_curves() {
    Outcome o;
    const auto found = find_closed(0.3, 1.0);
    double circle_defect = kNaN, best_defect = kNaN, best_residual = kNaN, best_k0 = kNaN;
    std::string rotation;
    for (const auto& r : found) {
        if (std::abs(r.k0 - 1.0) < 1e-12) {
            circle_defect = r.closure_defect;
            continue;
        }
        if (r.k0 <= 0.3 || r.k0 >= 0.99 || !(r.closure_defect <= 1e-6)) continue;
        const auto chart = al_closed_chart(r.k0, r.length, 512);
        const double res = shrinker_residual(compute_fields(chart), 1e-6).max;
        if (std::isnan(best_residual) || res < best_residual) {
            best_residual = res;
            best_defect = r.closure_defect;
            best_k0 = r.k0;
            rotation = std::to_string(r.rotation.p) + "/" + std::to_string(r.rotation.q);
        }
    }
    o.pass = circle_defect <= 1e-9 && best_residual <= 1e-6 && best_defect <= 1e-6;
    o.detail = "circle defect " + fmt("%.2e", circle_defect) + " (<= 1e-9); " + std::to_string(found.size()) +
               " closed curves, e.g. k0 " + fmt("%.6f", best_k0) + " rotation " + rotation + " defect " +
               fmt("%.2e", best_defect) + ", shrinker residual " + fmt("%.2e", best_residual) + " (<= 1e-6)";
    return o;
}

Outcome pinching() {
    const auto sphere = pinching_ratio(load("sphere").fields);
    const auto torus = pinching_ratio(load("clifford_torus").fields);
    const auto al = pinching_ratio(load("al_cylinder").fields);
    const double al_dev = std::max(std::abs(al.max - 1.0), std::abs(al.min - 1.0));
    Outcome o;
    o.pass = sphere.spread <= 1e-8 && std::abs(sphere.mean - 0.5) <= 1e-10 && torus.spread <= 1e-8 &&
             std::abs(torus.mean - 0.5) <= 1e-8 && al_dev <= 1e-5;
    o.detail = "sphere " + fmt("%.12f", sphere.mean) + " spread " + fmt("%.1e", sphere.spread) + "; torus " +
               fmt("%.12f", torus.mean) + " spread " + fmt("%.1e", torus.spread) + "; AL cylinder |ratio - 1| " +
               fmt("%.1e", al_dev);
    return o;
}

Outcome convergence() {
    const std::vector<std::string> names = {"codazzi", "ss7", "mean", "lemma3", "ss24"};
    std::vector<std::vector<ResidualReport>> reports(names.size());
    double slowest = 0.0;
    for (int grid : {64, 128, 256}) {
        Stopwatch sw;
        const auto l = load("al_cylinder", {{"grid", grid}}, true);
        const auto hyp = default_hypotheses(*l.chart);
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == "codazzi")
                reports[i].push_back(structure_residual(StructureKind::codazzi, l.fields, 1.0));
            else
                reports[i].push_back(identity_residual(parse_identity_kind(names[i]), l.fields, 1.0, hyp));
        }
        slowest = std::max(slowest, sw.seconds());
    }
    Outcome o;
    o.pass = slowest < 60.0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto order = convergence_order(reports[i]);
        const bool ok = order && std::abs(*order - 2.0) <= 0.25;
        o.pass = o.pass && ok;
        o.detail += names[i] + " " + (order ? fmt("%.2f", *order) : std::string("n/a")) + " (max " +
                    fmt("%.1e", reports[i].back().max) + ")" + (ok ? "" : " FAIL") + "; ";
    }
    o.detail += "slowest grid " + fmt("%.2f", slowest) + " s";
    return o;
}

Outcome theorem_a() {
    const auto torus = load("clifford_torus");
    const auto cls = classify(torus.fields, classify_options(torus.example.spec, *torus.chart));
    const double f2 = cls.evidence.value("F2_minus_m_max", kNaN);
    const double nu = parallel_nu_defect(torus.fields);
    std::vector<double> defects;
    Verdict product_verdict = Verdict::unknown;
    for (int grid : {64, 128}) {
        const auto p = load("al_product", {{"grid", grid}});
        defects.push_back(parallel_nu_defect(p.fields));
        product_verdict = classify(p.fields, classify_options(p.example.spec, *p.chart)).verdict;
    }
    const double stability = std::abs(defects[1] - defects[0]) / defects[1];
    Outcome o;
    o.pass = cls.verdict == Verdict::spherical && f2 <= 1e-8 && nu <= 1e-8 && product_verdict == Verdict::non_spherical &&
             defects[1] >= 0.01 && stability <= 0.1;
    o.detail = "torus " + to_string(cls.verdict) + " (||F|^2-2| " + fmt("%.1e", f2) + ", nu defect " + fmt("%.1e", nu) +
               "); al_product " + to_string(product_verdict) + " nu defect " + fmt("%.4f", defects[0]) + " -> " +
               fmt("%.4f", defects[1]) + " (change " + fmt("%.1f", 100 * stability) + "%)";
    return o;
}

Outcome theorem_b() {
    auto run = [](const char* name, const nlohmann::json& params) {
        const auto l = load(name, params);
        return classify(l.fields, classify_options(l.example.spec, *l.chart));
    };
    const auto al = run("al_cylinder", nlohmann::json::object());
    const auto s1 = run("sphere_cylinder", {{"d", 1}, {"k", 1}});
    const auto s2 = run("sphere_cylinder", {{"d", 2}, {"k", 1}});
    const double h = std::sqrt(s2.evidence.value("H2_max", kNaN));
    const double vanish = std::max({al.evidence.value("vanish_max", kNaN), s1.evidence.value("vanish_max", kNaN),
                                    s2.evidence.value("vanish_max", kNaN)});
    Outcome o;
    o.pass = al.verdict == Verdict::class_i_curve_cylinder && s1.verdict == Verdict::class_ii_product && s1.rank == 1 &&
             s2.verdict == Verdict::class_ii_product && s2.rank == 2 && std::abs(h - std::sqrt(2.0)) <= 1e-8 &&
             vanish <= 1e-8;
    o.detail = "al_cylinder " + to_string(al.verdict) + "; S^1 x R " + to_string(s1.verdict) + " r=" +
               std::to_string(s1.rank) + "; S^2 x R " + to_string(s2.verdict) + " r=" + std::to_string(s2.rank) +
               " |H| " + fmt("%.12f", h) + "; vanish max " + fmt("%.1e", vanish);
    return o;
}

Outcome flow() {
    StopCriteria stop;
    stop.sup_curvature2 = 400.0;
    Stopwatch sw1;
    const auto circle = run(circle_curve(2.0, 512), stop);
    const auto fit = estimate_blowup(circle);
    const double t1 = sw1.seconds();
    double dev = 0.0;
    for (std::size_t i = fit.window_begin; i < fit.type1.size(); ++i) dev = std::max(dev, std::abs(fit.type1[i] - 0.5) / 0.5);
    Stopwatch sw2;
    const auto ellipse = run(ellipse_curve(1.2, 0.8, 512), stop);
    const auto efit = estimate_blowup(ellipse);
    double best = INFINITY;
    for (const auto& r : huisken_rescale(ellipse, efit.T_hat)) best = std::min(best, r.shrinker_residual);
    const double t2 = sw2.seconds();
    Outcome o;
    o.pass = std::abs(fit.T_hat - 2.0) <= 0.02 && dev <= 0.05 && best <= 0.05 && t1 < 120.0 && t2 < 120.0;
    o.detail = "circle T_hat " + fmt("%.5f", fit.T_hat) + ", type-1 max deviation " + fmt("%.2f", 100 * dev) +
               "%; ellipse rescaled residual min " + fmt("%.4f", best) + " (<= 0.05); runs " + fmt("%.1f", t1) + " s, " +
               fmt("%.1f", t2) + " s";
    return o;
}

Outcome quadrature() {
    double worst = 0.0;
    for (const char* name : {"clifford_torus", "sphere"}) {
        const auto l = load(name);
        const auto t1 = gaussian_weighted_integral(l.fields, lemma4_term1(l.fields), "lemma4_term1");
        const auto t2 = gaussian_weighted_integral(l.fields, lemma4_term2(l.fields), "lemma4_term2");
        worst = std::max(worst, std::abs(t1.value + t2.value));
    }
    const auto c = load("circle");
    const std::vector<double> one(c.fields.points(), 1.0);
    const double unit = gaussian_weighted_integral(c.fields, one, "unit").value;
    const double err = std::abs(unit - 2 * std::numbers::pi * std::exp(-0.5));
    Outcome o;
    o.pass = worst <= 1e-9 && err <= 1e-10;
    o.detail = "|term1 + term2| " + fmt("%.1e", worst) + " (<= 1e-9); unit circle " + fmt("%.13f", unit) + " error " +
               fmt("%.1e", err);
    return o;
}

Outcome determinism() {
    RunConfig v;
    v.command = "verify";
    v.example = "clifford_torus";
    v.checks = {"gauss", "codazzi", "ss7", "ratio", "lemma4"};
    RunConfig f;
    f.command = "flow";
    f.initial = "ellipse:1.2,0.8";
    f.n_points = 256;
    const bool verify_same = verify_report_text(v) == verify_report_text(v);
    const auto flow_a = flow_monitor_text(f);
    const bool flow_same = flow_a == flow_monitor_text(f);
    Outcome o;
    o.pass = verify_same && flow_same;
    o.detail = std::string("verify ") + (verify_same ? "identical" : "differs") + ", flow " +
               (flow_same ? "identical" : "differs") + " (" + std::to_string(flow_a.size()) + " bytes)";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"shrinker residual on catalog shrinkers", shrinker_residuals},
        {"Abresch-Langer conservation and critical values", al_conservation},
        {"closed Abresch-Langer curves", closed_curves},
        {"pinching ratio constancy", pinching},
        {"identity convergence on the AL cylinder", convergence},
        {"sphere rigidity both ways", theorem_a},
        {"splitting classification", theorem_b},
        {"curve-shortening flow", flow},
        {"Gaussian-weighted quadrature", quadrature},
        {"determinism", determinism},
    };
    int failed = 0, index = 0;
    for (const auto& [title, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, title, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return strict && failed ? 1 : 0;
}
