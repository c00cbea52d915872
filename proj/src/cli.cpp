#include "shrinker/cli.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shrinker/abresch_langer.hpp"
#include "shrinker/catalog.hpp"
#include "shrinker/errors.hpp"
#include "shrinker/flow_sim.hpp"
#include "shrinker/report.hpp"
#include "shrinker/shrinker_analysis.hpp"
#include "shrinker/tensor_lab.hpp"

namespace shrinker {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

template <class T>
ordered_json opt(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& v) {
    if (!j.contains(key)) return;
    if (j[key].is_null())
        v.reset();
    else
        v = j[key].get<T>();
}

template <class T>
void read(const json& j, const char* key, T& v) {
    if (j.contains(key)) v = j[key].get<T>();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " '" + s + "' as a number");
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw ConfigError("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

ordered_json manifest(const RunConfig& c, const std::vector<std::string>& outputs) {
    const ordered_json config = to_json(c);
    ordered_json m;
    m["tool"] = "shrinkerlab";
    m["version"] = SHRINKERLAB_VERSION;
    m["command"] = c.command;
    m["config"] = config;
    m["config_hash"] = hex64(fnv1a(dump_json(config)));
    m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"boost", BOOST_LIB_VERSION}};
    m["outputs"] = outputs;
    return m;
}

void write_run(const RunConfig& c, const std::vector<std::pair<std::string, std::string>>& files) {
    if (c.out.empty()) return;
    ensure_dir(c.out);
    std::vector<std::string> names;
    for (const auto& [name, text] : files) {
        write_file(fs::path(c.out) / name, text);
        names.push_back(name);
    }
    write_file(fs::path(c.out) / "manifest.json", dump_json(manifest(c, names)) + "\n");
}

Example example_for(const RunConfig& c) {
    if (c.example.empty()) throw ConfigError("no example given; available: " + [] {
        std::string s;
        for (const auto& n : example_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }());
    json params = c.params;
    if (c.grid) params["grid"] = *c.grid;
    return make_example(c.example, params);
}

ordered_json classification_json(const Classification& cls) {
    return {{"verdict", to_string(cls.verdict)}, {"rank", cls.rank}, {"note", cls.note}, {"evidence", cls.evidence}};
}

ResidualReport scalar_report(const std::string& name, double value, double h, double tol) {
    ResidualReport r;
    r.identity = name;
    r.h = h;
    r.max = value;
    r.mean = value;
    r.tolerance = tol;
    r.pass = std::isfinite(value) && value <= tol;
    return r;
}

const std::vector<std::string>& default_checks() {
    static const std::vector<std::string> v{"shrinker", "expectations"};
    return v;
}

std::string check_names() {
    std::string s = "shrinker, expectations, ratio, parallel_nu, lemma4";
    for (auto k : all_identity_kinds()) s += ", " + to_string(k);
    for (const char* k : {"gauss", "codazzi", "ricci", "ricci_trace", "simons_scalar", "normality", "rperp_norm", "torsion"})
        s += std::string(", ") + k;
    return s;
}

ordered_json verify_report(const RunConfig& c, bool& pass, std::vector<std::pair<std::string, std::string>>* files) {
    const Example ex = example_for(c);
    const SampledChart chart = c.finite_difference ? refit_finite_difference(ex.chart) : ex.chart;
    const auto f = compute_fields(chart);
    const ToleranceModel tm{std::max(1e-9, ex.spec.tolerance), c.fd_constant.value_or(ex.spec.fd_constant)};
    const auto hyp = default_hypotheses(chart);
    const double h = chart.grid.max_spacing();
    const double shrink_tol = chart.source == DerivativeSource::analytic ? tm.algebraic : tm.differenced(chart);

    ordered_json report;
    report["example"] = ex.spec.name;
    report["params"] = ex.spec.params;
    report["grid"] = ordered_json::parse(chart_metadata_json(chart));
    report["checks"] = ordered_json::array();
    report["tolerances"] = ordered_json::object();
    if (ex.spec.note) report["note"] = *ex.spec.note;
    pass = true;

    for (const auto& name : c.checks.empty() ? default_checks() : c.checks) {
        if (name == "expectations") {
            if (c.finite_difference) continue;  // expectations are stated for the analytic chart
            const auto r = verify_example(ex);
            report["expectations"] = to_json(r)["expectations"];
            pass = pass && r.pass;
            continue;
        }
        ResidualReport r;
        if (name == "shrinker") {
            r = shrinker_residual(f, shrink_tol);
        } else if (name == "ratio") {
            try {
                r = scalar_report("ratio", pinching_ratio(f).spread, h, shrink_tol);
            } catch (const MaskedError& e) {
                r = scalar_report("ratio", std::nan(""), h, shrink_tol);
                r.note = e.what();
            }
        } else if (name == "parallel_nu") {
            r = scalar_report("parallel_nu", parallel_nu_defect(f), h, hyp.parallel_tol);
        } else if (name == "lemma4") {
            const auto t1 = gaussian_weighted_integral(f, lemma4_term1(f), "lemma4_term1");
            const auto t2 = gaussian_weighted_integral(f, lemma4_term2(f), "lemma4_term2");
            r = scalar_report("lemma4", std::abs(t1.value + t2.value), h, tm.algebraic);
        } else {
            bool done = false;
            for (auto k : all_identity_kinds())
                if (to_string(k) == name) {
                    r = identity_residual(k, f, tm.for_identity(k, chart), hyp);
                    done = true;
                }
            if (!done) {
                StructureKind k;
                try {
                    k = parse_structure_kind(name);
                } catch (const Error&) {
                    throw ConfigError("unknown check '" + name + "'; available: " + check_names());
                }
                r = structure_residual(k, f, tm.for_structure(k, chart));
            }
        }
        report["checks"].push_back(residual_report_object(r));
        report["tolerances"][name] = r.tolerance;
        pass = pass && r.pass;
    }

    ordered_json diag;
    try {
        const auto s = pinching_ratio(f);
        diag["ratio"] = {{"max", s.max}, {"min", s.min}, {"spread", s.spread}};
    } catch (const MaskedError&) {
        diag["ratio"] = nullptr;
    }
    diag["rank"] = principal_rank(f, hyp.cluster_tol).mode;
    diag["parallel_nu_defect"] = parallel_nu_defect(f);
    report["diagnostics"] = diag;
    if (ex.spec.classifiable)
        report["classification"] = classification_json(classify(f, classify_options(ex.spec, chart)));
    else
        report["classification"] = nullptr;
    report["pass"] = pass;

    if (files && c.dump_chart) {
        std::ostringstream cols;
        write_chart_columns(chart, cols);
        files->push_back({"chart.csv", cols.str()});
        files->push_back({"chart.json", chart_metadata_json(chart) + "\n"});
    }
    return report;
}

DiscreteCurve read_curve_csv(const std::string& path) {
    std::istringstream is(read_file(path));
    DiscreteCurve c;
    c.n = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        std::vector<double> row;
        bool numeric = true;
        for (const auto& cell : cells) {
            try {
                row.push_back(parse_number(cell, "coordinate"));
            } catch (const ConfigError&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (c.points.empty()) continue;  // header
            throw ConfigError(path + ": non-numeric row '" + line + "'");
        }
        if (c.n == 0) c.n = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != c.n) throw ConfigError(path + ": rows have different lengths");
        c.points.insert(c.points.end(), row.begin(), row.end());
    }
    if (c.n < 2 || c.size() < 8) throw ConfigError(path + ": need at least 8 points in dimension >= 2");
    return c;
}

DiscreteCurve initial_curve(const RunConfig& c) {
    const auto colon = c.initial.find(':');
    if (colon == std::string::npos) throw ConfigError("initial curve must look like kind:args, got '" + c.initial + "'");
    const std::string kind = c.initial.substr(0, colon), args = c.initial.substr(colon + 1);
    if (c.n_points < 8) throw ConfigError("n-points must be at least 8");
    if (kind == "circle") return circle_curve(parse_number(args, "radius"), c.n_points);
    if (kind == "ellipse") {
        const auto ab = split(args, ',');
        if (ab.size() != 2) throw ConfigError("ellipse needs a,b");
        return ellipse_curve(parse_number(ab[0], "a"), parse_number(ab[1], "b"), c.n_points);
    }
    if (kind == "al") {
        const auto closed = nearest_closed(parse_number(args, "k0"), 10);
        return resample(curve_from_chart(al_closed_chart(closed.k0, closed.length, c.n_points)), c.n_points);
    }
    if (kind == "file") return resample(read_curve_csv(args), c.n_points);
    throw ConfigError("unknown initial curve kind '" + kind + "' (circle, ellipse, al, file)");
}

std::string curve_csv(const DiscreteCurve& c) {
    std::ostringstream os;
    for (int a = 0; a < c.n; ++a) os << (a ? "," : "") << "x" << a;
    os << "\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (int a = 0; a < c.n; ++a) os << (a ? "," : "") << format_double(c.point(i)[a]);
        os << "\n";
    }
    return os.str();
}

std::string indexed(const char* stem, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem, i);
    return buf;
}

ordered_json flow_monitor(const RunConfig& c, bool& pass, std::vector<std::pair<std::string, std::string>>* files) {
    const DiscreteCurve init = initial_curve(c);
    StopCriteria stop;
    stop.t_max = c.t_max;
    stop.sup_curvature2 = c.stop_supA2;
    if (!stop.t_max && !stop.sup_curvature2) stop.sup_curvature2 = 400.0;
    const FlowSeries s = run(init, stop);

    ordered_json m;
    m["initial"] = c.initial;
    m["n_points"] = c.n_points;
    m["ambient_dim"] = init.n;
    m["steps"] = s.steps;
    m["stop_reason"] = s.stop_reason;
    m["samples"] = {{"t", s.times}, {"sup_curvature2", s.sup_curvature2}, {"length", s.length}, {"area", s.area}};
    pass = true;
    std::optional<BlowupFit> fit;
    try {
        fit = estimate_blowup(s, c.window_fraction);
    } catch (const NoBlowupError& e) {
        m["blowup"] = nullptr;
        m["note"] = e.what();
    }
    if (fit) {
        m["blowup"] = {{"T_hat", fit->T_hat},
                       {"slope", fit->slope},
                       {"fit_residual", fit->fit_residual},
                       {"window_begin", fit->window_begin}};
        m["type1"] = fit->type1;
        m["type1_final"] = fit->type1.back();
    }
    ordered_json snaps = ordered_json::array();
    for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
        const std::string name = indexed("snapshot", i);
        snaps.push_back({{"t", s.snapshots[i].t}, {"file", name}});
        if (files) files->push_back({name, curve_csv(s.snapshots[i].curve)});
    }
    m["snapshots"] = snaps;
    if (c.rescale && fit) {
        ordered_json rs = ordered_json::array();
        const auto rescaled = huisken_rescale(s, fit->T_hat);
        for (std::size_t i = 0; i < rescaled.size(); ++i) {
            const std::string name = indexed("rescaled", i);
            rs.push_back({{"t", rescaled[i].t}, {"shrinker_residual", rescaled[i].shrinker_residual}, {"file", name}});
            if (files) files->push_back({name, curve_csv(rescaled[i].curve)});
        }
        m["rescaled"] = rs;
    }
    return m;
}

int fail_code(bool pass) { return pass ? exit_pass : exit_check_failed; }

}  // namespace

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["example"] = c.example;
    j["params"] = c.params;
    j["checks"] = c.checks;
    j["grid"] = opt(c.grid);
    j["finite_difference"] = c.finite_difference;
    j["fd_constant"] = opt(c.fd_constant);
    j["dump_chart"] = c.dump_chart;
    j["k0"] = c.k0;
    j["length"] = opt(c.length);
    j["samples"] = c.samples;
    j["rel_tol"] = c.rel_tol;
    j["find"] = opt(c.find);
    j["max_den"] = c.max_den;
    j["closure_tol"] = c.closure_tol;
    j["initial"] = c.initial;
    j["n_points"] = c.n_points;
    j["stop_supA2"] = opt(c.stop_supA2);
    j["t_max"] = opt(c.t_max);
    j["rescale"] = c.rescale;
    j["window_fraction"] = c.window_fraction;
    j["action"] = c.action;
    j["all"] = c.all;
    j["input"] = c.input;
    j["out"] = c.out;
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const ordered_json known = to_json(RunConfig{});
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    RunConfig c;
    try {
        read(j, "command", c.command);
        read(j, "example", c.example);
        if (j.contains("params")) c.params = ordered_json(j["params"]);
        read(j, "checks", c.checks);
        read_opt(j, "grid", c.grid);
        read(j, "finite_difference", c.finite_difference);
        read_opt(j, "fd_constant", c.fd_constant);
        read(j, "dump_chart", c.dump_chart);
        read(j, "k0", c.k0);
        read_opt(j, "length", c.length);
        read(j, "samples", c.samples);
        read(j, "rel_tol", c.rel_tol);
        read_opt(j, "find", c.find);
        read(j, "max_den", c.max_den);
        read(j, "closure_tol", c.closure_tol);
        read(j, "initial", c.initial);
        read(j, "n_points", c.n_points);
        read_opt(j, "stop_supA2", c.stop_supA2);
        read_opt(j, "t_max", c.t_max);
        read(j, "rescale", c.rescale);
        read(j, "window_fraction", c.window_fraction);
        read(j, "action", c.action);
        read(j, "all", c.all);
        read(j, "input", c.input);
        read(j, "out", c.out);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    try {
        return config_from_json(json::parse(read_file(path)));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string verify_report_text(const RunConfig& c, bool* pass) {
    bool ok = false;
    const auto text = dump_json(verify_report(c, ok, nullptr)) + "\n";
    if (pass) *pass = ok;
    return text;
}

std::string flow_monitor_text(const RunConfig& c, bool* pass) {
    bool ok = false;
    const auto text = dump_json(flow_monitor(c, ok, nullptr)) + "\n";
    if (pass) *pass = ok;
    return text;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream&) {
    bool pass = false;
    std::vector<std::pair<std::string, std::string>> files;
    const auto text = dump_json(verify_report(c, pass, &files)) + "\n";
    files.insert(files.begin(), {"report.json", text});
    write_run(c, files);
    out << text;
    return fail_code(pass);
}

int cmd_al(const RunConfig& c, std::ostream& out, std::ostream&) {
    if (!(c.k0 > 0.0)) throw ConfigError("k0 must be positive");
    if (c.samples < 2) throw ConfigError("samples must be at least 2");
    const PeriodInfo period = curve_period(c.k0, c.rel_tol);
    const double length = c.length.value_or(period.period);
    if (!(length > 0.0)) throw ConfigError("length must be positive");
    std::vector<double> s(c.samples);
    for (int i = 0; i < c.samples; ++i) s[i] = length * i / (c.samples - 1);
    const auto states = sample_states(c.k0, s, c.rel_tol);

    std::ostringstream csv;
    csv << "s,x,y,phi,k,conserved\n";
    double drift = 0.0;
    const double c0 = states.front().conserved();
    for (const auto& st : states) {
        csv << format_double(st.s) << ',' << format_double(st.x) << ',' << format_double(st.y) << ','
            << format_double(st.phi) << ',' << format_double(st.k) << ',' << format_double(st.conserved()) << '\n';
        drift = std::max(drift, std::abs(st.conserved() - c0));
    }
    ordered_json j;
    j["k0"] = c.k0;
    j["length"] = length;
    j["samples"] = c.samples;
    j["conserved"] = c0;
    j["conserved_drift"] = drift;
    j["period"] = {{"k_partner", period.k_partner},
                   {"period", period.period},
                   {"delta_phi", period.delta_phi},
                   {"rotation_ratio", period.rotation_ratio()}};
    bool pass = drift <= 100.0 * c.rel_tol * std::max(1.0, length);
    if (c.find) {
        if (c.find->size() != 2) throw ConfigError("find needs lo,hi");
        ClosedSearchOptions o;
        o.closure_tol = c.closure_tol;
        o.max_den = c.max_den;
        o.rel_tol = c.rel_tol;
        ordered_json list = ordered_json::array();
        for (const auto& r : find_closed((*c.find)[0], (*c.find)[1], o)) {
            list.push_back({{"k0", r.k0},
                            {"rotation", std::to_string(r.rotation.p) + "/" + std::to_string(r.rotation.q)},
                            {"length", r.length},
                            {"closure_defect", r.closure_defect},
                            {"conserved_drift", r.conserved_drift}});
            pass = pass && r.closure_defect <= c.closure_tol;
        }
        j["closed"] = list;
    }
    j["pass"] = pass;
    const auto text = dump_json(j) + "\n";
    write_run(c, {{"curve.csv", csv.str()}, {"al.json", text}});
    out << text;
    return fail_code(pass);
}

int cmd_flow(const RunConfig& c, std::ostream& out, std::ostream&) {
    bool pass = false;
    std::vector<std::pair<std::string, std::string>> files;
    const auto m = flow_monitor(c, pass, c.out.empty() ? nullptr : &files);
    const auto text = dump_json(m) + "\n";
    files.insert(files.begin(), {"monitor.json", text});
    write_run(c, files);
    ordered_json summary;
    summary["steps"] = m["steps"];
    summary["stop_reason"] = m["stop_reason"];
    summary["blowup"] = m["blowup"];
    if (m.contains("type1_final")) summary["type1_final"] = m["type1_final"];
    if (m.contains("rescaled") && !m["rescaled"].empty())
        summary["rescaled_final_residual"] = m["rescaled"].back()["shrinker_residual"];
    out << dump_json(summary) << "\n";
    return fail_code(pass);
}

int cmd_catalog(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.action == "list") {
        ordered_json list = ordered_json::array();
        for (const auto& name : example_names()) {
            const auto ex = make_example(name, {{"grid", 16}});
            list.push_back({{"name", name}, {"recipe", ex.spec.recipe}, {"compact", ex.spec.compact}});
        }
        out << dump_json(list) << "\n";
        return exit_pass;
    }
    if (c.action != "verify") throw ConfigError("catalog action must be list or verify");
    std::vector<std::string> names;
    if (c.all || c.example.empty())
        names = example_names();
    else
        names = {c.example};
    ordered_json j;
    j["examples"] = ordered_json::array();
    bool pass = true;
    for (const auto& name : names) {
        const auto r = verify_example(make_example(name, c.params));
        j["examples"].push_back(to_json(r));
        err << (r.pass ? "PASS " : "FAIL ") << name << "\n";
        pass = pass && r.pass;
    }
    j["pass"] = pass;
    const auto text = dump_json(j) + "\n";
    write_run(c, {{"catalog_report.json", text}});
    out << text;
    return fail_code(pass);
}

int cmd_report(const RunConfig& c, std::ostream& out, std::ostream&) {
    if (c.input.empty()) throw ConfigError("report needs --in <run directory>");
    const fs::path dir(c.input);
    const auto m = json::parse(read_file(dir / "manifest.json"));
    const std::string command = m.at("command").get<std::string>();
    out << "run: " << command << "  version " << m.at("version").get<std::string>() << "  config "
        << m.at("config_hash").get<std::string>() << "\n";
    bool pass = true;
    if (command == "verify") {
        const auto r = json::parse(read_file(dir / "report.json"));
        out << "example: " << r.at("example").get<std::string>() << "\n";
        for (const auto& ch : r.at("checks"))
            out << "  " << (ch.at("pass").get<bool>() ? "pass " : "FAIL ") << ch.at("identity").get<std::string>()
                << "  max " << format_double(ch.at("max").is_number() ? ch.at("max").get<double>() : std::nan("")) << "\n";
        if (!r.at("classification").is_null())
            out << "  verdict " << r["classification"]["verdict"].get<std::string>() << "\n";
        pass = r.at("pass").get<bool>();
    } else if (command == "flow") {
        const auto r = json::parse(read_file(dir / "monitor.json"));
        out << "initial: " << r.at("initial").get<std::string>() << "  steps " << r.at("steps").get<long>() << "\n";
        if (!r.at("blowup").is_null()) {
            out << "  T_hat " << format_double(r["blowup"]["T_hat"].get<double>()) << "\n";
            out << "  type1 final " << format_double(r.at("type1_final").get<double>()) << "\n";
        } else {
            out << "  no blow-up detected\n";
        }
    } else if (command == "al") {
        const auto r = json::parse(read_file(dir / "al.json"));
        out << "k0 " << format_double(r.at("k0").get<double>()) << "  drift "
            << format_double(r.at("conserved_drift").get<double>()) << "\n";
        pass = r.at("pass").get<bool>();
    } else if (command == "catalog") {
        const auto r = json::parse(read_file(dir / "catalog_report.json"));
        for (const auto& e : r.at("examples"))
            out << "  " << (e.at("pass").get<bool>() ? "pass " : "FAIL ") << e.at("example").get<std::string>() << "\n";
        pass = r.at("pass").get<bool>();
    } else {
        throw ConfigError("manifest names unknown command '" + command + "'");
    }
    return fail_code(pass);
}

int run_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.command == "verify") return cmd_verify(c, out, err);
        if (c.command == "al") return cmd_al(c, out, err);
        if (c.command == "flow") return cmd_flow(c, out, err);
        if (c.command == "catalog") return cmd_catalog(c, out, err);
        if (c.command == "report") return cmd_report(c, out, err);
        throw ConfigError("unknown command '" + c.command + "'");
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const CapabilityError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const json::exception& e) {
        err << "error: malformed JSON: " << e.what() << "\n";
        return exit_config_error;
    } catch (const Error& e) {
        err << "check failed: " << e.what() << "\n";
        return exit_check_failed;
    }
}

}  // namespace shrinker
