#include <CLI11.hpp>

#include <cstring>
#include <iostream>
#include <string>

#include "json.hpp"
#include "shrinker/cli.hpp"
#include "shrinker/errors.hpp"

using shrinker::RunConfig;

namespace {

// key=value; the value is read as JSON when it parses, else kept as a string.
void apply_param(RunConfig& c, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw shrinker::ConfigError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    const auto parsed = nlohmann::json::parse(value, nullptr, false);
    c.params[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
}

std::string config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
        if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    try {
        const auto path = config_path(argc, argv);
        if (!path.empty()) cfg = shrinker::load_config(path);
    } catch (const shrinker::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return shrinker::exit_config_error;
    }

    CLI::App app{"Numerical laboratory for self-shrinkers of mean curvature flow"};
    app.set_version_flag("--version", std::string(SHRINKERLAB_VERSION));
    std::string config_file;
    app.add_option("--config", config_file, "JSON run configuration; flags override its values");
    app.require_subcommand(1);

    int grid = 0;
    std::vector<std::string> params;
    double fd_constant = 0.0, length = 0.0, stop = 0.0, t_max = 0.0;
    std::vector<double> find;
    std::string rescale = cfg.rescale ? "on" : "off";

    auto* verify = app.add_subcommand("verify", "Evaluate identities and diagnostics on a catalog example");
    verify->add_option("--example", cfg.example, "Catalog example name");
    verify->add_option("--checks", cfg.checks, "Comma-separated check names")->delimiter(',');
    auto* grid_opt = verify->add_option("--grid", grid, "Grid points per curved axis");
    verify->add_option("--param", params, "Example parameter key=value (repeatable)");
    verify->add_flag("--fd", cfg.finite_difference, "Re-derive all derivatives by finite differences");
    auto* fdc_opt = verify->add_option("--fd-constant", fd_constant, "C in the C h^2 tolerance of differenced checks");
    verify->add_flag("--dump-chart", cfg.dump_chart, "Write chart.csv and chart.json to the run directory");
    verify->add_option("--out", cfg.out, "Run directory");

    auto* al = app.add_subcommand("al", "Integrate an Abresch-Langer curve");
    al->add_option("--k0", cfg.k0, "Curvature at the start point");
    auto* length_opt = al->add_option("--length", length, "Arclength to sample (default: one curvature period)");
    al->add_option("--samples", cfg.samples, "Number of output samples");
    al->add_option("--rel-tol", cfg.rel_tol, "Integrator relative tolerance");
    auto* find_opt = al->add_option("--find", find, "Search lo,hi for closed curves")->delimiter(',')->expected(2);
    al->add_option("--max-den", cfg.max_den, "Largest rotation denominator in the closed-curve search");
    al->add_option("--closure-tol", cfg.closure_tol, "Closure defect accepted as closed");
    al->add_option("--out", cfg.out, "Run directory");

    auto* flow = app.add_subcommand("flow", "Curve-shortening flow with blow-up fit and rescaling");
    flow->add_option("--initial", cfg.initial, "circle:R | ellipse:a,b | al:k0 | file:path.csv");
    flow->add_option("--n-points", cfg.n_points, "Polygon vertices");
    auto* stop_opt = flow->add_option("--stop-supA2", stop, "Stop once sup k^2 reaches this value");
    auto* tmax_opt = flow->add_option("--t-max", t_max, "Stop at this time");
    flow->add_option("--rescale", rescale, "on|off")->check(CLI::IsMember({"on", "off"}));
    flow->add_option("--window-fraction", cfg.window_fraction, "Fraction of samples used in the blow-up fit");
    flow->add_option("--out", cfg.out, "Run directory");

    auto* catalog = app.add_subcommand("catalog", "List or verify catalog examples");
    catalog->add_option("action", cfg.action, "list | verify")->check(CLI::IsMember({"list", "verify"}));
    catalog->add_flag("--all", cfg.all, "Verify every example");
    catalog->add_option("--example", cfg.example, "Verify a single example");
    catalog->add_option("--out", cfg.out, "Run directory");

    auto* report = app.add_subcommand("report", "Summarize a run directory");
    report->add_option("--in", cfg.input, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : shrinker::exit_config_error;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (grid_opt->count()) cfg.grid = grid;
        if (fdc_opt->count()) cfg.fd_constant = fd_constant;
        if (length_opt->count()) cfg.length = length;
        if (find_opt->count()) cfg.find = find;
        if (stop_opt->count()) cfg.stop_supA2 = stop;
        if (tmax_opt->count()) cfg.t_max = t_max;
        cfg.rescale = rescale == "on";
        for (const auto& p : params) apply_param(cfg, p);
    } catch (const shrinker::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return shrinker::exit_config_error;
    }
    return shrinker::run_command(cfg, std::cout, std::cerr);
}
