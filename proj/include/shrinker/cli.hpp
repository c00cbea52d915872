#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace shrinker {

/// Everything a shrinkerlab run depends on. Round-trips through JSON.
struct RunConfig {
    std::string command;  // verify | al | flow | catalog | report

    // verify, catalog
    std::string example;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::vector<std::string> checks;
    std::optional<int> grid;
    bool finite_difference = false;
    std::optional<double> fd_constant;
    bool dump_chart = false;

    // al
    double k0 = 1.0;
    std::optional<double> length;
    int samples = 512;
    double rel_tol = 1e-12;
    std::optional<std::vector<double>> find;  // {lo, hi}
    long max_den = 20;
    double closure_tol = 1e-6;

    // flow
    std::string initial = "circle:2";
    int n_points = 512;
    std::optional<double> stop_supA2;
    std::optional<double> t_max;
    bool rescale = true;
    double window_fraction = 1.0 / 3.0;

    // catalog
    std::string action = "list";
    bool all = false;

    // report
    std::string input;

    std::string out;  // run directory; empty writes nothing to disk
};

nlohmann::ordered_json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys throw ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Exit codes shared by every command.
enum ExitCode { exit_pass = 0, exit_check_failed = 1, exit_config_error = 2 };

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_al(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_flow(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_catalog(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Dispatches on c.command and maps library errors to exit codes.
int run_command(const RunConfig& c, std::ostream& out, std::ostream& err);

/// JSON verify report for a config, exactly as cmd_verify prints it.
std::string verify_report_text(const RunConfig& c, bool* pass = nullptr);
/// JSON flow monitor for a config, exactly as cmd_flow writes it.
std::string flow_monitor_text(const RunConfig& c, bool* pass = nullptr);

}  // namespace shrinker
