#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shrinker/chart.hpp"
#include "shrinker/shrinker_analysis.hpp"

namespace shrinker {

/// Where an expected value comes from.
enum class Provenance { reference_result, closed_form, oracle };
std::string to_string(Provenance p);

enum class Relation { at_most, at_least, approx, equals };
std::string to_string(Relation r);

/// Measurable property names understood by verify_example:
/// shrinker_max, H2, ratio, ratio_spread, rank, verdict, parallel_nu,
/// F_perp_max, F2.
struct Expectation {
    std::string property;
    Relation relation = Relation::at_most;
    double value = 0.0;
    double tolerance = 0.0;
    std::string text;  // expected verdict when property == "verdict"
    Provenance provenance = Provenance::closed_form;
    std::string oracle;
};

struct ExampleSpec {
    std::string name;
    nlohmann::ordered_json params;
    std::string recipe;
    bool compact = false;
    bool classifiable = true;
    double fd_constant = 1.0;
    /// Absolute tolerance for shrinker and algebraic checks.
    double tolerance = 1e-10;
    std::vector<Expectation> expectations;
    std::optional<std::string> note;
};

struct Example {
    SampledChart chart;
    ExampleSpec spec;
};

const std::vector<std::string>& example_names();

/// Builds a named example. `params` overrides defaults; unknown names or
/// parameters throw ConfigError.
Example make_example(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

struct ExpectationOutcome {
    Expectation expected;
    double measured = 0.0;
    std::string measured_text;
    bool pass = false;
};

struct ExampleReport {
    std::string name;
    nlohmann::ordered_json params;
    std::vector<ExpectationOutcome> outcomes;
    Classification classification;
    bool pass = true;
};

ClassifyOptions classify_options(const ExampleSpec& spec, const SampledChart& chart);

ExampleReport verify_example(const Example& example);
nlohmann::ordered_json to_json(const ExampleReport& report);

}  // namespace shrinker
