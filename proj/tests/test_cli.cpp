#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "shrinker/cli.hpp"
#include "shrinker/report.hpp"

using namespace shrinker;
namespace fs = std::filesystem;

namespace {

RunConfig verify_config(const std::string& example, std::vector<std::string> checks) {
    RunConfig c;
    c.command = "verify";
    c.example = example;
    c.checks = std::move(checks);
    return c;
}

int run(const RunConfig& c, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o, e;
    const int code = run_command(c, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("shrinkerlab_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config round-trips through JSON") {
    RunConfig c = verify_config("sphere", {"ss7", "gauss"});
    c.params = {{"m", 3}};
    c.grid = 24;
    c.fd_constant = 2.5;
    c.find = std::vector<double>{0.3, 1.0};
    c.t_max = 0.125;
    c.rescale = false;
    c.out = "somewhere";
    const auto text = dump_json(to_json(c));
    const RunConfig back = config_from_json(nlohmann::json::parse(text));
    CHECK(dump_json(to_json(back)) == text);
    CHECK(back.grid == 24);
    CHECK(back.params["m"] == 3);
    CHECK_FALSE(back.stop_supA2);

    CHECK_THROWS(config_from_json(nlohmann::json{{"bogus", 1}}));
    CHECK_THROWS(config_from_json(nlohmann::json{{"grid", "many"}}));
}

TEST_CASE("verify exit codes") {
    std::string out, err;
    auto ok = verify_config("clifford_torus", {"gauss", "codazzi", "ss7", "ratio"});
    ok.grid = 64;
    CHECK(run(ok, &out) == exit_pass);
    const auto report = nlohmann::json::parse(out);
    CHECK(report["pass"] == true);
    CHECK(report["checks"].size() == 4);
    for (const auto& check : report["checks"]) {
        CHECK(check.size() == 6);
        for (const char* key : {"identity", "h", "max", "mean", "order", "pass"}) CHECK(check.contains(key));
    }
    CHECK(report["tolerances"].contains("ss7"));
    CHECK(report["classification"]["verdict"] == "spherical");

    CHECK(run(verify_config("ellipse", {}), nullptr, &err) == exit_config_error);
    CHECK(err.find("clifford_torus") != std::string::npos);
    CHECK(run(verify_config("circle", {"no_such_check"})) == exit_config_error);

    auto product = verify_config("al_product", {"parallel_nu"});
    product.grid = 48;
    CHECK(run(product, &out) == exit_check_failed);
    CHECK(nlohmann::json::parse(out)["checks"][0]["max"].get<double>() > 0.01);
}

TEST_CASE("al writes a constant-curvature circle for k0 = 1") {
    const auto dir = scratch("al");
    RunConfig c;
    c.command = "al";
    c.k0 = 1.0;
    c.out = dir.string();
    CHECK(run(c) == exit_pass);
    std::istringstream csv(slurp(dir / "curve.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "s,x,y,phi,k,conserved");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::vector<std::string> cells;
        std::stringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() == 6);
        const double k = std::stod(cells[4]);
        CHECK(std::abs(k - 1.0) <= 1e-12);
        ++rows;
    }
    CHECK(rows == c.samples);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "al");
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);
    fs::remove_all(dir);
}

TEST_CASE("flow on a circle reports the type-1 constant") {
    RunConfig c;
    c.command = "flow";
    c.initial = "circle:2";
    c.n_points = 128;
    c.rescale = true;
    bool pass = false;
    const auto m = nlohmann::json::parse(flow_monitor_text(c, &pass));
    CHECK(pass);
    CHECK(m["type1_final"].get<double>() == doctest::Approx(0.5).epsilon(0.1));
    CHECK(m["blowup"]["T_hat"].get<double>() == doctest::Approx(2.0).epsilon(0.01));
    CHECK_FALSE(m["rescaled"].empty());

    c.initial = "triangle:1";
    CHECK(run(c) == exit_config_error);
}

TEST_CASE("identical configs give byte-identical reports") {
    auto v = verify_config("sphere", {"shrinker", "ss7", "gauss", "ratio", "lemma4"});
    v.grid = 24;
    CHECK(verify_report_text(v) == verify_report_text(v));

    RunConfig f;
    f.command = "flow";
    f.initial = "ellipse:1.2,0.8";
    f.n_points = 64;
    CHECK(flow_monitor_text(f) == flow_monitor_text(f));

    const auto a = scratch("det_a"), b = scratch("det_b");
    v.out = a.string();
    CHECK(run(v) == exit_pass);
    v.out = b.string();
    CHECK(run(v) == exit_pass);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("catalog verify and report round trip") {
    const auto dir = scratch("catalog");
    RunConfig c;
    c.command = "catalog";
    c.action = "verify";
    c.example = "clifford_torus";
    c.out = dir.string();
    CHECK(run(c) == exit_pass);
    RunConfig r;
    r.command = "report";
    r.input = dir.string();
    std::string out;
    CHECK(run(r, &out) == exit_pass);
    CHECK(out.find("pass clifford_torus") != std::string::npos);
    r.input = (dir / "missing").string();
    CHECK(run(r) == exit_config_error);
    fs::remove_all(dir);
}
