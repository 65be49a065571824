#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vislab/cli.hpp"
#include "vislab/cylinder_model.hpp"
#include "vislab/simharness.hpp"

using namespace vislab;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("vislab_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("exact: cylinders in the plane") {
    const auto r = run({"exact", "--model", "pc", "--d", "2", "--alpha", "0.3", "--rho", "1", "--r", "10", "--s", "2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("limit_survival").get<double>() == doctest::Approx(std::exp(-0.6)).epsilon(1e-13));
    CHECK(j.at("lambda").get<double>() == doctest::Approx(0.3));
    CHECK(j.at("conditional_survival").get<double>() ==
          doctest::Approx(conditional_survival_exact(CylinderParams(0.3, 1.0, Dimension(2)), 10.0, 2.0)).epsilon(1e-13));
    CHECK(j.at("evaluation") == "exact");
    CHECK(r.err.empty());
}

TEST_CASE("exact: Boolean model at s = 0 and interlacements") {
    auto r = run({"exact", "--model", "bm", "--d", "2", "--alpha", "0.05", "--radius-law", "const:1", "--r", "20", "--s", "0"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j.at("conditional_survival").get<double>() == 1.0);
    CHECK(j.at("visibility_prob").get<double>() == doctest::Approx(std::exp(-0.05 * (kPi + 40.0))).epsilon(1e-10));

    r = run({"exact", "--model", "bi", "--d", "2", "--alpha", "1", "--rho", "1", "--r", "10", "--s", "1"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("d >= 3") != std::string::npos);

    r = run({"exact", "--model", "bi", "--d", "3", "--alpha", "1", "--rho", "1", "--r", "100", "--s", "1"});
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(j.at("evaluation") == "asymptotic");
    CHECK(j.at("conditional_survival").get<double>() == doctest::Approx(std::exp(-kPi / 2)).epsilon(1e-13));
}

TEST_CASE("usage errors exit with 2 and print nothing on stdout") {
    for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
             {},
             {"nonsense"},
             {"exact", "--model", "xx", "--d", "2", "--alpha", "1", "--rho", "1", "--r", "5", "--s", "1"},
             {"exact", "--model", "pc", "--d", "2", "--alpha", "1", "--r", "5", "--s", "1"},
             {"exact", "--model", "bm", "--d", "2", "--alpha", "1", "--radius-law", "disc:1@0.4", "--r", "5", "--s", "1"},
             {"exact", "--model", "bm", "--d", "2", "--alpha", "1", "--rho", "1", "--r", "5", "--s", "1"},
             {"exact", "--model", "pc", "--d", "2", "--alpha", "-1", "--rho", "1", "--r", "5", "--s", "1"},
             {"exact", "--model", "pc", "--d", "1", "--alpha", "1", "--rho", "1", "--r", "5", "--s", "1"},
             {"exact", "--model", "pc", "--d", "2", "--alpha", "1", "--rho", "1", "--r", "5", "--s", "x"},
             {"capacity", "--shape", "cylinder", "--d", "4", "--r", "10", "--n", "10", "--seed", "1"},
             {"capacity", "--shape", "ball", "--d", "2", "--r", "1", "--n", "10", "--seed", "1"},
             {"capacity", "--shape", "torus", "--d", "3", "--r", "1", "--n", "10", "--seed", "1"},
             {"simulate", "--model", "bi", "--d", "3", "--alpha", "1", "--rho", "1", "--r", "10", "--n", "5", "--seed", "1",
              "--out", tmp("x.csv")},
             {"limit-check", "--model", "pc", "--d", "2", "--alpha", "0.3", "--rho", "1", "--r-list", "5,abc", "--n",
              "100", "--seed", "1", "--out", tmp("x.json")},
             {"limit-check", "--model", "pc", "--d", "2", "--alpha", "0.3", "--rho", "1", "--r-list", "50,5", "--n",
              "100", "--seed", "1", "--out", tmp("x.json")},
         }) {
        const auto r = run(args);
        CAPTURE(r.err);
        CHECK(r.code == 2);
        CHECK(r.out.empty());
        CHECK_FALSE(r.err.empty());
    }
    const auto missing = run({"capacity", "--shape", "cylinder", "--d", "4", "--r", "10", "--n", "10", "--seed", "1"});
    CHECK(missing.err.find("--rho") != std::string::npos);
}

TEST_CASE("runtime errors exit with 1") {
    const auto r = run({"simulate", "--model", "bm", "--d", "2", "--alpha", "0.05", "--radius-law", "const:1", "--r",
                        "20", "--n", "3", "--seed", "1", "--out", "/nonexistent-dir/q.csv"});
    CHECK(r.code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("/nonexistent-dir/q.csv") != std::string::npos);
}

TEST_CASE("config file merges under command-line flags") {
    const auto path = tmp("config.json");
    write_json(path, json{{"model", "bm"}, {"d", 2}, {"alpha", 0.3}, {"rho", 1.0}, {"r", 10.0}, {"s", 2.0}});
    const auto r = run({"exact", "--config", path, "--model", "pc", "--s", "1"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("model") == "pc");
    CHECK(j.at("s").get<double>() == 1.0);
    CHECK(j.at("r").get<double>() == 10.0);
    write_json(path, json{{"bogus", 1}});
    CHECK(run({"exact", "--config", path}).code == 2);
    write_json(path, json{{"d", "two"}});
    CHECK(run({"exact", "--config", path}).code == 2);
    write_json(path, json{{"model", "pc"},
                          {"d", 2},
                          {"alpha", 0.3},
                          {"rho", 1.0},
                          {"r-list", "5,6"},
                          {"n", 100},
                          {"seed", 4},
                          {"threads", 2},
                          {"out", tmp("from_config.json")}});
    const auto lc = run({"limit-check", "--config", path});
    CHECK(lc.code == 0);
    CHECK(read_json(tmp("from_config.json")).at("config").at("r_list").size() == 2);
    std::filesystem::remove(path);
    std::filesystem::remove(tmp("from_config.json"));
}

TEST_CASE("simulate writes one CSV row per scene and is reproducible across thread counts") {
    const auto csv = tmp("sim.csv");
    const std::vector<std::string> base{"simulate", "--model", "pc", "--d", "3", "--alpha", "0.2", "--rho", "1",
                                        "--r", "30", "--n", "400", "--seed", "9", "--out", csv};
    auto args = base;
    args.insert(args.end(), {"--threads", "1"});
    const auto a = run(args);
    REQUIRE(a.code == 0);
    const std::string first = slurp(csv);
    CHECK(std::count(first.begin(), first.end(), '\n') == 401);
    args = base;
    args.insert(args.end(), {"--threads", "3"});
    const auto b = run(args);
    CHECK(b.out == a.out);
    CHECK(slurp(csv) == first);
    const auto j = json::parse(a.out);
    CHECK(j.at("ks_exact").get<double>() < 1.0);
    CHECK_FALSE(j.at("insufficient_data").get<bool>());

    args = base;
    args[12] = "0";
    const auto empty = run(args);
    REQUIRE(empty.code == 0);
    CHECK(json::parse(empty.out).at("insufficient_data").get<bool>());
    CHECK(slurp(csv) == "scene_index,q,q_over_delta,censored\n");
    std::filesystem::remove(csv);
}

TEST_CASE("capacity command") {
    const auto r = run({"capacity", "--shape", "ball", "--d", "3", "--r", "1", "--n", "20000", "--seed", "2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("estimate").get<double>() == doctest::Approx(2 * kPi).epsilon(0.05));
    CHECK(j.at("asymptotic").get<double>() == doctest::Approx(2 * kPi));
    for (const char* key : {"stderr", "bias_bound", "ratio"}) CHECK(j.contains(key));
    const auto cone = run({"capacity", "--shape", "cone", "--d", "4", "--r", "30", "--rho", "1", "--aperture", "0.5",
                           "--n", "2000", "--seed", "3", "--truncate-only"});
    REQUIRE(cone.code == 0);
    CHECK(json::parse(cone.out).at("truncate_only").get<bool>());
    CHECK(run({"capacity", "--shape", "cone", "--d", "4", "--r", "30", "--rho", "1", "--aperture", "40", "--n", "20",
               "--seed", "3"})
              .code == 2);
}

TEST_CASE("limit-check writes the report and a summary") {
    const auto out = tmp("report.json");
    const auto r = run({"limit-check", "--model", "pc", "--d", "2", "--alpha", "0.3", "--rho", "1", "--r-list", "5,10",
                        "--n", "300", "--seed", "1", "--out", out, "--s-grid", "0.5,1"});
    REQUIRE(r.code == 0);
    const auto summary = json::parse(r.out);
    CHECK(summary.at("records").size() == 2);
    const auto report = read_json(out);
    CHECK(report.at("schema_version") == kSchemaVersion);
    CHECK(report.at("config").at("s_grid") == json::array({0.5, 1.0}));
    CHECK(report.at("records")[0].at("empirical_survival").size() == 2);
    std::filesystem::remove(out);
}

TEST_CASE("help goes to stdout") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("limit-check") != std::string::npos);
}
