// Copyright 2026 The cvcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvcluster/stats.h"
#include "gtest/gtest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cvcluster::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path dir = fs::temp_directory_path() / ("cvcluster_cli_" + std::string(info->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct Row {
    double b, d;
    bool missing;
    double ex, ey, inf, theta;
};

std::vector<Row> read_surface(const std::string &csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "b,d,err_x,err_y,err_inf,theta4p_used");
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        Row r{};
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            f.push_back(cell);
        }
        r.b = std::stod(f[0]);
        r.d = std::stod(f[1]);
        r.missing = f.size() < 6 || f[2].empty();
        if (!r.missing) {
            r.ex = std::stod(f[2]);
            r.ey = std::stod(f[3]);
            r.inf = std::stod(f[4]);
            r.theta = std::stod(f[5]);
        }
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::string> coarse(std::vector<std::string> extra) {
    std::vector<std::string> a{"error-surface", "--nb", "21", "--nd", "21"};
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
}

}  // namespace

TEST(cli, help_and_version) {
    Result r = cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("solve-phases"), std::string::npos);
    r = cli({"--version"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
    r = cli({"simulate", "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--z-gate"), std::string::npos);
}

TEST(cli, usage_errors) {
    for (auto args : std::vector<std::vector<std::string>>{
             {},
             {"nonsense"},
             {"solve-phases", "--a", "x"},
             {"simulate", "--shots", "-3"},
             {"solve-phases", "--bogus", "1"},
             {"error-surface", "--nb", "1.5"}}) {
        Result r = cli(args);
        EXPECT_EQ(r.code, 2);
        json e = json::parse(r.err);
        EXPECT_EQ(e["error"], "usage");
    }
}

TEST(cli, solve_phases_identity) {
    Result r = cli({"solve-phases"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = json::parse(r.out);
    for (const char *k : {"theta1", "theta2p", "theta3", "theta4p"}) {
        EXPECT_NEAR(j["phases"][k].get<double>(), std::numbers::pi / 2, 1e-15) << k;
    }
    EXPECT_TRUE(j["removable_pole"].get<bool>());
    EXPECT_LE(j["residual"].get<double>(), 1e-15);
}

TEST(cli, solve_phases_reference_target) {
    Result r = cli({"solve-phases", "--a", "2", "--b", "3", "--c", "1", "--d", "2", "--g1", "5", "--g2", "5", "--g3", "4",
                    "--g4", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = json::parse(r.out);
    EXPECT_LE(j["residual"].get<double>(), 1e-9);
    EXPECT_NEAR(j["cot"]["theta3"].get<double>(), 25.0 / 48.0, 1e-14);
    EXPECT_EQ(j["realized"].size(), 2u);
}

TEST(cli, solve_phases_degenerate_d) {
    Result r = cli({"solve-phases", "--a", "0", "--b", "1", "--c", "-1", "--d", "0"});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(json::parse(r.err)["error"], "degenerate-d");
    r = cli({"solve-phases", "--a", "2", "--b", "0", "--c", "0.4", "--d", "0.5", "--g1", "5", "--g2", "5", "--g3", "4",
             "--g4", "4"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["error"], "denominator-pole");
    r = cli({"solve-phases", "--a", "1", "--b", "1", "--c", "1", "--d", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["error"], "not-symplectic");
}

TEST(cli, degrees_on_the_boundary) {
    Result rad = cli({"solve-phases", "--a", "2", "--b", "3", "--c", "1", "--d", "2", "--theta4p", "1.2"});
    Result deg = cli({"solve-phases", "--a", "2", "--b", "3", "--c", "1", "--d", "2", "--theta4p",
                      cvcluster::format_double(1.2 * 180 / std::numbers::pi), "--degrees"});
    ASSERT_EQ(deg.code, 0) << deg.err;
    json jr = json::parse(rad.out), jd = json::parse(deg.out);
    EXPECT_EQ(jd["angle_unit"], "deg");
    EXPECT_NEAR(jd["phases"]["theta4p"].get<double>(), 1.2 * 180 / std::numbers::pi, 1e-9);
    EXPECT_NEAR(jd["phases"]["theta1"].get<double>(), jr["phases"]["theta1"].get<double>() * 180 / std::numbers::pi,
                1e-9);
    EXPECT_NEAR(jd["cot"]["theta3"].get<double>(), jr["cot"]["theta3"].get<double>(), 1e-9);
}

TEST(cli, error_surface_orderings) {
    fs::path dir = scratch_dir();
    auto run_to = [&](const std::string &name, std::vector<std::string> extra) {
        extra.push_back("--output");
        extra.push_back((dir / name).string());
        Result r = cli(coarse(extra));
        EXPECT_EQ(r.code, 0) << r.err;
        return read_surface(slurp(dir / name));
    };
    auto unit = run_to("unit.csv", {});
    auto fixed = run_to("fixed.csv", {"--g1", "5", "--g2", "5", "--g3", "4", "--g4", "4"});
    auto opt = run_to("opt.csv", {"--mode", "gaussian_optimized", "--g1", "5", "--g2", "5", "--g3", "4", "--g4", "4"});
    auto cub = run_to("cub.csv", {"--mode", "cubic_optimized", "--g1", "5", "--g2", "5", "--g3", "4", "--g4", "4"});
    ASSERT_EQ(unit.size(), 441u);
    int missing = 0;
    for (std::size_t i = 0; i < unit.size(); i++) {
        missing += unit[i].missing;
        if (!unit[i].missing && !fixed[i].missing) {
            EXPECT_LE(fixed[i].inf, unit[i].inf);
        }
        if (!fixed[i].missing) {
            ASSERT_FALSE(opt[i].missing);
            EXPECT_LE(opt[i].inf, fixed[i].inf);
        }
        if (!opt[i].missing) {
            ASSERT_FALSE(cub[i].missing);
            EXPECT_LE(cub[i].inf, opt[i].inf);
        }
    }
    EXPECT_EQ(missing, 21);  // the b = 0 row
    EXPECT_TRUE(fs::exists(dir / "cub.csv.manifest.json"));
}

TEST(cli, error_surface_to_stdout_is_deterministic) {
    Result a = cli(coarse({"--mode", "cubic_optimized", "--threads", "1"}));
    Result b = cli(coarse({"--mode", "cubic_optimized", "--threads", "3"}));
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.substr(0, 36), "b,d,err_x,err_y,err_inf,theta4p_used");
}

TEST(cli, manifest_reproduces_output) {
    fs::path dir = scratch_dir();
    std::string out = (dir / "s.csv").string();
    ASSERT_EQ(cli(coarse({"--mode", "gaussian_optimized", "--g1", "3", "--output", out})).code, 0);
    std::string first = slurp(out);
    json m = json::parse(slurp(out + ".manifest.json"));
    EXPECT_EQ(m["schema_version"], 1);
    EXPECT_EQ(m["subcommand"], "error-surface");
    EXPECT_EQ(m["config"]["g1"], 3.0);
    EXPECT_EQ(m["grid"]["nb"], 21);
    std::string again = (dir / "again.csv").string();
    Result r = cli({"error-surface", "--config", out + ".manifest.json", "--output", again});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(again), first);
    // A manifest from another subcommand is refused.
    r = cli({"simulate", "--config", out + ".manifest.json"});
    EXPECT_EQ(r.code, 2);
}

TEST(cli, manifest_timestamp_honours_source_date_epoch) {
    fs::path dir = scratch_dir();
    std::string out = (dir / "s.csv").string();
    setenv("SOURCE_DATE_EPOCH", "0", 1);
    ASSERT_EQ(cli(coarse({"--output", out})).code, 0);
    std::string m1 = slurp(out + ".manifest.json");
    ASSERT_EQ(cli(coarse({"--output", out})).code, 0);
    unsetenv("SOURCE_DATE_EPOCH");
    EXPECT_EQ(json::parse(m1)["timestamp"], "1970-01-01T00:00:00Z");
    EXPECT_EQ(slurp(out + ".manifest.json"), m1);
}

TEST(cli, config_precedence) {
    fs::path dir = scratch_dir();
    std::ofstream(dir / "c.json") << R"({"nb": 5, "nd": 4, "g1": 2.0, "error-surface": {"nd": 3}, "simulate": {"shots": 7}})";
    std::string cfg = (dir / "c.json").string();
    Result r = cli({"error-surface", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_surface(r.out).size(), 15u);  // section value beats top level
    r = cli({"error-surface", "--config", cfg, "--nb", "2"});
    EXPECT_EQ(read_surface(r.out).size(), 6u);  // flag beats config
    r = cli({"error-surface", "--nb", "2", "--nd", "2"});
    EXPECT_EQ(read_surface(r.out).size(), 4u);
    std::ofstream(dir / "bad.json") << R"({"nbb": 5})";
    r = cli({"error-surface", "--config", (dir / "bad.json").string()});
    EXPECT_EQ(r.code, 2);
    std::ofstream(dir / "type.json") << R"({"nb": "five"})";
    r = cli({"error-surface", "--config", (dir / "type.json").string()});
    EXPECT_EQ(r.code, 2);
    r = cli({"error-surface", "--config", (dir / "missing.json").string()});
    EXPECT_EQ(r.code, 2);
}

TEST(cli, error_surface_invalid_config) {
    EXPECT_EQ(cli(coarse({"--mode", "quartic"})).code, 2);
    EXPECT_EQ(cli(coarse({"--g2", "0"})).code, 2);
    EXPECT_EQ(cli(coarse({"--b-min", "3", "--b-max", "1"})).code, 2);
    Result r = cli(coarse({"--mode", "cubic_optimized", "--i-m", "-1"}));
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["error"], "nonpositive-im");
}

TEST(cli, simulate_identity_gaussian) {
    Result r = cli({"simulate", "--shots", "100000", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = json::parse(r.out);
    EXPECT_LT(std::fabs(j["z_err_var"][0].get<double>()), 4);
    EXPECT_LT(std::fabs(j["z_err_var"][1].get<double>()), 4);
    EXPECT_LT(std::fabs(j["z_mean"][0].get<double>()), 4);
    EXPECT_EQ(j["predicted_err"]["x"], 2.0);
    EXPECT_TRUE(j["gate_passed"].get<bool>());
    Result again = cli({"simulate", "--shots", "100000", "--seed", "1", "--threads", "4"});
    EXPECT_EQ(again.out, r.out);
}

TEST(cli, simulate_cubic_reports_photocurrent) {
    Result r = cli({"simulate", "--variant", "cubic", "--a", "2", "--b", "3", "--c", "1", "--d", "2", "--g1", "5", "--g2",
                    "5", "--g3", "4", "--g4", "4"});
    ASSERT_NE(r.code, 2) << r.err;
    json j = json::parse(r.out);
    double im = j["mean_i_m"].get<double>();
    double se = std::sqrt(j["var_i_m"].get<double>() / j["n_used"].get<double>());
    double var_x = 0.25 * std::pow(10, 1.5);
    EXPECT_NEAR(im, 0.3 * (125 + var_x), 4 * se);
    EXPECT_NEAR(im, 37.5, 0.1 * 37.5);
    EXPECT_TRUE(j["linearization"]["pass"].get<bool>());
    EXPECT_TRUE(j["linearization"]["alpha_warning"].get<bool>());
    EXPECT_GT(j["n_discarded"].get<int>(), 0);
}

TEST(cli, simulate_gate_and_records) {
    fs::path dir = scratch_dir();
    std::string rec = (dir / "shots.csv").string();
    std::string out = (dir / "summary.json").string();
    Result r = cli({"simulate", "--shots", "1000", "--z-gate", "1e-6", "--records", rec, "--output", out});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(json::parse(slurp(out))["gate_passed"].get<bool>());
    std::string csv = slurp(rec);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1001);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "shot,x_in,y_in,x_s1,y_s1,x_s2,y_s2,x_s3,y_s3,x_s4,y_s4,i_in,i_1,i_2,i_3,i_m,ff_x,ff_y,x_out,y_out,"
              "discarded");
    json m = json::parse(slurp(out + ".manifest.json"));
    EXPECT_EQ(m["seed"], 1);
    EXPECT_EQ(cli({"simulate", "--z-gate", "0", "--shots", "10"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--shots", "0"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--variant", "cubic", "--alpha", "-1", "--shots", "10"}).code, 2);
}

TEST(cli, gain_surface_summary) {
    fs::path dir = scratch_dir();
    std::string out = (dir / "gain.csv").string();
    Result r = cli({"gain-surface", "--nb", "11", "--nd", "11", "--output", out});
    ASSERT_EQ(r.code, 0) << r.err;
    json s = json::parse(r.out);
    EXPECT_GT(s["max_ratio"].get<double>(), 1);
    EXPECT_TRUE(s["argmax"].contains("b"));
    std::string csv = slurp(out);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "b,d,p_err_base,p_err_opt,ratio");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 122);
    json m = json::parse(slurp(out + ".manifest.json"));
    EXPECT_EQ(m["summary"], s);
    // To stdout, the summary moves to stderr.
    r = cli({"gain-surface", "--nb", "3", "--nd", "3", "--mode", "cubic_optimized"});
    EXPECT_EQ(r.out.substr(0, 5), "b,d,p");
    EXPECT_TRUE(json::parse(r.err).contains("max_ratio"));
    EXPECT_EQ(cli({"gain-surface", "--units", "hbar"}).code, 2);
}

TEST(cli, weight_bound) {
    Result r = cli({"weight-bound", "--db", "-15", "--g1", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    json j = json::parse(r.out);
    EXPECT_NEAR(j["max_weight"].get<double>(), 5.53655, 1e-5);
    EXPECT_FALSE(j["weights"]["g1"]["admissible"].get<bool>());
    EXPECT_TRUE(j["weights"]["g2"]["admissible"].get<bool>());
    EXPECT_NEAR(json::parse(cli({"weight-bound", "--db", "0"}).out)["max_weight"].get<double>(), 0.70710678, 1e-8);
    for (const char *bad : {"-inf", "inf", "nan"}) {
        Result e = cli({"weight-bound", std::string("--db=") + bad});
        EXPECT_EQ(e.code, 2) << bad;
        EXPECT_EQ(json::parse(e.err)["error"], "usage");
    }
    EXPECT_EQ(cli({"weight-bound"}).code, 2);
}

TEST(cli, cz_decompose) {
    json j = json::parse(cli({"cz-decompose", "--g", "1"}).out);
    EXPECT_NEAR(j["s"].get<double>(), 0.381966011250105, 1e-14);
    EXPECT_LE(j["residual"].get<double>(), 1e-12);
    EXPECT_EQ(j["factors"].size(), 5u);
    json zero = json::parse(cli({"cz-decompose", "--g", "0"}).out);
    json identity = json::array({json::array({1.0, 0.0, 0.0, 0.0}), json::array({0.0, 1.0, 0.0, 0.0}),
                                 json::array({0.0, 0.0, 1.0, 0.0}), json::array({0.0, 0.0, 0.0, 1.0})});
    EXPECT_EQ(zero["factors"][2]["name"], "squeezer");
    EXPECT_EQ(zero["factors"][2]["matrix"], identity);
    EXPECT_EQ(zero["s"], 1.0);
    EXPECT_LE(zero["residual"].get<double>(), 1e-15);
    json five = json::parse(cli({"cz-decompose", "--g", "5"}).out);
    EXPECT_NEAR(five["s"].get<double>(), 0.0370879821637399, 1e-14);
    EXPECT_EQ(cli({"cz-decompose", "--g", "-1"}).code, 2);
}
