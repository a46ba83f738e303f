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

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "cvcluster/cz_gate.h"
#include "cvcluster/error_model.h"
#include "cvcluster/gkp_probability.h"
#include "cvcluster/heisenberg_sim.h"
#include "cvcluster/kernels.h"
#include "cvcluster/phase_solver.h"
#include "cvcluster/stats.h"
#include "json.hpp"

#ifndef CVCLUSTER_VERSION
#define CVCLUSTER_VERSION "0.0.0"
#endif

namespace cvcluster::cli {
namespace {

using nlohmann::json;

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr std::string_view kSurfaceColumns = "b,d,err_x,err_y,err_inf,theta4p_used";
inline constexpr std::string_view kGainColumns = "b,d,p_err_base,p_err_opt,ratio";

/// Bad flag values, unknown config keys and unreadable files.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind {
    kNumber,
    kInteger,
    kString,
    kFlag,
};

struct Param {
    std::string key;
    Kind kind;
    json def;
    std::string help;
};

struct Io {
    std::ostream &out;
    std::ostream &err;
};

using Handler = std::function<int(const json &cfg, Io &io)>;

struct Command {
    std::string name;
    std::string help;
    std::vector<Param> params;
    Handler handler;
};

std::string dashed(std::string key) {
    for (char &ch : key) {
        if (ch == '_') {
            ch = '-';
        }
    }
    return key;
}

json parse_flag_value(const Param &p, const std::string &raw) {
    const char *first = raw.data(), *last = raw.data() + raw.size();
    switch (p.kind) {
        case Kind::kNumber: {
            double v = 0;
            auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr != last) {
                throw UsageError("--" + dashed(p.key) + ": not a number: " + raw);
            }
            return v;
        }
        case Kind::kInteger: {
            std::uint64_t v = 0;
            auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr != last) {
                throw UsageError("--" + dashed(p.key) + ": not a non-negative integer: " + raw);
            }
            return v;
        }
        case Kind::kString:
            return raw;
        case Kind::kFlag:
            return true;
    }
    return nullptr;
}

void check_type(const Param &p, const json &v) {
    bool ok = false;
    switch (p.kind) {
        case Kind::kNumber:
            ok = v.is_number() || (v.is_null() && p.def.is_null());
            break;
        case Kind::kInteger:
            ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0) ||
                 (v.is_null() && p.def.is_null());
            break;
        case Kind::kString:
            ok = v.is_string();
            break;
        case Kind::kFlag:
            ok = v.is_boolean();
            break;
    }
    if (!ok) {
        throw UsageError("value of '" + p.key + "' has the wrong type");
    }
    if (p.kind == Kind::kNumber && v.is_number() && !std::isfinite(v.get<double>())) {
        throw UsageError("value of '" + p.key + "' must be finite");
    }
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what());
    }
}

/// Config file layer: a manifest (its resolved config), or a flat object whose keys are
/// parameter names with optional per-subcommand sections.
json config_layer(const json &file, const Command &cmd, const std::vector<std::string> &subcommands) {
    if (!file.is_object()) {
        throw UsageError("config file must hold a JSON object");
    }
    if (file.contains("schema_version") && file.contains("config")) {
        if (file.value("subcommand", "") != cmd.name) {
            throw UsageError("manifest was written by '" + file.value("subcommand", "") + "', not '" + cmd.name + "'");
        }
        return file.at("config");
    }
    json layer = json::object();
    for (auto it = file.begin(); it != file.end(); ++it) {
        bool is_section = std::find(subcommands.begin(), subcommands.end(), it.key()) != subcommands.end();
        if (!is_section) {
            layer[it.key()] = it.value();
        }
    }
    if (file.contains(cmd.name)) {
        const json &section = file.at(cmd.name);
        if (!section.is_object()) {
            throw UsageError("config section '" + cmd.name + "' must be an object");
        }
        for (auto it = section.begin(); it != section.end(); ++it) {
            layer[it.key()] = it.value();
        }
    }
    return layer;
}

json resolve(
    const Command &cmd,
    const std::map<std::string, std::string> &raw,
    const std::map<std::string, CLI::Option *> &opts,
    const std::string &config_path,
    const std::vector<std::string> &subcommands) {
    json cfg = json::object();
    for (const Param &p : cmd.params) {
        cfg[p.key] = p.def;
    }
    if (!config_path.empty()) {
        json layer = config_layer(read_json_file(config_path), cmd, subcommands);
        for (auto it = layer.begin(); it != layer.end(); ++it) {
            auto p = std::find_if(cmd.params.begin(), cmd.params.end(), [&](const Param &q) { return q.key == it.key(); });
            if (p == cmd.params.end()) {
                throw UsageError("unknown config key '" + it.key() + "' for " + cmd.name);
            }
            check_type(*p, it.value());
            cfg[it.key()] = it.value();
        }
    }
    for (const Param &p : cmd.params) {
        if (opts.at(p.key)->count() > 0) {
            auto it = raw.find(p.key);
            json v = parse_flag_value(p, it == raw.end() ? std::string() : it->second);
            check_type(p, v);
            cfg[p.key] = v;
        }
    }
    return cfg;
}

// Typed accessors on a resolved config.
double num(const json &cfg, const std::string &key) {
    return cfg.at(key).get<double>();
}
std::optional<double> opt_num(const json &cfg, const std::string &key) {
    const json &v = cfg.at(key);
    return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
}
std::uint64_t integer(const json &cfg, const std::string &key) {
    return cfg.at(key).get<std::uint64_t>();
}
std::string str(const json &cfg, const std::string &key) {
    return cfg.at(key).get<std::string>();
}
bool flag(const json &cfg, const std::string &key) {
    return cfg.at(key).get<bool>();
}

double angle_in(const json &cfg, double v) {
    return flag(cfg, "degrees") ? v * std::numbers::pi / 180 : v;
}
double angle_out(const json &cfg, double v) {
    return flag(cfg, "degrees") ? v * 180 / std::numbers::pi : v;
}
double theta4p_of(const json &cfg) {
    auto v = opt_num(cfg, "theta4p");
    return v ? angle_in(cfg, *v) : kHalfPi;
}

WeightConfig weights(const json &cfg, const std::string &prefix = "") {
    return {num(cfg, prefix + "g1"), num(cfg, prefix + "g2"), num(cfg, prefix + "g3"), num(cfg, prefix + "g4")};
}

SymplecticTarget target(const json &cfg) {
    return {num(cfg, "a"), num(cfg, "b"), num(cfg, "c"), num(cfg, "d")};
}

CubicConfig cubic(const json &cfg) {
    CubicConfig c = CubicConfig::at_mean(num(cfg, "gamma"), num(cfg, "alpha"));
    if (auto im = opt_num(cfg, "i_m")) {
        c.i_m = *im;
    }
    c.validate();
    return c;
}

Tolerances tolerances(const json &cfg) {
    Tolerances t;
    t.symplectic = num(cfg, "symplectic_tol");
    return t;
}

json matrix_json(const Mat2 &m) {
    return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})});
}

json matrix_json(const Mat4 &m) {
    json rows = json::array();
    for (int i = 0; i < 4; i++) {
        rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2), m(i, 3)}));
    }
    return rows;
}

json pair_json(const std::array<double, 2> &v) {
    return json::array({v[0], v[1]});
}

json cov_json(const std::array<std::array<double, 2>, 2> &m) {
    return json::array({pair_json(m[0]), pair_json(m[1])});
}

std::string timestamp() {
    std::time_t t;
    if (const char *epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json grid_json(const ErrorSurfaceSpec &s) {
    return {{"b_min", s.b_range.lo}, {"b_max", s.b_range.hi}, {"d_min", s.d_range.lo}, {"d_max", s.d_range.hi},
            {"nb", s.nb}, {"nd", s.nd}, {"order", "row-major, b outer, d inner"}};
}

json manifest(const std::string &subcommand, const json &cfg) {
    return {{"schema_version", kManifestSchemaVersion}, {"tool", "cvcluster"}, {"version", CVCLUSTER_VERSION},
            {"subcommand", subcommand}, {"config", cfg}, {"timestamp", timestamp()},
            {"isa", kernels::isa_name(kernels::active_isa())}};
}

/// Writes `text` to `path`, or to `out` for "-".
void emit(const std::string &path, const std::string &text, std::ostream &out) {
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text) || !(f.flush())) {
        throw UsageError("cannot write " + path);
    }
}

/// Sidecar path: explicit --manifest, else <output>.manifest.json for file outputs.
std::string manifest_path(const json &cfg) {
    std::string m = str(cfg, "manifest");
    if (!m.empty()) {
        return m;
    }
    std::string o = str(cfg, "output");
    return o == "-" ? "" : o + ".manifest.json";
}

void write_manifest(const json &cfg, const json &m) {
    std::string path = manifest_path(cfg);
    if (!path.empty()) {
        std::ostringstream dummy;
        emit(path, m.dump(2) + "\n", dummy);
    }
}

// Parameter groups shared by several subcommands.
std::vector<Param> weight_params(std::array<double, 4> def, const std::string &prefix = "", const std::string &what = "") {
    std::vector<Param> out;
    for (int i = 0; i < 4; i++) {
        std::string k = prefix + "g" + std::to_string(i + 1);
        out.push_back({k, Kind::kNumber, def[i], what + "CZ weight g" + std::to_string(i + 1)});
    }
    return out;
}

std::vector<Param> target_params() {
    return {{"a", Kind::kNumber, 1.0, "target matrix entry a"},
            {"b", Kind::kNumber, 0.0, "target matrix entry b"},
            {"c", Kind::kNumber, 0.0, "target matrix entry c"},
            {"d", Kind::kNumber, 1.0, "target matrix entry d"},
            {"symplectic_tol", Kind::kNumber, 1e-12, "tolerance on |det - 1|"}};
}

std::vector<Param> grid_params() {
    return {{"b_min", Kind::kNumber, -5.0, "lowest b"},   {"b_max", Kind::kNumber, 5.0, "highest b"},
            {"d_min", Kind::kNumber, -5.0, "lowest d"},   {"d_max", Kind::kNumber, 5.0, "highest d"},
            {"nb", Kind::kInteger, 101, "grid points in b"}, {"nd", Kind::kInteger, 101, "grid points in d"}};
}

std::vector<Param> cubic_params() {
    return {{"gamma", Kind::kNumber, 0.1, "cubic phase gate coefficient"},
            {"alpha", Kind::kNumber, 11.180339887498949, "displacement of the non-Gaussian node"},
            {"i_m", Kind::kNumber, nullptr, "photocurrent combination I_m (default 3*gamma*alpha^2)"}};
}

std::vector<Param> output_params(bool with_manifest = true) {
    std::vector<Param> p{{"output", Kind::kString, "-", "output path, - for stdout"}};
    if (with_manifest) {
        p.push_back({"manifest", Kind::kString, "", "manifest path (default <output>.manifest.json)"});
    }
    p.push_back({"threads", Kind::kInteger, 0, "worker threads, 0 for CVCLUSTER_THREADS or all cores"});
    return p;
}

Param degrees_param() {
    return {"degrees", Kind::kFlag, false, "read and print angles in degrees"};
}

Param theta4p_param() {
    return {"theta4p", Kind::kNumber, nullptr, "free phase theta4' (default pi/2)"};
}

template <typename... Groups>
std::vector<Param> join(Groups... groups) {
    std::vector<Param> out;
    (out.insert(out.end(), groups.begin(), groups.end()), ...);
    return out;
}

ErrorSurfaceSpec surface_spec(const json &cfg, const std::string &mode_key, const std::string &weight_prefix) {
    ErrorSurfaceSpec s;
    s.b_range = {num(cfg, "b_min"), num(cfg, "b_max")};
    s.d_range = {num(cfg, "d_min"), num(cfg, "d_max")};
    s.nb = integer(cfg, "nb");
    s.nd = integer(cfg, "nd");
    s.w = weights(cfg, weight_prefix);
    s.w.validate();
    s.mode = parse_surface_mode(str(cfg, mode_key));
    if (s.mode == SurfaceMode::kCubicOptimized) {
        s.cubic = cubic(cfg);
    }
    if (cfg.contains("theta4p")) {
        s.theta4p = theta4p_of(cfg);
        require_angle(s.theta4p, "theta4p");
    }
    s.threads = integer(cfg, "threads");
    s.validate();
    return s;
}

// solve-phases

int cmd_solve_phases(const json &cfg, Io &io) {
    SymplecticTarget t = target(cfg);
    WeightConfig w = weights(cfg);
    SolverResult r = solve_phases(t, w, theta4p_of(cfg), tolerances(cfg));
    DetectorCot det = unprimed(r.cot2p, r.cot4p, w);
    json j = {
        {"angle_unit", flag(cfg, "degrees") ? "deg" : "rad"},
        {"phases",
         {{"theta1", angle_out(cfg, r.phases.theta1)},
          {"theta2p", angle_out(cfg, r.phases.theta2p)},
          {"theta3", angle_out(cfg, r.phases.theta3)},
          {"theta4p", angle_out(cfg, r.phases.theta4p)}}},
        {"detector_phases",
         {{"theta1", angle_out(cfg, r.phases.theta1)},
          {"theta2", angle_out(cfg, arccot(det.cot2))},
          {"theta3", angle_out(cfg, r.phases.theta3)},
          {"theta4", angle_out(cfg, arccot(det.cot4))}}},
        {"cot", {{"theta1", r.cot1}, {"theta2p", r.cot2p}, {"theta3", r.cot3}, {"theta4p", r.cot4p}}},
        {"target", matrix_json(t)},
        {"realized", matrix_json(r.realized)},
        {"residual", r.residual},
        {"cot_residual", r.cot_residual},
        {"removable_pole", r.removable_pole},
        {"ill_conditioned", r.ill_conditioned},
    };
    io.out << j.dump(2) << '\n';
    return kExitOk;
}

// error-surface

int cmd_error_surface(const json &cfg, Io &io) {
    ErrorSurfaceSpec spec = surface_spec(cfg, "mode", "");
    std::vector<SurfaceCell> cells = error_surface(spec);
    std::string csv;
    csv.reserve(cells.size() * 96);
    csv += kSurfaceColumns;
    csv += '\n';
    for (const SurfaceCell &c : cells) {
        csv += format_double(c.b) + ',' + format_double(c.d) + ',';
        if (c.err) {
            csv += format_double(c.err->ex) + ',' + format_double(c.err->ey) + ',' + format_double(c.err_inf) + ',' +
                   format_double(angle_out(cfg, c.theta4p));
        } else {
            csv += ",,,";
        }
        csv += '\n';
    }
    emit(str(cfg, "output"), csv, io.out);
    json m = manifest("error-surface", cfg);
    m["grid"] = grid_json(spec);
    m["csv_columns"] = kSurfaceColumns;
    write_manifest(cfg, m);
    return kExitOk;
}

// simulate

json summary_json(const SimConfig &c, const SimSummary &s, const json &cfg) {
    const SolverResult &sol = s.solution;
    json j = {
        {"variant", variant_name(c.variant)},
        {"n_shots", s.n_shots},
        {"n_used", s.n_used},
        {"n_discarded", s.n_discarded},
        {"discard_fraction", static_cast<double>(s.n_discarded) / static_cast<double>(s.n_shots)},
        {"n_branch_flipped", s.n_branch_flipped},
        {"angle_unit", flag(cfg, "degrees") ? "deg" : "rad"},
        {"phases",
         {{"theta1", angle_out(cfg, sol.phases.theta1)},
          {"theta2p", angle_out(cfg, sol.phases.theta2p)},
          {"theta3", angle_out(cfg, sol.phases.theta3)},
          {"theta4p", angle_out(cfg, sol.phases.theta4p)}}},
        {"mean_out", pair_json(s.mean_out)},
        {"predicted_mean", pair_json(s.predicted_mean)},
        {"cov_out", cov_json(s.cov_out)},
        {"predicted_cov", cov_json(s.predicted_cov)},
        {"err_mean", pair_json(s.err_mean)},
        {"err_var", pair_json(s.err_var)},
        {"err_cov_xy", s.err_cov_xy},
        {"err_kurtosis", pair_json(s.err_kurtosis)},
        {"empirical_err", {{"x", s.empirical_err.ex}, {"y", s.empirical_err.ey}}},
        {"predicted_err", {{"x", s.predicted_err.ex}, {"y", s.predicted_err.ey}}},
        {"predicted_err_xy", s.predicted_err_xy},
        {"z_err_var", pair_json(s.z_err_var)},
        {"z_err_var_normal", pair_json(s.z_err_var_normal)},
        {"z_mean", pair_json(s.z_mean)},
        {"max_abs_z", s.max_abs_z()},
    };
    if (c.variant == Variant::kCubic) {
        LinearizationReport lin = linearization_check(c);
        j["mean_i_m"] = s.mean_i_m;
        j["var_i_m"] = s.var_i_m;
        j["suppression"] = 12 * c.cubic->gamma * s.mean_i_m;
        j["linearization"] = {{"first_ratio", lin.first_ratio},   {"second_ratio", lin.second_ratio},
                              {"safety_factor", lin.safety_factor}, {"pass", lin.pass},
                              {"alpha_ratio", lin.alpha_ratio},   {"alpha_warning", lin.alpha_warning}};
    }
    return j;
}

int cmd_simulate(const json &cfg, Io &io) {
    SimConfig c;
    c.target = target(cfg);
    c.w = weights(cfg);
    c.theta4p = theta4p_of(cfg);
    c.squeezing = SqueezingSpec::from_db(num(cfg, "db"));
    c.variant = parse_variant(str(cfg, "variant"));
    if (c.variant == Variant::kCubic) {
        c.cubic = CubicConfig::at_mean(num(cfg, "gamma"), num(cfg, "alpha"));
    }
    c.input = {num(cfg, "mean_x"), num(cfg, "mean_y"), num(cfg, "var_x"), num(cfg, "var_y")};
    c.n_shots = integer(cfg, "shots");
    c.seed = integer(cfg, "seed");
    c.threads = integer(cfg, "threads");
    c.tol = tolerances(cfg);
    std::string records = str(cfg, "records");
    c.keep_records = !records.empty();
    double gate = num(cfg, "z_gate");
    if (!(gate > 0)) {
        throw UsageError("--z-gate must be positive");
    }

    SimSummary s = simulate(c);
    json j = summary_json(c, s, cfg);
    bool passed = s.max_abs_z() <= gate;
    j["z_gate"] = gate;
    j["gate_passed"] = passed;
    emit(str(cfg, "output"), j.dump(2) + "\n", io.out);
    if (c.keep_records) {
        std::ostringstream csv;
        write_records_csv(csv, s.records);
        emit(records, csv.str(), io.out);
    }
    json m = manifest("simulate", cfg);
    m["seed"] = c.seed;
    m["record_columns"] = kRecordCsvHeader;
    m["shot_block"] = kShotBlock;
    write_manifest(cfg, m);
    return passed ? kExitOk : kExitGate;
}

// gain-surface

int cmd_gain_surface(const json &cfg, Io &io) {
    ErrorSurfaceSpec base = surface_spec(cfg, "base_mode", "base_");
    ErrorSurfaceSpec opt = surface_spec(cfg, "mode", "");
    SqueezingSpec squeezing = SqueezingSpec::from_db(num(cfg, "db"));
    GkpUnits units = parse_gkp_units(str(cfg, "units"));
    GainSurface g = gain_surface(base, opt, squeezing, units);

    auto field = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string(); };
    std::string csv;
    csv.reserve(g.cells.size() * 96);
    csv += kGainColumns;
    csv += '\n';
    for (const GainCell &c : g.cells) {
        csv += format_double(c.b) + ',' + format_double(c.d) + ',' + field(c.p_base) + ',' + field(c.p_opt) + ',' +
               field(c.ratio) + '\n';
    }
    std::string output = str(cfg, "output");
    emit(output, csv, io.out);

    json summary = {{"max_ratio", g.argmax ? json(g.max_ratio) : json(nullptr)}};
    if (g.argmax) {
        const GainCell &c = g.cells[*g.argmax];
        summary["argmax"] = {{"b", c.b}, {"d", c.d}, {"p_err_base", *c.p_base}, {"p_err_opt", *c.p_opt}};
    } else {
        summary["argmax"] = nullptr;
    }
    (output == "-" ? io.err : io.out) << summary.dump() << '\n';

    json m = manifest("gain-surface", cfg);
    m["grid"] = grid_json(opt);
    m["csv_columns"] = kGainColumns;
    m["summary"] = summary;
    write_manifest(cfg, m);
    return kExitOk;
}

// weight-bound

int cmd_weight_bound(const json &cfg, Io &io) {
    auto db = opt_num(cfg, "db");
    if (!db) {
        throw UsageError("--db is required");
    }
    double bound = max_weight(*db);
    json j = {{"db", *db}, {"max_weight", bound}};
    json ws = json::object();
    WeightConfig w = weights(cfg);
    for (auto [name, g] : {std::pair{"g1", w.g1}, {"g2", w.g2}, {"g3", w.g3}, {"g4", w.g4}}) {
        ws[name] = {{"value", g}, {"admissible", weight_admissible(g, *db)}};
    }
    j["weights"] = ws;
    io.out << j.dump(2) << '\n';
    return kExitOk;
}

// cz-decompose

int cmd_cz_decompose(const json &cfg, Io &io) {
    CzDecomposition dec = bloch_messiah(num(cfg, "g"));
    static const char *names[5] = {"phase_shifter_out", "beam_splitter_out", "squeezer", "beam_splitter_in",
                                   "phase_shifter_in"};
    json factors = json::array();
    for (int i = 0; i < 5; i++) {
        factors.push_back({{"name", names[i]}, {"matrix", matrix_json(dec.factors[i])}});
    }
    json j = {{"g", dec.g},
              {"s", dec.s},
              {"r_bs", dec.r_bs},
              {"t_bs", dec.t_bs},
              {"order", "left-to-right product; the last factor acts first"},
              {"factors", factors},
              {"product", matrix_json(dec.product())},
              {"cz", matrix_json(cz_matrix(dec.g))},
              {"residual", dec.residual()}};
    io.out << j.dump(2) << '\n';
    return kExitOk;
}

std::vector<Command> commands() {
    std::vector<Command> cmds;
    cmds.push_back({"solve-phases", "homodyne phases realizing a target matrix",
                    join(target_params(), weight_params({1, 1, 1, 1}), std::vector<Param>{theta4p_param(), degrees_param()}),
                    cmd_solve_phases});
    cmds.push_back({"error-surface", "excess-noise surface over (b, d)",
                    join(std::vector<Param>{{"mode", Kind::kString, "gaussian_fixed",
                                             "gaussian_fixed, gaussian_optimized or cubic_optimized"}},
                         weight_params({1, 1, 1, 1}), grid_params(), cubic_params(),
                         std::vector<Param>{theta4p_param(), degrees_param()}, output_params()),
                    cmd_error_surface});
    cmds.push_back({"simulate", "Monte Carlo propagation of sampled quadratures",
                    join(std::vector<Param>{{"variant", Kind::kString, "gaussian", "gaussian or cubic"}}, target_params(),
                         weight_params({1, 1, 1, 1}),
                         std::vector<Param>{theta4p_param(),
                                            degrees_param(),
                                            {"db", Kind::kNumber, -15.0, "resource squeezing in dB"},
                                            {"shots", Kind::kInteger, 100000, "number of shots"},
                                            {"seed", Kind::kInteger, 1, "RNG seed"},
                                            {"gamma", Kind::kNumber, 0.1, "cubic phase gate coefficient"},
                                            {"alpha", Kind::kNumber, 11.180339887498949, "non-Gaussian node displacement"},
                                            {"mean_x", Kind::kNumber, 0.0, "input mean of x"},
                                            {"mean_y", Kind::kNumber, 0.0, "input mean of y"},
                                            {"var_x", Kind::kNumber, kVacuumVariance, "input variance of x"},
                                            {"var_y", Kind::kNumber, kVacuumVariance, "input variance of y"},
                                            {"z_gate", Kind::kNumber, 5.0, "exit 3 when any |z| exceeds this"},
                                            {"records", Kind::kString, "", "per-shot CSV path"}},
                         output_params()),
                    cmd_simulate});
    cmds.push_back({"gain-surface", "ratio of GKP error probabilities over (b, d)",
                    join(std::vector<Param>{{"base_mode", Kind::kString, "gaussian_fixed", "baseline surface mode"},
                                            {"mode", Kind::kString, "gaussian_optimized", "optimized surface mode"},
                                            {"db", Kind::kNumber, -15.0, "resource squeezing in dB"},
                                            {"units", Kind::kString, "lattice", "lattice or literal"}},
                         weight_params({1, 1, 1, 1}, "base_", "baseline "), weight_params({5, 5, 4, 4}), grid_params(),
                         cubic_params(), output_params()),
                    cmd_gain_surface});
    cmds.push_back({"weight-bound", "largest CZ weight allowed by the in-line squeezer",
                    join(std::vector<Param>{{"db", Kind::kNumber, nullptr, "resource squeezing in dB"}},
                         weight_params({5, 5, 4, 4})),
                    cmd_weight_bound});
    cmds.push_back({"cz-decompose", "Bloch-Messiah factors of a weighted CZ gate",
                    {{"g", Kind::kNumber, 1.0, "CZ weight"}}, cmd_cz_decompose});
    return cmds;
}

void error_json(std::ostream &err, std::string_view code, const std::string &message) {
    err << json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<Command> cmds = commands();
    std::vector<std::string> names;
    for (const Command &c : cmds) {
        names.push_back(c.name);
    }

    CLI::App app("Linear cluster one-way computation: phases, error surfaces, Monte Carlo checks", "cvcluster");
    app.set_version_flag("--version", CVCLUSTER_VERSION);
    app.require_subcommand(1);

    struct Bound {
        CLI::App *sub = nullptr;
        std::map<std::string, std::string> raw;
        std::map<std::string, CLI::Option *> opts;
        std::string config;
    };
    std::vector<Bound> bound(cmds.size());
    for (std::size_t i = 0; i < cmds.size(); i++) {
        Bound &b = bound[i];
        b.sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        b.sub->add_option("--config", b.config, "JSON config file or manifest");
        for (const Param &p : cmds[i].params) {
            std::string name = "--" + dashed(p.key);
            if (p.kind == Kind::kFlag) {
                b.opts[p.key] = b.sub->add_flag(name, p.help);
            } else {
                std::string help = p.help;
                if (!p.def.is_null()) {
                    help += " [" + (p.def.is_string() ? p.def.get<std::string>() : p.def.dump()) + "]";
                }
                b.opts[p.key] = b.sub->add_option(name, b.raw[p.key], help);
            }
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForVersion &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        error_json(err, "usage", e.what());
        return kExitConfig;
    }

    for (std::size_t i = 0; i < cmds.size(); i++) {
        if (!bound[i].sub->parsed()) {
            continue;
        }
        try {
            json cfg = resolve(cmds[i], bound[i].raw, bound[i].opts, bound[i].config, names);
            Io io{out, err};
            return cmds[i].handler(cfg, io);
        } catch (const UsageError &e) {
            error_json(err, "usage", e.what());
            return kExitConfig;
        } catch (const Error &e) {
            error_json(err, error_code_name(e.code()), e.what());
            return kExitConfig;
        } catch (const json::exception &e) {
            error_json(err, "usage", e.what());
            return kExitConfig;
        }
    }
    return kExitConfig;
}

}  // namespace cvcluster::cli
