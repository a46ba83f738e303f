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

#include "cvcluster/heisenberg_sim.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "cvcluster/error_model.h"
#include "cvcluster/kernels.h"
#include "cvcluster/parallel.h"
#include "cvcluster/stats.h"

namespace cvcluster {

void InputState::validate() const {
    if (!(var_x > 0) || !(var_y > 0) || !std::isfinite(mean_x) || !std::isfinite(mean_y)) {
        throw Error(ErrorCode::kInvalidConfig, "input state needs finite means and positive variances");
    }
    if (var_x * var_y < kVacuumVariance * kVacuumVariance * (1 - 1e-12)) {
        throw Error(ErrorCode::kInvalidConfig, "input state violates var_x * var_y >= 1/16");
    }
}

std::string_view variant_name(Variant v) {
    return v == Variant::kCubic ? "cubic" : "gaussian";
}

Variant parse_variant(std::string_view name) {
    if (name == "gaussian") {
        return Variant::kGaussian;
    }
    if (name == "cubic") {
        return Variant::kCubic;
    }
    throw Error(ErrorCode::kInvalidConfig, "unknown variant '" + std::string(name) + "'");
}

void SimConfig::validate() const {
    w.validate();
    require_angle(theta4p, "theta4p");
    input.validate();
    if (n_shots < 1) {
        throw Error(ErrorCode::kInvalidConfig, "n_shots must be at least 1");
    }
    if (!(squeezing.var_y > 0) || !std::isfinite(squeezing.var_y)) {
        throw Error(ErrorCode::kInvalidConfig, "squeezed variance must be positive");
    }
    if ((variant == Variant::kCubic) != cubic.has_value()) {
        throw Error(ErrorCode::kInvalidConfig, "cubic parameters are required by, and only by, the cubic variant");
    }
    if (cubic && (!(cubic->gamma > 0) || !(cubic->alpha > 0))) {
        throw Error(ErrorCode::kInvalidConfig, "cubic node needs gamma > 0 and alpha > 0");
    }
}

double SimSummary::max_abs_z() const {
    double z = 0;
    for (double v : {z_err_var[0], z_err_var[1], z_mean[0], z_mean[1]}) {
        z = std::max(z, std::isnan(v) ? std::numeric_limits<double>::infinity() : std::fabs(v));
    }
    return z;
}

namespace {

struct Plan {
    SolverResult solution;
    kernels::ShotParams params;
    double sin1 = 1, sin2 = 1, sin4 = 1;
};

Plan make_plan(const SimConfig &c) {
    c.validate();
    Plan p;
    p.solution = solve_phases(c.target, c.w, c.theta4p, c.tol);
    DetectorCot det = unprimed(p.solution.cot2p, p.solution.cot4p, c.w);
    p.params.w = c.w;
    p.params.cot1 = p.solution.cot1;
    p.params.cot2 = det.cot2;
    p.params.cot3 = p.solution.cot3;
    p.params.cot4 = det.cot4;
    p.params.u = c.target;
    p.params.cubic = c.variant == Variant::kCubic;
    if (c.cubic) {
        p.params.gamma = c.cubic->gamma;
        p.params.alpha = c.cubic->alpha;
    }
    p.sin1 = 1 / std::sqrt(1 + p.params.cot1 * p.params.cot1);
    p.sin2 = 1 / std::sqrt(1 + p.params.cot2 * p.params.cot2);
    p.sin4 = 1 / std::sqrt(1 + p.params.cot4 * p.params.cot4);
    return p;
}

struct Block {
    std::vector<double> x_in, y_in, x_s[4], y_s[4];
    std::vector<double> u_in, u_1, u_2, u_3, i_m, cot3, ff_x, ff_y, x_out, y_out, e_x, e_y, valid;

    void resize(std::size_t n) {
        for (auto *v : {&x_in, &y_in, &x_s[0], &x_s[1], &x_s[2], &x_s[3], &y_s[0], &y_s[1], &y_s[2], &y_s[3], &u_in,
                        &u_1, &u_2, &u_3, &i_m, &cot3, &ff_x, &ff_y, &x_out, &y_out, &e_x, &e_y, &valid}) {
            v->resize(n);
        }
    }
    kernels::ShotInputs inputs() const {
        kernels::ShotInputs in;
        in.x_in = x_in.data();
        in.y_in = y_in.data();
        for (int j = 0; j < 4; j++) {
            in.x_s[j] = x_s[j].data();
            in.y_s[j] = y_s[j].data();
        }
        return in;
    }
    kernels::ShotOutputs outputs() {
        return {u_in.data(), u_1.data(), u_2.data(), u_3.data(), i_m.data(), cot3.data(), ff_x.data(),
                ff_y.data(), x_out.data(), y_out.data(), e_x.data(), e_y.data(), valid.data()};
    }
};

struct Partial {
    Moments out[2], err[2], im;
    CoMoment out_xy, err_xy;
    std::uint64_t used = 0, discarded = 0, flipped = 0;
};

void sample_block(const SimConfig &c, std::uint64_t block, std::size_t n, Block &b) {
    std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sx_in = std::sqrt(c.input.var_x), sy_in = std::sqrt(c.input.var_y);
    const double sx = std::sqrt(c.squeezing.var_x()), sy = std::sqrt(c.squeezing.var_y);
    for (std::size_t i = 0; i < n; i++) {
        b.x_in[i] = c.input.mean_x + sx_in * normal(rng);
        b.y_in[i] = c.input.mean_y + sy_in * normal(rng);
        for (int j = 0; j < 4; j++) {
            b.x_s[j][i] = sx * normal(rng);
            b.y_s[j][i] = sy * normal(rng);
        }
    }
}

SimRecord make_record(const Plan &plan, const Block &b, std::uint64_t shot, std::size_t i) {
    SimRecord r;
    r.shot = shot;
    r.x_in = b.x_in[i];
    r.y_in = b.y_in[i];
    for (int j = 0; j < 4; j++) {
        r.x_s[j] = b.x_s[j][i];
        r.y_s[j] = b.y_s[j][i];
    }
    r.i_in = plan.sin1 * b.u_in[i];
    r.i_1 = plan.sin2 * b.u_1[i];
    r.i_2 = b.u_2[i] / std::sqrt(1 + b.cot3[i] * b.cot3[i]);
    r.i_3 = plan.sin4 * b.u_3[i];
    r.i_m = b.i_m[i];
    r.ff_x = b.ff_x[i];
    r.ff_y = b.ff_y[i];
    r.x_out = b.x_out[i];
    r.y_out = b.y_out[i];
    r.discarded = b.valid[i] == 0;
    return r;
}

SimSummary run(const SimConfig &c) {
    Plan plan = make_plan(c);
    const std::uint64_t n_blocks = (c.n_shots + kShotBlock - 1) / kShotBlock;
    std::vector<Partial> partials(n_blocks);
    SimSummary s;
    if (c.keep_records) {
        s.records.resize(c.n_shots);
    }
    parallel_for(
        n_blocks, 1,
        [&](std::size_t begin, std::size_t end) {
            Block b;
            for (std::size_t blk = begin; blk < end; blk++) {
                std::uint64_t first = blk * kShotBlock;
                std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kShotBlock, c.n_shots - first));
                b.resize(n);
                sample_block(c, blk, n, b);
                kernels::propagate_shots(plan.params, b.inputs(), b.outputs(), n);
                Partial &p = partials[blk];
                for (std::size_t i = 0; i < n; i++) {
                    if (plan.params.cubic && plan.params.alpha + b.x_s[1][i] < 0) {
                        p.flipped++;
                    }
                    if (c.keep_records) {
                        s.records[first + i] = make_record(plan, b, first + i, i);
                    }
                    if (b.valid[i] == 0) {
                        p.discarded++;
                        continue;
                    }
                    p.used++;
                    p.out[0].add(b.x_out[i]);
                    p.out[1].add(b.y_out[i]);
                    p.out_xy.add(b.x_out[i], b.y_out[i]);
                    p.err[0].add(b.e_x[i]);
                    p.err[1].add(b.e_y[i]);
                    p.err_xy.add(b.e_x[i], b.e_y[i]);
                    p.im.add(b.i_m[i]);
                }
            }
        },
        c.threads);

    Partial total;
    for (const Partial &p : partials) {
        for (int q = 0; q < 2; q++) {
            total.out[q].merge(p.out[q]);
            total.err[q].merge(p.err[q]);
        }
        total.out_xy.merge(p.out_xy);
        total.err_xy.merge(p.err_xy);
        total.im.merge(p.im);
        total.used += p.used;
        total.discarded += p.discarded;
        total.flipped += p.flipped;
    }

    s.n_shots = c.n_shots;
    s.n_used = total.used;
    s.n_discarded = total.discarded;
    s.n_branch_flipped = total.flipped;
    s.solution = plan.solution;
    s.mean_i_m = total.im.mean;
    s.var_i_m = total.im.variance();

    const Mat2 &u = c.target;
    const double vs = c.squeezing.var_y;
    for (int q = 0; q < 2; q++) {
        s.mean_out[q] = total.out[q].mean;
        s.cov_out[q][q] = total.out[q].variance();
        s.err_mean[q] = total.err[q].mean;
        s.err_var[q] = total.err[q].variance();
        s.err_kurtosis[q] = total.err[q].kurtosis();
    }
    s.cov_out[0][1] = s.cov_out[1][0] = total.out_xy.covariance();
    s.err_cov_xy = total.err_xy.covariance();
    s.empirical_err = {s.err_var[0] / vs, s.err_var[1] / vs};

    const SolverResult &sol = plan.solution;
    if (c.variant == Variant::kGaussian) {
        s.predicted_err = error_vector_raw(sol.phases, c.w);
        s.predicted_err_xy = error_cross_term(c.w, sol.cot3, sol.cot4p, 1);
    } else {
        CubicConfig at_mean = *c.cubic;
        at_mean.i_m = s.mean_i_m;
        if (s.n_used > 0 && s.mean_i_m > 0) {
            s.predicted_err = error_vector_cubic_cot(c.w, sol.cot3, sol.cot4p, at_mean);
            s.predicted_err_xy = error_cross_term(c.w, sol.cot3, sol.cot4p, 1 / at_mean.suppression());
        } else {
            double nan = std::numeric_limits<double>::quiet_NaN();
            s.predicted_err = {nan, nan};
            s.predicted_err_xy = nan;
        }
    }

    const double mx = c.input.mean_x, my = c.input.mean_y;
    s.predicted_mean = {u.a * mx + u.b * my, u.c * mx + u.d * my};
    const double vx_in = c.input.var_x, vy_in = c.input.var_y;
    s.predicted_cov[0][0] = u.a * u.a * vx_in + u.b * u.b * vy_in + vs * s.predicted_err.ex;
    s.predicted_cov[1][1] = u.c * u.c * vx_in + u.d * u.d * vy_in + vs * s.predicted_err.ey;
    s.predicted_cov[0][1] = s.predicted_cov[1][0] = u.a * u.c * vx_in + u.b * u.d * vy_in + vs * s.predicted_err_xy;

    const double pred_var[2] = {vs * s.predicted_err.ex, vs * s.predicted_err.ey};
    const double n = static_cast<double>(s.n_used);
    for (int q = 0; q < 2; q++) {
        s.z_err_var[q] = (s.err_var[q] - pred_var[q]) / total.err[q].variance_se();
        s.z_err_var_normal[q] = (s.err_var[q] - pred_var[q]) / (s.err_var[q] * std::sqrt(2 / (n - 1)));
        s.z_mean[q] = (s.mean_out[q] - s.predicted_mean[q]) / std::sqrt(s.cov_out[q][q] / n);
    }
    return s;
}

}  // namespace

SimSummary run_gaussian(const SimConfig &config) {
    if (config.variant != Variant::kGaussian) {
        throw Error(ErrorCode::kInvalidConfig, "run_gaussian needs the gaussian variant");
    }
    return run(config);
}

SimSummary run_cubic(const SimConfig &config) {
    if (config.variant != Variant::kCubic) {
        throw Error(ErrorCode::kInvalidConfig, "run_cubic needs the cubic variant");
    }
    return run(config);
}

SimSummary simulate(const SimConfig &config) {
    return run(config);
}

SimRecord replay_shot(const SimConfig &config, const SimRecord &record) {
    Plan plan = make_plan(config);
    Block b;
    b.resize(1);
    b.x_in[0] = record.x_in;
    b.y_in[0] = record.y_in;
    for (int j = 0; j < 4; j++) {
        b.x_s[j][0] = record.x_s[j];
        b.y_s[j][0] = record.y_s[j];
    }
    kernels::propagate_shots(kernels::Isa::kScalar, plan.params, b.inputs(), b.outputs(), 1);
    return make_record(plan, b, record.shot, 0);
}

void write_records_csv(std::ostream &out, const std::vector<SimRecord> &records) {
    out << kRecordCsvHeader << '\n';
    for (const SimRecord &r : records) {
        out << r.shot;
        for (double v : {r.x_in, r.y_in, r.x_s[0], r.y_s[0], r.x_s[1], r.y_s[1], r.x_s[2], r.y_s[2], r.x_s[3], r.y_s[3],
                         r.i_in, r.i_1, r.i_2, r.i_3, r.i_m, r.ff_x, r.ff_y, r.x_out, r.y_out}) {
            out << ',' << format_double(v);
        }
        out << ',' << (r.discarded ? 1 : 0) << '\n';
    }
}

LinearizationReport linearization_check(const SimConfig &config, double safety_factor) {
    config.validate();
    if (config.variant != Variant::kCubic) {
        throw Error(ErrorCode::kInvalidConfig, "linearization check applies to the cubic variant");
    }
    SolverResult sol = solve_phases(config.target, config.w, config.theta4p, config.tol);
    const WeightConfig &w = config.w;
    double c2 = unprimed(sol.cot2p, sol.cot4p, w).cot2;
    double kx = sol.cot1 * c2 / (w.g1 * w.g4) - w.g4 / w.g1;
    double ky = c2 / (w.g1 * w.g4);
    const InputState &in = config.input;
    double scale = 3 * config.cubic->gamma * config.cubic->alpha * config.cubic->alpha;
    double first = std::fabs(kx * in.mean_x + ky * in.mean_y);
    double x2 = in.var_x + in.mean_x * in.mean_x;
    double y2 = in.var_y + in.mean_y * in.mean_y;
    double vs = config.squeezing.var_y;
    double second = kx * kx * x2 + 2 * kx * ky * in.mean_x * in.mean_y + ky * ky * y2 + vs / (w.g1 * w.g1) + vs;

    LinearizationReport r;
    r.first_ratio = first > 0 ? scale / first : std::numeric_limits<double>::infinity();
    r.second_ratio = second > 0 ? scale * scale / second : std::numeric_limits<double>::infinity();
    r.safety_factor = safety_factor;
    r.pass = r.first_ratio >= safety_factor && r.second_ratio >= safety_factor;
    r.alpha_ratio = config.cubic->alpha * config.cubic->alpha / config.squeezing.var_x();
    r.alpha_warning = r.alpha_ratio < 100;
    return r;
}

}  // namespace cvcluster
