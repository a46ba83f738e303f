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

#ifndef CVCLUSTER_HEISENBERG_SIM_H
#define CVCLUSTER_HEISENBERG_SIM_H

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "cvcluster/core.h"
#include "cvcluster/phase_solver.h"

namespace cvcluster {

struct InputState {
    double mean_x = 0;
    double mean_y = 0;
    double var_x = kVacuumVariance;
    double var_y = kVacuumVariance;

    /// Positive variances with var_x·var_y ≥ 1/16. Throws kInvalidConfig.
    void validate() const;
};

enum class Variant {
    kGaussian,
    kCubic,
};

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct SimConfig {
    SymplecticTarget target;
    WeightConfig w;
    double theta4p = kHalfPi;
    SqueezingSpec squeezing = SqueezingSpec::from_db(-15);
    Variant variant = Variant::kGaussian;
    /// γ and α of the cubic node; i_m is ignored (it is measured per shot).
    std::optional<CubicConfig> cubic;
    InputState input;
    std::uint64_t n_shots = 100000;
    std::uint64_t seed = 1;
    bool keep_records = false;
    /// 0 = default_thread_count().
    std::size_t threads = 0;
    Tolerances tol;

    void validate() const;
};

/// Shots per RNG stream. Stream k draws from mt19937_64 seeded by (seed, k), so results do
/// not depend on how blocks are spread over workers.
inline constexpr std::size_t kShotBlock = 4096;

struct SimRecord {
    std::uint64_t shot = 0;
    double x_in = 0, y_in = 0;
    std::array<double, 4> x_s{};
    std::array<double, 4> y_s{};
    /// Photocurrents with unit local-oscillator amplitude.
    double i_in = 0, i_1 = 0, i_2 = 0, i_3 = 0;
    double i_m = 0;
    double ff_x = 0, ff_y = 0;
    double x_out = 0, y_out = 0;
    bool discarded = false;
};

struct SimSummary {
    std::uint64_t n_shots = 0;
    std::uint64_t n_used = 0;
    std::uint64_t n_discarded = 0;
    /// Cubic shots whose node amplitude α + x_s,2 was negative, so the positive square
    /// root picks the wrong branch of the parabola.
    std::uint64_t n_branch_flipped = 0;

    SolverResult solution;
    std::array<double, 2> mean_out{};
    std::array<std::array<double, 2>, 2> cov_out{};
    std::array<double, 2> predicted_mean{};
    std::array<std::array<double, 2>, 2> predicted_cov{};

    /// Residual output − U·input.
    std::array<double, 2> err_mean{};
    std::array<double, 2> err_var{};
    double err_cov_xy = 0;
    std::array<double, 2> err_kurtosis{};
    /// Empirical residual variances in multiples of ⟨δŷ²ₛ⟩.
    ErrorVector empirical_err;
    /// Closed-form multipliers (cubic: at the empirical mean I_m).
    ErrorVector predicted_err;
    double predicted_err_xy = 0;

    /// (empirical − predicted)/SE for each residual variance; SE from the sample fourth moment.
    std::array<double, 2> z_err_var{};
    /// Same with the SE a Gaussian residual would have, √(2/(n−1))·variance.
    std::array<double, 2> z_err_var_normal{};
    /// (mean_out − predicted_mean)/√(var/n).
    std::array<double, 2> z_mean{};

    double mean_i_m = 0;
    double var_i_m = 0;

    std::vector<SimRecord> records;

    /// Largest |z| among the variance and mean scores used for gating.
    double max_abs_z() const;
};

SimSummary run_gaussian(const SimConfig &config);
SimSummary run_cubic(const SimConfig &config);
SimSummary simulate(const SimConfig &config);

/// Recomputes one stored shot from its sampled quadratures.
SimRecord replay_shot(const SimConfig &config, const SimRecord &record);

/// Fixed CSV column order of `write_records_csv`.
inline constexpr std::string_view kRecordCsvHeader =
    "shot,x_in,y_in,x_s1,y_s1,x_s2,y_s2,x_s3,y_s3,x_s4,y_s4,i_in,i_1,i_2,i_3,i_m,ff_x,ff_y,x_out,y_out,discarded";
void write_records_csv(std::ostream &out, const std::vector<SimRecord> &records);

struct LinearizationReport {
    /// 3γα² over |first-moment term| (infinite when that term vanishes).
    double first_ratio = 0;
    /// (3γα²)² over the second-moment term.
    double second_ratio = 0;
    double safety_factor = 10;
    bool pass = false;
    /// α²/⟨x²_s,2⟩ and whether it falls below 100.
    double alpha_ratio = 0;
    bool alpha_warning = false;
};

LinearizationReport linearization_check(const SimConfig &config, double safety_factor = 10);

}  // namespace cvcluster

#endif
