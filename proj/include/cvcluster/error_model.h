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

#ifndef CVCLUSTER_ERROR_MODEL_H
#define CVCLUSTER_ERROR_MODEL_H

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cvcluster/core.h"

namespace cvcluster {

enum class SurfaceMode {
    kGaussianFixed,
    kGaussianOptimized,
    kCubicOptimized,
};

/// "gaussian_fixed", "gaussian_optimized", "cubic_optimized".
std::string_view surface_mode_name(SurfaceMode mode);
/// Accepts the short names above and the long "_phase" forms. Throws kInvalidConfig.
SurfaceMode parse_surface_mode(std::string_view name);

/// Excess noise from the phases of a Gaussian cluster:
///   ex = ((cot θ₃·cot θ₄′ − 1)·g₂/g₃)²/g₁² + (cot θ₄′·g₂/g₃)² + 1/g₃²
///   ey = (g₃·cot θ₃/g₂)²/g₁² + g₃²/g₂² + 1
ErrorVector error_vector_raw(const PhaseSet &phases, const WeightConfig &w);

/// Same quantity written directly in terms of the target's b and d (which is all it
/// depends on). Throws kDenominatorPole on |b·g₃²/g₂² + d·cot θ₄′| < tol.pole.
ErrorVector error_vector_gaussian(double b, double d, const WeightConfig &w, double theta4p, const Tolerances &tol = {});
ErrorVector error_vector_gaussian(
    const SymplecticTarget &target, const WeightConfig &w, double theta4p, const Tolerances &tol = {});
/// cot θ₄′ form used by the optimizer; identical arithmetic to the angle form.
ErrorVector error_vector_gaussian_cot(double b, double d, const WeightConfig &w, double cot4p, const Tolerances &tol = {});

/// Cubic-node scheme with effective third phase θ₃′: the middle terms of the Gaussian
/// expression are divided by 12γI_m. Throws kNonpositiveIm.
ErrorVector error_vector_cubic(
    const SymplecticTarget &target, const WeightConfig &w, double theta3p, double theta4p, const CubicConfig &cubic);
ErrorVector error_vector_cubic_cot(const WeightConfig &w, double cot3p, double cot4p, const CubicConfig &cubic);
/// θ₃′ taken from the phase solution for (b, d, θ₄′): cot θ₃′ = (d − g₁g₃/(g₂g₄))/(b·g₃²/g₂² + d·cot θ₄′).
ErrorVector error_vector_cubic_solved(
    double b, double d, const WeightConfig &w, double cot4p, const CubicConfig &cubic, const Tolerances &tol = {});

/// Off-diagonal covariance of the error pair, in the same units. gain = 1 for the
/// Gaussian scheme, 1/(12γI_m) for the cubic one.
double error_cross_term(const WeightConfig &w, double cot3, double cot4p, double gain);

struct Theta4Optimum {
    double theta4p = kHalfPi;
    double cot4p = 0;
    ErrorVector err;
    double err_inf = 0;
};

struct OptimizerOptions {
    /// Candidates: cot θ₄′ ∈ {cot(π/2)} ∪ ±logspace(min_abs_cot, max_abs_cot).
    double min_abs_cot = 1e-4;
    double max_abs_cot = 1e4;
    int per_decade = 50;
    bool refine = true;
    int refine_iterations = 80;
};

/// Candidate cot θ₄′ values in ascending order; cot(π/2) sits in the middle.
std::vector<double> theta4_candidates(const OptimizerOptions &opt = {});

/// θ₄′ minimizing max(ex, ey) for the gaussian or cubic scheme (cubic when `cubic` is set).
/// Pole candidates are skipped. Empty when every candidate is a pole.
std::optional<Theta4Optimum> optimize_theta4(
    double b,
    double d,
    const WeightConfig &w,
    const std::optional<CubicConfig> &cubic,
    const OptimizerOptions &opt = {},
    const Tolerances &tol = {});
std::optional<Theta4Optimum> optimize_theta4(
    const SymplecticTarget &target,
    const WeightConfig &w,
    SurfaceMode mode,
    const std::optional<CubicConfig> &cubic = std::nullopt,
    const OptimizerOptions &opt = {},
    const Tolerances &tol = {});

struct Range {
    double lo = -5;
    double hi = 5;
    friend bool operator==(const Range &, const Range &) = default;
};

struct ErrorSurfaceSpec {
    Range b_range;
    Range d_range;
    std::size_t nb = 101;
    std::size_t nd = 101;
    WeightConfig w;
    SurfaceMode mode = SurfaceMode::kGaussianFixed;
    std::optional<CubicConfig> cubic;
    /// Phase used by kGaussianFixed.
    double theta4p = kHalfPi;
    OptimizerOptions optimizer;
    Tolerances tol;
    /// 0 = default_thread_count().
    std::size_t threads = 0;

    /// Throws kInvalidConfig.
    void validate() const;
    double b_at(std::size_t i) const;
    double d_at(std::size_t j) const;
};

struct SurfaceCell {
    double b = 0;
    double d = 0;
    /// Empty on a pole, or where no unit-determinant matrix has these b, d (b = d = 0).
    std::optional<ErrorVector> err;
    double err_inf = 0;
    double theta4p = 0;
};

/// Row-major over b then d: cell (i, j) at index i·nd + j. Cells are evaluated in
/// parallel; the result does not depend on the thread count.
std::vector<SurfaceCell> error_surface(const ErrorSurfaceSpec &spec);

}  // namespace cvcluster

#endif
