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

#ifndef CVCLUSTER_GKP_PROBABILITY_H
#define CVCLUSTER_GKP_PROBABILITY_H

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cvcluster/core.h"
#include "cvcluster/error_model.h"

namespace cvcluster {

/// How the squeezed variance is handed to the GKP formula. Its lattice constant √π/2 is
/// the correctable shift when the vacuum variance is 1/2, so kLattice doubles the
/// library's vacuum-1/4 variance first. kLiteral substitutes it unchanged.
enum class GkpUnits {
    kLattice,
    kLiteral,
};

std::string_view gkp_units_name(GkpUnits units);
GkpUnits parse_gkp_units(std::string_view name);

struct PerrInput {
    double x_er = 0;
    double y_er = 0;
    /// ⟨δŷ²ₛ⟩ in vacuum-1/4 units.
    double var_s = 0;
};

/// 1 − erf(A/√(v·(x_er + φ)))·erf(A/√(v·(y_er + 2φ))), A = √π/(2√2), φ = (√5 + 1)/2.
/// Throws kInvalidConfig on negative multipliers or non-positive var_s.
double p_err(const PerrInput &in, GkpUnits units = GkpUnits::kLattice);

struct GainCell {
    double b = 0;
    double d = 0;
    std::optional<double> p_base;
    std::optional<double> p_opt;
    /// p_base / p_opt; empty when either side is a pole.
    std::optional<double> ratio;
};

struct GainSurface {
    std::vector<GainCell> cells;
    /// Index of the largest ratio, if any cell has one.
    std::optional<std::size_t> argmax;
    double max_ratio = 0;
};

/// Requires identical grids (kInvalidConfig otherwise).
GainSurface gain_surface(
    const ErrorSurfaceSpec &baseline, const ErrorSurfaceSpec &optimized, const SqueezingSpec &squeezing,
    GkpUnits units = GkpUnits::kLattice);
/// Same, from surfaces that were already evaluated on one grid.
GainSurface gain_from_surfaces(
    const std::vector<SurfaceCell> &baseline, const std::vector<SurfaceCell> &optimized, const SqueezingSpec &squeezing,
    GkpUnits units = GkpUnits::kLattice);

}  // namespace cvcluster

#endif
