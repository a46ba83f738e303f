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

#include "cvcluster/gkp_probability.h"

#include <numbers>
#include <string>

namespace cvcluster {

std::string_view gkp_units_name(GkpUnits units) {
    return units == GkpUnits::kLattice ? "lattice" : "literal";
}

GkpUnits parse_gkp_units(std::string_view name) {
    if (name == "lattice") {
        return GkpUnits::kLattice;
    }
    if (name == "literal") {
        return GkpUnits::kLiteral;
    }
    throw Error(ErrorCode::kInvalidConfig, "unknown GKP units '" + std::string(name) + "'");
}

double p_err(const PerrInput &in, GkpUnits units) {
    if (!(in.x_er >= 0) || !(in.y_er >= 0) || !(in.var_s > 0)) {
        throw Error(ErrorCode::kInvalidConfig, "p_err needs x_er, y_er >= 0 and var_s > 0");
    }
    constexpr double kShift = 0.6266570686577501;  // √π/(2√2)
    constexpr double kPhi = std::numbers::phi;
    double v = units == GkpUnits::kLattice ? 2 * in.var_s : in.var_s;
    double qa = std::erfc(kShift / std::sqrt(v * (in.x_er + kPhi)));
    double qb = std::erfc(kShift / std::sqrt(v * (in.y_er + 2 * kPhi)));
    // 1 − (1 − qa)(1 − qb) without the cancellation of the direct form.
    return qa + qb - qa * qb;
}

GainSurface gain_from_surfaces(
    const std::vector<SurfaceCell> &baseline, const std::vector<SurfaceCell> &optimized, const SqueezingSpec &squeezing,
    GkpUnits units) {
    if (baseline.size() != optimized.size()) {
        throw Error(ErrorCode::kInvalidConfig, "gain surfaces need identical grids");
    }
    GainSurface out;
    out.cells.resize(baseline.size());
    for (std::size_t i = 0; i < baseline.size(); i++) {
        const SurfaceCell &cb = baseline[i];
        const SurfaceCell &co = optimized[i];
        if (cb.b != co.b || cb.d != co.d) {
            throw Error(ErrorCode::kInvalidConfig, "gain surfaces need identical grids");
        }
        GainCell &g = out.cells[i];
        g.b = cb.b;
        g.d = cb.d;
        if (cb.err) {
            g.p_base = p_err({cb.err->ex, cb.err->ey, squeezing.var_y}, units);
        }
        if (co.err) {
            g.p_opt = p_err({co.err->ex, co.err->ey, squeezing.var_y}, units);
        }
        if (g.p_base && g.p_opt) {
            g.ratio = *g.p_base / *g.p_opt;
            if (!out.argmax || *g.ratio > out.max_ratio) {
                out.argmax = i;
                out.max_ratio = *g.ratio;
            }
        }
    }
    return out;
}

GainSurface gain_surface(
    const ErrorSurfaceSpec &baseline, const ErrorSurfaceSpec &optimized, const SqueezingSpec &squeezing,
    GkpUnits units) {
    if (baseline.b_range != optimized.b_range || baseline.d_range != optimized.d_range || baseline.nb != optimized.nb ||
        baseline.nd != optimized.nd) {
        throw Error(ErrorCode::kInvalidConfig, "gain surfaces need identical grids");
    }
    return gain_from_surfaces(error_surface(baseline), error_surface(optimized), squeezing, units);
}

}  // namespace cvcluster
