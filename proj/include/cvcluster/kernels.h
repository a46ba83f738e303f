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

#ifndef CVCLUSTER_KERNELS_H
#define CVCLUSTER_KERNELS_H

#include <cstddef>
#include <string_view>

#include "cvcluster/core.h"

namespace cvcluster::kernels {

enum class Isa {
    kScalar,
    kAvx2,
};

std::string_view isa_name(Isa isa);
bool avx2_available();
/// Widest supported ISA, unless CVCLUSTER_ISA=scalar|avx2 says otherwise (read once).
Isa active_isa();

/// Inputs of the θ₄′ scan for one (b, d) cell.
struct ScanParams {
    double b = 0;
    double d = 0;
    WeightConfig w;
    /// Multiplier of the middle error terms: 1 for gaussian, 1/(12γI_m) for cubic.
    double gain = 1;
    /// Cubic scan evaluates the phase form with cot θ₃′ solved per candidate; the
    /// gaussian scan evaluates the closed form in b, d.
    bool cubic = false;
    double pole = 1e-9;
};

/// inf_out[i] = max(ex, ey) at cot θ₄′ = cot4p[i]; NaN where the shared denominator is a pole.
void scan_inf_norm(Isa isa, const ScanParams &p, const double *cot4p, double *inf_out, std::size_t n);
inline void scan_inf_norm(const ScanParams &p, const double *cot4p, double *inf_out, std::size_t n) {
    scan_inf_norm(active_isa(), p, cot4p, inf_out, n);
}

struct ShotParams {
    WeightConfig w;
    /// Detector cotangents (unprimed). cot3 is the effective θ₃′ for the cubic scheme.
    double cot1 = 0, cot2 = 0, cot3 = 0, cot4 = 0;
    /// Target matrix; the residual is output − U·input.
    Mat2 u;
    bool cubic = false;
    double gamma = 0.1;
    double alpha = 0;
};

/// Structure-of-arrays view of one block of sampled initial quadratures.
struct ShotInputs {
    const double *x_in = nullptr;
    const double *y_in = nullptr;
    const double *x_s[4] = {};
    const double *y_s[4] = {};
};

/// Per-shot values. u_* are photocurrents divided by sin of their detector phase.
struct ShotOutputs {
    double *u_in = nullptr;
    double *u_1 = nullptr;
    double *u_2 = nullptr;
    double *u_3 = nullptr;
    double *i_m = nullptr;
    /// cot of the detector phase θ₃ actually used for the shot.
    double *cot3 = nullptr;
    double *ff_x = nullptr;
    double *ff_y = nullptr;
    double *x_out = nullptr;
    double *y_out = nullptr;
    double *e_x = nullptr;
    double *e_y = nullptr;
    /// 1 for a usable shot, 0 for a discarded one (I_m ≤ 0 or a negative square-root argument).
    double *valid = nullptr;
};

void propagate_shots(Isa isa, const ShotParams &p, const ShotInputs &in, const ShotOutputs &out, std::size_t n);
inline void propagate_shots(const ShotParams &p, const ShotInputs &in, const ShotOutputs &out, std::size_t n) {
    propagate_shots(active_isa(), p, in, out, n);
}

void scan_inf_norm_scalar(const ScanParams &p, const double *cot4p, double *inf_out, std::size_t n);
void scan_inf_norm_avx2(const ScanParams &p, const double *cot4p, double *inf_out, std::size_t n);
void propagate_shots_scalar(const ShotParams &p, const ShotInputs &in, const ShotOutputs &out, std::size_t n);
void propagate_shots_avx2(const ShotParams &p, const ShotInputs &in, const ShotOutputs &out, std::size_t n);

}  // namespace cvcluster::kernels

#endif
