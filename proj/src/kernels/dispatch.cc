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

#include <cstdlib>
#include <string>

#include "cvcluster/kernels.h"

namespace cvcluster::kernels {

std::string_view isa_name(Isa isa) {
    return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    static const bool has = __builtin_cpu_supports("avx2");
    return has;
#else
    return false;
#endif
}

namespace {

Isa detect() {
    Isa best = avx2_available() ? Isa::kAvx2 : Isa::kScalar;
    const char *env = std::getenv("CVCLUSTER_ISA");
    if (env == nullptr) {
        return best;
    }
    std::string v(env);
    if (v == "scalar") {
        return Isa::kScalar;
    }
    if (v == "avx2" && avx2_available()) {
        return Isa::kAvx2;
    }
    return best;
}

Isa usable(Isa isa) {
    return isa == Isa::kAvx2 && !avx2_available() ? Isa::kScalar : isa;
}

}  // namespace

Isa active_isa() {
    static const Isa isa = detect();
    return isa;
}

void scan_inf_norm(Isa isa, const ScanParams &p, const double *cot4p, double *inf_out, std::size_t n) {
    if (usable(isa) == Isa::kAvx2) {
        scan_inf_norm_avx2(p, cot4p, inf_out, n);
    } else {
        scan_inf_norm_scalar(p, cot4p, inf_out, n);
    }
}

void propagate_shots(Isa isa, const ShotParams &p, const ShotInputs &in, const ShotOutputs &out, std::size_t n) {
    if (usable(isa) == Isa::kAvx2) {
        propagate_shots_avx2(p, in, out, n);
    } else {
        propagate_shots_scalar(p, in, out, n);
    }
}

}  // namespace cvcluster::kernels
