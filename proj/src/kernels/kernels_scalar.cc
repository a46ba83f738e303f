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

#include "kernels/kernel_math.h"

namespace cvcluster::kernels {

void scan_inf_norm_scalar(const ScanParams &p, const double *cot4p, double *inf_out, std::size_t n) {
    detail::ScanConsts k = detail::make_scan_consts(p);
    if (p.cubic) {
        for (std::size_t i = 0; i < n; i++) {
            inf_out[i] = detail::scan_cubic_one(k, cot4p[i]);
        }
    } else {
        for (std::size_t i = 0; i < n; i++) {
            inf_out[i] = detail::scan_gaussian_one(k, cot4p[i]);
        }
    }
}

void propagate_shots_scalar(const ShotParams &p, const ShotInputs &in, const ShotOutputs &out, std::size_t n) {
    detail::ShotConsts k = detail::make_shot_consts(p);
    for (std::size_t i = 0; i < n; i++) {
        detail::shot_one(k, in, out, i);
    }
}

}  // namespace cvcluster::kernels
