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

#include "cvcluster/cz_gate.h"

#include <algorithm>
#include <sstream>

namespace cvcluster {

Mat4 Mat4::identity() {
    Mat4 r;
    for (int i = 0; i < 4; i++) {
        r.m[i][i] = 1;
    }
    return r;
}

double Mat4::max_abs_diff(const Mat4 &o) const {
    double d = 0;
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            d = std::max(d, std::fabs(m[i][j] - o.m[i][j]));
        }
    }
    return d;
}

double Mat4::det() const {
    // Laplace expansion over 2×2 minors of the first two rows.
    auto minor = [&](int r0, int r1, int c0, int c1) {
        return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    };
    return minor(0, 1, 0, 1) * minor(2, 3, 2, 3) - minor(0, 1, 0, 2) * minor(2, 3, 1, 3) +
           minor(0, 1, 0, 3) * minor(2, 3, 1, 2) + minor(0, 1, 1, 2) * minor(2, 3, 0, 3) -
           minor(0, 1, 1, 3) * minor(2, 3, 0, 2) + minor(0, 1, 2, 3) * minor(2, 3, 0, 1);
}

Mat4 operator*(const Mat4 &l, const Mat4 &r) {
    Mat4 out;
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            double acc = 0;
            for (int k = 0; k < 4; k++) {
                acc += l.m[i][k] * r.m[k][j];
            }
            out.m[i][j] = acc;
        }
    }
    return out;
}

Mat4 cz_matrix(double g) {
    Mat4 r = Mat4::identity();
    r.m[2][1] = g;
    r.m[3][0] = g;
    return r;
}

double squeezing_ratio(double g) {
    // Smaller root of s² − (2 + g²)s + 1; the roots multiply to 1, which avoids the cancellation.
    return 2 / (2 + g * g + g * std::sqrt(4 + g * g));
}

Mat4 CzDecomposition::product() const {
    Mat4 p = factors[0];
    for (int i = 1; i < 5; i++) {
        p = p * factors[i];
    }
    return p;
}

double CzDecomposition::residual() const {
    return product().max_abs_diff(cz_matrix(g));
}

CzDecomposition bloch_messiah(double g) {
    if (!(g >= 0) || !std::isfinite(g)) {
        throw Error(ErrorCode::kInvalidConfig, "Bloch-Messiah decomposition needs a finite weight g >= 0");
    }
    CzDecomposition dec;
    dec.g = g;
    dec.s = squeezing_ratio(g);
    dec.r_bs = std::sqrt(dec.s / (1 + dec.s));
    dec.t_bs = 1 / std::sqrt(1 + dec.s);
    const double r = dec.r_bs, t = dec.t_bs, rs = std::sqrt(dec.s);

    Mat4 phase_out;
    phase_out.m = {{{1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}}};
    Mat4 split_out;
    split_out.m = {{{t, r, 0, 0}, {r, -t, 0, 0}, {0, 0, t, r}, {0, 0, r, -t}}};
    Mat4 squeeze;
    squeeze.m = {{{rs, 0, 0, 0}, {0, 1 / rs, 0, 0}, {0, 0, 1 / rs, 0}, {0, 0, 0, rs}}};
    Mat4 split_in;
    split_in.m = {{{r, t, 0, 0}, {t, -r, 0, 0}, {0, 0, r, t}, {0, 0, t, -r}}};
    Mat4 phase_in;
    phase_in.m = {{{1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}, {0, 1, 0, 0}}};
    dec.factors = {phase_out, split_out, squeeze, split_in, phase_in};
    return dec;
}

Quadratures inline_squeezer(double reflectivity, double y_s, double x_in, double y_in) {
    if (!(reflectivity > 0 && reflectivity <= 1)) {
        std::ostringstream ss;
        ss << "reflectivity " << reflectivity << " is outside (0, 1]";
        throw Error(ErrorCode::kInvalidReflectivity, ss.str());
    }
    double sr = std::sqrt(reflectivity);
    return {x_in / sr, sr * y_in + std::sqrt(1 - reflectivity) * y_s};
}

double max_weight(double db) {
    return std::pow(10.0, -db / 20) / std::sqrt(1 + std::pow(10.0, db / 10));
}

bool weight_admissible(double g, double db) {
    return g <= max_weight(db);
}

}  // namespace cvcluster
