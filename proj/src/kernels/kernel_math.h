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

// Scalar per-element arithmetic shared by the scalar kernels, the AVX2 tails and the
// library's single-point evaluators. The AVX2 kernels repeat these expressions with the
// same operation order, so both paths round identically.

#ifndef CVCLUSTER_KERNEL_MATH_H
#define CVCLUSTER_KERNEL_MATH_H

#include <cmath>
#include <limits>

#include "cvcluster/kernels.h"

namespace cvcluster::kernels::detail {

namespace {

struct ScanConsts {
    double b, d;
    double q, q2, r, r2;
    double inv_g1sq, inv_g3sq, rho;
    double bg, dr2, qx, sy, g4sq, ey0;
    double gain, pole;
};

inline ScanConsts make_scan_consts(const ScanParams &p) {
    const WeightConfig &w = p.w;
    ScanConsts k;
    k.b = p.b;
    k.d = p.d;
    k.q = w.g3 / w.g2;
    k.q2 = k.q * k.q;
    k.r = w.g2 / w.g3;
    k.r2 = k.r * k.r;
    k.inv_g1sq = 1 / (w.g1 * w.g1);
    k.inv_g3sq = 1 / (w.g3 * w.g3);
    k.rho = w.g1 * w.g3 / (w.g2 * w.g4);
    k.bg = p.b * w.g4 / w.g1;
    k.dr2 = p.d * k.r2;
    k.qx = (w.g2 * w.g2) / ((w.g3 * w.g3) * (w.g4 * w.g4));
    double s = p.d * k.r * w.g4 / w.g1 - 1;
    k.sy = s * s;
    k.g4sq = w.g4 * w.g4;
    k.ey0 = 1 + 1 / k.r2;
    k.gain = p.gain;
    k.pole = p.pole;
    return k;
}

inline double shared_denominator(const ScanConsts &k, double c4) {
    return k.q2 * k.b + k.d * c4;
}

/// Closed form in (b, d); caller has excluded the pole.
inline void gaussian_bd_error(const ScanConsts &k, double c4, double &ex, double &ey) {
    double den = k.b + k.dr2 * c4;
    double den2 = den * den;
    double t = k.bg + k.r * c4;
    ex = (k.inv_g3sq + k.r2 * (c4 * c4)) + k.qx * (t * t) / den2;
    ey = k.ey0 + k.sy / (k.g4sq * den2);
}

/// Phase form with middle terms scaled by `gain`.
inline void phase_error(const ScanConsts &k, double c3, double c4, double gain, double &ex, double &ey) {
    double t1 = (c3 * c4 - 1) / k.q;
    double t2 = c4 / k.q;
    double y1 = k.q * c3;
    ex = (k.inv_g1sq * (t1 * t1) + gain * (t2 * t2)) + k.inv_g3sq;
    ey = (k.inv_g1sq * (y1 * y1) + gain * k.q2) + 1;
}

inline double solved_cot3(const ScanConsts &k, double denom) {
    return (k.d - k.rho) / denom;
}

inline double scan_gaussian_one(const ScanConsts &k, double c4) {
    double denom = shared_denominator(k, c4);
    if (!(std::fabs(denom) >= k.pole)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double ex, ey;
    gaussian_bd_error(k, c4, ex, ey);
    return ex > ey ? ex : ey;
}

inline double scan_cubic_one(const ScanConsts &k, double c4) {
    double denom = shared_denominator(k, c4);
    if (!(std::fabs(denom) >= k.pole)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double ex, ey;
    phase_error(k, solved_cot3(k, denom), c4, k.gain, ex, ey);
    return ex > ey ? ex : ey;
}

struct ShotConsts {
    double g1, g2, g3, g4;
    double c1, c2, c3, c4;
    double g1g4, g3g2, g2_over_g3;
    double m1x0, m1x1, m1y0, m1y1;
    double m01, m11;
    double u00, u01, u10, u11;
    double alpha, three_gamma, twelve_gamma;
    bool cubic;
};

inline ShotConsts make_shot_consts(const ShotParams &p) {
    const WeightConfig &w = p.w;
    ShotConsts k;
    k.g1 = w.g1;
    k.g2 = w.g2;
    k.g3 = w.g3;
    k.g4 = w.g4;
    k.c1 = p.cot1;
    k.c2 = p.cot2;
    k.c3 = p.cot3;
    k.c4 = p.cot4;
    k.g1g4 = w.g1 * w.g4;
    k.g3g2 = w.g3 * w.g2;
    k.g2_over_g3 = w.g2 / w.g3;
    k.m1x0 = p.cot1 * p.cot2 / k.g1g4 - w.g4 / w.g1;
    k.m1x1 = p.cot2 / k.g1g4;
    k.m1y0 = -(w.g1 * p.cot1 / w.g4);
    k.m1y1 = -(w.g1 / w.g4);
    k.m01 = p.cot4 / k.g3g2;
    k.m11 = -(w.g3 / w.g2);
    k.u00 = p.u.a;
    k.u01 = p.u.b;
    k.u10 = p.u.c;
    k.u11 = p.u.d;
    k.alpha = p.alpha;
    k.three_gamma = 3 * p.gamma;
    k.twelve_gamma = 12 * p.gamma;
    k.cubic = p.cubic;
    return k;
}

inline void shot_one(const ShotConsts &k, const ShotInputs &in, const ShotOutputs &out, std::size_t i) {
    const double xin = in.x_in[i], yin = in.y_in[i];
    const double x1 = in.x_s[0][i], y1 = in.y_s[0][i];
    const double xs2 = in.x_s[1][i], ys2 = in.y_s[1][i];
    const double x3 = in.x_s[2][i], y3 = in.y_s[2][i];
    const double x4 = in.x_s[3][i], y4 = in.y_s[3][i];

    double x2;
    if (k.cubic) {
        double a = k.alpha + xs2;
        x2 = k.three_gamma * (a * a) - ys2;
    } else {
        x2 = xs2;
    }
    double yin_a = yin + k.g4 * x1;
    double y1_a = (y1 + k.g4 * xin) + k.g1 * x2;
    double u_in = yin_a + k.c1 * xin;
    double u1 = y1_a + k.c2 * x1;
    double im = u1 / k.g1 - (u_in * k.c2) / k.g1g4;
    double c1y = (u_in * k.g1) / k.g4;

    double y2, cx = im, cy, c3, valid;
    if (k.cubic) {
        double qx = (k.m1x0 * xin + k.m1x1 * yin) - y1 / k.g1;
        double arg = (im + qx) + ys2;
        double sq = std::sqrt(arg / k.three_gamma);
        y2 = ((k.m1y0 * xin + k.m1y1 * yin) + c1y) + sq;
        c3 = k.c3 - 1 / std::sqrt(k.twelve_gamma * im);
        cy = c1y + std::sqrt(im / k.three_gamma);
        valid = (im > 0 && arg >= 0) ? 1.0 : 0.0;
    } else {
        y2 = ys2 + k.g1 * x1;
        c3 = k.c3;
        cy = c1y;
        valid = 1.0;
    }

    double y2b = y2 + k.g2 * x3;
    double y3b = (y3 + k.g2 * x2) + k.g3 * x4;
    double y4b = y4 + k.g3 * x3;
    double u2 = y2b + c3 * x2;
    double u3 = y3b + k.c4 * x3;
    double m00 = (c3 * k.c4) / k.g3g2 - k.g2_over_g3;
    double m10 = -((k.g3 * c3) / k.g2);
    double ff_x = ((m00 * cx + k.m01 * cy) + u3 / k.g3) - (u2 * k.c4) / k.g3g2;
    double ff_y = (m10 * cx + k.m11 * cy) + (u2 * k.g3) / k.g2;
    double x_out = x4 - ff_x;
    double y_out = y4b - ff_y;

    out.u_in[i] = u_in;
    out.u_1[i] = u1;
    out.u_2[i] = u2;
    out.u_3[i] = u3;
    out.i_m[i] = im;
    out.cot3[i] = c3;
    out.ff_x[i] = ff_x;
    out.ff_y[i] = ff_y;
    out.x_out[i] = x_out;
    out.y_out[i] = y_out;
    out.e_x[i] = x_out - (k.u00 * xin + k.u01 * yin);
    out.e_y[i] = y_out - (k.u10 * xin + k.u11 * yin);
    out.valid[i] = valid;
}

}  // namespace

}  // namespace cvcluster::kernels::detail

#endif
