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

#include <immintrin.h>

#include "kernels/kernel_math.h"

namespace cvcluster::kernels {

namespace {


inline __m256d bc(double x) {
    return _mm256_set1_pd(x);
}
inline __m256d add(__m256d a, __m256d b) {
    return _mm256_add_pd(a, b);
}
inline __m256d sub(__m256d a, __m256d b) {
    return _mm256_sub_pd(a, b);
}
inline __m256d mul(__m256d a, __m256d b) {
    return _mm256_mul_pd(a, b);
}
inline __m256d div(__m256d a, __m256d b) {
    return _mm256_div_pd(a, b);
}
inline __m256d neg(__m256d a) {
    return _mm256_xor_pd(a, _mm256_set1_pd(-0.0));
}
inline __m256d abs(__m256d a) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a);
}
/// a > b ? a : b, the same choice the scalar kernels make.
inline __m256d vmax(__m256d a, __m256d b) {
    return _mm256_max_pd(a, b);
}

inline __m256d pole_mask(const detail::ScanConsts &k, __m256d c4, __m256d &denom) {
    denom = add(mul(bc(k.q2), bc(k.b)), mul(bc(k.d), c4));
    return _mm256_cmp_pd(abs(denom), bc(k.pole), _CMP_GE_OQ);
}

inline __m256d with_nan(__m256d value, __m256d keep) {
    return _mm256_blendv_pd(_mm256_set1_pd(std::numeric_limits<double>::quiet_NaN()), value, keep);
}

}  // namespace

void scan_inf_norm_avx2(const ScanParams &p, const double *cot4p, double *inf_out, std::size_t n) {
    detail::ScanConsts k = detail::make_scan_consts(p);
    std::size_t i = 0;
    if (p.cubic) {
        const __m256d gain = bc(k.gain), q = bc(k.q), q2 = bc(k.q2), one = bc(1.0);
        const __m256d inv_g1sq = bc(k.inv_g1sq), inv_g3sq = bc(k.inv_g3sq);
        const __m256d d_minus_rho = bc(k.d - k.rho);
        for (; i + 4 <= n; i += 4) {
            __m256d c4 = _mm256_loadu_pd(cot4p + i);
            __m256d denom;
            __m256d keep = pole_mask(k, c4, denom);
            __m256d c3 = div(d_minus_rho, denom);
            __m256d t1 = div(sub(mul(c3, c4), one), q);
            __m256d t2 = div(c4, q);
            __m256d y1 = mul(q, c3);
            __m256d ex = add(add(mul(inv_g1sq, mul(t1, t1)), mul(gain, mul(t2, t2))), inv_g3sq);
            __m256d ey = add(add(mul(inv_g1sq, mul(y1, y1)), mul(gain, q2)), one);
            _mm256_storeu_pd(inf_out + i, with_nan(vmax(ex, ey), keep));
        }
        for (; i < n; i++) {
            inf_out[i] = detail::scan_cubic_one(k, cot4p[i]);
        }
    } else {
        const __m256d b = bc(k.b), dr2 = bc(k.dr2), bg = bc(k.bg), r = bc(k.r), r2 = bc(k.r2);
        const __m256d inv_g3sq = bc(k.inv_g3sq), qx = bc(k.qx), ey0 = bc(k.ey0), sy = bc(k.sy), g4sq = bc(k.g4sq);
        for (; i + 4 <= n; i += 4) {
            __m256d c4 = _mm256_loadu_pd(cot4p + i);
            __m256d denom;
            __m256d keep = pole_mask(k, c4, denom);
            __m256d den = add(b, mul(dr2, c4));
            __m256d den2 = mul(den, den);
            __m256d t = add(bg, mul(r, c4));
            __m256d ex = add(add(inv_g3sq, mul(r2, mul(c4, c4))), div(mul(qx, mul(t, t)), den2));
            __m256d ey = add(ey0, div(sy, mul(g4sq, den2)));
            _mm256_storeu_pd(inf_out + i, with_nan(vmax(ex, ey), keep));
        }
        for (; i < n; i++) {
            inf_out[i] = detail::scan_gaussian_one(k, cot4p[i]);
        }
    }
}

void propagate_shots_avx2(const ShotParams &p, const ShotInputs &in, const ShotOutputs &out, std::size_t n) {
    detail::ShotConsts k = detail::make_shot_consts(p);
    const __m256d g1 = bc(k.g1), g2 = bc(k.g2), g3 = bc(k.g3), g4 = bc(k.g4);
    const __m256d c1 = bc(k.c1), c2 = bc(k.c2), c3_const = bc(k.c3), c4 = bc(k.c4);
    const __m256d g1g4 = bc(k.g1g4), g3g2 = bc(k.g3g2), g2_over_g3 = bc(k.g2_over_g3);
    const __m256d m1x0 = bc(k.m1x0), m1x1 = bc(k.m1x1), m1y0 = bc(k.m1y0), m1y1 = bc(k.m1y1);
    const __m256d m01 = bc(k.m01), m11 = bc(k.m11);
    const __m256d u00 = bc(k.u00), u01 = bc(k.u01), u10 = bc(k.u10), u11 = bc(k.u11);
    const __m256d alpha = bc(k.alpha), three_gamma = bc(k.three_gamma), twelve_gamma = bc(k.twelve_gamma);
    const __m256d zero = _mm256_setzero_pd(), one = bc(1.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xin = _mm256_loadu_pd(in.x_in + i), yin = _mm256_loadu_pd(in.y_in + i);
        __m256d x1 = _mm256_loadu_pd(in.x_s[0] + i), y1 = _mm256_loadu_pd(in.y_s[0] + i);
        __m256d xs2 = _mm256_loadu_pd(in.x_s[1] + i), ys2 = _mm256_loadu_pd(in.y_s[1] + i);
        __m256d x3 = _mm256_loadu_pd(in.x_s[2] + i), y3 = _mm256_loadu_pd(in.y_s[2] + i);
        __m256d x4 = _mm256_loadu_pd(in.x_s[3] + i), y4 = _mm256_loadu_pd(in.y_s[3] + i);

        __m256d x2;
        if (k.cubic) {
            __m256d a = add(alpha, xs2);
            x2 = sub(mul(three_gamma, mul(a, a)), ys2);
        } else {
            x2 = xs2;
        }
        __m256d yin_a = add(yin, mul(g4, x1));
        __m256d y1_a = add(add(y1, mul(g4, xin)), mul(g1, x2));
        __m256d u_in = add(yin_a, mul(c1, xin));
        __m256d u1 = add(y1_a, mul(c2, x1));
        __m256d im = sub(div(u1, g1), div(mul(u_in, c2), g1g4));
        __m256d c1y = div(mul(u_in, g1), g4);

        __m256d y2, cx = im, cy, c3, valid;
        if (k.cubic) {
            __m256d qx = sub(add(mul(m1x0, xin), mul(m1x1, yin)), div(y1, g1));
            __m256d arg = add(add(im, qx), ys2);
            __m256d sq = _mm256_sqrt_pd(div(arg, three_gamma));
            y2 = add(add(add(mul(m1y0, xin), mul(m1y1, yin)), c1y), sq);
            c3 = sub(c3_const, div(one, _mm256_sqrt_pd(mul(twelve_gamma, im))));
            cy = add(c1y, _mm256_sqrt_pd(div(im, three_gamma)));
            __m256d ok = _mm256_and_pd(_mm256_cmp_pd(im, zero, _CMP_GT_OQ), _mm256_cmp_pd(arg, zero, _CMP_GE_OQ));
            valid = _mm256_and_pd(ok, one);
        } else {
            y2 = add(ys2, mul(g1, x1));
            c3 = c3_const;
            cy = c1y;
            valid = one;
        }

        __m256d y2b = add(y2, mul(g2, x3));
        __m256d y3b = add(add(y3, mul(g2, x2)), mul(g3, x4));
        __m256d y4b = add(y4, mul(g3, x3));
        __m256d u2 = add(y2b, mul(c3, x2));
        __m256d u3 = add(y3b, mul(c4, x3));
        __m256d m00 = sub(div(mul(c3, c4), g3g2), g2_over_g3);
        __m256d m10 = neg(div(mul(g3, c3), g2));
        __m256d ff_x = sub(add(add(mul(m00, cx), mul(m01, cy)), div(u3, g3)), div(mul(u2, c4), g3g2));
        __m256d ff_y = add(add(mul(m10, cx), mul(m11, cy)), div(mul(u2, g3), g2));
        __m256d x_out = sub(x4, ff_x);
        __m256d y_out = sub(y4b, ff_y);

        _mm256_storeu_pd(out.u_in + i, u_in);
        _mm256_storeu_pd(out.u_1 + i, u1);
        _mm256_storeu_pd(out.u_2 + i, u2);
        _mm256_storeu_pd(out.u_3 + i, u3);
        _mm256_storeu_pd(out.i_m + i, im);
        _mm256_storeu_pd(out.cot3 + i, c3);
        _mm256_storeu_pd(out.ff_x + i, ff_x);
        _mm256_storeu_pd(out.ff_y + i, ff_y);
        _mm256_storeu_pd(out.x_out + i, x_out);
        _mm256_storeu_pd(out.y_out + i, y_out);
        _mm256_storeu_pd(out.e_x + i, sub(x_out, add(mul(u00, xin), mul(u01, yin))));
        _mm256_storeu_pd(out.e_y + i, sub(y_out, add(mul(u10, xin), mul(u11, yin))));
        _mm256_storeu_pd(out.valid + i, valid);
    }
    for (; i < n; i++) {
        detail::shot_one(k, in, out, i);
    }
}

}  // namespace cvcluster::kernels
