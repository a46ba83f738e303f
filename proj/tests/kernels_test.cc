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

#include "cvcluster/kernels.h"

#include <cstring>
#include <random>
#include <vector>

#include "cvcluster/error_model.h"
#include "cvcluster/phase_solver.h"
#include "gtest/gtest.h"

using namespace cvcluster;
using namespace cvcluster::kernels;

namespace {

bool same_bits(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) {
        return true;
    }
    return std::memcmp(&a, &b, sizeof a) == 0;
}

ShotParams shot_params(const SymplecticTarget &t, const WeightConfig &w, double theta4p, bool cubic) {
    SolverResult s = solve_phases(t, w, theta4p);
    DetectorCot det = unprimed(s.cot2p, s.cot4p, w);
    ShotParams p;
    p.w = w;
    p.cot1 = s.cot1;
    p.cot2 = det.cot2;
    p.cot3 = s.cot3;
    p.cot4 = det.cot4;
    p.u = t;
    p.cubic = cubic;
    p.gamma = 0.1;
    p.alpha = 11.180339887498949;
    return p;
}

struct ShotBuffers {
    std::vector<double> x_in, y_in, x_s[4], y_s[4];
    std::vector<double> o[13];

    ShotBuffers(std::size_t n, std::uint64_t seed, double var_s) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> vac(0, 0.5), sq(0, std::sqrt(var_s)), anti(0, std::sqrt(0.0625 / var_s));
        for (std::size_t i = 0; i < n; i++) {
            x_in.push_back(vac(rng));
            y_in.push_back(vac(rng));
            for (int j = 0; j < 4; j++) {
                x_s[j].push_back(anti(rng));
                y_s[j].push_back(sq(rng));
            }
        }
        for (auto &v : o) {
            v.assign(n, -7.0);
        }
    }
    ShotInputs inputs() const {
        ShotInputs in;
        in.x_in = x_in.data();
        in.y_in = y_in.data();
        for (int j = 0; j < 4; j++) {
            in.x_s[j] = x_s[j].data();
            in.y_s[j] = y_s[j].data();
        }
        return in;
    }
    ShotOutputs outputs() {
        return {o[0].data(), o[1].data(), o[2].data(), o[3].data(), o[4].data(), o[5].data(), o[6].data(),
                o[7].data(), o[8].data(), o[9].data(), o[10].data(), o[11].data(), o[12].data()};
    }
};

}  // namespace

TEST(kernels, isa_names) {
    EXPECT_EQ(isa_name(Isa::kScalar), "scalar");
    EXPECT_EQ(isa_name(Isa::kAvx2), "avx2");
    if (!avx2_available()) {
        EXPECT_EQ(active_isa(), Isa::kScalar);
    }
}

TEST(kernels, gaussian_scan_matches_error_model) {
    std::vector<double> cand = theta4_candidates();
    std::vector<double> out(cand.size());
    ScanParams p;
    p.b = 1.3;
    p.d = -2.2;
    p.w = {5, 5, 4, 4};
    scan_inf_norm_scalar(p, cand.data(), out.data(), cand.size());
    for (std::size_t i = 0; i < cand.size(); i++) {
        EXPECT_EQ(out[i], inf_norm(error_vector_gaussian_cot(p.b, p.d, p.w, cand[i]))) << i;
    }
}

TEST(kernels, cubic_scan_matches_error_model) {
    std::vector<double> cand = theta4_candidates();
    std::vector<double> out(cand.size());
    CubicConfig c;
    ScanParams p;
    p.b = -0.7;
    p.d = 3.1;
    p.w = {5, 5, 4, 4};
    p.cubic = true;
    p.gain = 1 / c.suppression();
    scan_inf_norm_scalar(p, cand.data(), out.data(), cand.size());
    for (std::size_t i = 0; i < cand.size(); i++) {
        ErrorVector e = error_vector_cubic_solved(p.b, p.d, p.w, cand[i], c);
        EXPECT_NEAR(out[i], inf_norm(e), 1e-13 * inf_norm(e)) << i;
    }
}

TEST(kernels, scan_marks_poles) {
    // b·(g3/g2)² + d·cot = 0 at cot = −b·(g3/g2)²/d = 0.5.
    ScanParams p;
    p.b = -1;
    p.d = 2;
    double cand[3] = {0.5, 0.5 + 1e-12, 0.4};
    double out[3];
    scan_inf_norm_scalar(p, cand, out, 3);
    EXPECT_TRUE(std::isnan(out[0]));
    EXPECT_TRUE(std::isnan(out[1]));
    EXPECT_TRUE(std::isfinite(out[2]));
}

TEST(kernels, scan_avx2_bit_exact) {
    if (!avx2_available()) {
        GTEST_SKIP() << "no AVX2";
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5, 5), g(0.3, 8);
    std::vector<double> cand = theta4_candidates();
    cand.push_back(0.5);  // pole for the first instance below
    for (int k = 0; k < 200; k++) {
        ScanParams p;
        p.b = k == 0 ? -1 : u(rng);
        p.d = k == 0 ? 2 : u(rng);
        p.w = k == 0 ? WeightConfig{} : WeightConfig{g(rng), g(rng), g(rng), g(rng)};
        p.cubic = k % 2 == 1;
        p.gain = p.cubic ? 1 / 45.0 : 1.0;
        for (std::size_t n : {cand.size(), std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{6}, std::size_t{9}}) {
            std::vector<double> a(n, 1.0), b(n, 2.0);
            scan_inf_norm_scalar(p, cand.data(), a.data(), n);
            scan_inf_norm_avx2(p, cand.data(), b.data(), n);
            for (std::size_t i = 0; i < n; i++) {
                ASSERT_TRUE(same_bits(a[i], b[i])) << k << " " << i << " " << a[i] << " " << b[i];
            }
        }
    }
}

TEST(kernels, gaussian_shots_reproduce_target_without_squeezed_noise) {
    SymplecticTarget t{2, 3, 1, 2};
    WeightConfig w{5, 5, 4, 4};
    ShotParams p = shot_params(t, w, 1.1, false);
    const std::size_t n = 257;
    ShotBuffers buf(n, 4, db_to_variance(-15));
    for (auto &v : buf.y_s) {
        std::fill(v.begin(), v.end(), 0.0);
    }
    ShotOutputs out = buf.outputs();
    propagate_shots_scalar(p, buf.inputs(), out, n);
    for (std::size_t i = 0; i < n; i++) {
        double scale = 1 + std::fabs(buf.x_in[i]) + std::fabs(buf.y_in[i]);
        for (int j = 0; j < 4; j++) {
            scale += std::fabs(buf.x_s[j][i]);
        }
        EXPECT_NEAR(out.x_out[i], t.a * buf.x_in[i] + t.b * buf.y_in[i], 1e-12 * scale * 100);
        EXPECT_NEAR(out.y_out[i], t.c * buf.x_in[i] + t.d * buf.y_in[i], 1e-12 * scale * 100);
        EXPECT_EQ(out.valid[i], 1);
    }
}

TEST(kernels, gaussian_residual_is_linear_in_squeezed_noise) {
    SymplecticTarget t{2, 3, 1, 2};
    WeightConfig w{5, 5, 4, 4};
    ShotParams p = shot_params(t, w, kHalfPi, false);
    const std::size_t n = 64;
    ShotBuffers one(n, 9, 0.01);
    ShotBuffers two = one;
    for (auto &v : two.y_s) {
        for (double &x : v) {
            x *= 2;
        }
    }
    ShotOutputs o1 = one.outputs(), o2 = two.outputs();
    propagate_shots_scalar(p, one.inputs(), o1, n);
    propagate_shots_scalar(p, two.inputs(), o2, n);
    for (std::size_t i = 0; i < n; i++) {
        EXPECT_NEAR(o2.e_x[i], 2 * o1.e_x[i], 1e-9);
        EXPECT_NEAR(o2.e_y[i], 2 * o1.e_y[i], 1e-9);
    }
}

TEST(kernels, shots_avx2_bit_exact) {
    if (!avx2_available()) {
        GTEST_SKIP() << "no AVX2";
    }
    SymplecticTarget targets[] = {{2, 3, 1, 2}, {1, 0.4, -0.5, 0.8}, {-0.3, 2, -0.6, 0.6666666666666666}};
    for (bool cubic : {false, true}) {
        for (const SymplecticTarget &t : targets) {
            ShotParams p = shot_params(t, {5, 5, 4, 4}, 1.2, cubic);
            p.u = t;
            // Large anti-squeezed noise so some cubic shots go invalid or flip branch.
            for (std::size_t n : {std::size_t{4099}, std::size_t{0}, std::size_t{1}, std::size_t{5}, std::size_t{7}}) {
                ShotBuffers a(n, 21 + n, 1e-4), b = a;
                ShotOutputs oa = a.outputs(), ob = b.outputs();
                propagate_shots_scalar(p, a.inputs(), oa, n);
                propagate_shots_avx2(p, b.inputs(), ob, n);
                for (int f = 0; f < 13; f++) {
                    for (std::size_t i = 0; i < n; i++) {
                        ASSERT_TRUE(same_bits(a.o[f][i], b.o[f][i])) << cubic << " field " << f << " shot " << i;
                    }
                }
            }
        }
    }
}

TEST(kernels, cubic_shots_flag_invalid_photocurrent) {
    ShotParams p = shot_params({2, 3, 1, 2}, {5, 5, 4, 4}, kHalfPi, true);
    const std::size_t n = 4096;
    ShotBuffers buf(n, 5, 1e-5);
    ShotOutputs out = buf.outputs();
    propagate_shots_scalar(p, buf.inputs(), out, n);
    std::size_t invalid = 0;
    for (std::size_t i = 0; i < n; i++) {
        if (out.valid[i] == 0) {
            invalid++;
        } else {
            EXPECT_GT(out.i_m[i], 0);
            EXPECT_TRUE(std::isfinite(out.x_out[i]));
        }
    }
    EXPECT_LT(invalid, n);
}

TEST(kernels, dispatch_uses_requested_isa) {
    ScanParams p;
    p.b = 0.8;
    p.d = 1.9;
    std::vector<double> cand = theta4_candidates();
    std::vector<double> a(cand.size()), b(cand.size());
    scan_inf_norm(Isa::kScalar, p, cand.data(), a.data(), cand.size());
    scan_inf_norm_scalar(p, cand.data(), b.data(), cand.size());
    for (std::size_t i = 0; i < cand.size(); i++) {
        ASSERT_TRUE(same_bits(a[i], b[i]));
    }
}
