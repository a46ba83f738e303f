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

#include "cvcluster/core.h"

#include <random>

#include "gtest/gtest.h"

using namespace cvcluster;

TEST(core, validate_target_accepts_unit_determinant) {
    EXPECT_NO_THROW(validate_target({1, 0, 0, 1}));
    CheckedTarget t = validate_target({2, 3, 1, 2});
    EXPECT_FALSE(t.degenerate_d);
    EXPECT_EQ(t.matrix, (Mat2{2, 3, 1, 2}));
}

TEST(core, validate_target_rejects_singular) {
    try {
        validate_target({1, 1, 1, 1});
        FAIL() << "expected NotSymplectic";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kNotSymplectic);
        EXPECT_EQ(error_code_name(e.code()), "not-symplectic");
    }
}

TEST(core, validate_target_flags_degenerate_d) {
    CheckedTarget t = validate_target({1, 1, -1, 0});
    EXPECT_TRUE(t.degenerate_d);
    EXPECT_FALSE(validate_target({1, 1, 0, 1}).degenerate_d);
}

TEST(core, validate_target_accepts_parametrized_family) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int k = 0; k < 1000; k++) {
        double a = u(rng), b = u(rng), d = u(rng);
        if (std::fabs(b) < 0.05) {
            continue;
        }
        Mat2 m{a, b, (a * d - 1) / b, d};
        Tolerances tol;
        // det is 1 up to the rounding of (a·d − 1)/b·b.
        EXPECT_NO_THROW(validate_target(m, tol)) << a << " " << b << " " << d;
    }
}

TEST(core, tolerance_is_configurable) {
    Mat2 m{1, 0, 0, 1 + 1e-10};
    EXPECT_THROW(validate_target(m), Error);
    Tolerances loose;
    loose.symplectic = 1e-9;
    EXPECT_NO_THROW(validate_target(m, loose));
}

TEST(core, db_to_variance_values) {
    EXPECT_DOUBLE_EQ(db_to_variance(0), 0.25);
    EXPECT_NEAR(db_to_variance(-15), 0.00790569415042094833, 1e-17);
    EXPECT_NEAR(db_to_variance(-20.5), 0.00222812734533436382, 1e-17);
}

TEST(core, db_round_trip) {
    for (double db = -30; db <= 10; db += 0.37) {
        EXPECT_NEAR(variance_to_db(db_to_variance(db)), db, 1e-12);
    }
    for (double v : {1e-6, 0.001, 0.25, 3.0}) {
        EXPECT_NEAR(db_to_variance(variance_to_db(v)) / v, 1, 1e-12);
    }
}

TEST(core, squeezing_spec_consistency) {
    SqueezingSpec s = SqueezingSpec::from_db(-15);
    EXPECT_NEAR(s.var_y, 0.00790569415042094833, 1e-17);
    EXPECT_NEAR(s.r, 1.7269388197455342, 1e-12);
    EXPECT_NEAR(s.var_x() * s.var_y, 1.0 / 16, 1e-15);
    SqueezingSpec back = SqueezingSpec::from_r(s.r);
    EXPECT_NEAR(back.db, -15, 1e-12);
    EXPECT_NEAR(back.var_y, s.var_y, 1e-15);
    EXPECT_LE(SqueezingSpec::from_r(0.3).db, 0);
    EXPECT_THROW(SqueezingSpec::from_db(-INFINITY), Error);
}

TEST(core, arccot_inverts_cot) {
    for (double v : {-1e6, -1234.5, -1.0, -1e-9, 0.0, 1e-9, 0.5, 77.0, 1e6}) {
        EXPECT_TRUE(angle_in_branch(arccot(v))) << v;
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> wide(-1e3, 1e6);
    for (int k = 0; k < 10000; k++) {
        double v = wide(rng);
        EXPECT_LE(std::fabs(cot(arccot(v)) - v), 1e-12 * std::max(1.0, std::fabs(v))) << v;
    }
    std::uniform_real_distribution<double> small(-1, 1);
    for (int k = 0; k < 10000; k++) {
        double v = small(rng);
        EXPECT_LE(std::fabs(cot(arccot(v)) - v), 1e-12) << v;
    }
    // Near θ = π the angle itself only resolves 4.4e−16, so the round trip is bounded by
    // the conditioning 1/sin²θ = 1 + v².
    std::uniform_real_distribution<double> far(-1e6, -1e3);
    for (int k = 0; k < 10000; k++) {
        double v = far(rng);
        EXPECT_LE(std::fabs(cot(arccot(v)) - v), 1e-15 * (1 + v * v)) << v;
    }
}

TEST(core, arccot_is_monotone_decreasing) {
    double prev = 0;
    for (double v = 1e4; v >= -1e4; v -= 37.1) {
        double t = arccot(v);
        EXPECT_GT(t, prev);
        prev = t;
    }
}

TEST(core, weight_config_validation) {
    EXPECT_NO_THROW((WeightConfig{5, 5, 4, 4}.validate()));
    EXPECT_THROW((WeightConfig{5, 0, 4, 4}.validate()), Error);
    EXPECT_THROW((WeightConfig{5, 5, -4, 4}.validate()), Error);
}

TEST(core, cubic_config_validation) {
    CubicConfig c;
    EXPECT_NEAR(c.alpha, 5 * std::sqrt(5.0), 1e-14);
    EXPECT_NEAR(c.i_m, 3 * c.gamma * c.alpha * c.alpha, 1e-12);
    EXPECT_NEAR(c.suppression(), 45, 1e-12);
    EXPECT_NO_THROW(c.validate());
    c.i_m = 0;
    try {
        c.validate();
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kNonpositiveIm);
    }
    EXPECT_THROW(CubicConfig::at_mean(-0.1, 1).validate(), Error);
}

TEST(core, inf_norm_values) {
    EXPECT_EQ(inf_norm({2, 2}), 2);
    EXPECT_EQ(inf_norm({0, 1}), 1);
    EXPECT_EQ(inf_norm({0.125, 1.64}), 1.64);
}
