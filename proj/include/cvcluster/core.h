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

#ifndef CVCLUSTER_CORE_H
#define CVCLUSTER_CORE_H

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cvcluster {

/// Quadrature variance of the vacuum (and of a coherent state). Every variance in
/// this library is expressed in these units.
inline constexpr double kVacuumVariance = 0.25;

inline constexpr double kHalfPi = std::numbers::pi / 2;

enum class ErrorCode {
    kNotSymplectic,
    kDegenerateD,
    kDenominatorPole,
    kNonpositiveIm,
    kInvalidReflectivity,
    kInvalidConfig,
};

/// Stable machine-readable name, e.g. "degenerate-d".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message);
    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

struct Tolerances {
    double symplectic = 1e-12;
    double degenerate_d = 1e-9;
    /// Threshold on the shared denominator |b·g₃²/g₂² + d·cot θ₄′| of the phase solution.
    double pole = 1e-9;
};

/// Row-major 2×2 real matrix ((a, b), (c, d)).
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const {
        return a * d - b * c;
    }
    Mat2 transposed() const {
        return {a, c, b, d};
    }
    double max_abs_diff(const Mat2 &other) const;

    friend Mat2 operator*(const Mat2 &l, const Mat2 &r) {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }
    friend bool operator==(const Mat2 &, const Mat2 &) = default;
};

/// Single-mode Gaussian operation to implement; unit determinant.
using SymplecticTarget = Mat2;

struct CheckedTarget {
    SymplecticTarget matrix;
    /// |d| below the degenerate threshold: the phase solution divides by d.
    bool degenerate_d = false;
};

/// Throws kNotSymplectic when |det − 1| exceeds the tolerance.
CheckedTarget validate_target(const SymplecticTarget &m, const Tolerances &tol = {});

/// CZ weights of the linear cluster in - 1 - 2 - 3 - 4: g₄ couples the input to node 1,
/// g₁ nodes 1–2, g₂ nodes 2–3, g₃ nodes 3–4.
struct WeightConfig {
    double g1 = 1, g2 = 1, g3 = 1, g4 = 1;

    void validate() const;
    friend bool operator==(const WeightConfig &, const WeightConfig &) = default;
};

/// Squeezed resource oscillator. var_y = e^{−2r}/4, db = 10·log₁₀(4·var_y).
struct SqueezingSpec {
    double r = 0;
    double var_y = kVacuumVariance;
    double db = 0;

    static SqueezingSpec from_db(double db);
    static SqueezingSpec from_r(double r);
    /// Anti-squeezed quadrature variance e^{2r}/4 (minimum uncertainty).
    double var_x() const {
        return kVacuumVariance * kVacuumVariance / var_y;
    }
};

double db_to_variance(double db);
double variance_to_db(double variance);

/// Homodyne local-oscillator phases in the primed notation
/// cot θ₂′ = cot θ₂ / g₄², cot θ₄′ = cot θ₄ / g₂². All angles live on (0, π).
struct PhaseSet {
    double theta1 = kHalfPi;
    double theta2p = kHalfPi;
    double theta3 = kHalfPi;
    double theta4p = kHalfPi;
    /// Effective third phase when a cubic-phase node sits in the cluster.
    std::optional<double> theta3p;
};

/// Per-quadrature excess noise, in multiples of the squeezed variance ⟨δŷ²ₛ⟩.
struct ErrorVector {
    double ex = 0;
    double ey = 0;
};

inline double inf_norm(const ErrorVector &e) {
    return std::fmax(e.ex, e.ey);
}

/// Non-Gaussian node parameters: nonlinearity γ, displacement α, and the photocurrent
/// combination I_m used by the error model.
struct CubicConfig {
    double gamma = 0.1;
    double alpha = 11.180339887498949;  // 5√5
    double i_m = 37.5;  // 3γα²

    /// I_m set to its mean value 3γα².
    static CubicConfig at_mean(double gamma, double alpha);
    /// 12·γ·I_m, the factor by which the cubic node suppresses its noise contribution.
    double suppression() const {
        return 12 * gamma * i_m;
    }
    void validate() const;
};

/// Branch (0, π): cot is a monotone bijection onto ℝ.
inline double arccot(double v) {
    if (v > 0) {
        return std::atan(1 / v);
    }
    return kHalfPi - std::atan(v);
}
inline double cot(double theta) {
    return std::cos(theta) / std::sin(theta);
}
bool angle_in_branch(double theta);
void require_angle(double theta, std::string_view name);

}  // namespace cvcluster

#endif
