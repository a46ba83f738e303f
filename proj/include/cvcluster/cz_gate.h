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

#ifndef CVCLUSTER_CZ_GATE_H
#define CVCLUSTER_CZ_GATE_H

#include <array>

#include "cvcluster/core.h"

namespace cvcluster {

/// Row-major 4×4 real matrix acting on (x₁, x₂, y₁, y₂).
struct Mat4 {
    std::array<std::array<double, 4>, 4> m{};

    static Mat4 identity();
    double &operator()(int i, int j) {
        return m[i][j];
    }
    double operator()(int i, int j) const {
        return m[i][j];
    }
    double max_abs_diff(const Mat4 &other) const;
    double det() const;
    friend Mat4 operator*(const Mat4 &l, const Mat4 &r);
};

/// CZ(g): Y₁ = y₁ + g·x₂, Y₂ = y₂ + g·x₁, x unchanged.
Mat4 cz_matrix(double g);

/// s(g) = (2 + g² − g·√(4 + g²))/2.
double squeezing_ratio(double g);

struct CzDecomposition {
    double g = 0;
    double s = 1;
    double r_bs = 0;
    double t_bs = 0;
    /// Left-to-right matrix product order: phase shifter, beam splitter, squeezer,
    /// beam splitter, phase shifter. The rightmost factor acts first.
    std::array<Mat4, 5> factors;

    Mat4 product() const;
    /// max |product − cz_matrix(g)| entrywise.
    double residual() const;
};

/// Requires g ≥ 0 (kInvalidConfig otherwise).
CzDecomposition bloch_messiah(double g);

struct Quadratures {
    double x = 0;
    double y = 0;
};

/// Measurement-based in-line squeezer with reflectivity R ∈ (0, 1]:
/// X = x_in/√R, Y = √R·y_in + √(1 − R)·y_s. Throws kInvalidReflectivity.
Quadratures inline_squeezer(double reflectivity, double y_s, double x_in, double y_in);

/// Largest CZ weight whose in-line squeezer keeps its added noise below the signal,
/// 10^{−x/20}/√(1 + 10^{x/10}) at squeezing x dB.
double max_weight(double db);
bool weight_admissible(double g, double db);

}  // namespace cvcluster

#endif
