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

#ifndef CVCLUSTER_PHASE_SOLVER_H
#define CVCLUSTER_PHASE_SOLVER_H

#include <cstdint>
#include <random>
#include <vector>

#include "cvcluster/core.h"

namespace cvcluster {

/// Transfer matrix of one measured node pair in primed notation:
///   ((cot_a·cot_bp − 1)/(g_a/g_b), cot_bp/(g_a/g_b)), (−g_a·cot_a/g_b, −g_a/g_b)).
/// The first pair uses (θ₁, θ₂′, g₁, g₄); the second (θ₃, θ₄′, g₃, g₂).
Mat2 pair_matrix(double cot_a, double cot_bp, double g_a, double g_b);

/// U(θ₁, θ₂′, θ₃, θ₄′) = second_pair · first_pair.
SymplecticTarget forward_matrix(const PhaseSet &phases, const WeightConfig &w);
SymplecticTarget forward_matrix_cot(double cot1, double cot2p, double cot3, double cot4p, const WeightConfig &w);

struct SolverResult {
    PhaseSet phases;
    double cot1 = 0, cot2p = 0, cot3 = 0, cot4p = 0;
    SymplecticTarget realized;
    /// max |realized − target| entrywise, evaluated from the angles.
    double residual = 0;
    /// Same, evaluated from the solved cotangents before conversion to angles.
    double cot_residual = 0;
    /// Some |cot| exceeds kIllConditionedCot: the angle sits within ~1e−3 of 0 or π and a
    /// double angle resolves its cotangent only to ~ε·cot², so `residual` reflects the
    /// angle representation rather than the solution.
    bool ill_conditioned = false;
    /// The target sat on the removable part of the pole set (d = g₁g₃/(g₂g₄)); the
    /// returned phases are the cot θ₂′ = cot θ₃ = 0 branch.
    bool removable_pole = false;
};

inline constexpr double kIllConditionedCot = 1e3;

/// Shared denominator b·g₃²/g₂² + d·cot θ₄′ of the closed-form phase solution.
double solver_denominator(double b, double d, const WeightConfig &w, double cot4p);

/// Homodyne phases that realize `target` for the free phase θ₄′.
/// Throws kNotSymplectic, kDegenerateD or kDenominatorPole.
SolverResult solve_phases(
    const SymplecticTarget &target, const WeightConfig &w, double theta4p, const Tolerances &tol = {});

/// Effective third phase seen by the cubic scheme when θ₃ is set on the detector:
/// cot θ₃′ = cot θ₃ + 1/√(12γI_m).
double corrected_theta3(double theta3, const CubicConfig &cubic);
/// Inverse of corrected_theta3: the detector phase that produces a wanted θ₃′.
double physical_theta3(double theta3p, const CubicConfig &cubic);

/// Unprimed cotangents used by the detectors: cot θ₂ = g₄²·cot θ₂′, cot θ₄ = g₂²·cot θ₄′.
struct DetectorCot {
    double cot2 = 0;
    double cot4 = 0;
};
DetectorCot unprimed(double cot2p, double cot4p, const WeightConfig &w);

/// Random unit-determinant target: a, b, c ~ N(0, 2²), |a| ≥ 0.1, d = (1 + b·c)/a.
SymplecticTarget sample_symplectic(std::mt19937_64 &rng);

struct ArbitrarinessFailure {
    std::size_t index = 0;
    SymplecticTarget target;
    double residual = 0;
};

struct ArbitrarinessReport {
    std::size_t n_samples = 0;
    std::size_t n_solved = 0;
    /// Targets on the excluded singular set (degenerate d or denominator pole).
    std::size_t n_excluded = 0;
    /// Solved but ill-conditioned; judged on cot_residual instead of the angle residual.
    std::size_t n_ill_conditioned = 0;
    double max_residual = 0;
    std::vector<ArbitrarinessFailure> failures;
};

/// Samples random symplectic targets, solves and round-trips each. Failures (residual above
/// `max_residual`) are reported, not thrown.
ArbitrarinessReport check_arbitrariness(
    const WeightConfig &w,
    double theta4p,
    std::size_t n_samples,
    std::uint64_t seed,
    double max_residual = 1e-9,
    const Tolerances &tol = {});

}  // namespace cvcluster

#endif
