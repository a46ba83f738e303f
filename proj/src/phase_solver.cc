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

#include "cvcluster/phase_solver.h"

#include <algorithm>
#include <sstream>

namespace cvcluster {

Mat2 pair_matrix(double cot_a, double cot_bp, double g_a, double g_b) {
    double ratio = g_a / g_b;
    return {(cot_a * cot_bp - 1) / ratio, cot_bp / ratio, -ratio * cot_a, -ratio};
}

SymplecticTarget forward_matrix_cot(double cot1, double cot2p, double cot3, double cot4p, const WeightConfig &w) {
    return pair_matrix(cot3, cot4p, w.g3, w.g2) * pair_matrix(cot1, cot2p, w.g1, w.g4);
}

SymplecticTarget forward_matrix(const PhaseSet &p, const WeightConfig &w) {
    double theta3 = p.theta3p.value_or(p.theta3);
    return forward_matrix_cot(cot(p.theta1), cot(p.theta2p), cot(theta3), cot(p.theta4p), w);
}

double solver_denominator(double b, double d, const WeightConfig &w, double cot4p) {
    double q = w.g3 / w.g2;
    return q * q * b + d * cot4p;
}

SolverResult solve_phases(
    const SymplecticTarget &target, const WeightConfig &w, double theta4p, const Tolerances &tol) {
    w.validate();
    require_angle(theta4p, "theta4p");
    CheckedTarget checked = validate_target(target, tol);
    if (checked.degenerate_d) {
        throw Error(ErrorCode::kDegenerateD, "phase solution divides by d; |d| is below the degenerate threshold");
    }
    const double b = target.b, c = target.c, d = target.d;
    const double cot4p = cot(theta4p);
    const double rho = w.g1 * w.g3 / (w.g2 * w.g4);
    const double denom = solver_denominator(b, d, w, cot4p);

    SolverResult res;
    res.cot4p = cot4p;
    if (std::fabs(denom) < tol.pole) {
        if (!(std::fabs(d - rho) < tol.pole)) {
            std::ostringstream ss;
            ss.precision(17);
            ss << "b*g3^2/g2^2 + d*cot(theta4p) = " << denom << " is below the pole threshold";
            throw Error(ErrorCode::kDenominatorPole, ss.str());
        }
        // 0/0 in all three solutions; one phase is free and cot θ₃ = 0 is the chosen branch.
        res.removable_pole = true;
        res.cot1 = c / d;
        res.cot2p = 0;
        res.cot3 = 0;
    } else {
        res.cot1 = c / d + (rho - d) * (w.g3 / w.g2) / (denom * (w.g1 / w.g4) * d);
        res.cot2p = -(w.g1 * w.g2 / (w.g3 * w.g4)) * denom;
        res.cot3 = (d - rho) / denom;
    }
    res.phases.theta1 = arccot(res.cot1);
    res.phases.theta2p = arccot(res.cot2p);
    res.phases.theta3 = arccot(res.cot3);
    res.phases.theta4p = theta4p;
    res.realized = forward_matrix(res.phases, w);
    res.residual = res.realized.max_abs_diff(target);
    res.cot_residual = forward_matrix_cot(res.cot1, res.cot2p, res.cot3, cot4p, w).max_abs_diff(target);
    res.ill_conditioned = std::max({std::fabs(res.cot1), std::fabs(res.cot2p), std::fabs(res.cot3), std::fabs(cot4p)}) >
                          kIllConditionedCot;
    return res;
}

namespace {

double cubic_shift(const CubicConfig &cubic) {
    if (!(cubic.i_m > 0)) {
        throw Error(ErrorCode::kNonpositiveIm, "I_m must be positive for the cubic phase correction");
    }
    if (!(cubic.gamma > 0)) {
        throw Error(ErrorCode::kInvalidConfig, "gamma must be positive");
    }
    return 1 / std::sqrt(cubic.suppression());
}

}  // namespace

double corrected_theta3(double theta3, const CubicConfig &cubic) {
    return arccot(cot(theta3) + cubic_shift(cubic));
}

double physical_theta3(double theta3p, const CubicConfig &cubic) {
    return arccot(cot(theta3p) - cubic_shift(cubic));
}

DetectorCot unprimed(double cot2p, double cot4p, const WeightConfig &w) {
    return {w.g4 * w.g4 * cot2p, w.g2 * w.g2 * cot4p};
}

SymplecticTarget sample_symplectic(std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, 2.0);
    double a;
    do {
        a = normal(rng);
    } while (std::fabs(a) < 0.1);
    double b = normal(rng);
    double c = normal(rng);
    return {a, b, c, (1 + b * c) / a};
}

ArbitrarinessReport check_arbitrariness(
    const WeightConfig &w,
    double theta4p,
    std::size_t n_samples,
    std::uint64_t seed,
    double max_residual,
    const Tolerances &tol) {
    ArbitrarinessReport report;
    report.n_samples = n_samples;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_samples; i++) {
        SymplecticTarget target = sample_symplectic(rng);
        // d is recomputed from a, b, c so det = 1 up to rounding; keep the sample on the group.
        Tolerances sample_tol = tol;
        sample_tol.symplectic = std::max(tol.symplectic, 1e-12 * (1 + std::fabs(target.b * target.c)));
        try {
            SolverResult res = solve_phases(target, w, theta4p, sample_tol);
            report.n_solved++;
            double residual = res.residual;
            if (res.ill_conditioned) {
                report.n_ill_conditioned++;
                residual = res.cot_residual;
            }
            report.max_residual = std::max(report.max_residual, residual);
            if (!(residual <= max_residual)) {
                report.failures.push_back({i, target, residual});
            }
        } catch (const Error &e) {
            if (e.code() == ErrorCode::kDegenerateD || e.code() == ErrorCode::kDenominatorPole) {
                report.n_excluded++;
            } else {
                report.failures.push_back({i, target, std::numeric_limits<double>::infinity()});
            }
        }
    }
    return report;
}

}  // namespace cvcluster
