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

#include <algorithm>
#include <sstream>

namespace cvcluster {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kNotSymplectic:
            return "not-symplectic";
        case ErrorCode::kDegenerateD:
            return "degenerate-d";
        case ErrorCode::kDenominatorPole:
            return "denominator-pole";
        case ErrorCode::kNonpositiveIm:
            return "nonpositive-im";
        case ErrorCode::kInvalidReflectivity:
            return "invalid-reflectivity";
        case ErrorCode::kInvalidConfig:
            return "invalid-config";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string &message) : std::runtime_error(message), code_(code) {
}

double Mat2::max_abs_diff(const Mat2 &o) const {
    return std::max({std::fabs(a - o.a), std::fabs(b - o.b), std::fabs(c - o.c), std::fabs(d - o.d)});
}

CheckedTarget validate_target(const SymplecticTarget &m, const Tolerances &tol) {
    double det = m.det();
    if (!(std::fabs(det - 1) <= tol.symplectic)) {
        std::ostringstream ss;
        ss.precision(17);
        ss << "target is not symplectic: det = " << det;
        throw Error(ErrorCode::kNotSymplectic, ss.str());
    }
    return {m, std::fabs(m.d) < tol.degenerate_d};
}

void WeightConfig::validate() const {
    for (double g : {g1, g2, g3, g4}) {
        if (!(g > 0) || !std::isfinite(g)) {
            throw Error(ErrorCode::kInvalidConfig, "CZ weights must be finite and positive");
        }
    }
}

double db_to_variance(double db) {
    return kVacuumVariance * std::pow(10.0, db / 10);
}

double variance_to_db(double variance) {
    return 10 * std::log10(variance / kVacuumVariance);
}

SqueezingSpec SqueezingSpec::from_db(double db) {
    if (!std::isfinite(db)) {
        throw Error(ErrorCode::kInvalidConfig, "squeezing in dB must be finite");
    }
    SqueezingSpec s;
    s.db = db;
    s.var_y = db_to_variance(db);
    s.r = -0.5 * std::log(s.var_y / kVacuumVariance);
    return s;
}

SqueezingSpec SqueezingSpec::from_r(double r) {
    if (!std::isfinite(r)) {
        throw Error(ErrorCode::kInvalidConfig, "squeezing coefficient must be finite");
    }
    SqueezingSpec s;
    s.r = r;
    s.var_y = kVacuumVariance * std::exp(-2 * r);
    s.db = variance_to_db(s.var_y);
    return s;
}

CubicConfig CubicConfig::at_mean(double gamma, double alpha) {
    CubicConfig c;
    c.gamma = gamma;
    c.alpha = alpha;
    c.i_m = 3 * gamma * alpha * alpha;
    return c;
}

void CubicConfig::validate() const {
    if (!(gamma > 0) || !(alpha > 0)) {
        throw Error(ErrorCode::kInvalidConfig, "cubic node needs gamma > 0 and alpha > 0");
    }
    if (!(i_m > 0)) {
        throw Error(ErrorCode::kNonpositiveIm, "I_m must be positive");
    }
}

bool angle_in_branch(double theta) {
    return theta > 0 && theta < std::numbers::pi;
}

void require_angle(double theta, std::string_view name) {
    if (!angle_in_branch(theta)) {
        std::ostringstream ss;
        ss << name << " = " << theta << " is outside (0, pi)";
        throw Error(ErrorCode::kInvalidConfig, ss.str());
    }
}

}  // namespace cvcluster
