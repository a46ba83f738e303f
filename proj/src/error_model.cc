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

#include "cvcluster/error_model.h"

#include <algorithm>
#include <sstream>

#include "cvcluster/kernels.h"
#include "cvcluster/parallel.h"
#include "kernels/kernel_math.h"

namespace cvcluster {

namespace {

kernels::ScanParams scan_params(double b, double d, const WeightConfig &w, double gain, bool cubic, double pole) {
    kernels::ScanParams p;
    p.b = b;
    p.d = d;
    p.w = w;
    p.gain = gain;
    p.cubic = cubic;
    p.pole = pole;
    return p;
}

[[noreturn]] void throw_pole(double denom) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "b*g3^2/g2^2 + d*cot(theta4p) = " << denom << " is below the pole threshold";
    throw Error(ErrorCode::kDenominatorPole, ss.str());
}

double cubic_gain(const CubicConfig &cubic) {
    cubic.validate();
    return 1 / cubic.suppression();
}

}  // namespace

std::string_view surface_mode_name(SurfaceMode mode) {
    switch (mode) {
        case SurfaceMode::kGaussianFixed:
            return "gaussian_fixed";
        case SurfaceMode::kGaussianOptimized:
            return "gaussian_optimized";
        case SurfaceMode::kCubicOptimized:
            return "cubic_optimized";
    }
    return "unknown";
}

SurfaceMode parse_surface_mode(std::string_view name) {
    for (SurfaceMode m : {SurfaceMode::kGaussianFixed, SurfaceMode::kGaussianOptimized, SurfaceMode::kCubicOptimized}) {
        std::string_view s = surface_mode_name(m);
        if (name == s || (name.size() == s.size() + 6 && name.substr(0, s.size()) == s && name.substr(s.size()) == "_phase")) {
            return m;
        }
    }
    throw Error(ErrorCode::kInvalidConfig, "unknown mode '" + std::string(name) + "'");
}

ErrorVector error_vector_raw(const PhaseSet &phases, const WeightConfig &w) {
    w.validate();
    auto k = kernels::detail::make_scan_consts(scan_params(0, 0, w, 1, false, 0));
    ErrorVector e;
    kernels::detail::phase_error(k, cot(phases.theta3), cot(phases.theta4p), 1, e.ex, e.ey);
    return e;
}

ErrorVector error_vector_gaussian_cot(double b, double d, const WeightConfig &w, double cot4p, const Tolerances &tol) {
    w.validate();
    auto k = kernels::detail::make_scan_consts(scan_params(b, d, w, 1, false, tol.pole));
    double denom = kernels::detail::shared_denominator(k, cot4p);
    if (!(std::fabs(denom) >= tol.pole)) {
        throw_pole(denom);
    }
    ErrorVector e;
    kernels::detail::gaussian_bd_error(k, cot4p, e.ex, e.ey);
    return e;
}

ErrorVector error_vector_gaussian(double b, double d, const WeightConfig &w, double theta4p, const Tolerances &tol) {
    require_angle(theta4p, "theta4p");
    return error_vector_gaussian_cot(b, d, w, cot(theta4p), tol);
}

ErrorVector error_vector_gaussian(
    const SymplecticTarget &target, const WeightConfig &w, double theta4p, const Tolerances &tol) {
    return error_vector_gaussian(target.b, target.d, w, theta4p, tol);
}

ErrorVector error_vector_cubic_cot(const WeightConfig &w, double cot3p, double cot4p, const CubicConfig &cubic) {
    w.validate();
    double gain = cubic_gain(cubic);
    auto k = kernels::detail::make_scan_consts(scan_params(0, 0, w, gain, true, 0));
    ErrorVector e;
    kernels::detail::phase_error(k, cot3p, cot4p, gain, e.ex, e.ey);
    return e;
}

ErrorVector error_vector_cubic(
    const SymplecticTarget &, const WeightConfig &w, double theta3p, double theta4p, const CubicConfig &cubic) {
    require_angle(theta3p, "theta3p");
    require_angle(theta4p, "theta4p");
    return error_vector_cubic_cot(w, cot(theta3p), cot(theta4p), cubic);
}

ErrorVector error_vector_cubic_solved(
    double b, double d, const WeightConfig &w, double cot4p, const CubicConfig &cubic, const Tolerances &tol) {
    w.validate();
    double gain = cubic_gain(cubic);
    auto k = kernels::detail::make_scan_consts(scan_params(b, d, w, gain, true, tol.pole));
    double denom = kernels::detail::shared_denominator(k, cot4p);
    if (!(std::fabs(denom) >= tol.pole)) {
        throw_pole(denom);
    }
    ErrorVector e;
    kernels::detail::phase_error(k, kernels::detail::solved_cot3(k, denom), cot4p, gain, e.ex, e.ey);
    return e;
}

double error_cross_term(const WeightConfig &w, double cot3, double cot4p, double gain) {
    double q = w.g3 / w.g2;
    double m00 = (cot3 * cot4p - 1) / q;
    double m01 = cot4p / q;
    double m10 = -q * cot3;
    double m11 = -q;
    return m00 * m10 / (w.g1 * w.g1) + gain * m01 * m11;
}

std::vector<double> theta4_candidates(const OptimizerOptions &opt) {
    if (!(opt.min_abs_cot > 0) || !(opt.max_abs_cot > opt.min_abs_cot) || opt.per_decade < 1) {
        throw Error(ErrorCode::kInvalidConfig, "optimizer candidate range is empty");
    }
    double lo = std::log10(opt.min_abs_cot);
    double hi = std::log10(opt.max_abs_cot);
    auto steps = static_cast<std::size_t>(std::llround((hi - lo) * opt.per_decade));
    std::vector<double> pos;
    pos.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; i++) {
        pos.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps)));
    }
    std::vector<double> out;
    out.reserve(2 * pos.size() + 1);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        out.push_back(-*it);
    }
    out.push_back(cot(kHalfPi));
    out.insert(out.end(), pos.begin(), pos.end());
    return out;
}

namespace {

std::optional<Theta4Optimum> optimize_with(
    double b,
    double d,
    const WeightConfig &w,
    const std::optional<CubicConfig> &cubic,
    const OptimizerOptions &opt,
    const Tolerances &tol,
    const std::vector<double> &cands,
    std::vector<double> &scratch) {
    double gain = cubic ? cubic_gain(*cubic) : 1.0;
    kernels::ScanParams p = scan_params(b, d, w, gain, cubic.has_value(), tol.pole);
    scratch.resize(cands.size());
    kernels::scan_inf_norm(p, cands.data(), scratch.data(), cands.size());

    std::size_t best = cands.size();
    for (std::size_t i = 0; i < cands.size(); i++) {
        if (!std::isnan(scratch[i]) && (best == cands.size() || scratch[i] < scratch[best])) {
            best = i;
        }
    }
    if (best == cands.size()) {
        return std::nullopt;
    }
    double c_best = cands[best];
    double f_best = scratch[best];

    if (opt.refine) {
        auto k = kernels::detail::make_scan_consts(p);
        auto f = [&](double c) {
            double v = cubic ? kernels::detail::scan_cubic_one(k, c) : kernels::detail::scan_gaussian_one(k, c);
            return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
        };
        double lo = best > 0 ? cands[best - 1] : c_best;
        double hi = best + 1 < cands.size() ? cands[best + 1] : c_best;
        bool pole_inside = d != 0 && [&] {
            double c_pole = -(w.g3 / w.g2) * (w.g3 / w.g2) * b / d;
            return c_pole >= lo && c_pole <= hi;
        }();
        if (!pole_inside && hi > lo) {
            const double inv_phi = (std::sqrt(5.0) - 1) / 2;
            double x1 = hi - inv_phi * (hi - lo);
            double x2 = lo + inv_phi * (hi - lo);
            double f1 = f(x1), f2 = f(x2);
            for (int it = 0; it < opt.refine_iterations; it++) {
                if (f1 < f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = f(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = f(x2);
                }
            }
            double c_ref = f1 < f2 ? x1 : x2;
            double f_ref = std::min(f1, f2);
            if (f_ref < f_best) {
                c_best = c_ref;
                f_best = f_ref;
            }
        }
    }

    Theta4Optimum r;
    r.cot4p = c_best;
    r.theta4p = arccot(c_best);
    r.err = cubic ? error_vector_cubic_solved(b, d, w, c_best, *cubic, tol) : error_vector_gaussian_cot(b, d, w, c_best, tol);
    r.err_inf = inf_norm(r.err);
    return r;
}

}  // namespace

std::optional<Theta4Optimum> optimize_theta4(
    double b,
    double d,
    const WeightConfig &w,
    const std::optional<CubicConfig> &cubic,
    const OptimizerOptions &opt,
    const Tolerances &tol) {
    w.validate();
    std::vector<double> cands = theta4_candidates(opt);
    std::vector<double> scratch;
    return optimize_with(b, d, w, cubic, opt, tol, cands, scratch);
}

std::optional<Theta4Optimum> optimize_theta4(
    const SymplecticTarget &target,
    const WeightConfig &w,
    SurfaceMode mode,
    const std::optional<CubicConfig> &cubic,
    const OptimizerOptions &opt,
    const Tolerances &tol) {
    validate_target(target, tol);
    switch (mode) {
        case SurfaceMode::kGaussianFixed: {
            try {
                Theta4Optimum r;
                r.cot4p = cot(kHalfPi);
                r.err = error_vector_gaussian_cot(target.b, target.d, w, r.cot4p, tol);
                r.err_inf = inf_norm(r.err);
                return r;
            } catch (const Error &e) {
                if (e.code() == ErrorCode::kDenominatorPole) {
                    return std::nullopt;
                }
                throw;
            }
        }
        case SurfaceMode::kGaussianOptimized:
            return optimize_theta4(target.b, target.d, w, std::nullopt, opt, tol);
        case SurfaceMode::kCubicOptimized:
            if (!cubic) {
                throw Error(ErrorCode::kInvalidConfig, "cubic mode needs cubic parameters");
            }
            return optimize_theta4(target.b, target.d, w, cubic, opt, tol);
    }
    return std::nullopt;
}

void ErrorSurfaceSpec::validate() const {
    w.validate();
    if (nb < 1 || nd < 1) {
        throw Error(ErrorCode::kInvalidConfig, "grid counts must be at least 1");
    }
    for (const Range &r : {b_range, d_range}) {
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
            throw Error(ErrorCode::kInvalidConfig, "grid ranges must be finite with lo <= hi");
        }
    }
    bool wants_cubic = mode == SurfaceMode::kCubicOptimized;
    if (wants_cubic != cubic.has_value()) {
        throw Error(ErrorCode::kInvalidConfig, "cubic parameters are required by, and only by, cubic_optimized");
    }
    if (cubic) {
        cubic->validate();
    }
    if (mode == SurfaceMode::kGaussianFixed) {
        require_angle(theta4p, "theta4p");
    }
}

namespace {

double grid_at(const Range &r, std::size_t n, std::size_t i) {
    if (n == 1) {
        return r.lo;
    }
    // Weighted form: exact at both ends and at the midpoint of a symmetric range.
    double k = static_cast<double>(n - 1);
    return (r.lo * (k - static_cast<double>(i)) + r.hi * static_cast<double>(i)) / k;
}

}  // namespace

double ErrorSurfaceSpec::b_at(std::size_t i) const {
    return grid_at(b_range, nb, i);
}

double ErrorSurfaceSpec::d_at(std::size_t j) const {
    return grid_at(d_range, nd, j);
}

std::vector<SurfaceCell> error_surface(const ErrorSurfaceSpec &spec) {
    spec.validate();
    std::vector<SurfaceCell> cells(spec.nb * spec.nd);
    std::vector<double> cands;
    if (spec.mode != SurfaceMode::kGaussianFixed) {
        cands = theta4_candidates(spec.optimizer);
    }
    const double fixed_cot = cot(spec.theta4p);
    parallel_for(cells.size(), spec.nd, [&](std::size_t begin, std::size_t end) {
        std::vector<double> scratch;
        for (std::size_t idx = begin; idx < end; idx++) {
            SurfaceCell &cell = cells[idx];
            cell.b = spec.b_at(idx / spec.nd);
            cell.d = spec.d_at(idx % spec.nd);
            if (std::fabs(cell.b) <= spec.tol.degenerate_d && std::fabs(cell.d) <= spec.tol.degenerate_d) {
                continue;
            }
            if (spec.mode == SurfaceMode::kGaussianFixed) {
                auto k = kernels::detail::make_scan_consts(scan_params(cell.b, cell.d, spec.w, 1, false, spec.tol.pole));
                if (!(std::fabs(kernels::detail::shared_denominator(k, fixed_cot)) >= spec.tol.pole)) {
                    continue;
                }
                cell.err = error_vector_gaussian_cot(cell.b, cell.d, spec.w, fixed_cot, spec.tol);
                cell.theta4p = spec.theta4p;
            } else {
                auto opt = optimize_with(cell.b, cell.d, spec.w, spec.cubic, spec.optimizer, spec.tol, cands, scratch);
                if (!opt) {
                    continue;
                }
                cell.err = opt->err;
                cell.theta4p = opt->theta4p;
            }
            cell.err_inf = inf_norm(*cell.err);
        }
    }, spec.threads);
    return cells;
}

}  // namespace cvcluster
