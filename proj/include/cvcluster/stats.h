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

#ifndef CVCLUSTER_STATS_H
#define CVCLUSTER_STATS_H

#include <charconv>
#include <cmath>
#include <string>

namespace cvcluster {

/// Streaming central moments up to fourth order; mergeable, so per-block partials can be
/// combined in a fixed order.
struct Moments {
    double n = 0;
    double mean = 0;
    double m2 = 0;
    double m3 = 0;
    double m4 = 0;

    void add(double x) {
        double n1 = n;
        n += 1;
        double delta = x - mean;
        double dn = delta / n;
        double dn2 = dn * dn;
        double term1 = delta * dn * n1;
        mean += dn;
        m4 += term1 * dn2 * (n * n - 3 * n + 3) + 6 * dn2 * m2 - 4 * dn * m3;
        m3 += term1 * dn * (n - 2) - 3 * dn * m2;
        m2 += term1;
    }

    void merge(const Moments &o) {
        if (o.n == 0) {
            return;
        }
        if (n == 0) {
            *this = o;
            return;
        }
        double na = n, nb = o.n, nt = na + nb;
        double d = o.mean - mean, d2 = d * d, d3 = d2 * d, d4 = d2 * d2;
        double m2n = m2 + o.m2 + d2 * na * nb / nt;
        double m3n = m3 + o.m3 + d3 * na * nb * (na - nb) / (nt * nt) + 3 * d * (na * o.m2 - nb * m2) / nt;
        double m4n = m4 + o.m4 + d4 * na * nb * (na * na - na * nb + nb * nb) / (nt * nt * nt) +
                     6 * d2 * (na * na * o.m2 + nb * nb * m2) / (nt * nt) + 4 * d * (na * o.m3 - nb * m3) / nt;
        mean += d * nb / nt;
        m2 = m2n;
        m3 = m3n;
        m4 = m4n;
        n = nt;
    }

    double variance() const {
        return m2 / (n - 1);
    }
    double population_variance() const {
        return m2 / n;
    }
    double kurtosis() const {
        return n * m4 / (m2 * m2);
    }
    /// Standard error of the sample variance from the fourth central moment.
    double variance_se() const {
        double s2 = m2 / n;
        return std::sqrt((m4 / n - s2 * s2) / n);
    }
};

struct CoMoment {
    double n = 0;
    double mean_x = 0;
    double mean_y = 0;
    double c = 0;

    void add(double x, double y) {
        n += 1;
        double dx = x - mean_x;
        mean_x += dx / n;
        mean_y += (y - mean_y) / n;
        c += dx * (y - mean_y);
    }

    void merge(const CoMoment &o) {
        if (o.n == 0) {
            return;
        }
        if (n == 0) {
            *this = o;
            return;
        }
        double nt = n + o.n;
        c += o.c + (o.mean_x - mean_x) * (o.mean_y - mean_y) * n * o.n / nt;
        mean_x += (o.mean_x - mean_x) * o.n / nt;
        mean_y += (o.mean_y - mean_y) * o.n / nt;
        n = nt;
    }

    double covariance() const {
        return c / (n - 1);
    }
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace cvcluster

#endif
