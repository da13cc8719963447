// Copyright 2026 The seqfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>

#include "seqfisher/diagnostics.hpp"
#include "seqfisher/errors.hpp"
#include "seqfisher/parallel.hpp"

namespace seqfisher {

namespace {

void check_axis(const std::vector<double>& axis, double extent, const char* name) {
    if (axis.size() < 2) {
        throw ConfigError(std::string("wigner: ") + name + " grid needs at least two points");
    }
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1])) {
            throw ConfigError(std::string("wigner: ") + name + " grid is not strictly increasing");
        }
    }
    constexpr double slack = 1e-12;
    if (axis.front() > -extent + slack || axis.back() < extent - slack) {
        throw ConfigError(std::string("wigner: ") + name + " grid must span at least +-" +
                          std::to_string(extent));
    }
}

double trapezoid_weight(const std::vector<double>& axis, std::size_t i) {
    double w = 0.0;
    if (i > 0) {
        w += 0.5 * (axis[i] - axis[i - 1]);
    }
    if (i + 1 < axis.size()) {
        w += 0.5 * (axis[i + 1] - axis[i]);
    }
    return w;
}

}  // namespace

std::vector<double> wigner_axis(double extent, int points) {
    if (!(extent > 0.0) || points < 2) {
        throw ConfigError("wigner_axis: need extent > 0 and at least two points");
    }
    std::vector<double> axis(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        axis[static_cast<std::size_t>(i)] = -extent + 2.0 * extent * i / (points - 1);
    }
    return axis;
}

double wigner_min_extent(int n_max) {
    return std::sqrt(2.0 * n_max) + 3.0;
}

double WignerGrid::integral() const {
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double wq = trapezoid_weight(q, i);
        for (std::size_t j = 0; j < p.size(); ++j) {
            total += wq * trapezoid_weight(p, j) * values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return total;
}

WignerGrid wigner(const ComplexMatrix& rho, const std::vector<double>& q, const std::vector<double>& p,
                  int threads) {
    if (rho.rows() != rho.cols() || rho.rows() < 1) {
        throw ConfigError("wigner: density matrix must be square and non-empty");
    }
    if (!is_hermitian(rho)) {
        throw ConfigError("wigner: density matrix is not Hermitian");
    }
    const int levels = static_cast<int>(rho.rows());
    const int n_max = levels - 1;
    const double extent = wigner_min_extent(n_max);
    check_axis(q, extent, "q");
    check_axis(p, extent, "p");

    // coef(m, k) = (-1)^m sqrt(m! / (m + k)!), doubled for k > 0.
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(levels, levels);
    for (int k = 0; k < levels; ++k) {
        for (int m = 0; m + k < levels; ++m) {
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            const double ratio = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(m + k + 1.0)));
            coef(m, k) = sign * ratio * (k > 0 ? 2.0 : 1.0);
        }
    }

    WignerGrid grid;
    grid.q = q;
    grid.p = p;
    grid.values.resize(static_cast<Eigen::Index>(q.size()), static_cast<Eigen::Index>(p.size()));

    parallel_blocks(q.size(), threads, [&](std::size_t i) {
        std::vector<double> lag(static_cast<std::size_t>(levels));
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double r2 = q[i] * q[i] + p[j] * p[j];
            const double x = 2.0 * r2;
            const Complex z = std::sqrt(2.0) * Complex(q[i], p[j]);
            Complex zk = 1.0;
            double acc = 0.0;
            for (int k = 0; k < levels; ++k) {
                const int count = levels - k;
                // Generalized Laguerre L_m^k(x) for m < count.
                lag[0] = 1.0;
                if (count > 1) {
                    lag[1] = 1.0 + k - x;
                }
                for (int m = 1; m + 1 < count; ++m) {
                    lag[static_cast<std::size_t>(m + 1)] =
                        ((2.0 * m + 1.0 + k - x) * lag[static_cast<std::size_t>(m)] -
                         (m + k) * lag[static_cast<std::size_t>(m - 1)]) /
                        (m + 1.0);
                }
                for (int m = 0; m < count; ++m) {
                    const Complex term = rho(m, m + k) * zk;
                    acc += coef(m, k) * lag[static_cast<std::size_t>(m)] * term.real();
                }
                zk *= z;
            }
            grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-r2) / M_PI * acc;
        }
    });

    const double norm = grid.integral();
    if (std::abs(norm - 1.0) > kWignerNormTolerance) {
        throw NumericalError("wigner: grid integral " + std::to_string(norm) +
                             " differs from 1; widen or refine the grid");
    }
    return grid;
}

}  // namespace seqfisher
