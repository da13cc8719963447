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

#include "seqfisher/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "seqfisher/errors.hpp"
#include "seqfisher/parallel.hpp"
#include "seqfisher/random.hpp"

namespace seqfisher {

namespace {

constexpr std::size_t kCurveBlock = 64;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Averages per-trajectory curves. `fn(t, out)` fills `out` (length n_seq)
// for trajectory t and returns false when the trajectory is excluded.
template <typename Fn>
CurveSeries average_curves(int n_seq, std::int64_t n_traj, const CurveOptions& options, Fn&& fn) {
    const auto steps = static_cast<std::size_t>(n_seq);
    const auto total = static_cast<std::size_t>(n_traj);
    const std::size_t blocks = (total + kCurveBlock - 1) / kCurveBlock;
    struct Tally {
        std::vector<double> sum, sum_sq;
        std::int64_t kept = 0, excluded = 0;
    };
    std::vector<Tally> tallies(blocks);
    parallel_blocks(blocks, resolve_threads(options.threads), [&](std::size_t b) {
        Tally& tally = tallies[b];
        std::vector<CompensatedSum> sum(steps), sum_sq(steps);
        std::vector<double> y(steps);
        const std::size_t end = std::min(total, (b + 1) * kCurveBlock);
        for (std::size_t t = b * kCurveBlock; t < end; ++t) {
            if (!fn(t, y)) {
                ++tally.excluded;
                continue;
            }
            ++tally.kept;
            for (std::size_t n = 0; n < steps; ++n) {
                sum[n].add(y[n]);
                sum_sq[n].add(y[n] * y[n]);
            }
        }
        tally.sum.resize(steps);
        tally.sum_sq.resize(steps);
        for (std::size_t n = 0; n < steps; ++n) {
            tally.sum[n] = sum[n].value();
            tally.sum_sq[n] = sum_sq[n].value();
        }
    });

    CurveSeries curve;
    std::int64_t kept = 0;
    for (const auto& t : tallies) {
        kept += t.kept;
        curve.excluded += t.excluded;
    }
    if (kept == 0 ||
        static_cast<double>(curve.excluded) > options.max_excluded_fraction * static_cast<double>(n_traj)) {
        throw NumericalError(std::to_string(curve.excluded) + " of " + std::to_string(n_traj) +
                             " trajectories excluded (budget " +
                             format_number(options.max_excluded_fraction * 100.0) + "%)");
    }
    const auto m = static_cast<double>(kept);
    curve.x.resize(steps);
    curve.y.resize(steps);
    curve.y_err.assign(steps, 0.0);
    for (std::size_t n = 0; n < steps; ++n) {
        CompensatedSum s, sq;
        for (const auto& t : tallies) {
            s.add(t.sum[n]);
            sq.add(t.sum_sq[n]);
        }
        curve.x[n] = static_cast<double>(n + 1);
        curve.y[n] = s.value() / m;
        if (kept > 1) {
            const double var = std::max(0.0, (sq.value() - m * curve.y[n] * curve.y[n]) / (m - 1.0));
            curve.y_err[n] = std::sqrt(var / m);
        }
    }
    curve.x_label = "n_seq";
    curve.metadata.emplace_back("trajectories", std::to_string(n_traj));
    curve.metadata.emplace_back("excluded", std::to_string(curve.excluded));
    return curve;
}

void check_curve_args(int n_seq, std::int64_t n_traj) {
    if (n_seq < 1) {
        throw ConfigError("n_seq must be >= 1");
    }
    if (n_traj < 1) {
        throw ConfigError("n_traj must be >= 1");
    }
}

std::vector<double> sample_probabilities(const ConditionalState& state, const MeasurementScheme& scheme) {
    std::vector<double> p(static_cast<std::size_t>(scheme.outcome_count()));
    for (int k = 0; k < scheme.outcome_count(); ++k) {
        p[static_cast<std::size_t>(k)] = std::clamp(state.probability(scheme, k), 0.0, 1.0);
    }
    return p;
}

}  // namespace

void CurveSeries::check() const {
    if (y.size() != x.size() || y_err.size() != x.size()) {
        throw NumericalError("CurveSeries: column lengths differ");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw NumericalError("CurveSeries: x is not strictly increasing");
        }
    }
    for (double e : y_err) {
        if (e < 0.0) {
            throw NumericalError("CurveSeries: negative standard error");
        }
    }
}

CurveSeries memory_loss_curve(const SensingSetup& setup, double lambda, int n_seq, std::int64_t n_traj,
                              std::uint64_t seed, const CurveOptions& options) {
    check_curve_args(n_seq, n_traj);
    const Channel channel = setup.channel_at(lambda);
    const int dim = setup.initial.dim();
    CurveSeries curve = average_curves(n_seq, n_traj, options, [&](std::size_t t, std::vector<double>& y) {
        const std::uint64_t ts = trajectory_seed(seed, t);
        const ProbeState a = random_pure_state(dim, derive_seed(ts, 1));
        const ProbeState b = options.identical_states ? a : random_pure_state(dim, derive_seed(ts, 2));
        PairedTrajectory pair = paired_trajectory(channel, setup.scheme, a, b, n_seq, derive_seed(ts, 0));
        if (pair.excluded) {
            return false;
        }
        std::copy(pair.fidelity.begin(), pair.fidelity.end(), y.begin());
        return true;
    });
    curve.y_label = "fidelity";
    curve.metadata.insert(curve.metadata.begin(), {{"model", setup.label}, {"lambda", format_number(lambda)},
                                                   {"seed", std::to_string(seed)}});
    return curve;
}

CurveSeries rank_collapse_curve(const SensingSetup& setup, double lambda, int n_seq, std::int64_t n_traj,
                                std::uint64_t seed, const CurveOptions& options) {
    check_curve_args(n_seq, n_traj);
    const Channel channel = setup.channel_at(lambda);
    if (channel.kind() != Channel::Kind::unitary) {
        throw ConfigError("rank_collapse_curve: requires a unitary evolution");
    }
    const int dim = setup.initial.dim();
    CurveSeries curve = average_curves(n_seq, n_traj, options, [&](std::size_t t, std::vector<double>& y) {
        const std::uint64_t ts = trajectory_seed(seed, t);
        Rng rng = make_rng(derive_seed(ts, 0));
        ConditionalState state(random_pure_state(dim, derive_seed(ts, 1)));
        std::vector<int> outcomes(static_cast<std::size_t>(n_seq));
        for (auto& g : outcomes) {
            state.evolve(channel);
            g = sample_outcome(sample_probabilities(state, setup.scheme), rng);
            state.collapse(setup.scheme, g);
        }
        const OperatorAccumulation acc = accumulate_operator(channel.matrix(), setup.scheme, outcomes);
        std::copy(acc.ratios.begin(), acc.ratios.end(), y.begin());
        return true;
    });
    curve.y_label = "s2_over_s1";
    curve.metadata.insert(curve.metadata.begin(), {{"model", setup.label}, {"lambda", format_number(lambda)},
                                                   {"seed", std::to_string(seed)}});
    return curve;
}

// ---------------------------------------------------------------------------

std::vector<int> filter_checkpoints(int n_seq, const std::vector<int>& extra) {
    if (n_seq < 0) {
        throw ConfigError("filter_checkpoints: n_seq must be >= 0");
    }
    std::vector<int> points{0};
    for (int n = 1; n <= n_seq; n *= 2) {
        points.push_back(n);
        if (n > n_seq / 2) {
            break;
        }
    }
    for (int n : extra) {
        if (n < 0 || n > n_seq) {
            throw ConfigError("filter_checkpoints: checkpoint " + std::to_string(n) + " outside [0, n_seq]");
        }
        points.push_back(n);
    }
    points.push_back(n_seq);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

std::vector<FieldSnapshot> jc_filter_snapshot(const ModelSpec& spec, int n_seq, std::uint64_t seed,
                                              const std::vector<int>& extra_checkpoints,
                                              const ProbeState* initial) {
    if (spec.family != ModelFamily::jaynes_cummings) {
        throw ConfigError("jc_filter_snapshot: requires the jaynes_cummings family");
    }
    const double phase = spec.omega * spec.tau;
    if (std::abs(phase - 2.0 * M_PI) > 1e-9 * 2.0 * M_PI) {
        throw ConfigError("jc_filter_snapshot: requires omega * tau = 2 pi (got " + format_number(phase) + ")");
    }
    const SensingSetup setup = make_setup(spec);
    const SubsystemLayout layout = spec.layout();
    const ProbeState start = initial ? *initial : setup.initial;
    if (start.dim() != layout.total_dim()) {
        throw ConfigError("jc_filter_snapshot: initial state does not match the model");
    }
    const std::vector<int> checkpoints = filter_checkpoints(n_seq, extra_checkpoints);
    const Channel channel = setup.channel_at(spec.lambda());
    Rng rng = make_rng(seed);
    ConditionalState state(start);

    std::vector<FieldSnapshot> out;
    auto snapshot = [&](int n) {
        FieldSnapshot snap;
        snap.n_seq = n;
        snap.field = reduced_density(state.to_state(), 1, layout);
        CurveSeries& d = snap.distribution;
        d.x_label = "m";
        d.y_label = "probability";
        double total = 0.0;
        for (Eigen::Index m = 0; m < snap.field.rows(); ++m) {
            d.x.push_back(static_cast<double>(m));
            d.y.push_back(std::clamp(snap.field(m, m).real(), 0.0, 1.0));
            total += snap.field(m, m).real();
        }
        if (std::abs(total - 1.0) > 1e-10) {
            throw NumericalError("jc_filter_snapshot: field distribution sums to " + format_number(total));
        }
        d.y_err.assign(d.x.size(), 0.0);
        d.metadata = {{"model", setup.label},
                      {"alpha", format_number(spec.alpha)},
                      {"Omega", format_number(spec.Omega)},
                      {"n_seq", std::to_string(n)},
                      {"seed", std::to_string(seed)}};
        out.push_back(std::move(snap));
    };

    std::size_t next = 0;
    if (checkpoints[next] == 0) {
        snapshot(0);
        ++next;
    }
    for (int n = 1; n <= n_seq; ++n) {
        state.evolve(channel);
        const int g = sample_outcome(sample_probabilities(state, setup.scheme), rng);
        state.collapse(setup.scheme, g);
        if (next < checkpoints.size() && checkpoints[next] == n) {
            snapshot(n);
            ++next;
        }
    }
    return out;
}

}  // namespace seqfisher
