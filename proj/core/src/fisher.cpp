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
#include "seqfisher/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqfisher/errors.hpp"
#include "seqfisher/parallel.hpp"

namespace seqfisher {

FisherSeries FisherSeries::from_increments(double lambda, double h, std::vector<double> increments,
                                           std::vector<double> std_err) {
    FisherSeries s;
    s.lambda = lambda;
    s.h = h;
    s.increments = std::move(increments);
    s.cumulative.resize(s.increments.size());
    double running = 0.0;
    for (std::size_t n = 0; n < s.increments.size(); ++n) {
        running += s.increments[n];
        s.cumulative[n] = running;
    }
    s.std_err = std_err.empty() ? std::vector<double>(s.increments.size(), 0.0) : std::move(std_err);
    if (s.std_err.size() != s.increments.size()) {
        throw ConfigError("FisherSeries: standard errors do not match the increments");
    }
    return s;
}

double step_fisher_contribution(const StepDistribution& dist, double h) {
    const std::size_t k = dist.p[kCenter].size();
    if (dist.p[kPlus].size() != k || dist.p[kMinus].size() != k) {
        throw ConfigError("step_fisher_contribution: replicas have different outcome sets");
    }
    if (!(h > 0.0)) {
        throw ConfigError("step_fisher_contribution: h must be > 0");
    }
    double f = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        const double p = dist.p[kCenter][g];
        if (p < kFisherProbabilityFloor) {
            continue;
        }
        const double dp = (dist.p[kPlus][g] - dist.p[kMinus][g]) / (2.0 * h);
        f += dp * dp / p;
    }
    return f;
}

// ---------------------------------------------------------------------------

ExactFisher exact_fisher(const TrajectoryTree& tree) {
    const int depth = tree.depth();
    const double h = tree.h;
    ExactFisher out;
    out.direct.resize(static_cast<std::size_t>(depth));
    out.recursive_increments.resize(static_cast<std::size_t>(depth));
    out.cross_terms.resize(static_cast<std::size_t>(depth));
    out.pruned_mass.resize(static_cast<std::size_t>(depth));

    std::vector<double> increments(static_cast<std::size_t>(depth));
    double previous = 0.0;
    for (int n = 1; n <= depth; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        CompensatedSum direct;
        for (const auto& node : tree.levels[static_cast<std::size_t>(n)].nodes) {
            const double s = node.score(h);
            direct.add(node.probability() * s * s);
        }
        CompensatedSum rec;
        CompensatedSum cross;
        for (const auto& node : tree.levels[i].nodes) {
            const double p = node.probability();
            rec.add(p * node.next_fisher);
            cross.add(p * node.score(h) * node.next_score_mean);
        }
        out.direct[i] = direct.value();
        out.recursive_increments[i] = rec.value();
        out.cross_terms[i] = cross.value();
        out.pruned_mass[i] = tree.levels[static_cast<std::size_t>(n)].pruned_mass;
        increments[i] = out.direct[i] - previous;
        previous = out.direct[i];
    }
    out.series = FisherSeries::from_increments(tree.lambda, h, std::move(increments));
    out.approximate = depth > 0 && out.pruned_mass.back() > kApproximateDeficit;
    return out;
}

RecursionReport recursion_identity_check(const TrajectoryTree& tree) {
    const ExactFisher ex = exact_fisher(tree);
    RecursionReport report;
    double prev_direct = 0.0;
    double rec_cumulative = 0.0;
    for (std::size_t i = 0; i < ex.direct.size(); ++i) {
        rec_cumulative += ex.recursive_increments[i];
        const double step = std::abs(ex.direct[i] - (prev_direct + ex.recursive_increments[i]));
        const double diff = std::abs(ex.direct[i] - rec_cumulative);
        const double rel = ex.direct[i] != 0.0 ? diff / std::abs(ex.direct[i]) : diff;
        report.step_deviation.push_back(step);
        report.relative_deviation.push_back(rel);
        report.cross_terms.push_back(ex.cross_terms[i]);
        report.max_step_deviation = std::max(report.max_step_deviation, step);
        report.max_relative_deviation = std::max(report.max_relative_deviation, rel);
        report.max_cross_term = std::max(report.max_cross_term, std::abs(ex.cross_terms[i]));
        prev_direct = ex.direct[i];
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

struct BlockTally {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::int64_t completed = 0;
    std::int64_t aborted = 0;
};

}  // namespace

FisherSeries mc_fisher(const SensingSetup& setup, double lambda, double h, int n_seq, std::int64_t mu_max,
                       std::uint64_t base_seed, const MonteCarloOptions& options) {
    if (mu_max < 1) {
        throw ConfigError("mc_fisher: mu_max must be >= 1");
    }
    if (n_seq < 1) {
        throw ConfigError("mc_fisher: n_seq must be >= 1");
    }
    if (options.block_size == 0) {
        throw ConfigError("mc_fisher: block_size must be >= 1");
    }
    const ChannelTriplet channels = make_channels(setup, lambda, h);
    const auto steps = static_cast<std::size_t>(n_seq);
    const auto total = static_cast<std::size_t>(mu_max);
    const std::size_t blocks = (total + options.block_size - 1) / options.block_size;
    std::vector<BlockTally> tallies(blocks);

    parallel_blocks(blocks, resolve_threads(options.threads), [&](std::size_t b) {
        BlockTally& tally = tallies[b];
        std::vector<CompensatedSum> sum(steps);
        std::vector<CompensatedSum> sum_sq(steps);
        std::vector<double> f(steps);
        StepDistribution dist;
        const std::size_t begin = b * options.block_size;
        const std::size_t end = std::min(total, begin + options.block_size);
        for (std::size_t mu = begin; mu < end; ++mu) {
            Rng rng = make_rng(trajectory_seed(base_seed, mu));
            StateTriplet states(setup.initial);
            bool aborted = false;
            for (std::size_t n = 0; n < steps; ++n) {
                states.evolve(channels);
                states.distribution(setup.scheme, dist);
                f[n] = step_fisher_contribution(dist, h);
                const int g = sample_outcome(dist.p[kCenter], rng);
                const auto k = static_cast<std::size_t>(g);
                if (dist.p[kPlus][k] < kConditionalFloor || dist.p[kMinus][k] < kConditionalFloor) {
                    aborted = true;
                    break;
                }
                states.collapse(setup.scheme, g);
            }
            if (aborted) {
                ++tally.aborted;
                continue;
            }
            ++tally.completed;
            for (std::size_t n = 0; n < steps; ++n) {
                sum[n].add(f[n]);
                sum_sq[n].add(f[n] * f[n]);
            }
        }
        tally.sum.resize(steps);
        tally.sum_sq.resize(steps);
        for (std::size_t n = 0; n < steps; ++n) {
            tally.sum[n] = sum[n].value();
            tally.sum_sq[n] = sum_sq[n].value();
        }
    });

    std::int64_t completed = 0;
    std::int64_t aborted = 0;
    for (const auto& t : tallies) {
        completed += t.completed;
        aborted += t.aborted;
    }
    if (static_cast<double>(aborted) > options.max_aborted_fraction * static_cast<double>(mu_max) ||
        completed == 0) {
        throw NumericalError("mc_fisher: " + std::to_string(aborted) + " of " + std::to_string(mu_max) +
                             " trajectories aborted (budget " +
                             std::to_string(options.max_aborted_fraction * 100.0) + "%)");
    }

    std::vector<double> mean(steps);
    std::vector<double> err(steps);
    const auto m = static_cast<double>(completed);
    for (std::size_t n = 0; n < steps; ++n) {
        CompensatedSum s;
        CompensatedSum sq;
        for (const auto& t : tallies) {
            s.add(t.sum[n]);
            sq.add(t.sum_sq[n]);
        }
        mean[n] = s.value() / m;
        if (completed > 1) {
            const double var = std::max(0.0, (sq.value() - m * mean[n] * mean[n]) / (m - 1.0));
            err[n] = std::sqrt(var / m);
        }
    }
    FisherSeries series = FisherSeries::from_increments(lambda, h, std::move(mean), std::move(err));
    series.mu_max = mu_max;
    series.aborted_count = aborted;
    return series;
}

// ---------------------------------------------------------------------------

GainReport gain_analysis(const FisherSeries& series, int n_ref, double threshold) {
    if (n_ref < 1) {
        throw ConfigError("gain_analysis: n_ref must be >= 1");
    }
    if (!(threshold > 0.0) || threshold > 1.0) {
        throw ConfigError("gain_analysis: threshold must lie in (0, 1]");
    }
    if (series.length() < n_ref) {
        throw ConfigError("gain_analysis: series has " + std::to_string(series.length()) +
                          " steps but the saturation reference is n_ref = " + std::to_string(n_ref) +
                          "; run at least n_ref measurements");
    }
    GainReport report;
    report.n_ref = n_ref;
    report.threshold = threshold;
    report.gain.resize(static_cast<std::size_t>(series.length()));
    for (int n = 1; n <= series.length(); ++n) {
        report.gain[static_cast<std::size_t>(n - 1)] = series.cumulative[static_cast<std::size_t>(n - 1)] / n;
    }
    const double target = threshold * report.gain[static_cast<std::size_t>(n_ref - 1)];
    for (int n = 1; n <= n_ref; ++n) {
        if (report.gain[static_cast<std::size_t>(n - 1)] >= target) {
            report.n_star = n;
            break;
        }
    }
    return report;
}

TimeBudgetReport time_budget_analysis(const FisherSeries& series, double total_time, double t_reset,
                                      double t_meas, double tau) {
    if (!(total_time > 0.0) || !(tau > 0.0) || !(t_meas > 0.0) || t_reset < 0.0) {
        throw ConfigError("time_budget_analysis: times must be positive (t_reset may be zero)");
    }
    if (total_time / (t_reset + t_meas + tau) < 1.0) {
        throw ConfigError("time_budget_analysis: total time T is too short for a single trajectory");
    }
    TimeBudgetReport report;
    report.total_time = total_time;
    report.t_reset = t_reset;
    report.t_meas = t_meas;
    report.tau = tau;
    for (int n = 1; n <= series.length(); ++n) {
        const double m = total_time / (t_reset + n * (t_meas + tau));
        if (m < 1.0) {
            break;
        }
        report.n.push_back(n);
        report.trajectories.push_back(m);
        report.inverse_fisher.push_back(1.0 / (m * series.cumulative[static_cast<std::size_t>(n - 1)]));
    }
    return report;
}

}  // namespace seqfisher
