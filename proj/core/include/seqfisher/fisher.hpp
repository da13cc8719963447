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
#pragma once

// Fisher information of sequential measurement records: exact sum over
// trajectories, recursive accumulation, Monte-Carlo increments, and the
// resource analyses built on top of them.

#include <cstdint>
#include <vector>

#include "seqfisher/engine.hpp"

namespace seqfisher {

// Outcomes whose center probability is below this contribute nothing to f.
inline constexpr double kFisherProbabilityFloor = 1e-12;
inline constexpr double kDefaultFiniteDifferenceStep = 1e-4;
inline constexpr double kMaxAbortedFraction = 1e-3;
// Exact results with more pruned mass than this are flagged approximate.
inline constexpr double kApproximateDeficit = 1e-6;

struct FisherSeries {
    double lambda = 0.0;
    double h = 0.0;
    // increments[n - 1] = Delta F^(n); cumulative[n - 1] = F^(n). cumulative
    // is the running sum of increments, so F^(n) = F^(n-1) + Delta F^(n)
    // holds exactly for the stored values.
    std::vector<double> increments;
    std::vector<double> cumulative;
    // Monte-Carlo standard error of each increment (zeros on exact paths).
    std::vector<double> std_err;
    std::int64_t mu_max = 0;
    std::int64_t aborted_count = 0;

    int length() const { return static_cast<int>(increments.size()); }

    static FisherSeries from_increments(double lambda, double h, std::vector<double> increments,
                                        std::vector<double> std_err = {});
};

// sum over outcomes of [(p+ - p-)/(2h)]^2 / p at the center value. Throws
// ConfigError when the replicas disagree on the outcome set.
double step_fisher_contribution(const StepDistribution& dist, double h);

struct ExactFisher {
    // Increments are successive differences of the direct trajectory sum;
    // cumulative is their running sum.
    FisherSeries series;
    // direct[n - 1] = F^(n) = sum_gamma P (d ln P / d lambda)^2 over depth-n
    // branches; the other per-depth vectors use the same indexing.
    std::vector<double> direct;
    // Delta F^(n) = sum over depth-(n-1) histories of P * f.
    std::vector<double> recursive_increments;
    // sum over depth-(n-1) histories of P (d ln P) (sum_gamma p d ln p).
    std::vector<double> cross_terms;
    std::vector<double> pruned_mass;
    bool approximate = false;
};

ExactFisher exact_fisher(const TrajectoryTree& tree);

struct RecursionReport {
    // |F_direct^(n) - (F_direct^(n-1) + Delta F_rec^(n))| per depth.
    std::vector<double> step_deviation;
    // |F_direct^(n) - sum_{k<=n} Delta F_rec^(k)| / F_direct^(n) per depth.
    std::vector<double> relative_deviation;
    std::vector<double> cross_terms;
    double max_step_deviation = 0.0;
    double max_relative_deviation = 0.0;
    double max_cross_term = 0.0;
};

RecursionReport recursion_identity_check(const TrajectoryTree& tree);

struct MonteCarloOptions {
    int threads = 1;
    // Trajectories per reduction block. Fixed so sums do not depend on the
    // worker count.
    std::size_t block_size = 64;
    double max_aborted_fraction = kMaxAbortedFraction;
};

// Delta F^(n) ~ (1/mu_max) sum_mu f^(mu, n) along sampled trajectories.
// Aborted trajectories are excluded and counted; more than
// max_aborted_fraction of them fails the run with NumericalError.
FisherSeries mc_fisher(const SensingSetup& setup, double lambda, double h, int n_seq, std::int64_t mu_max,
                       std::uint64_t base_seed, const MonteCarloOptions& options = {});

inline constexpr int kDefaultGainReference = 600;
inline constexpr double kDefaultGainThreshold = 0.90;

struct GainReport {
    // gain[n - 1] = F^(n) / n
    std::vector<double> gain;
    int n_star = 0;
    int n_ref = kDefaultGainReference;
    double threshold = kDefaultGainThreshold;
};

// n_star is the smallest n with gain(n) >= threshold * gain(n_ref).
GainReport gain_analysis(const FisherSeries& series, int n_ref = kDefaultGainReference,
                         double threshold = kDefaultGainThreshold);

struct TimeBudgetReport {
    double total_time = 0.0;
    double t_reset = 0.0;
    double t_meas = 0.0;
    double tau = 0.0;
    std::vector<int> n;
    // M = T / (t_reset + n (t_meas + tau)), kept only while M >= 1.
    std::vector<double> trajectories;
    // 1 / (M F^(n))
    std::vector<double> inverse_fisher;
};

TimeBudgetReport time_budget_analysis(const FisherSeries& series, double total_time, double t_reset,
                                      double t_meas, double tau);

}  // namespace seqfisher
