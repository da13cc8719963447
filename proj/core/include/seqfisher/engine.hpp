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

// Evolve-measure-collapse protocol with synchronized finite-difference
// replicas, trajectory sampling and exact enumeration of the outcome tree.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqfisher/models.hpp"
#include "seqfisher/quantum.hpp"
#include "seqfisher/random.hpp"

namespace seqfisher {

// A side replica below this probability for the sampled outcome aborts the
// trajectory.
inline constexpr double kConditionalFloor = 1e-12;

// Interval map applied between measurements. Unitary channels act on state
// vectors, superoperators on column-stacked density matrices; a reset
// channel re-prepares a fixed state regardless of its input.
class Channel {
  public:
    enum class Kind { identity, unitary, superoperator, reset };

    static Channel identity(int dim, bool on_density = false);
    static Channel unitary(ComplexMatrix u);
    static Channel superoperator(ComplexMatrix s);
    static Channel reset(ProbeState target);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    // True when the channel consumes density matrices.
    bool acts_on_density() const { return on_density_; }
    // Unitary or superoperator matrix.
    const ComplexMatrix& matrix() const;

    ProbeState apply(const ProbeState& state) const;
    void apply(ComplexVector& psi, ComplexVector& scratch) const;
    void apply(ComplexMatrix& rho, ComplexMatrix& scratch) const;

  private:
    Channel() = default;
    Kind kind_ = Kind::identity;
    int dim_ = 0;
    bool on_density_ = false;
    ComplexMatrix matrix_;
    std::optional<ProbeState> target_;
};

// Everything the engine needs about a probe: the interval channel as a
// function of the unknown parameter, the initial state and the measurement.
struct SensingSetup {
    std::function<Channel(double)> channel_at;
    ProbeState initial;
    MeasurementScheme scheme;
    std::string label;
};

// Setup for one of the physical model families. The parameter named by
// spec.lambda_name is varied by channel_at; all other fields stay fixed.
// Hamiltonian spectra are computed once per parameter value.
SensingSetup make_setup(const ModelSpec& spec, const MeasurementScheme& scheme);
SensingSetup make_setup(const ModelSpec& spec);

enum Replica : int { kMinus = 0, kCenter = 1, kPlus = 2 };

using ChannelTriplet = std::array<Channel, 3>;

ChannelTriplet make_channels(const SensingSetup& setup, double lambda, double h);

// Per-outcome probabilities of one measurement at lambda - h, lambda, lambda + h.
struct StepDistribution {
    std::array<std::vector<double>, 3> p;

    int outcome_count() const { return static_cast<int>(p[kCenter].size()); }
};

struct StepOutcome {
    int outcome = 0;
    double prob_center = 0.0;
    double prob_plus = 0.0;
    double prob_minus = 0.0;
    StepDistribution distribution;
};

// One conditioned probe state with its scratch storage.
class ConditionalState {
  public:
    explicit ConditionalState(const ProbeState& state);

    bool is_pure() const { return pure_; }
    int dim() const;
    ProbeState to_state() const;
    const ComplexVector& vector() const { return psi_; }
    const ComplexMatrix& density() const { return rho_; }

    void evolve(const Channel& channel);
    // Unclipped outcome probability.
    double probability(const MeasurementScheme& scheme, int outcome) const;
    // Projects onto `outcome` and renormalizes by the resulting norm.
    // Throws NumericalError when the projected state vanishes.
    void collapse(const MeasurementScheme& scheme, int outcome);

  private:
    bool pure_ = true;
    ComplexVector psi_;
    ComplexMatrix rho_;
    ComplexVector vscratch_;
    ComplexMatrix mscratch_;
};

// Fidelity of two conditioned states (no validation of the representation).
double fidelity(const ConditionalState& a, const ConditionalState& b);

// Three replicas of the probe sharing one outcome history.
class StateTriplet {
  public:
    explicit StateTriplet(const ProbeState& initial);
    StateTriplet(const ProbeState& minus, const ProbeState& center, const ProbeState& plus);

    bool is_pure() const { return replicas_[kCenter].is_pure(); }
    int dim() const { return replicas_[kCenter].dim(); }
    ProbeState state(Replica r) const { return replicas_[r].to_state(); }

    // Applies each replica's channel.
    void evolve(const ChannelTriplet& channels);
    // Outcome probabilities of `scheme`, clipped to [0, 1]. Throws
    // NumericalError when a probability leaves [-1e-9, 1 + 1e-9] or a
    // distribution is not normalized.
    void distribution(const MeasurementScheme& scheme, StepDistribution& out) const;
    // Projects every replica onto `outcome` and renormalizes each by its own
    // probability.
    void collapse(const MeasurementScheme& scheme, int outcome);

  private:
    std::array<ConditionalState, 3> replicas_;
};

// Samples an outcome index from a probability vector.
int sample_outcome(const std::vector<double>& probabilities, Rng& rng);

// One evolve-measure-collapse cycle: evolve all replicas, sample the outcome
// from the center replica, collapse all replicas with the same projector.
// Throws TrajectoryAborted if a side replica gives the sampled outcome
// probability below eps_cond.
StepOutcome protocol_step(StateTriplet& states, const ChannelTriplet& channels,
                          const MeasurementScheme& scheme, Rng& rng, double eps_cond = kConditionalFloor);

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<StepOutcome> steps;

    int length() const { return static_cast<int>(steps.size()); }
    // Product of the center conditional probabilities.
    double joint_probability() const;
    std::vector<int> outcomes() const;
};

TrajectoryRecord sample_trajectory(const SensingSetup& setup, double lambda, double h, int n_seq,
                                   std::uint64_t seed);
// Same, reusing prebuilt channels (the per-trajectory cost in Monte-Carlo runs).
TrajectoryRecord sample_trajectory(const SensingSetup& setup, const ChannelTriplet& channels, int n_seq,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Exact enumeration

inline constexpr double kDefaultPruneThreshold = 1e-12;
inline constexpr std::size_t kDefaultBranchCap = 2'000'000;

struct TreeNode {
    std::int32_t parent = -1;
    std::int32_t outcome = -1;
    // ln P of the history at lambda - h, lambda, lambda + h.
    std::array<double, 3> log_p{0.0, 0.0, 0.0};
    // ln P(lambda + h) - ln P(lambda - h), accumulated step by step.
    double log_ratio = 0.0;
    // Fisher information of the next measurement conditioned on this history
    // (f in the recursion); zero for unexpanded leaves.
    double next_fisher = 0.0;
    // sum over next outcomes of dp / d lambda (= p d ln p / d lambda; vanishes in
    // exact arithmetic).
    double next_score_mean = 0.0;
    bool expanded = false;

    double probability() const;
    double score(double h) const { return log_ratio / (2.0 * h); }
};

struct TreeLevel {
    std::vector<TreeNode> nodes;
    // Center-probability mass pruned at this depth or above.
    double pruned_mass = 0.0;
};

struct TrajectoryTree {
    double lambda = 0.0;
    double h = 0.0;
    double eps_prune = kDefaultPruneThreshold;
    // levels[0] holds the root (empty history).
    std::vector<TreeLevel> levels;

    int depth() const { return static_cast<int>(levels.size()) - 1; }
    std::vector<int> history(int depth, std::size_t index) const;
    // sum of surviving center probabilities at a depth.
    double surviving_mass(int depth) const;
};

// Depth-first expansion of every outcome history up to `depth`. Branches
// whose center joint probability falls below eps_prune are dropped and their
// mass reported. Throws NumericalError when a level exceeds branch_cap.
TrajectoryTree enumerate_tree(const SensingSetup& setup, double lambda, double h, int depth,
                              double eps_prune = kDefaultPruneThreshold,
                              std::size_t branch_cap = kDefaultBranchCap);

// ---------------------------------------------------------------------------
// Paired trajectories and operator accumulation

struct PairedTrajectory {
    std::vector<double> fidelity;
    // Set when state_b gave a sampled outcome probability below 1e-12; the
    // trajectory must then be excluded from averages.
    bool excluded = false;
};

// Outcomes are sampled from state_a; the same projector collapses both
// states, each renormalized by its own probability.
PairedTrajectory paired_trajectory(const SensingSetup& setup, double lambda, const ProbeState& state_a,
                                   const ProbeState& state_b, int n_seq, std::uint64_t seed);

// Same, with the channel built once by the caller.
PairedTrajectory paired_trajectory(const Channel& channel, const MeasurementScheme& scheme,
                                   const ProbeState& state_a, const ProbeState& state_b, int n_seq,
                                   std::uint64_t seed);
// Per-step fidelities along a prescribed outcome sequence.

PairedTrajectory paired_trajectory_forced(const SensingSetup& setup, double lambda, const ProbeState& state_a,
                                          const ProbeState& state_b, const std::vector<int>& outcomes);

struct OperatorAccumulation {
    // Frobenius-normalized product Pi_{gamma_n} U ... Pi_{gamma_1} U.
    ComplexMatrix product;
    // s2/s1 after each step.
    std::vector<double> ratios;
};

OperatorAccumulation accumulate_operator(const ComplexMatrix& step_unitary, const MeasurementScheme& scheme,
                                         const std::vector<int>& outcomes);

}  // namespace seqfisher
