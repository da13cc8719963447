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
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqfisher/engine.hpp"
#include "seqfisher/errors.hpp"
#include "seqfisher/fisher.hpp"
#include "seqfisher/parallel.hpp"

namespace seqfisher {

double TreeNode::probability() const {
    return std::exp(log_p[kCenter]);
}

std::vector<int> TrajectoryTree::history(int depth, std::size_t index) const {
    if (depth < 0 || depth > this->depth()) {
        throw ConfigError("TrajectoryTree::history: depth out of range");
    }
    std::vector<int> out(static_cast<std::size_t>(depth));
    std::size_t i = index;
    for (int d = depth; d > 0; --d) {
        const TreeNode& node = levels[static_cast<std::size_t>(d)].nodes.at(i);
        out[static_cast<std::size_t>(d - 1)] = node.outcome;
        i = static_cast<std::size_t>(node.parent);
    }
    return out;
}

double TrajectoryTree::surviving_mass(int depth) const {
    CompensatedSum sum;
    for (const auto& node : levels.at(static_cast<std::size_t>(depth)).nodes) {
        sum.add(node.probability());
    }
    return sum.value();
}

namespace {

class TreeBuilder {
  public:
    TreeBuilder(const SensingSetup& setup, const ChannelTriplet& channels, int depth, std::size_t cap,
                TrajectoryTree& tree)
        : scheme_(setup.scheme), channels_(channels), max_depth_(depth), cap_(cap), tree_(tree),
          pruned_at_(static_cast<std::size_t>(depth) + 1, 0.0) {}

    void expand(int depth, std::size_t index, StateTriplet states) {
        if (depth == max_depth_) {
            return;
        }
        states.evolve(channels_);
        StepDistribution dist;
        states.distribution(scheme_, dist);

        const double h = tree_.h;
        const auto level = static_cast<std::size_t>(depth);
        const TreeNode parent = tree_.levels[level].nodes[index];
        {
            TreeNode& node = tree_.levels[level].nodes[index];
            node.next_fisher = step_fisher_contribution(dist, h);
            // p d(ln p) = dp, so the mean score is the central difference of
            // the probabilities themselves.
            double score_mean = 0.0;
            for (int g = 0; g < dist.outcome_count(); ++g) {
                const auto k = static_cast<std::size_t>(g);
                score_mean += (dist.p[kPlus][k] - dist.p[kMinus][k]) / (2.0 * h);
            }
            node.next_score_mean = score_mean;
            node.expanded = true;
        }

        const double parent_p = parent.probability();
        auto& children = tree_.levels[level + 1].nodes;
        for (int g = 0; g < dist.outcome_count(); ++g) {
            const auto k = static_cast<std::size_t>(g);
            const double pc = dist.p[kCenter][k];
            const double pp = dist.p[kPlus][k];
            const double pm = dist.p[kMinus][k];
            const bool degenerate = !(pc > 0.0) || pp < kConditionalFloor || pm < kConditionalFloor;
            const double log_pc = degenerate ? 0.0 : std::log(pc);
            if (degenerate || parent.log_p[kCenter] + log_pc < log_eps_) {
                pruned_at_[level + 1] += parent_p * pc;
                continue;
            }
            TreeNode child;
            child.parent = static_cast<std::int32_t>(index);
            child.outcome = g;
            child.log_p = {parent.log_p[kMinus] + std::log(pm), parent.log_p[kCenter] + log_pc,
                           parent.log_p[kPlus] + std::log(pp)};
            child.log_ratio = parent.log_ratio + (std::log(pp) - std::log(pm));
            if (children.size() >= cap_) {
                throw NumericalError("exact enumeration exceeded the branch cap of " + std::to_string(cap_) +
                                     " surviving histories at depth " + std::to_string(depth + 1) +
                                     "; reduce n_seq, raise eps_prune, or use the Monte-Carlo estimator");
            }
            children.push_back(child);
            if (depth + 1 < max_depth_) {
                StateTriplet next = states;
                next.collapse(scheme_, g);
                expand(depth + 1, children.size() - 1, std::move(next));
            }
        }
    }

    void finish() {
        double cumulative = 0.0;
        for (std::size_t d = 0; d < pruned_at_.size(); ++d) {
            cumulative += pruned_at_[d];
            tree_.levels[d].pruned_mass = cumulative;
        }
    }

    void set_eps(double eps) { log_eps_ = eps > 0.0 ? std::log(eps) : -std::numeric_limits<double>::infinity(); }

  private:
    const MeasurementScheme& scheme_;
    const ChannelTriplet& channels_;
    int max_depth_;
    std::size_t cap_;
    TrajectoryTree& tree_;
    std::vector<double> pruned_at_;
    double log_eps_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

TrajectoryTree enumerate_tree(const SensingSetup& setup, double lambda, double h, int depth, double eps_prune,
                              std::size_t branch_cap) {
    if (depth < 0) {
        throw ConfigError("enumerate_tree: depth must be >= 0");
    }
    if (eps_prune < 0.0 || eps_prune >= 1.0) {
        throw ConfigError("enumerate_tree: eps_prune must lie in [0, 1)");
    }
    TrajectoryTree tree;
    tree.lambda = lambda;
    tree.h = h;
    tree.eps_prune = eps_prune;
    tree.levels.resize(static_cast<std::size_t>(depth) + 1);
    tree.levels[0].nodes.push_back(TreeNode{});

    const ChannelTriplet channels = make_channels(setup, lambda, h);
    TreeBuilder builder(setup, channels, depth, branch_cap, tree);
    builder.set_eps(eps_prune);
    builder.expand(0, 0, StateTriplet(setup.initial));
    builder.finish();
    return tree;
}

}  // namespace seqfisher
