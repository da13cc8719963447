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

// Memory-loss and rank-collapse curves, photon-number filtering snapshots and
// Wigner functions.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seqfisher/engine.hpp"
#include "seqfisher/models.hpp"

namespace seqfisher {

struct CurveSeries {
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    // Standard errors of y; zeros for deterministic curves.
    std::vector<double> y_err;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::int64_t excluded = 0;

    std::size_t size() const { return x.size(); }
    // Throws NumericalError when x is not strictly increasing or an error is negative.
    void check() const;
};

struct CurveOptions {
    int threads = 1;
    // Largest tolerated fraction of excluded trajectories.
    double max_excluded_fraction = 0.01;
    // Use the same random state for both members of each pair.
    bool identical_states = false;
};

// Mean Uhlmann fidelity between two conditional states that start from
// independent random pure states and follow the same sampled record.
CurveSeries memory_loss_curve(const SensingSetup& setup, double lambda, int n_seq, std::int64_t n_traj,
                              std::uint64_t seed, const CurveOptions& options = {});

// Mean s2/s1 of the accumulated measurement-evolution product. Records are
// sampled from a random pure initial state per trajectory. Requires a
// unitary channel.
CurveSeries rank_collapse_curve(const SensingSetup& setup, double lambda, int n_seq, std::int64_t n_traj,
                                std::uint64_t seed, const CurveOptions& options = {});

struct FieldSnapshot {
    int n_seq = 0;
    // Photon-number distribution with the atom traced out.
    CurveSeries distribution;
    // Reduced field density matrix.
    ComplexMatrix field;
};

// Checkpoints 0, 1, 2, 4, ... up to n_seq, merged with `extra` and n_seq.
std::vector<int> filter_checkpoints(int n_seq, const std::vector<int>& extra = {});

// One Jaynes-Cummings trajectory of the atom measurement; emits the field
// photon-number distribution at each checkpoint.
std::vector<FieldSnapshot> jc_filter_snapshot(const ModelSpec& spec, int n_seq, std::uint64_t seed,
                                              const std::vector<int>& extra_checkpoints = {},
                                              const ProbeState* initial = nullptr);

struct WignerGrid {
    std::vector<double> q;
    std::vector<double> p;
    // values(i, j) = W(q[i], p[j]).
    Eigen::MatrixXd values;

    // Trapezoidal integral of W over the grid.
    double integral() const;
};

inline constexpr double kWignerNormTolerance = 1e-3;

// Uniform grid of `points` values spanning [-extent, extent].
std::vector<double> wigner_axis(double extent, int points);
// Smallest extent accepted for an n_max-photon cutoff.
double wigner_min_extent(int n_max);

// Wigner function of a Fock-basis density matrix, from its Laguerre
// expansion. Throws ConfigError when the grid does not span
// +-(sqrt(2 n_max) + 3) and NumericalError when the grid integral misses 1 by
// more than kWignerNormTolerance.
WignerGrid wigner(const ComplexMatrix& rho, const std::vector<double>& q, const std::vector<double>& p,
                  int threads = 1);

}  // namespace seqfisher
