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

#include <chrono>
#include <string>

#include "seqfisher/errors.hpp"
#include "seqfisher/io.hpp"
#include "seqfisher/parallel.hpp"

namespace seqfisher {

namespace {

template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) {
    const std::string prefix = context + ": ";
    try {
        return fn();
    } catch (const TrajectoryAborted& e) {
        throw TrajectoryAborted(prefix + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const IoError& e) {
        throw IoError(prefix + e.what());
    }
}

FisherSeries compute_series(const RunConfig& c, const SensingSetup& setup, bool exact) {
    const double lambda = c.model.lambda();
    if (exact) {
        const TrajectoryTree tree = enumerate_tree(setup, lambda, c.h, c.n_seq, c.eps_prune,
                                                   static_cast<std::size_t>(c.branch_cap));
        return exact_fisher(tree).series;
    }
    MonteCarloOptions options;
    options.threads = c.threads;
    return mc_fisher(setup, lambda, c.h, c.n_seq, c.mu_max, c.seed, options);
}

Payload dispatch(const RunConfig& c) {
    const SensingSetup setup = make_setup(c);
    const double lambda = c.model.lambda();
    CurveOptions curve_options;
    curve_options.threads = c.threads;
    switch (c.experiment) {
        case ExperimentKind::fisher_mc: return compute_series(c, setup, false);
        case ExperimentKind::fisher_exact: {
            const TrajectoryTree tree = enumerate_tree(setup, lambda, c.h, c.n_seq, c.eps_prune,
                                                       static_cast<std::size_t>(c.branch_cap));
            ExactFisher ex = exact_fisher(tree);
            return TreePayload{std::move(ex.series), std::move(ex.recursive_increments),
                               std::move(ex.cross_terms), std::move(ex.pruned_mass), ex.approximate};
        }
        case ExperimentKind::memory_loss:
            return memory_loss_curve(setup, lambda, c.n_seq, c.n_traj, c.seed, curve_options);
        case ExperimentKind::rank_collapse:
            return rank_collapse_curve(setup, lambda, c.n_seq, c.n_traj, c.seed, curve_options);
        case ExperimentKind::gain: {
            FisherSeries series = compute_series(c, setup, c.method == FisherMethod::exact);
            GainReport report = gain_analysis(series, c.n_ref, c.threshold);
            return GainPayload{std::move(series), std::move(report)};
        }
        case ExperimentKind::time_budget: {
            FisherSeries series = compute_series(c, setup, c.method == FisherMethod::exact);
            TimeBudgetReport report =
                time_budget_analysis(series, c.total_time, c.t_reset, c.measurement_time(), c.model.tau);
            return TimeBudgetPayload{std::move(series), std::move(report)};
        }
        case ExperimentKind::jc_filter: {
            const ProbeState start = initial_state(c);
            return jc_filter_snapshot(c.model, c.n_seq, c.seed, c.checkpoints, &start);
        }
        case ExperimentKind::wigner: {
            const ProbeState start = initial_state(c);
            const auto snaps = jc_filter_snapshot(c.model, c.n_seq, c.seed, {}, &start);
            const auto axis = wigner_axis(c.grid_extent, c.grid_points);
            return wigner(snaps.back().field, axis, axis, resolve_threads(c.threads));
        }
    }
    throw ConfigError("unknown experiment");
}

}  // namespace

ProbeState initial_state(const RunConfig& config) {
    if (config.initial.kind == InitialConfig::Kind::fock) {
        const int n_max = config.model.fock_cutoff();
        return jc_product_state(config.initial.atom_excited, fock_state(config.initial.fock, n_max).vector());
    }
    return default_initial_state(config.model);
}

SensingSetup make_setup(const RunConfig& config) {
    SensingSetup setup =
        make_setup(config.model, make_scheme(config.model, config.scheme.basis, config.scheme.site));
    setup.initial = initial_state(config);
    return setup;
}

ResultEnvelope run(const RunConfig& config) {
    const std::string context(to_string(config.experiment));
    with_context(context, [&] {
        config.validate();
        return 0;
    });
    const auto start = std::chrono::steady_clock::now();
    ResultEnvelope envelope{.config = config,
                            .version = std::string(version()),
                            .wall_seconds = 0.0,
                            .payload = with_context(context, [&] { return dispatch(config); }),
                            .aborted = 0,
                            .excluded = 0};
    envelope.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FisherSeries>) {
                envelope.aborted = p.aborted_count;
            } else if constexpr (std::is_same_v<T, GainPayload> || std::is_same_v<T, TimeBudgetPayload>) {
                envelope.aborted = p.series.aborted_count;
            } else if constexpr (std::is_same_v<T, CurveSeries>) {
                envelope.excluded = p.excluded;
            }
        },
        envelope.payload);
    return envelope;
}

}  // namespace seqfisher
