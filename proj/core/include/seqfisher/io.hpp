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

// Run configuration, experiment dispatch and result serialization.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "seqfisher/diagnostics.hpp"
#include "seqfisher/fisher.hpp"
#include "seqfisher/models.hpp"

namespace seqfisher {

std::string_view version();

enum class ExperimentKind { fisher_mc, fisher_exact, memory_loss, rank_collapse, gain, time_budget, jc_filter, wigner };
std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);
const std::vector<ExperimentKind>& all_experiments();

enum class OutputFormat { csv, json };
std::string_view to_string(OutputFormat format);
OutputFormat output_format_from_string(std::string_view name);

// How gain and time_budget obtain their Fisher series.
enum class FisherMethod { mc, exact };

struct SchemeConfig {
    MeasurementBasis basis = MeasurementBasis::sigma_z;
    // Unset selects the model's default site.
    std::optional<int> site;
    // Set when the basis was not given, so the family default applies.
    bool basis_default = true;
};

struct InitialConfig {
    enum class Kind { model_default, fock };
    Kind kind = Kind::model_default;
    // Jaynes-Cummings Fock preparation.
    bool atom_excited = true;
    int fock = 0;
};

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::fisher_mc;
    ModelSpec model;
    SchemeConfig scheme;
    InitialConfig initial;

    double h = kDefaultFiniteDifferenceStep;
    int n_seq = 20;
    std::int64_t mu_max = 1000;
    std::int64_t n_traj = 1000;
    std::uint64_t seed = 0;

    // fisher_exact
    double eps_prune = kDefaultPruneThreshold;
    std::int64_t branch_cap = static_cast<std::int64_t>(kDefaultBranchCap);

    // gain and time_budget
    FisherMethod method = FisherMethod::mc;
    int n_ref = kDefaultGainReference;
    double threshold = kDefaultGainThreshold;
    double total_time = 0.0;
    double t_reset = 0.0;
    // Unset selects 10 tau.
    std::optional<double> t_meas;

    // jc_filter
    std::vector<int> checkpoints;

    // wigner; extent 0 selects sqrt(2 n_max) + 4.
    double grid_extent = 0.0;
    int grid_points = 121;

    // Runtime settings; not part of the canonical echo.
    int threads = 0;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    bool record_timing = false;

    double measurement_time() const { return t_meas.value_or(10.0 * model.tau); }
    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Strict JSON parse: unknown keys, wrong types and keys that do not apply to
// the model family are rejected. Throws ConfigError with line and column on
// malformed text.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
// Deterministic JSON rendering of every result-affecting field, defaults
// filled in.
std::string canonical_config(const RunConfig& config);

struct TreePayload {
    FisherSeries series;
    std::vector<double> recursive_increments;
    std::vector<double> cross_terms;
    std::vector<double> pruned_mass;
    bool approximate = false;
};

struct GainPayload {
    FisherSeries series;
    GainReport report;
};

struct TimeBudgetPayload {
    FisherSeries series;
    TimeBudgetReport report;
};

using Payload = std::variant<FisherSeries, TreePayload, GainPayload, TimeBudgetPayload, CurveSeries,
                             std::vector<FieldSnapshot>, WignerGrid>;

struct ResultEnvelope {
    RunConfig config;
    std::string version;
    double wall_seconds = 0.0;
    Payload payload;
    std::int64_t aborted = 0;
    std::int64_t excluded = 0;
};

SensingSetup make_setup(const RunConfig& config);
ProbeState initial_state(const RunConfig& config);

// Dispatches to the experiment. Module errors are rethrown with the same
// type and the experiment name prefixed.
ResultEnvelope run(const RunConfig& config);

std::string to_csv(const ResultEnvelope& envelope);
std::string to_json(const ResultEnvelope& envelope);
std::string render(const ResultEnvelope& envelope, OutputFormat format);
// Parses JSON text and renders it again in the emitter's layout.
std::string reemit_json(std::string_view text);
// Writes to `path`, or stdout when the path is empty or "-". Throws IoError.
void emit(const ResultEnvelope& envelope, OutputFormat format, const std::string& path);

}  // namespace seqfisher
