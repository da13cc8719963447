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
#include "seqfisher/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqfisher/errors.hpp"

namespace seqfisher {

namespace {

constexpr double kNormalizationTolerance = 1e-9;

double clip_probability(double p) {
    if (!std::isfinite(p) || p < -kProbabilityExcursion || p > 1.0 + kProbabilityExcursion) {
        throw NumericalError("outcome probability " + std::to_string(p) + " outside [0, 1]");
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------

Channel Channel::identity(int dim, bool on_density) {
    Channel c;
    c.kind_ = Kind::identity;
    c.dim_ = dim;
    c.on_density_ = on_density;
    return c;
}

Channel Channel::unitary(ComplexMatrix u) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw ConfigError("Channel::unitary: matrix must be square");
    }
    if (unitarity_error(u) > kStructureTolerance) {
        throw ConfigError("Channel::unitary: matrix is not unitary");
    }
    Channel c;
    c.kind_ = Kind::unitary;
    c.dim_ = static_cast<int>(u.rows());
    c.matrix_ = std::move(u);
    return c;
}

Channel Channel::superoperator(ComplexMatrix s) {
    if (s.rows() != s.cols() || s.rows() == 0) {
        throw ConfigError("Channel::superoperator: matrix must be square");
    }
    const auto n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
    if (n * n != s.rows()) {
        throw ConfigError("Channel::superoperator: dimension is not a perfect square");
    }
    Channel c;
    c.kind_ = Kind::superoperator;
    c.dim_ = n;
    c.on_density_ = true;
    c.matrix_ = std::move(s);
    return c;
}

Channel Channel::reset(ProbeState target) {
    Channel c;
    c.kind_ = Kind::reset;
    c.dim_ = target.dim();
    c.on_density_ = !target.is_pure();
    c.target_ = std::move(target);
    return c;
}

const ComplexMatrix& Channel::matrix() const {
    if (kind_ != Kind::unitary && kind_ != Kind::superoperator) {
        throw ConfigError("Channel::matrix: channel has no matrix representation");
    }
    return matrix_;
}

ProbeState Channel::apply(const ProbeState& state) const {
    ConditionalState s(state);
    s.evolve(*this);
    return s.to_state();
}

void Channel::apply(ComplexVector& psi, ComplexVector& scratch) const {
    switch (kind_) {
        case Kind::identity: return;
        case Kind::unitary:
            scratch.noalias() = matrix_ * psi;
            psi.swap(scratch);
            return;
        case Kind::reset:
            if (!target_->is_pure()) {
                break;
            }
            psi = target_->vector();
            return;
        case Kind::superoperator: break;
    }
    throw ConfigError("Channel: cannot apply a density-matrix channel to a state vector");
}

void Channel::apply(ComplexMatrix& rho, ComplexMatrix& scratch) const {
    switch (kind_) {
        case Kind::identity: return;
        case Kind::unitary:
            scratch.noalias() = matrix_ * rho;
            rho.noalias() = scratch * matrix_.adjoint();
            return;
        case Kind::superoperator: {
            scratch.resize(rho.rows(), rho.cols());
            Eigen::Map<ComplexVector> out(scratch.data(), scratch.size());
            Eigen::Map<const ComplexVector> in(rho.data(), rho.size());
            out.noalias() = matrix_ * in;
            rho.swap(scratch);
            return;
        }
        case Kind::reset:
            rho = target_->to_density();
            return;
    }
}

// ---------------------------------------------------------------------------

SensingSetup make_setup(const ModelSpec& spec, const MeasurementScheme& scheme) {
    spec.validate();
    if (scheme.layout() != spec.layout()) {
        throw ConfigError("make_setup: measurement layout does not match the model");
    }
    SensingSetup setup{.channel_at = {},
                       .initial = default_initial_state(spec),
                       .scheme = scheme,
                       .label = std::string(to_string(spec.family))};
    switch (spec.family) {
        case ModelFamily::random_unitary: {
            const ComplexMatrix u = haar_random_unitary(spec.layout().total_dim(), spec.unitary_seed);
            setup.channel_at = [u](double) { return Channel::unitary(u); };
            break;
        }
        case ModelFamily::lindblad_chain:
            setup.channel_at = [spec](double lambda) {
                const ModelSpec s = spec.with_parameter(spec.lambda_name, lambda);
                const ComplexMatrix l = build_lindblad_superop(hamiltonian(s), s.kappa, s.n_th, s.layout());
                return Channel::superoperator(lindblad_propagator(l, s.tau));
            };
            break;
        default:
            setup.channel_at = [spec](double lambda) {
                const ModelSpec s =
                    spec.lambda_name.empty() ? spec : spec.with_parameter(spec.lambda_name, lambda);
                return Channel::unitary(unitary_propagator(hamiltonian(s), s.tau));
            };
            break;
    }
    return setup;
}

SensingSetup make_setup(const ModelSpec& spec) {
    return make_setup(spec, default_scheme(spec));
}

ChannelTriplet make_channels(const SensingSetup& setup, double lambda, double h) {
    if (!(h > 0.0)) {
        throw ConfigError("finite-difference step h must be > 0");
    }
    return {setup.channel_at(lambda - h), setup.channel_at(lambda), setup.channel_at(lambda + h)};
}

// ---------------------------------------------------------------------------

ConditionalState::ConditionalState(const ProbeState& state) : pure_(state.is_pure()) {
    if (pure_) {
        psi_ = state.vector();
        vscratch_.resize(psi_.size());
    } else {
        rho_ = state.density();
        mscratch_.resize(rho_.rows(), rho_.cols());
    }
}

int ConditionalState::dim() const {
    return static_cast<int>(pure_ ? psi_.size() : rho_.rows());
}

ProbeState ConditionalState::to_state() const {
    return pure_ ? ProbeState::pure(psi_) : ProbeState::mixed(rho_);
}

void ConditionalState::evolve(const Channel& channel) {
    if (channel.dim() != dim()) {
        throw ConfigError("channel dimension " + std::to_string(channel.dim()) +
                          " does not match state dimension " + std::to_string(dim()));
    }
    if (pure_) {
        if (channel.acts_on_density() && channel.kind() != Channel::Kind::identity) {
            // Promote once; later steps stay on the density-matrix path.
            rho_ = psi_ * psi_.adjoint();
            psi_.resize(0);
            pure_ = false;
            channel.apply(rho_, mscratch_);
            return;
        }
        channel.apply(psi_, vscratch_);
    } else {
        channel.apply(rho_, mscratch_);
    }
}

double ConditionalState::probability(const MeasurementScheme& scheme, int outcome) const {
    return pure_ ? scheme.probability(psi_, outcome) : scheme.probability(rho_, outcome);
}

void ConditionalState::collapse(const MeasurementScheme& scheme, int outcome) {
    if (pure_) {
        scheme.project(psi_, outcome, vscratch_);
        const double norm = psi_.norm();
        if (!(norm > 0.0)) {
            throw NumericalError("collapse onto an outcome of zero probability");
        }
        psi_ /= norm;
    } else {
        scheme.project(rho_, outcome, mscratch_);
        const double tr = rho_.trace().real();
        if (!(tr > 0.0)) {
            throw NumericalError("collapse onto an outcome of zero probability");
        }
        rho_ /= tr;
    }
}

double fidelity(const ConditionalState& a, const ConditionalState& b) {
    if (a.dim() != b.dim()) {
        throw ConfigError("fidelity: dimension mismatch");
    }
    if (a.is_pure() && b.is_pure()) {
        return std::clamp(std::norm(a.vector().dot(b.vector())), 0.0, 1.0);
    }
    return fidelity(a.to_state(), b.to_state());
}

// ---------------------------------------------------------------------------

StateTriplet::StateTriplet(const ProbeState& initial)
    : replicas_{ConditionalState(initial), ConditionalState(initial), ConditionalState(initial)} {}

StateTriplet::StateTriplet(const ProbeState& minus, const ProbeState& center, const ProbeState& plus)
    : replicas_{ConditionalState(minus), ConditionalState(center), ConditionalState(plus)} {
    if (minus.dim() != center.dim() || plus.dim() != center.dim()) {
        throw ConfigError("StateTriplet: replica dimensions differ");
    }
}

void StateTriplet::evolve(const ChannelTriplet& channels) {
    for (int r = 0; r < 3; ++r) {
        replicas_[r].evolve(channels[r]);
    }
}

void StateTriplet::distribution(const MeasurementScheme& scheme, StepDistribution& out) const {
    const int k = scheme.outcome_count();
    for (int r = 0; r < 3; ++r) {
        auto& p = out.p[r];
        p.resize(static_cast<std::size_t>(k));
        double total = 0.0;
        for (int g = 0; g < k; ++g) {
            const double raw = replicas_[r].probability(scheme, g);
            total += raw;
            p[static_cast<std::size_t>(g)] = clip_probability(raw);
        }
        if (std::abs(total - 1.0) > kNormalizationTolerance) {
            throw NumericalError("outcome probabilities sum to " + std::to_string(total));
        }
    }
}

void StateTriplet::collapse(const MeasurementScheme& scheme, int outcome) {
    for (auto& replica : replicas_) {
        replica.collapse(scheme, outcome);
    }
}

// ---------------------------------------------------------------------------

int sample_outcome(const std::vector<double>& probabilities, Rng& rng) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    int last_positive = -1;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        if (probabilities[k] <= 0.0) {
            continue;
        }
        last_positive = static_cast<int>(k);
        cumulative += probabilities[k];
        if (u < cumulative) {
            return last_positive;
        }
    }
    if (last_positive < 0) {
        throw NumericalError("sample_outcome: no outcome has positive probability");
    }
    return last_positive;
}

StepOutcome protocol_step(StateTriplet& states, const ChannelTriplet& channels, const MeasurementScheme& scheme,
                          Rng& rng, double eps_cond) {
    StepOutcome step;
    states.evolve(channels);
    states.distribution(scheme, step.distribution);
    const int g = sample_outcome(step.distribution.p[kCenter], rng);
    const auto idx = static_cast<std::size_t>(g);
    step.outcome = g;
    step.prob_center = step.distribution.p[kCenter][idx];
    step.prob_minus = step.distribution.p[kMinus][idx];
    step.prob_plus = step.distribution.p[kPlus][idx];
    if (!(step.prob_center > 0.0)) {
        throw NumericalError("protocol_step: sampled an outcome with zero center probability");
    }
    if (step.prob_minus < eps_cond || step.prob_plus < eps_cond) {
        throw TrajectoryAborted("sampled outcome has vanishing probability in a finite-difference replica");
    }
    states.collapse(scheme, g);
    return step;
}

double TrajectoryRecord::joint_probability() const {
    double p = 1.0;
    for (const auto& s : steps) {
        p *= s.prob_center;
    }
    return p;
}

std::vector<int> TrajectoryRecord::outcomes() const {
    std::vector<int> out;
    out.reserve(steps.size());
    for (const auto& s : steps) {
        out.push_back(s.outcome);
    }
    return out;
}

TrajectoryRecord sample_trajectory(const SensingSetup& setup, const ChannelTriplet& channels, int n_seq,
                                   std::uint64_t seed) {
    if (n_seq < 1) {
        throw ConfigError("sample_trajectory: n_seq must be >= 1");
    }
    TrajectoryRecord record;
    record.seed = seed;
    record.steps.reserve(static_cast<std::size_t>(n_seq));
    Rng rng = make_rng(seed);
    StateTriplet states(setup.initial);
    for (int n = 0; n < n_seq; ++n) {
        record.steps.push_back(protocol_step(states, channels, setup.scheme, rng));
    }
    return record;
}

TrajectoryRecord sample_trajectory(const SensingSetup& setup, double lambda, double h, int n_seq,
                                   std::uint64_t seed) {
    return sample_trajectory(setup, make_channels(setup, lambda, h), n_seq, seed);
}

// ---------------------------------------------------------------------------

namespace {

PairedTrajectory run_paired(const Channel& channel, const MeasurementScheme& scheme, const ProbeState& state_a,
                            const ProbeState& state_b, int n_seq, Rng* rng, const std::vector<int>* forced) {
    if (state_a.dim() != state_b.dim()) {
        throw ConfigError("paired_trajectory: states have different dimensions");
    }
    ConditionalState a(state_a);
    ConditionalState b(state_b);
    PairedTrajectory out;
    out.fidelity.reserve(static_cast<std::size_t>(n_seq));
    std::vector<double> probs(static_cast<std::size_t>(scheme.outcome_count()));
    for (int n = 0; n < n_seq; ++n) {
        a.evolve(channel);
        b.evolve(channel);
        int g = 0;
        if (forced) {
            g = (*forced)[static_cast<std::size_t>(n)];
            if (g < 0 || g >= scheme.outcome_count()) {
                throw ConfigError("paired_trajectory: outcome index out of range");
            }
            if (a.probability(scheme, g) < kConditionalFloor) {
                out.excluded = true;
                return out;
            }
        } else {
            for (int k = 0; k < scheme.outcome_count(); ++k) {
                probs[static_cast<std::size_t>(k)] = clip_probability(a.probability(scheme, k));
            }
            g = sample_outcome(probs, *rng);
        }
        if (b.probability(scheme, g) < kConditionalFloor) {
            out.excluded = true;
            return out;
        }
        a.collapse(scheme, g);
        b.collapse(scheme, g);
        out.fidelity.push_back(fidelity(a, b));
    }
    return out;
}

}  // namespace

PairedTrajectory paired_trajectory(const SensingSetup& setup, double lambda, const ProbeState& state_a,
                                   const ProbeState& state_b, int n_seq, std::uint64_t seed) {
    if (n_seq < 1) {
        throw ConfigError("paired_trajectory: n_seq must be >= 1");
    }
    Rng rng = make_rng(seed);
    return run_paired(setup.channel_at(lambda), setup.scheme, state_a, state_b, n_seq, &rng, nullptr);
}

PairedTrajectory paired_trajectory(const Channel& channel, const MeasurementScheme& scheme,
                                   const ProbeState& state_a, const ProbeState& state_b, int n_seq,
                                   std::uint64_t seed) {
    if (n_seq < 1) {
        throw ConfigError("paired_trajectory: n_seq must be >= 1");
    }
    Rng rng = make_rng(seed);
    return run_paired(channel, scheme, state_a, state_b, n_seq, &rng, nullptr);
}

PairedTrajectory paired_trajectory_forced(const SensingSetup& setup, double lambda, const ProbeState& state_a,
                                          const ProbeState& state_b, const std::vector<int>& outcomes) {
    return run_paired(setup.channel_at(lambda), setup.scheme, state_a, state_b, static_cast<int>(outcomes.size()),
                      nullptr, &outcomes);
}

namespace {

// Local basis in which every projector of the scheme is diagonal, with the
// outcome owning each basis vector.
struct DiagonalFrame {
    ComplexMatrix basis;
    std::vector<std::vector<Eigen::Index>> rows;
};

DiagonalFrame diagonal_frame(const MeasurementScheme& scheme) {
    const int local_dim = static_cast<int>(scheme.local_projector(0).rows());
    ComplexMatrix labels = ComplexMatrix::Zero(local_dim, local_dim);
    for (int g = 1; g < scheme.outcome_count(); ++g) {
        labels += static_cast<double>(g) * scheme.local_projector(g);
    }
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(labels);
    std::vector<int> owner(static_cast<std::size_t>(local_dim));
    for (int i = 0; i < local_dim; ++i) {
        owner[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(eig.eigenvalues()(i)));
    }
    const SubsystemLayout& layout = scheme.layout();
    DiagonalFrame frame;
    frame.basis = scheme.outcome_count() > 1 ? tensor_embed(eig.eigenvectors(), scheme.site(), layout)
                                             : ComplexMatrix::Identity(scheme.dim(), scheme.dim());
    frame.rows.resize(static_cast<std::size_t>(scheme.outcome_count()));
    const int stride = scheme.outcome_count() > 1 ? layout.stride(scheme.site()) : 1;
    for (int i = 0; i < scheme.dim(); ++i) {
        const int local = scheme.outcome_count() > 1 ? (i / stride) % local_dim : 0;
        frame.rows[static_cast<std::size_t>(owner[static_cast<std::size_t>(local)])].push_back(i);
    }
    return frame;
}

}  // namespace

OperatorAccumulation accumulate_operator(const ComplexMatrix& step_unitary, const MeasurementScheme& scheme,
                                         const std::vector<int>& outcomes) {
    const int dim = scheme.dim();
    if (step_unitary.rows() != dim || step_unitary.cols() != dim) {
        throw ConfigError("accumulate_operator: unitary does not match the measurement layout");
    }
    // Singular values are invariant under the change to the frame where the
    // projectors are row masks, and there only the rows kept by the last
    // projector are nonzero.
    const DiagonalFrame frame = diagonal_frame(scheme);
    const ComplexMatrix u = frame.basis.adjoint() * step_unitary * frame.basis;
    std::vector<Eigen::Index> kept(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        kept[static_cast<std::size_t>(i)] = i;
    }
    ComplexMatrix rows = ComplexMatrix::Identity(dim, dim);

    OperatorAccumulation acc;
    acc.ratios.reserve(outcomes.size());
    for (int g : outcomes) {
        if (g < 0 || g >= scheme.outcome_count()) {
            throw ConfigError("accumulate_operator: outcome index out of range");
        }
        const auto& next_rows = frame.rows[static_cast<std::size_t>(g)];
        ComplexMatrix next = u(next_rows, kept) * rows;
        const double norm = next.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw NumericalError("accumulate_operator: accumulated operator vanished");
        }
        rows = next / norm;
        kept = next_rows;
        acc.ratios.push_back(singular_ratio(rows));
    }
    ComplexMatrix product = ComplexMatrix::Zero(dim, dim);
    product(kept, Eigen::all) = rows;
    acc.product = frame.basis * product * frame.basis.adjoint();
    return acc;
}

}  // namespace seqfisher
