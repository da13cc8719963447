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

#include <benchmark/benchmark.h>

#include <cstdint>

#include "seqfisher/diagnostics.hpp"
#include "seqfisher/fisher.hpp"
#include "seqfisher/models.hpp"

namespace sf = seqfisher;

namespace {

constexpr double kH = 1e-4;

sf::ModelSpec heisenberg(int n) {
    sf::ModelSpec spec;
    spec.size = n;
    spec.B = 0.05;
    spec.tau = 4.0;
    return spec;
}

sf::ModelSpec lindblad(int n) {
    sf::ModelSpec spec = heisenberg(n);
    spec.family = sf::ModelFamily::lindblad_chain;
    spec.B = 0.0;
    spec.tau = 1.0;
    spec.kappa = 0.2;
    spec.n_th = 0.1;
    spec.lambda_name = "kappa";
    return spec;
}

// One evolve-measure-collapse cycle on three replicas.
void BM_ProtocolStep(benchmark::State& state) {
    const auto spec = heisenberg(static_cast<int>(state.range(0)));
    const auto setup = sf::make_setup(spec);
    const auto channels = sf::make_channels(setup, spec.B, kH);
    sf::StateTriplet states(setup.initial);
    sf::Rng rng = sf::make_rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf::protocol_step(states, channels, setup.scheme, rng));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ProtocolStep)->DenseRange(2, 6, 2);

void BM_LindbladStep(benchmark::State& state) {
    const auto spec = lindblad(static_cast<int>(state.range(0)));
    const auto setup = sf::make_setup(spec);
    const auto channels = sf::make_channels(setup, spec.kappa, kH);
    sf::StateTriplet states(setup.initial);
    sf::Rng rng = sf::make_rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf::protocol_step(states, channels, setup.scheme, rng));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LindbladStep)->DenseRange(2, 4, 1);

void BM_LindbladPropagator(benchmark::State& state) {
    const auto spec = lindblad(static_cast<int>(state.range(0)));
    const auto liouvillian = sf::build_lindblad_superop(sf::hamiltonian(spec), spec.kappa, spec.n_th, spec.layout());
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf::lindblad_propagator(liouvillian, spec.tau));
    }
}
BENCHMARK(BM_LindbladPropagator)->DenseRange(2, 4, 1)->Unit(benchmark::kMillisecond);

void BM_McFisher(benchmark::State& state) {
    const auto spec = heisenberg(4);
    const auto setup = sf::make_setup(spec);
    const auto mu = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf::mc_fisher(setup, spec.B, kH, 20, mu, 7));
    }
    state.SetItemsProcessed(state.iterations() * mu * 20);
}
BENCHMARK(BM_McFisher)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_EnumerateTree(benchmark::State& state) {
    const auto spec = heisenberg(4);
    const auto setup = sf::make_setup(spec);
    const int depth = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const auto tree = sf::enumerate_tree(setup, spec.B, kH, depth);
        benchmark::DoNotOptimize(sf::exact_fisher(tree));
    }
}
BENCHMARK(BM_EnumerateTree)->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);

void BM_RankCollapse(benchmark::State& state) {
    auto spec = heisenberg(static_cast<int>(state.range(0)));
    spec.B = 0.0;
    spec.tau = spec.size;
    const auto setup = sf::make_setup(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf::rank_collapse_curve(setup, 0.0, 100, 4, 3));
    }
}
BENCHMARK(BM_RankCollapse)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Wigner(benchmark::State& state) {
    const int n_max = 26;
    const auto rho = sf::coherent_state(2.0, n_max).to_density();
    const auto axis = sf::wigner_axis(sf::wigner_min_extent(n_max) + 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf::wigner(rho, axis, axis));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Wigner)->Arg(61)->Arg(121)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
