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

// Acceptance suite. Each criterion prints one PASS/FAIL line with the
// measured quantities; the process exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "seqfisher/diagnostics.hpp"
#include "seqfisher/errors.hpp"
#include "seqfisher/fisher.hpp"
#include "seqfisher/io.hpp"
#include "seqfisher/parallel.hpp"

namespace sf = seqfisher;

namespace {

constexpr double kH = sf::kDefaultFiniteDifferenceStep;
constexpr double kTwoPi = 6.283185307179586;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[1024];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

int threads() {
    return sf::resolve_threads(0);
}

sf::MonteCarloOptions mc_options() {
    sf::MonteCarloOptions o;
    o.threads = threads();
    return o;
}

sf::CurveOptions curve_options() {
    sf::CurveOptions o;
    o.threads = threads();
    return o;
}

sf::ModelSpec heisenberg(int n, double b, double tau) {
    sf::ModelSpec spec;
    spec.family = sf::ModelFamily::heisenberg;
    spec.size = n;
    spec.J = 1.0;
    spec.B = b;
    spec.tau = tau;
    spec.lambda_name = "B";
    return spec;
}

// Least-squares slope of F^(n) over n in [lo, hi].
double slope(const sf::FisherSeries& s, int lo, int hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = hi - lo + 1;
    for (int n = lo; n <= hi; ++n) {
        const double y = s.cumulative[static_cast<std::size_t>(n - 1)];
        sx += n;
        sy += y;
        sxx += static_cast<double>(n) * n;
        sxy += n * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double mean_increment(const sf::FisherSeries& s, int lo, int hi) {
    double acc = 0.0;
    for (int n = lo; n <= hi; ++n) {
        acc += s.increments[static_cast<std::size_t>(n - 1)];
    }
    return acc / (hi - lo + 1);
}

// Block means over consecutive windows and whether they move in `direction`
// (+1 non-decreasing, -1 decreasing) up to twice the combined standard error.
struct Smoothed {
    std::vector<double> mean;
    std::vector<double> err;
    int violations = 0;
    double worst = 0.0;
};

Smoothed smooth(const sf::CurveSeries& c, int window, int direction) {
    Smoothed out;
    for (std::size_t start = 0; start + static_cast<std::size_t>(window) <= c.size();
         start += static_cast<std::size_t>(window)) {
        double m = 0.0, e = 0.0;
        for (int k = 0; k < window; ++k) {
            m += c.y[start + static_cast<std::size_t>(k)];
            // Steps within a trajectory are correlated; averaging the per-step
            // errors bounds the block error from above.
            e += c.y_err[start + static_cast<std::size_t>(k)];
        }
        out.mean.push_back(m / window);
        out.err.push_back(e / window);
    }
    for (std::size_t k = 1; k < out.mean.size(); ++k) {
        const double step = direction * (out.mean[k] - out.mean[k - 1]);
        const double allowance = 2.0 * std::hypot(out.err[k], out.err[k - 1]);
        if (step < -allowance) {
            ++out.violations;
            out.worst = std::max(out.worst, -step);
        }
    }
    return out;
}

// Probe re-prepared in sqrt(l)|0> + sqrt(1 - l)|1> before every measurement:
// i.i.d. Bernoulli(l) outcomes.
sf::SensingSetup bernoulli_setup() {
    auto prepare = [](double l) {
        sf::ComplexVector v(2);
        v << std::sqrt(l), std::sqrt(1.0 - l);
        return sf::Channel::reset(sf::ProbeState::pure(v));
    };
    return {prepare, sf::ProbeState::basis(2, 0), sf::MeasurementScheme::sigma_z(sf::SubsystemLayout::qubits(1), 0),
            "bernoulli"};
}

// ---------------------------------------------------------------------------

// Heisenberg N=4, B=0.05, Jtau=4 series shared by criteria 5, 10 and 11.
const sf::FisherSeries& long_series() {
    static const sf::FisherSeries series =
        sf::mc_fisher(sf::make_setup(heisenberg(4, 0.05, 4.0)), 0.05, kH, 600, 100000, 20260501, mc_options());
    return series;
}

Outcome recursion_identity() {
    Outcome out{true, ""};
    for (double b : {0.05, 0.1}) {
        const auto tree = sf::enumerate_tree(sf::make_setup(heisenberg(4, b, 4.0)), b, kH, 10);
        const auto report = sf::recursion_identity_check(tree);
        const bool ok = report.max_relative_deviation < 1e-5 && report.max_cross_term < 1e-6;
        out.pass = out.pass && ok;
        out.detail += fmt("B=%.2f rel=%.2e cross=%.2e; ", b, report.max_relative_deviation, report.max_cross_term);
    }
    return out;
}

Outcome monte_carlo_convergence() {
    Outcome out{true, ""};
    for (double b : {0.05, 0.1}) {
        const auto setup = sf::make_setup(heisenberg(4, b, 4.0));
        const auto exact = sf::exact_fisher(sf::enumerate_tree(setup, b, kH, 20));
        for (auto [mu, limit] : {std::pair<std::int64_t, double>{10000, 0.05}, {100000, 0.02}}) {
            const auto mc = sf::mc_fisher(setup, b, kH, 20, mu, 77 + static_cast<std::uint64_t>(mu), mc_options());
            double worst = 0.0;
            for (std::size_t n = 0; n < 20; ++n) {
                worst = std::max(worst, std::abs(mc.cumulative[n] - exact.direct[n]) / exact.direct[n]);
            }
            out.pass = out.pass && worst < limit;
            out.detail += fmt("B=%.2f mu=%lld max rel err %.3f%% (< %.0f%%); ", b, static_cast<long long>(mu),
                              100.0 * worst, 100.0 * limit);
        }
    }
    return out;
}

Outcome bernoulli_oracle() {
    constexpr double l = 0.3;
    const double per_step = 1.0 / (l * (1.0 - l));
    const auto setup = bernoulli_setup();
    const auto exact = sf::exact_fisher(sf::enumerate_tree(setup, l, kH, 10, 0.0));
    double exact_worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const double want = n * per_step;
        exact_worst = std::max(exact_worst, std::abs(exact.direct[static_cast<std::size_t>(n - 1)] - want) / want);
    }
    const auto mc = sf::mc_fisher(setup, l, kH, 10, 20000, 31, mc_options());
    int outside = 0;
    for (int n = 0; n < 10; ++n) {
        const auto k = static_cast<std::size_t>(n);
        if (std::abs(mc.increments[k] - per_step) > 3.0 * mc.std_err[k] + 1e-6) {
            ++outside;
        }
    }
    return {exact_worst < 1e-6 && outside == 0,
            fmt("exact max rel err %.2e (< 1e-6); MC increments outside 3 sigma: %d/10", exact_worst, outside)};
}

Outcome reset_additivity() {
    const auto base = sf::make_setup(heisenberg(3, 0.3, 1.0));
    const sf::ProbeState start = sf::ProbeState::basis(8, 3);
    sf::SensingSetup setup = base;
    setup.channel_at = [base, start](double l) {
        return sf::Channel::reset(base.channel_at(l).apply(start));
    };
    const auto exact = sf::exact_fisher(sf::enumerate_tree(setup, 0.3, kH, 10, 0.0));
    const double f1 = exact.direct[0];
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        worst = std::max(worst, std::abs(exact.direct[static_cast<std::size_t>(n - 1)] - n * f1));
    }
    return {f1 > 0.0 && worst < 1e-9, fmt("F(1)=%.6f max |F(n) - n F(1)| = %.2e (< 1e-9)", f1, worst)};
}

Outcome linear_tail() {
    const auto& s = long_series();
    const double wide = slope(s, 400, 600);
    const double narrow = slope(s, 500, 600);
    const double slope_diff = std::abs(wide - narrow) / narrow;
    const double early = mean_increment(s, 1, 10);
    const double onset = std::abs(early - narrow) / narrow;
    return {slope_diff < 0.10 && onset > 0.50,
            fmt("slope[400,600]=%.3f slope[500,600]=%.3f diff %.2f%% (< 10%%); mean dF[1,10]=%.3f vs tail %.3f "
                "differs %.1f%% (> 50%%)",
                wide, narrow, 100.0 * slope_diff, early, narrow, 100.0 * onset)};
}

struct CurveCase {
    const char* name;
    sf::ModelSpec spec;
    int n_seq;
};

std::vector<CurveCase> unitary_cases(int heis_steps, int ising_steps, int haar_steps) {
    sf::ModelSpec heis = heisenberg(6, 0.0, 6.0);
    sf::ModelSpec ising = heis;
    ising.family = sf::ModelFamily::ising;
    ising.B = 1.0;
    sf::ModelSpec haar;
    haar.family = sf::ModelFamily::random_unitary;
    haar.size = 6;
    haar.lambda_name = "";
    haar.unitary_seed = 1;
    return {{"heisenberg", heis, heis_steps}, {"ising", ising, ising_steps}, {"haar", haar, haar_steps}};
}

Outcome memory_loss() {
    Outcome out{true, ""};
    for (const auto& c : unitary_cases(400, 700, 400)) {
        const auto setup = sf::make_setup(c.spec);
        const auto curve = sf::memory_loss_curve(setup, c.spec.lambda(), c.n_seq, 10000, 404, curve_options());
        const auto sm = smooth(curve, 10, +1);
        const double last = curve.y.back();
        const bool ok = last > 0.99 && sm.violations == 0;
        out.pass = out.pass && ok;
        out.detail += fmt("%s n=%d <F>=%.4f decreasing windows %d; ", c.name, c.n_seq, last, sm.violations);
    }
    return out;
}

Outcome rank_collapse() {
    Outcome out{true, ""};
    for (const auto& c : unitary_cases(600, 600, 600)) {
        const auto setup = sf::make_setup(c.spec);
        const auto curve = sf::rank_collapse_curve(setup, c.spec.lambda(), c.n_seq, 60, 505, curve_options());
        const auto sm = smooth(curve, 10, -1);
        const double last = curve.y.back();
        const bool ok = last < 0.05 && sm.violations == 0;
        out.pass = out.pass && ok;
        out.detail += fmt("%s n=%d s2/s1=%.4f increasing windows %d; ", c.name, c.n_seq, last, sm.violations);
    }
    return out;
}

sf::ModelSpec jc(double alpha, int n_max) {
    sf::ModelSpec spec;
    spec.family = sf::ModelFamily::jaynes_cummings;
    spec.size = n_max;
    spec.omega = 1.0;
    spec.Omega = 0.3;
    spec.alpha = alpha;
    spec.tau = kTwoPi;
    spec.lambda_name = "Omega";
    return spec;
}

Outcome jc_increment_bound() {
    Outcome out{true, ""};
    // Central differences with h = 1e-4 carry a relative truncation error of
    // about (4/3) h^2 tau^2 (m + 1), above 1e-6 for m = 4; h = 1e-5 keeps it
    // near 3e-8.
    constexpr double h = 1e-5;
    for (int m : {0, 1, 4}) {
        const auto spec = jc(0.0, 8);
        auto setup = sf::make_setup(spec);
        setup.initial = sf::jc_product_state(true, sf::fock_state(m, 8).vector());
        const auto exact = sf::exact_fisher(sf::enumerate_tree(setup, spec.Omega, h, 6, 0.0));
        const double want = 4.0 * kTwoPi * kTwoPi * (m + 1);
        double worst = 0.0;
        for (double inc : exact.series.increments) {
            worst = std::max(worst, std::abs(inc - want) / want);
        }
        out.pass = out.pass && worst < 1e-6;
        out.detail += fmt("m=%d dF=%.6f (4 tau^2 (m+1)=%.6f) rel %.1e; ", m, exact.series.increments.front(), want,
                          worst);
    }
    constexpr int n_sat = 50;
    const auto spec = jc(2.0, 0);
    const auto s = sf::mc_fisher(sf::make_setup(spec), spec.Omega, kH, 2 * n_sat, 2000, 808, mc_options());
    const double mean = mean_increment(s, n_sat, 2 * n_sat);
    double spread = 0.0;
    for (int n = n_sat; n <= 2 * n_sat; ++n) {
        spread = std::max(spread, std::abs(s.increments[static_cast<std::size_t>(n - 1)] - mean) / mean);
    }
    out.pass = out.pass && spread < 0.15;
    out.detail += fmt("coherent alpha=2 dF over [%d,%d]: mean %.2f max dev %.1f%% (< 15%%)", n_sat, 2 * n_sat, mean,
                      100.0 * spread);
    return out;
}

sf::ComplexMatrix random_density(int dim, std::uint64_t seed) {
    sf::ComplexMatrix rho = sf::ComplexMatrix::Zero(dim, dim);
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double w = 1.0 + k;
        const auto v = sf::random_pure_state(dim, sf::derive_seed(seed, static_cast<std::uint64_t>(k))).vector();
        rho += w * v * v.adjoint();
        total += w;
    }
    return rho / total;
}

Outcome lindblad_validity() {
    Outcome out{true, ""};
    sf::ModelSpec spec = heisenberg(4, 0.0, 1.0);
    spec.family = sf::ModelFamily::lindblad_chain;
    spec.kappa = 0.2;
    spec.n_th = 0.1;
    spec.lambda_name = "kappa";
    const auto layout = spec.layout();
    const auto liouvillian = sf::build_lindblad_superop(sf::hamiltonian(spec), spec.kappa, spec.n_th, layout);
    const auto propagator = sf::lindblad_propagator(liouvillian, spec.tau);
    double worst_generator = 0.0;
    double worst_map = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto rho = random_density(layout.total_dim(), 9000 + k);
        worst_generator = std::max(worst_generator, std::abs(sf::unvec(liouvillian * sf::vec(rho)).trace()));
        worst_map = std::max(worst_map, std::abs(sf::unvec(propagator * sf::vec(rho)).trace() - 1.0));
    }
    const bool trace_ok = worst_generator < 1e-10 && worst_map < 1e-10;
    out.detail += fmt("trace drift: generator %.1e, propagator %.1e (< 1e-10); ", worst_generator, worst_map);

    // Single qubit, H = 0: populations relax to n/(2n+1) at rate kappa (2n+1),
    // coherences at half that rate.
    constexpr double kappa = 0.7, n_th = 0.3;
    const auto one = sf::SubsystemLayout::qubits(1);
    const auto l1 = sf::build_lindblad_superop(sf::ComplexMatrix::Zero(2, 2), kappa, n_th, one);
    const double gamma = kappa * (2.0 * n_th + 1.0);
    const double eq = n_th / (2.0 * n_th + 1.0);
    sf::ComplexMatrix plus = sf::ComplexMatrix::Constant(2, 2, 0.5);
    double worst_damping = 0.0;
    for (double t : {0.1, 0.5, 1.0, 2.5, 7.0}) {
        const auto p = sf::lindblad_propagator(l1, t);
        const sf::ComplexMatrix excited = sf::unvec(p * sf::vec(sf::ProbeState::basis(2, 0).to_density()));
        const sf::ComplexMatrix coherent = sf::unvec(p * sf::vec(plus));
        const double pop = eq + (1.0 - eq) * std::exp(-gamma * t);
        const double pop_plus = eq + (0.5 - eq) * std::exp(-gamma * t);
        const double coh = 0.5 * std::exp(-0.5 * gamma * t);
        worst_damping = std::max({worst_damping, std::abs(excited(0, 0).real() - pop),
                                  std::abs(coherent(0, 0).real() - pop_plus), std::abs(coherent(0, 1) - coh)});
    }
    const bool damping_ok = worst_damping < 1e-8;
    out.detail += fmt("damping max err %.1e (< 1e-8); ", worst_damping);

    const auto s = sf::mc_fisher(sf::make_setup(spec), spec.kappa, kH, 600, 400, 909, mc_options());
    const double wide = slope(s, 400, 600);
    const double narrow = slope(s, 500, 600);
    const double diff = std::abs(wide - narrow) / narrow;
    out.detail += fmt("kappa tail slope[400,600]=%.4f slope[500,600]=%.4f diff %.2f%% (< 10%%)", wide, narrow,
                      100.0 * diff);
    out.pass = trace_ok && damping_ok && diff < 0.10;
    return out;
}

Outcome gain_monotone() {
    std::vector<int> stars;
    std::string detail;
    for (double b : {0.05, 0.1, 0.2}) {
        const sf::FisherSeries s =
            b == 0.05 ? long_series()
                      : sf::mc_fisher(sf::make_setup(heisenberg(4, b, 4.0)), b, kH, 600, 20000, 1010, mc_options());
        const auto g = sf::gain_analysis(s);
        stars.push_back(g.n_star);
        detail += fmt("B=%.2f n*=%d (gain(n*)=%.2f, 0.9 gain(600)=%.2f); ", b, g.n_star,
                      g.gain[static_cast<std::size_t>(g.n_star - 1)], 0.9 * g.gain.back());
    }
    const bool ok = std::is_sorted(stars.begin(), stars.end()) && stars.front() < stars.back();
    return {ok, detail};
}

Outcome time_budget() {
    const auto& s = long_series();
    constexpr double tau = 4.0;
    constexpr double total = 1e6 * tau;
    const auto costly = sf::time_budget_analysis(s, total, 4000.0 * tau, 10.0 * tau, tau);
    int rises = 0;
    for (std::size_t k = 1; k < costly.inverse_fisher.size(); ++k) {
        if (!(costly.inverse_fisher[k] < costly.inverse_fisher[k - 1])) {
            ++rises;
        }
    }
    const auto free_reset = sf::time_budget_analysis(s, total, 0.0, 10.0 * tau, tau);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t k = 0; k < free_reset.n.size(); ++k) {
        if (free_reset.n[k] >= 400) {
            lo = std::min(lo, free_reset.inverse_fisher[k]);
            hi = std::max(hi, free_reset.inverse_fisher[k]);
        }
    }
    const double spread = (hi - lo) / lo;
    const bool covered = costly.n.size() == 600 && free_reset.n.size() == 600;
    return {covered && rises == 0 && spread < 0.10,
            fmt("t_reset=4000tau: %zu points, non-decreasing steps %d; t_reset=0: spread over [400,600] %.2f%% "
                "(< 10%%)",
                costly.n.size(), rises, 100.0 * spread)};
}

Outcome determinism() {
    const char* configs[] = {
        R"({"experiment": "fisher_mc", "model": {"family": "heisenberg", "N": 4, "B": 0.05, "tau": 4},
            "n_seq": 20, "mu_max": 1000, "seed": 7})",
        R"({"experiment": "fisher_exact", "model": {"family": "heisenberg", "N": 4, "B": 0.1, "tau": 4},
            "n_seq": 10})",
        R"({"experiment": "memory_loss", "model": {"family": "ising", "N": 4, "B": 1, "tau": 4},
            "n_seq": 50, "n_traj": 300})",
        R"({"experiment": "rank_collapse", "model": {"family": "random_unitary", "N": 4, "unitary_seed": 2},
            "n_seq": 40, "n_traj": 100})",
        R"({"experiment": "gain", "model": {"family": "heisenberg", "N": 3, "B": 0.2, "tau": 3},
            "n_seq": 60, "mu_max": 300, "gain": {"n_ref": 60}})",
        R"({"experiment": "time_budget", "model": {"family": "lindblad_chain", "N": 2, "kappa": 0.2,
            "n_th": 0.1}, "n_seq": 30, "mu_max": 200, "time_budget": {"T": 10000, "t_reset": 40}})",
        R"({"experiment": "jc_filter", "model": {"family": "jaynes_cummings", "alpha": 2, "Omega": 0.3,
            "tau": 6.283185307179586}, "n_seq": 64, "seed": 3})",
        R"({"experiment": "wigner", "model": {"family": "jaynes_cummings", "alpha": 1.5, "Omega": 0.3,
            "tau": 6.283185307179586}, "n_seq": 16, "wigner": {"points": 61}})",
    };
    int mismatches = 0;
    int checked = 0;
    for (const char* text : configs) {
        auto config = sf::parse_config(text);
        config.threads = 1;
        const auto reference = sf::run(config);
        const std::string csv = sf::to_csv(reference);
        const std::string json = sf::to_json(reference);
        for (int t : {1, 2, 4, 8}) {
            config.threads = t;
            const auto again = sf::run(config);
            mismatches += (sf::to_csv(again) != csv) + (sf::to_json(again) != json);
            checked += 2;
        }
    }
    return {mismatches == 0, fmt("8 experiments x threads {1,2,4,8}: %d/%d outputs differ", mismatches, checked)};
}

}  // namespace

// With arguments, runs only the listed criterion numbers.
int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
        double runtime_limit;  // seconds; 0 means none
    };
    const std::vector<Criterion> criteria = {
        {"recursion identity", recursion_identity, 60.0},
        {"Monte-Carlo convergence", monte_carlo_convergence, 600.0},
        {"Bernoulli oracle", bernoulli_oracle, 0.0},
        {"reset additivity", reset_additivity, 0.0},
        {"linear tail", linear_tail, 3600.0},
        {"memory loss", memory_loss, 0.0},
        {"rank collapse", rank_collapse, 0.0},
        {"JC increment bound", jc_increment_bound, 0.0},
        {"Lindblad validity", lindblad_validity, 0.0},
        {"gain and n*", gain_monotone, 0.0},
        {"time budget", time_budget, 0.0},
        {"determinism", determinism, 0.0},
    };
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
            return 2;
        }
        selected[static_cast<std::size_t>(k - 1)] = true;
    }
    int failures = 0;
    int ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) {
            continue;
        }
        ++ran;
        const auto& c = criteria[i];
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.runtime_limit > 0.0 && seconds >= c.runtime_limit) {
            outcome.pass = false;
            outcome.detail += fmt(" runtime limit %.0fs exceeded;", c.runtime_limit);
        }
        failures += outcome.pass ? 0 : 1;
        std::printf("%s %2zu %-24s [%7.1fs] %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, c.name, seconds,
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
