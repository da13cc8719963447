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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "seqfisher/errors.hpp"
#include "seqfisher/io.hpp"

namespace sf = seqfisher;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"experiment": "fisher_mc", "model": {"family": "heisenberg", "N": 4}})";

std::string heisenberg_mc(int n_seq, int mu) {
    return R"({"experiment": "fisher_mc", "model": {"family": "heisenberg", "N": 4, "B": 0.05, "tau": 4},
               "n_seq": )" +
           std::to_string(n_seq) + R"(, "mu_max": )" + std::to_string(mu) + R"(, "seed": 11})";
}

std::string error_of(const std::string& text) {
    try {
        sf::parse_config(text);
    } catch (const sf::ConfigError& e) {
        return e.what();
    }
    return "";
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / ("seqfisher_test_" + name);
    std::ofstream(path) << content;
    return path;
}

TEST(LoadConfig, MinimalConfigGetsDefaults) {
    const auto c = sf::parse_config(kMinimal);
    EXPECT_EQ(c.experiment, sf::ExperimentKind::fisher_mc);
    EXPECT_EQ(c.h, 1e-4);
    EXPECT_EQ(c.threshold, 0.90);
    EXPECT_EQ(c.n_ref, 600);
    EXPECT_EQ(c.model.lambda_name, "B");
    EXPECT_EQ(c.scheme.site, 3);
    EXPECT_EQ(c.scheme.basis, sf::MeasurementBasis::sigma_z);
}

TEST(LoadConfig, ValidationNamesTheField) {
    const auto err = error_of(R"({"experiment": "fisher_mc",
        "model": {"family": "lindblad_chain", "N": 2, "kappa": -1, "n_th": 0.1}})");
    EXPECT_NE(err.find("kappa"), std::string::npos) << err;
}

TEST(LoadConfig, UnknownKeysAreRejected) {
    EXPECT_NE(error_of(R"({"experiment": "fisher_mc", "foo": 1, "model": {"family": "heisenberg", "N": 2}})")
                  .find("foo"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "fisher_mc", "model": {"family": "heisenberg", "N": 2, "bar": 1}})")
                  .find("model.bar"),
              std::string::npos);
    // Known keys that do not apply to the family or experiment.
    EXPECT_NE(error_of(R"({"experiment": "fisher_mc", "model": {"family": "heisenberg", "N": 2, "Omega": 1}})")
                  .find("Omega"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "fisher_mc", "n_traj": 4, "model": {"family": "heisenberg", "N": 2}})")
                  .find("n_traj"),
              std::string::npos);
}

TEST(LoadConfig, ParseErrorsCarryLineAndColumn) {
    const auto err = error_of("{\n  \"experiment\": \"fisher_mc\",\n  \"model\": {,}\n}");
    EXPECT_NE(err.find("line 3"), std::string::npos) << err;
    EXPECT_NE(err.find("column"), std::string::npos) << err;
}

TEST(LoadConfig, TypeAndRangeErrors) {
    EXPECT_NE(error_of(R"({"experiment": "fisher_mc", "n_seq": "ten", "model": {"family": "heisenberg", "N": 2}})")
                  .find("n_seq"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "fisher_mc", "h": 0, "model": {"family": "heisenberg", "N": 2}})").find("h"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "nope", "model": {"family": "heisenberg", "N": 2}})").find("experiment"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "gain", "n_seq": 50, "model": {"family": "heisenberg", "N": 2}})")
                  .find("n_ref"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"experiment": "jc_filter", "model": {"family": "jaynes_cummings", "alpha": 1}})")
                  .find("omega * tau"),
              std::string::npos);
    EXPECT_THROW(sf::load_config("/nonexistent/config.json"), sf::IoError);
}

TEST(LoadConfig, CanonicalFormIsAFixedPoint) {
    const char* configs[] = {
        kMinimal,
        R"({"experiment": "time_budget", "model": {"family": "heisenberg", "N": 3, "tau": 4},
            "n_seq": 50, "time_budget": {"T": 1e6, "t_reset": 4000}})",
        R"({"experiment": "wigner", "model": {"family": "jaynes_cummings", "alpha": 2, "tau": 6.283185307179586},
            "n_seq": 3})",
        R"({"experiment": "fisher_exact", "model": {"family": "lindblad_chain", "N": 2, "kappa": 0.2, "n_th": 0.1},
            "n_seq": 4})",
    };
    for (const char* text : configs) {
        const auto once = sf::canonical_config(sf::parse_config(text));
        EXPECT_EQ(sf::canonical_config(sf::parse_config(once)), once);
    }
    const auto c = sf::parse_config(configs[1]);
    EXPECT_EQ(c.measurement_time(), 40.0);
}

TEST(Run, RepeatedRunsAreByteIdentical) {
    auto config = sf::parse_config(heisenberg_mc(20, 1000));
    const auto first = sf::to_csv(sf::run(config));
    const auto second = sf::to_csv(sf::run(config));
    EXPECT_EQ(first, second);
    config.threads = 4;
    EXPECT_EQ(sf::to_csv(sf::run(config)), first);
    EXPECT_EQ(sf::to_json(sf::run(config)), [&] {
        config.threads = 1;
        return sf::to_json(sf::run(config));
    }());
}

TEST(Run, BranchCapSurfacesWithHint) {
    const auto config = sf::parse_config(R"({"experiment": "fisher_exact",
        "model": {"family": "heisenberg", "N": 4, "B": 0.05, "tau": 4}, "n_seq": 40,
        "exact": {"branch_cap": 20000}})");
    try {
        sf::run(config);
        FAIL() << "expected NumericalError";
    } catch (const sf::NumericalError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("fisher_exact"), std::string::npos) << what;
        EXPECT_NE(what.find("branch cap"), std::string::npos) << what;
        EXPECT_NE(what.find("reduce n_seq"), std::string::npos) << what;
    }
}

TEST(Run, GainPreconditionFromAnalysis) {
    auto config = sf::parse_config(R"({"experiment": "gain", "model": {"family": "heisenberg", "N": 2},
        "n_seq": 30, "mu_max": 10, "gain": {"n_ref": 30}})");
    config.n_ref = 600;  // bypass load-time validation
    EXPECT_THROW(sf::run(config), sf::ConfigError);
}

TEST(Emit, FisherSeriesCsv) {
    const auto env = sf::run(sf::parse_config(heisenberg_mc(3, 50)));
    const auto rows = lines(sf::to_csv(env));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "n,delta_F,F_cum,std_err");
    // 17 significant digits reproduce the stored doubles exactly.
    const auto& series = std::get<sf::FisherSeries>(env.payload);
    for (int n = 1; n <= 3; ++n) {
        double delta = 0.0;
        double cum = 0.0;
        double err = 0.0;
        int idx = 0;
        ASSERT_EQ(std::sscanf(rows[n].c_str(), "%d,%lf,%lf,%lf", &idx, &delta, &cum, &err), 4);
        EXPECT_EQ(idx, n);
        EXPECT_EQ(delta, series.increments[n - 1]);
        EXPECT_EQ(cum, series.cumulative[n - 1]);
        EXPECT_EQ(err, series.std_err[n - 1]);
    }
}

TEST(Emit, WignerCsv) {
    auto config = sf::parse_config(R"({"experiment": "wigner", "n_seq": 0,
        "model": {"family": "jaynes_cummings", "alpha": 0.5, "n_max": 8, "tau": 6.283185307179586},
        "wigner": {"points": 11, "extent": 7.5}})");
    const auto rows = lines(sf::to_csv(sf::run(config)));
    ASSERT_EQ(rows.size(), 122u);
    EXPECT_EQ(rows[0], "q,p,W");
}

TEST(Emit, JsonRoundTripIsByteIdentical) {
    const auto env = sf::run(sf::parse_config(heisenberg_mc(5, 40)));
    const auto json_text = sf::to_json(env);
    EXPECT_EQ(sf::reemit_json(json_text), json_text);
    const auto doc = nlohmann::json::parse(json_text);
    EXPECT_EQ(doc["payload"]["type"], "fisher_series");
    EXPECT_FALSE(doc.contains("wall_seconds"));
    EXPECT_EQ(doc["config"].dump(2), sf::canonical_config(env.config));
}

TEST(Emit, WritesFilesAndReportsFailures) {
    const auto env = sf::run(sf::parse_config(heisenberg_mc(2, 10)));
    const fs::path out = fs::temp_directory_path() / "seqfisher_test_emit.csv";
    sf::emit(env, sf::OutputFormat::csv, out.string());
    std::ifstream in(out);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(buf.str(), sf::to_csv(env));
    EXPECT_THROW(sf::emit(env, sf::OutputFormat::csv, "/nonexistent/dir/out.csv"), sf::IoError);
}

TEST(Run, EveryExperimentIsDeterministicAcrossThreads) {
    const char* configs[] = {
        R"({"experiment": "fisher_mc", "model": {"family": "ising", "N": 3, "B": 0.4}, "n_seq": 6, "mu_max": 90})",
        R"({"experiment": "fisher_exact", "model": {"family": "heisenberg", "N": 3, "B": 0.2}, "n_seq": 5})",
        R"({"experiment": "memory_loss", "model": {"family": "random_unitary", "N": 3, "unitary_seed": 4},
            "n_seq": 6, "n_traj": 70})",
        R"({"experiment": "rank_collapse", "model": {"family": "heisenberg", "N": 3, "B": 0.3}, "n_seq": 6,
            "n_traj": 70})",
        R"({"experiment": "gain", "model": {"family": "heisenberg", "N": 2, "B": 0.3}, "n_seq": 12, "mu_max": 70,
            "gain": {"n_ref": 10}})",
        R"({"experiment": "time_budget", "model": {"family": "lindblad_chain", "N": 2, "kappa": 0.3, "n_th": 0.2},
            "n_seq": 5, "mu_max": 70, "time_budget": {"T": 1000}})",
        R"({"experiment": "jc_filter", "model": {"family": "jaynes_cummings", "alpha": 1, "tau": 6.283185307179586},
            "n_seq": 10, "jc_filter": {"checkpoints": [3]}})",
        R"({"experiment": "wigner", "model": {"family": "jaynes_cummings", "alpha": 1, "tau": 6.283185307179586},
            "n_seq": 4, "wigner": {"points": 41}})",
    };
    for (const char* text : configs) {
        auto config = sf::parse_config(text);
        config.threads = 1;
        const auto a = sf::run(config);
        config.threads = 3;
        const auto b = sf::run(config);
        EXPECT_EQ(sf::to_csv(a), sf::to_csv(b)) << text;
        EXPECT_EQ(sf::to_json(a), sf::to_json(b)) << text;
    }
}

// Random configs, some invalid: anything the loader accepts must run without
// a configuration error downstream.
TEST(LoadConfig, AcceptedConfigsRunWithoutPreconditionFailures) {
    std::mt19937_64 gen(2024);
    auto pick = [&](std::initializer_list<const char*> v) {
        return *(v.begin() + std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(gen));
    };
    auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };
    auto integer = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
    int accepted = 0;
    for (int trial = 0; trial < 300; ++trial) {
        nlohmann::json j;
        const std::string experiment =
            pick({"fisher_mc", "fisher_exact", "memory_loss", "rank_collapse", "gain", "time_budget", "jc_filter", "wigner"});
        j["experiment"] = experiment;
        const std::string family = pick({"heisenberg", "ising", "lindblad_chain", "jaynes_cummings", "random_unitary"});
        nlohmann::json m{{"family", family}};
        if (family == "jaynes_cummings") {
            m["alpha"] = real(-0.2, 1.5);
            if (integer(0, 1)) {
                m["n_max"] = integer(-1, 12);
            }
            m["tau"] = integer(0, 3) ? 2.0 * M_PI : real(-1.0, 3.0);
            m["Omega"] = real(-0.3, 0.3);
        } else {
            m["N"] = integer(0, 3);
            if (family == "random_unitary") {
                m["unitary_seed"] = integer(0, 100);
            } else {
                m["J"] = real(-0.2, 1.5);
                m["B"] = real(-0.5, 0.5);
                m["tau"] = real(-0.5, 3.0);
                if (family == "lindblad_chain") {
                    m["kappa"] = real(-0.1, 0.5);
                    m["n_th"] = real(-0.1, 0.5);
                    m["lambda"] = pick({"kappa", "B", "n_th", "J", "Omega"});
                }
            }
        }
        j["model"] = m;
        j["n_seq"] = integer(-1, 6);
        if (integer(0, 2) == 0) {
            j["scheme"] = {{"basis", pick({"sigma_z", "sigma_x", "none", "bogus"})}, {"site", integer(-1, 3)}};
        }
        if (experiment == "fisher_mc" || experiment == "gain" || experiment == "time_budget") {
            j["mu_max"] = integer(-2, 20);
        }
        if (experiment == "memory_loss" || experiment == "rank_collapse") {
            j["n_traj"] = integer(-2, 20);
        }
        if (experiment != "fisher_exact" && experiment != "memory_loss" && experiment != "rank_collapse" &&
            experiment != "jc_filter" && experiment != "wigner") {
            j["h"] = real(-1e-4, 2e-4);
        }
        if (experiment == "gain") {
            j["gain"] = {{"n_ref", integer(-1, 6)}, {"threshold", real(-0.1, 1.2)}};
        }
        if (experiment == "time_budget") {
            j["time_budget"] = {{"T", real(-10.0, 500.0)}, {"t_reset", real(-5.0, 50.0)}};
        }
        if (experiment == "jc_filter") {
            j["jc_filter"] = {{"checkpoints", {integer(-1, 7)}}};
        }
        if (experiment == "wigner") {
            j["wigner"] = {{"points", integer(1, 40)}};
        }
        sf::RunConfig config;
        try {
            config = sf::parse_config(j.dump());
        } catch (const sf::ConfigError&) {
            continue;
        }
        ++accepted;
        try {
            sf::run(config);
        } catch (const sf::ConfigError& e) {
            ADD_FAILURE() << "accepted config failed downstream: " << e.what() << "\n" << j.dump();
        } catch (const sf::NumericalError&) {
            // Numerical contracts (aborted budgets, coarse Wigner grids) are runtime outcomes.
        }
    }
    EXPECT_GT(accepted, 20);
}

#ifdef SEQFISHER_CLI_PATH
int cli(const std::string& args) {
    const std::string cmd = std::string(SEQFISHER_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
    const auto good = temp_file("good.json", heisenberg_mc(4, 20));
    const auto bad = temp_file("bad.json", R"({"experiment": "fisher_mc", "model": {"family": "heisenberg", "N": 1}})");
    const auto capped = temp_file("capped.json", R"({"experiment": "fisher_exact",
        "model": {"family": "heisenberg", "N": 4, "B": 0.05, "tau": 4}, "n_seq": 30, "exact": {"branch_cap": 1000}})");
    EXPECT_EQ(cli("version"), 0);
    EXPECT_EQ(cli("validate --config " + good.string()), 0);
    EXPECT_EQ(cli("fisher_mc --config " + good.string() + " --threads 2 --seed 5 --format json"), 0);
    EXPECT_EQ(cli("fisher_mc --config " + bad.string()), 2);
    EXPECT_EQ(cli("memory_loss --config " + good.string()), 2);
    EXPECT_EQ(cli("fisher_mc"), 2);
    EXPECT_EQ(cli("fisher_exact --config " + capped.string()), 3);
    EXPECT_EQ(cli("fisher_mc --config " + good.string() + " --out /nonexistent/dir/x.csv"), 4);
    EXPECT_EQ(cli("fisher_mc --config /nonexistent/config.json"), 4);
}

TEST(Cli, FlagsOverrideConfig) {
    // Heisenberg dynamics from the all-down state is deterministic; Ising is not.
    const std::string text = R"({"experiment": "fisher_mc", "model": {"family": "ising", "N": 3, "B": 0.4},
        "n_seq": 4, "mu_max": 20})";
    const auto good = temp_file("override.json", text);
    const fs::path a = fs::temp_directory_path() / "seqfisher_test_a.csv";
    const fs::path b = fs::temp_directory_path() / "seqfisher_test_b.csv";
    ASSERT_EQ(cli("fisher_mc -c " + good.string() + " -o " + a.string() + " --seed 1"), 0);
    ASSERT_EQ(cli("fisher_mc -c " + good.string() + " -o " + b.string() + " --seed 2"), 0);
    std::stringstream sa, sb;
    sa << std::ifstream(a).rdbuf();
    sb << std::ifstream(b).rdbuf();
    EXPECT_NE(sa.str(), sb.str());
    auto config = sf::parse_config(text);
    config.seed = 1;
    EXPECT_EQ(sa.str(), sf::to_csv(sf::run(config)));
}
#endif

}  // namespace
