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

// seqfisher command-line entry point.
//
//   seqfisher <experiment> --config run.json [--out path] [--format csv|json]
//                          [--threads N] [--seed U64]
//   seqfisher validate --config run.json
//   seqfisher version

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "seqfisher/errors.hpp"
#include "seqfisher/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

void add_run_flags(CLI::App* sub, Overrides& o) {
    sub->add_option("-c,--config", o.config, "JSON run configuration")->required();
    sub->add_option("-o,--out", o.out, "Output path ('-' for stdout)");
    sub->add_option("-f,--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-t,--threads", o.threads, "Worker threads (0 = automatic)")->check(CLI::NonNegativeNumber);
    sub->add_option("-s,--seed", o.seed, "Base seed");
}

seqfisher::RunConfig apply(const Overrides& o, seqfisher::ExperimentKind kind) {
    seqfisher::RunConfig config = seqfisher::load_config(o.config);
    if (config.experiment != kind) {
        throw seqfisher::ConfigError("config describes experiment '" +
                                     std::string(seqfisher::to_string(config.experiment)) +
                                     "' but the subcommand is '" + std::string(seqfisher::to_string(kind)) + "'");
    }
    if (o.out) {
        config.output_path = *o.out;
    }
    if (o.format) {
        config.format = seqfisher::output_format_from_string(*o.format);
    }
    if (o.threads) {
        config.threads = *o.threads;
    }
    if (o.seed) {
        config.seed = *o.seed;
    }
    config.validate();
    return config;
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const seqfisher::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const seqfisher::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const seqfisher::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential-measurement Fisher information simulator"};
    app.require_subcommand(1);

    std::map<std::string, Overrides> overrides;
    std::map<CLI::App*, seqfisher::ExperimentKind> experiments;
    for (auto kind : seqfisher::all_experiments()) {
        const std::string name(seqfisher::to_string(kind));
        CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        add_run_flags(sub, overrides[name]);
        experiments[sub] = kind;
    }

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Check a configuration and print its canonical form");
    validate->add_option("-c,--config", validate_path, "JSON run configuration")->required();
    CLI::App* version = app.add_subcommand("version", "Print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (version->parsed()) {
        std::cout << "seqfisher " << seqfisher::version() << "\n";
        return kExitOk;
    }
    if (validate->parsed()) {
        return run_guarded([&] {
            const auto config = seqfisher::load_config(validate_path);
            std::cout << seqfisher::canonical_config(config) << "\n";
        });
    }
    for (const auto& [sub, kind] : experiments) {
        if (!sub->parsed()) {
            continue;
        }
        return run_guarded([&, kind = kind] {
            const auto config = apply(overrides[std::string(seqfisher::to_string(kind))], kind);
            const auto envelope = seqfisher::run(config);
            seqfisher::emit(envelope, config.format, config.output_path);
        });
    }
    return kExitConfig;
}
