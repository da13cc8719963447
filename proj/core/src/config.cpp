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
#include <array>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "config_json.hpp"
#include "seqfisher/diagnostics.hpp"
#include "seqfisher/errors.hpp"

namespace seqfisher {

using nlohmann::json;

std::string_view version() {
    return SEQFISHER_VERSION;
}

namespace {

constexpr std::array kExperimentNames{"fisher_mc", "fisher_exact", "memory_loss", "rank_collapse",
                                      "gain",      "time_budget",  "jc_filter",   "wigner"};

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class ObjectReader {
  public:
    ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
        if (!object_.is_object()) {
            throw ConfigError("config field '" + name_or_root() + "': expected an object");
        }
    }

    bool has(const std::string& key) const { return object_.contains(key); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        auto it = object_.find(key);
        if (it == object_.end()) {
            return nullptr;
        }
        used_.insert(key);
        return &*it;
    }

    template <typename T>
    bool read(const std::string& key, T& out) {
        const json* v = find(key);
        if (!v) {
            return false;
        }
        convert(*v, key, out);
        return true;
    }

    template <typename T>
    void require(const std::string& key, T& out) {
        if (!read(key, out)) {
            invalid(field(key), "is required");
        }
    }

    ObjectReader child(const std::string& key) {
        const json* v = find(key);
        static const json empty = json::object();
        return ObjectReader(v ? *v : empty, field(key));
    }

    // Rejects keys that were never consumed.
    void finish() const {
        for (auto it = object_.begin(); it != object_.end(); ++it) {
            if (!used_.count(it.key())) {
                invalid(field(it.key()), "unknown key");
            }
        }
    }

    // Rejects a key that is known but does not apply here.
    void forbid(const std::string& key, const std::string& context) {
        if (has(key)) {
            invalid(field(key), "does not apply to " + context);
        }
    }

  private:
    std::string name_or_root() const { return path_.empty() ? "<root>" : path_; }

    void convert(const json& v, const std::string& key, double& out) const {
        if (!v.is_number()) {
            invalid(field(key), "expected a number");
        }
        out = v.get<double>();
        if (!std::isfinite(out)) {
            invalid(field(key), "must be finite");
        }
    }
    void convert(const json& v, const std::string& key, std::int64_t& out) const {
        if (!v.is_number_integer()) {
            invalid(field(key), "expected an integer");
        }
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
            invalid(field(key), "integer out of range");
        }
        out = v.get<std::int64_t>();
    }
    void convert(const json& v, const std::string& key, int& out) const {
        std::int64_t wide = 0;
        convert(v, key, wide);
        if (wide < INT32_MIN || wide > INT32_MAX) {
            invalid(field(key), "integer out of range");
        }
        out = static_cast<int>(wide);
    }
    void convert(const json& v, const std::string& key, std::uint64_t& out) const {
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            invalid(field(key), "expected a non-negative integer");
        }
        out = v.get<std::uint64_t>();
    }
    void convert(const json& v, const std::string& key, bool& out) const {
        if (!v.is_boolean()) {
            invalid(field(key), "expected true or false");
        }
        out = v.get<bool>();
    }
    void convert(const json& v, const std::string& key, std::string& out) const {
        if (!v.is_string()) {
            invalid(field(key), "expected a string");
        }
        out = v.get<std::string>();
    }
    void convert(const json& v, const std::string& key, std::vector<int>& out) const {
        if (!v.is_array()) {
            invalid(field(key), "expected an array of integers");
        }
        out.clear();
        for (const auto& e : v) {
            int x = 0;
            convert(e, key, x);
            out.push_back(x);
        }
    }

    const json& object_;
    std::string path_;
    std::set<std::string> used_;
};

bool is_spin_chain(ModelFamily f) {
    return f == ModelFamily::heisenberg || f == ModelFamily::ising || f == ModelFamily::lindblad_chain;
}

std::vector<std::string> model_keys(ModelFamily f) {
    switch (f) {
        case ModelFamily::heisenberg:
        case ModelFamily::ising: return {"N", "J", "B", "tau", "lambda"};
        case ModelFamily::lindblad_chain: return {"N", "J", "B", "kappa", "n_th", "tau", "lambda"};
        case ModelFamily::jaynes_cummings: return {"n_max", "omega", "Omega", "alpha", "tau", "lambda"};
        case ModelFamily::random_unitary: return {"N", "unitary_seed"};
    }
    return {};
}

std::string default_lambda(ModelFamily f) {
    switch (f) {
        case ModelFamily::heisenberg:
        case ModelFamily::ising: return "B";
        case ModelFamily::lindblad_chain: return "kappa";
        case ModelFamily::jaynes_cummings: return "Omega";
        case ModelFamily::random_unitary: return "";
    }
    return "";
}

ModelSpec parse_model(ObjectReader r) {
    ModelSpec m;
    std::string family;
    r.require("family", family);
    try {
        m.family = model_family_from_string(family);
    } catch (const ConfigError&) {
        invalid(r.field("family"), "unknown model family '" + family + "'");
    }
    const auto keys = model_keys(m.family);
    for (const char* k : {"N", "n_max", "J", "B", "omega", "Omega", "kappa", "n_th", "alpha", "tau", "lambda",
                          "unitary_seed"}) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            r.forbid(k, "family " + family);
        }
    }
    m.lambda_name = default_lambda(m.family);
    if (m.family == ModelFamily::jaynes_cummings) {
        m.size = 0;  // resolved from alpha unless given
        r.read("n_max", m.size);
        r.read("omega", m.omega);
        r.read("Omega", m.Omega);
        r.require("alpha", m.alpha);
    } else {
        r.require("N", m.size);
    }
    if (is_spin_chain(m.family)) {
        r.read("J", m.J);
        r.read("B", m.B);
    }
    if (m.family == ModelFamily::lindblad_chain) {
        r.read("kappa", m.kappa);
        r.read("n_th", m.n_th);
    }
    if (m.family == ModelFamily::random_unitary) {
        r.read("unitary_seed", m.unitary_seed);
    } else {
        r.read("tau", m.tau);
        r.read("lambda", m.lambda_name);
    }
    r.finish();
    try {
        m.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    if (m.family == ModelFamily::jaynes_cummings) {
        m.size = m.fock_cutoff();
    }
    return m;
}

struct ExperimentKeys {
    bool h = false, mu_max = false, n_traj = false, seed = true, exact = false, method = false;
    const char* section = nullptr;
};

ExperimentKeys experiment_keys(ExperimentKind k) {
    ExperimentKeys e;
    switch (k) {
        case ExperimentKind::fisher_mc: e.h = e.mu_max = true; break;
        case ExperimentKind::fisher_exact:
            e.h = e.exact = true;
            e.seed = false;
            break;
        case ExperimentKind::memory_loss:
        case ExperimentKind::rank_collapse: e.n_traj = true; break;
        case ExperimentKind::gain:
            e.h = e.mu_max = e.exact = e.method = true;
            e.section = "gain";
            break;
        case ExperimentKind::time_budget:
            e.h = e.mu_max = e.exact = e.method = true;
            e.section = "time_budget";
            break;
        case ExperimentKind::jc_filter: e.section = "jc_filter"; break;
        case ExperimentKind::wigner: e.section = "wigner"; break;
    }
    return e;
}

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(text.size(), byte == 0 ? 0 : byte - 1);
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    return kExperimentNames[static_cast<std::size_t>(kind)];
}

ExperimentKind experiment_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kExperimentNames.size(); ++i) {
        if (name == kExperimentNames[i]) {
            return static_cast<ExperimentKind>(i);
        }
    }
    throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

const std::vector<ExperimentKind>& all_experiments() {
    static const std::vector<ExperimentKind> kinds = [] {
        std::vector<ExperimentKind> v;
        for (std::size_t i = 0; i < kExperimentNames.size(); ++i) {
            v.push_back(static_cast<ExperimentKind>(i));
        }
        return v;
    }();
    return kinds;
}

std::string_view to_string(OutputFormat format) {
    return format == OutputFormat::csv ? "csv" : "json";
}

OutputFormat output_format_from_string(std::string_view name) {
    if (name == "csv") {
        return OutputFormat::csv;
    }
    if (name == "json") {
        return OutputFormat::json;
    }
    throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    try {
        (void)make_scheme(model, scheme.basis, scheme.site);
    } catch (const ConfigError& e) {
        invalid("scheme", e.what());
    }
    const ExperimentKeys keys = experiment_keys(experiment);
    const bool jc = model.family == ModelFamily::jaynes_cummings;
    const bool allows_zero_steps = experiment == ExperimentKind::jc_filter || experiment == ExperimentKind::wigner;
    if (n_seq < (allows_zero_steps ? 0 : 1)) {
        invalid("n_seq", allows_zero_steps ? "must be >= 0" : "must be >= 1");
    }
    if (keys.h && !(h > 0.0 && h < 1.0)) {
        invalid("h", "finite-difference step must lie in (0, 1)");
    }
    const bool uses_mc = keys.mu_max && !(keys.method && method == FisherMethod::exact);
    if (uses_mc && mu_max < 1) {
        invalid("mu_max", "must be >= 1");
    }
    if (keys.n_traj && n_traj < 1) {
        invalid("n_traj", "must be >= 1");
    }
    if (keys.exact) {
        if (!(eps_prune >= 0.0 && eps_prune < 1.0)) {
            invalid("exact.eps_prune", "must lie in [0, 1)");
        }
        if (branch_cap < 1) {
            invalid("exact.branch_cap", "must be >= 1");
        }
    }
    if (threads < 0) {
        invalid("threads", "must be >= 0 (0 selects automatically)");
    }
    if (initial.kind == InitialConfig::Kind::fock) {
        if (!jc) {
            invalid("initial.kind", "fock preparation needs the jaynes_cummings family");
        }
        if (initial.fock < 0 || initial.fock > model.fock_cutoff()) {
            invalid("initial.fock", "must lie in [0, n_max] with n_max = " + std::to_string(model.fock_cutoff()));
        }
    }
    switch (experiment) {
        case ExperimentKind::gain:
            if (n_ref < 1) {
                invalid("gain.n_ref", "must be >= 1");
            }
            if (!(threshold > 0.0 && threshold <= 1.0)) {
                invalid("gain.threshold", "must lie in (0, 1]");
            }
            if (n_seq < n_ref) {
                invalid("n_seq", "gain_analysis needs n_seq >= n_ref (" + std::to_string(n_ref) + ")");
            }
            break;
        case ExperimentKind::time_budget: {
            if (!(total_time > 0.0)) {
                invalid("time_budget.T", "must be > 0");
            }
            if (t_reset < 0.0) {
                invalid("time_budget.t_reset", "must be >= 0");
            }
            if (!(measurement_time() > 0.0)) {
                invalid("time_budget.t_meas", "must be > 0");
            }
            if (total_time < t_reset + measurement_time() + model.tau) {
                invalid("time_budget.T", "too short for a single one-step trajectory");
            }
            break;
        }
        case ExperimentKind::rank_collapse:
            if (model.family == ModelFamily::lindblad_chain) {
                invalid("model.family", "rank_collapse needs a unitary evolution");
            }
            break;
        case ExperimentKind::jc_filter:
        case ExperimentKind::wigner: {
            if (!jc) {
                invalid("model.family", std::string(to_string(experiment)) + " needs jaynes_cummings");
            }
            const double phase = model.omega * model.tau;
            if (std::abs(phase - 2.0 * M_PI) > 1e-9 * 2.0 * M_PI) {
                invalid("model.tau", "photon-number filtering needs omega * tau = 2 pi");
            }
            for (int c : checkpoints) {
                if (c < 0 || c > n_seq) {
                    invalid("jc_filter.checkpoints", "entries must lie in [0, n_seq]");
                }
            }
            if (experiment == ExperimentKind::wigner) {
                if (grid_points < 2) {
                    invalid("wigner.points", "must be >= 2");
                }
                if (grid_extent < wigner_min_extent(model.fock_cutoff())) {
                    invalid("wigner.extent", "must be >= sqrt(2 n_max) + 3 = " +
                                                 std::to_string(wigner_min_extent(model.fock_cutoff())));
                }
            }
            break;
        }
        default: break;
    }
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::string what = e.what();
        // Drop the library's own position prefix; ours carries line and column.
        const auto pos = what.find(": ", what.find("parse error"));
        throw ConfigError("config parse error at " + line_column(text, e.byte) + ": " +
                          (pos == std::string::npos ? what : what.substr(pos + 2)));
    }
    ObjectReader root(doc, "");
    RunConfig c;
    std::string kind;
    root.require("experiment", kind);
    try {
        c.experiment = experiment_from_string(kind);
    } catch (const ConfigError& e) {
        invalid("experiment", e.what());
    }
    if (!root.has("model")) {
        invalid("model", "is required");
    }
    c.model = parse_model(root.child("model"));

    if (root.has("scheme")) {
        ObjectReader s = root.child("scheme");
        std::string basis;
        if (s.read("basis", basis)) {
            if (basis == "sigma_z") {
                c.scheme.basis = MeasurementBasis::sigma_z;
            } else if (basis == "sigma_x") {
                c.scheme.basis = MeasurementBasis::sigma_x;
            } else if (basis == "none") {
                c.scheme.basis = MeasurementBasis::none;
            } else {
                invalid("scheme.basis", "expected sigma_z, sigma_x or none");
            }
            c.scheme.basis_default = false;
        }
        int site = 0;
        if (s.read("site", site)) {
            c.scheme.site = site;
        }
        s.finish();
    }
    if (c.scheme.basis_default) {
        c.scheme.basis = default_scheme(c.model).basis();
        c.scheme.basis_default = false;
    }
    if (!c.scheme.site) {
        c.scheme.site = make_scheme(c.model, c.scheme.basis, std::nullopt).site();
    }

    if (root.has("initial")) {
        ObjectReader s = root.child("initial");
        std::string ik = "default";
        s.read("kind", ik);
        if (ik == "fock") {
            c.initial.kind = InitialConfig::Kind::fock;
            std::string atom = "e";
            s.read("atom", atom);
            if (atom != "e" && atom != "g") {
                invalid("initial.atom", "expected \"e\" or \"g\"");
            }
            c.initial.atom_excited = atom == "e";
            s.require("fock", c.initial.fock);
        } else if (ik != "default") {
            invalid("initial.kind", "expected default or fock");
        }
        s.finish();
    }

    const ExperimentKeys keys = experiment_keys(c.experiment);
    auto gated = [&](bool allowed, const std::string& key, auto& out) {
        if (!allowed) {
            root.forbid(key, "experiment " + kind);
            return;
        }
        root.read(key, out);
    };
    root.read("n_seq", c.n_seq);
    gated(keys.h, "h", c.h);
    gated(keys.mu_max, "mu_max", c.mu_max);
    gated(keys.n_traj, "n_traj", c.n_traj);
    gated(keys.seed, "seed", c.seed);
    root.read("threads", c.threads);
    root.read("timing", c.record_timing);

    if (keys.method) {
        std::string method = "mc";
        root.read("method", method);
        if (method != "mc" && method != "exact") {
            invalid("method", "expected mc or exact");
        }
        c.method = method == "exact" ? FisherMethod::exact : FisherMethod::mc;
    } else {
        root.forbid("method", "experiment " + kind);
    }
    if (keys.exact) {
        if (root.has("exact")) {
            ObjectReader s = root.child("exact");
            s.read("eps_prune", c.eps_prune);
            s.read("branch_cap", c.branch_cap);
            s.finish();
        }
    } else {
        root.forbid("exact", "experiment " + kind);
    }
    for (const char* section : {"gain", "time_budget", "jc_filter", "wigner"}) {
        if (!keys.section || std::string(section) != keys.section) {
            root.forbid(section, "experiment " + kind);
        }
    }
    if (keys.section && root.has(keys.section)) {
        ObjectReader s = root.child(keys.section);
        switch (c.experiment) {
            case ExperimentKind::gain:
                s.read("n_ref", c.n_ref);
                s.read("threshold", c.threshold);
                break;
            case ExperimentKind::time_budget: {
                s.require("T", c.total_time);
                s.read("t_reset", c.t_reset);
                double t = 0.0;
                if (s.read("t_meas", t)) {
                    c.t_meas = t;
                }
                break;
            }
            case ExperimentKind::jc_filter: s.read("checkpoints", c.checkpoints); break;
            case ExperimentKind::wigner:
                s.read("extent", c.grid_extent);
                s.read("points", c.grid_points);
                break;
            default: break;
        }
        s.finish();
    } else if (c.experiment == ExperimentKind::time_budget) {
        invalid("time_budget.T", "is required");
    }
    if (c.experiment == ExperimentKind::time_budget && !c.t_meas) {
        c.t_meas = 10.0 * c.model.tau;
    }
    if (c.experiment == ExperimentKind::wigner && c.grid_extent == 0.0) {
        c.grid_extent = wigner_min_extent(c.model.fock_cutoff()) + 1.0;
    }
    if (c.experiment == ExperimentKind::jc_filter) {
        std::sort(c.checkpoints.begin(), c.checkpoints.end());
        c.checkpoints.erase(std::unique(c.checkpoints.begin(), c.checkpoints.end()), c.checkpoints.end());
    }

    if (root.has("output")) {
        ObjectReader s = root.child("output");
        s.read("path", c.output_path);
        std::string format;
        if (s.read("format", format)) {
            try {
                c.format = output_format_from_string(format);
            } catch (const ConfigError& e) {
                invalid("output.format", e.what());
            }
        }
        s.finish();
    }
    root.finish();
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading config file '" + path + "'");
    }
    return parse_config(buf.str());
}

namespace detail {

json config_to_json(const RunConfig& c) {
    json model;
    const ModelSpec& m = c.model;
    model["family"] = std::string(to_string(m.family));
    for (const auto& key : model_keys(m.family)) {
        if (key == "N" || key == "n_max") {
            model[key] = m.size;
        } else if (key == "lambda") {
            model[key] = m.lambda_name;
        } else if (key == "unitary_seed") {
            model[key] = m.unitary_seed;
        } else if (key == "alpha") {
            model[key] = m.alpha;
        } else if (key == "tau") {
            model[key] = m.tau;
        } else {
            model[key] = m.parameter(key);
        }
    }
    json j;
    j["experiment"] = std::string(to_string(c.experiment));
    j["model"] = model;
    j["scheme"] = {{"basis", std::string(to_string(c.scheme.basis))},
                   {"site", make_scheme(m, c.scheme.basis, c.scheme.site).site()}};
    if (c.initial.kind == InitialConfig::Kind::fock) {
        j["initial"] = {{"kind", "fock"}, {"atom", c.initial.atom_excited ? "e" : "g"}, {"fock", c.initial.fock}};
    } else {
        j["initial"] = {{"kind", "default"}};
    }
    const ExperimentKeys keys = experiment_keys(c.experiment);
    j["n_seq"] = c.n_seq;
    if (keys.h) {
        j["h"] = c.h;
    }
    if (keys.mu_max) {
        j["mu_max"] = c.mu_max;
    }
    if (keys.n_traj) {
        j["n_traj"] = c.n_traj;
    }
    if (keys.seed) {
        j["seed"] = c.seed;
    }
    if (keys.method) {
        j["method"] = c.method == FisherMethod::exact ? "exact" : "mc";
    }
    if (keys.exact) {
        j["exact"] = {{"eps_prune", c.eps_prune}, {"branch_cap", c.branch_cap}};
    }
    switch (c.experiment) {
        case ExperimentKind::gain: j["gain"] = {{"n_ref", c.n_ref}, {"threshold", c.threshold}}; break;
        case ExperimentKind::time_budget:
            j["time_budget"] = {{"T", c.total_time}, {"t_reset", c.t_reset}, {"t_meas", c.measurement_time()}};
            break;
        case ExperimentKind::jc_filter: j["jc_filter"] = {{"checkpoints", c.checkpoints}}; break;
        case ExperimentKind::wigner: j["wigner"] = {{"extent", c.grid_extent}, {"points", c.grid_points}}; break;
        default: break;
    }
    return j;
}

}  // namespace detail

std::string canonical_config(const RunConfig& config) {
    return detail::config_to_json(config).dump(2);
}

}  // namespace seqfisher
