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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "config_json.hpp"
#include "seqfisher/errors.hpp"
#include "seqfisher/io.hpp"

namespace seqfisher {

using nlohmann::json;

namespace {

constexpr int kJsonIndent = 2;

// Decimal text with 17 significant digits.
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON has no infinities; emit null for them.
json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json number_array(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) {
        out.push_back(finite_or_null(x));
    }
    return out;
}

json series_json(const FisherSeries& s) {
    return {{"lambda", s.lambda},
            {"h", s.h},
            {"delta_F", number_array(s.increments)},
            {"F_cum", number_array(s.cumulative)},
            {"std_err", number_array(s.std_err)},
            {"mu_max", s.mu_max},
            {"aborted", s.aborted_count}};
}

json curve_json(const CurveSeries& c) {
    json meta = json::object();
    for (const auto& [k, v] : c.metadata) {
        meta[k] = v;
    }
    return {{"x_label", c.x_label}, {"y_label", c.y_label}, {"x", number_array(c.x)},
            {"y", number_array(c.y)}, {"y_err", number_array(c.y_err)}, {"metadata", meta}};
}

json payload_json(const Payload& payload) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FisherSeries>) {
                json j = series_json(p);
                j["type"] = "fisher_series";
                return j;
            } else if constexpr (std::is_same_v<T, TreePayload>) {
                json j = series_json(p.series);
                j["type"] = "fisher_exact";
                j["delta_F_recursive"] = number_array(p.recursive_increments);
                j["cross_term"] = number_array(p.cross_terms);
                j["pruned_mass"] = number_array(p.pruned_mass);
                j["approximate"] = p.approximate;
                return j;
            } else if constexpr (std::is_same_v<T, GainPayload>) {
                return {{"type", "gain"},
                        {"series", series_json(p.series)},
                        {"gain", number_array(p.report.gain)},
                        {"n_star", p.report.n_star},
                        {"n_ref", p.report.n_ref},
                        {"threshold", p.report.threshold}};
            } else if constexpr (std::is_same_v<T, TimeBudgetPayload>) {
                return {{"type", "time_budget"},
                        {"series", series_json(p.series)},
                        {"T", p.report.total_time},
                        {"t_reset", p.report.t_reset},
                        {"t_meas", p.report.t_meas},
                        {"tau", p.report.tau},
                        {"n", p.report.n},
                        {"trajectories", number_array(p.report.trajectories)},
                        {"inverse_F", number_array(p.report.inverse_fisher)}};
            } else if constexpr (std::is_same_v<T, CurveSeries>) {
                json j = curve_json(p);
                j["type"] = "curve";
                return j;
            } else if constexpr (std::is_same_v<T, std::vector<FieldSnapshot>>) {
                json snaps = json::array();
                for (const auto& s : p) {
                    snaps.push_back({{"n_seq", s.n_seq},
                                     {"m", number_array(s.distribution.x)},
                                     {"probability", number_array(s.distribution.y)}});
                }
                return {{"type", "field_snapshots"}, {"snapshots", snaps}};
            } else {
                json rows = json::array();
                for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
                    std::vector<double> row(static_cast<std::size_t>(p.values.cols()));
                    for (Eigen::Index j = 0; j < p.values.cols(); ++j) {
                        row[static_cast<std::size_t>(j)] = p.values(i, j);
                    }
                    rows.push_back(number_array(row));
                }
                return {{"type", "wigner"}, {"q", number_array(p.q)}, {"p", number_array(p.p)}, {"W", rows}};
            }
        },
        payload);
}

void series_csv(std::string& out, const FisherSeries& s) {
    out += "n,delta_F,F_cum,std_err\n";
    for (int n = 1; n <= s.length(); ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        out += std::to_string(n) + "," + num(s.increments[i]) + "," + num(s.cumulative[i]) + "," +
               num(s.std_err[i]) + "\n";
    }
}

}  // namespace

std::string to_csv(const ResultEnvelope& envelope) {
    std::string out;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FisherSeries>) {
                series_csv(out, p);
            } else if constexpr (std::is_same_v<T, TreePayload>) {
                series_csv(out, p.series);
            } else if constexpr (std::is_same_v<T, GainPayload>) {
                out += "n,F_cum,gain,at_or_above_threshold\n";
                const double target = p.report.threshold * p.report.gain[static_cast<std::size_t>(p.report.n_ref - 1)];
                for (std::size_t i = 0; i < p.report.gain.size(); ++i) {
                    out += std::to_string(i + 1) + "," + num(p.series.cumulative[i]) + "," + num(p.report.gain[i]) +
                           "," + (p.report.gain[i] >= target ? "1" : "0") + "\n";
                }
            } else if constexpr (std::is_same_v<T, TimeBudgetPayload>) {
                out += "n,trajectories,inverse_F\n";
                for (std::size_t i = 0; i < p.report.n.size(); ++i) {
                    out += std::to_string(p.report.n[i]) + "," + num(p.report.trajectories[i]) + "," +
                           num(p.report.inverse_fisher[i]) + "\n";
                }
            } else if constexpr (std::is_same_v<T, CurveSeries>) {
                out += p.x_label + "," + p.y_label + ",std_err\n";
                for (std::size_t i = 0; i < p.x.size(); ++i) {
                    out += num(p.x[i]) + "," + num(p.y[i]) + "," + num(p.y_err[i]) + "\n";
                }
            } else if constexpr (std::is_same_v<T, std::vector<FieldSnapshot>>) {
                out += "n_seq,m,probability\n";
                for (const auto& s : p) {
                    for (std::size_t i = 0; i < s.distribution.x.size(); ++i) {
                        out += std::to_string(s.n_seq) + "," + num(s.distribution.x[i]) + "," +
                               num(s.distribution.y[i]) + "\n";
                    }
                }
            } else {
                out += "q,p,W\n";
                for (std::size_t i = 0; i < p.q.size(); ++i) {
                    for (std::size_t j = 0; j < p.p.size(); ++j) {
                        out += num(p.q[i]) + "," + num(p.p[j]) + "," +
                               num(p.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) + "\n";
                    }
                }
            }
        },
        envelope.payload);
    return out;
}

std::string to_json(const ResultEnvelope& envelope) {
    json doc;
    doc["config"] = detail::config_to_json(envelope.config);
    doc["version"] = envelope.version;
    doc["payload"] = payload_json(envelope.payload);
    doc["aborted"] = envelope.aborted;
    doc["excluded"] = envelope.excluded;
    if (envelope.config.record_timing) {
        doc["wall_seconds"] = envelope.wall_seconds;
    }
    return doc.dump(kJsonIndent) + "\n";
}

std::string reemit_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw IoError(std::string("reemit_json: ") + e.what());
    }
    return doc.dump(kJsonIndent) + "\n";
}

std::string render(const ResultEnvelope& envelope, OutputFormat format) {
    return format == OutputFormat::csv ? to_csv(envelope) : to_json(envelope);
}

void emit(const ResultEnvelope& envelope, OutputFormat format, const std::string& path) {
    const std::string text = render(envelope, format);
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) {
            throw IoError("failed writing to standard output");
        }
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output file '" + path + "'");
    }
    out << text;
    out.close();
    if (!out) {
        throw IoError("failed writing output file '" + path + "'");
    }
}

}  // namespace seqfisher
