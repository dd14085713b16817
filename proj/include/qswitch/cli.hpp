// Copyright 2026 The qswitch-lab Authors
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
/**
 * @file cli.hpp
 * Command-line front end: configuration, report generation and serialization.
 *
 * Exit codes: 0 success, 1 a check failed, 2 usage, configuration or
 * resource-guard error.
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qswitch/protocols.hpp"

namespace qswitch::cli {

inline constexpr const char *kSchema = "qswitch-lab/1";
inline constexpr const char *kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Everything a command needs. Mirrors the command-line flags one to one.
struct RunConfig {
    std::string command = "verify";
    /// private-dit, bipartite, ghz or fixed-baseline; unused by verify.
    std::string protocol = "private-dit";
    std::size_t d = 2;
    std::size_t receivers = 1;
    std::size_t x = 0;
    std::string resource = "max";
    std::string alpha = "0:1:101";
    std::string out;
    /// json, csv or auto (csv for sweep, json otherwise).
    std::string format = "auto";
    /// Check tolerance; the command default applies when unset.
    std::optional<double> tol;
    std::size_t max_dim = 4096;
    /// coincidence or random-seeded.
    std::string choice_amplitudes = "coincidence";
    std::uint64_t seed = 1;
    /// dfs-phase, classical-flag or identical.
    std::string encoding = "dfs-phase";

    bool operator==(const RunConfig &) const = default;
};

/// Shortest round-trip decimal form.
inline std::string format_shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

/// 12 significant digits, locale independent.
inline std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return {buf, r.ptr};
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string &key, const std::string &text) {
    T v{};
    const char *end = text.data() + text.size();
    const auto r = std::from_chars(text.data(), end, v);
    if (r.ec != std::errc{} || r.ptr != end) {
        throw ConfigError("invalid value '" + text + "' for " + key);
    }
    return v;
}

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

} // namespace detail

/// Flat `key = value` document, one key per line, fixed key order.
inline std::string serialize(const RunConfig &c) {
    std::ostringstream os;
    os << "command = " << c.command << '\n'
       << "protocol = " << c.protocol << '\n'
       << "d = " << c.d << '\n'
       << "receivers = " << c.receivers << '\n'
       << "x = " << c.x << '\n'
       << "resource = " << c.resource << '\n'
       << "alpha = " << c.alpha << '\n'
       << "out = " << c.out << '\n'
       << "format = " << c.format << '\n';
    if (c.tol) {
        os << "tol = " << format_shortest(*c.tol) << '\n';
    }
    os << "max_dim = " << c.max_dim << '\n'
       << "choice_amplitudes = " << c.choice_amplitudes << '\n'
       << "seed = " << c.seed << '\n'
       << "encoding = " << c.encoding << '\n';
    return os.str();
}

/// Applies `key = value` lines on top of `base`. Blank lines and lines
/// starting with '#' are ignored; unknown or repeated keys are errors.
inline RunConfig parse_config(std::string_view text, RunConfig base = {}) {
    std::map<std::string, std::string> seen;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (!seen.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
        }
        if (key == "command") {
            base.command = value;
        } else if (key == "protocol") {
            base.protocol = value;
        } else if (key == "d") {
            base.d = detail::parse_number<std::size_t>(key, value);
        } else if (key == "receivers") {
            base.receivers = detail::parse_number<std::size_t>(key, value);
        } else if (key == "x") {
            base.x = detail::parse_number<std::size_t>(key, value);
        } else if (key == "resource") {
            base.resource = value;
        } else if (key == "alpha") {
            base.alpha = value;
        } else if (key == "out") {
            base.out = value;
        } else if (key == "format") {
            base.format = value;
        } else if (key == "tol") {
            base.tol = detail::parse_number<double>(key, value);
        } else if (key == "max_dim") {
            base.max_dim = detail::parse_number<std::size_t>(key, value);
        } else if (key == "choice_amplitudes") {
            base.choice_amplitudes = value;
        } else if (key == "seed") {
            base.seed = detail::parse_number<std::uint64_t>(key, value);
        } else if (key == "encoding") {
            base.encoding = value;
        } else {
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return base;
}

inline RunConfig load_config_file(const std::string &path, RunConfig base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

/// Reads a two-qudit state from JSON: {"matrix": [[[re, im], …], …]}.
inline DensityMatrix load_state_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read resource file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
        const auto &m = j.at("matrix");
        const auto n = static_cast<Eigen::Index>(m.size());
        Operator rho(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto &row = m.at(static_cast<std::size_t>(r));
            if (static_cast<Eigen::Index>(row.size()) != n) {
                throw ConfigError("resource file: matrix is not square");
            }
            for (Eigen::Index c = 0; c < n; ++c) {
                const auto &e = row.at(static_cast<std::size_t>(c));
                rho(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
            }
        }
        const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
        if (d * d != static_cast<std::size_t>(n)) {
            throw ConfigError("resource file: dimension is not a square");
        }
        return DensityMatrix(std::move(rho), SubsystemLayout{{"A", d}, {"C", d}});
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("resource file: ") + e.what());
    }
}

/// `max`, `schmidt:λ0,λ1,…` or `file:PATH`.
inline ResourceState parse_resource(const std::string &spec, std::size_t d) {
    ResourceState r = [&] {
        if (spec == "max") {
            return ResourceState::maximally_entangled(d);
        }
        if (spec.rfind("schmidt:", 0) == 0) {
            std::vector<double> lambda;
            for (const auto &p : detail::split(spec.substr(8), ',')) {
                lambda.push_back(detail::parse_number<double>("resource", detail::trim(p)));
            }
            return ResourceState::schmidt_spectrum(std::move(lambda));
        }
        if (spec.rfind("file:", 0) == 0) {
            return ResourceState::explicit_state(load_state_file(spec.substr(5)));
        }
        throw ConfigError("unknown resource '" + spec + "' (expected max, schmidt:… or file:…)");
    }();
    if (r.dim() != d) {
        throw ConfigError("resource dimension " + std::to_string(r.dim()) + " does not match d = " +
                          std::to_string(d));
    }
    return r;
}

struct AlphaSpec {
    double start = 0.0;
    double end = 1.0;
    std::size_t points = 101;
};

/// START:END:POINTS.
inline AlphaSpec parse_alpha(const std::string &spec) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() != 3) {
        throw ConfigError("alpha grid must be START:END:POINTS, got '" + spec + "'");
    }
    AlphaSpec a{detail::parse_number<double>("alpha", parts[0]),
                detail::parse_number<double>("alpha", parts[1]),
                detail::parse_number<std::size_t>("alpha", parts[2])};
    if (a.points == 0 || !(a.start >= 0.0 && a.start <= 1.0 && a.end >= 0.0 && a.end <= 1.0)) {
        throw ConfigError("alpha grid needs endpoints in [0, 1] and at least one point");
    }
    return a;
}

inline std::string resolved_format(const RunConfig &c) {
    if (c.format == "auto") {
        return c.command == "sweep" ? "csv" : "json";
    }
    if (c.format != "json" && c.format != "csv") {
        throw ConfigError("format must be json or csv");
    }
    return c.format;
}

// ---------------------------------------------------------------- JSON

inline nlohmann::json to_json(const Operator &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(const SubsystemLayout &l) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &f : l.factors()) {
        out.push_back({{"label", f.label}, {"dim", f.dim}});
    }
    return out;
}

inline nlohmann::json to_json(const DensityMatrix &rho) {
    return {{"layout", to_json(rho.layout())}, {"matrix", to_json(rho.matrix())}};
}

inline nlohmann::json to_json(const ProtocolTranscript &t) {
    nlohmann::json j;
    j["protocol_id"] = t.protocol_id;
    j["params"] = {{"d", t.params.d},
                   {"receivers", t.params.n_receivers},
                   {"resource", t.params.resource}};
    j["params"]["message"] = t.params.message ? nlohmann::json(*t.params.message) : nlohmann::json();
    j["stages"] = nlohmann::json::array();
    for (const auto &s : t.stages) {
        j["stages"].push_back({{"name", s.name}, {"state", to_json(s.state)}});
    }
    j["controller_branches"] = nlohmann::json::array();
    for (const auto &b : t.controller_branches) {
        j["controller_branches"].push_back(
            {{"outcome", b.outcome}, {"probability", b.probability}, {"null", b.is_null()}});
    }
    j["branches"] = nlohmann::json::array();
    for (const auto &b : t.branches) {
        nlohmann::json jb{{"controller_outcome", b.controller_outcome},
                          {"probability", b.probability},
                          {"receiver_outcomes", b.receiver_outcomes},
                          {"null", b.null}};
        jb["decoded"] = b.decoded ? nlohmann::json(*b.decoded) : nlohmann::json();
        jb["state"] = b.state ? to_json(*b.state) : nlohmann::json();
        j["branches"].push_back(std::move(jb));
    }
    if (t.joint_pmf.size() > 0) {
        nlohmann::json pmf = nlohmann::json::array();
        for (Eigen::Index r = 0; r < t.joint_pmf.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < t.joint_pmf.cols(); ++c) {
                row.push_back(t.joint_pmf(r, c));
            }
            pmf.push_back(std::move(row));
        }
        j["joint_pmf"] = std::move(pmf);
    }
    j["metrics"] = t.metrics;
    return j;
}

inline nlohmann::json to_json(const PrivacyReport &r) {
    nlohmann::json h = nlohmann::json::array();
    for (const auto &p : r.helstrom) {
        h.push_back({{"x0", p.x0}, {"x1", p.x1}, {"error", p.error}});
    }
    return {{"max_charlie_trace_distance", r.max_charlie_trace_distance},
            {"max_charlie_tv_distance", r.max_charlie_tv_distance},
            {"charlie_pmf_uniform_deviation", r.charlie_pmf_uniform_deviation},
            {"decode_mutual_information_bits", r.decode_mutual_information_bits},
            {"helstrom", std::move(h)}};
}

inline nlohmann::json meta_json(const RunConfig &c) {
    nlohmann::json cfg = nlohmann::json::object();
    std::istringstream is(serialize(c));
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    cfg.erase("out");
    return {{"tool", "qswitch"}, {"version", kVersion}, {"log_base", 2}, {"config", std::move(cfg)}};
}

inline nlohmann::json document(const RunConfig &c, nlohmann::json data) {
    return {{"schema", kSchema}, {"meta", meta_json(c)}, {"data", std::move(data)}};
}

// ---------------------------------------------------------------- CSV

/// Row-major table with a header; empty cells for missing values.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::string str() const {
        std::string s;
        auto line = [&](const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                s += (i ? "," : "") + cells[i];
            }
            s += '\n';
        };
        line(header);
        for (const auto &r : rows) {
            line(r);
        }
        return s;
    }
};

inline std::string csv_bool(bool b) { return b ? "true" : "false"; }

inline std::string csv_opt(const std::optional<double> &v) {
    return v ? format_number(*v) : std::string();
}

// ---------------------------------------------------------------- verify

struct CheckResult {
    std::string name;
    /// pass, fail, skipped or expected-unequal.
    std::string status;
    double distance = 0.0;
    double tolerance = 0.0;
    std::string detail;

    [[nodiscard]] bool failed() const { return status == "fail"; }
};

/// Random vacuum amplitudes, one complex Gaussian vector per branch.
inline std::vector<ExtendedChannel> seeded_extensions(std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<ExtendedChannel> out;
    for (std::size_t l = 0; l < d; ++l) {
        Amplitudes a(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double re = g(rng);
            const double im = g(rng);
            a(i) = cplx(re, im);
        }
        a.normalize();
        out.push_back(vacuum_extend(erasing_channel(d, l), a));
    }
    return out;
}

inline std::vector<CheckResult> run_checks(const RunConfig &c) {
    const std::size_t d = c.d;
    const std::size_t n = c.receivers;
    if (d < 2 || n < 1) {
        throw ConfigError("verify needs d >= 2 and receivers >= 1");
    }
    if (c.choice_amplitudes != "coincidence" && c.choice_amplitudes != "random-seeded") {
        throw ConfigError("choice-amplitudes must be coincidence or random-seeded");
    }
    check_resource(ipow(d, n + 1), "verify");
    const double tol = c.tol.value_or(policy().spectral);
    const bool random = c.choice_amplitudes == "random-seeded";

    std::vector<CheckResult> out;
    auto compare = [&](const std::string &name, auto &&make_a, auto &&make_b, bool expect_equal) {
        CheckResult r{name, "pass", 0.0, tol, {}};
        try {
            const auto cmp = channels_equal(make_a(), make_b(), tol);
            r.distance = cmp.distance;
            if (expect_equal) {
                r.status = cmp.equal ? "pass" : "fail";
            } else {
                r.status = cmp.equal ? "fail" : "expected-unequal";
            }
        } catch (const ResourceLimitError &e) {
            r.status = "skipped";
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    };

    const auto extensions = random ? seeded_extensions(d, c.seed) : coincidence_extensions(d);
    auto order = [&] { return cyclic_switch(erasing_family(d)); };
    auto choice = [&] { return controlled_choice_target(extensions); };
    auto closed = [&] { return k_closed_form(d); };
    compare("order-vs-closed-form", order, closed, true);
    compare("choice-vs-closed-form", choice, closed, !random);
    compare("order-vs-choice", order, choice, !random);
    compare("t-decomposition", [&] { return t_decomposition(extensions).reconstruct(); }, choice, true);

    {
        const KrausChannel k = k_closed_form(d);
        double worst = 0.0;
        const SubsystemLayout layout{{"T", d}, {"C", d}};
        const DensityMatrix phi = DensityMatrix::pure(ghz_ket(d, 2), layout);
        for (std::size_t x = 0; x < d; ++x) {
            const DensityMatrix phix = conjugate(phi, phase_encoding_unitary(x, d), {"T"});
            const Ket ket = *purify_if_pure(phix);
            worst = std::max(worst, std::max(0.0, 1.0 - fidelity(apply(k, phix, {"T", "C"}), ket)));
        }
        out.push_back({"dfs-preservation", worst <= tol ? "pass" : "fail", worst, tol, "1 - min fidelity"});
    }

    compare("multiline-vs-order-enumeration", [&] { return k_multiline(d, n); },
            [&] { return multiline_switch_enumerated(d, n); }, true);
    compare("multiline-vs-choice-enumeration", [&] { return k_multiline(d, n); },
            [&] { return multiline_choice_enumerated(d, n); }, true);

    {
        const KrausChannel k = k_multiline(d, n);
        std::vector<SubsystemLayout::Factor> f;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i <= n; ++i) {
            const std::string l = i < n ? "T" + std::to_string(i + 1) : "C";
            f.push_back({l, d});
            labels.push_back(l);
        }
        const Ket g = ghz_ket(d, n + 1);
        const DensityMatrix rho = DensityMatrix::pure(g, SubsystemLayout(f));
        const double worst = std::max(0.0, 1.0 - fidelity(apply(k, rho, labels), g));
        out.push_back({"ghz-preservation", worst <= tol ? "pass" : "fail", worst, tol, "1 - fidelity"});
    }
    return out;
}

// ---------------------------------------------------------------- commands

struct CommandOutput {
    int exit_code = kExitOk;
    /// Human-readable summary.
    std::string summary;
    /// Machine-readable payload (json or csv).
    std::string payload;
};

inline CommandOutput cmd_verify(const RunConfig &c) {
    const auto checks = run_checks(c);
    CommandOutput o;
    std::ostringstream s;
    s << "verify d=" << c.d << " receivers=" << c.receivers
      << " choice-amplitudes=" << c.choice_amplitudes << '\n';
    bool ok = true;
    for (const auto &r : checks) {
        ok = ok && !r.failed();
        s << "  " << r.name << ": " << r.status << "  distance=" << format_number(r.distance)
          << "  tol=" << format_number(r.tolerance);
        if (!r.detail.empty()) {
            s << "  (" << r.detail << ")";
        }
        s << '\n';
    }
    s << (ok ? "all checks passed" : "CHECK FAILED") << '\n';
    o.summary = s.str();
    o.exit_code = ok ? kExitOk : kExitCheckFailed;

    if (resolved_format(c) == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &r : checks) {
            arr.push_back({{"name", r.name},
                           {"status", r.status},
                           {"distance", r.distance},
                           {"tolerance", r.tolerance},
                           {"detail", r.detail}});
        }
        o.payload = document(c, {{"checks", std::move(arr)}, {"passed", ok}}).dump(2) + "\n";
    } else {
        CsvTable t{{"check", "status", "distance", "tolerance"}, {}};
        for (const auto &r : checks) {
            t.rows.push_back({r.name, r.status, format_number(r.distance), format_number(r.tolerance)});
        }
        o.payload = t.str();
    }
    return o;
}

inline FixedEncoding parse_encoding(const std::string &s) {
    if (s == "dfs-phase") {
        return FixedEncoding::dfs_phase;
    }
    if (s == "classical-flag") {
        return FixedEncoding::classical_flag;
    }
    if (s == "identical") {
        return FixedEncoding::identical;
    }
    throw ConfigError("encoding must be dfs-phase, classical-flag or identical");
}

inline CommandOutput cmd_run(const RunConfig &c) {
    const std::string fmt = resolved_format(c);
    CommandOutput o;
    std::ostringstream s;
    if (c.d < 2) {
        throw ConfigError("d must be at least 2");
    }

    if (c.protocol == "fixed-baseline") {
        const auto r = fixed_configuration_baseline(c.d, fixed_baseline_encodings(c.d, parse_encoding(c.encoding)));
        s << "fixed-baseline d=" << c.d << " encoding=" << c.encoding << '\n'
          << "  bob_success " << format_number(r.bob_success) << '\n'
          << "  min_charlie_trace_distance " << format_number(r.min_charlie_trace_distance) << '\n'
          << "  max_charlie_trace_distance " << format_number(r.max_charlie_trace_distance) << '\n'
          << "  success_bound " << format_number(r.success_bound) << '\n'
          << "  leak_implication " << (r.leak_implication_holds ? "holds" : "VIOLATED")
          << "  tol=" << format_number(policy().spectral) << '\n';
        o.exit_code = r.leak_implication_holds ? kExitOk : kExitCheckFailed;
        if (fmt == "json") {
            nlohmann::json states = nlohmann::json::array();
            for (const auto &st : r.charlie_states) {
                states.push_back(to_json(st));
            }
            o.payload = document(c, {{"d", r.d},
                                     {"encoding", c.encoding},
                                     {"bob_success", r.bob_success},
                                     {"min_charlie_trace_distance", r.min_charlie_trace_distance},
                                     {"max_charlie_trace_distance", r.max_charlie_trace_distance},
                                     {"success_bound", r.success_bound},
                                     {"leak_implication_holds", r.leak_implication_holds},
                                     {"charlie_states", std::move(states)}})
                            .dump(2) +
                        "\n";
        } else {
            o.payload = CsvTable{{"d", "encoding", "bob_success", "min_charlie_trace_distance",
                                  "max_charlie_trace_distance", "success_bound", "leak_implication_holds"},
                                 {{std::to_string(r.d), c.encoding, format_number(r.bob_success),
                                   format_number(r.min_charlie_trace_distance),
                                   format_number(r.max_charlie_trace_distance),
                                   format_number(r.success_bound), csv_bool(r.leak_implication_holds)}}}
                            .str();
        }
        o.summary = s.str();
        return o;
    }

    const ResourceState resource = parse_resource(c.resource, c.d);
    ProtocolTranscript t;
    std::optional<PrivacyReport> privacy;
    if (c.protocol == "private-dit") {
        if (c.x >= c.d) {
            throw ConfigError("x must lie in [0, d)");
        }
        std::vector<ProtocolTranscript> all;
        for (std::size_t x = 0; x < c.d; ++x) {
            all.push_back(run_private_dit(c.d, x, resource));
        }
        privacy = privacy_report(all);
        t = std::move(all[c.x]);
    } else if (c.protocol == "bipartite") {
        t = run_bipartite_establishment(c.d, resource);
    } else if (c.protocol == "ghz") {
        t = run_ghz_distribution(c.d, c.receivers, resource);
    } else {
        throw ConfigError("unknown protocol '" + c.protocol + "'");
    }

    s << t.protocol_id << " d=" << c.d;
    if (t.protocol_id == "ghz") {
        s << " receivers=" << c.receivers;
    }
    if (t.params.message) {
        s << " x=" << *t.params.message;
    }
    s << " resource=" << t.params.resource << '\n';
    for (const auto &[k, v] : t.metrics) {
        s << "  " << k << ' ' << format_number(v) << '\n';
    }
    if (privacy) {
        s << "  charlie_max_trace_distance " << format_number(privacy->max_charlie_trace_distance) << '\n'
          << "  charlie_max_tv_distance " << format_number(privacy->max_charlie_tv_distance) << '\n'
          << "  decode_mutual_information_bits "
          << format_number(privacy->decode_mutual_information_bits) << '\n';
    }
    o.summary = s.str();

    if (fmt == "json") {
        nlohmann::json data = to_json(t);
        if (privacy) {
            data["privacy"] = to_json(*privacy);
        }
        o.payload = document(c, std::move(data)).dump(2) + "\n";
    } else {
        CsvTable table{{"protocol", "d", "receivers", "x", "resource"}, {}};
        std::vector<std::string> row{t.protocol_id, std::to_string(c.d), std::to_string(t.params.n_receivers),
                                     t.params.message ? std::to_string(*t.params.message) : "",
                                     t.params.resource};
        for (const auto &[k, v] : t.metrics) {
            table.header.push_back(k);
            row.push_back(format_number(v));
        }
        if (privacy) {
            table.header.insert(table.header.end(), {"charlie_max_trace_distance", "charlie_max_tv_distance",
                                                     "decode_mutual_information_bits"});
            row.insert(row.end(), {format_number(privacy->max_charlie_trace_distance),
                                   format_number(privacy->max_charlie_tv_distance),
                                   format_number(privacy->decode_mutual_information_bits)});
        }
        table.rows.push_back(std::move(row));
        o.payload = table.str();
    }
    return o;
}

inline SweepProtocol parse_sweep_protocol(const std::string &s) {
    if (s == "private-dit") {
        return SweepProtocol::private_dit;
    }
    if (s == "bipartite") {
        return SweepProtocol::bipartite;
    }
    if (s == "ghz") {
        return SweepProtocol::ghz;
    }
    throw ConfigError("sweep protocol must be private-dit, bipartite or ghz");
}

inline CommandOutput cmd_sweep(const RunConfig &c) {
    const SweepProtocol proto = parse_sweep_protocol(c.protocol);
    if (c.d < 2) {
        throw ConfigError("d must be at least 2");
    }
    const AlphaSpec a = parse_alpha(c.alpha);
    std::vector<std::vector<double>> spectra;
    for (double alpha : alpha_grid(a.start, a.end, a.points)) {
        spectra.push_back(alpha_spectrum(c.d, alpha));
    }
    const double tol = c.tol.value_or(1e-9);
    const SweepTable table = necessity_sweep(proto, c.d, spectra, c.receivers, tol);

    CommandOutput o;
    std::size_t perfect = 0;
    for (const auto &r : table.rows) {
        perfect += r.is_perfect ? 1 : 0;
    }
    std::ostringstream s;
    s << "sweep " << c.protocol << " d=" << c.d;
    if (proto == SweepProtocol::ghz) {
        s << " receivers=" << c.receivers;
    }
    s << " points=" << table.rows.size() << '\n'
      << "  perfect rows " << perfect << '\n'
      << "  perfect only at uniform spectrum: " << (table.certified ? "yes" : "NO")
      << "  tol=" << format_number(tol) << '\n'
      << "  (construction family: phase encodings; other encodings are not searched)\n";
    o.summary = s.str();
    o.exit_code = table.certified ? kExitOk : kExitCheckFailed;

    if (resolved_format(c) == "csv") {
        CsvTable t;
        for (std::size_t j = 0; j < c.d; ++j) {
            t.header.push_back("lambda_" + std::to_string(j));
        }
        t.header.insert(t.header.end(), {"metric", "top_schmidt_sq", "schmidt_gap", "resource_concurrence",
                                         "helstrom_success", "is_perfect"});
        for (const auto &r : table.rows) {
            std::vector<std::string> row;
            for (double l : r.spectrum) {
                row.push_back(format_number(l));
            }
            row.insert(row.end(), {format_number(r.metric), format_number(r.top_schmidt_sq),
                                   format_number(r.schmidt_gap), csv_opt(r.resource_concurrence),
                                   csv_opt(r.helstrom_success), csv_bool(r.is_perfect)});
            t.rows.push_back(std::move(row));
        }
        o.payload = t.str();
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : table.rows) {
            nlohmann::json jr{{"spectrum", r.spectrum},
                              {"metric", r.metric},
                              {"top_schmidt_sq", r.top_schmidt_sq},
                              {"schmidt_gap", r.schmidt_gap},
                              {"is_uniform", r.is_uniform},
                              {"is_perfect", r.is_perfect}};
            jr["resource_concurrence"] = r.resource_concurrence ? nlohmann::json(*r.resource_concurrence) : nlohmann::json();
            jr["helstrom_success"] = r.helstrom_success ? nlohmann::json(*r.helstrom_success) : nlohmann::json();
            rows.push_back(std::move(jr));
        }
        o.payload = document(c, {{"rows", std::move(rows)},
                                 {"certified", table.certified},
                                 {"tolerance", tol}})
                        .dump(2) +
                    "\n";
    }
    return o;
}

inline CommandOutput dispatch(const RunConfig &c) {
    if (c.command == "verify") {
        return cmd_verify(c);
    }
    if (c.command == "run") {
        return cmd_run(c);
    }
    if (c.command == "sweep") {
        return cmd_sweep(c);
    }
    throw ConfigError("unknown command '" + c.command + "'");
}

// ---------------------------------------------------------------- main

namespace detail {

struct Flags {
    std::optional<std::string> config;
    std::optional<std::size_t> d;
    std::optional<std::size_t> receivers;
    std::optional<std::size_t> x;
    std::optional<std::string> resource;
    std::optional<std::string> alpha;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<double> tol;
    std::optional<std::size_t> max_dim;
    std::optional<std::string> choice_amplitudes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> encoding;
};

inline void add_flags(CLI::App *sub, Flags &f) {
    sub->add_option("--config", f.config, "key = value config file; flags override it");
    sub->add_option("--d", f.d, "qudit dimension");
    sub->add_option("--receivers,--n", f.receivers, "number of receivers / lines");
    sub->add_option("--x", f.x, "message value");
    sub->add_option("--resource", f.resource, "max | schmidt:l0,l1,... | file:PATH");
    sub->add_option("--alpha", f.alpha, "START:END:POINTS sweep grid");
    sub->add_option("--out", f.out, "write the data payload to PATH");
    sub->add_option("--format", f.format, "json | csv");
    sub->add_option("--tol", f.tol, "check tolerance");
    sub->add_option("--max-dim", f.max_dim, "largest Hilbert space dimension");
    sub->add_option("--choice-amplitudes", f.choice_amplitudes, "coincidence | random-seeded");
    sub->add_option("--seed", f.seed, "seed for random-seeded amplitudes");
    sub->add_option("--encoding", f.encoding, "dfs-phase | classical-flag | identical");
}

template <typename T>
void override_with(T &field, const std::optional<T> &flag) {
    if (flag) {
        field = *flag;
    }
}

} // namespace detail

/// Resolves defaults < environment < config file < flags. QSWITCH_MAX_DIM
/// replaces the default guard.
inline RunConfig resolve_config(const std::string &command, const std::string &protocol,
                                const detail::Flags &f) {
    RunConfig c;
    if (const char *env = std::getenv("QSWITCH_MAX_DIM"); env != nullptr && *env != '\0') {
        c.max_dim = detail::parse_number<std::size_t>("QSWITCH_MAX_DIM", env);
    }
    if (f.config) {
        c = load_config_file(*f.config, c);
    }
    c.command = command;
    if (!protocol.empty()) {
        c.protocol = protocol;
    }
    detail::override_with(c.d, f.d);
    detail::override_with(c.receivers, f.receivers);
    detail::override_with(c.x, f.x);
    detail::override_with(c.resource, f.resource);
    detail::override_with(c.alpha, f.alpha);
    detail::override_with(c.out, f.out);
    detail::override_with(c.format, f.format);
    if (f.tol) {
        c.tol = f.tol;
    }
    detail::override_with(c.max_dim, f.max_dim);
    detail::override_with(c.choice_amplitudes, f.choice_amplitudes);
    detail::override_with(c.seed, f.seed);
    detail::override_with(c.encoding, f.encoding);
    return c;
}

inline int main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"qswitch: coherently controlled channel simulator", "qswitch"};
    app.require_subcommand(1);
    detail::Flags verify_flags;
    detail::Flags run_flags;
    detail::Flags sweep_flags;
    std::string run_protocol;
    std::string sweep_protocol;

    auto *verify = app.add_subcommand("verify", "check channel identities");
    detail::add_flags(verify, verify_flags);
    auto *run = app.add_subcommand("run", "run a protocol and write its transcript");
    run->add_option("protocol", run_protocol, "private-dit | bipartite | ghz | fixed-baseline")
        ->required()
        ->check(CLI::IsMember({"private-dit", "bipartite", "ghz", "fixed-baseline"}));
    detail::add_flags(run, run_flags);
    auto *sweep = app.add_subcommand("sweep", "sweep a protocol over Schmidt spectra");
    sweep->add_option("protocol", sweep_protocol, "private-dit | bipartite | ghz")
        ->required()
        ->check(CLI::IsMember({"private-dit", "bipartite", "ghz"}));
    detail::add_flags(sweep, sweep_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const NumericPolicy saved = policy();
    try {
        RunConfig c;
        if (verify->parsed()) {
            c = resolve_config("verify", "", verify_flags);
        } else if (run->parsed()) {
            c = resolve_config("run", run_protocol, run_flags);
        } else {
            c = resolve_config("sweep", sweep_protocol, sweep_flags);
        }
        NumericPolicy p = saved;
        p.max_dim = c.max_dim;
        set_policy(p);

        const CommandOutput o = dispatch(c);
        set_policy(saved);
        out << o.summary;
        if (!c.out.empty()) {
            std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
            if (!f) {
                err << "error: cannot write '" << c.out << "'\n";
                return kExitUsage;
            }
            f << o.payload;
        }
        return o.exit_code;
    } catch (const ResourceLimitError &e) {
        set_policy(saved);
        err << "resource guard: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError &e) {
        set_policy(saved);
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        set_policy(saved);
        err << "invalid parameters: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace qswitch::cli
