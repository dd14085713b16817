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
 * @file protocols.hpp
 * Branch-enumerated communication protocols over the coincidence channel.
 *
 * Alice holds A, Charlie holds the control C, Bob receives B (B1…BN). Every
 * measurement is evaluated on all outcomes; nothing here draws random numbers.
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qswitch/combinators.hpp"
#include "qswitch/entanglement.hpp"

namespace qswitch {

/// State shared by Alice (A) and Charlie (C) before a protocol starts.
class ResourceState {
  public:
    enum class Kind { maximally_entangled, schmidt_spectrum, explicit_state };

    static ResourceState maximally_entangled(std::size_t d) {
        if (d < 2) {
            throw std::invalid_argument("resource: d must be at least 2");
        }
        ResourceState r;
        r.kind_ = Kind::maximally_entangled;
        r.d_ = d;
        r.spectrum_.assign(d, 1.0 / static_cast<double>(d));
        return r;
    }

    /// Σ_j √λ_j |j>_A |j>_C.
    static ResourceState schmidt_spectrum(std::vector<double> lambda) {
        if (lambda.size() < 2) {
            throw std::invalid_argument("resource: spectrum needs at least two entries");
        }
        double sum = 0.0;
        for (double l : lambda) {
            if (!(l >= 0.0)) {
                throw std::invalid_argument("resource: spectrum entries must be nonnegative");
            }
            sum += l;
        }
        if (std::abs(sum - 1.0) > policy().structural) {
            throw std::invalid_argument("resource: spectrum sums to " + std::to_string(sum) +
                                        ", not 1");
        }
        ResourceState r;
        r.kind_ = Kind::schmidt_spectrum;
        r.d_ = lambda.size();
        r.spectrum_ = std::move(lambda);
        return r;
    }

    /// Any two-qudit state; its factors are relabeled A, C.
    static ResourceState explicit_state(const DensityMatrix &rho) {
        const auto &l = rho.layout();
        if (l.size() != 2 || l[0].dim != l[1].dim || l[0].dim < 2) {
            throw std::invalid_argument("resource: explicit state must be on two qudits of equal dimension");
        }
        ResourceState r;
        r.kind_ = Kind::explicit_state;
        r.d_ = l[0].dim;
        r.explicit_.emplace(rho.matrix(), SubsystemLayout{{"A", r.d_}, {"C", r.d_}});
        return r;
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::size_t dim() const { return d_; }
    /// Schmidt spectrum; empty for explicit states.
    [[nodiscard]] const std::vector<double> &spectrum() const { return spectrum_; }

    [[nodiscard]] DensityMatrix state() const {
        if (kind_ == Kind::explicit_state) {
            return *explicit_;
        }
        const SubsystemLayout layout{{"A", d_}, {"C", d_}};
        Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(d_ * d_));
        for (std::size_t j = 0; j < d_; ++j) {
            a(static_cast<Eigen::Index>(j * d_ + j)) = std::sqrt(spectrum_[j]);
        }
        return DensityMatrix::pure(Ket::normalize(a), layout);
    }

    [[nodiscard]] std::string description() const {
        switch (kind_) {
        case Kind::maximally_entangled:
            return "max";
        case Kind::schmidt_spectrum: {
            std::string s = "schmidt:";
            for (std::size_t j = 0; j < spectrum_.size(); ++j) {
                char buf[32];
                const auto r = std::to_chars(buf, buf + sizeof buf, spectrum_[j]);
                s.append(j ? "," : "").append(buf, r.ptr);
            }
            return s;
        }
        case Kind::explicit_state:
            return "explicit";
        }
        return {};
    }

  private:
    ResourceState() = default;
    Kind kind_ = Kind::maximally_entangled;
    std::size_t d_ = 0;
    std::vector<double> spectrum_;
    std::optional<DensityMatrix> explicit_;
};

struct ProtocolParams {
    std::size_t d = 0;
    std::size_t n_receivers = 1;
    std::optional<std::size_t> message;
    std::string resource;
};

struct TranscriptStage {
    std::string name;
    DensityMatrix state;
};

/// One leaf of the measurement tree.
struct TranscriptBranch {
    std::size_t controller_outcome = 0;
    double probability = 0.0;
    std::vector<std::size_t> receiver_outcomes;
    std::optional<std::size_t> decoded;
    /// Final receiver-side state, when one remains; empty for null branches.
    std::optional<DensityMatrix> state;
    bool null = false;
};

struct ProtocolTranscript {
    std::string protocol_id;
    ProtocolParams params;
    std::vector<TranscriptStage> stages;
    /// Charlie's Fourier measurement, with post-states before any correction.
    std::vector<MeasurementBranch> controller_branches;
    std::vector<TranscriptBranch> branches;
    /// p(m_B, m_C), rows m_B; private-dit only.
    Eigen::MatrixXd joint_pmf;
    std::map<std::string, double> metrics;

    [[nodiscard]] const DensityMatrix &stage(const std::string &name) const {
        for (const auto &s : stages) {
            if (s.name == name) {
                return s.state;
            }
        }
        throw std::out_of_range("transcript has no stage '" + name + "'");
    }

    [[nodiscard]] double metric(const std::string &name) const {
        const auto it = metrics.find(name);
        if (it == metrics.end()) {
            throw std::out_of_range("transcript has no metric '" + name + "'");
        }
        return it->second;
    }

    /// Charlie's outcome distribution.
    [[nodiscard]] std::vector<double> controller_pmf() const {
        std::vector<double> p;
        for (const auto &b : controller_branches) {
            p.push_back(b.probability);
        }
        return p;
    }
};

namespace detail {

inline cplx root_of_unity(std::size_t d, std::size_t k) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k % d) /
                               static_cast<double>(d));
}

inline Operator diagonal_phase(std::size_t d, std::size_t x) {
    Operator u = Operator::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
        u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = root_of_unity(d, j * x);
    }
    return u;
}

inline std::vector<std::string> numbered(const std::string &stem, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= n; ++k) {
        out.push_back(stem + std::to_string(k));
    }
    return out;
}

} // namespace detail

/// Σ_j ω^{jx} |j><j|, ω = e^{2πi/d}.
inline Operator phase_encoding_unitary(std::size_t x, std::size_t d) {
    if (d == 0 || x >= d) {
        throw std::invalid_argument("phase_encoding_unitary: need 0 <= x < d");
    }
    return detail::diagonal_phase(d, x);
}

/// |k, a_1…a_n> ↦ |k, a_1⊕k, …, a_n⊕k> on 1 + n qudits.
inline Operator clone_extend_unitary(std::size_t d, std::size_t n_copies) {
    if (d == 0 || n_copies == 0) {
        throw std::invalid_argument("clone_extend_unitary: need d >= 1 and n >= 1");
    }
    const std::size_t dim = ipow(d, n_copies + 1);
    check_resource(dim, "clone_extend_unitary");
    const std::size_t anc = dim / d;
    Operator u = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::vector<std::size_t> digits(n_copies);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t a = 0; a < anc; ++a) {
            std::size_t rest = a;
            for (std::size_t p = n_copies; p-- > 0;) {
                digits[p] = rest % d;
                rest /= d;
            }
            std::size_t b = 0;
            for (std::size_t p = 0; p < n_copies; ++p) {
                b = b * d + (digits[p] + k) % d;
            }
            u(static_cast<Eigen::Index>(k * anc + b), static_cast<Eigen::Index>(k * anc + a)) = 1.0;
        }
    }
    return u;
}

/// Σ_j ω^{jm} |j><j|; undoes the phase Charlie's outcome m imprints on the
/// receiver.
inline Operator correction_unitary(std::size_t m, std::size_t d) {
    if (d == 0 || m >= d) {
        throw std::invalid_argument("correction_unitary: need 0 <= m < d");
    }
    return detail::diagonal_phase(d, m);
}

/// Private-dit pipeline from an already encoded state on (A, C): K on
/// (A→B, C), Charlie measures C in the Fourier basis, Bob measures B in the
/// Fourier basis and decodes x̂ = (m_B + m_C) mod d.
inline ProtocolTranscript run_private_dit_encoded(std::size_t d, std::size_t x,
                                                  const DensityMatrix &encoded,
                                                  std::string resource_description = "explicit") {
    if (d < 2 || x >= d) {
        throw std::invalid_argument("run_private_dit: need d >= 2 and 0 <= x < d");
    }
    if (encoded.layout() != SubsystemLayout{{"A", d}, {"C", d}}) {
        throw std::invalid_argument("run_private_dit: encoded state must be on (A, C) of dimension d each");
    }
    ProtocolTranscript t;
    t.protocol_id = "private-dit";
    t.params = {d, 1, x, std::move(resource_description)};
    t.stages.push_back({"encoded", encoded});

    const DensityMatrix sent =
        apply(k_closed_form(d), encoded, {"A", "C"}, SubsystemLayout{{"B", d}, {"C", d}});
    t.stages.push_back({"transmitted", sent});

    const auto fb = fourier_basis(d);
    t.controller_branches = projective_measure(sent, fb, "C");
    t.joint_pmf = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    double success = 0.0;
    for (const auto &cb : t.controller_branches) {
        for (std::size_t mb = 0; mb < d; ++mb) {
            TranscriptBranch br;
            br.controller_outcome = cb.outcome;
            br.receiver_outcomes = {mb};
            br.decoded = (mb + cb.outcome) % d;
            if (cb.is_null()) {
                br.null = true;
            } else {
                br.probability = cb.probability * std::max(0.0, fidelity(*cb.state, fb[mb]));
                br.null = br.probability < policy().null_branch;
            }
            t.joint_pmf(static_cast<Eigen::Index>(mb), static_cast<Eigen::Index>(cb.outcome)) =
                br.probability;
            if (*br.decoded == x) {
                success += br.probability;
            }
            t.branches.push_back(std::move(br));
        }
    }
    t.metrics["success_probability"] = success;
    t.metrics["outcome_mutual_information_bits"] = mutual_information(t.joint_pmf / t.joint_pmf.sum());
    return t;
}

/// Alice applies phase_encoding_unitary(x) on A, then run_private_dit_encoded.
inline ProtocolTranscript run_private_dit(std::size_t d, std::size_t x, const ResourceState &resource) {
    if (resource.dim() != d) {
        throw std::invalid_argument("run_private_dit: resource dimension " +
                                    std::to_string(resource.dim()) + " does not match d = " +
                                    std::to_string(d));
    }
    if (x >= d) {
        throw std::invalid_argument("run_private_dit: message out of range");
    }
    const DensityMatrix rho = resource.state();
    const DensityMatrix encoded = conjugate(rho, phase_encoding_unitary(x, d), {"A"});
    ProtocolTranscript t = run_private_dit_encoded(d, x, encoded, resource.description());
    t.stages.insert(t.stages.begin(), {"resource", rho});
    return t;
}

struct PairwiseHelstrom {
    std::size_t x0 = 0;
    std::size_t x1 = 0;
    double error = 0.0;
};

struct PrivacyReport {
    std::size_t d = 0;
    /// Max trace distance between Charlie's reduced states after transmission.
    double max_charlie_trace_distance = 0.0;
    /// Max total-variation distance between Charlie's outcome pmfs.
    double max_charlie_tv_distance = 0.0;
    /// Max |p(m_C) − 1/d| over all transcripts.
    double charlie_pmf_uniform_deviation = 0.0;
    std::vector<PairwiseHelstrom> helstrom;
    /// I(x; x̂) in bits under a uniform prior on x.
    double decode_mutual_information_bits = 0.0;
};

/// Transcripts must be private-dit runs for x = 0…d−1 sharing d and resource.
inline PrivacyReport privacy_report(const std::vector<ProtocolTranscript> &transcripts) {
    if (transcripts.empty()) {
        throw std::invalid_argument("privacy_report: no transcripts");
    }
    const std::size_t d = transcripts.front().params.d;
    if (transcripts.size() != d) {
        throw std::invalid_argument("privacy_report: need one transcript per message value");
    }
    for (std::size_t x = 0; x < d; ++x) {
        const auto &t = transcripts[x];
        if (t.protocol_id != "private-dit" || t.params.d != d ||
            t.params.resource != transcripts.front().params.resource || t.params.message != x) {
            throw std::invalid_argument("privacy_report: mismatched transcript parameters");
        }
    }
    PrivacyReport r;
    r.d = d;
    std::vector<DensityMatrix> charlie;
    std::vector<std::vector<double>> pmf;
    for (const auto &t : transcripts) {
        charlie.push_back(partial_trace(t.stage("transmitted"), {"C"}));
        pmf.push_back(t.controller_pmf());
        for (double p : pmf.back()) {
            r.charlie_pmf_uniform_deviation =
                std::max(r.charlie_pmf_uniform_deviation, std::abs(p - 1.0 / static_cast<double>(d)));
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            r.max_charlie_trace_distance =
                std::max(r.max_charlie_trace_distance, trace_distance(charlie[a], charlie[b]));
            double tv = 0.0;
            for (std::size_t m = 0; m < d; ++m) {
                tv += std::abs(pmf[a][m] - pmf[b][m]);
            }
            r.max_charlie_tv_distance = std::max(r.max_charlie_tv_distance, 0.5 * tv);
            r.helstrom.push_back({a, b, helstrom_error(charlie[a], charlie[b], 0.5)});
        }
    }
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t x = 0; x < d; ++x) {
        for (const auto &br : transcripts[x].branches) {
            joint(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(*br.decoded)) +=
                br.probability / static_cast<double>(d);
        }
    }
    r.decode_mutual_information_bits = mutual_information(joint / joint.sum());
    return r;
}

namespace detail {

/// Shared pipeline of the entanglement-distribution protocols: clone A onto
/// `ancillas`, send them through `channel` (with C as control) to `receivers`,
/// Charlie measures C in the Fourier basis, `receivers.front()` is corrected.
inline ProtocolTranscript run_distribution(std::string id, std::size_t d, std::size_t n,
                                           const ResourceState &resource,
                                           const KrausChannel &channel,
                                           const std::vector<std::string> &ancillas,
                                           const std::vector<std::string> &receivers) {
    if (resource.dim() != d) {
        throw std::invalid_argument(id + ": resource dimension " + std::to_string(resource.dim()) +
                                    " does not match d = " + std::to_string(d));
    }
    ProtocolTranscript t;
    t.protocol_id = std::move(id);
    t.params = {d, n, std::nullopt, resource.description()};

    const DensityMatrix rho = resource.state();
    t.stages.push_back({"resource", rho});

    std::vector<SubsystemLayout::Factor> anc_factors;
    for (const auto &a : ancillas) {
        anc_factors.push_back({a, d});
    }
    const SubsystemLayout anc_layout(anc_factors);
    const DensityMatrix blank =
        DensityMatrix::pure(Ket::basis(anc_layout.total_dim(), 0), anc_layout);
    std::vector<std::string> order{"A"};
    order.insert(order.end(), ancillas.begin(), ancillas.end());
    order.push_back("C");
    std::vector<std::string> clone_on{"A"};
    clone_on.insert(clone_on.end(), ancillas.begin(), ancillas.end());
    const DensityMatrix cloned =
        conjugate(reorder(tensor(rho, blank), order), clone_extend_unitary(d, n), clone_on);
    t.stages.push_back({"cloned", cloned});

    std::vector<std::string> acted = ancillas;
    acted.push_back("C");
    std::vector<SubsystemLayout::Factor> out_factors;
    for (const auto &b : receivers) {
        out_factors.push_back({b, d});
    }
    out_factors.push_back({"C", d});
    const DensityMatrix sent = apply(channel, cloned, acted, SubsystemLayout(out_factors));
    t.stages.push_back({"transmitted", sent});

    std::vector<std::string> party_labels{"A"};
    party_labels.insert(party_labels.end(), receivers.begin(), receivers.end());
    SubsystemLayout party_layout = sent.layout().select(party_labels);
    const Ket target = ghz_ket(d, n + 1);

    t.controller_branches = projective_measure(sent, fourier_basis(d), "C");
    double f_mean = 0.0;
    double f_min = 1.0;
    bool all_max = true;
    Operator avg = Operator::Zero(static_cast<Eigen::Index>(party_layout.total_dim()),
                                  static_cast<Eigen::Index>(party_layout.total_dim()));
    for (const auto &cb : t.controller_branches) {
        TranscriptBranch br;
        br.controller_outcome = cb.outcome;
        br.probability = cb.probability;
        if (cb.is_null()) {
            br.null = true;
            t.branches.push_back(std::move(br));
            continue;
        }
        const DensityMatrix corrected =
            reorder(conjugate(*cb.state, correction_unitary(cb.outcome, d), {receivers.front()}),
                    party_labels);
        const double f = fidelity(corrected, target);
        f_mean += cb.probability * f;
        f_min = std::min(f_min, f);
        avg += cb.probability * corrected.matrix();
        const auto psi = purify_if_pure(corrected);
        all_max = all_max && psi.has_value() &&
                  is_maximally_entangled(*psi, party_layout, {"A"}, policy().spectral);
        br.state = corrected;
        t.branches.push_back(std::move(br));
    }
    t.metrics["fidelity_mean"] = f_mean;
    t.metrics["fidelity_min"] = f_min;
    t.metrics["maximally_entangled"] = all_max ? 1.0 : 0.0;
    if (const auto psi = purify_if_pure(sent)) {
        t.metrics["ggm_pre_measurement"] = ggm(*psi, sent.layout());
    }
    if (d == 2 && n == 1) {
        avg /= avg.trace().real();
        avg = 0.5 * (avg + avg.adjoint()).eval();
        t.metrics["concurrence_ab"] = concurrence_2qubit(DensityMatrix(avg, party_layout));
    }
    return t;
}

} // namespace detail

/// Alice copies A onto A' (clone_extend_unitary), A' is sent through K with
/// C as control and arrives at B, Charlie measures C in the Fourier basis and
/// Bob applies correction_unitary(m_C). Metrics compare AB with |Φ+>.
inline ProtocolTranscript run_bipartite_establishment(std::size_t d, const ResourceState &resource) {
    if (d < 2) {
        throw std::invalid_argument("run_bipartite_establishment: d must be at least 2");
    }
    check_resource(ipow(d, 3), "run_bipartite_establishment");
    return detail::run_distribution("bipartite", d, 1, resource, k_closed_form(d), {"A'"}, {"B"});
}

/// N-receiver generalization: A is copied onto A1…AN, which travel through
/// K^(N) to B1…BN; B1 applies the correction. Metrics compare A B1…BN with
/// the (N+1)-party GHZ state.
inline ProtocolTranscript run_ghz_distribution(std::size_t d, std::size_t n,
                                               const ResourceState &resource) {
    if (d < 2 || n < 1) {
        throw std::invalid_argument("run_ghz_distribution: need d >= 2 and N >= 1");
    }
    check_resource(ipow(d, n + 2), "run_ghz_distribution");
    return detail::run_distribution("ghz", d, n, resource, k_multiline(d, n),
                                    detail::numbered("A", n), detail::numbered("B", n));
}

/// Encoding families for the fixed-configuration baseline.
enum class FixedEncoding {
    /// U_x on T of the maximally entangled state.
    dfs_phase,
    /// |x>_T |x>_C.
    classical_flag,
    /// The maximally entangled state for every x.
    identical,
};

/// The d encoded states ρ_TC(x) of a family, on layout (T, C).
inline std::vector<DensityMatrix> fixed_baseline_encodings(std::size_t d, FixedEncoding kind) {
    if (d < 2) {
        throw std::invalid_argument("fixed_baseline_encodings: d must be at least 2");
    }
    const SubsystemLayout layout{{"T", d}, {"C", d}};
    const DensityMatrix phi = DensityMatrix::pure(ghz_ket(d, 2), layout);
    std::vector<DensityMatrix> out;
    for (std::size_t x = 0; x < d; ++x) {
        switch (kind) {
        case FixedEncoding::dfs_phase:
            out.push_back(conjugate(phi, phase_encoding_unitary(x, d), {"T"}));
            break;
        case FixedEncoding::classical_flag:
            out.push_back(DensityMatrix::pure(Ket::basis(d * d, x * d + x), layout));
            break;
        case FixedEncoding::identical:
            out.push_back(phi);
            break;
        }
    }
    return out;
}

struct FixedBaselineReport {
    std::size_t d = 0;
    /// Charlie's marginal after the first erasing channel, one per x.
    std::vector<DensityMatrix> charlie_states;
    /// Decode success of the pretty-good measurement on C, uniform prior.
    double bob_success = 0.0;
    double min_charlie_trace_distance = 0.0;
    double max_charlie_trace_distance = 0.0;
    /// (d − 1 + min pairwise trace distance)/d; (1 + t)/2 at d = 2.
    double success_bound = 0.0;
    /// Bob success = 1 implies min pairwise trace distance = 1.
    bool leak_implication_holds = true;
};

/**
 * Fixed-order baseline: each ρ_TC(x) passes E_0 then E_1 on T. After the
 * first erasure everything downstream is a function of ρ_C(x), so Bob's
 * decoder is modelled as a measurement on C (the pretty-good measurement).
 */
inline FixedBaselineReport fixed_configuration_baseline(std::size_t d,
                                                        const std::vector<DensityMatrix> &encoded) {
    if (d < 2 || encoded.size() != d) {
        throw std::invalid_argument("fixed_configuration_baseline: need d >= 2 and one encoding per message");
    }
    const auto &layout = encoded.front().layout();
    if (layout.size() != 2 || layout[0].label != "T" || layout[1].label != "C" || layout[0].dim != d) {
        throw std::invalid_argument("fixed_configuration_baseline: encodings must be on (T, C) with T of dimension d");
    }
    FixedBaselineReport r;
    r.d = d;
    const KrausChannel first = erasing_channel(d, 0);
    for (const auto &rho : encoded) {
        if (rho.layout() != layout) {
            throw std::invalid_argument("fixed_configuration_baseline: encodings differ in layout");
        }
        r.charlie_states.push_back(partial_trace(apply(first, rho, {"T"}), {"C"}));
    }

    const auto cd = static_cast<Eigen::Index>(layout[1].dim);
    Operator mean = Operator::Zero(cd, cd);
    for (const auto &c : r.charlie_states) {
        mean += c.matrix() / static_cast<double>(d);
    }
    Eigen::SelfAdjointEigenSolver<Operator> es(mean);
    Eigen::VectorXd inv_root = Eigen::VectorXd::Zero(cd);
    for (Eigen::Index k = 0; k < cd; ++k) {
        if (es.eigenvalues()(k) > policy().spectral) {
            inv_root(k) = 1.0 / std::sqrt(es.eigenvalues()(k));
        }
    }
    const Operator s = es.eigenvectors() * inv_root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    double success = 0.0;
    for (const auto &c : r.charlie_states) {
        const Operator pi = s * (c.matrix() / static_cast<double>(d)) * s;
        success += (pi * c.matrix()).trace().real() / static_cast<double>(d);
    }
    r.bob_success = std::clamp(success, 0.0, 1.0);

    r.min_charlie_trace_distance = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            const double td = trace_distance(r.charlie_states[a], r.charlie_states[b]);
            r.min_charlie_trace_distance = std::min(r.min_charlie_trace_distance, td);
            r.max_charlie_trace_distance = std::max(r.max_charlie_trace_distance, td);
        }
    }
    r.success_bound = (static_cast<double>(d) - 1.0 + r.min_charlie_trace_distance) /
                      static_cast<double>(d);
    r.leak_implication_holds = r.bob_success < 1.0 - policy().spectral ||
                               r.min_charlie_trace_distance >= 1.0 - policy().spectral;
    return r;
}

enum class SweepProtocol { private_dit, bipartite, ghz };

/// λ(α) = (α, (1−α)/(d−1), …, (1−α)/(d−1)); uniform at α = 1/d.
inline std::vector<double> alpha_spectrum(std::size_t d, double alpha) {
    if (d < 2 || !(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha_spectrum: need d >= 2 and alpha in [0, 1]");
    }
    std::vector<double> s(d, (1.0 - alpha) / static_cast<double>(d - 1));
    s[0] = alpha;
    return s;
}

/// α_k = start + (end − start)·k/(points − 1); a single point gives start.
inline std::vector<double> alpha_grid(double start, double end, std::size_t points) {
    if (points == 0 || !(start >= 0.0 && start <= 1.0 && end >= 0.0 && end <= 1.0)) {
        throw std::invalid_argument("alpha_grid: need points >= 1 and endpoints in [0, 1]");
    }
    std::vector<double> g;
    for (std::size_t k = 0; k < points; ++k) {
        g.push_back(points == 1 ? start
                                : start + (end - start) * static_cast<double>(k) /
                                              static_cast<double>(points - 1));
    }
    return g;
}

struct SweepRow {
    std::vector<double> spectrum;
    /// Mean decode success (private-dit) or mean target fidelity.
    double metric = 0.0;
    double top_schmidt_sq = 0.0;
    /// Largest minus smallest Schmidt weight.
    double schmidt_gap = 0.0;
    std::optional<double> resource_concurrence;
    /// Two-state optimal decode success given m_C, private-dit at d = 2.
    std::optional<double> helstrom_success;
    bool is_uniform = false;
    bool is_perfect = false;
};

struct SweepTable {
    SweepProtocol protocol = SweepProtocol::private_dit;
    std::size_t d = 0;
    std::size_t n_receivers = 1;
    double tolerance = 1e-9;
    std::vector<SweepRow> rows;
    /// Every perfect row is uniform and every uniform row is perfect.
    bool certified = false;
};

/// Runs the DFS phase-encoding construction over each spectrum. Only the
/// construction family is probed; other encodings are not searched.
inline SweepTable necessity_sweep(SweepProtocol protocol, std::size_t d,
                                  const std::vector<std::vector<double>> &spectra,
                                  std::size_t n_receivers = 1, double tol = 1e-9) {
    if (spectra.empty()) {
        throw std::invalid_argument("necessity_sweep: empty grid");
    }
    SweepTable table{protocol, d, n_receivers, tol, {}, true};
    for (const auto &spectrum : spectra) {
        if (spectrum.size() != d) {
            throw std::invalid_argument("necessity_sweep: spectrum length differs from d");
        }
        const ResourceState resource = ResourceState::schmidt_spectrum(spectrum);
        SweepRow row;
        row.spectrum = spectrum;
        switch (protocol) {
        case SweepProtocol::private_dit: {
            std::vector<ProtocolTranscript> ts;
            for (std::size_t x = 0; x < d; ++x) {
                ts.push_back(run_private_dit(d, x, resource));
                row.metric += ts.back().metric("success_probability") / static_cast<double>(d);
            }
            if (d == 2) {
                double h = 0.0;
                for (std::size_t m = 0; m < d; ++m) {
                    const auto &b0 = ts[0].controller_branches[m];
                    const auto &b1 = ts[1].controller_branches[m];
                    if (b0.is_null() || b1.is_null()) {
                        h += 0.5 * (b0.probability + b1.probability);
                        continue;
                    }
                    const double p = 0.5 * (b0.probability + b1.probability);
                    const double prior = 0.5 * b0.probability / p;
                    h += p * (1.0 - helstrom_error(*b0.state, *b1.state, prior));
                }
                row.helstrom_success = h;
            }
            break;
        }
        case SweepProtocol::bipartite:
            row.metric = run_bipartite_establishment(d, resource).metric("fidelity_mean");
            break;
        case SweepProtocol::ghz:
            row.metric = run_ghz_distribution(d, n_receivers, resource).metric("fidelity_mean");
            break;
        }
        const auto [lo, hi] = std::minmax_element(spectrum.begin(), spectrum.end());
        row.top_schmidt_sq = *hi;
        row.schmidt_gap = *hi - *lo;
        if (d == 2) {
            row.resource_concurrence = concurrence_2qubit(resource.state());
        }
        row.is_uniform = std::all_of(spectrum.begin(), spectrum.end(), [&](double l) {
            return std::abs(l - 1.0 / static_cast<double>(d)) <= tol;
        });
        row.is_perfect = std::abs(row.metric - 1.0) <= tol;
        table.certified = table.certified && (row.is_uniform == row.is_perfect);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace qswitch
