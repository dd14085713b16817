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
 * @file combinators.hpp
 * Coherently controlled channels.
 *
 * Every combinator returns a channel on target ⊗ control, target factor
 * first, with the control in its computational basis. Enumerating
 * constructions (cyclic_switch, controlled_choice, multiline_switch_enumerated)
 * are exact but exponential and capped by kMaxEnumeration; the closed forms
 * (k_closed_form, k_multiline) are the production path.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qswitch/channel.hpp"

namespace qswitch {

/// Largest number of Kraus index tuples an enumerating combinator will visit.
inline constexpr std::size_t kMaxEnumeration = 256;

/// Largest number of complex entries (Kraus count × rows × cols) a closed
/// form will materialize.
inline constexpr std::size_t kMaxKrausEntries = std::size_t{1} << 22;

namespace detail {

inline bool is_zero_operator(const Operator &k) {
    return k.size() == 0 || k.cwiseAbs().maxCoeff() < policy().zero_operator;
}

/// Calls f(tuple) for every index tuple with tuple[l] < sizes[l].
template <typename F>
void for_each_tuple(const std::vector<std::size_t> &sizes, F &&f) {
    std::size_t total = 1;
    for (auto s : sizes) {
        total = (s != 0 && total > kMaxEnumeration / s) ? kMaxEnumeration + 1 : total * s;
    }
    if (total > kMaxEnumeration) {
        throw ResourceLimitError("enumeration over more than " +
                                 std::to_string(kMaxEnumeration) + " Kraus tuples");
    }
    std::vector<std::size_t> idx(sizes.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        f(idx);
        for (std::size_t k = idx.size(); k-- > 0;) {
            if (++idx[k] < sizes[k]) {
                break;
            }
            idx[k] = 0;
        }
    }
}

inline void require_square_family(const std::vector<KrausChannel> &channels, const char *who) {
    if (channels.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty channel list");
    }
    for (const auto &c : channels) {
        if (c.in_dim() != c.out_dim() || c.in_dim() != channels.front().in_dim()) {
            throw std::invalid_argument(std::string(who) +
                                        ": channels must be square and of equal dimension");
        }
    }
}

} // namespace detail

/**
 * Quantum SWITCH of two channels:
 *     S_ij = E_i F_j ⊗ |0><0| + F_j E_i ⊗ |1><1|.
 * Control |0> runs F then E; control |1> runs E then F.
 */
inline KrausChannel switch_two(const KrausChannel &e, const KrausChannel &f) {
    if (e.in_dim() != e.out_dim() || f.in_dim() != f.out_dim() || e.in_dim() != f.in_dim()) {
        throw std::invalid_argument("switch_two: channels must be square and of equal dimension");
    }
    const Operator p0 = ketbra(2, 0, 0);
    const Operator p1 = ketbra(2, 1, 1);
    std::vector<Operator> ks;
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = 0; j < f.size(); ++j) {
            Operator k = tensor(Operator(e[i] * f[j]), p0) + tensor(Operator(f[j] * e[i]), p1);
            if (!detail::is_zero_operator(k)) {
                ks.push_back(std::move(k));
            }
        }
    }
    return KrausChannel(std::move(ks));
}

/**
 * Superposition of the n cyclic orders of n channels, selected by an
 * n-level control:
 *     S_{i_0…i_{n−1}} = Σ_j E^{(j)}_{i_j} E^{(j⊕1)}_{i_{j⊕1}} ⋯ E^{(j⊕(n−1))}_{i_{j⊕(n−1)}} ⊗ |j><j|
 * (rightmost factor acts first). Enumerates every index tuple; zero
 * operators are dropped.
 */
inline KrausChannel cyclic_switch(const std::vector<KrausChannel> &channels) {
    detail::require_square_family(channels, "cyclic_switch");
    const std::size_t n = channels.size();
    const std::size_t dim = channels.front().in_dim();
    std::vector<std::size_t> sizes;
    for (const auto &c : channels) {
        sizes.push_back(c.size());
    }
    std::vector<Operator> ks;
    detail::for_each_tuple(sizes, [&](const std::vector<std::size_t> &idx) {
        Operator k = Operator::Zero(static_cast<Eigen::Index>(dim * n),
                                    static_cast<Eigen::Index>(dim * n));
        for (std::size_t j = 0; j < n; ++j) {
            Operator prod = identity(dim);
            for (std::size_t step = 0; step < n; ++step) {
                const std::size_t l = (j + step) % n;
                prod = (prod * channels[l][idx[l]]).eval();
            }
            k += tensor(prod, ketbra(n, j, j));
        }
        if (!detail::is_zero_operator(k)) {
            ks.push_back(std::move(k));
        }
    });
    return KrausChannel(std::move(ks));
}

/**
 * Controlled choice of two vacuum-extended channels:
 *     T_ij = Ẽ_i β_j ⊗ |0><0| + F̃_j α_i ⊗ |1><1|,
 * acting on (d+1) ⊗ 2 with α (β) the vacuum amplitudes of e (f).
 */
inline KrausChannel choice_two(const ExtendedChannel &e, const ExtendedChannel &f) {
    if (e.target_dim() != f.target_dim()) {
        throw std::invalid_argument("choice_two: extended channels differ in dimension");
    }
    const Operator p0 = ketbra(2, 0, 0);
    const Operator p1 = ketbra(2, 1, 1);
    std::vector<Operator> ks;
    for (std::size_t i = 0; i < e.realized().size(); ++i) {
        for (std::size_t j = 0; j < f.realized().size(); ++j) {
            const cplx alpha = e.amplitudes()(static_cast<Eigen::Index>(i));
            const cplx beta = f.amplitudes()(static_cast<Eigen::Index>(j));
            Operator k = tensor(Operator(beta * e.realized()[i]), p0) +
                         tensor(Operator(alpha * f.realized()[j]), p1);
            if (!detail::is_zero_operator(k)) {
                ks.push_back(std::move(k));
            }
        }
    }
    return KrausChannel(std::move(ks));
}

/**
 * Controlled choice of n vacuum-extended channels, acting on (d+1) ⊗ n:
 *     T_{i_0…i_{n−1}} = Σ_j (Π_{l≠j} α^{(l)}_{i_l}) Ẽ^{(j)}_{i_j} ⊗ |j><j|.
 */
inline KrausChannel controlled_choice(const std::vector<ExtendedChannel> &channels) {
    if (channels.empty()) {
        throw std::invalid_argument("controlled_choice: empty channel list");
    }
    const std::size_t n = channels.size();
    const std::size_t ext_dim = channels.front().target_dim() + 1;
    std::vector<std::size_t> sizes;
    for (const auto &c : channels) {
        if (c.target_dim() + 1 != ext_dim) {
            throw std::invalid_argument("controlled_choice: extended channels differ in dimension");
        }
        if (std::abs(c.amplitudes().squaredNorm() - 1.0) > policy().spectral) {
            throw std::invalid_argument("controlled_choice: unnormalized vacuum amplitudes");
        }
        sizes.push_back(c.realized().size());
    }
    std::vector<Operator> ks;
    detail::for_each_tuple(sizes, [&](const std::vector<std::size_t> &idx) {
        Operator k = Operator::Zero(static_cast<Eigen::Index>(ext_dim * n),
                                    static_cast<Eigen::Index>(ext_dim * n));
        for (std::size_t j = 0; j < n; ++j) {
            cplx t{1.0, 0.0};
            for (std::size_t l = 0; l < n; ++l) {
                if (l != j) {
                    t *= channels[l].amplitudes()(static_cast<Eigen::Index>(idx[l]));
                }
            }
            if (t != cplx{0.0, 0.0}) {
                k += tensor(Operator(t * channels[j].realized()[idx[j]]), ketbra(n, j, j));
            }
        }
        if (!detail::is_zero_operator(k)) {
            ks.push_back(std::move(k));
        }
    });
    return KrausChannel(std::move(ks));
}

/**
 * Restriction of a channel on (d+1) ⊗ c to the d ⊗ c target sector, i.e.
 * with the vacuum level (last target index) removed. The input must leave the
 * sector invariant, which holds for every controlled choice.
 */
inline KrausChannel target_sector(const KrausChannel &ch, std::size_t control_dim) {
    if (ch.in_dim() != ch.out_dim() || control_dim == 0 || ch.in_dim() % control_dim != 0) {
        throw std::invalid_argument("target_sector: shape does not factor as (d+1) x control");
    }
    const std::size_t ext = ch.in_dim() / control_dim;
    if (ext < 2) {
        throw std::invalid_argument("target_sector: no vacuum level to remove");
    }
    const std::size_t d = ext - 1;
    // Isometry from d ⊗ c into (d+1) ⊗ c.
    Operator embed = Operator::Zero(static_cast<Eigen::Index>(ext * control_dim),
                                    static_cast<Eigen::Index>(d * control_dim));
    for (std::size_t t = 0; t < d; ++t) {
        for (std::size_t c = 0; c < control_dim; ++c) {
            embed(static_cast<Eigen::Index>(t * control_dim + c),
                  static_cast<Eigen::Index>(t * control_dim + c)) = 1.0;
        }
    }
    std::vector<Operator> ks;
    for (const auto &k : ch.operators()) {
        Operator r = embed.adjoint() * k * embed;
        if (!detail::is_zero_operator(r)) {
            ks.push_back(std::move(r));
        }
    }
    return KrausChannel(std::move(ks));
}

/// controlled_choice followed by target_sector.
inline KrausChannel controlled_choice_target(const std::vector<ExtendedChannel> &channels) {
    return target_sector(controlled_choice(channels), channels.size());
}

/// The d orthogonal erasing channels E_0 … E_{d−1}.
inline std::vector<KrausChannel> erasing_family(std::size_t d) {
    std::vector<KrausChannel> out;
    out.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        out.push_back(erasing_channel(d, j));
    }
    return out;
}

/// Extensions Ẽ^{(l)}_i = |l><i| + <i|l>|triv><triv| under which the
/// controlled choice coincides with the cyclic switch.
inline std::vector<ExtendedChannel> coincidence_extensions(std::size_t d) {
    std::vector<ExtendedChannel> out;
    out.reserve(d);
    for (std::size_t l = 0; l < d; ++l) {
        Amplitudes alpha = Amplitudes::Zero(static_cast<Eigen::Index>(d));
        alpha(static_cast<Eigen::Index>(l)) = 1.0;
        out.push_back(vacuum_extend(erasing_channel(d, l), alpha));
    }
    return out;
}

/**
 * Closed form of the coincidence channel K on target ⊗ control (d ⊗ d):
 *     K(ρ) = P0 ρ P0 + Σ_j Σ_{l≠j} <l|<j|ρ|l>|j> |jj><jj|,  P0 = Σ_j |jj><jj|,
 * with Kraus set {P0} ∪ {|j><l| ⊗ |j><j| : l ≠ j}.
 */
inline KrausChannel k_closed_form(std::size_t d) {
    if (d < 2) {
        throw std::invalid_argument("k_closed_form: d must be at least 2");
    }
    const auto dd = static_cast<Eigen::Index>(d * d);
    std::vector<Operator> ks;
    Operator p0 = Operator::Zero(dd, dd);
    for (std::size_t j = 0; j < d; ++j) {
        const auto jj = static_cast<Eigen::Index>(j * d + j);
        p0(jj, jj) = 1.0;
    }
    ks.push_back(std::move(p0));
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t l = 0; l < d; ++l) {
            if (l != j) {
                ks.push_back(tensor(ketbra(d, j, l), ketbra(d, j, j)));
            }
        }
    }
    return KrausChannel(std::move(ks));
}

/**
 * Closed form of K^(N) on N target qudits ⊗ one control qudit:
 *     ρ ↦ P0^N ρ P0^N + Σ_j Σ_{y≠j…j} <y|<j|ρ|y>|j> (|j><j|)^{⊗N} ⊗ |j><j|.
 * N = 1 gives k_closed_form.
 */
inline KrausChannel k_multiline(std::size_t d, std::size_t n_lines) {
    if (d < 2 || n_lines < 1) {
        throw std::invalid_argument("k_multiline: need d >= 2 and N >= 1");
    }
    const std::size_t dim = ipow(d, n_lines + 1);
    check_resource(dim, "k_multiline");
    const std::size_t targets = dim / d;
    const std::size_t count = 1 + d * (targets - 1);
    if (count > kMaxKrausEntries / (dim * dim)) {
        throw ResourceLimitError("k_multiline: Kraus representation too large for d=" +
                                 std::to_string(d) + ", N=" + std::to_string(n_lines));
    }
    // Flat index of |j>^{⊗N}.
    std::size_t repunit = 0;
    for (std::size_t k = 0; k < n_lines; ++k) {
        repunit = repunit * d + 1;
    }
    const auto D = static_cast<Eigen::Index>(dim);
    std::vector<Operator> ks;
    ks.reserve(count);
    Operator p0 = Operator::Zero(D, D);
    for (std::size_t j = 0; j < d; ++j) {
        const auto idx = static_cast<Eigen::Index>((j * repunit) * d + j);
        p0(idx, idx) = 1.0;
    }
    ks.push_back(std::move(p0));
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t y = 0; y < targets; ++y) {
            if (y == j * repunit) {
                continue;
            }
            Operator k = Operator::Zero(D, D);
            k(static_cast<Eigen::Index>((j * repunit) * d + j),
              static_cast<Eigen::Index>(y * d + j)) = 1.0;
            ks.push_back(std::move(k));
        }
    }
    return KrausChannel(std::move(ks));
}

/// Cyclic switch of E_l^{⊗N} over l, enumerating every Kraus tuple of the
/// N-line construction.
inline KrausChannel multiline_switch_enumerated(std::size_t d, std::size_t n_lines) {
    std::vector<KrausChannel> lines;
    lines.reserve(d);
    for (std::size_t l = 0; l < d; ++l) {
        lines.push_back(tensor_power(erasing_channel(d, l), n_lines));
    }
    return cyclic_switch(lines);
}

/// Controlled choice of the N-line bundles E_l^{⊗N}, each extended with the
/// product amplitudes Π_n <i_n|l>; restricted to the target sector.
inline KrausChannel multiline_choice_enumerated(std::size_t d, std::size_t n_lines) {
    std::vector<ExtendedChannel> lines;
    lines.reserve(d);
    for (std::size_t l = 0; l < d; ++l) {
        const KrausChannel bundle = tensor_power(erasing_channel(d, l), n_lines);
        Amplitudes alpha = Amplitudes::Zero(static_cast<Eigen::Index>(bundle.size()));
        std::size_t repunit = 0;
        for (std::size_t k = 0; k < n_lines; ++k) {
            repunit = repunit * d + 1;
        }
        alpha(static_cast<Eigen::Index>(l * repunit)) = 1.0;
        lines.push_back(vacuum_extend(bundle, alpha));
    }
    return controlled_choice_target(lines);
}

/**
 * Decomposition of a controlled choice of erasing channels,
 *     T(ρ) = T₀ρT₀† + Σ_j Tr[(I − |v_j><v_j|) ⊗ |j><j| ρ] |jj><jj|,
 *     T₀ = Σ_j |j><v_j| ⊗ |j><j|,
 * on target ⊗ control (d ⊗ d).
 */
struct TDecomposition {
    Operator t0;
    /// Possibly sub-normalized, ‖v_j‖ ≤ 1.
    std::vector<Ket> v;
    /// I − |v_j><v_j| for each control value j.
    std::vector<Operator> remainder_weights;

    [[nodiscard]] std::size_t dim() const { return v.size(); }

    /// Kraus realization {T₀} ∪ {|j><k| R_j^{1/2} ⊗ |j><j|}.
    [[nodiscard]] KrausChannel reconstruct() const {
        const std::size_t d = dim();
        std::vector<Operator> ks{t0};
        for (std::size_t j = 0; j < d; ++j) {
            const Amplitudes &vj = v[j].amplitudes();
            const double n2 = vj.squaredNorm();
            // sqrt(I − vv†) = I − (1 − sqrt(1 − ‖v‖²)) v̂v̂†
            Operator root = identity(d);
            if (n2 > 0.0) {
                const double shrink = 1.0 - std::sqrt(std::max(0.0, 1.0 - n2));
                root -= shrink * (vj * vj.adjoint()) / n2;
            }
            for (std::size_t k = 0; k < d; ++k) {
                Operator row = Operator::Zero(static_cast<Eigen::Index>(d),
                                              static_cast<Eigen::Index>(d));
                row.row(static_cast<Eigen::Index>(j)) = root.row(static_cast<Eigen::Index>(k));
                Operator op = tensor(row, ketbra(d, j, j));
                if (!detail::is_zero_operator(op)) {
                    ks.push_back(std::move(op));
                }
            }
        }
        return KrausChannel(std::move(ks));
    }
};

/// Requires branch j to be an erasing channel onto |j>; each branch is
/// canonicalized first.
inline TDecomposition t_decomposition(const std::vector<ExtendedChannel> &channels) {
    const std::size_t d = channels.size();
    if (d < 2) {
        throw std::invalid_argument("t_decomposition: need at least two branches");
    }
    TDecomposition out;
    out.t0 = Operator::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
    for (std::size_t j = 0; j < d; ++j) {
        const ExtendedChannel canon = canonicalize_extension(channels[j]);
        if (canon.target_dim() != d) {
            throw std::invalid_argument("t_decomposition: branch dimension must equal branch count");
        }
        for (const auto &k : canon.base().operators()) {
            Operator off = k;
            off.row(static_cast<Eigen::Index>(j)).setZero();
            if (off.cwiseAbs().maxCoeff() > policy().structural) {
                throw std::invalid_argument("t_decomposition: branch " + std::to_string(j) +
                                            " is not an erasing channel onto |" +
                                            std::to_string(j) + ">");
            }
        }
        const Operator &k0 = canon.base()[0];
        Amplitudes vj = k0.row(static_cast<Eigen::Index>(j)).adjoint();
        out.t0 += tensor(k0, ketbra(d, j, j));
        out.remainder_weights.push_back(identity(d) - vj * vj.adjoint());
        out.v.push_back(Ket::unnormalized(std::move(vj)));
    }
    return out;
}

} // namespace qswitch
