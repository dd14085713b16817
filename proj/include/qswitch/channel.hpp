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
 * @file channel.hpp
 * Kraus channels, vacuum extensions and Choi matrices.
 *
 * Choi matrices use the unnormalized convention
 *     J(ch) = Σ_{ij} |i><j| ⊗ ch(|i><j|),
 * input factor first, so that tr J = in_dim and J(id_2) = 2|Φ+><Φ+|.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qswitch/tensor.hpp"

namespace qswitch {

/// Completely positive trace-preserving map given by Kraus operators.
class KrausChannel {
  public:
    /// All operators must share one (out_dim × in_dim) shape and satisfy
    /// Σ K†K = I within the spectral tolerance.
    explicit KrausChannel(std::vector<Operator> kraus) : kraus_(std::move(kraus)) {
        if (kraus_.empty()) {
            throw std::invalid_argument("KrausChannel: empty Kraus list");
        }
        out_dim_ = static_cast<std::size_t>(kraus_.front().rows());
        in_dim_ = static_cast<std::size_t>(kraus_.front().cols());
        if (in_dim_ == 0 || out_dim_ == 0) {
            throw std::invalid_argument("KrausChannel: zero dimension");
        }
        Operator sum = Operator::Zero(kraus_.front().cols(), kraus_.front().cols());
        for (const auto &k : kraus_) {
            if (static_cast<std::size_t>(k.rows()) != out_dim_ ||
                static_cast<std::size_t>(k.cols()) != in_dim_) {
                throw std::invalid_argument("KrausChannel: Kraus operators differ in shape");
            }
            sum.noalias() += k.adjoint() * k;
        }
        const double dev = (sum - identity(in_dim_)).cwiseAbs().maxCoeff();
        if (dev > policy().spectral) {
            throw std::invalid_argument("KrausChannel: not trace preserving (deviation " +
                                        std::to_string(dev) + ")");
        }
    }

    [[nodiscard]] std::size_t in_dim() const { return in_dim_; }
    [[nodiscard]] std::size_t out_dim() const { return out_dim_; }
    [[nodiscard]] std::size_t size() const { return kraus_.size(); }
    [[nodiscard]] const std::vector<Operator> &operators() const { return kraus_; }
    [[nodiscard]] const Operator &operator[](std::size_t i) const { return kraus_[i]; }

  private:
    std::vector<Operator> kraus_;
    std::size_t in_dim_ = 0;
    std::size_t out_dim_ = 0;
};

inline KrausChannel identity_channel(std::size_t d) { return KrausChannel({identity(d)}); }

inline KrausChannel unitary_channel(const Operator &u) { return KrausChannel({u}); }

/// Erases any input to |j>: Kraus set { |j><i| : i = 0..d−1 }.
inline KrausChannel erasing_channel(std::size_t d, std::size_t j) {
    if (d == 0 || j >= d) {
        throw std::invalid_argument("erasing_channel: need 0 <= j < d");
    }
    std::vector<Operator> ks;
    ks.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        ks.push_back(ketbra(d, j, i));
    }
    return KrausChannel(std::move(ks));
}

/// K'_a = Σ_i W(a,i) K_i for an isometry W (W†W = I). Describes the same
/// channel.
inline KrausChannel remix_kraus(const KrausChannel &ch, const Operator &isometry) {
    if (static_cast<std::size_t>(isometry.cols()) != ch.size()) {
        throw std::invalid_argument("remix_kraus: isometry has wrong number of columns");
    }
    const double dev =
        (isometry.adjoint() * isometry - identity(ch.size())).cwiseAbs().maxCoeff();
    if (dev > policy().spectral) {
        throw std::invalid_argument("remix_kraus: mixing matrix is not an isometry");
    }
    std::vector<Operator> out;
    out.reserve(static_cast<std::size_t>(isometry.rows()));
    for (Eigen::Index a = 0; a < isometry.rows(); ++a) {
        Operator k = Operator::Zero(static_cast<Eigen::Index>(ch.out_dim()),
                                    static_cast<Eigen::Index>(ch.in_dim()));
        for (std::size_t i = 0; i < ch.size(); ++i) {
            k += isometry(a, static_cast<Eigen::Index>(i)) * ch[i];
        }
        out.push_back(std::move(k));
    }
    return KrausChannel(std::move(out));
}

/// ch^{⊗n}; Kraus operators indexed by n-tuples, first factor most significant.
inline KrausChannel tensor_power(const KrausChannel &ch, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("tensor_power: n must be positive");
    }
    std::vector<Operator> ks = ch.operators();
    for (std::size_t p = 1; p < n; ++p) {
        std::vector<Operator> next;
        next.reserve(ks.size() * ch.size());
        for (const auto &a : ks) {
            for (const auto &b : ch.operators()) {
                next.push_back(tensor(a, b));
            }
        }
        ks = std::move(next);
    }
    return KrausChannel(std::move(ks));
}

/// Channel on d+1 dimensions with Kraus operators K_i ⊕ α_i|triv><triv|;
/// |triv> is the last basis index.
class ExtendedChannel {
  public:
    [[nodiscard]] const KrausChannel &base() const { return base_; }
    [[nodiscard]] const Amplitudes &amplitudes() const { return amplitudes_; }
    [[nodiscard]] const KrausChannel &realized() const { return realized_; }
    [[nodiscard]] std::size_t target_dim() const { return base_.in_dim(); }
    [[nodiscard]] std::size_t triv_index() const { return base_.in_dim(); }

  private:
    friend ExtendedChannel vacuum_extend(const KrausChannel &base, const Amplitudes &amplitudes);
    ExtendedChannel(KrausChannel base, Amplitudes amplitudes, KrausChannel realized)
        : base_(std::move(base)), amplitudes_(std::move(amplitudes)),
          realized_(std::move(realized)) {}

    KrausChannel base_;
    Amplitudes amplitudes_;
    KrausChannel realized_;
};

inline ExtendedChannel vacuum_extend(const KrausChannel &base, const Amplitudes &amplitudes) {
    if (static_cast<std::size_t>(amplitudes.size()) != base.size()) {
        throw std::invalid_argument("vacuum_extend: need one amplitude per Kraus operator");
    }
    if (base.in_dim() != base.out_dim()) {
        throw std::invalid_argument("vacuum_extend: base channel must be square");
    }
    if (std::abs(amplitudes.squaredNorm() - 1.0) > policy().spectral) {
        throw std::invalid_argument("vacuum_extend: vacuum amplitudes are not normalized");
    }
    const auto d = static_cast<Eigen::Index>(base.in_dim());
    std::vector<Operator> ks;
    ks.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        Operator k = Operator::Zero(d + 1, d + 1);
        k.topLeftCorner(d, d) = base[i];
        k(d, d) = amplitudes(static_cast<Eigen::Index>(i));
        ks.push_back(std::move(k));
    }
    return ExtendedChannel(base, amplitudes, KrausChannel(std::move(ks)));
}

/**
 * Same extended channel, re-expressed so the vacuum amplitudes are
 * (1, 0, …, 0).
 *
 * The Kraus index is remixed by the unitary U = −e^{−iφ}(I − 2ww†/w†w),
 * w = α + e^{iφ}e₀, φ = arg α₀, which satisfies Uα = e₀. An input that is
 * already exactly canonical is returned as is.
 */
inline ExtendedChannel canonicalize_extension(const ExtendedChannel &ext) {
    const Amplitudes &alpha = ext.amplitudes();
    const auto n = alpha.size();
    if (alpha(0) == cplx{1.0, 0.0} && alpha.tail(n - 1).isZero(0.0)) {
        return ext;
    }
    const double phi = std::abs(alpha(0)) == 0.0 ? 0.0 : std::arg(alpha(0));
    const cplx phase = std::polar(1.0, phi);
    Amplitudes w = alpha;
    w(0) += phase;
    const Operator h = identity(static_cast<std::size_t>(n)) -
                       2.0 * (w * w.adjoint()) / w.squaredNorm();
    const Operator u = -std::conj(phase) * h;

    Amplitudes canonical = Amplitudes::Zero(n);
    canonical(0) = 1.0;
    return vacuum_extend(remix_kraus(ext.base(), u), canonical);
}

/// Unnormalized Choi matrix (see file comment).
struct ChoiMatrix {
    Operator entries;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
};

/// Largest Choi dimension (in_dim·out_dim) that will be materialized.
inline constexpr std::size_t kMaxChoiDim = 1024;

inline ChoiMatrix choi(const KrausChannel &ch) {
    const std::size_t dim = ch.in_dim() * ch.out_dim();
    if (dim > kMaxChoiDim) {
        throw ResourceLimitError("choi: Choi dimension " + std::to_string(dim) +
                                 " exceeds " + std::to_string(kMaxChoiDim));
    }
    const auto din = static_cast<Eigen::Index>(ch.in_dim());
    const auto dout = static_cast<Eigen::Index>(ch.out_dim());
    Operator j = Operator::Zero(din * dout, din * dout);
    Amplitudes v(din * dout);
    for (const auto &k : ch.operators()) {
        // |K>> = Σ_i |i> ⊗ K|i>
        for (Eigen::Index i = 0; i < din; ++i) {
            v.segment(i * dout, dout) = k.col(i);
        }
        j.noalias() += v * v.adjoint();
    }
    return {std::move(j), ch.in_dim(), ch.out_dim()};
}

struct ChannelComparison {
    bool equal = false;
    /// Frobenius distance between Choi matrices.
    double distance = 0.0;
    double tolerance = 0.0;
};

inline ChannelComparison channels_equal(const KrausChannel &a, const KrausChannel &b,
                                        double tol = policy().spectral) {
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) {
        throw std::invalid_argument("channels_equal: dimension mismatch");
    }
    const double dist = (choi(a).entries - choi(b).entries).norm();
    return {dist <= tol, dist, tol};
}

/**
 * Apply `ch` to the factors `acting_on` (in that order) of `rho`, identity
 * elsewhere.
 *
 * `output` names the factors that replace `acting_on`, position by
 * position; it defaults to the acted factors themselves and must be given
 * when the channel changes dimension.
 */
inline DensityMatrix apply(const KrausChannel &ch, const DensityMatrix &rho,
                           const std::vector<std::string> &acting_on,
                           const std::optional<SubsystemLayout> &output = std::nullopt) {
    const auto &layout = rho.layout();
    const SubsystemLayout acted = layout.select(acting_on);
    if (acted.total_dim() != ch.in_dim()) {
        throw std::invalid_argument("apply: channel input dimension " +
                                    std::to_string(ch.in_dim()) +
                                    " does not match acted subsystems (" +
                                    std::to_string(acted.total_dim()) + ")");
    }
    const SubsystemLayout out_factors = output.value_or(acted);
    if (out_factors.size() != acted.size() || out_factors.total_dim() != ch.out_dim()) {
        throw std::invalid_argument("apply: output factors do not match the channel output");
    }

    auto rest = layout.complement(acting_on);
    const std::size_t rest_dim = layout.select(rest).total_dim();
    auto order = rest;
    order.insert(order.end(), acting_on.begin(), acting_on.end());
    const DensityMatrix permuted = reorder(rho, order);

    const auto dout = static_cast<Eigen::Index>(rest_dim * ch.out_dim());
    Operator out = Operator::Zero(dout, dout);
    for (const auto &k : ch.operators()) {
        const SparseOperator lifted = detail::lift(k, rest_dim);
        Operator tmp = lifted * permuted.matrix();
        out.noalias() += tmp * lifted.adjoint();
    }
    out = 0.5 * (out + out.adjoint()).eval();

    std::vector<SubsystemLayout::Factor> produced;
    for (const auto &r : rest) {
        produced.push_back(layout[layout.index_of(r)]);
    }
    for (const auto &f : out_factors.factors()) {
        produced.push_back(f);
    }
    std::vector<std::string> target;
    for (const auto &f : layout.factors()) {
        const auto it = std::find(acting_on.begin(), acting_on.end(), f.label);
        target.push_back(it == acting_on.end()
                             ? f.label
                             : out_factors[static_cast<std::size_t>(it - acting_on.begin())].label);
    }
    return reorder(DensityMatrix(std::move(out), SubsystemLayout(std::move(produced))), target);
}

} // namespace qswitch
