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
 * @file tensor.hpp
 * Dense complex linear algebra over multi-qudit Hilbert spaces.
 *
 * Tensor factor order follows the SubsystemLayout: the first factor is the
 * most significant digit of a flat basis index.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/KroneckerProduct>

#include "qswitch/numeric_policy.hpp"

namespace qswitch {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Amplitudes = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<cplx>;

/// Ordered tensor factors, each with a unique role label.
class SubsystemLayout {
  public:
    struct Factor {
        std::string label;
        std::size_t dim;
        bool operator==(const Factor &) const = default;
    };

    SubsystemLayout() = default;
    SubsystemLayout(std::initializer_list<Factor> factors)
        : SubsystemLayout(std::vector<Factor>(factors)) {}
    explicit SubsystemLayout(std::vector<Factor> factors)
        : factors_(std::move(factors)) {
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (factors_[i].dim == 0) {
                throw std::invalid_argument("subsystem '" + factors_[i].label +
                                            "' has dimension 0");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (factors_[j].label == factors_[i].label) {
                    throw std::invalid_argument("duplicate subsystem label '" +
                                                factors_[i].label + "'");
                }
            }
        }
    }

    [[nodiscard]] std::size_t size() const { return factors_.size(); }
    [[nodiscard]] bool empty() const { return factors_.empty(); }
    [[nodiscard]] const std::vector<Factor> &factors() const { return factors_; }
    [[nodiscard]] const Factor &operator[](std::size_t i) const { return factors_[i]; }

    [[nodiscard]] std::size_t total_dim() const {
        std::size_t d = 1;
        for (const auto &f : factors_) {
            d *= f.dim;
        }
        return d;
    }

    [[nodiscard]] bool contains(const std::string &label) const {
        return std::any_of(factors_.begin(), factors_.end(),
                           [&](const Factor &f) { return f.label == label; });
    }

    [[nodiscard]] std::size_t index_of(const std::string &label) const {
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (factors_[i].label == label) {
                return i;
            }
        }
        throw std::invalid_argument("unknown subsystem label '" + label + "'");
    }

    [[nodiscard]] std::size_t dim_of(const std::string &label) const {
        return factors_[index_of(label)].dim;
    }

    [[nodiscard]] std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(factors_.size());
        for (const auto &f : factors_) {
            out.push_back(f.label);
        }
        return out;
    }

    /// Sub-layout of the given labels, in the given order.
    [[nodiscard]] SubsystemLayout select(const std::vector<std::string> &labels) const {
        std::vector<Factor> out;
        out.reserve(labels.size());
        for (const auto &l : labels) {
            out.push_back(factors_[index_of(l)]);
        }
        return SubsystemLayout(std::move(out));
    }

    /// Labels not in `labels`, in layout order.
    [[nodiscard]] std::vector<std::string>
    complement(const std::vector<std::string> &labels) const {
        for (const auto &l : labels) {
            (void)index_of(l);
        }
        std::vector<std::string> out;
        for (const auto &f : factors_) {
            if (std::find(labels.begin(), labels.end(), f.label) == labels.end()) {
                out.push_back(f.label);
            }
        }
        return out;
    }

    /// Labels from `labels`, sorted into layout order.
    [[nodiscard]] std::vector<std::string>
    in_layout_order(const std::vector<std::string> &labels) const {
        std::vector<std::string> out;
        for (const auto &f : factors_) {
            if (std::find(labels.begin(), labels.end(), f.label) != labels.end()) {
                out.push_back(f.label);
            }
        }
        return out;
    }

    [[nodiscard]] SubsystemLayout relabeled(const std::string &from,
                                            const std::string &to) const {
        auto out = factors_;
        out[index_of(from)].label = to;
        return SubsystemLayout(std::move(out));
    }

    bool operator==(const SubsystemLayout &) const = default;

  private:
    std::vector<Factor> factors_;
};

/// State vector. Normalized unless built through `unnormalized`.
class Ket {
  public:
    /// Requires unit norm within the structural tolerance.
    explicit Ket(Amplitudes amplitudes) : amp_(std::move(amplitudes)) {
        if (amp_.size() == 0) {
            throw std::invalid_argument("ket must have positive dimension");
        }
        const double n = amp_.norm();
        if (std::abs(n - 1.0) > policy().structural) {
            throw std::invalid_argument("ket norm " + std::to_string(n) +
                                        " is not 1; use Ket::normalize or "
                                        "Ket::unnormalized");
        }
    }

    static Ket unnormalized(Amplitudes amplitudes) {
        if (amplitudes.size() == 0) {
            throw std::invalid_argument("ket must have positive dimension");
        }
        Ket k;
        k.amp_ = std::move(amplitudes);
        k.normalized_ = std::abs(k.amp_.norm() - 1.0) <= policy().structural;
        return k;
    }

    static Ket normalize(const Amplitudes &amplitudes) {
        const double n = amplitudes.norm();
        if (n == 0.0) {
            throw std::invalid_argument("cannot normalize the zero vector");
        }
        return Ket(Amplitudes(amplitudes / n));
    }

    static Ket basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw std::invalid_argument("basis index out of range");
        }
        Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(dim));
        a(static_cast<Eigen::Index>(index)) = 1.0;
        return Ket(std::move(a));
    }

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
    [[nodiscard]] const Amplitudes &amplitudes() const { return amp_; }
    [[nodiscard]] cplx operator[](std::size_t i) const {
        return amp_(static_cast<Eigen::Index>(i));
    }
    [[nodiscard]] bool is_normalized() const { return normalized_; }
    [[nodiscard]] double norm() const { return amp_.norm(); }
    [[nodiscard]] Operator projector() const { return amp_ * amp_.adjoint(); }

  private:
    Ket() = default;
    Amplitudes amp_;
    bool normalized_ = true;
};

inline Operator tensor(const Operator &a, const Operator &b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

inline Ket tensor(const Ket &a, const Ket &b) {
    Amplitudes out(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        out.segment(i * b.amplitudes().size(), b.amplitudes().size()) =
            a.amplitudes()(i) * b.amplitudes();
    }
    if (a.is_normalized() && b.is_normalized()) {
        return Ket(std::move(out));
    }
    return Ket::unnormalized(std::move(out));
}

template <typename T, typename... Rest>
T tensor(const T &a, const T &b, const Rest &...rest) {
    return tensor(tensor(a, b), rest...);
}

inline Operator identity(std::size_t dim) {
    return Operator::Identity(static_cast<Eigen::Index>(dim),
                              static_cast<Eigen::Index>(dim));
}

/// |row><col| in the given dimension.
inline Operator ketbra(std::size_t dim, std::size_t row, std::size_t col) {
    Operator m = Operator::Zero(static_cast<Eigen::Index>(dim),
                                static_cast<Eigen::Index>(dim));
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = 1.0;
    return m;
}

/// Hermitian, unit-trace, positive semidefinite operator over a layout.
class DensityMatrix {
  public:
    /// Validates hermiticity and trace (structural tolerance) and the minimum
    /// eigenvalue (spectral tolerance; checked up to dimension 1024).
    DensityMatrix(Operator rho, SubsystemLayout layout)
        : rho_(std::move(rho)), layout_(std::move(layout)) {
        const auto d = static_cast<Eigen::Index>(layout_.total_dim());
        if (rho_.rows() != d || rho_.cols() != d) {
            throw std::invalid_argument(
                "density matrix shape " + std::to_string(rho_.rows()) + "x" +
                std::to_string(rho_.cols()) + " does not match layout dimension " +
                std::to_string(d));
        }
        const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > policy().structural) {
            throw std::invalid_argument("density matrix is not Hermitian (deviation " +
                                        std::to_string(herm) + ")");
        }
        const double tr = rho_.trace().real();
        if (std::abs(tr - 1.0) > policy().structural) {
            throw std::invalid_argument("density matrix trace " + std::to_string(tr) +
                                        " is not 1");
        }
        if (d <= 1024) {
            Eigen::SelfAdjointEigenSolver<Operator> es(rho_, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -policy().spectral) {
                throw std::invalid_argument(
                    "density matrix has negative eigenvalue " +
                    std::to_string(es.eigenvalues().minCoeff()));
            }
        }
    }

    static DensityMatrix pure(const Ket &psi, SubsystemLayout layout) {
        if (!psi.is_normalized()) {
            throw std::invalid_argument("pure state requires a normalized ket");
        }
        return DensityMatrix(psi.projector(), std::move(layout));
    }

    static DensityMatrix maximally_mixed(SubsystemLayout layout) {
        const auto d = layout.total_dim();
        return DensityMatrix(identity(d) / static_cast<double>(d), std::move(layout));
    }

    [[nodiscard]] const Operator &matrix() const { return rho_; }
    [[nodiscard]] const SubsystemLayout &layout() const { return layout_; }
    [[nodiscard]] std::size_t dim() const { return layout_.total_dim(); }
    [[nodiscard]] cplx operator()(std::size_t r, std::size_t c) const {
        return rho_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    [[nodiscard]] double purity() const { return (rho_ * rho_).trace().real(); }

    [[nodiscard]] DensityMatrix relabeled(const std::string &from,
                                          const std::string &to) const {
        return DensityMatrix(rho_, layout_.relabeled(from, to));
    }

  private:
    Operator rho_;
    SubsystemLayout layout_;
};

inline DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    auto factors = a.layout().factors();
    factors.insert(factors.end(), b.layout().factors().begin(),
                   b.layout().factors().end());
    return DensityMatrix(tensor(a.matrix(), b.matrix()), SubsystemLayout(factors));
}

namespace detail {

/// perm[new_index] = old_index when the factors of `layout` are reordered to
/// `order` (which must name every label exactly once).
inline std::vector<std::size_t> subsystem_permutation(const SubsystemLayout &layout,
                                                      const std::vector<std::string> &order) {
    if (order.size() != layout.size()) {
        throw std::invalid_argument("reorder must name every subsystem exactly once");
    }
    const std::size_t n = layout.size();
    std::vector<std::size_t> src(n);
    for (std::size_t k = 0; k < n; ++k) {
        src[k] = layout.index_of(order[k]);
        for (std::size_t q = 0; q < k; ++q) {
            if (src[q] == src[k]) {
                throw std::invalid_argument("reorder names '" + order[k] + "' twice");
            }
        }
    }
    // Place value of each old factor in the old flat index.
    std::vector<std::size_t> old_stride(n, 1);
    for (std::size_t i = n; i-- > 1;) {
        old_stride[i - 1] = old_stride[i] * layout[i].dim;
    }
    const std::size_t total = layout.total_dim();
    std::vector<std::size_t> perm(total);
    std::vector<std::size_t> digits(n, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t old = 0;
        for (std::size_t k = 0; k < n; ++k) {
            old += digits[k] * old_stride[src[k]];
        }
        perm[idx] = old;
        for (std::size_t k = n; k-- > 0;) {
            if (++digits[k] < layout[src[k]].dim) {
                break;
            }
            digits[k] = 0;
        }
    }
    return perm;
}

inline Operator permute_matrix(const Operator &m, const std::vector<std::size_t> &perm) {
    const auto d = static_cast<Eigen::Index>(perm.size());
    Operator out(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            out(r, c) = m(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(r)]),
                          static_cast<Eigen::Index>(perm[static_cast<std::size_t>(c)]));
        }
    }
    return out;
}

inline Amplitudes permute_vector(const Amplitudes &v, const std::vector<std::size_t> &perm) {
    Amplitudes out(static_cast<Eigen::Index>(perm.size()));
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(perm[i]));
    }
    return out;
}

/// I_rest ⊗ op as a sparse matrix; zero entries of `op` are skipped.
inline SparseOperator lift(const Operator &op, std::size_t rest_dim) {
    std::vector<Eigen::Triplet<cplx>> trips;
    const auto rows = op.rows();
    const auto cols = op.cols();
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const cplx v = op(r, c);
            if (v == cplx{0.0, 0.0}) {
                continue;
            }
            for (std::size_t k = 0; k < rest_dim; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                trips.emplace_back(kk * rows + r, kk * cols + c, v);
            }
        }
    }
    SparseOperator s(static_cast<Eigen::Index>(rest_dim) * rows,
                     static_cast<Eigen::Index>(rest_dim) * cols);
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
}

} // namespace detail

/// Reorder the tensor factors of `rho` to `order`.
inline DensityMatrix reorder(const DensityMatrix &rho, const std::vector<std::string> &order) {
    if (order == rho.layout().labels()) {
        return rho;
    }
    const auto perm = detail::subsystem_permutation(rho.layout(), order);
    return DensityMatrix(detail::permute_matrix(rho.matrix(), perm),
                         rho.layout().select(order));
}

inline Ket reorder(const Ket &psi, const SubsystemLayout &layout,
                   const std::vector<std::string> &order) {
    const auto perm = detail::subsystem_permutation(layout, order);
    return Ket::unnormalized(detail::permute_vector(psi.amplitudes(), perm));
}

/// Reduced state on `keep`, in the original relative order.
inline DensityMatrix partial_trace(const DensityMatrix &rho, const std::vector<std::string> &keep) {
    if (keep.empty()) {
        throw std::invalid_argument("partial_trace: keep must be nonempty");
    }
    const auto &layout = rho.layout();
    const auto traced = layout.complement(keep);
    const auto kept = layout.in_layout_order(keep);
    if (kept.size() != keep.size()) {
        throw std::invalid_argument("partial_trace: duplicate labels in keep");
    }
    auto order = kept;
    order.insert(order.end(), traced.begin(), traced.end());
    const DensityMatrix permuted = reorder(rho, order);

    const auto kept_layout = layout.select(kept);
    const auto kd = static_cast<Eigen::Index>(kept_layout.total_dim());
    const auto td = static_cast<Eigen::Index>(layout.select(traced).total_dim());
    Operator out = Operator::Zero(kd, kd);
    const Operator &m = permuted.matrix();
    for (Eigen::Index t = 0; t < td; ++t) {
        for (Eigen::Index c = 0; c < kd; ++c) {
            for (Eigen::Index r = 0; r < kd; ++r) {
                out(r, c) += m(r * td + t, c * td + t);
            }
        }
    }
    return DensityMatrix(std::move(out), kept_layout);
}

/// (1/√d) Σ_j exp(+2πi·j·m/d) |j>.
inline Ket fourier_ket(std::size_t d, std::size_t m) {
    if (d == 0) {
        throw std::invalid_argument("fourier_ket: d must be positive");
    }
    if (m >= d) {
        throw std::invalid_argument("fourier_ket: m out of range");
    }
    Amplitudes a(static_cast<Eigen::Index>(d));
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) {
        // Reduce j*m mod d first so the phase argument stays exact for large d.
        const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * m) % d) /
                             static_cast<double>(d);
        a(static_cast<Eigen::Index>(j)) = s * std::polar(1.0, phase);
    }
    return Ket::normalize(a);
}

inline std::vector<Ket> fourier_basis(std::size_t d) {
    std::vector<Ket> b;
    b.reserve(d);
    for (std::size_t m = 0; m < d; ++m) {
        b.push_back(fourier_ket(d, m));
    }
    return b;
}

inline std::vector<Ket> computational_basis(std::size_t d) {
    std::vector<Ket> b;
    b.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        b.push_back(Ket::basis(d, j));
    }
    return b;
}

/// (1/√d) Σ_j |j>^{⊗n}.
inline Ket ghz_ket(std::size_t d, std::size_t parties) {
    const std::size_t total = ipow(d, parties);
    Amplitudes a = Amplitudes::Zero(static_cast<Eigen::Index>(total));
    std::size_t step = 0;
    for (std::size_t k = 0; k < parties; ++k) {
        step = step * d + 1;
    }
    for (std::size_t j = 0; j < d; ++j) {
        a(static_cast<Eigen::Index>(j * step)) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return Ket::normalize(a);
}

struct SchmidtDecomposition {
    /// Descending, strictly positive (above the structural tolerance).
    std::vector<double> coefficients;
    std::vector<Ket> left;
    std::vector<Ket> right;
    SubsystemLayout left_layout;
    SubsystemLayout right_layout;
};

/// Schmidt decomposition across `left_labels` | rest. Coefficients below the
/// structural tolerance are dropped.
inline SchmidtDecomposition schmidt_decomposition(const Ket &psi, const SubsystemLayout &layout,
                                                  const std::vector<std::string> &left_labels) {
    if (psi.dim() != layout.total_dim()) {
        throw std::invalid_argument("schmidt_decomposition: ket/layout dimension mismatch");
    }
    const auto left = layout.in_layout_order(left_labels);
    if (left.size() != left_labels.size()) {
        throw std::invalid_argument("schmidt_decomposition: unknown or repeated label in cut");
    }
    const auto right = layout.complement(left);
    if (left.empty() || right.empty()) {
        throw std::invalid_argument("schmidt_decomposition: both sides of the cut must be nonempty");
    }
    auto order = left;
    order.insert(order.end(), right.begin(), right.end());
    const Ket permuted = reorder(psi, layout, order);

    SchmidtDecomposition out;
    out.left_layout = layout.select(left);
    out.right_layout = layout.select(right);
    const auto dl = static_cast<Eigen::Index>(out.left_layout.total_dim());
    const auto dr = static_cast<Eigen::Index>(out.right_layout.total_dim());
    Operator m(dl, dr);
    for (Eigen::Index a = 0; a < dl; ++a) {
        for (Eigen::Index b = 0; b < dr; ++b) {
            m(a, b) = permuted.amplitudes()(a * dr + b);
        }
    }
    Eigen::JacobiSVD<Operator> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) <= policy().structural) {
            break;
        }
        out.coefficients.push_back(s(k));
        out.left.push_back(Ket::normalize(svd.matrixU().col(k)));
        out.right.push_back(Ket::normalize(svd.matrixV().col(k).conjugate()));
    }
    return out;
}

/// One outcome of a projective measurement.
struct MeasurementBranch {
    std::size_t outcome = 0;
    double probability = 0.0;
    /// Post-measurement state on the unmeasured labels; empty for null
    /// (probability below `NumericPolicy::null_branch`) branches.
    std::optional<DensityMatrix> state;

    [[nodiscard]] bool is_null() const { return !state.has_value(); }
};

/// Measure `subsystem` of `rho` in an orthonormal `basis`; one branch per
/// basis vector, in basis order.
inline std::vector<MeasurementBranch> projective_measure(const DensityMatrix &rho,
                                                         const std::vector<Ket> &basis,
                                                         const std::string &subsystem) {
    const auto &layout = rho.layout();
    const std::size_t dm = layout.dim_of(subsystem);
    if (basis.size() != dm) {
        throw std::invalid_argument("projective_measure: basis has " +
                                    std::to_string(basis.size()) + " vectors for a factor of dimension " +
                                    std::to_string(dm));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].dim() != dm) {
            throw std::invalid_argument("projective_measure: basis vector dimension mismatch");
        }
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const cplx g = basis[i].amplitudes().dot(basis[j].amplitudes());
            worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
    if (worst > policy().spectral) {
        throw std::invalid_argument("projective_measure: basis is not orthonormal (max Gram deviation " +
                                    std::to_string(worst) + ")");
    }

    auto rest = layout.complement({subsystem});
    auto order = rest;
    order.push_back(subsystem);
    const DensityMatrix permuted = reorder(rho, order);
    const auto rest_layout = layout.select(rest);
    const auto rd = static_cast<Eigen::Index>(rest_layout.total_dim());
    const auto md = static_cast<Eigen::Index>(dm);
    const Operator &m = permuted.matrix();

    std::vector<MeasurementBranch> out;
    out.reserve(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const Amplitudes &b = basis[k].amplitudes();
        // (I ⊗ <b|) rho (I ⊗ |b>)
        Operator post = Operator::Zero(rd, rd);
        for (Eigen::Index c = 0; c < rd; ++c) {
            for (Eigen::Index r = 0; r < rd; ++r) {
                cplx acc{0.0, 0.0};
                for (Eigen::Index p = 0; p < md; ++p) {
                    for (Eigen::Index q = 0; q < md; ++q) {
                        acc += std::conj(b(p)) * m(r * md + p, c * md + q) * b(q);
                    }
                }
                post(r, c) = acc;
            }
        }
        MeasurementBranch br;
        br.outcome = k;
        br.probability = std::max(0.0, post.trace().real());
        if (br.probability >= policy().null_branch) {
            post /= br.probability;
            post = 0.5 * (post + post.adjoint()).eval();
            br.state.emplace(std::move(post), rest_layout);
        }
        out.push_back(std::move(br));
    }
    return out;
}

/// Hermitian eigenvalues, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Operator &m) {
    Eigen::SelfAdjointEigenSolver<Operator> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Trace norm of a Hermitian operator.
inline double trace_norm(const Operator &hermitian) {
    return hermitian_eigenvalues(hermitian).cwiseAbs().sum();
}

/// (1/2)‖rho − sigma‖₁.
inline double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const double t = 0.5 * trace_norm(rho.matrix() - sigma.matrix());
    return std::clamp(t, 0.0, 1.0);
}

/// <psi|rho|psi>.
inline double fidelity(const DensityMatrix &rho, const Ket &psi) {
    if (rho.dim() != psi.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const cplx f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
    return f.real();
}

/// U rho U† with U acting on `acting_on` (in that order).
inline DensityMatrix conjugate(const DensityMatrix &rho, const Operator &unitary,
                               const std::vector<std::string> &acting_on) {
    const auto &layout = rho.layout();
    const auto acted = layout.select(acting_on);
    if (static_cast<std::size_t>(unitary.rows()) != acted.total_dim() ||
        unitary.rows() != unitary.cols()) {
        throw std::invalid_argument("conjugate: operator shape does not match acted subsystems");
    }
    auto order = layout.complement(acting_on);
    const std::size_t rest_dim = layout.select(order).total_dim();
    order.insert(order.end(), acting_on.begin(), acting_on.end());
    const DensityMatrix permuted = reorder(rho, order);
    const SparseOperator u = detail::lift(unitary, rest_dim);
    Operator tmp = u * permuted.matrix();
    Operator out = tmp * u.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return reorder(DensityMatrix(std::move(out), permuted.layout()), layout.labels());
}

/// Dominant eigenvector of a state that is pure within the spectral
/// tolerance; empty otherwise.
inline std::optional<Ket> purify_if_pure(const DensityMatrix &rho) {
    if (std::abs(rho.purity() - 1.0) > policy().spectral) {
        return std::nullopt;
    }
    Eigen::SelfAdjointEigenSolver<Operator> es(rho.matrix());
    const auto n = es.eigenvalues().size();
    return Ket::normalize(es.eigenvectors().col(n - 1));
}

} // namespace qswitch
