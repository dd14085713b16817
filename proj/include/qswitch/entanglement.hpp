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
 * @file entanglement.hpp
 * Entanglement and distinguishability measures. Logarithms are base 2.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qswitch/tensor.hpp"

namespace qswitch {

/// Largest number of parties ggm will enumerate bipartitions for.
inline constexpr std::size_t kMaxGgmParties = 10;

/// Two-qubit concurrence max(0, λ1 − λ2 − λ3 − λ4), λ the descending square
/// roots of the spectrum of ρ(Y⊗Y)ρ*(Y⊗Y).
///
/// With ρ = ΨΨ†, those λ are the singular values of Ψᵀ(Y⊗Y)Ψ, which is what
/// is computed here.
inline double concurrence_2qubit(const DensityMatrix &rho) {
    if (rho.dim() != 4) {
        throw std::invalid_argument("concurrence_2qubit: expected a 4-dimensional state");
    }
    Operator yy = Operator::Zero(4, 4);
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;

    Eigen::SelfAdjointEigenSolver<Operator> es(rho.matrix());
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Operator psi = es.eigenvectors() * root.cast<cplx>().asDiagonal();
    const Operator tau = psi.transpose() * yy * psi;
    Eigen::JacobiSVD<Operator> svd(tau);
    const Eigen::VectorXd &lam = svd.singularValues();
    return std::clamp(lam(0) - lam(1) - lam(2) - lam(3), 0.0, 1.0);
}

/// Largest squared Schmidt coefficient across `left` | rest.
inline double top_schmidt_sq(const Ket &psi, const SubsystemLayout &layout,
                             const std::vector<std::string> &left) {
    const auto s = schmidt_decomposition(psi, layout, left);
    return s.coefficients.empty() ? 0.0 : s.coefficients.front() * s.coefficients.front();
}

struct BipartitionReport {
    std::vector<std::string> cut;
    double top_schmidt_sq = 0.0;
};

/// Generalized geometric measure of a pure multipartite state:
/// 1 − max over bipartitions of the top squared Schmidt coefficient.
inline double ggm(const Ket &psi, const SubsystemLayout &layout,
                  BipartitionReport *worst_cut = nullptr) {
    const std::size_t n = layout.size();
    if (n < 2) {
        throw std::invalid_argument("ggm: need at least two subsystems");
    }
    if (n > kMaxGgmParties) {
        throw ResourceLimitError("ggm: " + std::to_string(n) + " parties exceeds " +
                                 std::to_string(kMaxGgmParties));
    }
    if (!psi.is_normalized()) {
        throw std::invalid_argument("ggm: state must be normalized");
    }
    BipartitionReport best;
    // Subsets containing factor 0, excluding the full set: 2^(n−1) − 1 cuts.
    const std::size_t cuts = (std::size_t{1} << (n - 1)) - 1;
    for (std::size_t mask = 0; mask < cuts; ++mask) {
        std::vector<std::string> left{layout[0].label};
        for (std::size_t k = 1; k < n; ++k) {
            if (mask & (std::size_t{1} << (k - 1))) {
                left.push_back(layout[k].label);
            }
        }
        const double lam = top_schmidt_sq(psi, layout, left);
        if (lam > best.top_schmidt_sq) {
            best.top_schmidt_sq = lam;
            best.cut = left;
        }
    }
    if (worst_cut != nullptr) {
        *worst_cut = best;
    }
    return std::clamp(1.0 - best.top_schmidt_sq, 0.0, 1.0);
}

/// True iff all m = min(dim left, dim right) Schmidt coefficients equal
/// 1/√m within `tol`.
inline bool is_maximally_entangled(const Ket &psi, const SubsystemLayout &layout,
                                   const std::vector<std::string> &left, double tol) {
    const auto s = schmidt_decomposition(psi, layout, left);
    const std::size_t m = std::min(s.left_layout.total_dim(), s.right_layout.total_dim());
    if (s.coefficients.size() != m) {
        return false;
    }
    const double target = 1.0 / std::sqrt(static_cast<double>(m));
    return std::all_of(s.coefficients.begin(), s.coefficients.end(),
                       [&](double c) { return std::abs(c - target) <= tol; });
}

/// Minimum error for discriminating rho0 (prior p0) from rho1:
/// (1 − ‖p0 rho0 − (1 − p0) rho1‖₁) / 2.
inline double helstrom_error(const DensityMatrix &rho0, const DensityMatrix &rho1, double p0) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw std::invalid_argument("helstrom_error: prior must lie in [0, 1]");
    }
    if (rho0.dim() != rho1.dim()) {
        throw std::invalid_argument("helstrom_error: dimension mismatch");
    }
    const double tn = trace_norm(p0 * rho0.matrix() - (1.0 - p0) * rho1.matrix());
    return std::clamp(0.5 * (1.0 - tn), 0.0, 0.5);
}

/// Shannon mutual information (bits) of a joint pmf p(row, col).
inline double mutual_information(const Eigen::MatrixXd &joint) {
    if (joint.size() == 0) {
        throw std::invalid_argument("mutual_information: empty pmf");
    }
    if (joint.minCoeff() < 0.0) {
        throw std::invalid_argument("mutual_information: negative probability");
    }
    if (std::abs(joint.sum() - 1.0) > policy().spectral) {
        throw std::invalid_argument("mutual_information: pmf does not sum to 1");
    }
    const Eigen::VectorXd pr = joint.rowwise().sum();
    const Eigen::RowVectorXd pc = joint.colwise().sum();
    double mi = 0.0;
    for (Eigen::Index r = 0; r < joint.rows(); ++r) {
        for (Eigen::Index c = 0; c < joint.cols(); ++c) {
            const double p = joint(r, c);
            if (p > 0.0) {
                mi += p * std::log2(p / (pr(r) * pc(c)));
            }
        }
    }
    return std::max(0.0, mi);
}

} // namespace qswitch
