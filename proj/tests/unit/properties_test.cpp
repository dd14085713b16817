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

// Randomized invariants, 200 cases per dimension.

#include <cmath>

#include "gtest/gtest.h"

#include "qswitch/combinators.hpp"
#include "qswitch/protocols.hpp"
#include "random.hpp"

using namespace qswitch;
using qswitch::testing::Rng;

namespace {

constexpr int kCases = 200;

class properties : public ::testing::TestWithParam<std::size_t> {
  protected:
    std::size_t d() const { return GetParam(); }
    Rng rng_{0x5eed0000u + GetParam()};
};

double min_eigenvalue(const Operator &m) { return hermitian_eigenvalues(m).minCoeff(); }

} // namespace

TEST_P(properties, channels_preserve_trace_and_positivity) {
    const SubsystemLayout l{{"A", d()}, {"R", 2}};
    std::uniform_int_distribution<std::size_t> kraus(1, 2 * d());
    for (int c = 0; c < kCases; ++c) {
        const auto ch = qswitch::testing::random_channel(rng_, d(), kraus(rng_));
        const auto rho = qswitch::testing::random_density(rng_, l, 1 + c % (2 * d()));
        const auto out = apply(ch, rho, {"A"});
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
        EXPECT_GE(min_eigenvalue(out.matrix()), -1e-12);
        EXPECT_LE((out.matrix() - out.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST_P(properties, constructed_channels_are_cptp) {
    std::vector<ExtendedChannel> coincidence = coincidence_extensions(d());
    std::vector<ExtendedChannel> generic;
    for (std::size_t j = 0; j < d(); ++j) {
        generic.push_back(vacuum_extend(erasing_channel(d(), j), qswitch::testing::random_ket(rng_, d()).amplitudes()));
    }
    const std::vector<KrausChannel> constructed{
        k_closed_form(d()),
        cyclic_switch(erasing_family(d())),
        controlled_choice_target(coincidence),
        controlled_choice_target(generic),
        switch_two(erasing_channel(d(), 0), erasing_channel(d(), 1)),
    };
    for (const auto &ch : constructed) {
        const std::size_t n = ch.in_dim() / d();
        const SubsystemLayout l{{"T", d()}, {"C", n}};
        EXPECT_GE(min_eigenvalue(choi(ch).entries), -1e-10);
        for (int c = 0; c < kCases; ++c) {
            const auto out = apply(ch, qswitch::testing::random_density(rng_, l, 1 + c % 4), {"T", "C"});
            EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-10);
            EXPECT_GE(min_eigenvalue(out.matrix()), -1e-10);
        }
    }
}

TEST_P(properties, schmidt_coefficients_survive_local_unitaries) {
    const SubsystemLayout l{{"L", d()}, {"R", 3}};
    for (int c = 0; c < kCases; ++c) {
        const Ket psi = qswitch::testing::random_ket(rng_, 3 * d());
        const auto before = schmidt_decomposition(psi, l, {"L"}).coefficients;
        const Operator u = tensor(qswitch::testing::haar_unitary(rng_, d()), qswitch::testing::haar_unitary(rng_, 3));
        const auto after = schmidt_decomposition(Ket::normalize(u * psi.amplitudes()), l, {"L"}).coefficients;
        ASSERT_EQ(before.size(), after.size());
        for (std::size_t k = 0; k < before.size(); ++k) {
            EXPECT_NEAR(before[k], after[k], 1e-10);
        }
    }
}

TEST_P(properties, choi_is_positive_with_trace_in_dim) {
    std::uniform_int_distribution<std::size_t> kraus(1, 2 * d());
    for (int c = 0; c < kCases; ++c) {
        const auto j = choi(qswitch::testing::random_channel(rng_, d(), kraus(rng_)));
        EXPECT_GE(min_eigenvalue(j.entries), -1e-12);
        EXPECT_NEAR(j.entries.trace().real(), static_cast<double>(d()), 1e-12);
        // Tracing the output leaves the identity on the input.
        Operator reduced = Operator::Zero(static_cast<Eigen::Index>(d()), static_cast<Eigen::Index>(d()));
        for (std::size_t a = 0; a < d(); ++a) {
            for (std::size_t b = 0; b < d(); ++b) {
                for (std::size_t o = 0; o < d(); ++o) {
                    reduced(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                        j.entries(static_cast<Eigen::Index>(a * d() + o), static_cast<Eigen::Index>(b * d() + o));
                }
            }
        }
        EXPECT_LE((reduced - identity(d())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST_P(properties, kraus_remixing_leaves_the_channel_unchanged) {
    for (int c = 0; c < kCases; ++c) {
        const std::size_t k = 1 + static_cast<std::size_t>(c) % 3;
        const auto ch = qswitch::testing::random_channel(rng_, d(), k);
        const auto mixed = remix_kraus(ch, qswitch::testing::random_isometry(rng_, k + c % 2, k));
        EXPECT_LE(channels_equal(ch, mixed).distance, 1e-10);
    }
}

TEST_P(properties, remixed_erasures_switch_to_the_closed_form) {
    const auto k = k_closed_form(d());
    for (int c = 0; c < kCases; ++c) {
        std::vector<KrausChannel> family;
        for (std::size_t j = 0; j < d(); ++j) {
            family.push_back(remix_kraus(erasing_channel(d(), j), qswitch::testing::haar_unitary(rng_, d())));
        }
        EXPECT_LE(channels_equal(cyclic_switch(family), k).distance, 1e-10);
    }
}

TEST_P(properties, fourier_basis_is_orthonormal_and_complete) {
    const auto basis = fourier_basis(d());
    Operator sum = Operator::Zero(static_cast<Eigen::Index>(d()), static_cast<Eigen::Index>(d()));
    for (std::size_t a = 0; a < d(); ++a) {
        for (std::size_t b = 0; b < d(); ++b) {
            const cplx overlap = basis[a].amplitudes().dot(basis[b].amplitudes());
            EXPECT_NEAR(std::abs(overlap - (a == b ? 1.0 : 0.0)), 0.0, 1e-14);
        }
        sum += basis[a].projector();
    }
    EXPECT_LE((sum - identity(d())).cwiseAbs().maxCoeff(), 1e-14);
}

TEST_P(properties, measurement_is_complete_and_consistent) {
    const SubsystemLayout l{{"A", 2}, {"C", d()}};
    const auto basis = fourier_basis(d());
    for (int c = 0; c < 1000; ++c) {
        const auto rho = qswitch::testing::random_density(rng_, l, 1 + c % 3);
        const auto branches = projective_measure(rho, basis, "C");
        ASSERT_EQ(branches.size(), d());
        double total = 0.0;
        Operator mixture = Operator::Zero(2, 2);
        for (const auto &b : branches) {
            EXPECT_GE(b.probability, 0.0);
            EXPECT_LE(b.probability, 1.0 + 1e-10);
            total += b.probability;
            if (!b.is_null()) {
                EXPECT_NEAR(b.state->matrix().trace().real(), 1.0, 1e-12);
                mixture += b.probability * b.state->matrix();
            }
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
        EXPECT_LE((mixture - partial_trace(rho, {"A"}).matrix()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST_P(properties, k_is_idempotent_and_trace_preserving) {
    const SubsystemLayout l{{"T", d()}, {"C", d()}};
    const auto k = k_closed_form(d());
    for (int c = 0; c < kCases; ++c) {
        const auto rho = qswitch::testing::random_density(rng_, l, 1 + c % (d() * d()));
        const auto once = apply(k, rho, {"T", "C"});
        const auto twice = apply(k, once, {"T", "C"});
        EXPECT_NEAR(once.matrix().trace().real(), 1.0, 1e-12);
        EXPECT_LE((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST_P(properties, phase_encoding_is_invisible_to_charlie) {
    const auto k = k_closed_form(d());
    std::uniform_int_distribution<std::size_t> msg(0, d() - 1);
    for (int c = 0; c < kCases; ++c) {
        const auto rho = qswitch::testing::random_density(rng_, {{"A", d()}, {"C", d()}}, 1 + c % 3);
        const auto x = msg(rng_);
        const auto encoded = conjugate(rho, phase_encoding_unitary(x, d()), {"A"});
        const auto c0 = partial_trace(apply(k, rho, {"A", "C"}), {"C"});
        const auto cx = partial_trace(apply(k, encoded, {"A", "C"}), {"C"});
        EXPECT_LE(trace_distance(c0, cx), 1e-12);
    }
}

TEST_P(properties, canonicalization_preserves_the_extension) {
    for (int c = 0; c < kCases; ++c) {
        const std::size_t k = 1 + static_cast<std::size_t>(c) % 3;
        const auto e = vacuum_extend(qswitch::testing::random_channel(rng_, d(), k),
                                     qswitch::testing::random_ket(rng_, k).amplitudes());
        const auto canon = canonicalize_extension(e);
        EXPECT_LE(channels_equal(e.realized(), canon.realized()).distance, 1e-10);
        EXPECT_NEAR(std::abs(canon.amplitudes()(0) - 1.0), 0.0, 1e-12);
    }
}

TEST_P(properties, private_dit_success_never_exceeds_one) {
    std::uniform_int_distribution<std::size_t> msg(0, d() - 1);
    for (int c = 0; c < kCases; ++c) {
        const auto rho = qswitch::testing::random_density(rng_, {{"A", d()}, {"C", d()}}, 1 + c % 2);
        const auto x = msg(rng_);
        const auto encoded = conjugate(rho, phase_encoding_unitary(x, d()), {"A"});
        const auto t = run_private_dit_encoded(d(), x, encoded);
        const double s = t.metric("success_probability");
        EXPECT_GE(s, -1e-12);
        EXPECT_LE(s, 1.0 + 1e-12);
        EXPECT_NEAR(t.joint_pmf.sum(), 1.0, 1e-12);
    }
}

INSTANTIATE_TEST_SUITE_P(dims, properties, ::testing::Values(std::size_t{2}, std::size_t{3}, std::size_t{4}),
                         [](const auto &info) { return "d" + std::to_string(info.param); });
