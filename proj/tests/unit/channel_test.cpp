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

#include "qswitch/channel.hpp"

#include <cmath>

#include "gtest/gtest.h"

#include "oracles.hpp"
#include "random.hpp"

using namespace qswitch;
using qswitch::testing::Rng;

TEST(kraus_channel, rejects_invalid_sets) {
    EXPECT_THROW(KrausChannel({}), std::invalid_argument);
    EXPECT_THROW(KrausChannel({ketbra(2, 0, 0)}), std::invalid_argument);
    EXPECT_THROW(KrausChannel({identity(2), identity(3)}), std::invalid_argument);
    EXPECT_NO_THROW(KrausChannel({ketbra(2, 0, 0), ketbra(2, 1, 1)}));
}

TEST(erasing_channel, kraus_list_and_action) {
    const auto e = erasing_channel(3, 2);
    ASSERT_EQ(e.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ((e[i] - ketbra(3, 2, i)).cwiseAbs().maxCoeff(), 0.0);
    }
    const SubsystemLayout l{{"A", 2}};
    const auto out = apply(erasing_channel(2, 0), DensityMatrix::pure(fourier_ket(2, 0), l), {"A"});
    EXPECT_LE((out.matrix() - ketbra(2, 0, 0)).cwiseAbs().maxCoeff(), 1e-15);
    const auto out1 = apply(erasing_channel(2, 1), DensityMatrix::maximally_mixed(l), {"A"});
    EXPECT_LE((out1.matrix() - ketbra(2, 1, 1)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW((void)erasing_channel(2, 2), std::invalid_argument);
}

TEST(erasing_channel, idempotent) {
    Rng rng(21);
    const auto rho = qswitch::testing::random_density(rng, {{"A", 3}}, 3);
    const auto e = erasing_channel(3, 1);
    const auto once = apply(e, rho, {"A"});
    const auto twice = apply(e, once, {"A"});
    EXPECT_LE((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(apply, erasing_half_of_a_bell_pair) {
    const SubsystemLayout l{{"A", 2}, {"C", 2}};
    const auto out = apply(erasing_channel(2, 0), DensityMatrix::pure(ghz_ket(2, 2), l), {"A"});
    const Operator expected = tensor(ketbra(2, 0, 0), identity(2) / 2.0);
    EXPECT_LE((out.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(apply, relabels_and_changes_dimension) {
    Rng rng(22);
    const auto rho = qswitch::testing::random_density(rng, {{"A", 2}, {"C", 3}}, 2);
    // Isometry 2 → 4.
    const Operator v = qswitch::testing::random_isometry(rng, 4, 2);
    const KrausChannel embed({v});
    const auto out = apply(embed, rho, {"A"}, SubsystemLayout{{"B", 4}});
    EXPECT_EQ(out.layout(), (SubsystemLayout{{"B", 4}, {"C", 3}}));
    const Operator full = tensor(v, identity(3));
    EXPECT_LE((out.matrix() - full * rho.matrix() * full.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW((void)apply(embed, rho, {"A"}), std::invalid_argument);
    EXPECT_THROW((void)apply(embed, rho, {"C"}), std::invalid_argument);
}

TEST(apply, acting_order_matters) {
    Rng rng(23);
    const auto rho = qswitch::testing::random_density(rng, {{"A", 2}, {"B", 3}}, 6);
    const Operator u = qswitch::testing::haar_unitary(rng, 6);
    const auto direct = apply(unitary_channel(u), rho, {"A", "B"});
    EXPECT_LE((direct.matrix() - u * rho.matrix() * u.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    const auto swapped = apply(unitary_channel(u), rho, {"B", "A"});
    const auto expected = reorder(
        DensityMatrix(u * reorder(rho, {"B", "A"}).matrix() * u.adjoint(), SubsystemLayout{{"B", 3}, {"A", 2}}),
        {"A", "B"});
    EXPECT_LE((swapped.matrix() - expected.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(choi, identity_channel_is_unnormalized_bell_projector) {
    const auto j = choi(identity_channel(2));
    const Operator expected = 2.0 * ghz_ket(2, 2).projector();
    EXPECT_LE((j.entries - expected).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(j.entries.trace().real(), 2.0, 1e-15);
}

TEST(choi, erasing_channel_structure) {
    const auto j = choi(erasing_channel(2, 0));
    EXPECT_LE((j.entries - tensor(identity(2), ketbra(2, 0, 0))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(choi, agrees_with_entrywise_oracle) {
    Rng rng(24);
    for (std::size_t d : {2u, 3u, 4u}) {
        const auto ch = qswitch::testing::random_channel(rng, d, 3);
        const Operator expected = oracle::choi(ch.operators());
        EXPECT_LE((choi(ch).entries - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(choi, guard_rejects_large_channels) {
    EXPECT_THROW((void)choi(identity_channel(33)), ResourceLimitError);
}

TEST(channels_equal, reports_distance) {
    const auto same = channels_equal(erasing_channel(2, 0), erasing_channel(2, 0));
    EXPECT_TRUE(same.equal);
    EXPECT_EQ(same.distance, 0.0);
    const auto diff = channels_equal(erasing_channel(2, 0), erasing_channel(2, 1));
    EXPECT_FALSE(diff.equal);
    EXPECT_GT(diff.distance, 1.0);
    EXPECT_THROW((void)channels_equal(erasing_channel(2, 0), erasing_channel(3, 0)), std::invalid_argument);
}

TEST(remix_kraus, same_channel_new_representation) {
    Rng rng(25);
    const auto ch = qswitch::testing::random_channel(rng, 3, 2);
    const auto remixed = remix_kraus(ch, qswitch::testing::random_isometry(rng, 4, 2));
    EXPECT_EQ(remixed.size(), 4u);
    EXPECT_LE(channels_equal(ch, remixed).distance, 1e-12);
    EXPECT_THROW((void)remix_kraus(ch, Operator::Ones(2, 2)), std::invalid_argument);
}

TEST(tensor_power, product_of_erasures) {
    const auto e2 = tensor_power(erasing_channel(2, 1), 2);
    EXPECT_EQ(e2.size(), 4u);
    EXPECT_EQ(e2.in_dim(), 4u);
    const SubsystemLayout l{{"A", 4}};
    const auto out = apply(e2, DensityMatrix::maximally_mixed(l), {"A"});
    EXPECT_LE((out.matrix() - ketbra(4, 3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(vacuum_extend, qubit_erasing_examples) {
    Amplitudes a(2);
    a << 1.0, 0.0;
    const auto e = vacuum_extend(erasing_channel(2, 0), a);
    Operator e0 = Operator::Zero(3, 3);
    e0(0, 0) = 1.0;
    e0(2, 2) = 1.0;
    EXPECT_EQ((e.realized()[0] - e0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((e.realized()[1] - ketbra(3, 0, 1)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(e.triv_index(), 2u);

    Amplitudes b(2);
    b << 0.0, 1.0;
    const auto f = vacuum_extend(erasing_channel(2, 1), b);
    EXPECT_EQ((f.realized()[0] - ketbra(3, 1, 0)).cwiseAbs().maxCoeff(), 0.0);
    Operator f1 = ketbra(3, 1, 1);
    f1(2, 2) = 1.0;
    EXPECT_EQ((f.realized()[1] - f1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(vacuum_extend, vacuum_is_fixed_and_amplitudes_checked) {
    Rng rng(26);
    const auto base = qswitch::testing::random_channel(rng, 3, 3);
    const Amplitudes a = qswitch::testing::random_ket(rng, 3).amplitudes();
    const auto e = vacuum_extend(base, a);
    const SubsystemLayout l{{"T", 4}};
    const auto out = apply(e.realized(), DensityMatrix(ketbra(4, 3, 3), l), {"T"});
    EXPECT_LE((out.matrix() - ketbra(4, 3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW((void)vacuum_extend(base, Amplitudes::Ones(3)), std::invalid_argument);
    EXPECT_THROW((void)vacuum_extend(base, Amplitudes::Ones(2)), std::invalid_argument);
}

TEST(vacuum_extend, extended_erasure_is_not_erasing) {
    // On d+1 levels the extension no longer maps every input to one state.
    Amplitudes a(2);
    a << 1.0, 0.0;
    const auto e = vacuum_extend(erasing_channel(2, 0), a);
    const SubsystemLayout l{{"T", 3}};
    const auto from0 = apply(e.realized(), DensityMatrix(ketbra(3, 0, 0), l), {"T"});
    const auto from_triv = apply(e.realized(), DensityMatrix(ketbra(3, 2, 2), l), {"T"});
    EXPECT_GT(trace_distance(from0, from_triv), 0.5);
}

TEST(canonicalize, moves_amplitudes_to_first_index) {
    Amplitudes a(2);
    a << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto e = vacuum_extend(erasing_channel(2, 0), a);
    const auto c = canonicalize_extension(e);
    EXPECT_NEAR(std::abs(c.amplitudes()(0) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(c.amplitudes()(1)), 0.0, 1e-12);
    EXPECT_LE(channels_equal(e.realized(), c.realized()).distance, 1e-10);

    Amplitudes b(2);
    b << 0.0, 1.0;
    const auto e2 = vacuum_extend(erasing_channel(2, 0), b);
    const auto c2 = canonicalize_extension(e2);
    EXPECT_NEAR(std::abs(c2.amplitudes()(0) - 1.0), 0.0, 1e-12);
    EXPECT_LE(channels_equal(e2.realized(), c2.realized()).distance, 1e-10);
}

TEST(canonicalize, fixed_point_on_canonical_input) {
    Amplitudes a(3);
    a << 1.0, 0.0, 0.0;
    const auto e = vacuum_extend(erasing_channel(3, 1), a);
    const auto c = canonicalize_extension(e);
    EXPECT_EQ(channels_equal(e.realized(), c.realized()).distance, 0.0);
}

TEST(canonicalize, random_amplitudes_preserve_choi) {
    Rng rng(27);
    for (std::size_t d : {2u, 3u, 4u}) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto base = qswitch::testing::random_channel(rng, d, d);
            const auto e = vacuum_extend(base, qswitch::testing::random_ket(rng, d).amplitudes());
            const auto c = canonicalize_extension(e);
            EXPECT_NEAR(std::abs(c.amplitudes()(0) - 1.0), 0.0, 1e-12);
            EXPECT_LE(c.amplitudes().tail(d - 1).norm(), 1e-12);
            EXPECT_LE(channels_equal(e.realized(), c.realized()).distance, 1e-10);
        }
    }
}
