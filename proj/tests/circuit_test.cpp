// Copyright 2026 The qweak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "qweak/circuit.hpp"

#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace qweak;
using namespace qweak::testing;

namespace {

std::string modal_outcome(const Histogram &h) {
    std::string best;
    std::uint64_t most = 0;
    for (const auto &[bits, count] : h.counts) {
        if (count > most) {
            most = count;
            best = bits;
        }
    }
    return best;
}

}  // namespace

TEST(Qft, SingleQubitIsHadamard) {
    Circuit c = generate_qft(1);
    ASSERT_EQ(c.ops.size(), 1u);
    EXPECT_EQ(c.ops[0].name, "h");
    EXPECT_EQ(c.ops[0].target, 0);
}

TEST(Qft, ThreeQubitsGiveUniformState) {
    DenseState s = simulate_dense(generate_qft(3));
    for (Complex a : s.amplitudes()) {
        EXPECT_NEAR(std::abs(a - Complex(1.0 / std::sqrt(8.0))), 0.0, 1e-12);
    }
}

TEST(Qft, NodeCountEqualsQubitCount) {
    for (std::size_t n : {4u, 8u, 16u, 20u}) {
        Package pkg(n);
        StateDD s = simulate_dd(pkg, generate_qft(n));
        EXPECT_EQ(pkg.node_count(s), n) << "n=" << n;
    }
}

TEST(Qft, RejectsZeroQubits) {
    EXPECT_THROW(generate_qft(0), ConfigError);
}

TEST(Grover, LayoutAndMarkedElement) {
    Circuit c = generate_grover(20, 1);
    EXPECT_EQ(c.num_qubits, 21u);
    EXPECT_EQ(grover_marked(20, 1), grover_marked(20, 1));
    EXPECT_LT(grover_marked(20, 1), 1u << 20);
    EXPECT_EQ(grover_iterations(10), 25u);
    EXPECT_THROW(generate_grover(0, 1), ConfigError);
}

TEST(Grover, TenQubitSearchFindsMarkedElement) {
    const std::uint64_t seed = 3;
    Circuit c = generate_grover(10, seed);
    std::string marked = "0" + index_to_bits(grover_marked(10, seed), 10);

    DenseState dense = simulate_dense(c);
    double exact = probabilities(dense)[bits_to_index(marked)];
    EXPECT_GT(exact, 0.99);

    Package pkg(c.num_qubits);
    StateDD s = simulate_dd(pkg, c);
    EXPECT_NEAR(state_probability(pkg, s, marked), exact, 1e-10);
    Histogram h = sample_many(pkg, s, 100000, seed);
    EXPECT_EQ(modal_outcome(h), marked);
    EXPECT_GT(h.frequency(marked), 0.9);
}

TEST(Grover, TwentyQubitNodeCount) {
    Circuit c = generate_grover(20, 1);
    Package pkg(c.num_qubits);
    StateDD s = simulate_dd(pkg, c);
    EXPECT_LE(pkg.node_count(s), 84u);
}

TEST(Grover, NodeCountMatchesBruteForce) {
    for (std::size_t n = 2; n <= 10; ++n) {
        Circuit c = generate_grover(n, n);
        Package pkg(c.num_qubits);
        StateDD s = simulate_dd(pkg, c);
        DenseState dense = simulate_dense(c);
        std::vector<Complex> v(dense.amplitudes().begin(), dense.amplitudes().end());
        EXPECT_EQ(pkg.node_count(s), distinct_subvectors(v, c.num_qubits, 1e-9))
            << "n=" << n;
    }
}

TEST(Ghz, TenQubits) {
    Package pkg(10);
    StateDD s = simulate_dd(pkg, generate_ghz(10));
    EXPECT_EQ(pkg.node_count(s), 19u);
    EXPECT_NEAR(std::abs(pkg.amplitude(s, 0)), kInvSqrt2, 1e-12);
    EXPECT_NEAR(std::abs(pkg.amplitude(s, 1023)), kInvSqrt2, 1e-12);
    EXPECT_NEAR(state_probability(pkg, s, "0000000000"), 0.5, 1e-12);
    EXPECT_NEAR(state_probability(pkg, s, "1111111111"), 0.5, 1e-12);
    EXPECT_NEAR(state_probability(pkg, s, "1111111110"), 0.0, 1e-12);
}

TEST(RandomCircuit, DeterministicPerSeed) {
    Circuit a = generate_random(6, 12, 4);
    Circuit b = generate_random(6, 12, 4);
    Circuit c = generate_random(6, 12, 5);
    ASSERT_EQ(a.ops.size(), b.ops.size());
    for (std::size_t i = 0; i < a.ops.size(); ++i) {
        EXPECT_EQ(a.ops[i].name, b.ops[i].name);
        EXPECT_EQ(a.ops[i].target, b.ops[i].target);
        EXPECT_EQ(a.ops[i].controls, b.ops[i].controls);
        EXPECT_EQ(a.ops[i].params, b.ops[i].params);
    }
    bool differs = a.ops.size() != c.ops.size();
    for (std::size_t i = 0; !differs && i < a.ops.size(); ++i) {
        differs = a.ops[i].name != c.ops[i].name || a.ops[i].params != c.ops[i].params;
    }
    EXPECT_TRUE(differs);
}

TEST(RandomCircuit, LayerShape) {
    EXPECT_TRUE(generate_random(5, 0, 1).ops.empty());
    // Five rotations plus two entanglers per layer.
    EXPECT_EQ(generate_random(5, 3, 1).ops.size(), 21u);
    EXPECT_THROW(generate_random(0, 3, 1), ConfigError);
}

TEST(RandomCircuit, BackendsAgreeProperty) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        std::size_t n = 1 + seed % 8;
        Circuit c = generate_random(n, seed % 31, seed);
        Package pkg(n);
        StateDD s = simulate_dd(pkg, c);
        DenseState dense = simulate_dense(c);
        std::vector<Complex> v(dense.amplitudes().begin(), dense.amplitudes().end());
        EXPECT_LT(max_deviation(v, pkg.to_dense(s)), 1e-10) << c.name;
    }
}

TEST(Circuit, SwapLoweredToThreeCnots) {
    Circuit c{"swap", 2, {}, {}};
    c.swap(0, 1);
    ASSERT_EQ(c.ops.size(), 3u);
    DenseState s = simulate_dense([&] {
        Circuit prep{"prep", 2, {}, {}};
        prep.add("x", 0);
        prep.ops.insert(prep.ops.end(), c.ops.begin(), c.ops.end());
        return prep;
    }());
    EXPECT_NEAR(std::abs(s.amplitudes()[2]), 1.0, 1e-15);
}

TEST(Circuit, AddChecksIndices) {
    Circuit c{"c", 2, {}, {}};
    EXPECT_THROW(c.add("h", 2), std::out_of_range);
    EXPECT_THROW(c.add("x", 0, {5}), std::out_of_range);
}

TEST(Run, DenseRefusesWideCircuitDdDoesNot) {
    Circuit c = generate_qft(32);
    Package pkg(32);
    EXPECT_THROW(run(c, Backend::kDense, pkg), MemoryOutError);
    SimulationResult r = run(c, Backend::kDD, pkg);
    ASSERT_TRUE(std::holds_alternative<StateDD>(r));
    EXPECT_EQ(pkg.node_count(std::get<StateDD>(r)), 32u);
}

TEST(Run, DenseLimitIsConfigurable) {
    Package pkg(4);
    EXPECT_THROW(run(generate_ghz(4), Backend::kDense, pkg, 3), MemoryOutError);
    EXPECT_NO_THROW(run(generate_ghz(4), Backend::kDense, pkg, 4));
}

TEST(SimulateDd, RejectsOversizedCircuit) {
    Package pkg(2);
    EXPECT_THROW(simulate_dd(pkg, generate_ghz(3)), ConfigError);
}
