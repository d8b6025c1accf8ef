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

#include "qweak/dense.hpp"

#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace qweak;
using namespace qweak::testing;

namespace {

/// Random distribution with a random share of exact zeros, including
/// leading and trailing runs.
std::vector<double> random_distribution(std::mt19937_64 &gen) {
    std::uniform_int_distribution<std::size_t> size(1, 64);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> p(size(gen));
    double total = 0.0;
    double zero_rate = unit(gen);
    for (auto &x : p) {
        x = unit(gen) < zero_rate ? 0.0 : unit(gen);
        total += x;
    }
    if (total == 0.0) {
        p[p.size() / 2] = 1.0;
        total = 1.0;
    }
    for (auto &x : p) {
        x /= total;
    }
    return p;
}

}  // namespace

TEST(DenseState, ZeroStateAndLimit) {
    DenseState s = DenseState::zero_state(3);
    EXPECT_EQ(s.num_qubits(), 3u);
    EXPECT_EQ(s.amplitudes()[0], Complex(1.0));
    EXPECT_THROW(DenseState::zero_state(27), MemoryOutError);
    EXPECT_THROW(DenseState::zero_state(5, 4), MemoryOutError);
    try {
        DenseState::zero_state(32);
        FAIL() << "expected refusal";
    } catch (const MemoryOutError &e) {
        EXPECT_NE(std::string(e.what()).find("memory out"), std::string::npos);
    }
}

TEST(Probabilities, ExampleState) {
    auto p = probabilities(DenseState(example_state()));
    auto expected = example_probabilities();
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(p[i], expected[i], 1e-15);
    }
}

TEST(Probabilities, BellAndBasis) {
    auto bell = probabilities(DenseState({kInvSqrt2, 0.0, 0.0, kInvSqrt2}));
    EXPECT_NEAR(bell[0], 0.5, 1e-15);
    EXPECT_EQ(bell[1], 0.0);
    EXPECT_NEAR(bell[3], 0.5, 1e-15);
    auto basis = probabilities(DenseState({0.0, 0.0, 1.0, 0.0}));
    EXPECT_EQ(basis, (std::vector<double>{0.0, 0.0, 1.0, 0.0}));
}

TEST(PrefixSum, ExampleTable) {
    auto r = prefix_sum(example_probabilities());
    std::vector<double> expected{0.0, 3.0 / 8, 3.0 / 8, 6.0 / 8, 7.0 / 8, 7.0 / 8, 7.0 / 8, 1.0};
    ASSERT_EQ(r.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(r[i], expected[i], 1e-15);
    }
    EXPECT_EQ(r[7], 1.0);
}

TEST(PrefixSum, SmallCases) {
    std::vector<double> point{1.0, 0.0};
    PrefixTable r_point = prefix_sum(point);
    EXPECT_EQ(std::vector<double>(r_point.values().begin(), r_point.values().end()), (std::vector<double>{1.0, 1.0}));
    std::vector<double> flat(4, 0.25);
    auto r = prefix_sum(flat);
    EXPECT_EQ(r[0], 0.25);
    EXPECT_EQ(r[1], 0.5);
    EXPECT_EQ(r[2], 0.75);
    EXPECT_EQ(r[3], 1.0);
}

TEST(PrefixSum, Errors) {
    std::vector<double> negative{1.5, -0.5};
    std::vector<double> short_sum{0.5, 0.4};
    std::vector<double> empty;
    EXPECT_THROW(prefix_sum(negative), DistributionError);
    EXPECT_THROW(prefix_sum(short_sum), DistributionError);
    EXPECT_THROW(prefix_sum(empty), DistributionError);
}

TEST(PrefixSum, InvariantsProperty) {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 2000; ++trial) {
        auto p = random_distribution(gen);
        auto r = prefix_sum(p);
        for (std::size_t i = 0; i < r.size(); ++i) {
            EXPECT_GE(r[i], 0.0);
            EXPECT_LE(r[i], 1.0);
            if (i > 0) {
                EXPECT_LE(r[i - 1], r[i]);
            }
        }
        EXPECT_EQ(r[r.size() - 1], 1.0);
    }
}

TEST(SampleIndex, ExampleLookups) {
    auto r = prefix_sum(example_probabilities());
    EXPECT_EQ(sample_index(r, 0.5), 3u);
    EXPECT_EQ(sample_index(r, 0.0), 1u);
    EXPECT_EQ(sample_index(r, 0.9), 7u);
    EXPECT_EQ(sample_index(r, 3.0 / 8), 3u);
    EXPECT_EQ(sample_index(r, 7.0 / 8), 7u);
    EXPECT_EQ(sample_index(r, std::nextafter(1.0, 0.0)), 7u);
    EXPECT_THROW(sample_index(r, 1.0), std::out_of_range);
    EXPECT_THROW(sample_index(r, -0.1), std::out_of_range);
}

TEST(SampleIndexLinear, ExampleAndPointMass) {
    EXPECT_EQ(sample_index_linear(example_probabilities(), 0.5), 3u);
    std::vector<double> point{0.0, 0.0, 1.0, 0.0};
    for (double u : {0.0, 0.3, 0.999999}) {
        EXPECT_EQ(sample_index_linear(point, u), 2u);
    }
    EXPECT_THROW(sample_index_linear(point, 1.0), std::out_of_range);
}

TEST(SampleIndex, MatchesLinearScanProperty) {
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int cases = 0;
    while (cases < 100000) {
        auto p = random_distribution(gen);
        auto r = prefix_sum(p);
        std::vector<double> us{0.0, std::nextafter(1.0, 0.0)};
        for (double v : r.values()) {
            if (v < 1.0) {
                us.push_back(v);
                us.push_back(std::nextafter(v, 0.0));
                us.push_back(std::nextafter(v, 1.0));
            }
        }
        for (int k = 0; k < 10; ++k) {
            us.push_back(unit(gen));
        }
        for (double u : us) {
            std::size_t i = sample_index(r, u);
            ASSERT_EQ(i, sample_index_linear(p, u)) << "u=" << u;
            ASSERT_GT(p[i], 0.0);
            ++cases;
        }
    }
}

TEST(SampleBitstrings, BasisStateOnly) {
    DenseState s({0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0});
    Histogram h = sample_bitstrings(s, 1000, 3);
    EXPECT_EQ(h.count("101"), 1000u);
    EXPECT_EQ(h.counts.size(), 1u);
}

TEST(SampleBitstrings, BellFrequencies) {
    DenseState s({kInvSqrt2, 0.0, 0.0, kInvSqrt2});
    Histogram h = sample_bitstrings(s, 1000000, 11);
    EXPECT_EQ(h.total, 1000000u);
    EXPECT_EQ(h.count("00") + h.count("11"), 1000000u);
    EXPECT_NEAR(h.frequency("00"), 0.5, 0.002);
    EXPECT_NEAR(h.frequency("11"), 0.5, 0.002);
}

TEST(SampleBitstrings, ExampleStateFrequency) {
    DenseState s(example_state());
    Histogram h = sample_bitstrings(s, 1000000, 2);
    EXPECT_NEAR(h.frequency("011"), 3.0 / 8, 0.002);
    for (const auto &[bits, count] : h.counts) {
        EXPECT_GT(example_probabilities()[bits_to_index(bits)], 0.0) << bits;
    }
}

TEST(SampleBitstrings, DeterministicPerSeed) {
    DenseState s(example_state());
    DenseSampler sampler(s);
    EXPECT_EQ(sampler.sample_sequence(5000, 9), sampler.sample_sequence(5000, 9));
    EXPECT_NE(sampler.sample_sequence(5000, 9), sampler.sample_sequence(5000, 10));
    EXPECT_EQ(sampler.sample_sequence(5000, 9, 4), sampler.sample_sequence(5000, 9, 4));
}

TEST(SampleBitstrings, ConvergesInTvdProperty) {
    std::mt19937_64 gen(5);
    for (std::size_t n = 1; n <= 6; ++n) {
        DenseState s(random_state(n, gen));
        auto exact = probabilities(s);
        Histogram h = sample_bitstrings(s, 1000000, n);
        double bound = 3.0 * std::sqrt(static_cast<double>(exact.size()) / 1e6);
        EXPECT_LT(tvd(empirical_distribution(h), exact), bound) << "n=" << n;
    }
}

TEST(SampleBitstrings, Errors) {
    DenseState s({1.0, 0.0});
    EXPECT_THROW(sample_bitstrings(s, 0, 1), ConfigError);
    DenseState wide = DenseState::zero_state(5);
    EXPECT_THROW(sample_bitstrings(wide, 1, 1, 1, 4), MemoryOutError);
}
