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

#include "qweak/gates.hpp"

#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace qweak;
using namespace qweak::testing;

namespace {

/// Independent reference: builds the full 2^n x 2^n matrix of a controlled
/// single-qubit gate and multiplies.
std::vector<Complex> reference_apply(const std::vector<Complex> &v, const GateOp &op) {
    std::size_t dim = v.size();
    std::vector<Complex> out(dim);
    for (std::size_t row = 0; row < dim; ++row) {
        for (std::size_t col = 0; col < dim; ++col) {
            bool controls_on = true;
            for (int c : op.controls) {
                controls_on = controls_on && ((col >> c) & 1U);
            }
            std::size_t t = std::size_t{1} << op.target;
            Complex entry;
            if ((row & ~t) == (col & ~t)) {
                if (controls_on) {
                    entry = op.matrix((row & t) ? 1 : 0, (col & t) ? 1 : 0);
                } else {
                    entry = row == col ? 1.0 : 0.0;
                }
            }
            out[row] += entry * v[col];
        }
    }
    return out;
}

double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (auto c : v) {
        s += std::norm(c);
    }
    return s;
}

}  // namespace

TEST(BuiltinGate, Hadamard) {
    GateMatrix h = builtin_gate("h");
    EXPECT_NEAR(h(0, 0).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(h(0, 1).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(h(1, 0).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(h(1, 1).real(), -kInvSqrt2, 1e-15);
}

TEST(BuiltinGate, PauliX) {
    EXPECT_EQ(builtin_gate("x"), (GateMatrix{{0.0, 1.0, 1.0, 0.0}}));
}

TEST(BuiltinGate, RxTwoThirdsPi) {
    std::vector<double> theta{2 * M_PI / 3};
    GateMatrix m = builtin_gate("rx", theta);
    EXPECT_NEAR(std::abs(m(0, 0) - Complex(0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(0, 1) - Complex(0.0, -std::sqrt(3.0) / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1, 0) - Complex(0.0, -std::sqrt(3.0) / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1, 1) - Complex(0.5)), 0.0, 1e-15);
}

TEST(BuiltinGate, PhaseAndRotationConventions) {
    std::vector<double> theta{0.7};
    GateMatrix p = builtin_gate("p", theta);
    EXPECT_EQ(p(0, 0), Complex(1.0));
    EXPECT_NEAR(std::abs(p(1, 1) - std::polar(1.0, 0.7)), 0.0, 1e-15);
    GateMatrix rz = builtin_gate("rz", theta);
    EXPECT_NEAR(std::abs(rz(0, 0) - std::polar(1.0, -0.35)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(rz(1, 1) - std::polar(1.0, 0.35)), 0.0, 1e-15);
    GateMatrix ry = builtin_gate("ry", theta);
    EXPECT_NEAR(ry(1, 0).real(), std::sin(0.35), 1e-15);
    EXPECT_NEAR(ry(0, 1).real(), -std::sin(0.35), 1e-15);
    std::vector<double> pi{M_PI / 4};
    EXPECT_NEAR(std::abs(builtin_gate("t")(1, 1) - builtin_gate("p", pi)(1, 1)), 0.0, 1e-15);
}

TEST(BuiltinGate, AllUnitary) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    for (const char *name : {"i", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "p"}) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> params;
            if (builtin_param_count(name) == 1) {
                params.push_back(angle(gen));
            }
            EXPECT_LT(builtin_gate(name, params).unitarity_error(), 1e-10) << name;
        }
    }
}

TEST(BuiltinGate, Errors) {
    EXPECT_THROW(builtin_gate("foo"), ConfigError);
    EXPECT_THROW(builtin_gate("rx"), ConfigError);
    std::vector<double> extra{1.0};
    EXPECT_THROW(builtin_gate("h", extra), ConfigError);
}

TEST(MakeGate, Validation) {
    EXPECT_THROW(make_gate("x", {}, 0, {0}), ConfigError);
    EXPECT_THROW(make_gate("x", {}, 1, {0, 0}), ConfigError);
    EXPECT_THROW(make_gate("x", {}, -1), ConfigError);
    GateOp op = make_gate("x", {}, 2, {0});
    EXPECT_THROW(check_indices(op, 2), std::out_of_range);
    EXPECT_NO_THROW(check_indices(op, 3));
}

TEST(ApplyDense, BellPreparation) {
    std::vector<Complex> v{1.0, 0.0, 0.0, 0.0};
    apply_dense(v, make_gate("h", {}, 1));
    apply_dense(v, make_gate("x", {}, 0, {1}));
    EXPECT_LT(max_deviation({kInvSqrt2, 0.0, 0.0, kInvSqrt2}, v), 1e-15);
}

TEST(ApplyDense, XOnSingleQubit) {
    std::vector<Complex> v{1.0, 0.0};
    apply_dense(v, make_gate("x", {}, 0));
    EXPECT_EQ(v, (std::vector<Complex>{0.0, 1.0}));
}

TEST(ApplyDense, MatchesFullMatrixProperty) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        auto v = random_state(n, gen);
        Circuit c = random_gate_circuit(n, 1, gen);
        auto expected = reference_apply(v, c.ops[0]);
        apply_dense(v, c.ops[0]);
        EXPECT_LT(max_deviation(expected, v), 1e-13);
        EXPECT_NEAR(norm2(v), 1.0, 1e-12);
    }
}

TEST(ApplyDense, RejectsOutOfRange) {
    std::vector<Complex> v(4, 0.5);
    EXPECT_THROW(apply_dense(v, make_gate("x", {}, 2)), std::out_of_range);
}

TEST(ApplyDd, BellPreparation) {
    Package pkg(2);
    StateDD s = pkg.zero_state(2);
    s = apply_dd(pkg, s, make_gate("h", {}, 1));
    s = apply_dd(pkg, s, make_gate("x", {}, 0, {1}));
    EXPECT_LT(max_deviation({kInvSqrt2, 0.0, 0.0, kInvSqrt2}, pkg.to_dense(s)), 1e-15);
}

TEST(ApplyDd, XFlipsBasisState) {
    Package pkg(1);
    StateDD s = apply_dd(pkg, pkg.basis_state(1, "0"), make_gate("x", {}, 0));
    StateDD one = pkg.basis_state(1, "1");
    EXPECT_EQ(s.root.node, one.root.node);
    EXPECT_NEAR(std::abs(s.root.weight - one.root.weight), 0.0, 1e-15);
}

TEST(ApplyDd, RejectsOutOfRange) {
    Package pkg(2);
    EXPECT_THROW(apply_dd(pkg, pkg.zero_state(2), make_gate("x", {}, 3)), std::out_of_range);
}

TEST(ApplyDd, AgreesWithDenseProperty) {
    std::mt19937_64 gen(2718);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
        std::size_t depth = static_cast<std::size_t>(trial % 31);
        Circuit c = random_gate_circuit(n, depth, gen);
        Package pkg(n);
        StateDD s = pkg.zero_state(n);
        std::vector<Complex> v(std::size_t{1} << n);
        v[0] = 1.0;
        for (const GateOp &op : c.ops) {
            s = apply_dd(pkg, s, op);
            apply_dense(v, op);
            ASSERT_LT(max_deviation(v, pkg.to_dense(s)), 1e-10) << "trial " << trial << " gate " << op.name;
            EXPECT_NEAR(std::abs(s.root.weight), 1.0, 1e-9);
        }
        for (NodeId id : pkg.reachable(s.root)) {
            EXPECT_TRUE(pkg.node_is_normalized(id, 1e-10));
        }
    }
}

TEST(ApplyDd, AgreesWithDenseOnRandomInputs) {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
        auto v = random_state(n, gen);
        Package pkg(n);
        StateDD s = pkg.from_dense(v);
        Circuit c = random_gate_circuit(n, 10, gen);
        for (const GateOp &op : c.ops) {
            s = apply_dd(pkg, s, op);
            apply_dense(v, op);
        }
        EXPECT_LT(max_deviation(v, pkg.to_dense(s)), 1e-10);
    }
}

TEST(ApplyDd, MemoizationSoundness) {
    std::mt19937_64 gen(8);
    PackageConfig off;
    off.caching = false;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 3 + static_cast<std::size_t>(trial % 5);
        Circuit c = random_gate_circuit(n, 25, gen);
        Package cached(n);
        Package plain(n, off);
        StateDD a = cached.zero_state(n);
        StateDD b = plain.zero_state(n);
        for (const GateOp &op : c.ops) {
            a = apply_dd(cached, a, op);
            b = apply_dd(plain, b, op);
        }
        EXPECT_EQ(cached.node_count(a), plain.node_count(b));
        EXPECT_LT(max_deviation(cached.to_dense(a), plain.to_dense(b)), 1e-12);
    }
}

TEST(ApplyDd, MultiControlledGate) {
    Package pkg(4);
    StateDD s = pkg.basis_state(4, "1110");
    s = apply_dd(pkg, s, make_gate("x", {}, 0, {1, 2, 3}));
    EXPECT_NEAR(std::abs(pkg.amplitude(s, 0b1111)), 1.0, 1e-15);
    s = apply_dd(pkg, pkg.basis_state(4, "0110"), make_gate("x", {}, 0, {1, 2, 3}));
    EXPECT_NEAR(std::abs(pkg.amplitude(s, 0b0110)), 1.0, 1e-15);
}
