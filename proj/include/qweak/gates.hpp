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

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "dd.hpp"
#include "errors.hpp"

namespace qweak {

/// 2x2 unitary, row-major: (u00, u01, u10, u11).
struct GateMatrix {
    std::array<Complex, 4> u{};

    Complex operator()(int row, int col) const {
        return u[static_cast<std::size_t>(2 * row + col)];
    }

    /// Largest entry of |U^dagger U - I|.
    double unitarity_error() const {
        double worst = 0.0;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                Complex sum = std::conj((*this)(0, r)) * (*this)(0, c) + std::conj((*this)(1, r)) * (*this)(1, c);
                worst = std::max(worst, std::abs(sum - Complex{r == c ? 1.0 : 0.0, 0.0}));
            }
        }
        return worst;
    }

    friend bool operator==(const GateMatrix &, const GateMatrix &) = default;
};

/// Number of angle parameters a builtin gate takes, or -1 for unknown names.
inline int builtin_param_count(std::string_view name) {
    static constexpr std::array<std::string_view, 9> fixed{"i", "x", "y", "z", "h", "s", "sdg", "t", "tdg"};
    static constexpr std::array<std::string_view, 4> rotations{"rx", "ry", "rz", "p"};
    if (std::find(fixed.begin(), fixed.end(), name) != fixed.end()) {
        return 0;
    }
    if (std::find(rotations.begin(), rotations.end(), name) != rotations.end()) {
        return 1;
    }
    return -1;
}

/// Standard matrix of a builtin gate. Rotations use the half-angle convention
/// R_x(theta) = cos(theta/2) I - i sin(theta/2) X; p(theta) = diag(1, e^{i theta}).
inline GateMatrix builtin_gate(std::string_view name, std::span<const double> params = {}) {
    int expected = builtin_param_count(name);
    if (expected < 0) {
        throw ConfigError("unknown gate '" + std::string(name) + "'");
    }
    if (static_cast<std::size_t>(expected) != params.size()) {
        throw ConfigError("gate '" + std::string(name) + "' takes " + std::to_string(expected) + " parameter(s), got " +
                          std::to_string(params.size()));
    }
    using std::numbers::sqrt2;
    const Complex i{0.0, 1.0};
    const double r = 1.0 / sqrt2;
    if (name == "i") return {{1.0, 0.0, 0.0, 1.0}};
    if (name == "x") return {{0.0, 1.0, 1.0, 0.0}};
    if (name == "y") return {{0.0, -i, i, 0.0}};
    if (name == "z") return {{1.0, 0.0, 0.0, -1.0}};
    if (name == "h") return {{r, r, r, -r}};
    if (name == "s") return {{1.0, 0.0, 0.0, i}};
    if (name == "sdg") return {{1.0, 0.0, 0.0, -i}};
    if (name == "t") return {{1.0, 0.0, 0.0, Complex{r, r}}};
    if (name == "tdg") return {{1.0, 0.0, 0.0, Complex{r, -r}}};

    double theta = params[0];
    double c = std::cos(theta / 2);
    double s = std::sin(theta / 2);
    if (name == "rx") return {{c, -i * s, -i * s, c}};
    if (name == "ry") return {{c, -s, s, c}};
    if (name == "rz") return {{std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2)}};
    return {{1.0, 0.0, 0.0, std::polar(1.0, theta)}};  // p
}

/// One (multi-)controlled single-qubit gate. Controls have positive polarity.
struct GateOp {
    std::string name;
    std::vector<double> params;
    GateMatrix matrix;
    int target = 0;
    std::vector<int> controls;

    friend bool operator==(const GateOp &, const GateOp &) = default;
};

inline GateOp make_gate(std::string_view name, std::vector<double> params, int target, std::vector<int> controls = {}) {
    GateOp op{std::string(name), std::move(params), {}, target, std::move(controls)};
    op.matrix = builtin_gate(op.name, op.params);
    if (target < 0) {
        throw ConfigError("negative target qubit");
    }
    for (std::size_t a = 0; a < op.controls.size(); ++a) {
        if (op.controls[a] < 0) {
            throw ConfigError("negative control qubit");
        }
        if (op.controls[a] == target) {
            throw ConfigError("qubit " + std::to_string(target) + " is both control and target");
        }
        for (std::size_t b = 0; b < a; ++b) {
            if (op.controls[a] == op.controls[b]) {
                throw ConfigError("duplicate control qubit " + std::to_string(op.controls[a]));
            }
        }
    }
    return op;
}

inline void check_indices(const GateOp &op, std::size_t num_qubits) {
    auto n = static_cast<int>(num_qubits);
    if (op.target >= n) {
        throw std::out_of_range("target qubit " + std::to_string(op.target) + " out of range for " +
                                std::to_string(num_qubits) + " qubits");
    }
    for (int c : op.controls) {
        if (c >= n) {
            throw std::out_of_range("control qubit " + std::to_string(c) + " out of range for " +
                                    std::to_string(num_qubits) + " qubits");
        }
    }
}

/// In-place matrix-vector application on a dense amplitude array (index bit k = q_k).
inline void apply_dense(std::span<Complex> amplitudes, const GateOp &op) {
    std::size_t size = amplitudes.size();
    if (size < 2 || (size & (size - 1)) != 0) {
        throw ConfigError("dense state length is not a power of two >= 2");
    }
    check_indices(op, static_cast<std::size_t>(std::countr_zero(size)));
    std::size_t target_bit = std::size_t{1} << op.target;
    std::size_t control_mask = 0;
    for (int c : op.controls) {
        control_mask |= std::size_t{1} << c;
    }
    const Complex u00 = op.matrix(0, 0), u01 = op.matrix(0, 1), u10 = op.matrix(1, 0), u11 = op.matrix(1, 1);
    for (std::size_t i = 0; i < size; ++i) {
        if ((i & target_bit) != 0 || (i & control_mask) != control_mask) {
            continue;
        }
        std::size_t j = i | target_bit;
        Complex a = amplitudes[i];
        Complex b = amplitudes[j];
        amplitudes[i] = u00 * a + u01 * b;
        amplitudes[j] = u10 * a + u11 * b;
    }
}

namespace detail {

/// Recursive descent for one gate on one diagram. Above the target the
/// controls are resolved by following high edges only; at the target the two
/// sub-vectors are mixed, descending jointly through any controls below it.
class GateApplier {
  public:
    GateApplier(Package &pkg, const GateOp &op) : pkg_(pkg), op_(op), caching_(pkg.config().caching) {
        is_control_.assign(pkg.num_qubits(), false);
        lowest_control_ = op.target;
        for (int c : op.controls) {
            is_control_[static_cast<std::size_t>(c)] = true;
            lowest_control_ = std::min(lowest_control_, c);
        }
    }

    Edge apply(const Edge &e) {
        if (e.is_zero()) {
            return Edge::zero();
        }
        return pkg_.scale(apply_node(e.node), e.weight);
    }

  private:
    struct PairKey {
        NodeId a;
        NodeId b;
        double w[4];

        friend bool operator==(const PairKey &x, const PairKey &y) {
            return x.a == y.a && x.b == y.b && x.w[0] == y.w[0] && x.w[1] == y.w[1] && x.w[2] == y.w[2] &&
                   x.w[3] == y.w[3];
        }
    };

    struct PairKeyHash {
        std::size_t operator()(const PairKey &k) const {
            std::hash<double> hd;
            std::size_t h = std::hash<std::uint64_t>{}((std::uint64_t{k.a} << 32) | k.b);
            for (double d : k.w) {
                h ^= hd(d) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
            }
            return h;
        }
    };

    Edge apply_node(NodeId id) {
        if (caching_) {
            auto it = node_cache_.find(id);
            if (it != node_cache_.end()) {
                return it->second;
            }
        }
        const Node n = pkg_.node(id);
        Edge result;
        if (n.level > op_.target) {
            Edge low = is_control_[static_cast<std::size_t>(n.level)] ? n.low : apply(n.low);
            Edge high = apply(n.high);
            result = pkg_.make_node(n.level, low, high);
        } else if (n.level == op_.target) {
            auto [low, high] = combine(n.low, n.high, n.level - 1);
            result = pkg_.make_node(n.level, low, high);
        } else {
            throw ConfigError("gate application reached a level below the target");
        }
        if (caching_) {
            node_cache_.emplace(id, result);
        }
        return result;
    }

    /// (u00 a + u01 b, u10 a + u11 b) restricted to the subspace where the
    /// controls at levels <= level are 1; identity elsewhere.
    std::pair<Edge, Edge> combine(const Edge &a, const Edge &b, int level) {
        if (level < lowest_control_) {
            const GateMatrix &m = op_.matrix;
            return {pkg_.add(pkg_.scale(a, m(0, 0)), pkg_.scale(b, m(0, 1))),
                    pkg_.add(pkg_.scale(a, m(1, 0)), pkg_.scale(b, m(1, 1)))};
        }
        if (a.is_zero() && b.is_zero()) {
            return {Edge::zero(), Edge::zero()};
        }
        PairKey key{a.node, b.node, {a.weight.real(), a.weight.imag(), b.weight.real(), b.weight.imag()}};
        if (caching_) {
            auto it = pair_cache_.find(key);
            if (it != pair_cache_.end()) {
                return it->second;
            }
        }
        auto [a0, a1] = split(a);
        auto [b0, b1] = split(b);
        Edge out_a;
        Edge out_b;
        if (is_control_[static_cast<std::size_t>(level)]) {
            auto [na1, nb1] = combine(a1, b1, level - 1);
            out_a = pkg_.make_node(level, a0, na1);
            out_b = pkg_.make_node(level, b0, nb1);
        } else {
            auto [na0, nb0] = combine(a0, b0, level - 1);
            auto [na1, nb1] = combine(a1, b1, level - 1);
            out_a = pkg_.make_node(level, na0, na1);
            out_b = pkg_.make_node(level, nb0, nb1);
        }
        std::pair<Edge, Edge> result{out_a, out_b};
        if (caching_) {
            pair_cache_.emplace(key, result);
        }
        return result;
    }

    std::pair<Edge, Edge> split(const Edge &e) const {
        if (e.is_zero()) {
            return {Edge::zero(), Edge::zero()};
        }
        const Node &n = pkg_.node(e.node);
        return {pkg_.scale(n.low, e.weight), pkg_.scale(n.high, e.weight)};
    }

    Package &pkg_;
    const GateOp &op_;
    bool caching_;
    std::vector<bool> is_control_;
    int lowest_control_;
    std::unordered_map<NodeId, Edge> node_cache_;
    std::unordered_map<PairKey, std::pair<Edge, Edge>, PairKeyHash> pair_cache_;
};

}  // namespace detail

/// Applies op to a decision-diagram state. Per-gate caches live only for this call.
inline StateDD apply_dd(Package &pkg, const StateDD &state, const GateOp &op) {
    check_indices(op, state.num_qubits);
    detail::GateApplier applier(pkg, op);
    return StateDD{applier.apply(state.root), state.num_qubits};
}

}  // namespace qweak
