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
#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dd.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace qweak {

/// Per-node side table indexed by NodeId. Entries of unreachable nodes are 0.
using ProbabilityMap = std::vector<double>;

/// d(v): probability mass of all half-paths from v to the terminal.
/// d(terminal) = 1, d(v) = |w_low|^2 d(low) + |w_high|^2 d(high); zero stubs add nothing.
/// Memoized depth-first traversal, each reachable node evaluated once.
inline ProbabilityMap downstream(const Package &pkg, const StateDD &state) {
    ProbabilityMap d(pkg.arena_size(), 0.0);
    d[kTerminal] = 1.0;
    std::vector<char> done(pkg.arena_size(), 0);
    done[kTerminal] = 1;
    if (state.root.is_zero()) {
        return d;
    }
    // explicit stack: (node, children pushed?)
    std::vector<std::pair<NodeId, bool>> stack{{state.root.node, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        if (done[id]) {
            stack.pop_back();
            continue;
        }
        const Node &n = pkg.node(id);
        if (!expanded) {
            stack.back().second = true;
            for (const Edge *child : {&n.low, &n.high}) {
                if (!child->is_zero() && !done[child->node]) {
                    stack.emplace_back(child->node, false);
                }
            }
            continue;
        }
        stack.pop_back();
        double value = 0.0;
        for (const Edge *child : {&n.low, &n.high}) {
            if (!child->is_zero()) {
                value += mag2(child->weight) * d[child->node];
            }
        }
        d[id] = value;
        done[id] = 1;
    }
    return d;
}

/// u(v): probability mass of all root-to-v half-paths. u(root) = |w_root|^2 and
/// u(c) = sum over incoming edges (v, e) of u(v) |w_e|^2. Nodes are processed
/// level by level from the top (breadth-first).
inline ProbabilityMap upstream(const Package &pkg, const StateDD &state) {
    ProbabilityMap u(pkg.arena_size(), 0.0);
    if (state.root.is_zero()) {
        return u;
    }
    std::vector<std::vector<NodeId>> by_level(state.num_qubits);
    for (NodeId id : pkg.reachable(state.root)) {
        by_level[static_cast<std::size_t>(pkg.node(id).level)].push_back(id);
    }
    u[state.root.node] = mag2(state.root.weight);
    for (std::size_t k = state.num_qubits; k-- > 0;) {
        for (NodeId id : by_level[k]) {
            const Node &n = pkg.node(id);
            for (const Edge *child : {&n.low, &n.high}) {
                if (!child->is_zero()) {
                    u[child->node] += u[id] * mag2(child->weight);
                }
            }
        }
    }
    return u;
}

struct ProbabilityAnnotations {
    ProbabilityMap downstream;
    ProbabilityMap upstream;
};

inline ProbabilityAnnotations annotate(const Package &pkg, const StateDD &state) {
    return {downstream(pkg, state), upstream(pkg, state)};
}

/// Unconditional probability that a random sample traverses each outgoing edge.
struct EdgeMass {
    double low = 0.0;
    double high = 0.0;
};

/// mass(v, side) = u(v) |w_side|^2 d(child). Indexed by NodeId.
inline std::vector<EdgeMass> edge_mass(const Package &pkg, const StateDD &state, const ProbabilityAnnotations &ann) {
    std::vector<EdgeMass> mass(pkg.arena_size());
    for (NodeId id : pkg.reachable(state.root)) {
        const Node &n = pkg.node(id);
        auto side = [&](const Edge &e) { return e.is_zero() ? 0.0 : ann.upstream[id] * mag2(e.weight) * ann.downstream[e.node]; };
        mass[id] = {side(n.low), side(n.high)};
    }
    return mass;
}

struct BranchProbabilities {
    double low = 0.0;
    double high = 0.0;
};

/// Conditional probability of descending low/high from a node:
/// p_side = |w_side|^2 d(child) / d(node).
inline BranchProbabilities branch_probabilities(const Package &pkg, NodeId id, const ProbabilityMap &down) {
    const Node &n = pkg.node(id);
    double total = down[id];
    assert(total > 0.0);
    if (n.high.is_zero()) {
        return {1.0, 0.0};
    }
    if (n.low.is_zero()) {
        return {0.0, 1.0};
    }
    double low = mag2(n.low.weight) * down[n.low.node] / total;
    return {low, 1.0 - low};
}

/// One root-to-terminal walk, one uniform draw per level. Read-only on the diagram.
inline std::string sample_one(const Package &pkg, const StateDD &state, const ProbabilityMap &down, Rng &rng) {
    std::string bits(state.num_qubits, '0');
    Edge e = state.root;
    while (!e.is_terminal()) {
        const Node &n = pkg.node(e.node);
        double u = rng.uniform();
        bool go_high;
        if (n.high.is_zero()) {
            go_high = false;
        } else if (n.low.is_zero()) {
            go_high = true;
        } else {
            go_high = !(u < mag2(n.low.weight) * down[n.low.node] / down[e.node]);
        }
        if (go_high) {
            bits[state.num_qubits - 1 - static_cast<std::size_t>(n.level)] = '1';
            e = n.high;
        } else {
            e = n.low;
        }
    }
    return bits;
}

/// Precomputes downstream values once, then draws shots by path sampling.
class DDSampler {
  public:
    DDSampler(const Package &pkg, const StateDD &state) : pkg_(pkg), state_(state), down_(downstream(pkg, state)) {
        if (state.root.is_zero()) {
            throw ConfigError("cannot sample from the zero vector");
        }
    }

    const ProbabilityMap &downstream_values() const {
        return down_;
    }

    std::string sample_one(Rng &rng) const {
        return qweak::sample_one(pkg_, state_, down_, rng);
    }

    std::vector<std::string> sample_sequence(std::uint64_t shots, std::uint64_t seed, unsigned threads = 1) const {
        return run_workers(shots, seed, threads, [this](Rng &rng) { return sample_one(rng); });
    }

    Histogram sample_histogram(std::uint64_t shots, std::uint64_t seed, unsigned threads = 1) const {
        return Histogram::from_samples(sample_sequence(shots, seed, threads), state_.num_qubits);
    }

  private:
    const Package &pkg_;
    StateDD state_;
    ProbabilityMap down_;
};

inline Histogram sample_many(const Package &pkg, const StateDD &state, std::uint64_t shots, std::uint64_t seed,
                             unsigned threads = 1) {
    if (shots == 0) {
        throw ConfigError("shots must be at least 1");
    }
    return DDSampler(pkg, state).sample_histogram(shots, seed, threads);
}

/// Product of branch probabilities along the path of `bits`; 0 on a zero stub.
inline double state_probability(const Package &pkg, const StateDD &state, std::string_view bits,
                                const ProbabilityMap &down) {
    if (bits.size() != state.num_qubits) {
        throw ConfigError("bitstring length " + std::to_string(bits.size()) + " does not match " +
                          std::to_string(state.num_qubits) + " qubits");
    }
    Edge e = state.root;
    double p = 1.0;
    while (!e.is_terminal()) {
        const Node &n = pkg.node(e.node);
        char c = bits[state.num_qubits - 1 - static_cast<std::size_t>(n.level)];
        if (c != '0' && c != '1') {
            throw ConfigError("bitstring contains a character other than 0 or 1");
        }
        BranchProbabilities bp = branch_probabilities(pkg, e.node, down);
        p *= c == '1' ? bp.high : bp.low;
        e = c == '1' ? n.high : n.low;
    }
    return e.is_zero() ? 0.0 : p;
}

inline double state_probability(const Package &pkg, const StateDD &state, std::string_view bits) {
    return state_probability(pkg, state, bits, downstream(pkg, state));
}

/// P(q_k = 1): high-edge mass summed over the level-k nodes, divided by the total mass.
inline double qubit_marginal(const Package &pkg, const StateDD &state, std::size_t qubit,
                             const ProbabilityAnnotations &ann) {
    if (qubit >= state.num_qubits) {
        throw std::out_of_range("qubit " + std::to_string(qubit) + " out of range for " +
                                std::to_string(state.num_qubits) + " qubits");
    }
    double total = mag2(state.root.weight) * ann.downstream[state.root.node];
    double high = 0.0;
    for (NodeId id : pkg.reachable(state.root)) {
        const Node &n = pkg.node(id);
        if (static_cast<std::size_t>(n.level) == qubit && !n.high.is_zero()) {
            high += ann.upstream[id] * mag2(n.high.weight) * ann.downstream[n.high.node];
        }
    }
    return std::clamp(high / total, 0.0, 1.0);
}

}  // namespace qweak
