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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dd.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "gates.hpp"
#include "rng.hpp"

namespace qweak {

/// Gate list in execution order (left to right in a circuit diagram).
struct Circuit {
    std::string name;
    std::size_t num_qubits = 0;
    std::vector<GateOp> ops;
    /// Qubits named in measure statements; the terminal full-register
    /// measurement is implicit, so these never become gates.
    std::vector<int> measured;

    Circuit &add(std::string_view gate, int target, std::vector<int> controls = {}, std::vector<double> params = {}) {
        GateOp op = make_gate(gate, std::move(params), target, std::move(controls));
        check_indices(op, num_qubits);
        ops.push_back(std::move(op));
        return *this;
    }

    Circuit &cx(int control, int target) {
        return add("x", target, {control});
    }

    /// SWAP lowered to three CNOTs.
    Circuit &swap(int a, int b) {
        return cx(a, b).cx(b, a).cx(a, b);
    }
};

/// QFT: for k = n-1 down to 0, H on q_k then controlled p(pi/2^j) from
/// q_{k-j}; a final SWAP layer reverses the qubit order.
inline Circuit generate_qft(std::size_t n) {
    if (n == 0) {
        throw ConfigError("qft needs at least one qubit");
    }
    Circuit c{"qft_" + std::to_string(n), n, {}, {}};
    for (int k = static_cast<int>(n) - 1; k >= 0; --k) {
        c.add("h", k);
        for (int j = 1; j <= k; ++j) {
            c.add("p", k, {k - j}, {std::numbers::pi / std::ldexp(1.0, j)});
        }
    }
    for (int i = 0; i < static_cast<int>(n / 2); ++i) {
        c.swap(i, static_cast<int>(n) - 1 - i);
    }
    return c;
}

/// Marked element of generate_grover(n, seed).
inline std::uint64_t grover_marked(std::size_t n, std::uint64_t seed) {
    Rng rng(seed, 0x67726F766572ULL);
    return rng.below(std::uint64_t{1} << n);
}

inline std::uint64_t grover_iterations(std::size_t n) {
    return static_cast<std::uint64_t>(std::floor(std::numbers::pi / 4 * std::sqrt(std::ldexp(1.0, static_cast<int>(n)))));
}

/// Grover search over n qubits with a seeded random marked element; the
/// ancilla is q_n, prepared in |-> and restored to |0> at the end.
inline Circuit generate_grover(std::size_t n, std::uint64_t seed) {
    if (n < 1 || n > 30) {
        throw ConfigError("grover needs 1..30 search qubits");
    }
    const int anc = static_cast<int>(n);
    const std::uint64_t marked = grover_marked(n, seed);
    Circuit c{"grover_" + std::to_string(n), n + 1, {}, {}};
    std::vector<int> search(n);
    for (std::size_t q = 0; q < n; ++q) {
        search[q] = static_cast<int>(q);
    }
    c.add("x", anc).add("h", anc);
    for (int q : search) {
        c.add("h", q);
    }
    auto flip_zero_bits = [&] {
        for (int q : search) {
            if (((marked >> q) & 1U) == 0) {
                c.add("x", q);
            }
        }
    };
    const std::vector<int> diffusion_controls(search.begin() + 1, search.end());
    for (std::uint64_t it = 0, r = grover_iterations(n); it < r; ++it) {
        flip_zero_bits();
        c.add("x", anc, search);
        flip_zero_bits();
        for (int q : search) {
            c.add("h", q);
        }
        for (int q : search) {
            c.add("x", q);
        }
        c.add("z", 0, diffusion_controls);
        for (int q : search) {
            c.add("x", q);
        }
        for (int q : search) {
            c.add("h", q);
        }
    }
    c.add("h", anc).add("x", anc);
    return c;
}

/// H on q_{n-1}, then a CNOT chain down to q_0.
inline Circuit generate_ghz(std::size_t n) {
    if (n == 0) {
        throw ConfigError("ghz needs at least one qubit");
    }
    Circuit c{"ghz_" + std::to_string(n), n, {}, {}};
    c.add("h", static_cast<int>(n) - 1);
    for (int k = static_cast<int>(n) - 1; k > 0; --k) {
        c.cx(k, k - 1);
    }
    return c;
}

/// `depth` layers; each applies a random rotation (rx/ry/rz, angle in [0, 2pi))
/// to every qubit, then CX or CZ on a random pairing of the qubits.
inline Circuit generate_random(std::size_t n, std::size_t depth, std::uint64_t seed) {
    if (n == 0) {
        throw ConfigError("random circuit needs at least one qubit");
    }
    Circuit c{"random_" + std::to_string(n) + "_" + std::to_string(depth) + "_" + std::to_string(seed), n, {}, {}};
    Rng rng(seed, 0x72616E646F6DULL);
    static constexpr const char *kRotations[] = {"rx", "ry", "rz"};
    std::vector<int> order(n);
    for (std::size_t layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < static_cast<int>(n); ++q) {
            c.add(kRotations[rng.below(3)], q, {}, {2 * std::numbers::pi * rng.uniform()});
        }
        for (std::size_t q = 0; q < n; ++q) {
            order[q] = static_cast<int>(q);
        }
        for (std::size_t q = n; q > 1; --q) {
            std::swap(order[q - 1], order[rng.below(q)]);
        }
        for (std::size_t q = 0; q + 1 < n; q += 2) {
            c.add(rng.below(2) == 0 ? "x" : "z", order[q + 1], {order[q]});
        }
    }
    return c;
}

/// Strong simulation on the decision-diagram backend, starting from |0...0>.
/// Runs a collection between gates once the package crosses its threshold.
inline StateDD simulate_dd(Package &pkg, const Circuit &circuit) {
    if (circuit.num_qubits > pkg.num_qubits()) {
        throw ConfigError("circuit has more qubits than the package");
    }
    StateDD state = pkg.zero_state(circuit.num_qubits);
    for (const GateOp &op : circuit.ops) {
        state = apply_dd(pkg, state, op);
        pkg.maybe_collect(std::span<const Edge>(&state.root, 1));
    }
    return state;
}

/// Strong simulation on the dense backend. Refuses with MemoryOutError above the limit.
inline DenseState simulate_dense(const Circuit &circuit, std::size_t dense_limit = kDefaultDenseLimit) {
    DenseState state = DenseState::zero_state(circuit.num_qubits, dense_limit);
    for (const GateOp &op : circuit.ops) {
        apply_dense(state.amplitudes(), op);
    }
    return state;
}

enum class Backend { kDense, kDD };

using SimulationResult = std::variant<DenseState, StateDD>;

inline SimulationResult run(const Circuit &circuit, Backend backend, Package &pkg,
                            std::size_t dense_limit = kDefaultDenseLimit) {
    if (backend == Backend::kDense) {
        return simulate_dense(circuit, dense_limit);
    }
    return simulate_dd(pkg, circuit);
}

}  // namespace qweak
