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
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "complex.hpp"
#include "dd.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace qweak {

/// Explicit 2^n amplitude array; index bit k is qubit q_k.
class DenseState {
  public:
    /// |0...0> on n qubits. Refuses with MemoryOutError above dense_limit.
    static DenseState zero_state(std::size_t num_qubits, std::size_t dense_limit = kDefaultDenseLimit) {
        if (num_qubits == 0) {
            throw ConfigError("dense state needs at least one qubit");
        }
        if (num_qubits > dense_limit || num_qubits >= 63) {
            throw MemoryOutError(num_qubits, dense_limit);
        }
        std::vector<Complex> amps(std::size_t{1} << num_qubits);
        amps[0] = 1.0;
        return DenseState(std::move(amps));
    }

    explicit DenseState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
        std::size_t size = amplitudes_.size();
        if (size < 2 || (size & (size - 1)) != 0) {
            throw ConfigError("dense state length " + std::to_string(size) + " is not a power of two >= 2");
        }
        num_qubits_ = static_cast<std::size_t>(std::countr_zero(size));
    }

    std::size_t num_qubits() const {
        return num_qubits_;
    }
    std::span<const Complex> amplitudes() const {
        return amplitudes_;
    }
    std::span<Complex> amplitudes() {
        return amplitudes_;
    }

  private:
    std::vector<Complex> amplitudes_;
    std::size_t num_qubits_ = 0;
};

/// p_i = |alpha_i|^2.
inline std::vector<double> probabilities(std::span<const Complex> amplitudes) {
    std::vector<double> p(amplitudes.size());
    std::transform(amplitudes.begin(), amplitudes.end(), p.begin(), [](Complex a) { return mag2(a); });
    return p;
}

inline std::vector<double> probabilities(const DenseState &state) {
    return probabilities(state.amplitudes());
}

namespace detail {

inline void check_distribution(std::span<const double> probs, double tol) {
    if (probs.empty()) {
        throw DistributionError("empty probability vector");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw DistributionError("probability entry is negative or not finite");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > tol) {
        throw DistributionError("probabilities sum to " + std::to_string(total) + ", not 1");
    }
}

inline std::size_t last_positive(std::span<const double> probs) {
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            last = i;
        }
    }
    return last;
}

inline void check_unit_interval(double u) {
    if (!(u >= 0.0 && u < 1.0)) {
        throw std::out_of_range("sampling value must lie in [0, 1)");
    }
}

}  // namespace detail

/// Non-decreasing cumulative probabilities r_i = sum_{k<=i} p_k.
///
/// Entries are capped at 1, and every entry from the last positive-probability
/// index onward is exactly 1, so any u in [0, 1) resolves to an index with p_i > 0.
class PrefixTable {
  public:
    explicit PrefixTable(std::span<const double> probs, double sum_tolerance = 1e-6) {
        detail::check_distribution(probs, sum_tolerance);
        std::size_t last = detail::last_positive(probs);
        r_.resize(probs.size());
        double running = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            running += probs[i];
            r_[i] = i >= last ? 1.0 : std::min(running, 1.0);
        }
    }

    std::span<const double> values() const {
        return r_;
    }
    std::size_t size() const {
        return r_.size();
    }
    double operator[](std::size_t i) const {
        return r_[i];
    }

    /// Smallest i with r_i > u, by binary search.
    std::size_t sample_index(double u) const {
        detail::check_unit_interval(u);
        return static_cast<std::size_t>(std::upper_bound(r_.begin(), r_.end(), u) - r_.begin());
    }

  private:
    std::vector<double> r_;
};

inline PrefixTable prefix_sum(std::span<const double> probs) {
    return PrefixTable(probs);
}

inline std::size_t sample_index(const PrefixTable &prefix, double u) {
    return prefix.sample_index(u);
}

/// Linear-scan counterpart of sample_index with the same clamping rules.
inline std::size_t sample_index_linear(std::span<const double> probs, double u, double sum_tolerance = 1e-6) {
    detail::check_distribution(probs, sum_tolerance);
    detail::check_unit_interval(u);
    std::size_t last = detail::last_positive(probs);
    double running = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        running += probs[i];
        double r = i >= last ? 1.0 : std::min(running, 1.0);
        if (r > u) {
            return i;
        }
    }
    return last;
}

/// Draws shots from a dense state: one prefix table, one binary search per shot.
class DenseSampler {
  public:
    explicit DenseSampler(const DenseState &state)
        : num_qubits_(state.num_qubits()), prefix_(probabilities(state)) {
    }

    std::size_t num_qubits() const {
        return num_qubits_;
    }
    const PrefixTable &prefix() const {
        return prefix_;
    }

    std::uint64_t sample_index(Rng &rng) const {
        return prefix_.sample_index(rng.uniform());
    }

    std::string sample_one(Rng &rng) const {
        return index_to_bits(sample_index(rng), num_qubits_);
    }

    /// Shots in draw order. Worker t draws its share from stream (seed, t);
    /// results are concatenated in worker order.
    std::vector<std::string> sample_sequence(std::uint64_t shots, std::uint64_t seed, unsigned threads = 1) const {
        return run_workers(shots, seed, threads, [this](Rng &rng) { return sample_one(rng); });
    }

    Histogram sample_histogram(std::uint64_t shots, std::uint64_t seed, unsigned threads = 1) const {
        return Histogram::from_samples(sample_sequence(shots, seed, threads), num_qubits_);
    }

  private:
    std::size_t num_qubits_;
    PrefixTable prefix_;
};

/// Histogram of `shots` samples drawn from the dense state with a seeded PRNG.
inline Histogram sample_bitstrings(const DenseState &state, std::uint64_t shots, std::uint64_t seed,
                                   unsigned threads = 1, std::size_t dense_limit = kDefaultDenseLimit) {
    if (shots == 0) {
        throw ConfigError("shots must be at least 1");
    }
    if (state.num_qubits() > dense_limit) {
        throw MemoryOutError(state.num_qubits(), dense_limit);
    }
    return DenseSampler(state).sample_histogram(shots, seed, threads);
}

}  // namespace qweak
