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
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "dd.hpp"
#include "errors.hpp"

namespace qweak {

/// Sample counts keyed by bitstring (leftmost character = q_{n-1}).
struct Histogram {
    std::size_t num_qubits = 0;
    std::uint64_t total = 0;
    std::map<std::string, std::uint64_t> counts;

    void add(const std::string &bits, std::uint64_t count = 1) {
        if (bits.size() != num_qubits) {
            throw ConfigError("bitstring length does not match histogram width");
        }
        counts[bits] += count;
        total += count;
    }

    /// Order-independent: merging in any order yields the same histogram.
    void merge(const Histogram &other) {
        if (other.num_qubits != num_qubits) {
            throw ConfigError("cannot merge histograms of different widths");
        }
        for (const auto &[bits, count] : other.counts) {
            counts[bits] += count;
        }
        total += other.total;
    }

    std::uint64_t count(const std::string &bits) const {
        auto it = counts.find(bits);
        return it == counts.end() ? 0 : it->second;
    }

    double frequency(const std::string &bits) const {
        return total == 0 ? 0.0 : static_cast<double>(count(bits)) / static_cast<double>(total);
    }

    static Histogram from_samples(const std::vector<std::string> &samples, std::size_t num_qubits) {
        Histogram h{num_qubits, 0, {}};
        for (const auto &s : samples) {
            h.add(s);
        }
        return h;
    }

    friend bool operator==(const Histogram &, const Histogram &) = default;
};

/// Counts per basis index; requires n <= 30 so the vector stays small.
inline std::vector<std::uint64_t> observed_counts(const Histogram &hist) {
    if (hist.num_qubits > 30) {
        throw ConfigError("histogram too wide for a dense count vector");
    }
    std::vector<std::uint64_t> out(std::size_t{1} << hist.num_qubits, 0);
    for (const auto &[bits, count] : hist.counts) {
        out[bits_to_index(bits)] += count;
    }
    return out;
}

inline std::vector<double> empirical_distribution(const Histogram &hist) {
    std::vector<std::uint64_t> counts = observed_counts(hist);
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(hist.total);
    }
    return out;
}

namespace detail {

inline void check_normalized(std::span<const double> p, const char *what) {
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) {
            throw DistributionError(std::string(what) + " has a negative or NaN entry");
        }
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw DistributionError(std::string(what) + " sums to " + std::to_string(total) + ", not 1");
    }
}

}  // namespace detail

/// Total variation distance (1/2) sum |p_i - q_i|.
inline double tvd(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw DistributionError("distributions over different index sets");
    }
    detail::check_normalized(p, "first distribution");
    detail::check_normalized(q, "second distribution");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += std::abs(p[i] - q[i]);
    }
    return std::min(1.0, 0.5 * sum);
}

struct ChiSquaredResult {
    double statistic = 0.0;
    int dof = 0;
    /// Fewer than two bins after pooling; the outcome is deterministic and any
    /// goodness-of-fit test passes vacuously.
    bool degenerate = false;
};

inline constexpr double kPoolingThreshold = 5.0;
inline constexpr double kSignificance = 0.001;

/// Pearson chi-squared. Bins with expected count < 5 are pooled into one bin;
/// that bin only counts when its expected count is positive.
inline ChiSquaredResult chi_squared(std::span<const std::uint64_t> observed, std::span<const double> exact) {
    if (observed.size() != exact.size()) {
        throw DistributionError("observed and exact distributions differ in size");
    }
    detail::check_normalized(exact, "exact distribution");
    std::uint64_t shots = 0;
    for (auto c : observed) {
        shots += c;
    }
    if (shots == 0) {
        throw DistributionError("chi-squared needs at least one shot");
    }
    const double n = static_cast<double>(shots);
    ChiSquaredResult result;
    int bins = 0;
    double pooled_expected = 0.0;
    double pooled_observed = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        double expected = exact[i] * n;
        double obs = static_cast<double>(observed[i]);
        if (expected < kPoolingThreshold) {
            pooled_expected += expected;
            pooled_observed += obs;
            continue;
        }
        result.statistic += (obs - expected) * (obs - expected) / expected;
        ++bins;
    }
    if (pooled_expected > 0.0) {
        result.statistic += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
        ++bins;
    } else if (pooled_observed > 0.0) {
        result.statistic = std::numeric_limits<double>::infinity();
    }
    result.dof = bins - 1;
    result.degenerate = bins < 2;
    return result;
}

inline ChiSquaredResult chi_squared(const Histogram &hist, std::span<const double> exact) {
    std::vector<std::uint64_t> observed = observed_counts(hist);
    return chi_squared(observed, exact);
}

/// Upper critical value of the chi-squared distribution: P[X > value] = alpha.
inline double chi_squared_critical(int dof, double alpha = kSignificance) {
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, alpha));
}

inline bool chi_squared_passes(const ChiSquaredResult &r, double alpha = kSignificance) {
    if (r.degenerate) {
        return std::isfinite(r.statistic);
    }
    return r.statistic < chi_squared_critical(r.dof, alpha);
}

}  // namespace qweak
