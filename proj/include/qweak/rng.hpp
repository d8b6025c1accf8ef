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

#include <cstdint>
#include <random>
#include <thread>
#include <utility>
#include <vector>

namespace qweak {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seedable 64-bit generator. Independent streams are derived from
/// (seed, stream id) so parallel workers never share state.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        // rejection sampling keeps results identical across standard libraries
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    std::uint64_t next() {
        return engine_();
    }

  private:
    std::mt19937_64 engine_;
};

/// Draws `shots` results of draw(rng) split over `threads` workers. Worker t
/// uses stream (seed, t) and its results follow those of worker t-1, so the
/// output depends only on (shots, seed, threads).
template <typename Draw>
auto run_workers(std::uint64_t shots, std::uint64_t seed, unsigned threads, Draw draw)
    -> std::vector<decltype(draw(std::declval<Rng &>()))> {
    using Result = decltype(draw(std::declval<Rng &>()));
    threads = threads == 0 ? 1 : threads;
    if (threads > shots && shots > 0) {
        threads = static_cast<unsigned>(shots);
    }
    std::vector<std::vector<Result>> parts(threads);
    auto work = [&](unsigned t) {
        std::uint64_t count = shots / threads + (t < shots % threads ? 1 : 0);
        Rng rng(seed, t);
        parts[t].reserve(count);
        for (std::uint64_t s = 0; s < count; ++s) {
            parts[t].push_back(draw(rng));
        }
    };
    if (threads == 1) {
        work(0);
        return std::move(parts[0]);
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back(work, t);
    }
    for (auto &th : pool) {
        th.join();
    }
    std::vector<Result> out;
    out.reserve(shots);
    for (auto &part : parts) {
        for (auto &r : part) {
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace qweak
