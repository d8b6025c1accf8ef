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
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "complex.hpp"
#include "errors.hpp"

namespace qweak {

using NodeId = std::uint32_t;

/// Handle of the unique terminal node.
inline constexpr NodeId kTerminal = 0;

inline constexpr std::size_t kDefaultDenseLimit = 26;

/// Weighted edge. A zero edge always points at the terminal ("zero stub").
struct Edge {
    NodeId node = kTerminal;
    Complex weight{0.0, 0.0};

    static Edge zero() {
        return {};
    }
    static Edge one() {
        return {kTerminal, {1.0, 0.0}};
    }

    bool is_zero() const {
        return weight == Complex{0.0, 0.0};
    }
    bool is_terminal() const {
        return node == kTerminal;
    }

    friend bool operator==(const Edge &, const Edge &) = default;
};

/// Nonterminal node; `level` k stands for qubit q_k.
struct Node {
    int level = -1;
    Edge low;
    Edge high;
};

enum class Normalization {
    /// Divide both outgoing weights by their joint norm, then rotate so the
    /// first nonzero weight is real and non-negative. |w_low|^2 + |w_high|^2 = 1.
    kNorm,
    /// Divide both outgoing weights by the first nonzero one (which becomes 1).
    kLeftmost,
};

struct PackageConfig {
    double tolerance = kDefaultTolerance;
    Normalization normalization = Normalization::kNorm;
    /// Live node count above which maybe_collect() runs a collection.
    std::size_t gc_threshold = std::size_t{1} << 18;
    /// Enables the add and gate-application compute tables.
    bool caching = true;
};

struct NormalizedPair {
    Complex low;
    Complex high;
    Complex factor;
};

/// Splits (raw_low, raw_high) into stored weights and the factor pulled onto the
/// incoming edge, so that factor * stored_x == raw_x. Returns nullopt when both
/// inputs are zero within tol; the caller must emit a zero stub instead.
inline std::optional<NormalizedPair> normalize_pair(Complex raw_low, Complex raw_high, double tol = kDefaultTolerance,
                                                    Normalization scheme = Normalization::kNorm) {
    bool low_zero = approx_zero(raw_low, tol);
    bool high_zero = approx_zero(raw_high, tol);
    if (low_zero && high_zero) {
        return std::nullopt;
    }
    // A side that would store as zero after rescaling is treated as zero up
    // front, so the phase is always taken from the weight that survives.
    double norm = std::sqrt(mag2(raw_low) + mag2(raw_high));
    if (!low_zero && !high_zero) {
        low_zero = approx_zero(raw_low / norm, tol);
        high_zero = approx_zero(raw_high / norm, tol);
    }
    if (scheme == Normalization::kLeftmost) {
        if (low_zero) {
            return NormalizedPair{{0.0, 0.0}, {1.0, 0.0}, raw_high};
        }
        return NormalizedPair{{1.0, 0.0}, high_zero ? Complex{} : raw_high / raw_low, raw_low};
    }
    if (low_zero) {
        return NormalizedPair{{0.0, 0.0}, {1.0, 0.0}, raw_high};
    }
    if (high_zero) {
        return NormalizedPair{{1.0, 0.0}, {0.0, 0.0}, raw_low};
    }
    double low_mag = std::abs(raw_low);
    Complex phase = raw_low / low_mag;
    return NormalizedPair{{low_mag / norm, 0.0}, raw_high * std::conj(phase) / norm, phase * norm};
}

/// A quantum state as an edge-weighted decision diagram. Plain value; the
/// nodes live in the Package that built it.
struct StateDD {
    Edge root;
    std::size_t num_qubits = 0;
};

/// Formats index as an n-character bitstring, leftmost character = q_{n-1}.
inline std::string index_to_bits(std::uint64_t index, std::size_t n) {
    std::string bits(n, '0');
    for (std::size_t k = 0; k < n && k < 64; ++k) {
        if ((index >> k) & 1U) {
            bits[n - 1 - k] = '1';
        }
    }
    return bits;
}

inline std::uint64_t bits_to_index(std::string_view bits) {
    if (bits.size() > 64) {
        throw ConfigError("bitstring longer than 64 characters cannot be converted to an index");
    }
    std::uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw ConfigError("bitstring contains a character other than 0 or 1");
        }
        index = (index << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return index;
}

/// Owns decision-diagram nodes: arena, unique table with tolerant weight
/// matching, the add compute table and garbage collection.
///
/// Mutation is single-threaded. Read-only queries (amplitude, to_dense,
/// node_count and everything in sampler.hpp) may run concurrently once no
/// mutation is in flight.
class Package {
  public:
    explicit Package(std::size_t num_qubits, PackageConfig config = {})
        : num_qubits_(num_qubits), config_(config), reals_(config.tolerance) {
        if (num_qubits == 0) {
            throw ConfigError("package needs at least one qubit");
        }
        if (!(config.tolerance > 0.0)) {
            throw ConfigError("tolerance must be positive");
        }
        nodes_.push_back(Node{});  // terminal
    }

    Package(const Package &) = delete;
    Package &operator=(const Package &) = delete;

    std::size_t num_qubits() const {
        return num_qubits_;
    }
    const PackageConfig &config() const {
        return config_;
    }
    double tolerance() const {
        return config_.tolerance;
    }

    const Node &node(NodeId id) const {
        return nodes_[id];
    }

    /// Level of the node an edge points to; -1 for the terminal.
    int level(const Edge &e) const {
        return nodes_[e.node].level;
    }

    /// Arena size; valid NodeIds are below this. Sized for per-node side tables.
    std::size_t arena_size() const {
        return nodes_.size();
    }

    std::size_t unique_table_size() const {
        return unique_count_;
    }

    std::size_t live_nodes() const {
        return unique_count_;
    }

    /// Edge to the canonical node (level, low, high), weighted with the pulled factor.
    /// `slack` widens the snapping window for weights known to carry more than
    /// the base tolerance of absolute error relative to their norm.
    Edge make_node(int level, Edge low, Edge high, double slack = 1.0) {
        if (level < 0 || static_cast<std::size_t>(level) >= num_qubits_) {
            throw ConfigError("node level " + std::to_string(level) + " outside [0, " + std::to_string(num_qubits_) +
                              ")");
        }
        low = canonical_child(low);
        high = canonical_child(high);
        check_child(level, low);
        check_child(level, high);
        double window = config_.tolerance * slack;
        auto pair = normalize_pair(low.weight, high.weight, window, config_.normalization);
        if (!pair) {
            return Edge::zero();
        }
        low.weight = pair->low;
        high.weight = pair->high;
        if (low.weight == Complex{}) {
            low = Edge::zero();
        }
        if (high.weight == Complex{}) {
            high = Edge::zero();
        }
        NodeId id = lookup_or_insert(Node{level, low, high}, window);
        assert(node_is_normalized(id, 10 * window + 1e-10));
        return Edge{id, pair->factor};
    }

    /// w * e, collapsing to a zero stub when the product vanishes.
    Edge scale(const Edge &e, Complex w) const {
        if (e.is_zero()) {
            return Edge::zero();
        }
        Complex product = e.weight * w;
        if (approx_zero(product, config_.tolerance)) {
            return Edge::zero();
        }
        return Edge{e.node, product};
    }

    /// Entrywise sum of the vectors represented by two edges at the same level.
    Edge add(Edge x, Edge y) {
        if (x.is_zero()) {
            return canonical_child(y);
        }
        if (y.is_zero()) {
            return canonical_child(x);
        }
        if (x.node == y.node) {
            return canonical_child(Edge{x.node, x.weight + y.weight});
        }
        int lvl = level(x);
        if (lvl != level(y)) {
            throw ConfigError("add: operands at different levels");
        }
        if (x.node > y.node) {
            std::swap(x, y);
        }
        Complex ratio = reals_.intern(y.weight / x.weight);
        AddKey key{x.node, y.node, ratio.real(), ratio.imag()};
        if (config_.caching) {
            auto it = add_cache_.find(key);
            if (it != add_cache_.end()) {
                return scale(it->second, x.weight);
            }
        }
        const Node nx = nodes_[x.node];
        const Node ny = nodes_[y.node];
        Edge low = add(nx.low, scale(ny.low, ratio));
        Edge high = add(nx.high, scale(ny.high, ratio));
        // Both operands carry absolute error up to tol times their norm. When the
        // sum cancels down to a much smaller norm, that error is amplified in the
        // normalized weights, so the snapping window grows by the same ratio.
        double operand_norm = 1.0 + std::abs(ratio);
        double result_norm = std::sqrt(mag2(low.weight) + mag2(high.weight));
        double slack = result_norm > 0.0 ? std::max(1.0, operand_norm / result_norm) : 1.0;
        Edge result = make_node(lvl, low, high, slack);
        if (config_.caching) {
            add_cache_.emplace(key, result);
        }
        return scale(result, x.weight);
    }

    /// |bits>, where bits[0] is q_{n-1}.
    StateDD basis_state(std::size_t n, std::string_view bits) {
        if (n == 0 || n > num_qubits_) {
            throw ConfigError("basis state needs 1.." + std::to_string(num_qubits_) + " qubits, got " +
                              std::to_string(n));
        }
        if (bits.size() != n) {
            throw ConfigError("bitstring length " + std::to_string(bits.size()) + " does not match " +
                              std::to_string(n) + " qubits");
        }
        Edge e = Edge::one();
        for (std::size_t k = 0; k < n; ++k) {
            char c = bits[n - 1 - k];
            if (c != '0' && c != '1') {
                throw ConfigError("bitstring contains a character other than 0 or 1");
            }
            e = c == '0' ? make_node(static_cast<int>(k), e, Edge::zero())
                         : make_node(static_cast<int>(k), Edge::zero(), e);
        }
        return StateDD{e, n};
    }

    StateDD zero_state(std::size_t n) {
        return basis_state(n, std::string(n, '0'));
    }

    /// Builds the canonical diagram of a dense vector bottom-up.
    StateDD from_dense(std::span<const Complex> amplitudes) {
        std::size_t size = amplitudes.size();
        if (size < 2 || (size & (size - 1)) != 0) {
            throw ConfigError("dense vector length " + std::to_string(size) + " is not a power of two >= 2");
        }
        std::size_t n = static_cast<std::size_t>(std::countr_zero(size));
        if (n > num_qubits_) {
            throw ConfigError("dense vector has more qubits than the package");
        }
        for (Complex a : amplitudes) {
            if (!is_finite(a)) {
                throw ConfigError("dense vector contains a non-finite amplitude");
            }
        }
        Edge root = build_dense(amplitudes, static_cast<int>(n) - 1, 0);
        if (root.is_zero()) {
            throw ConfigError("cannot build a decision diagram for the all-zero vector");
        }
        return StateDD{root, n};
    }

    /// Product of edge weights along the path selected by the bits of index.
    Complex amplitude(const StateDD &state, std::uint64_t index) const {
        if (state.num_qubits < 64 && index >= (std::uint64_t{1} << state.num_qubits)) {
            throw std::out_of_range("amplitude index " + std::to_string(index) + " out of range for " +
                                    std::to_string(state.num_qubits) + " qubits");
        }
        Edge e = state.root;
        Complex value = e.weight;
        for (int k = static_cast<int>(state.num_qubits) - 1; k >= 0; --k) {
            if (e.is_zero()) {
                return {0.0, 0.0};
            }
            const Node &n = nodes_[e.node];
            e = ((index >> k) & 1U) ? n.high : n.low;
            value *= e.weight;
        }
        return e.is_zero() ? Complex{} : value;
    }

    std::vector<Complex> to_dense(const StateDD &state, std::size_t dense_limit = kDefaultDenseLimit) const {
        if (state.num_qubits > dense_limit) {
            throw MemoryOutError(state.num_qubits, dense_limit);
        }
        std::vector<Complex> out(std::size_t{1} << state.num_qubits);
        fill_dense(state.root, static_cast<int>(state.num_qubits) - 1, 0, {1.0, 0.0}, out);
        return out;
    }

    /// Distinct nonterminal nodes reachable from the root.
    std::size_t node_count(const StateDD &state) const {
        std::vector<NodeId> order = reachable(state.root);
        return order.size();
    }

    /// Reachable nonterminal nodes, parents before children (DFS preorder).
    std::vector<NodeId> reachable(const Edge &root) const {
        std::vector<NodeId> out;
        if (root.is_zero() || root.is_terminal()) {
            return out;
        }
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<NodeId> stack{root.node};
        seen[root.node] = 1;
        while (!stack.empty()) {
            NodeId id = stack.back();
            stack.pop_back();
            out.push_back(id);
            const Node &n = nodes_[id];
            for (const Edge *child : {&n.high, &n.low}) {
                if (!child->is_zero() && !child->is_terminal() && !seen[child->node]) {
                    seen[child->node] = 1;
                    stack.push_back(child->node);
                }
            }
        }
        return out;
    }

    /// Mark-and-sweep from `roots`. Every diagram not reachable from them is
    /// invalidated; compute tables are cleared.
    void collect(std::span<const Edge> roots) {
        std::vector<char> marked(nodes_.size(), 0);
        marked[kTerminal] = 1;
        for (const Edge &root : roots) {
            if (root.is_zero() || root.is_terminal() || marked[root.node]) {
                continue;
            }
            std::vector<NodeId> stack{root.node};
            marked[root.node] = 1;
            while (!stack.empty()) {
                const Node &n = nodes_[stack.back()];
                stack.pop_back();
                for (const Edge *child : {&n.low, &n.high}) {
                    if (!marked[child->node]) {
                        marked[child->node] = 1;
                        stack.push_back(child->node);
                    }
                }
            }
        }
        for (auto it = unique_.begin(); it != unique_.end();) {
            Bucket &bucket = it->second;
            for (auto entry = bucket.begin(); entry != bucket.end();) {
                if (marked[entry->second]) {
                    ++entry;
                    continue;
                }
                nodes_[entry->second] = Node{};
                free_.push_back(entry->second);
                --unique_count_;
                entry = bucket.erase(entry);
            }
            it = bucket.empty() ? unique_.erase(it) : std::next(it);
        }
        reals_.clear();
        add_cache_.clear();
        ++collections_;
    }

    /// Collects when the node count exceeds the threshold. The threshold starts
    /// at the configured value and doubles past whatever survives a collection,
    /// so a large live diagram does not trigger a collection after every gate.
    bool maybe_collect(std::span<const Edge> roots) {
        std::size_t threshold = std::max(config_.gc_threshold, gc_floor_);
        if (unique_count_ <= threshold && add_cache_.size() <= 4 * threshold) {
            return false;
        }
        collect(roots);
        gc_floor_ = 2 * unique_count_;
        return true;
    }

    std::size_t collections() const {
        return collections_;
    }

    /// Normalization invariant of a stored node under the configured scheme.
    bool node_is_normalized(NodeId id, double tol = 1e-10) const {
        const Node &n = nodes_[id];
        if (n.low.is_zero() && n.high.is_zero()) {
            return false;
        }
        const Edge &first = n.low.is_zero() ? n.high : n.low;
        if (config_.normalization == Normalization::kLeftmost) {
            return std::abs(first.weight - Complex{1.0, 0.0}) < tol;
        }
        double sum = mag2(n.low.weight) + mag2(n.high.weight);
        return std::abs(sum - 1.0) < tol && first.weight.real() >= 0.0 &&
               std::abs(first.weight.imag()) < config_.tolerance;
    }

  private:
    using Bucket = std::multimap<double, NodeId>;

    struct NodeKey {
        int level;
        NodeId low;
        NodeId high;

        friend bool operator==(const NodeKey &, const NodeKey &) = default;
    };

    struct AddKey {
        NodeId x;
        NodeId y;
        double re;
        double im;

        friend bool operator==(const AddKey &, const AddKey &) = default;
    };

    static std::size_t mix_hash(std::size_t h, std::uint64_t v) {
        return static_cast<std::size_t>(splitmix(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2))));
    }
    static std::uint64_t splitmix(std::uint64_t x) {
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }
    static std::uint64_t bits_of(double d) {
        d += 0.0;  // -0.0 -> +0.0
        std::uint64_t b;
        std::memcpy(&b, &d, sizeof b);
        return b;
    }

    struct NodeKeyHash {
        std::size_t operator()(const NodeKey &k) const {
            std::size_t h = static_cast<std::size_t>(k.level);
            h = mix_hash(h, k.low);
            return mix_hash(h, k.high);
        }
    };

    struct AddKeyHash {
        std::size_t operator()(const AddKey &k) const {
            std::size_t h = mix_hash(k.x, k.y);
            h = mix_hash(h, bits_of(k.re));
            return mix_hash(h, bits_of(k.im));
        }
    };

    static NodeKey key_of(const Node &n) {
        return NodeKey{n.level, n.low.node, n.high.node};
    }

    Edge canonical_child(Edge e) const {
        if (!is_finite(e.weight)) {
            throw ConfigError("non-finite edge weight");
        }
        if (approx_zero(e.weight, config_.tolerance)) {
            return Edge::zero();
        }
        return e;
    }

    void check_child(int level, const Edge &child) const {
        if (child.is_zero()) {
            return;
        }
        if (nodes_[child.node].level != level - 1) {
            throw ConfigError("child of a level-" + std::to_string(level) + " node must be at level " +
                              std::to_string(level - 1));
        }
    }

    /// Nodes sharing (level, low child, high child) sit in one bucket ordered by
    /// the real part of the high weight; a new node reuses the entry whose
    /// weights are closest within `window`.
    NodeId lookup_or_insert(const Node &n, double window) {
        Bucket &bucket = unique_[key_of(n)];
        double pos = n.high.weight.real();
        NodeId best = kTerminal;
        double best_dist = window;
        for (auto it = bucket.lower_bound(pos - window); it != bucket.end() && it->first < pos + window; ++it) {
            const Node &m = nodes_[it->second];
            double d = std::max(weight_distance(m.low.weight, n.low.weight),
                                weight_distance(m.high.weight, n.high.weight));
            if (d < best_dist) {
                best_dist = d;
                best = it->second;
            }
        }
        if (best != kTerminal) {
            return best;
        }
        NodeId id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
            nodes_[id] = n;
        } else {
            id = static_cast<NodeId>(nodes_.size());
            nodes_.push_back(n);
        }
        bucket.emplace(pos, id);
        ++unique_count_;
        return id;
    }

    static double weight_distance(Complex a, Complex b) {
        return std::max(std::abs(a.real() - b.real()), std::abs(a.imag() - b.imag()));
    }

    Edge build_dense(std::span<const Complex> v, int level, std::size_t offset) {
        if (level < 0) {
            return canonical_child(Edge{kTerminal, v[offset]});
        }
        Edge low = build_dense(v, level - 1, offset);
        Edge high = build_dense(v, level - 1, offset + (std::size_t{1} << level));
        return make_node(level, low, high);
    }

    void fill_dense(const Edge &e, int level, std::size_t offset, Complex acc, std::vector<Complex> &out) const {
        if (e.is_zero()) {
            return;
        }
        acc *= e.weight;
        if (level < 0) {
            out[offset] = acc;
            return;
        }
        const Node &n = nodes_[e.node];
        fill_dense(n.low, level - 1, offset, acc, out);
        fill_dense(n.high, level - 1, offset + (std::size_t{1} << level), acc, out);
    }

    std::size_t num_qubits_;
    PackageConfig config_;
    RealTable reals_;
    std::vector<Node> nodes_;
    std::vector<NodeId> free_;
    std::unordered_map<NodeKey, Bucket, NodeKeyHash> unique_;
    std::size_t unique_count_ = 0;
    std::unordered_map<AddKey, Edge, AddKeyHash> add_cache_;
    std::size_t collections_ = 0;
    std::size_t gc_floor_ = 0;
};

}  // namespace qweak
