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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "circuit.hpp"
#include "dd.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "qasm.hpp"
#include "sampler.hpp"
#include "stats.hpp"

namespace qweak::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kParseError = 2,
    kMemoryOut = 3,
    kCheckFailed = 4,
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// Generator mini-syntax: qft:N, ghz:N, grover:N[:seed], random:N:depth[:seed].
inline Circuit circuit_from_spec(const std::string &spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) {
        parts.push_back(item);
    }
    auto number = [&](std::size_t i) -> std::uint64_t {
        const std::string &s = parts[i];
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError("'" + s + "' is not a non-negative integer");
        }
        return v;
    };
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (parts.size() < lo + 1 || parts.size() > hi + 1) {
            throw ConfigError("wrong number of parameters");
        }
    };
    if (parts.empty()) {
        throw ConfigError("empty generator spec");
    }
    const std::string &kind = parts[0];
    try {
        if (kind == "qft") {
            arity(1, 1);
            return generate_qft(number(1));
        }
        if (kind == "ghz") {
            arity(1, 1);
            return generate_ghz(number(1));
        }
        if (kind == "grover") {
            arity(1, 2);
            return generate_grover(number(1), parts.size() > 2 ? number(2) : 0);
        }
        if (kind == "random") {
            arity(2, 3);
            return generate_random(number(1), number(2), parts.size() > 3 ? number(3) : 0);
        }
    } catch (const ConfigError &e) {
        throw ConfigError("generator spec '" + spec + "': " + e.what());
    }
    throw ConfigError("unknown generator '" + kind + "'");
}

inline Circuit load_circuit_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open circuit file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::string name = path;
    auto slash = name.find_last_of('/');
    if (slash != std::string::npos) {
        name = name.substr(slash + 1);
    }
    auto dot = name.rfind('.');
    if (dot != std::string::npos && dot > 0) {
        name = name.substr(0, dot);
    }
    return parse_qasm(buf.str(), name);
}

inline std::size_t default_dense_limit() {
    if (const char *env = std::getenv("QWEAK_DENSE_LIMIT")) {
        std::size_t v = 0;
        std::string s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) {
            return v;
        }
    }
    return kDefaultDenseLimit;
}

struct CommonOptions {
    std::string circuit_path;
    std::string gen;
    std::uint64_t shots = 1000000;
    std::uint64_t seed = 0;
    std::size_t dense_limit = kDefaultDenseLimit;
    unsigned threads = 1;
};

inline Circuit load(const CommonOptions &o) {
    if (!o.circuit_path.empty()) {
        return load_circuit_file(o.circuit_path);
    }
    return circuit_from_spec(o.gen);
}

/// One row of the size/time report. Vector size counts amplitudes, DD size counts
/// nonterminal nodes.
struct RunReport {
    std::string circuit;
    std::size_t qubits = 0;
    std::string backend;
    std::string size;
    double precompute_seconds = 0.0;
    double sampling_seconds = 0.0;
    std::uint64_t shots = 0;
    bool memory_out = false;
    std::optional<Histogram> histogram;
};

inline std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline std::string vector_size(std::size_t qubits) {
    return qubits < 64 ? std::to_string(std::uint64_t{1} << qubits) : "2^" + std::to_string(qubits);
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Strong simulation plus shot generation on one backend.
inline RunReport simulate_and_sample(const Circuit &circuit, Backend backend, const CommonOptions &o,
                                     std::vector<std::string> &samples) {
    RunReport r;
    r.circuit = circuit.name;
    r.qubits = circuit.num_qubits;
    r.backend = backend == Backend::kDense ? "vector" : "dd";
    r.shots = o.shots;
    if (backend == Backend::kDense) {
        r.size = vector_size(circuit.num_qubits);
        Stopwatch pre;
        DenseState state = simulate_dense(circuit, o.dense_limit);
        DenseSampler sampler(state);
        r.precompute_seconds = pre.seconds();
        Stopwatch draw;
        samples = sampler.sample_sequence(o.shots, o.seed, o.threads);
        r.sampling_seconds = draw.seconds();
    } else {
        Stopwatch pre;
        Package pkg(circuit.num_qubits);
        StateDD state = simulate_dd(pkg, circuit);
        DDSampler sampler(pkg, state);
        r.size = std::to_string(pkg.node_count(state));
        r.precompute_seconds = pre.seconds();
        Stopwatch draw;
        samples = sampler.sample_sequence(o.shots, o.seed, o.threads);
        r.sampling_seconds = draw.seconds();
    }
    return r;
}

inline std::string report_line(const RunReport &r) {
    std::ostringstream s;
    s << "circuit=" << r.circuit << " qubits=" << r.qubits << " backend=" << r.backend << " size=" << r.size
      << " precompute_s=" << fixed3(r.precompute_seconds) << " sampling_s=" << fixed3(r.sampling_seconds)
      << " shots=" << r.shots;
    return s.str();
}

/// {"circuit": name, "qubits": n, "shots": s, "counts": {bitstring: count}}, keys sorted.
inline void write_histogram_json(std::ostream &os, const std::string &name, const Histogram &h) {
    os << "{\"circuit\":" << nlohmann::json(name).dump() << ",\"qubits\":" << h.num_qubits
       << ",\"shots\":" << h.total << ",\"counts\":{";
    bool first = true;
    for (const auto &[bits, count] : h.counts) {
        os << (first ? "" : ",") << '"' << bits << "\":" << count;
        first = false;
    }
    os << "}}\n";
}

class Output {
  public:
    Output(const std::string &path, std::ostream &fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) {
            throw IoError("cannot open output file '" + path + "'");
        }
        stream_ = file_.get();
    }

    std::ostream &stream() {
        return *stream_;
    }

    void finish() {
        stream_->flush();
        if (!*stream_) {
            throw IoError("write failed");
        }
    }

  private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream *stream_ = nullptr;
};

inline int cmd_sample(const CommonOptions &o, const std::string &backend_name, const std::string &format,
                      const std::string &output, std::ostream &out, std::ostream &err) {
    Circuit circuit = load(o);
    Backend backend = backend_name == "vector" ? Backend::kDense : Backend::kDD;
    std::vector<std::string> samples;
    RunReport report = simulate_and_sample(circuit, backend, o, samples);
    Output sink(output, out);
    if (format == "lines") {
        std::string buffer;
        buffer.reserve(samples.size() * (circuit.num_qubits + 1));
        for (const auto &s : samples) {
            buffer += s;
            buffer += '\n';
        }
        sink.stream() << buffer;
    } else {
        write_histogram_json(sink.stream(), circuit.name, Histogram::from_samples(samples, circuit.num_qubits));
    }
    sink.finish();
    err << report_line(report) << '\n';
    return kOk;
}

/// Exact distribution, per-amplitude deviation and statistical gates for both backends.
inline int cmd_compare(const CommonOptions &o, std::ostream &out, std::ostream &err) {
    Circuit circuit = load(o);
    if (circuit.num_qubits > 10) {
        throw ConfigError("compare supports at most 10 qubits, circuit has " + std::to_string(circuit.num_qubits));
    }
    DenseState dense = simulate_dense(circuit, o.dense_limit);
    Package pkg(circuit.num_qubits);
    StateDD dd = simulate_dd(pkg, circuit);

    std::vector<Complex> dd_amps = pkg.to_dense(dd);
    std::vector<double> exact = probabilities(dense);
    ProbabilityMap down = downstream(pkg, dd);
    double max_amp_dev = 0.0;
    double max_prob_dev = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        max_amp_dev = std::max(max_amp_dev, std::abs(dd_amps[i] - dense.amplitudes()[i]));
        double p = state_probability(pkg, dd, index_to_bits(i, circuit.num_qubits), down);
        max_prob_dev = std::max(max_prob_dev, std::abs(p - exact[i]));
        support += exact[i] > 0.0 ? 1 : 0;
    }
    double tvd_limit = 3.0 * std::sqrt(static_cast<double>(support) / static_cast<double>(o.shots));

    Histogram h_dense = DenseSampler(dense).sample_histogram(o.shots, o.seed, o.threads);
    Histogram h_dd = DDSampler(pkg, dd).sample_histogram(o.shots, o.seed, o.threads);

    nlohmann::ordered_json j;
    j["circuit"] = circuit.name;
    j["qubits"] = circuit.num_qubits;
    j["shots"] = o.shots;
    j["max_amplitude_deviation"] = max_amp_dev;
    j["max_probability_deviation"] = max_prob_dev;
    j["tvd_limit"] = tvd_limit;
    std::vector<std::string> failures;
    if (!(max_amp_dev < 1e-10)) {
        failures.push_back("max_amplitude_deviation");
    }
    if (!(max_prob_dev < 1e-10)) {
        failures.push_back("max_probability_deviation");
    }
    for (auto [label, hist] : {std::pair{"vector", &h_dense}, std::pair{"dd", &h_dd}}) {
        double d = tvd(empirical_distribution(*hist), exact);
        ChiSquaredResult chi = chi_squared(*hist, exact);
        bool chi_ok = chi_squared_passes(chi);
        nlohmann::ordered_json b;
        b["tvd"] = d;
        b["chi2"] = chi.statistic;
        b["dof"] = chi.dof;
        b["chi2_critical"] = chi.degenerate ? 0.0 : chi_squared_critical(chi.dof);
        b["degenerate"] = chi.degenerate;
        j[label] = b;
        if (!(d < tvd_limit)) {
            failures.push_back(std::string("tvd_") + label);
        }
        if (!chi_ok) {
            failures.push_back(std::string("chi2_") + label);
        }
    }
    j["pass"] = failures.empty();
    j["failures"] = failures;
    out << j.dump(2) << '\n';
    for (const auto &f : failures) {
        err << "FAIL: " << f << '\n';
    }
    return failures.empty() ? kOk : kCheckFailed;
}

/// One row per (circuit, backend); dense rows over the limit show MO.
inline int cmd_bench(const std::vector<std::string> &gens, const CommonOptions &o, std::ostream &out,
                     std::ostream &err) {
    std::vector<Circuit> circuits;
    for (const auto &g : gens) {
        circuits.push_back(circuit_from_spec(g));
    }
    if (circuits.empty()) {
        return kOk;
    }
    auto row = [&](const RunReport &r) {
        out << std::left << std::setw(16) << r.circuit << std::right << std::setw(7) << r.qubits << "  "
            << std::left << std::setw(7) << r.backend << std::right << std::setw(22) << r.size;
        if (r.memory_out) {
            out << std::setw(14) << "MO" << std::setw(14) << "MO";
        } else {
            out << std::setw(14) << fixed3(r.precompute_seconds) << std::setw(14) << fixed3(r.sampling_seconds);
        }
        out << std::setw(10) << r.shots << '\n';
    };
    out << std::left << std::setw(16) << "name" << std::right << std::setw(7) << "qubits" << "  " << std::left
        << std::setw(7) << "backend" << std::right << std::setw(22) << "size" << std::setw(14) << "precompute[s]"
        << std::setw(14) << "sampling[s]" << std::setw(10) << "shots" << '\n';
    for (const Circuit &c : circuits) {
        for (Backend b : {Backend::kDense, Backend::kDD}) {
            std::vector<std::string> samples;
            RunReport r;
            try {
                r = simulate_and_sample(c, b, o, samples);
            } catch (const MemoryOutError &) {
                r = RunReport{c.name, c.num_qubits, "vector", vector_size(c.num_qubits), 0.0, 0.0, o.shots, true, {}};
            }
            row(r);
        }
    }
    (void)err;
    return kOk;
}

/// Entry point shared by the executable and the tests. args excludes argv[0].
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qweak: weak simulation of quantum circuits by vector and decision-diagram sampling", "qweak"};
    app.require_subcommand(1);

    CommonOptions o;
    o.dense_limit = default_dense_limit();
    std::string backend = "dd";
    std::string format = "histogram";
    std::string output;
    std::vector<std::string> bench_gens;

    auto add_common = [&](CLI::App *sub, bool with_source) {
        if (with_source) {
            auto *circuit_opt = sub->add_option("--circuit", o.circuit_path, "OpenQASM 2.0 circuit file");
            auto *gen_opt = sub->add_option("--gen", o.gen, "generator spec, e.g. qft:16, grover:10:3, random:8:20:1");
            circuit_opt->excludes(gen_opt);
            gen_opt->excludes(circuit_opt);
            sub->callback([sub] {
                if (sub->count("--circuit") + sub->count("--gen") != 1) {
                    throw CLI::ValidationError("exactly one of --circuit or --gen is required");
                }
            });
        }
        sub->add_option("--shots", o.shots, "number of shots")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "PRNG seed");
        sub->add_option("--dense-limit", o.dense_limit, "largest qubit count the vector backend accepts");
        sub->add_option("--threads", o.threads, "sampling worker threads")->check(CLI::PositiveNumber);
    };

    CLI::App *sample = app.add_subcommand("sample", "simulate a circuit and draw measurement samples");
    add_common(sample, true);
    sample->add_option("--backend", backend, "vector or dd")->check(CLI::IsMember({"vector", "dd"}));
    sample->add_option("--format", format, "lines or histogram")->check(CLI::IsMember({"lines", "histogram"}));
    sample->add_option("--output", output, "output path (default stdout)");

    CLI::App *compare = app.add_subcommand("compare", "cross-check both backends against the exact distribution");
    add_common(compare, true);

    CLI::App *bench = app.add_subcommand("bench", "size and time report per circuit and backend");
    add_common(bench, false);
    bench->add_option("--gen", bench_gens, "generator spec (repeatable)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    }

    try {
        if (sample->parsed()) {
            return cmd_sample(o, backend, format, output, out, err);
        }
        if (compare->parsed()) {
            return cmd_compare(o, out, err);
        }
        return cmd_bench(bench_gens, o, out, err);
    } catch (const MemoryOutError &e) {
        err << "error: " << e.what() << '\n';
        return kMemoryOut;
    } catch (const ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const std::bad_alloc &) {
        err << "error: memory out: allocation failed\n";
        return kMemoryOut;
    }
}

}  // namespace qweak::cli
