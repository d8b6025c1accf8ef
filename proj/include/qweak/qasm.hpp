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
#include <cctype>
#include <charconv>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "circuit.hpp"
#include "errors.hpp"
#include "gates.hpp"

// OpenQASM 2.0 subset:
//   OPENQASM 2.0;  include "...";  qreg q[n];  creg c[n];
//   h|x|y|z|s|sdg|t|tdg|id q[i];   rx|ry|rz|p(expr) q[i];
//   cx|cz q[i],q[j];  cp|cu1(expr) q[i],q[j];  ccx q[i],q[j],q[k];  swap q[i],q[j];
//   measure q[i] -> c[j];  barrier ...;  // comments
// expr: decimal literals, pi, + - * /, unary minus, parentheses.

namespace qweak {
namespace detail {

struct Token {
    enum Kind { kIdent, kNumber, kString, kSymbol, kEnd } kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class QasmLexer {
  public:
    explicit QasmLexer(std::string_view src) : src_(src) {
    }

    std::vector<Token> tokenize() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= src_.size()) {
                out.push_back({Token::kEnd, "", line_, col_});
                return out;
            }
            std::size_t line = line_, col = col_;
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    advance();
                }
                out.push_back({Token::kIdent, std::string(src_.substr(start, pos_ - start)), line, col});
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
                    advance();
                }
                if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                    advance();
                    if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                        advance();
                    }
                    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                        advance();
                    }
                }
                out.push_back({Token::kNumber, std::string(src_.substr(start, pos_ - start)), line, col});
            } else if (c == '"') {
                std::size_t start = pos_;
                advance();
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
                    advance();
                }
                if (pos_ >= src_.size() || src_[pos_] != '"') {
                    throw ParseError("unterminated string", line, col);
                }
                advance();
                out.push_back({Token::kString, std::string(src_.substr(start, pos_ - start)), line, col});
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                advance();
                advance();
                out.push_back({Token::kSymbol, "->", line, col});
            } else if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                advance();
                advance();
                out.push_back({Token::kSymbol, "==", line, col});
            } else if (std::string_view("()[],;*/+-{}").find(c) != std::string_view::npos) {
                advance();
                out.push_back({Token::kSymbol, std::string(1, c), line, col});
            } else {
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
            }
        }
    }

  private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance();
                }
            } else {
                return;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class QasmParser {
  public:
    explicit QasmParser(std::string_view src) : tokens_(QasmLexer(src).tokenize()) {
    }

    Circuit parse(std::string name) {
        Circuit circuit;
        circuit.name = std::move(name);
        expect_ident("OPENQASM", "expected 'OPENQASM 2.0;' header");
        const Token &version = next();
        if (version.kind != Token::kNumber || version.text != "2.0") {
            throw ParseError("only OPENQASM 2.0 is supported", version.line, version.column);
        }
        expect_symbol(";");
        while (peek().kind != Token::kEnd) {
            statement(circuit);
        }
        if (!qreg_seen_) {
            throw ParseError("missing qreg declaration", peek().line, peek().column);
        }
        return circuit;
    }

  private:
    void statement(Circuit &circuit) {
        const Token &head = next();
        if (head.kind != Token::kIdent) {
            throw ParseError("expected a statement, found '" + head.text + "'", head.line, head.column);
        }
        const std::string &kw = head.text;
        if (kw == "include") {
            const Token &file = next();
            if (file.kind != Token::kString) {
                throw ParseError("expected file name after include", file.line, file.column);
            }
            expect_symbol(";");
        } else if (kw == "qreg") {
            if (qreg_seen_) {
                throw UnsupportedFeatureError("more than one qreg", head.line, head.column);
            }
            auto [reg, size] = declaration();
            if (size == 0) {
                throw ParseError("qreg size must be positive", head.line, head.column);
            }
            qreg_ = reg;
            qreg_seen_ = true;
            qreg_size_ = size;
            circuit.num_qubits = size;
        } else if (kw == "creg") {
            auto [reg, size] = declaration();
            cregs_.push_back(reg);
        } else if (kw == "barrier") {
            while (!(peek().kind == Token::kSymbol && peek().text == ";")) {
                if (peek().kind == Token::kEnd) {
                    throw ParseError("expected ';'", peek().line, peek().column);
                }
                next();
            }
            next();
        } else if (kw == "measure") {
            require_qreg(head);
            int q = qubit_arg();
            expect_symbol("->");
            const Token &reg = next();
            if (reg.kind != Token::kIdent || std::find(cregs_.begin(), cregs_.end(), reg.text) == cregs_.end()) {
                throw ParseError("unknown classical register '" + reg.text + "'", reg.line, reg.column);
            }
            expect_symbol("[");
            index();
            expect_symbol("]");
            expect_symbol(";");
            circuit.measured.push_back(q);
        } else if (kw == "if" || kw == "gate" || kw == "opaque" || kw == "reset" || kw == "U" || kw == "CX") {
            throw UnsupportedFeatureError("'" + kw + "' statements", head.line, head.column);
        } else {
            gate(circuit, head);
        }
    }

    void gate(Circuit &circuit, const Token &head) {
        std::string name = head.text;
        int arity = 0;
        int params = 0;
        if (name == "id" || name == "i") {
            name = "i";
            arity = 1;
        } else if (name == "cx" || name == "cz" || name == "swap") {
            arity = 2;
        } else if (name == "cp" || name == "cu1") {
            arity = 2;
            params = 1;
        } else if (name == "ccx") {
            arity = 3;
        } else if (builtin_param_count(name) >= 0) {
            arity = 1;
            params = builtin_param_count(name);
        } else {
            throw ParseError("unknown gate '" + name + "'", head.line, head.column);
        }
        require_qreg(head);
        std::vector<double> angles;
        if (peek().kind == Token::kSymbol && peek().text == "(") {
            next();
            if (!(peek().kind == Token::kSymbol && peek().text == ")")) {
                angles.push_back(expression());
                while (peek().kind == Token::kSymbol && peek().text == ",") {
                    next();
                    angles.push_back(expression());
                }
            }
            expect_symbol(")");
        }
        if (static_cast<int>(angles.size()) != params) {
            throw ParseError("gate '" + head.text + "' takes " + std::to_string(params) + " parameter(s)", head.line,
                             head.column);
        }
        std::vector<int> qubits;
        std::vector<const Token *> where;
        for (int a = 0; a < arity; ++a) {
            if (a > 0) {
                expect_symbol(",");
            }
            where.push_back(&peek());
            qubits.push_back(qubit_arg());
        }
        expect_symbol(";");
        for (int a = 0; a < arity; ++a) {
            for (int b = 0; b < a; ++b) {
                if (qubits[a] == qubits[b]) {
                    throw ParseError("repeated qubit argument", where[a]->line, where[a]->column);
                }
            }
        }
        if (name == "cx") {
            circuit.add("x", qubits[1], {qubits[0]});
        } else if (name == "cz") {
            circuit.add("z", qubits[1], {qubits[0]});
        } else if (name == "cp" || name == "cu1") {
            circuit.add("p", qubits[1], {qubits[0]}, angles);
        } else if (name == "ccx") {
            circuit.add("x", qubits[2], {qubits[0], qubits[1]});
        } else if (name == "swap") {
            circuit.swap(qubits[0], qubits[1]);
        } else {
            circuit.add(name, qubits[0], {}, angles);
        }
    }

    std::pair<std::string, std::size_t> declaration() {
        const Token &reg = next();
        if (reg.kind != Token::kIdent) {
            throw ParseError("expected register name", reg.line, reg.column);
        }
        expect_symbol("[");
        std::size_t size = index();
        expect_symbol("]");
        expect_symbol(";");
        return {reg.text, size};
    }

    int qubit_arg() {
        const Token &reg = next();
        if (reg.kind != Token::kIdent || reg.text != qreg_) {
            throw ParseError("expected qubit of register '" + qreg_ + "'", reg.line, reg.column);
        }
        if (!(peek().kind == Token::kSymbol && peek().text == "[")) {
            throw UnsupportedFeatureError("whole-register arguments", peek().line, peek().column);
        }
        next();
        const Token &idx_tok = peek();
        std::size_t idx = index();
        expect_symbol("]");
        if (idx >= num_qubits()) {
            throw ParseError("qubit index " + std::to_string(idx) + " out of range for qreg " + qreg_ + "[" +
                                 std::to_string(num_qubits()) + "]",
                             idx_tok.line, idx_tok.column);
        }
        return static_cast<int>(idx);
    }

    std::size_t index() {
        const Token &t = next();
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (t.kind != Token::kNumber || ec != std::errc() || ptr != t.text.data() + t.text.size()) {
            throw ParseError("expected a non-negative integer index", t.line, t.column);
        }
        return value;
    }

    double expression() {
        double value = term();
        while (peek().kind == Token::kSymbol && (peek().text == "+" || peek().text == "-")) {
            bool plus = next().text == "+";
            double rhs = term();
            value = plus ? value + rhs : value - rhs;
        }
        return value;
    }

    double term() {
        double value = factor();
        while (peek().kind == Token::kSymbol && (peek().text == "*" || peek().text == "/")) {
            bool times = next().text == "*";
            double rhs = factor();
            value = times ? value * rhs : value / rhs;
        }
        return value;
    }

    double factor() {
        const Token &t = next();
        if (t.kind == Token::kSymbol && t.text == "-") {
            return -factor();
        }
        if (t.kind == Token::kSymbol && t.text == "(") {
            double v = expression();
            expect_symbol(")");
            return v;
        }
        if (t.kind == Token::kIdent && t.text == "pi") {
            return std::numbers::pi;
        }
        if (t.kind == Token::kNumber) {
            try {
                std::size_t used = 0;
                double v = std::stod(t.text, &used);
                if (used == t.text.size()) {
                    return v;
                }
            } catch (const std::exception &) {
            }
            throw ParseError("malformed number '" + t.text + "'", t.line, t.column);
        }
        throw ParseError("expected an angle expression", t.line, t.column);
    }

    void require_qreg(const Token &at) const {
        if (!qreg_seen_) {
            throw ParseError("statement before qreg declaration", at.line, at.column);
        }
    }

    std::size_t num_qubits() const {
        return qreg_size_;
    }

    const Token &peek() const {
        return tokens_[pos_];
    }

    const Token &next() {
        const Token &t = tokens_[pos_];
        if (t.kind != Token::kEnd) {
            ++pos_;
        }
        return t;
    }

    void expect_symbol(std::string_view sym) {
        const Token &t = next();
        if (t.kind != Token::kSymbol || t.text != sym) {
            throw ParseError("expected '" + std::string(sym) + "'", t.line, t.column);
        }
    }

    void expect_ident(std::string_view word, const char *message) {
        const Token &t = next();
        if (t.kind != Token::kIdent || t.text != word) {
            throw ParseError(message, t.line, t.column);
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    bool qreg_seen_ = false;
    std::string qreg_;
    std::size_t qreg_size_ = 0;
    std::vector<std::string> cregs_;
};

inline std::string format_angle(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Parses the supported OpenQASM 2.0 subset. Throws ParseError (with line and
/// column) or UnsupportedFeatureError.
inline Circuit parse_qasm(std::string_view text, std::string name = "circuit") {
    return detail::QasmParser(text).parse(std::move(name));
}

/// Serializes a circuit in the same subset; parse_qasm(to_qasm(c)) reproduces c.ops.
inline std::string to_qasm(const Circuit &circuit) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    out << "qreg q[" << circuit.num_qubits << "];\n";
    out << "creg c[" << circuit.num_qubits << "];\n";
    for (const GateOp &op : circuit.ops) {
        std::string name;
        std::size_t nc = op.controls.size();
        if (nc == 0) {
            name = op.name == "i" ? "id" : op.name;
        } else if (nc == 1 && op.name == "x") {
            name = "cx";
        } else if (nc == 1 && op.name == "z") {
            name = "cz";
        } else if (nc == 1 && op.name == "p") {
            name = "cp";
        } else if (nc == 2 && op.name == "x") {
            name = "ccx";
        } else {
            throw ConfigError("gate '" + op.name + "' with " + std::to_string(nc) +
                              " control(s) has no OpenQASM subset spelling");
        }
        out << name;
        if (!op.params.empty()) {
            out << '(';
            for (std::size_t i = 0; i < op.params.size(); ++i) {
                out << (i ? "," : "") << detail::format_angle(op.params[i]);
            }
            out << ')';
        }
        out << ' ';
        for (int c : op.controls) {
            out << "q[" << c << "],";
        }
        out << "q[" << op.target << "];\n";
    }
    for (int q : circuit.measured) {
        out << "measure q[" << q << "] -> c[" << q << "];\n";
    }
    return out.str();
}

}  // namespace qweak
