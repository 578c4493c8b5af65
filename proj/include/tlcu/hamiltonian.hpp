// Copyright 2026 The tlcu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Hamiltonians as positive-weighted sums of Pauli-product unitaries,
 * H = sum_l weight_l * phase_l * P_l, with the plain-text ".ham" reader/writer.
 *
 * A ".ham" file holds one `<real coefficient> <axes>` pair per line. '#'
 * starts a comment; blank lines are ignored; all axes strings share length n.
 */

#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common.hpp"
#include "pauli.hpp"

namespace tlcu {

/// Unit phase of a term, stored as a power of i.
enum class Phase : std::uint8_t { plus_one = 0, plus_i = 1, minus_one = 2, minus_i = 3 };

inline cplx to_complex(Phase p) { return phase_factor(static_cast<unsigned>(p)); }

struct PauliTerm {
    double weight = 1.0;
    Phase phase = Phase::plus_one;
    std::string axes;

    friend bool operator==(const PauliTerm &, const PauliTerm &) = default;
};

inline bool is_pauli_letter(char c) { return c == 'I' || c == 'X' || c == 'Y' || c == 'Z'; }

inline void validate_axes(std::string_view axes) {
    if (axes.empty()) {
        throw ValidationError("empty Pauli axes string");
    }
    if (axes.size() > 63) {
        throw ValidationError("axes string longer than 63 qubits");
    }
    for (char c : axes) {
        if (!is_pauli_letter(c)) {
            throw ValidationError("invalid Pauli letter '" + std::string(1, c) + "' in axes '" +
                                  std::string(axes) + "'");
        }
    }
}

/// Group element phase * (P_1 (x) ... (x) P_n) of a term (weight excluded).
inline PauliWord to_word(Phase phase, std::string_view axes) {
    validate_axes(axes);
    const std::size_t n = axes.size();
    PauliWord w;
    unsigned ys = 0;
    for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (axes[q]) {
        case 'X':
            w.x |= bit;
            break;
        case 'Y':
            w.x |= bit;
            w.z |= bit;
            ++ys;
            break;
        case 'Z':
            w.z |= bit;
            break;
        default:
            break;
        }
    }
    // Y = i X Z
    w.phase = static_cast<std::uint8_t>((static_cast<unsigned>(phase) + ys) & 3U);
    return w;
}

inline PauliWord to_word(const PauliTerm &term) { return to_word(term.phase, term.axes); }

/// Fold the sign of a real coefficient into the term phase.
inline PauliTerm normalize_terms(double raw_coefficient, std::string_view axes) {
    if (!std::isfinite(raw_coefficient)) {
        throw ValidationError("coefficient must be a finite real number");
    }
    if (raw_coefficient == 0.0) {
        throw ValidationError("zero coefficient for axes '" + std::string(axes) + "'");
    }
    validate_axes(axes);
    return {std::abs(raw_coefficient),
            raw_coefficient < 0.0 ? Phase::minus_one : Phase::plus_one, std::string(axes)};
}

/**
 * @brief Validated Hermitian LCU decomposition H = sum_l alpha_l H_l.
 *
 * Immutable after construction. Duplicate axes are kept as distinct terms.
 */
class LcuHamiltonian {
  public:
    explicit LcuHamiltonian(std::vector<PauliTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) {
            throw ValidationError("Hamiltonian has no terms");
        }
        qubits_ = static_cast<int>(terms_.front().axes.size());
        words_.reserve(terms_.size());
        for (const auto &term : terms_) {
            if (static_cast<int>(term.axes.size()) != qubits_) {
                throw ValidationError("inconsistent axes lengths: '" + terms_.front().axes +
                                      "' vs '" + term.axes + "'");
            }
            if (!(term.weight > 0.0) || !std::isfinite(term.weight)) {
                throw ValidationError("term weights must be positive and finite");
            }
            if (term.phase != Phase::plus_one && term.phase != Phase::minus_one) {
                throw ValidationError("imaginary term phase makes H non-Hermitian");
            }
            words_.push_back(to_word(term));
            alpha_sum_ += term.weight;
        }
    }

    [[nodiscard]] int qubits() const { return qubits_; }
    [[nodiscard]] std::size_t dimension() const { return std::size_t{1} << qubits_; }
    [[nodiscard]] std::size_t term_count() const { return terms_.size(); }
    [[nodiscard]] const std::vector<PauliTerm> &terms() const { return terms_; }
    [[nodiscard]] const PauliTerm &term(std::size_t l) const { return terms_.at(l); }
    [[nodiscard]] const PauliWord &word(std::size_t l) const { return words_[l]; }
    [[nodiscard]] double alpha_sum() const { return alpha_sum_; }

  private:
    std::vector<PauliTerm> terms_;
    std::vector<PauliWord> words_;
    int qubits_ = 0;
    double alpha_sum_ = 0.0;
};

namespace detail {

inline std::string_view strip_comment(std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
    }
    return line;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) != 0) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && std::isspace(static_cast<unsigned char>(line[j])) == 0) {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

inline double parse_real(std::string_view token, int line_no) {
    double value = 0.0;
    const char *first = token.data();
    const char *last = token.data() + token.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ValidationError("line " + std::to_string(line_no) + ": malformed coefficient '" +
                              std::string(token) + "'");
    }
    return value;
}

} // namespace detail

inline LcuHamiltonian parse_hamiltonian(std::istream &in) {
    std::vector<PauliTerm> terms;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto tokens = detail::split_ws(detail::strip_comment(raw));
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() != 2) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": expected '<coefficient> <axes>'");
        }
        const double coefficient = detail::parse_real(tokens[0], line_no);
        try {
            terms.push_back(normalize_terms(coefficient, tokens[1]));
        } catch (const ValidationError &e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (terms.empty()) {
        throw ValidationError("empty Hamiltonian: no term lines");
    }
    return LcuHamiltonian(std::move(terms));
}

inline LcuHamiltonian parse_hamiltonian(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_hamiltonian(in);
}

/// Serialize in ".ham" format; coefficients are written with round-trip precision.
inline std::string to_text(const LcuHamiltonian &h) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto &term : h.terms()) {
        const double sign = term.phase == Phase::minus_one ? -1.0 : 1.0;
        out << sign * term.weight << ' ' << term.axes << '\n';
    }
    return out.str();
}

/// phase * (P_1 (x) ... (x) P_n) * state; the weight is not applied.
inline StateVector apply_pauli_term(const PauliTerm &term, const StateVector &state) {
    const std::size_t dim = std::size_t{1} << term.axes.size();
    if (static_cast<std::size_t>(state.size()) != dim) {
        throw ValidationError("state dimension " + std::to_string(state.size()) +
                              " does not match 2^" + std::to_string(term.axes.size()));
    }
    StateVector out = state;
    apply_word(to_word(term), out);
    return out;
}

/// Dense Hermitian matrix sum_l weight_l * phase_l * P_l.
inline DenseMatrix build_dense(const LcuHamiltonian &h, const Limits &limits = default_limits()) {
    require_dense_cap(h.qubits(), limits);
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    DenseMatrix out = DenseMatrix::Zero(dim, dim);
    for (std::size_t l = 0; l < h.term_count(); ++l) {
        const PauliWord &w = h.word(l);
        const cplx global = h.term(l).weight * phase_factor(w.phase);
        for (Eigen::Index col = 0; col < dim; ++col) {
            const auto y = static_cast<std::uint64_t>(col);
            const bool odd = (std::popcount(y & w.z) & 1) != 0;
            out(static_cast<Eigen::Index>(y ^ w.x), col) += odd ? -global : global;
        }
    }
    return out;
}

} // namespace tlcu
