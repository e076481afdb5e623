#pragma once

#include <string>
#include <vector>

#include "skewlab/errors.hpp"

namespace skewlab {

/// Two-sided finite window of a symbol sequence. Symbols are 1-based.
///
/// Bilateral sequences are represented as finite windows carrying the index
/// of the coordinate playing the role of position 0. Positions are relative:
/// symbol at position t lives at array index origin_offset + t. Operations
/// that need a deeper window than the one supplied raise window_error rather
/// than wrapping around.
struct Word {
    std::vector<int> symbols;
    int origin_offset = 0;

    Word() = default;
    Word(std::vector<int> syms, int origin) : symbols(std::move(syms)), origin_offset(origin) {
        if (symbols.empty())
            throw std::invalid_argument("Word: empty symbol array");
        if (origin_offset < 0 || origin_offset >= static_cast<int>(symbols.size()))
            throw std::invalid_argument("Word: origin_offset outside array bounds");
        for (int s : symbols)
            if (s < 1) throw std::invalid_argument("Word: symbols are 1-based");
    }

    int size() const { return static_cast<int>(symbols.size()); }
    int min_pos() const { return -origin_offset; }
    int max_pos() const { return size() - 1 - origin_offset; }

    bool has(int pos) const { return pos >= min_pos() && pos <= max_pos(); }

    int at(int pos) const {
        if (!has(pos))
            throw window_error("Word: position " + std::to_string(pos) +
                               " outside window [" + std::to_string(min_pos()) + "," +
                               std::to_string(max_pos()) + "]");
        return symbols[static_cast<std::size_t>(origin_offset + pos)];
    }

    /// Same window with the origin moved by k (the shift map on windows).
    Word shifted(int k) const {
        Word w = *this;
        w.origin_offset += k;
        if (w.origin_offset < 0 || w.origin_offset >= size())
            throw window_error("Word: window exhausted shifting origin by " + std::to_string(k));
        return w;
    }

    std::vector<int> future(int n) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) out.push_back(at(t));
        return out;
    }

    std::string str() const {
        std::string s;
        for (int t = min_pos(); t <= max_pos(); ++t) {
            if (t == 0) s += '|';
            s += std::to_string(at(t));
        }
        return s;
    }
};

inline bool operator==(const Word& a, const Word& b) {
    return a.symbols == b.symbols && a.origin_offset == b.origin_offset;
}

inline void validate_alphabet(const Word& w, int n_symbols) {
    for (int s : w.symbols)
        if (s < 1 || s > n_symbols)
            throw std::invalid_argument("Word: symbol " + std::to_string(s) +
                                        " outside alphabet {1.." + std::to_string(n_symbols) + "}");
}

/// Cylinder [m; w_m ... w_n]: the set of sequences agreeing with the given
/// finite word from position m on.
struct CylinderSpec {
    int start = 0;
    std::vector<int> symbols;

    CylinderSpec(int m, std::vector<int> syms) : start(m), symbols(std::move(syms)) {
        if (symbols.empty())
            throw std::invalid_argument("CylinderSpec: empty cylinder");
    }
};

} // namespace skewlab
