#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewlab {

/// 0/1 transition matrix of a subshift of finite type. 1-based accessors.
struct TransitionMatrix {
    int size = 0;
    std::vector<std::uint8_t> entries; // row-major, size*size

    TransitionMatrix() = default;
    TransitionMatrix(int n, std::vector<std::uint8_t> e) : size(n), entries(std::move(e)) {
        if (n < 1 || entries.size() != static_cast<std::size_t>(n) * n)
            throw std::invalid_argument("TransitionMatrix: bad shape");
        for (int i = 1; i <= n; ++i) {
            bool any = false;
            for (int j = 1; j <= n; ++j) any = any || at(i, j);
            if (!any)
                throw std::invalid_argument("TransitionMatrix: row " + std::to_string(i) +
                                            " has no admissible successor");
        }
    }

    static TransitionMatrix full(int n) {
        return {n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 1)};
    }

    bool at(int i, int j) const {
        return entries[static_cast<std::size_t>(i - 1) * size + (j - 1)] != 0;
    }

    std::vector<std::vector<int>> rows() const {
        std::vector<std::vector<int>> out(static_cast<std::size_t>(size));
        for (int i = 1; i <= size; ++i)
            for (int j = 1; j <= size; ++j)
                if (at(i, j)) out[static_cast<std::size_t>(i - 1)].push_back(j);
        return out;
    }
};

inline bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
    return a.size == b.size && a.entries == b.entries;
}

/// All words w_1..w_n with a_{w_k w_{k+1}} = 1, and a_{w_n w_1} = 1 when
/// cyclic, in lexicographic order.
inline std::vector<std::vector<int>> admissible_words(const TransitionMatrix& a, int n,
                                                      bool cyclic,
                                                      std::size_t guard = 10'000'000) {
    if (n < 1) throw std::invalid_argument("admissible_words: n must be >= 1");
    std::vector<std::vector<int>> out;
    std::vector<int> w(static_cast<std::size_t>(n));

    // Lexicographic DFS over symbol choices.
    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            if (!cyclic || a.at(w.back(), w.front())) {
                out.push_back(w);
                if (out.size() > guard)
                    throw std::length_error("admissible_words: enumeration exceeds guard");
            }
            return;
        }
        for (int s = 1; s <= a.size; ++s) {
            if (depth > 0 && !a.at(w[static_cast<std::size_t>(depth - 1)], s)) continue;
            w[static_cast<std::size_t>(depth)] = s;
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
    return out;
}

} // namespace skewlab
