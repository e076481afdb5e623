#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/rng.hpp"
#include "skewlab/transition.hpp"
#include "skewlab/word.hpp"

namespace skewlab {

/// Probability vector + row-stochastic matrix defining a Markov measure on a
/// shift space, optionally constrained to the support of a 0/1 matrix.
struct MarkovChainSpec {
    std::vector<double> p;              // stationary probability vector
    std::vector<std::vector<double>> P; // row-stochastic transition matrix
    std::optional<TransitionMatrix> support;

    int size() const { return static_cast<int>(p.size()); }

    static MarkovChainSpec bernoulli(std::vector<double> weights) {
        MarkovChainSpec s;
        s.p = weights;
        s.P.assign(weights.size(), weights);
        return s;
    }
};

inline double stationarity_residual(const MarkovChainSpec& spec) {
    const int n = spec.size();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += spec.p[static_cast<std::size_t>(j)] * spec.P[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        worst = std::max(worst, std::abs(acc - spec.p[static_cast<std::size_t>(i)]));
    }
    return worst;
}

/// Checks all chain invariants and returns the spec unchanged. Throws
/// std::invalid_argument naming the first violated invariant. Probability
/// comparisons use absolute tolerance 1e-12.
inline MarkovChainSpec validate_markov(const MarkovChainSpec& spec) {
    constexpr double tol = 1e-12;
    const int n = spec.size();
    if (n < 1) throw std::invalid_argument("markov: empty probability vector");
    if (static_cast<int>(spec.P.size()) != n)
        throw std::invalid_argument("markov: P row count does not match p");

    double psum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double pi = spec.p[static_cast<std::size_t>(i)];
        if (pi < 0.0)
            throw std::invalid_argument("markov: negative entry p[" + std::to_string(i + 1) + "]");
        psum += pi;
    }
    if (std::abs(psum - 1.0) > tol)
        throw std::invalid_argument("markov: p does not sum to 1 (sum = " + std::to_string(psum) + ")");

    for (int i = 0; i < n; ++i) {
        const auto& row = spec.P[static_cast<std::size_t>(i)];
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("markov: P row " + std::to_string(i + 1) + " has wrong length");
        double rsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (row[static_cast<std::size_t>(j)] < 0.0)
                throw std::invalid_argument("markov: negative entry P[" + std::to_string(i + 1) + "][" +
                                            std::to_string(j + 1) + "]");
            rsum += row[static_cast<std::size_t>(j)];
        }
        if (std::abs(rsum - 1.0) > tol)
            throw std::invalid_argument("markov: non-stochastic row " + std::to_string(i + 1) +
                                        " (sum = " + std::to_string(rsum) + ")");
    }

    if (spec.support) {
        if (spec.support->size != n)
            throw std::invalid_argument("markov: support matrix size mismatch");
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                if (spec.P[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] > 0.0 &&
                    !spec.support->at(i, j))
                    throw std::invalid_argument("markov: support violation at P[" + std::to_string(i) +
                                                "][" + std::to_string(j) + "]");
    }

    const double res = stationarity_residual(spec);
    if (res > tol)
        throw std::invalid_argument("markov: p not stationary for P (residual = " +
                                    std::to_string(res) + ")");
    return spec;
}

/// Mass of the cylinder [m; w_m..w_n]: p_{w_m} * prod P_{w_k w_{k+1}}.
inline double cylinder_mass(const MarkovChainSpec& spec, const CylinderSpec& cyl) {
    const int n = spec.size();
    for (int s : cyl.symbols)
        if (s < 1 || s > n)
            throw std::out_of_range("cylinder_mass: symbol " + std::to_string(s) + " out of range");
    double mass = spec.p[static_cast<std::size_t>(cyl.symbols.front() - 1)];
    for (std::size_t k = 0; k + 1 < cyl.symbols.size(); ++k) {
        if (mass == 0.0) return 0.0;
        mass *= spec.P[static_cast<std::size_t>(cyl.symbols[k] - 1)][static_cast<std::size_t>(cyl.symbols[k + 1] - 1)];
    }
    return mass;
}

/// Two-sided stationary sample: origin symbol from p, future by P, past by
/// the time-reversed chain Q_{ij} = p_j P_{ji} / p_i. Draw order is fixed
/// (origin, future left to right, past outward) so equal seeds give
/// bit-identical words.
inline Word sample_word(const MarkovChainSpec& spec, int past_len, int future_len, Rng& rng) {
    if (past_len < 0 || future_len < 0)
        throw std::invalid_argument("sample_word: negative window length");
    const int n = spec.size();
    std::vector<int> syms(static_cast<std::size_t>(past_len + future_len + 1));
    const int origin = past_len;

    syms[static_cast<std::size_t>(origin)] = static_cast<int>(rng.discrete(spec.p)) + 1;

    for (int t = 1; t <= future_len; ++t) {
        const int prev = syms[static_cast<std::size_t>(origin + t - 1)];
        syms[static_cast<std::size_t>(origin + t)] =
            static_cast<int>(rng.discrete(spec.P[static_cast<std::size_t>(prev - 1)])) + 1;
    }

    std::vector<double> q(static_cast<std::size_t>(n));
    for (int t = 1; t <= past_len; ++t) {
        const int cur = syms[static_cast<std::size_t>(origin - t + 1)];
        const double pi = spec.p[static_cast<std::size_t>(cur - 1)];
        if (pi <= 0.0)
            throw std::runtime_error("sample_word: reached a symbol of zero stationary mass");
        for (int j = 0; j < n; ++j)
            q[static_cast<std::size_t>(j)] =
                spec.p[static_cast<std::size_t>(j)] * spec.P[static_cast<std::size_t>(j)][static_cast<std::size_t>(cur - 1)] / pi;
        syms[static_cast<std::size_t>(origin - t)] = static_cast<int>(rng.discrete(q)) + 1;
    }

    return Word{std::move(syms), origin};
}

inline Word sample_word(const MarkovChainSpec& spec, int past_len, int future_len,
                        std::uint64_t seed) {
    Rng rng(seed);
    return sample_word(spec, past_len, future_len, rng);
}

} // namespace skewlab
