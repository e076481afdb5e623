#pragma once

// Example systems used across the test suite.
//
//   affine_preserving: f1 = 0.5x + 0.1, f2 = 0.5x + 0.4 (both preserving;
//     fiber fixed points 0.2 and 0.8, attractor hull [0.2, 0.8]).
//   affine_mixed: f1 = 0.5x + 0.1 (preserving), f2 = 0.9 - 0.5x (reversing).
//   bigraph: f1 anchored with attracting fixed points 0.25 and 0.75 (slope
//     0.5 there) and a repelling one at 0.5; f2 reversing with
//     f2(0.25) = 0.75, f2(0.75) = 0.25. The (1212)-periodic orbit through
//     0.25 visits two points per base fiber.
//   bigraph_shifted: bigraph with f2's anchor values shifted by +0.01,
//     breaking the reflection cycle.

#include "skewlab/skewlab.hpp"

namespace fixtures {

inline skewlab::StepSkewSystem affine_preserving() {
    return skewlab::StepSkewSystem(
        {skewlab::FiberMap::affine(0.5, 0.1), skewlab::FiberMap::affine(0.5, 0.4)}, true);
}

inline skewlab::StepSkewSystem affine_mixed() {
    return skewlab::StepSkewSystem(
        {skewlab::FiberMap::affine(0.5, 0.1), skewlab::FiberMap::affine(-0.5, 0.9)}, true);
}

inline skewlab::FiberMap bigraph_f1() {
    // outer segments are exactly affine with slope 0.5; the repeller at 0.5
    // has derivative 1.8, reached gently enough to keep D(1e-3) small
    return skewlab::FiberMap::anchored({0.0, 0.25, 0.5, 0.75, 1.0},
                                       {0.125, 0.25, 0.5, 0.75, 0.875},
                                       {0.5, 0.5, 1.8, 0.5, 0.5});
}

inline skewlab::FiberMap bigraph_f2() { return skewlab::FiberMap::reflected(bigraph_f1()); }

inline skewlab::StepSkewSystem bigraph() {
    return skewlab::StepSkewSystem({bigraph_f1(), bigraph_f2()}, true);
}

inline skewlab::StepSkewSystem bigraph_shifted() {
    return skewlab::StepSkewSystem(
        {bigraph_f1(), skewlab::FiberMap::anchored({0.0, 0.25, 0.5, 0.75, 1.0},
                                                   {0.885, 0.76, 0.51, 0.26, 0.135},
                                                   {0.5, 0.5, 1.8, 0.5, 0.5})},
        true);
}

inline skewlab::MarkovChainSpec bernoulli_half() {
    return skewlab::MarkovChainSpec::bernoulli({0.5, 0.5});
}

/// Periodic two-sided window: symbol at position t is pattern[t mod len].
inline skewlab::Word periodic_word(const std::vector<int>& pattern, int past_len, int future_len) {
    const int len = static_cast<int>(pattern.size());
    std::vector<int> syms;
    for (int t = -past_len; t <= future_len; ++t)
        syms.push_back(pattern[static_cast<std::size_t>(((t % len) + len) % len)]);
    return skewlab::Word{syms, past_len};
}

} // namespace fixtures
