#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/fiber_map.hpp"
#include "skewlab/interval.hpp"
#include "skewlab/markov.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/transition.hpp"
#include "skewlab/word.hpp"

namespace skewlab {

/// Base step skew-product: (xi, p) -> (shift(xi), f_{xi_0}(p)) on N symbols.
struct StepSkewSystem {
    int N = 0;
    std::vector<FiberMap> maps; // indexed by symbol - 1
    bool absorbing = false;

    StepSkewSystem() = default;
    StepSkewSystem(std::vector<FiberMap> fs, bool absorb) : maps(std::move(fs)), absorbing(absorb) {
        N = static_cast<int>(maps.size());
        if (N < 1) throw std::invalid_argument("StepSkewSystem: need at least one fiber map");
        if (absorbing) {
            for (int i = 0; i < N; ++i) {
                const Interval img = maps[static_cast<std::size_t>(i)].image();
                if (!(img.lo > 0.0 && img.hi < 1.0))
                    throw std::invalid_argument("StepSkewSystem: map " + std::to_string(i + 1) +
                                                " is not absorbing (image touches the boundary)");
            }
        }
    }

    const FiberMap& map(int symbol) const {
        if (symbol < 1 || symbol > N)
            throw std::invalid_argument("StepSkewSystem: symbol out of range");
        return maps[static_cast<std::size_t>(symbol - 1)];
    }

    std::vector<int> preserving_symbols() const {
        std::vector<int> out;
        for (int i = 1; i <= N; ++i)
            if (map(i).preserves_orientation()) out.push_back(i);
        return out;
    }
    std::vector<int> reversing_symbols() const {
        std::vector<int> out;
        for (int i = 1; i <= N; ++i)
            if (!map(i).preserves_orientation()) out.push_back(i);
        return out;
    }
};

/// A point (word window, fiber coordinate).
struct PointState {
    Word word;
    double fiber = 0.0;

    PointState(Word w, double x) : word(std::move(w)), fiber(x) {
        if (x < 0.0 || x > 1.0)
            throw std::invalid_argument("PointState: fiber coordinate outside [0,1]");
    }
};

inline PointState step_forward(const StepSkewSystem& sys, const PointState& s) {
    const int sym = s.word.at(0);
    if (sym > sys.N) throw std::invalid_argument("step_forward: symbol outside alphabet");
    if (!s.word.has(1))
        throw window_error("step_forward: window exhausted (no future symbol after shift)");
    return PointState{s.word.shifted(1), sys.map(sym).eval(s.fiber)};
}

/// Inverse step where defined: retreats the origin and pulls the fiber back
/// through the incoming map. nullopt signals that the fiber point lies
/// outside the image of f_{xi_{-1}}, i.e. the point is not in the maximal
/// invariant set over this past.
inline std::optional<PointState> step_backward(const StepSkewSystem& sys, const PointState& s) {
    const int sym = s.word.at(-1);
    if (sym > sys.N) throw std::invalid_argument("step_backward: symbol outside alphabet");
    const auto x = sys.map(sym).inverse(s.fiber);
    if (!x) return std::nullopt;
    return PointState{s.word.shifted(-1), *x};
}

/// Depth-n fiber interval I_xi = f_{xi_{-n}} o ... o f_{xi_{-1}} (I),
/// computed by n interval pushes. Depth 0 gives [0,1].
inline Interval fiber_interval(const StepSkewSystem& sys, const Word& past, int depth) {
    if (depth < 0) throw std::invalid_argument("fiber_interval: negative depth");
    if (depth > 0 && !past.has(-depth))
        throw window_error("fiber_interval: window shallower than requested depth");
    Interval j = Interval::unit();
    for (int k = depth; k >= 1; --k) j = sys.map(past.at(-k)).image(j);
    return j;
}

/// Orientation-doubled system on 2N symbols: transition matrix A built from
/// the orientation partition, and fiber maps
///   g_i = f_i,        g_{i+N} = R o f_i o R   for preserving f_i,
///   g_i = R o f_i,    g_{i+N} = f_i o R       for reversing f_i,
/// all of which preserve orientation.
struct ExtendedSystem {
    StepSkewSystem base;
    TransitionMatrix A;          // 2N x 2N
    std::vector<FiberMap> gmaps; // indexed by symbol - 1, size 2N

    int doubled_n() const { return 2 * base.N; }

    const FiberMap& gmap(int symbol) const {
        if (symbol < 1 || symbol > doubled_n())
            throw std::invalid_argument("ExtendedSystem: symbol out of range");
        return gmaps[static_cast<std::size_t>(symbol - 1)];
    }

    /// Representative of i mod N in {1..N}.
    int base_symbol(int symbol) const {
        const int r = symbol > base.N ? symbol - base.N : symbol;
        return r;
    }

    bool first_sheet(int symbol) const { return symbol <= base.N; }
};

inline ExtendedSystem build_extension(const StepSkewSystem& sys) {
    const int n = sys.N;
    std::vector<std::uint8_t> a(static_cast<std::size_t>(2 * n) * (2 * n), 0);
    auto set = [&](int i, int j) { a[static_cast<std::size_t>(i - 1) * (2 * n) + (j - 1)] = 1; };
    for (int i = 1; i <= 2 * n; ++i) {
        const int rep = i > n ? i - n : i;
        const bool pres = sys.map(rep).preserves_orientation();
        const bool first = i <= n;
        // Successors stay on the first sheet iff sheet parity matches the
        // orientation of the acting map.
        const bool to_first = first == pres;
        for (int j = 1; j <= n; ++j) set(i, to_first ? j : j + n);
    }

    std::vector<FiberMap> g;
    g.reserve(static_cast<std::size_t>(2 * n));
    for (int i = 1; i <= n; ++i) {
        const FiberMap& f = sys.map(i);
        if (f.preserves_orientation())
            g.push_back(f);
        else
            g.push_back(FiberMap::reflected(f));
    }
    for (int i = 1; i <= n; ++i) {
        const FiberMap& f = sys.map(i);
        if (f.preserves_orientation())
            g.push_back(FiberMap::reflected(FiberMap::pre_reflected(f)));
        else
            g.push_back(FiberMap::pre_reflected(f));
    }
    for (const auto& gi : g)
        if (!gi.preserves_orientation())
            throw std::logic_error("build_extension: produced an orientation-reversing map");

    ExtendedSystem ext;
    ext.base = sys;
    ext.A = TransitionMatrix(2 * n, std::move(a));
    ext.gmaps = std::move(g);
    return ext;
}

enum class LiftClass { first, second };

/// The unique A-admissible lift of a base window with omega_0 = xi_0 (class
/// first) or xi_0 + N (class second). The forward recursion picks the sheet
/// allowed by A from the previous lifted symbol; the backward recursion picks
/// the sheet that is allowed to precede the next lifted symbol.
inline Word lift_sequence(const ExtendedSystem& ext, const Word& xi, LiftClass cls) {
    const int n = ext.base.N;
    validate_alphabet(xi, n);
    std::vector<int> out(static_cast<std::size_t>(xi.size()));
    const int org = xi.origin_offset;

    out[static_cast<std::size_t>(org)] = cls == LiftClass::first ? xi.at(0) : xi.at(0) + n;
    for (int t = 1; t <= xi.max_pos(); ++t) {
        const int prev = out[static_cast<std::size_t>(org + t - 1)];
        const int s = xi.at(t);
        out[static_cast<std::size_t>(org + t)] = ext.A.at(prev, s) ? s : s + n;
    }
    for (int t = -1; t >= xi.min_pos(); --t) {
        const int next = out[static_cast<std::size_t>(org + t + 1)];
        const int s = xi.at(t);
        out[static_cast<std::size_t>(org + t)] = ext.A.at(s, next) ? s : s + n;
    }
    return Word{std::move(out), org};
}

/// Word over {1..2N} projected symbolwise to {1..N}.
inline Word project_word(const ExtendedSystem& ext, const Word& omega) {
    std::vector<int> syms(omega.symbols.size());
    for (std::size_t k = 0; k < syms.size(); ++k)
        syms[k] = ext.base_symbol(omega.symbols[k]);
    return Word{std::move(syms), omega.origin_offset};
}

/// Projection Pi: identity on the fiber over the first sheet, reflection
/// over the second.
inline PointState project_point(const ExtendedSystem& ext, const PointState& s) {
    const int w0 = s.word.at(0);
    const double x = ext.first_sheet(w0) ? s.fiber : 1.0 - s.fiber;
    return PointState{project_word(ext, s.word), x};
}

inline PointState extended_step_forward(const ExtendedSystem& ext, const PointState& s) {
    const int sym = s.word.at(0);
    if (sym > ext.doubled_n())
        throw std::invalid_argument("extended_step_forward: symbol outside doubled alphabet");
    if (!s.word.has(1))
        throw window_error("extended_step_forward: window exhausted");
    return PointState{s.word.shifted(1), ext.gmap(sym).eval(s.fiber)};
}

inline Interval extended_fiber_interval(const ExtendedSystem& ext, const Word& past, int depth) {
    if (depth < 0) throw std::invalid_argument("fiber_interval: negative depth");
    if (depth > 0 && !past.has(-depth))
        throw window_error("fiber_interval: window shallower than requested depth");
    Interval j = Interval::unit();
    for (int k = depth; k >= 1; --k) j = ext.gmap(past.at(-k)).image(j);
    return j;
}

struct SemiconjugacyReport {
    double max_fiber_discrepancy = 0.0;
    int samples = 0;
};

/// Samples A-admissible states (omega, x) by lifting Bernoulli base words
/// with a fair coin for the sheet, and compares Pi(G(omega,x)) against
/// F(Pi(omega,x)). Base words must agree exactly; the max fiber distance is
/// returned.
inline SemiconjugacyReport verify_semiconjugacy(const StepSkewSystem& sys,
                                                const ExtendedSystem& ext, int n_samples,
                                                std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("verify_semiconjugacy: need n_samples >= 1");
    Rng rng(seed);
    const auto chain = MarkovChainSpec::bernoulli(
        std::vector<double>(static_cast<std::size_t>(sys.N), 1.0 / sys.N));
    SemiconjugacyReport rep;
    rep.samples = n_samples;
    for (int k = 0; k < n_samples; ++k) {
        const Word xi = sample_word(chain, 1, 2, rng);
        const Word omega = lift_sequence(ext, xi, rng.coin() ? LiftClass::first : LiftClass::second);
        const double x = rng.uniform();
        const PointState up{omega, x};

        const PointState lhs = project_point(ext, extended_step_forward(ext, up));
        const PointState rhs = step_forward(sys, project_point(ext, up));
        if (!(lhs.word == rhs.word))
            throw std::logic_error("verify_semiconjugacy: base words disagree");
        rep.max_fiber_discrepancy =
            std::max(rep.max_fiber_discrepancy, std::abs(lhs.fiber - rhs.fiber));
    }
    return rep;
}

struct CensusReport {
    long long windows = 0;
    bool all_two = true;
    long long worst_count = 2;
    std::vector<int> worst_window; // first window with lift count != 2, if any
};

/// Enumerates every base window of radius k and counts its A-admissible
/// lifts by exhaustive search over sheet choices.
inline CensusReport two_to_one_census(const ExtendedSystem& ext, int k,
                                      long long guard = 10'000'000) {
    if (k < 1) throw std::invalid_argument("two_to_one_census: radius must be >= 1");
    const int n = ext.base.N;
    const int len = 2 * k + 1;
    double total = std::pow(static_cast<double>(n), len);
    if (total > static_cast<double>(guard))
        throw std::length_error("two_to_one_census: enumeration exceeds guard");

    CensusReport rep;
    std::vector<int> w(static_cast<std::size_t>(len), 1);
    auto count_lifts = [&](const std::vector<int>& base) -> long long {
        // DFS over per-position sheet choices subject to A-admissibility.
        long long cnt = 0;
        std::vector<int> lift(base.size());
        auto rec = [&](auto&& self, std::size_t pos) -> void {
            if (pos == base.size()) {
                ++cnt;
                return;
            }
            for (int add : {0, n}) {
                const int s = base[pos] + add;
                if (pos > 0 && !ext.A.at(lift[pos - 1], s)) continue;
                lift[pos] = s;
                self(self, pos + 1);
            }
        };
        rec(rec, 0);
        return cnt;
    };

    bool done = false;
    while (!done) {
        ++rep.windows;
        const long long c = count_lifts(w);
        if (c != 2 && rep.all_two) {
            rep.all_two = false;
            rep.worst_count = c;
            rep.worst_window = w;
        }
        // odometer increment
        int pos = len - 1;
        while (pos >= 0) {
            if (++w[static_cast<std::size_t>(pos)] <= n) break;
            w[static_cast<std::size_t>(pos)] = 1;
            --pos;
        }
        done = pos < 0;
    }
    return rep;
}

/// D(theta): max over window centers, fiber maps and their inverses of the
/// grid distortion on [x - theta/2, x + theta/2] intersected with I (and
/// with the map image, for inverses). The grid estimate is multiplied by a
/// small safety factor so certifications D(theta) < e^eps stay conservative.
inline double distortion_global(const StepSkewSystem& sys, double theta, int grid_n = 4097) {
    if (!(theta > 0.0)) throw std::invalid_argument("distortion_global: theta must be positive");
    const int centers = 257;
    double worst = 1.0;
    for (int c = 0; c < centers; ++c) {
        const double x = static_cast<double>(c) / (centers - 1);
        const Interval win{std::max(0.0, x - theta / 2.0), std::min(1.0, x + theta / 2.0)};
        if (win.degenerate()) continue;
        for (int i = 1; i <= sys.N; ++i) {
            const FiberMap& f = sys.map(i);
            worst = std::max(worst, distortion(f, win, grid_n));
            // |(f^{-1})'| = 1/|f'(f^{-1}(y))|, so the inverse distortion over
            // a window of y-values is the forward ratio over its preimage.
            const Interval img = f.image();
            if (const auto wimg = win.intersect(img); wimg && !wimg->degenerate()) {
                const double u = *f.inverse(img.clamp(wimg->lo));
                const double v = *f.inverse(img.clamp(wimg->hi));
                worst = std::max(worst, distortion(f, {std::min(u, v), std::max(u, v)}, grid_n));
            }
        }
    }
    return worst * (1.0 + 1e-6);
}

} // namespace skewlab
