#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/fiber_map.hpp"
#include "skewlab/skew.hpp"

namespace skewlab {

enum class Stability { attracting, repelling, indifferent };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::attracting: return "attracting";
        case Stability::repelling: return "repelling";
        default: return "indifferent";
    }
}

struct FixedPointRecord {
    std::vector<int> word;
    double x = 0.0;
    double deriv = 0.0;
    Stability stability = Stability::indifferent;
};

inline std::string word_str(const std::vector<int>& w) {
    std::string s;
    for (int v : w) s += std::to_string(v);
    return s;
}

namespace detail {

inline double word_eval(const std::vector<FiberMap>& maps, const std::vector<int>& word, double x) {
    for (int s : word) x = maps[static_cast<std::size_t>(s - 1)].eval(x);
    return x;
}

inline double word_deriv(const std::vector<FiberMap>& maps, const std::vector<int>& word, double x) {
    double d = 1.0;
    for (int s : word) {
        d *= maps[static_cast<std::size_t>(s - 1)].deriv(x);
        x = maps[static_cast<std::size_t>(s - 1)].eval(x);
    }
    return d;
}

inline bool word_preserving(const std::vector<FiberMap>& maps, const std::vector<int>& word) {
    int reversing = 0;
    for (int s : word)
        if (!maps[static_cast<std::size_t>(s - 1)].preserves_orientation()) ++reversing;
    return reversing % 2 == 0;
}

inline double bisect_root(const std::vector<FiberMap>& maps, const std::vector<int>& word,
                          double lo, double hi) {
    // h(x) = f_w(x) - x with a sign change on [lo, hi]
    double flo = word_eval(maps, word, lo) - lo;
    if (flo == 0.0) return lo;
    const bool lo_neg = flo < 0.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = word_eval(maps, word, mid) - mid;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == lo_neg) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Fixed points of the composition f_{w_1...w_n} (leftmost applied first).
/// Orientation-preserving compositions are scanned for sign changes of
/// f_w(x) - x on a 4096-point grid and refined by bisection to 1e-12; grid
/// points with |f_w(x) - x| < 1e-9 are probed as tangency candidates.
/// Orientation-reversing compositions have exactly one fixed point, found by
/// bisection on [0,1]. Derivatives come from the chain rule along the orbit.
inline std::vector<FixedPointRecord> fixed_points(const std::vector<FiberMap>& maps,
                                                  const std::vector<int>& word,
                                                  double tau = 1e-6) {
    if (word.empty()) throw std::invalid_argument("fixed_points: empty word");
    for (int s : word)
        if (s < 1 || s > static_cast<int>(maps.size()))
            throw std::invalid_argument("fixed_points: symbol outside alphabet");

    std::vector<double> roots;
    if (detail::word_preserving(maps, word)) {
        constexpr int grid = 4096;
        double px = 0.0;
        double ph = detail::word_eval(maps, word, px) - px;
        if (ph == 0.0) roots.push_back(px);
        for (int k = 1; k <= grid; ++k) {
            const double x = static_cast<double>(k) / grid;
            const double h = detail::word_eval(maps, word, x) - x;
            if (h == 0.0) {
                roots.push_back(x);
            } else if ((h < 0.0) != (ph < 0.0) && ph != 0.0) {
                roots.push_back(detail::bisect_root(maps, word, px, x));
            } else if (std::abs(h) < 1e-9) {
                // tangency probe: secant polish from the grid node
                double a = x, fa = h;
                for (int it = 0; it < 60 && std::abs(fa) > 1e-13; ++it) {
                    const double d = detail::word_deriv(maps, word, a) - 1.0;
                    if (d == 0.0) break;
                    a = std::min(1.0, std::max(0.0, a - fa / d));
                    fa = detail::word_eval(maps, word, a) - a;
                }
                if (std::abs(fa) <= 1e-11) roots.push_back(a);
            }
            px = x;
            ph = h;
        }
    } else {
        roots.push_back(detail::bisect_root(maps, word, 0.0, 1.0));
    }

    std::sort(roots.begin(), roots.end());
    std::vector<FixedPointRecord> out;
    for (double r : roots) {
        if (!out.empty() && r - out.back().x <= 1e-9) continue; // dedup clustered roots
        if (std::abs(detail::word_eval(maps, word, r) - r) > 1e-11) continue;
        FixedPointRecord rec;
        rec.word = word;
        rec.x = r;
        rec.deriv = detail::word_deriv(maps, word, r);
        const double mag = std::abs(rec.deriv);
        rec.stability = mag < 1.0 - tau   ? Stability::attracting
                        : mag > 1.0 + tau ? Stability::repelling
                                          : Stability::indifferent;
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<FixedPointRecord> fixed_points(const StepSkewSystem& sys,
                                                  const std::vector<int>& word,
                                                  double tau = 1e-6) {
    return fixed_points(sys.maps, word, tau);
}

struct ConditionWitness {
    std::string view;  // "base" or "extended"
    std::string label; // witness description, deterministic
    double value = 0.0;
};

struct ConditionReport {
    bool pass = true;
    bool vacuous = false;
    std::vector<ConditionWitness> witnesses;
    double min_gap = std::numeric_limits<double>::infinity(); // condition ii only
};

namespace detail {

inline std::vector<std::vector<int>> all_words(int n_symbols, int max_len) {
    std::vector<std::vector<int>> out;
    for (int len = 1; len <= max_len; ++len) {
        std::vector<int> w(static_cast<std::size_t>(len), 1);
        while (true) {
            out.push_back(w);
            int pos = len - 1;
            while (pos >= 0) {
                if (++w[static_cast<std::size_t>(pos)] <= n_symbols) break;
                w[static_cast<std::size_t>(pos)] = 1;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    return out;
}

} // namespace detail

/// Condition: every fixed point of every short cyclic composition is
/// hyperbolic. Two views are checked: all words over the base alphabet of
/// length at most 2N applied to the f-maps, and all cyclically A-admissible
/// words over the doubled alphabet applied to the g-maps. A system passes
/// only if neither view finds an indifferent fixed point.
inline ConditionReport check_condition_i(const StepSkewSystem& sys, double tau = 1e-6) {
    ConditionReport rep;
    const ExtendedSystem ext = build_extension(sys);

    for (const auto& w : detail::all_words(sys.N, 2 * sys.N)) {
        for (const auto& rec : fixed_points(sys.maps, w, tau))
            if (rec.stability == Stability::indifferent) {
                rep.pass = false;
                std::ostringstream os;
                os << "word " << word_str(w) << " fixed point x=" << rec.x
                   << " deriv=" << rec.deriv;
                rep.witnesses.push_back({"base", os.str(), rec.x});
            }
    }
    for (int len = 1; len <= 2 * sys.N; ++len) {
        for (const auto& w : admissible_words(ext.A, len, /*cyclic=*/true)) {
            for (const auto& rec : fixed_points(ext.gmaps, w, tau))
                if (rec.stability == Stability::indifferent) {
                    rep.pass = false;
                    std::ostringstream os;
                    os << "word " << word_str(w) << " fixed point x=" << rec.x
                       << " deriv=" << rec.deriv;
                    rep.witnesses.push_back({"extended", os.str(), rec.x});
                }
        }
    }
    return rep;
}

/// Condition: no short heteroclinic connection. Attracting fixed points p
/// and repelling fixed points q of compositions of length at most 2N are
/// collected, and every connector word rho of length at most 2N-1 is
/// required to keep |f_rho(p) - q| > tau (and symmetrically q -> p).
inline ConditionReport check_condition_ii(const StepSkewSystem& sys, double tau = 1e-6,
                                          int n_cap = 4) {
    if (sys.N > n_cap)
        throw std::invalid_argument("check_condition_ii: alphabet too large; raise n_cap explicitly");
    ConditionReport rep;

    std::vector<FixedPointRecord> attracting, repelling;
    for (const auto& w : detail::all_words(sys.N, 2 * sys.N))
        for (const auto& rec : fixed_points(sys.maps, w, tau)) {
            if (rec.stability == Stability::attracting) attracting.push_back(rec);
            if (rec.stability == Stability::repelling) repelling.push_back(rec);
        }

    const auto connectors = detail::all_words(sys.N, 2 * sys.N - 1);
    auto scan = [&](const std::vector<FixedPointRecord>& from,
                    const std::vector<FixedPointRecord>& to, const char* dir) {
        for (const auto& src : from)
            for (const auto& rho : connectors) {
                const double img = detail::word_eval(sys.maps, rho, src.x);
                for (const auto& dst : to) {
                    const double gap = std::abs(img - dst.x);
                    rep.min_gap = std::min(rep.min_gap, gap);
                    if (gap <= tau) {
                        rep.pass = false;
                        std::ostringstream os;
                        os << dir << " " << word_str(src.word) << " x=" << src.x << " --"
                           << word_str(rho) << "--> " << word_str(dst.word) << " x=" << dst.x
                           << " gap=" << gap;
                        rep.witnesses.push_back({"base", os.str(), gap});
                    }
                }
            }
    };
    scan(attracting, repelling, "attr->rep");
    scan(repelling, attracting, "rep->attr");
    return rep;
}

struct CycleWitness {
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0;
};

struct CycleReport {
    bool pass = true; // pass = no cycle exists
    bool vacuous = false;
    std::optional<CycleWitness> witness;
};

/// Condition: nonexistence of the two-point reflection cycle
///   f_i(a) = a, R(f_i(R(b))) = b  for preserving i,
///   R(f_i(a)) = b, f_i(R(b)) = a  for reversing i.
/// Candidates a are common fixed points of all preserving maps; b is then
/// determined through any reversing map and all four equation families are
/// checked at tolerance tau. When no map preserves orientation the cycle
/// equations force f_i(f_i(a)) = a, so candidates fall back to fixed points
/// of the squared reversing maps.
inline CycleReport check_condition_iii(const StepSkewSystem& sys, double tau = 1e-9) {
    CycleReport rep;
    const auto pres = sys.preserving_symbols();
    const auto rev = sys.reversing_symbols();
    if (rev.empty()) {
        rep.vacuous = true;
        return rep;
    }

    std::vector<double> candidates;
    if (!pres.empty()) {
        // intersection of the preserving maps' fixed-point sets at resolution tau
        auto recs = fixed_points(sys.maps, {pres.front()}, 1e-6);
        for (const auto& r : recs) {
            bool common = true;
            for (std::size_t k = 1; k < pres.size() && common; ++k)
                common = std::abs(sys.map(pres[k]).eval(r.x) - r.x) <= tau;
            if (common) candidates.push_back(r.x);
        }
    } else {
        for (int i : rev)
            for (const auto& r : fixed_points(sys.maps, {i, i}, 1e-6))
                candidates.push_back(r.x);
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                     [](double u, double v) { return std::abs(u - v) <= 1e-9; }),
                         candidates.end());
    }

    for (double a : candidates) {
        const double b = 1.0 - sys.map(rev.front()).eval(a);
        double residual = 0.0;
        for (int i : pres) {
            residual = std::max(residual, std::abs(sys.map(i).eval(a) - a));
            residual = std::max(residual, std::abs(1.0 - sys.map(i).eval(1.0 - b) - b));
        }
        for (int i : rev) {
            residual = std::max(residual, std::abs(1.0 - sys.map(i).eval(a) - b));
            residual = std::max(residual, std::abs(sys.map(i).eval(1.0 - b) - a));
        }
        if (residual <= tau) {
            rep.pass = false;
            rep.witness = CycleWitness{a, b, residual};
            return rep;
        }
    }
    return rep;
}

enum class GenericityVerdict { generic_candidate, fails, vacuous_iii };

struct GenericityReport {
    ConditionReport cond_i;
    ConditionReport cond_ii;
    CycleReport cond_iii;
    GenericityVerdict verdict = GenericityVerdict::generic_candidate;
};

inline GenericityReport genericity_report(const StepSkewSystem& sys, double tau_stability = 1e-6,
                                          double tau_cycle = 1e-9) {
    GenericityReport rep;
    rep.cond_i = check_condition_i(sys, tau_stability);
    rep.cond_ii = check_condition_ii(sys, tau_stability);
    rep.cond_iii = check_condition_iii(sys, tau_cycle);
    if (!rep.cond_i.pass || !rep.cond_ii.pass || !rep.cond_iii.pass)
        rep.verdict = GenericityVerdict::fails;
    else if (rep.cond_iii.vacuous)
        rep.verdict = GenericityVerdict::vacuous_iii;
    return rep;
}

} // namespace skewlab
