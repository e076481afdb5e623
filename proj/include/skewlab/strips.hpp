#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/csv.hpp"
#include "skewlab/measures.hpp"
#include "skewlab/skew.hpp"

namespace skewlab {

enum class StripKind { unknown, attracting, repelling };

inline const char* to_string(StripKind k) {
    switch (k) {
        case StripKind::attracting: return "attracting";
        case StripKind::repelling: return "repelling";
        default: return "unknown";
    }
}

/// Cylinder-constant strip: one fiber interval per alphabet symbol.
struct Strip {
    std::vector<Interval> fibers; // indexed by symbol - 1
    StripKind kind = StripKind::unknown;

    int n_symbols() const { return static_cast<int>(fibers.size()); }
    const Interval& fiber(int symbol) const { return fibers[static_cast<std::size_t>(symbol - 1)]; }
};

/// Union of two strips over the base alphabet.
struct BiStrip {
    Strip first;
    Strip second;
    StripKind kind = StripKind::unknown;

    bool simple() const { return first.fibers == second.fibers; }
};

/// One pushed fiber: the past window that produced it, the push depth, and
/// the resulting interval. length carries the extended-precision interval
/// length, which stays meaningful long after the double endpoints of fiber
/// have collapsed to neighboring representable values.
struct FiberSample {
    Word past;
    int depth = 0;
    Interval fiber;
    double length = 0.0;
};

struct FiberSampleSet {
    std::vector<FiberSample> samples;
};

/// Strip around the support of a stationary measure: per symbol the support
/// hull inflated by eps and clipped to [0,1]. Throws when a symbol that the
/// chain visits carries no mass; symbols of chain probability zero fall back
/// to the full fiber.
inline Strip strip_from_measure(const FiberMeasureVector& mu, double eps,
                                const std::vector<double>* chain_p = nullptr) {
    if (!(eps > 0.0)) throw std::invalid_argument("strip_from_measure: eps must be positive");
    Strip s;
    s.fibers.reserve(static_cast<std::size_t>(mu.n_symbols()));
    for (int i = 1; i <= mu.n_symbols(); ++i) {
        const auto sup = mu.support(i);
        if (!sup) {
            if (chain_p && (*chain_p)[static_cast<std::size_t>(i - 1)] == 0.0) {
                s.fibers.push_back(Interval::unit());
                continue;
            }
            throw std::invalid_argument("strip_from_measure: symbol " + std::to_string(i) +
                                        " carries no mass");
        }
        s.fibers.push_back(Interval{std::max(0.0, sup->lo - eps), std::min(1.0, sup->hi + eps)});
    }
    return s;
}

struct CertReport {
    bool certified = false;
    double margin = 0.0; // min over transitions of the distance to the target boundary
    int worst_from = 0, worst_to = 0;
    int vacuous = 0; // repelling only: transitions whose fiber misses the map image
};

namespace detail {

inline std::vector<std::pair<int, int>> admissible_transitions(int n,
                                                               const TransitionMatrix* a) {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (!a || a->at(i, j)) out.emplace_back(i, j);
    return out;
}

inline CertReport certify_attracting_impl(const std::vector<FiberMap>& maps,
                                          const TransitionMatrix* a, const Strip& strip,
                                          double margin_floor) {
    const int n = static_cast<int>(maps.size());
    if (strip.n_symbols() != n)
        throw std::invalid_argument("certify_attracting: strip alphabet mismatch");
    CertReport rep;
    rep.margin = std::numeric_limits<double>::infinity();
    for (const auto& [i, j] : admissible_transitions(n, a)) {
        const Interval img = maps[static_cast<std::size_t>(i - 1)].image(strip.fiber(i));
        const double m = strip.fiber(j).interior_margin(img);
        if (m < rep.margin) {
            rep.margin = m;
            rep.worst_from = i;
            rep.worst_to = j;
        }
    }
    rep.certified = rep.margin > margin_floor;
    return rep;
}

inline CertReport certify_repelling_impl(const std::vector<FiberMap>& maps,
                                         const TransitionMatrix* a, const Strip& strip,
                                         double margin_floor) {
    const int n = static_cast<int>(maps.size());
    if (strip.n_symbols() != n)
        throw std::invalid_argument("certify_repelling: strip alphabet mismatch");
    CertReport rep;
    rep.margin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& [i, j] : admissible_transitions(n, a)) {
        const FiberMap& f = maps[static_cast<std::size_t>(i - 1)];
        const Interval img = f.image();
        const auto reachable = strip.fiber(j).intersect(img);
        if (!reachable) {
            ++rep.vacuous;
            continue;
        }
        any = true;
        const double u = *f.inverse(img.clamp(reachable->lo));
        const double v = *f.inverse(img.clamp(reachable->hi));
        const Interval pull{std::min(u, v), std::max(u, v)};
        const double m = strip.fiber(i).interior_margin(pull);
        if (m < rep.margin) {
            rep.margin = m;
            rep.worst_from = i;
            rep.worst_to = j;
        }
    }
    if (!any) {
        rep.margin = 0.0;
        rep.certified = false;
        return rep;
    }
    rep.certified = rep.margin > margin_floor;
    return rep;
}

} // namespace detail

/// Image containment check over every admissible transition: the strip is
/// attracting iff each fiber lands strictly inside the successor fiber with
/// margin above margin_floor.
inline CertReport certify_attracting(const StepSkewSystem& sys, const Strip& strip,
                                     double margin_floor = 1e-9) {
    return detail::certify_attracting_impl(sys.maps, nullptr, strip, margin_floor);
}
inline CertReport certify_attracting(const ExtendedSystem& ext, const Strip& strip,
                                     double margin_floor = 1e-9) {
    return detail::certify_attracting_impl(ext.gmaps, &ext.A, strip, margin_floor);
}

/// Inverse-image containment, guarded by image membership: parts of a fiber
/// outside every map image have no preimage and are counted as vacuous.
inline CertReport certify_repelling(const StepSkewSystem& sys, const Strip& strip,
                                    double margin_floor = 1e-9) {
    return detail::certify_repelling_impl(sys.maps, nullptr, strip, margin_floor);
}
inline CertReport certify_repelling(const ExtendedSystem& ext, const Strip& strip,
                                    double margin_floor = 1e-9) {
    return detail::certify_repelling_impl(ext.gmaps, &ext.A, strip, margin_floor);
}

namespace detail {

inline FiberSampleSet attractor_fibers_impl(const std::vector<FiberMap>& maps, const Strip& strip,
                                            const std::vector<Word>& pasts, int depth) {
    FiberSampleSet out;
    out.samples.reserve(pasts.size());
    for (const Word& w : pasts) {
        if (depth > 0 && (!w.has(-depth) || !w.has(0)))
            throw window_error("maximal_attractor_fibers: window shorter than depth");
        const Interval start = depth > 0 ? strip.fiber(w.at(-depth)) : strip.fiber(w.at(0));
        long double lo = start.lo, hi = start.hi;
        for (int k = depth; k >= 1; --k) {
            const FiberMap& f = maps[static_cast<std::size_t>(w.at(-k) - 1)];
            const long double u = f.eval_ld(lo), v = f.eval_ld(hi);
            lo = std::min(u, v);
            hi = std::max(u, v);
            const Interval cut = strip.fiber(w.at(-k + 1));
            lo = std::max(lo, static_cast<long double>(cut.lo));
            hi = std::min(hi, static_cast<long double>(cut.hi));
            if (lo > hi)
                throw std::runtime_error("maximal_attractor_fibers: strip does not trap the push");
        }
        const double dlo = static_cast<double>(lo);
        const double dhi = std::max(dlo, static_cast<double>(hi));
        out.samples.push_back(
            FiberSample{w, depth, Interval{dlo, dhi}, static_cast<double>(hi - lo)});
    }
    return out;
}

} // namespace detail

/// Pushes the strip fiber of the symbol at position -depth forward along the
/// past word, intersecting with the strip fibers en route. Depth 0 returns
/// the strip fibers themselves.
inline FiberSampleSet maximal_attractor_fibers(const StepSkewSystem& sys, const Strip& strip,
                                               const std::vector<Word>& pasts, int depth) {
    return detail::attractor_fibers_impl(sys.maps, strip, pasts, depth);
}
inline FiberSampleSet maximal_attractor_fibers(const ExtendedSystem& ext, const Strip& strip,
                                               const std::vector<Word>& pasts, int depth) {
    return detail::attractor_fibers_impl(ext.gmaps, strip, pasts, depth);
}

struct StripOrderResult {
    bool comparable = false;
    std::vector<std::size_t> order; // indices into the input, lowest strip first
    std::pair<std::size_t, std::size_t> incomparable_pair{0, 0};
};

/// Strict per-symbol interval order: S < T iff sup J^S_i < inf J^T_i for
/// every symbol i.
inline bool strip_less(const Strip& s, const Strip& t) {
    for (int i = 1; i <= s.n_symbols(); ++i)
        if (!(s.fiber(i).hi < t.fiber(i).lo)) return false;
    return true;
}

inline StripOrderResult order_strips(const std::vector<Strip>& strips) {
    StripOrderResult res;
    const std::size_t k = strips.size();
    res.order.resize(k);
    for (std::size_t i = 0; i < k; ++i) res.order[i] = i;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const Strip& a = strips[res.order[i]];
            const Strip& b = strips[res.order[j]];
            if (strip_less(b, a)) {
                std::swap(res.order[i], res.order[j]);
            } else if (!strip_less(a, b) && !(strips[res.order[i]].fibers == strips[res.order[j]].fibers)) {
                res.incomparable_pair = {res.order[i], res.order[j]};
                return res;
            }
        }
    res.comparable = true;
    return res;
}

/// Projection of a doubled-alphabet strip: component 1 keeps the first-sheet
/// fibers, component 2 reflects the second-sheet fibers.
inline BiStrip project_strip(const ExtendedSystem& ext, const Strip& strip) {
    if (strip.n_symbols() != ext.doubled_n())
        throw std::invalid_argument("project_strip: expected a strip over 2N symbols");
    const int n = ext.base.N;
    BiStrip bs;
    bs.kind = strip.kind;
    bs.first.kind = strip.kind;
    bs.second.kind = strip.kind;
    for (int i = 1; i <= n; ++i) {
        bs.first.fibers.push_back(strip.fiber(i));
        bs.second.fibers.push_back(strip.fiber(i + n).reflected());
    }
    return bs;
}

struct BonyReport {
    double fat_fraction = 0.0;
    std::vector<Word> bones; // sampled pasts whose fiber stayed an interval
};

/// Samples pasts from the chain, pushes the strip to the requested depth and
/// reports the fraction of fibers longer than delta together with the
/// offending pasts.
template <typename System>
inline BonyReport bony_diagnostic(const System& sys, const Strip& strip,
                                  const MarkovChainSpec& chain, int n_pasts, int depth,
                                  double delta, std::uint64_t seed) {
    if (!(delta > 0.0)) throw std::invalid_argument("bony_diagnostic: delta must be positive");
    Rng rng(seed);
    std::vector<Word> pasts;
    pasts.reserve(static_cast<std::size_t>(n_pasts));
    for (int k = 0; k < n_pasts; ++k) pasts.push_back(sample_word(chain, depth, 0, rng));
    const FiberSampleSet set = maximal_attractor_fibers(sys, strip, pasts, depth);
    BonyReport rep;
    int fat = 0;
    for (const auto& s : set.samples) {
        if (s.length > delta) {
            ++fat;
            rep.bones.push_back(s.past);
        }
    }
    rep.fat_fraction = n_pasts > 0 ? static_cast<double>(fat) / n_pasts : 0.0;
    return rep;
}

struct EnvelopeRecord {
    std::string past;
    double phi_minus = 0.0;
    double phi_plus = 0.0;
};

struct EnvelopeReport {
    std::vector<EnvelopeRecord> records;
    bool non_simple = false;
    int excluded_fat = 0;
};

/// Envelope functions phi-/phi+ per sampled past: min and max of the
/// point-like fiber clusters grouped by identical past windows. The verdict
/// is non-simple when the envelope gap exceeds 10*cluster_tol on at least
/// half of the pasts.
inline EnvelopeReport envelope_graphs(const FiberSampleSet& samples, double cluster_tol) {
    if (samples.samples.empty())
        throw std::invalid_argument("envelope_graphs: empty sample set");
    EnvelopeReport rep;
    std::map<std::string, std::pair<double, double>> groups;
    for (const auto& s : samples.samples) {
        if (std::max(s.length, s.fiber.length()) > cluster_tol) {
            ++rep.excluded_fat;
            continue;
        }
        const double x = s.fiber.mid();
        const std::string key = s.past.str();
        auto [it, fresh] = groups.try_emplace(key, std::pair<double, double>{x, x});
        if (!fresh) {
            it->second.first = std::min(it->second.first, x);
            it->second.second = std::max(it->second.second, x);
        }
    }
    if (groups.empty())
        throw std::invalid_argument("envelope_graphs: all samples exceeded cluster_tol");
    int wide = 0;
    for (const auto& [key, mm] : groups) {
        rep.records.push_back(EnvelopeRecord{key, mm.first, mm.second});
        if (mm.second - mm.first > 10.0 * cluster_tol) ++wide;
    }
    rep.non_simple = wide * 2 >= static_cast<int>(groups.size());
    return rep;
}

struct ContinuityModulus {
    int agree_depth = 0;  // pasts compared agree on positions -depth..0
    double max_gap = 0.0; // largest fiber-midpoint distance among them
    int pairs = 0;
};

/// Modulus-of-continuity estimate for a sampled graph: for each requested
/// agreement depth d, the largest distance between fiber midpoints of
/// samples whose pasts agree on their last d+1 symbols. Decaying gaps as d
/// grows are the sampled signature of a continuous graph.
inline std::vector<ContinuityModulus> continuity_modulus(const FiberSampleSet& samples,
                                                         const std::vector<int>& agree_depths) {
    std::vector<ContinuityModulus> out;
    for (int d : agree_depths) {
        ContinuityModulus row;
        row.agree_depth = d;
        std::map<std::string, std::pair<double, double>> hulls; // suffix -> (min, max) midpoint
        for (const auto& s : samples.samples) {
            if (!s.past.has(-d)) continue;
            std::string key;
            for (int t = -d; t <= 0; ++t) {
                key += std::to_string(s.past.at(t));
                key += '.';
            }
            const double x = s.fiber.mid();
            auto [it, fresh] = hulls.try_emplace(key, std::pair<double, double>{x, x});
            if (!fresh) {
                ++row.pairs;
                it->second.first = std::min(it->second.first, x);
                it->second.second = std::max(it->second.second, x);
            }
        }
        for (const auto& [key, mm] : hulls)
            row.max_gap = std::max(row.max_gap, mm.second - mm.first);
        out.push_back(row);
    }
    return out;
}

/// Wire format: one row per pushed fiber, in sample order.
inline std::string fiber_samples_csv(const FiberSampleSet& set) {
    std::string csv = "past,depth,lo,hi\n";
    for (const auto& s : set.samples)
        csv += s.past.str() + ',' + std::to_string(s.depth) + ',' + fmt(s.fiber.lo) + ',' +
               fmt(s.fiber.hi) + '\n';
    return csv;
}

/// Wire format: one row per symbol with the certification verdict attached.
inline std::string strip_certification_csv(const Strip& strip, const CertReport& rep) {
    std::string csv = "symbol,lo,hi,kind,margin\n";
    for (int i = 1; i <= strip.n_symbols(); ++i)
        csv += std::to_string(i) + ',' + fmt(strip.fiber(i).lo) + ',' + fmt(strip.fiber(i).hi) +
               ',' + to_string(strip.kind) + ',' + fmt(rep.margin) + '\n';
    return csv;
}

} // namespace skewlab
