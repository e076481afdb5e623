#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlab/csv.hpp"
#include "skewlab/skew.hpp"
#include "skewlab/strips.hpp"

namespace skewlab {

/// log |f'_{xi_k}(p_k)| along an orbit, with the exponent parameter the
/// analysis was run at.
struct LogDerivSequence {
    std::vector<double> values;
    double rho = 0.0;
};

/// Orbit view: a run of monotone 1-d maps m_k with q_{k+1} = m_k(q_k).
/// Steps flagged inverted apply f^{-1}; that realizes fiber-expansion
/// analysis by running the same machinery on reversed words with inverse
/// maps.
struct OrbitView {
    struct Step {
        const FiberMap* map = nullptr;
        bool inverted = false;
    };
    std::vector<Step> steps;
    std::vector<double> points;     // q_0 .. q_n (one more than steps)
    std::vector<double> log_derivs; // per step, at the point the step acts on
};

inline OrbitView forward_orbit_view(const StepSkewSystem& sys, const PointState& s, int n) {
    if (n > 0 && !s.word.has(n - 1))
        throw window_error("forward_orbit_view: window supports fewer than n steps");
    OrbitView v;
    v.points.push_back(s.fiber);
    double p = s.fiber;
    for (int k = 0; k < n; ++k) {
        const FiberMap& f = sys.map(s.word.at(k));
        v.steps.push_back({&f, false});
        v.log_derivs.push_back(std::log(std::abs(f.deriv(p))));
        p = f.eval(p);
        v.points.push_back(p);
    }
    return v;
}

/// Backward orbit realized as a forward run of inverse maps; requires the
/// fiber point to stay inside the relevant map images (i.e. the state lies
/// over the maximal invariant set to the requested depth).
inline OrbitView backward_orbit_view(const StepSkewSystem& sys, const PointState& s, int n) {
    if (n > 0 && !s.word.has(-n))
        throw window_error("backward_orbit_view: window supports fewer than n backward steps");
    OrbitView v;
    v.points.push_back(s.fiber);
    double q = s.fiber;
    for (int k = 1; k <= n; ++k) {
        const FiberMap& f = sys.map(s.word.at(-k));
        const auto x = f.inverse(q);
        if (!x)
            throw std::domain_error("backward_orbit_view: fiber point left the map image at step " +
                                    std::to_string(k));
        v.steps.push_back({&f, true});
        // (f^{-1})'(q) = 1 / f'(f^{-1}(q))
        v.log_derivs.push_back(-std::log(std::abs(f.deriv(*x))));
        q = *x;
        v.points.push_back(q);
    }
    return v;
}

inline LogDerivSequence orbit_log_derivs(const StepSkewSystem& sys, const PointState& s, int n,
                                         double rho = 0.0) {
    return LogDerivSequence{forward_orbit_view(sys, s, n).log_derivs, rho};
}

inline LogDerivSequence backward_orbit_log_derivs(const StepSkewSystem& sys, const PointState& s,
                                                  int n, double rho = 0.0) {
    return LogDerivSequence{backward_orbit_view(sys, s, n).log_derivs, rho};
}

/// Running Birkhoff averages chi_n = (1/n) sum_{k<n} v_k, kept exact for
/// constant sequences by the incremental-mean update.
inline std::vector<double> lyapunov_orbit(const LogDerivSequence& seq) {
    if (seq.values.empty()) throw std::invalid_argument("lyapunov_orbit: empty sequence");
    std::vector<double> chi(seq.values.size());
    double mean = 0.0;
    for (std::size_t k = 0; k < seq.values.size(); ++k) {
        mean += (seq.values[k] - mean) / static_cast<double>(k + 1);
        chi[k] = mean;
    }
    return chi;
}

/// All 0-based indices n such that every window sum
///   sum_{k=m}^{n} (v_k - rho) >= 0   for all m <= n.
/// Single linear scan: W_n = min over m of that window sum satisfies the
/// Kadane-style recurrence W_n = (v_n - rho) + min(0, W_{n-1}), and the
/// float additions it performs match the left-to-right sums of the direct
/// definition check term for term.
inline std::vector<int> pliss_times(const LogDerivSequence& seq, double rho) {
    std::vector<int> out;
    double worst = 0.0; // min(0, W_{n-1})
    for (std::size_t n = 0; n < seq.values.size(); ++n) {
        const double w = worst + (seq.values[n] - rho);
        if (w >= 0.0) out.push_back(static_cast<int>(n));
        worst = std::min(0.0, w);
    }
    return out;
}

struct PlissDensity {
    double density = 0.0;
    std::optional<double> lower_bound; // (mean - rho) / (max - rho), when applicable
    std::vector<int> times;
};

/// Density of hyperbolic times plus the classical Pliss lower bound,
/// reported when the sequence mean and max both exceed rho.
inline PlissDensity pliss_density(const LogDerivSequence& seq, double rho) {
    if (seq.values.empty()) throw std::invalid_argument("pliss_density: empty sequence");
    PlissDensity d;
    d.times = pliss_times(seq, rho);
    d.density = static_cast<double>(d.times.size()) / static_cast<double>(seq.values.size());
    double mean = 0.0, mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < seq.values.size(); ++k) {
        mean += (seq.values[k] - mean) / static_cast<double>(k + 1);
        mx = std::max(mx, seq.values[k]);
    }
    if (mean > rho && mx > rho) d.lower_bound = (mean - rho) / (mx - rho);
    return d;
}

struct ContractionRow {
    int k = 0;
    double length = 0.0;
    double bound = 0.0;
    bool ok = true;
};

struct ContractionReport {
    std::vector<ContractionRow> rows; // k = 0 .. n+1
    bool violation = false;
    double theta = 0.0, eps = 0.0, chi = 0.0;
    int n = 0;
};

/// Backward-contraction bound at a hyperbolic time n: the window
/// J_{n+1} = [q_{n+1} +- theta/2], clipped into the image of the full
/// composition so every pullback is defined, is pulled back step by step and
/// |J_k| is compared against theta * exp(-(n+1-k)(chi - 2 eps)).
/// Preconditions: n must come from pliss_times at rho = chi - eps and the
/// caller-supplied global distortion must satisfy D(theta) < e^eps.
inline ContractionReport contraction_bound_check(const OrbitView& view, int n, double theta,
                                                 double eps, double chi, double d_theta) {
    if (n < 0 || n >= static_cast<int>(view.steps.size()))
        throw std::invalid_argument("contraction_bound_check: n outside the orbit view");
    if (!(theta > 0.0)) throw std::invalid_argument("contraction_bound_check: theta must be positive");
    if (!(d_theta < std::exp(eps)))
        throw std::invalid_argument("contraction_bound_check: D(theta) >= e^eps; shrink theta");
    {
        LogDerivSequence seq{view.log_derivs, chi - eps};
        const auto times = pliss_times(seq, chi - eps);
        if (std::find(times.begin(), times.end(), n) == times.end())
            throw std::invalid_argument(
                "contraction_bound_check: n is not a hyperbolic time at rho = chi - eps");
    }

    // Image of the full composition: push [0,1] forward, clipping to each
    // step's domain (image of f, for inverted steps).
    Interval reach = Interval::unit();
    for (int k = 0; k <= n; ++k) {
        const auto& st = view.steps[static_cast<std::size_t>(k)];
        if (st.inverted) {
            const auto cut = reach.intersect(st.map->image());
            if (!cut)
                throw std::runtime_error("contraction_bound_check: orbit domain became empty");
            const double u = *st.map->inverse(cut->lo);
            const double v = *st.map->inverse(cut->hi);
            reach = {std::min(u, v), std::max(u, v)};
        } else {
            reach = st.map->image(reach);
        }
    }

    const double qend = view.points[static_cast<std::size_t>(n + 1)];
    Interval j{std::max(0.0, qend - theta / 2.0), std::min(1.0, qend + theta / 2.0)};
    if (const auto cut = j.intersect(reach)) j = *cut;
    else throw std::runtime_error("contraction_bound_check: window misses the composition image");
    // rounding in the endpoint arithmetic must not push |J_{n+1}| above theta
    if (j.length() > theta) j.hi = j.lo + theta;

    ContractionReport rep;
    rep.theta = theta;
    rep.eps = eps;
    rep.chi = chi;
    rep.n = n;
    rep.rows.resize(static_cast<std::size_t>(n + 2));

    auto record = [&](int k, const Interval& jk) {
        ContractionRow row;
        row.k = k;
        row.length = jk.length();
        row.bound = theta * std::exp(-static_cast<double>(n + 1 - k) * (chi - 2.0 * eps));
        // genuine violations are multiplicative (factors of e^{2 eps}); the
        // relative guard only absorbs last-place endpoint rounding
        row.ok = row.length <= row.bound * (1.0 + 1e-12);
        if (!row.ok) rep.violation = true;
        rep.rows[static_cast<std::size_t>(k)] = row;
    };

    record(n + 1, j);
    Interval cur = j;
    for (int k = n; k >= 0; --k) {
        const auto& st = view.steps[static_cast<std::size_t>(k)];
        if (st.inverted) {
            // pullback through f^{-1} is the forward map
            cur = st.map->image(cur);
        } else {
            const Interval img = st.map->image();
            const auto u = st.map->inverse(img.clamp(cur.lo));
            const auto v = st.map->inverse(img.clamp(cur.hi));
            if (!u || !v)
                throw std::runtime_error("contraction_bound_check: pullback left the map image");
            cur = {std::min(*u, *v), std::max(*u, *v)};
        }
        record(k, cur);
    }
    return rep;
}

struct CardinalityRecord {
    std::string past;
    int count = 0;
};

struct CardinalityReport {
    std::vector<CardinalityRecord> per_past;
    int max_count = 0; // the certified sampled bound M
    int rejected_fat = 0;
};

/// Clusters point-like fiber samples per past at resolution cluster_tol and
/// returns the per-past counts and their maximum. Fat fibers are rejected
/// and counted.
inline CardinalityReport fiber_cardinality(const FiberSampleSet& samples, double cluster_tol = 1e-7) {
    CardinalityReport rep;
    std::map<std::string, std::vector<double>> groups;
    for (const auto& s : samples.samples) {
        if (std::max(s.length, s.fiber.length()) > cluster_tol) {
            ++rep.rejected_fat;
            continue;
        }
        groups[s.past.str()].push_back(s.fiber.mid());
    }
    if (groups.empty())
        throw std::invalid_argument("fiber_cardinality: no point-like samples at this tolerance");
    for (auto& [key, pts] : groups) {
        std::sort(pts.begin(), pts.end());
        int count = 1;
        for (std::size_t k = 1; k < pts.size(); ++k)
            if (pts[k] - pts[k - 1] > cluster_tol) ++count;
        rep.per_past.push_back(CardinalityRecord{key, count});
        rep.max_count = std::max(rep.max_count, count);
    }
    return rep;
}

/// Wire format: one row per pullback level k = 0..n+1.
inline std::string contraction_csv(const ContractionReport& rep) {
    std::string csv = "k,J_len,bound,ok\n";
    for (const auto& r : rep.rows)
        csv += std::to_string(r.k) + ',' + fmt(r.length) + ',' + fmt(r.bound) + ',' +
               (r.ok ? "1" : "0") + '\n';
    return csv;
}

/// Wire format: one row per sampled past.
inline std::string cardinality_csv(const CardinalityReport& rep) {
    std::string csv = "past,count\n";
    for (const auto& r : rep.per_past) csv += r.past + ',' + std::to_string(r.count) + '\n';
    return csv;
}

} // namespace skewlab
