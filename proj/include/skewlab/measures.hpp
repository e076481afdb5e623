#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "skewlab/csv.hpp"
#include "skewlab/markov.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/skew.hpp"

namespace skewlab {

/// Per-symbol sub-probability histograms over a uniform partition of [0,1].
/// The grand total is 1 for the measures this library produces; per-symbol
/// totals match the stationary vector of the driving chain.
struct FiberMeasureVector {
    int n_bins = 0;
    std::vector<std::vector<double>> masses; // [symbol-1][bin]

    FiberMeasureVector() = default;
    FiberMeasureVector(int symbols, int bins)
        : n_bins(bins),
          masses(static_cast<std::size_t>(symbols),
                 std::vector<double>(static_cast<std::size_t>(bins), 0.0)) {
        if (symbols < 1 || bins < 1)
            throw std::invalid_argument("FiberMeasureVector: bad shape");
    }

    int n_symbols() const { return static_cast<int>(masses.size()); }

    double bin_lo(int b) const { return static_cast<double>(b) / n_bins; }
    double bin_hi(int b) const { return static_cast<double>(b + 1) / n_bins; }
    double bin_mid(int b) const { return (b + 0.5) / n_bins; }
    double bin_width() const { return 1.0 / n_bins; }

    int bin_of(double x) const {
        int b = static_cast<int>(std::floor(x * n_bins));
        return std::min(n_bins - 1, std::max(0, b));
    }

    double symbol_mass(int symbol) const {
        double acc = 0.0;
        for (double m : masses[static_cast<std::size_t>(symbol - 1)]) acc += m;
        return acc;
    }

    std::vector<double> symbol_masses() const {
        std::vector<double> out(masses.size());
        for (int i = 1; i <= n_symbols(); ++i) out[static_cast<std::size_t>(i - 1)] = symbol_mass(i);
        return out;
    }

    double total_mass() const {
        double acc = 0.0;
        for (const auto& v : symbol_masses()) acc += v;
        return acc;
    }

    void add_point(int symbol, double x, double mass) {
        masses[static_cast<std::size_t>(symbol - 1)][static_cast<std::size_t>(bin_of(x))] += mass;
    }

    void scale(double c) {
        for (auto& row : masses)
            for (double& m : row) m *= c;
    }

    /// Support endpoints of a symbol's histogram, ignoring bins at or below
    /// mass_floor. nullopt when the whole histogram is dust.
    std::optional<Interval> support(int symbol, double mass_floor = 1e-12) const {
        const auto& row = masses[static_cast<std::size_t>(symbol - 1)];
        int first = -1, last = -1;
        for (int b = 0; b < n_bins; ++b) {
            if (row[static_cast<std::size_t>(b)] > mass_floor) {
                if (first < 0) first = b;
                last = b;
            }
        }
        if (first < 0) return std::nullopt;
        return Interval{bin_lo(first), bin_hi(last)};
    }
};

inline FiberMeasureVector uniform_measure(const std::vector<double>& symbol_weights, int n_bins) {
    FiberMeasureVector mu(static_cast<int>(symbol_weights.size()), n_bins);
    for (std::size_t i = 0; i < symbol_weights.size(); ++i)
        for (int b = 0; b < n_bins; ++b)
            mu.masses[i][static_cast<std::size_t>(b)] = symbol_weights[i] / n_bins;
    return mu;
}

inline FiberMeasureVector point_mass_measure(const std::vector<double>& symbol_weights,
                                             int n_bins, double x) {
    FiberMeasureVector mu(static_cast<int>(symbol_weights.size()), n_bins);
    for (std::size_t i = 0; i < symbol_weights.size(); ++i)
        mu.add_point(static_cast<int>(i) + 1, x, symbol_weights[i]);
    return mu;
}

/// Markov chain on the doubled alphabet {1..2N} whose support is A and which
/// is invariant under the sheet swap i <-> i+N.
struct SymmetricMarkov {
    MarkovChainSpec chain; // over {1..2N}, support = A
    int base_n = 0;

    int doubled_n() const { return 2 * base_n; }
};

inline void check_symmetric(const SymmetricMarkov& lam) {
    const int n = lam.base_n;
    if (lam.chain.size() != 2 * n)
        throw std::invalid_argument("SymmetricMarkov: alphabet size is not 2N");
    auto idx = [](int s) { return static_cast<std::size_t>(s - 1); };
    for (int i = 1; i <= n; ++i) {
        if (lam.chain.p[idx(i)] != lam.chain.p[idx(i + n)])
            throw std::invalid_argument("SymmetricMarkov: p_i != p_{i+N} at i=" + std::to_string(i));
        for (int j = 1; j <= n; ++j) {
            if (lam.chain.P[idx(i)][idx(j)] != lam.chain.P[idx(i + n)][idx(j + n)])
                throw std::invalid_argument("SymmetricMarkov: P_ij != P_{(i+N)(j+N)}");
            if (lam.chain.P[idx(i)][idx(j + n)] != lam.chain.P[idx(i + n)][idx(j)])
                throw std::invalid_argument("SymmetricMarkov: P_{i(j+N)} != P_{(i+N)j}");
            if (lam.chain.P[idx(i)][idx(j)] != 0.0 && lam.chain.P[idx(i)][idx(j + n)] != 0.0)
                throw std::invalid_argument("SymmetricMarkov: both sheet targets carry mass");
        }
    }
}

/// The unique symmetric extension of a nondegenerate base chain:
/// p_i = p_{i+N} = p0_{i mod N} / 2 and P_ij = P0_{(i mod N)(j mod N)} on
/// A-admissible entries, zero elsewhere.
inline SymmetricMarkov symmetric_extension(const MarkovChainSpec& lambda0,
                                           const ExtendedSystem& ext) {
    const int n = ext.base.N;
    if (lambda0.size() != n)
        throw std::invalid_argument("symmetric_extension: base chain size mismatch");
    for (double pi : lambda0.p)
        if (!(pi > 0.0))
            throw std::invalid_argument("symmetric_extension: base chain must be nondegenerate");

    SymmetricMarkov lam;
    lam.base_n = n;
    lam.chain.p.resize(static_cast<std::size_t>(2 * n));
    lam.chain.P.assign(static_cast<std::size_t>(2 * n),
                       std::vector<double>(static_cast<std::size_t>(2 * n), 0.0));
    for (int i = 1; i <= 2 * n; ++i) {
        const int ri = ext.base_symbol(i);
        lam.chain.p[static_cast<std::size_t>(i - 1)] = lambda0.p[static_cast<std::size_t>(ri - 1)] / 2.0;
        for (int j = 1; j <= 2 * n; ++j) {
            if (!ext.A.at(i, j)) continue;
            const int rj = ext.base_symbol(j);
            lam.chain.P[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
                lambda0.P[static_cast<std::size_t>(ri - 1)][static_cast<std::size_t>(rj - 1)];
        }
    }
    lam.chain.support = ext.A;
    check_symmetric(lam);
    validate_markov(lam.chain);
    return lam;
}

/// Pushforward of a symmetric chain under the symbol projection; exact
/// inverse of symmetric_extension.
inline MarkovChainSpec project_markov(const SymmetricMarkov& lam) {
    check_symmetric(lam);
    const int n = lam.base_n;
    MarkovChainSpec out;
    out.p.resize(static_cast<std::size_t>(n));
    out.P.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 1; i <= n; ++i) {
        out.p[static_cast<std::size_t>(i - 1)] =
            lam.chain.p[static_cast<std::size_t>(i - 1)] + lam.chain.p[static_cast<std::size_t>(i + n - 1)];
        for (int j = 1; j <= n; ++j)
            out.P[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
                lam.chain.P[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
                lam.chain.P[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j + n - 1)];
    }
    return out;
}

namespace detail {

/// Distributes mass uniformly over the image interval of a source bin.
inline void push_interval(std::vector<double>& dest, int n_bins, const Interval& img, double mass) {
    if (mass == 0.0) return;
    const double len = img.length();
    auto clamp_bin = [&](int b) { return std::min(n_bins - 1, std::max(0, b)); };
    if (len <= 0.0) {
        dest[static_cast<std::size_t>(clamp_bin(static_cast<int>(std::floor(img.mid() * n_bins))))] += mass;
        return;
    }
    const int b0 = clamp_bin(static_cast<int>(std::floor(img.lo * n_bins)));
    const int b1 = clamp_bin(static_cast<int>(std::floor(img.hi * n_bins)));
    if (b0 == b1) {
        dest[static_cast<std::size_t>(b0)] += mass;
        return;
    }
    for (int b = b0; b <= b1; ++b) {
        const double lo = std::max(img.lo, static_cast<double>(b) / n_bins);
        const double hi = std::min(img.hi, static_cast<double>(b + 1) / n_bins);
        if (hi > lo) dest[static_cast<std::size_t>(b)] += mass * (hi - lo) / len;
    }
}

} // namespace detail

/// One application of the Markov-weighted pushforward operator
///   (g_* mu)_i(E) = sum_j P_{ji} mu_j(g_j^{-1}(E)):
/// mass on fiber j moves through g_j, the map the skew-product applies at
/// symbol j, and lands on fiber i with weight P_{ji}. Each source is pushed
/// once (bin images distributed proportionally by length) and the result is
/// mixed into its admissible destinations. Stationary measures of this
/// operator have exactly the support geometry the attracting-strip
/// construction certifies.
inline FiberMeasureVector transfer_step(const ExtendedSystem& ext, const SymmetricMarkov& lam,
                                        const FiberMeasureVector& mu) {
    const int m = ext.doubled_n();
    if (mu.n_symbols() != m)
        throw std::invalid_argument("transfer_step: measure symbol count mismatch");
    if (mu.n_bins < 16) throw std::invalid_argument("transfer_step: need at least 16 bins");

    FiberMeasureVector out(m, mu.n_bins);
    std::vector<double> pushed(static_cast<std::size_t>(mu.n_bins));
    for (int j = 1; j <= m; ++j) {
        const auto& src = mu.masses[static_cast<std::size_t>(j - 1)];
        const FiberMap& g = ext.gmap(j);
        std::fill(pushed.begin(), pushed.end(), 0.0);
        bool any = false;
        for (int b = 0; b < mu.n_bins; ++b) {
            const double mass = src[static_cast<std::size_t>(b)];
            if (mass == 0.0) continue;
            any = true;
            detail::push_interval(pushed, mu.n_bins, g.image({mu.bin_lo(b), mu.bin_hi(b)}), mass);
        }
        if (!any) continue;
        for (int i = 1; i <= m; ++i) {
            const double w = lam.chain.P[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)];
            if (w == 0.0) continue;
            auto& dest = out.masses[static_cast<std::size_t>(i - 1)];
            for (int b = 0; b < mu.n_bins; ++b)
                dest[static_cast<std::size_t>(b)] += w * pushed[static_cast<std::size_t>(b)];
        }
    }
    return out;
}

inline double l1_distance(const FiberMeasureVector& a, const FiberMeasureVector& b) {
    if (a.n_symbols() != b.n_symbols() || a.n_bins != b.n_bins)
        throw std::invalid_argument("l1_distance: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.masses.size(); ++i)
        for (std::size_t k = 0; k < a.masses[i].size(); ++k)
            acc += std::abs(a.masses[i][k] - b.masses[i][k]);
    return acc;
}

struct StationaryResult {
    FiberMeasureVector measure;
    double residual = 0.0; // L1 distance moved by the last applied step
    int iterations = 0;
    bool converged = false;
};

/// Iterates transfer_step from a seed measure until successive iterates move
/// less than tol in L1, or max_iter is hit (result flagged, best iterate
/// returned).
inline StationaryResult stationary_measure(const ExtendedSystem& ext, const SymmetricMarkov& lam,
                                           FiberMeasureVector seed, double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("stationary_measure: tol must be positive");
    StationaryResult res;
    res.measure = std::move(seed);
    res.residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        FiberMeasureVector next = transfer_step(ext, lam, res.measure);
        res.residual = l1_distance(next, res.measure);
        res.measure = std::move(next);
        res.iterations = it + 1;
        if (res.residual <= tol) {
            res.converged = true;
            return res;
        }
    }
    if (max_iter == 0) res.residual = l1_distance(transfer_step(ext, lam, res.measure), res.measure);
    return res;
}

/// Distinct ergodic candidates: stationary runs from a spread of seed
/// measures, deduplicated at 100*tol in L1.
inline std::vector<StationaryResult> stationary_candidates(const ExtendedSystem& ext,
                                                           const SymmetricMarkov& lam, int n_bins,
                                                           double tol, int max_iter) {
    std::vector<FiberMeasureVector> seeds;
    seeds.push_back(uniform_measure(lam.chain.p, n_bins));
    for (double x : {0.1, 0.5, 0.9}) seeds.push_back(point_mass_measure(lam.chain.p, n_bins, x));

    std::vector<StationaryResult> out;
    for (auto& s : seeds) {
        StationaryResult r = stationary_measure(ext, lam, std::move(s), tol, max_iter);
        bool fresh = true;
        for (const auto& prev : out)
            if (l1_distance(prev.measure, r.measure) <= 100.0 * tol) { fresh = false; break; }
        if (fresh) out.push_back(std::move(r));
    }
    return out;
}

/// Sheet swap combined with the fiber reflection: bin b of symbol i receives
/// the mass of bin (n_bins-1-b) of symbol s(i). Exact involution.
inline FiberMeasureVector mirror_measure(const FiberMeasureVector& mu) {
    const int m = mu.n_symbols();
    if (m % 2 != 0) throw std::invalid_argument("mirror_measure: symbol count must be even");
    const int n = m / 2;
    FiberMeasureVector out(m, mu.n_bins);
    for (int i = 1; i <= m; ++i) {
        const int si = i <= n ? i + n : i - n;
        for (int b = 0; b < mu.n_bins; ++b)
            out.masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(b)] =
                mu.masses[static_cast<std::size_t>(si - 1)][static_cast<std::size_t>(mu.n_bins - 1 - b)];
    }
    return out;
}

/// Fiber part of the projection Pi applied to a measure on the doubled
/// system: first-sheet bins pass through, second-sheet bins are reflected.
inline FiberMeasureVector project_measure(const ExtendedSystem& ext, const FiberMeasureVector& mu) {
    const int m = mu.n_symbols();
    if (m != ext.doubled_n())
        throw std::invalid_argument("project_measure: expected a measure over 2N symbols");
    const int n = ext.base.N;
    FiberMeasureVector out(n, mu.n_bins);
    for (int i = 1; i <= n; ++i)
        for (int b = 0; b < mu.n_bins; ++b)
            out.masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(b)] =
                mu.masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(b)] +
                mu.masses[static_cast<std::size_t>(i + n - 1)][static_cast<std::size_t>(mu.n_bins - 1 - b)];
    return out;
}

/// Empirical fiber distribution of the base dynamics: n_orbits sampled base
/// words, uniform initial fiber points, visits after burn_in accumulated
/// into per-symbol histograms and normalized. Per-orbit seeds are derived
/// from (seed, orbit index) and the per-worker buffers hold integer visit
/// counts (exactly associative in double), so the result is bit-identical
/// for every worker count.
inline FiberMeasureVector birkhoff_fiber_distribution(const StepSkewSystem& sys,
                                                      const MarkovChainSpec& lambda0, int n_orbits,
                                                      int n_steps, int burn_in, int n_bins,
                                                      std::uint64_t seed, int workers = 1) {
    if (n_orbits < 1) throw std::invalid_argument("birkhoff: need at least one orbit");
    if (n_steps <= burn_in)
        throw std::invalid_argument("birkhoff: n_steps must exceed burn_in");
    workers = std::max(1, std::min(workers, n_orbits));

    std::vector<FiberMeasureVector> buffers(static_cast<std::size_t>(workers),
                                            FiberMeasureVector(sys.N, n_bins));
    auto run_range = [&](int worker, int lo, int hi) {
        FiberMeasureVector& buf = buffers[static_cast<std::size_t>(worker)];
        for (int o = lo; o < hi; ++o) {
            Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(o)));
            const Word w = sample_word(lambda0, 0, n_steps, rng);
            double p = rng.uniform();
            for (int k = 0; k < n_steps; ++k) {
                const int sym = w.at(k);
                if (k >= burn_in) buf.add_point(sym, p, 1.0);
                p = sys.map(sym).eval(p);
            }
        }
    };

    if (workers == 1) {
        run_range(0, 0, n_orbits);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_orbits + workers - 1) / workers;
        for (int wk = 0; wk < workers; ++wk)
            pool.emplace_back(run_range, wk, wk * chunk, std::min(n_orbits, (wk + 1) * chunk));
        for (auto& t : pool) t.join();
    }

    FiberMeasureVector mu = std::move(buffers.front());
    for (int wk = 1; wk < workers; ++wk)
        for (int i = 0; i < sys.N; ++i)
            for (int b = 0; b < n_bins; ++b)
                mu.masses[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)] +=
                    buffers[static_cast<std::size_t>(wk)]
                        .masses[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)];
    mu.scale(1.0 / (static_cast<double>(n_orbits) * (n_steps - burn_in)));
    return mu;
}

struct MeasureDistance {
    double l1 = 0.0;
    std::vector<double> kolmogorov; // per symbol; -1 marks symbols empty on both sides
};

/// L1 over all bins plus the per-symbol sup-difference of normalized
/// cumulative histograms.
inline MeasureDistance measure_distance(const FiberMeasureVector& mu, const FiberMeasureVector& nu) {
    if (mu.n_symbols() != nu.n_symbols() || mu.n_bins != nu.n_bins)
        throw std::invalid_argument("measure_distance: shape mismatch");
    MeasureDistance d;
    d.l1 = l1_distance(mu, nu);
    d.kolmogorov.resize(static_cast<std::size_t>(mu.n_symbols()));
    for (int i = 1; i <= mu.n_symbols(); ++i) {
        const double wm = mu.symbol_mass(i), wn = nu.symbol_mass(i);
        if (wm == 0.0 && wn == 0.0) {
            d.kolmogorov[static_cast<std::size_t>(i - 1)] = -1.0;
            continue;
        }
        double cm = 0.0, cn = 0.0, worst = 0.0;
        for (int b = 0; b < mu.n_bins; ++b) {
            cm += wm > 0.0 ? mu.masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(b)] / wm : 0.0;
            cn += wn > 0.0 ? nu.masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(b)] / wn : 0.0;
            worst = std::max(worst, std::abs(cm - cn));
        }
        d.kolmogorov[static_cast<std::size_t>(i - 1)] = worst;
    }
    return d;
}

struct LyapunovEstimate {
    double value = 0.0;
    double quadrature_bound = 0.0; // mass-weighted oscillation of the integrand per bin
};

/// integral of log |f'_i| d mu over symbols and bins, evaluated at bin
/// centers. The running value is a mass-weighted mean (the measure is a
/// probability), which keeps constant-derivative systems exact.
inline LyapunovEstimate lyapunov_of_measure(const std::vector<FiberMap>& maps,
                                            const FiberMeasureVector& mu) {
    if (static_cast<int>(maps.size()) != mu.n_symbols())
        throw std::invalid_argument("lyapunov_of_measure: map count mismatch");
    LyapunovEstimate est;
    double weight = 0.0;
    for (int i = 1; i <= mu.n_symbols(); ++i) {
        const FiberMap& f = maps[static_cast<std::size_t>(i - 1)];
        for (int b = 0; b < mu.n_bins; ++b) {
            const double mass = mu.masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(b)];
            if (mass <= 0.0) continue;
            auto integrand = [&](double x) {
                const double d = std::abs(f.deriv(x));
                if (d < 1e-300)
                    throw std::domain_error("lyapunov_of_measure: derivative vanishes on a bin with mass");
                return std::log(d);
            };
            const double vm = integrand(mu.bin_mid(b));
            const double vl = integrand(mu.bin_lo(b));
            const double vh = integrand(std::min(1.0, mu.bin_hi(b)));
            weight += mass;
            est.value += (mass / weight) * (vm - est.value);
            est.quadrature_bound += mass * (std::max({vm, vl, vh}) - std::min({vm, vl, vh}));
        }
    }
    return est;
}

inline LyapunovEstimate lyapunov_of_measure(const StepSkewSystem& sys, const FiberMeasureVector& mu) {
    return lyapunov_of_measure(sys.maps, mu);
}

inline LyapunovEstimate lyapunov_of_measure(const ExtendedSystem& ext, const FiberMeasureVector& mu) {
    return lyapunov_of_measure(ext.gmaps, mu);
}

/// Wire format: one row per (symbol, bin), sorted.
inline std::string measure_csv(const FiberMeasureVector& mu) {
    std::string csv = "symbol,bin_lo,bin_hi,mass\n";
    for (int i = 1; i <= mu.n_symbols(); ++i)
        for (int b = 0; b < mu.n_bins; ++b)
            csv += std::to_string(i) + ',' + fmt(mu.bin_lo(b)) + ',' + fmt(mu.bin_hi(b)) + ',' +
                   fmt(mu.masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(b)]) + '\n';
    return csv;
}

} // namespace skewlab
