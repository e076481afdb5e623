#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "skewlab/config.hpp"
#include "skewlab/csv.hpp"
#include "skewlab/genericity.hpp"
#include "skewlab/hyperbolicity.hpp"
#include "skewlab/measures.hpp"
#include "skewlab/strips.hpp"
#include "skewlab/svg.hpp"

namespace skewlab::cli {

// Exit codes: 0 success/pass, 1 analysis-level failure, 2 config/usage
// error, 3 runtime window error, 4 non-convergence.
enum ExitCode : int { exit_ok = 0, exit_analysis = 1, exit_config = 2, exit_window = 3, exit_nonconv = 4 };

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    int workers = 1;
};

namespace detail {

inline std::string out_path(const CommonArgs& c, const std::string& file) {
    std::filesystem::create_directories(c.out_dir);
    return (std::filesystem::path(c.out_dir) / file).string();
}

inline std::uint64_t require_seed(const CommonArgs& c) {
    if (!c.seed) throw config_error("this command samples; pass --seed");
    return *c.seed;
}

inline std::vector<int> parse_word_arg(const std::string& s, int n) {
    std::vector<int> w;
    for (char ch : s) {
        if (ch < '1' || ch > '9') throw config_error("--word must be digits in 1..9");
        const int sym = ch - '0';
        if (sym > n) throw config_error("--word symbol outside the alphabet");
        w.push_back(sym);
    }
    if (w.empty()) throw config_error("--word must be nonempty");
    return w;
}

inline double past_embedding(const Word& past, int n, int depth) {
    // base-N embedding of the past window into [0,1): sum (xi_{-k}-1) N^{-k}
    double x = 0.0, scale = 1.0;
    for (int k = 1; k <= depth; ++k) {
        scale /= n;
        x += (past.at(-k) - 1) * scale;
    }
    return x;
}

inline std::vector<std::vector<int>> all_words_of_length(int n, int len) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(static_cast<std::size_t>(len), 1);
    while (true) {
        out.push_back(w);
        int pos = len - 1;
        while (pos >= 0) {
            if (++w[static_cast<std::size_t>(pos)] <= n) break;
            w[static_cast<std::size_t>(pos)] = 1;
            --pos;
        }
        if (pos < 0) break;
    }
    return out;
}

} // namespace detail

inline int cmd_orbit(const SystemConfig& cfg, const CommonArgs& common,
                     const std::string& word_arg, double p0, int n, std::ostream& out) {
    std::vector<int> syms;
    if (!word_arg.empty()) {
        const auto base = detail::parse_word_arg(word_arg, cfg.system.N);
        for (int k = 0; k < n; ++k) syms.push_back(base[static_cast<std::size_t>(k) % base.size()]);
    } else {
        Rng rng(detail::require_seed(common));
        const Word w = sample_word(cfg.chain, 0, std::max(0, n - 1), rng);
        for (int k = 0; k < n; ++k) syms.push_back(w.at(k));
    }

    std::ostringstream csv;
    csv << "k,symbol,p,logderiv,chi_running\n";
    double p = p0, mean = 0.0;
    for (int k = 0; k < n; ++k) {
        const FiberMap& f = cfg.system.map(syms[static_cast<std::size_t>(k)]);
        const double ld = std::log(std::abs(f.deriv(p)));
        mean += (ld - mean) / (k + 1);
        csv << k << ',' << syms[static_cast<std::size_t>(k)] << ',' << fmt(p) << ',' << fmt(ld)
            << ',' << fmt(mean) << '\n';
        p = f.eval(p);
    }
    const std::string path = detail::out_path(common, "orbit.csv");
    write_text_file(path, csv.str());
    out << "orbit: " << n << " steps written to " << path << "\n";
    return exit_ok;
}

inline int cmd_extend(const SystemConfig& cfg, std::ostream& out) {
    const ExtendedSystem ext = build_extension(cfg.system);
    const int m = ext.doubled_n();
    out << "transition matrix A (" << m << "x" << m << "):\n";
    for (int i = 1; i <= m; ++i) {
        out << "  ";
        for (int j = 1; j <= m; ++j) out << (ext.A.at(i, j) ? 1 : 0) << (j < m ? ' ' : '\n');
    }
    out << "fiber maps:\n";
    for (int i = 1; i <= m; ++i)
        out << "  g" << i << " = " << ext.gmap(i).describe()
            << (ext.gmap(i).preserves_orientation() ? "  [preserving]" : "  [reversing]") << "\n";
    bool block = true;
    for (int i = 1; i <= cfg.system.N && block; ++i)
        for (int j = cfg.system.N + 1; j <= m && block; ++j) block = !ext.A.at(i, j);
    if (block && cfg.system.reversing_symbols().empty())
        out << "note: all maps preserve orientation; the two sheets never communicate\n";
    return exit_ok;
}

inline int cmd_stationary(const SystemConfig& cfg, const CommonArgs& common, std::ostream& out) {
    const ExtendedSystem ext = build_extension(cfg.system);
    const SymmetricMarkov lam = symmetric_extension(cfg.chain, ext);
    const Numerics& nm = cfg.numerics;
    StationaryResult res = stationary_measure(ext, lam, uniform_measure(lam.chain.p, nm.n_bins),
                                              nm.tol, nm.max_iter);
    const std::string path = detail::out_path(common, "stationary.csv");
    write_text_file(path, measure_csv(res.measure));
    out << "stationary: " << (res.converged ? "converged" : "NOT CONVERGED") << " after "
        << res.iterations << " iterations, residual " << fmt(res.residual) << "\n";
    for (int i = 1; i <= res.measure.n_symbols(); ++i) {
        out << "  symbol " << i << ": mass " << fmt(res.measure.symbol_mass(i));
        if (const auto sup = res.measure.support(i))
            out << " support [" << fmt(sup->lo) << ", " << fmt(sup->hi) << "]";
        out << "\n";
    }
    out << "measure written to " << path << "\n";
    return res.converged ? exit_ok : exit_nonconv;
}

inline int cmd_strips(const SystemConfig& cfg, const CommonArgs& common, double eps_override,
                      std::ostream& out) {
    const ExtendedSystem ext = build_extension(cfg.system);
    const SymmetricMarkov lam = symmetric_extension(cfg.chain, ext);
    const Numerics& nm = cfg.numerics;
    const double eps = eps_override > 0.0 ? eps_override : nm.strip_eps();

    const auto candidates = stationary_candidates(ext, lam, nm.n_bins, nm.tol, nm.max_iter);
    for (const auto& c : candidates)
        if (!c.converged) {
            out << "strips: stationary iteration did not converge (residual " << fmt(c.residual)
                << ")\n";
            return exit_nonconv;
        }

    std::vector<Strip> attracting;
    for (const auto& c : candidates) {
        Strip s = strip_from_measure(c.measure, eps, &lam.chain.p);
        const CertReport rep = certify_attracting(ext, s);
        s.kind = rep.certified ? StripKind::attracting : StripKind::unknown;
        attracting.push_back(std::move(s));
    }

    // Seeds that converged to a stationary mixture produce a strip covering
    // another candidate's strip on every symbol (ergodic components have
    // minimal support); keep only the minimal ones. Containment is read with
    // bin-scale slack because mixture supports carry sub-floor dust at their
    // edges.
    {
        const double slack = eps;
        auto covers = [&](const Strip& big, const Strip& small) {
            bool longer = false;
            for (int i = 1; i <= big.n_symbols(); ++i) {
                const Interval& b = big.fiber(i);
                const Interval& s = small.fiber(i);
                if (b.lo - slack > s.lo || s.hi > b.hi + slack) return false;
                longer = longer || b.length() > s.length() + 4.0 * slack;
            }
            return longer;
        };
        std::vector<Strip> minimal;
        for (std::size_t a = 0; a < attracting.size(); ++a) {
            bool is_mixture = false;
            for (std::size_t b = 0; b < attracting.size() && !is_mixture; ++b)
                is_mixture = a != b && covers(attracting[a], attracting[b]);
            if (!is_mixture) minimal.push_back(attracting[a]);
        }
        attracting = std::move(minimal);
    }

    const StripOrderResult ord = order_strips(attracting);
    std::ostringstream csv;
    csv << "symbol,lo,hi,kind,margin\n";
    SvgCanvas svg("strip overview: per-symbol fiber intervals; x = symbol slots, y = fiber [0,1]");
    svg.frame();
    const int m = ext.doubled_n();

    int analysis_fail = 0;
    auto emit_strip = [&](const Strip& s, const CertReport& rep) {
        for (int i = 1; i <= s.n_symbols(); ++i) {
            csv << i << ',' << fmt(s.fiber(i).lo) << ',' << fmt(s.fiber(i).hi) << ','
                << to_string(s.kind) << ',' << fmt(rep.margin) << '\n';
            const double x0 = static_cast<double>(i - 1) / m, x1 = (i - 0.85) / m;
            svg.rect(x0, s.fiber(i).lo, x1, s.fiber(i).hi,
                     s.kind == StripKind::attracting   ? "#2166ac"
                     : s.kind == StripKind::repelling ? "#b2182b"
                                                      : "#999999",
                     0.7);
        }
    };

    if (!ord.comparable) {
        out << "strips: incomparable pair (" << ord.incomparable_pair.first << ", "
            << ord.incomparable_pair.second << ") reported; fibers overlap on some symbol\n";
        analysis_fail = 1;
    }

    for (std::size_t k = 0; k < attracting.size(); ++k) {
        const Strip& s = attracting[ord.comparable ? ord.order[k] : k];
        const CertReport rep = certify_attracting(ext, s);
        emit_strip(s, rep);
        if (!rep.certified) analysis_fail = 1;
        out << "attracting strip " << k + 1 << ": margin " << fmt(rep.margin)
            << (rep.certified ? " certified" : " NOT certified") << "\n";
        if (ord.comparable && k + 1 < attracting.size()) {
            const Strip& t = attracting[ord.order[k + 1]];
            Strip gap;
            bool ok = true;
            for (int i = 1; i <= s.n_symbols(); ++i) {
                if (!(s.fiber(i).hi < t.fiber(i).lo)) { ok = false; break; }
                gap.fibers.push_back(Interval{s.fiber(i).hi, t.fiber(i).lo});
            }
            if (ok) {
                const CertReport rrep = certify_repelling(ext, gap);
                gap.kind = rrep.certified ? StripKind::repelling : StripKind::unknown;
                emit_strip(gap, rrep);
                out << "repelling gap " << k + 1 << ": margin " << fmt(rrep.margin)
                    << (rrep.certified ? " certified" : " NOT certified") << "\n";
            }
        }
    }

    // projected bi-strip of the first attracting strip, drawn over base slots
    if (!attracting.empty()) {
        const BiStrip bs = project_strip(ext, attracting.front());
        for (int i = 1; i <= cfg.system.N; ++i) {
            const double x0 = static_cast<double>(m + i - 1) / (m + cfg.system.N);
            const double x1 = x0 + 0.1 / (m + cfg.system.N);
            svg.rect(x0, bs.first.fiber(i).lo, x1, bs.first.fiber(i).hi, "#4393c3", 0.7);
            svg.rect(x0 + 0.02, bs.second.fiber(i).lo, x1 + 0.02, bs.second.fiber(i).hi, "#92c5de", 0.7);
        }
        out << "projection: bi-strip with " << (bs.simple() ? "equal" : "distinct")
            << " components\n";
    }

    write_text_file(detail::out_path(common, "strips.csv"), csv.str());
    write_text_file(detail::out_path(common, "strips.svg"), svg.finish());
    out << "tables written to " << detail::out_path(common, "strips.csv") << "\n";
    return analysis_fail ? exit_analysis : exit_ok;
}

inline int cmd_attractor(const SystemConfig& cfg, const CommonArgs& common, std::ostream& out) {
    const Numerics& nm = cfg.numerics;
    const std::uint64_t seed = detail::require_seed(common);
    // per-past seeds, so the output is identical for every worker count
    std::vector<Word> pasts;
    pasts.reserve(static_cast<std::size_t>(nm.n_pasts));
    for (int k = 0; k < nm.n_pasts; ++k)
        pasts.push_back(
            sample_word(cfg.chain, nm.depth, 0, Rng::derive(seed, static_cast<std::uint64_t>(k))));

    Strip whole;
    whole.fibers.assign(static_cast<std::size_t>(cfg.system.N), Interval::unit());

    FiberSampleSet set;
    const int workers = std::max(1, std::min(common.workers, nm.n_pasts));
    if (workers == 1) {
        set = maximal_attractor_fibers(cfg.system, whole, pasts, nm.depth);
    } else {
        std::vector<FiberSampleSet> parts(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        const int chunk = (nm.n_pasts + workers - 1) / workers;
        for (int wk = 0; wk < workers; ++wk)
            pool.emplace_back([&, wk] {
                const int lo = wk * chunk, hi = std::min(nm.n_pasts, (wk + 1) * chunk);
                if (lo >= hi) return;
                const std::vector<Word> slice(pasts.begin() + lo, pasts.begin() + hi);
                parts[static_cast<std::size_t>(wk)] =
                    maximal_attractor_fibers(cfg.system, whole, slice, nm.depth);
            });
        for (auto& t : pool) t.join();
        for (auto& part : parts)
            for (auto& s : part.samples) set.samples.push_back(std::move(s));
    }

    SvgCanvas svg("attractor fibers: x = base-" + std::to_string(cfg.system.N) +
                  " embedding sum (xi_{-k}-1) N^{-k} of the sampled past, y = fiber");
    svg.frame();
    for (const auto& s : set.samples) {
        const double x = detail::past_embedding(s.past, cfg.system.N, s.depth);
        if (s.length > 1e-3)
            svg.line(x, s.fiber.lo, x, s.fiber.hi, "#b2182b", 1.5);
        else
            svg.dot(x, s.fiber.mid(), 1.2, "#2166ac");
    }
    write_text_file(detail::out_path(common, "attractor.csv"), fiber_samples_csv(set));
    write_text_file(detail::out_path(common, "attractor.svg"), svg.finish());
    out << "attractor: " << set.samples.size() << " fibers at depth " << nm.depth << " written to "
        << detail::out_path(common, "attractor.csv") << "\n";
    for (const auto& row : continuity_modulus(set, {1, 2, 4, 8}))
        out << "  continuity: pasts agreeing to depth " << row.agree_depth
            << " have fiber gaps <= " << fmt(row.max_gap) << "\n";
    return exit_ok;
}

inline int cmd_genericity(const SystemConfig& cfg, const CommonArgs& common, std::ostream& out) {
    const GenericityReport rep = genericity_report(cfg.system);

    std::ostringstream ci;
    ci << "view,witness,value\n";
    for (const auto& w : rep.cond_i.witnesses)
        ci << w.view << ",\"" << w.label << "\"," << fmt(w.value) << '\n';
    write_text_file(detail::out_path(common, "genericity_i.csv"), ci.str());

    std::ostringstream cii;
    cii << "view,witness,value\n";
    for (const auto& w : rep.cond_ii.witnesses)
        cii << w.view << ",\"" << w.label << "\"," << fmt(w.value) << '\n';
    write_text_file(detail::out_path(common, "genericity_ii.csv"), cii.str());

    std::ostringstream ciii;
    ciii << "a,b,residual\n";
    if (rep.cond_iii.witness)
        ciii << fmt(rep.cond_iii.witness->a) << ',' << fmt(rep.cond_iii.witness->b) << ','
             << fmt(rep.cond_iii.witness->residual) << '\n';
    write_text_file(detail::out_path(common, "genericity_iii.csv"), ciii.str());

    out << "condition i  (short periodic orbits hyperbolic): " << (rep.cond_i.pass ? "pass" : "FAIL")
        << "\n";
    out << "  note: fixed points come from a 4096-node sign scan; tangencies between nodes are\n"
           "  probed only where |f_w(x) - x| < 1e-9, so flatter near-tangencies can be missed\n";
    out << "condition ii (no short heteroclinic connections): "
        << (rep.cond_ii.pass ? "pass" : "FAIL") << " (min gap " << fmt(rep.cond_ii.min_gap)
        << ")\n";
    out << "condition iii (no reflection cycle): "
        << (rep.cond_iii.vacuous ? "vacuous (no reversing map)"
                                 : (rep.cond_iii.pass ? "pass" : "FAIL"))
        << "\n";
    if (rep.cond_iii.witness)
        out << "  cycle witness a=" << fmt(rep.cond_iii.witness->a)
            << " b=" << fmt(rep.cond_iii.witness->b)
            << " residual=" << fmt(rep.cond_iii.witness->residual) << "\n";

    switch (rep.verdict) {
        case GenericityVerdict::generic_candidate:
            out << "verdict: generic-candidate\n";
            return exit_ok;
        case GenericityVerdict::vacuous_iii:
            out << "verdict: conditions i-ii pass, iii vacuous\n";
            return exit_config;
        default:
            out << "verdict: fails\n";
            return exit_analysis;
    }
}

inline int cmd_pliss(const SystemConfig& cfg, const CommonArgs& common,
                     const std::string& word_arg, double p0, int n, double rho,
                     std::ostream& out) {
    std::vector<int> syms;
    if (!word_arg.empty()) {
        const auto base = detail::parse_word_arg(word_arg, cfg.system.N);
        for (int k = 0; k < n; ++k) syms.push_back(base[static_cast<std::size_t>(k) % base.size()]);
    } else {
        Rng rng(detail::require_seed(common));
        const Word w = sample_word(cfg.chain, 0, std::max(0, n - 1), rng);
        for (int k = 0; k < n; ++k) syms.push_back(w.at(k));
    }
    const Word w{syms, 0};
    const LogDerivSequence seq = orbit_log_derivs(cfg.system, PointState{w, p0}, n, rho);
    const PlissDensity d = pliss_density(seq, rho);

    std::ostringstream csv;
    csv << "k,logderiv,is_hyperbolic_time\n";
    std::size_t next = 0;
    for (std::size_t k = 0; k < seq.values.size(); ++k) {
        const bool hyp = next < d.times.size() && d.times[next] == static_cast<int>(k);
        if (hyp) ++next;
        csv << k << ',' << fmt(seq.values[k]) << ',' << (hyp ? 1 : 0) << '\n';
    }
    write_text_file(detail::out_path(common, "pliss.csv"), csv.str());
    out << "pliss: density " << fmt(d.density);
    if (d.lower_bound) out << ", lower bound " << fmt(*d.lower_bound);
    out << ", " << d.times.size() << "/" << seq.values.size() << " hyperbolic times at rho "
        << fmt(rho) << "\n";
    return exit_ok;
}

inline int cmd_distortion(const SystemConfig& cfg, const CommonArgs& common,
                          std::vector<double> thetas, std::ostream& out) {
    if (thetas.empty()) thetas = {1e-3, 1e-2, 1e-1, 1.0, 2.0};
    std::ostringstream csv;
    csv << "theta,D\n";
    for (double th : thetas) csv << fmt(th) << ',' << fmt(distortion_global(cfg.system, th)) << '\n';
    write_text_file(detail::out_path(common, "distortion.csv"), csv.str());
    out << "distortion: " << thetas.size() << " windows written to "
        << detail::out_path(common, "distortion.csv") << "\n";
    return exit_ok;
}

inline int cmd_verify(const SystemConfig& cfg, const CommonArgs& common, bool corrupt_g,
                      std::ostream& out) {
    const std::uint64_t seed = detail::require_seed(common);
    ExtendedSystem ext = build_extension(cfg.system);
    if (corrupt_g && ext.doubled_n() >= 3)
        ext.gmaps[2] = FiberMap::affine(0.5, 0.25); // negative control: break g_3

    bool all_pass = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
        all_pass = all_pass && ok;
    };

    {
        const auto rep = verify_semiconjugacy(cfg.system, ext, 20000, seed);
        report("semiconjugacy", rep.max_fiber_discrepancy <= 1e-12,
               "max fiber discrepancy " + fmt(rep.max_fiber_discrepancy) + " over " +
                   std::to_string(rep.samples) + " samples");
    }
    {
        const auto rep = two_to_one_census(ext, 3);
        report("two-to-one census", rep.all_two,
               std::to_string(rep.windows) + " windows, " +
                   (rep.all_two ? "all with exactly 2 lifts"
                                : "lift count " + std::to_string(rep.worst_count) + " seen"));
    }
    {
        bool ok = true;
        std::string msg = "symmetry identities and pushforward exact";
        try {
            const SymmetricMarkov lam = symmetric_extension(cfg.chain, ext);
            for (int len = 1; len <= 3 && ok; ++len) {
                for (const auto& w : detail::all_words_of_length(cfg.system.N, len)) {
                    const double base_mass = cylinder_mass(cfg.chain, CylinderSpec{0, w});
                    double lifted = 0.0;
                    for (int add : {0, cfg.system.N}) {
                        std::vector<int> lift = w;
                        lift[0] += add;
                        for (std::size_t k = 1; k < lift.size(); ++k)
                            lift[k] = ext.A.at(lift[k - 1], lift[k]) ? lift[k] : lift[k] + cfg.system.N;
                        lifted += cylinder_mass(lam.chain, CylinderSpec{0, lift});
                    }
                    if (lifted != base_mass) {
                        ok = false;
                        msg = "pushforward mismatch on cylinder " + word_str(w);
                        break;
                    }
                }
            }
        } catch (const std::exception& e) {
            ok = false;
            msg = e.what();
        }
        report("symmetric extension", ok, msg);
    }
    {
        const SymmetricMarkov lam = symmetric_extension(cfg.chain, build_extension(cfg.system));
        const ExtendedSystem clean = build_extension(cfg.system);
        const auto res = stationary_measure(clean, lam, uniform_measure(lam.chain.p, 512), 1e-10,
                                            cfg.numerics.max_iter);
        const FiberMeasureVector mir = mirror_measure(res.measure);
        const double mir_res = l1_distance(transfer_step(clean, lam, mir), mir);
        const bool ok = res.converged && mir_res <= res.residual + 1e-10 &&
                        l1_distance(mirror_measure(mir), res.measure) == 0.0;
        report("mirrored stationarity", ok,
               "residual " + fmt(res.residual) + ", mirrored residual " + fmt(mir_res));
    }
    {
        Rng rng(Rng::derive(seed, 77));
        bool ok = true;
        for (int trial = 0; trial < 100 && ok; ++trial) {
            const int len = 1 + static_cast<int>(rng.uniform() * 150);
            LogDerivSequence seq;
            for (int k = 0; k < len; ++k) seq.values.push_back(rng.uniform(-1.0, 1.0));
            const double rho = rng.uniform(-0.5, 0.5);
            const auto fast = pliss_times(seq, rho);
            std::vector<int> slow;
            for (int n = 0; n < len; ++n) {
                bool hyp = true;
                for (int m = n; m >= 0 && hyp; --m) {
                    double acc = 0.0;
                    for (int k = m; k <= n; ++k) acc += seq.values[static_cast<std::size_t>(k)] - rho;
                    hyp = acc >= 0.0;
                }
                if (hyp) slow.push_back(n);
            }
            ok = fast == slow;
        }
        report("pliss oracle", ok, "linear scan vs definition check on 100 random sequences");
    }
    return all_pass ? exit_ok : exit_analysis;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"skewlab: step skew-products with monotone interval fiber maps"};
    app.require_subcommand(1);

    CommonArgs common;
    std::uint64_t seed_val = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "system config file")->required();
        sub->add_option("--seed", seed_val, "RNG seed")->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--workers", common.workers, "worker count for sampling commands");
    };

    std::string word_arg;
    double p0 = 0.0;
    int steps = 10;
    double rho = 0.0;
    double eps_override = 0.0;
    std::vector<double> thetas;
    bool corrupt_g = false;

    CLI::App* orbit = app.add_subcommand("orbit", "iterate an orbit and its running exponent");
    add_common(orbit);
    orbit->add_option("--word", word_arg, "periodic symbol pattern, e.g. 12");
    orbit->add_option("--p0", p0, "initial fiber point")->required();
    orbit->add_option("--steps", steps, "number of steps");

    CLI::App* extend = app.add_subcommand("extend", "print the doubled system");
    add_common(extend);

    CLI::App* stationary = app.add_subcommand("stationary", "stationary measure of the extension");
    add_common(stationary);

    CLI::App* strips = app.add_subcommand("strips", "strip certification and ordering");
    add_common(strips);
    strips->add_option("--eps", eps_override, "strip inflation around measure support");

    CLI::App* attractor = app.add_subcommand("attractor", "sampled maximal-attractor fibers");
    add_common(attractor);

    CLI::App* genericity = app.add_subcommand("genericity", "check the three genericity conditions");
    add_common(genericity);

    CLI::App* verify = app.add_subcommand("verify", "run the structural property suite");
    add_common(verify);
    verify->add_flag("--corrupt-g", corrupt_g, "negative control: corrupt one doubled map");

    CLI::App* pliss = app.add_subcommand("pliss", "hyperbolic times along an orbit");
    add_common(pliss);
    pliss->add_option("--word", word_arg, "periodic symbol pattern");
    pliss->add_option("--p0", p0, "initial fiber point")->required();
    pliss->add_option("--steps", steps, "orbit length");
    pliss->add_option("--rho", rho, "exponent parameter")->required();

    CLI::App* distortion_cmd = app.add_subcommand("distortion", "global distortion D(theta)");
    add_common(distortion_cmd);
    distortion_cmd->add_option("--theta", thetas, "window widths");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_config;
    }
    if (seed_set) common.seed = seed_val;

    try {
        const SystemConfig cfg = load_config_file(common.config_path);
        if (!common.seed && cfg.numerics.seed) common.seed = cfg.numerics.seed;
        if (orbit->parsed()) return cmd_orbit(cfg, common, word_arg, p0, steps, out);
        if (extend->parsed()) return cmd_extend(cfg, out);
        if (stationary->parsed()) return cmd_stationary(cfg, common, out);
        if (strips->parsed()) return cmd_strips(cfg, common, eps_override, out);
        if (attractor->parsed()) return cmd_attractor(cfg, common, out);
        if (genericity->parsed()) return cmd_genericity(cfg, common, out);
        if (verify->parsed()) return cmd_verify(cfg, common, corrupt_g, out);
        if (pliss->parsed()) return cmd_pliss(cfg, common, word_arg, p0, steps, rho, out);
        if (distortion_cmd->parsed()) return cmd_distortion(cfg, common, thetas, out);
        err << "no command\n";
        return exit_config;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const window_error& e) {
        err << "window error: " << e.what() << "\n";
        return exit_window;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_analysis;
    }
}

} // namespace skewlab::cli
