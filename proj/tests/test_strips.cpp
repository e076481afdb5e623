#include <doctest.h>

#include <cmath>

#include "test_systems.hpp"

using namespace skewlab;

namespace {

// Two preserving maps sharing attracting fixed points at 0.25 and 0.75 with
// a repeller between: the phase space splits into two attracting strips with
// a repelling gap.
StepSkewSystem two_basin_system() {
    return StepSkewSystem(
        {fixtures::bigraph_f1(),
         FiberMap::anchored({0.0, 0.25, 0.5, 0.75, 1.0}, {0.15, 0.25, 0.5, 0.75, 0.85},
                            {0.6, 0.6, 1.6, 0.6, 0.6})},
        true);
}

Strip constant_strip(int n_symbols, Interval j, StripKind kind = StripKind::unknown) {
    Strip s;
    s.fibers.assign(static_cast<std::size_t>(n_symbols), j);
    s.kind = kind;
    return s;
}

} // namespace

TEST_CASE("strip_from_measure inflates the support hull") {
    FiberMeasureVector mu(2, 128);
    mu.add_point(1, 0.2, 0.5);
    mu.add_point(2, 0.6, 0.5);
    const Strip s = strip_from_measure(mu, 0.01);
    const double h = 1.0 / 128;
    CHECK(s.fiber(1).contains(0.2));
    CHECK(s.fiber(1).length() <= h + 0.02 + 1e-12);
    CHECK(s.fiber(2).contains(0.6));
    CHECK_THROWS_AS(strip_from_measure(mu, 0.0), std::invalid_argument);

    FiberMeasureVector empty_sym(2, 128);
    empty_sym.add_point(1, 0.2, 1.0);
    CHECK_THROWS_AS(strip_from_measure(empty_sym, 0.01), std::invalid_argument);
    const std::vector<double> p{1.0, 0.0};
    CHECK_NOTHROW(strip_from_measure(empty_sym, 0.01, &p)); // symbol 2 has chain mass 0
}

TEST_CASE("certify_attracting: whole space of the mixed extension traps with margin 0.1") {
    const auto ext = build_extension(fixtures::affine_mixed());
    const auto rep = certify_attracting(ext, constant_strip(4, Interval::unit()));
    CHECK(rep.certified);
    CHECK(rep.margin == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("certify_attracting: endpoint arithmetic on the preserving pair") {
    const auto sys = fixtures::affine_preserving();
    const auto rep = certify_attracting(sys, constant_strip(2, {0.19, 0.81}));
    CHECK(rep.certified);
    // images are [0.195, 0.505] and [0.495, 0.805]; the binding margin is
    // min(0.195 - 0.19, 0.81 - 0.805) = 0.005
    CHECK(rep.margin == doctest::Approx(0.005).epsilon(1e-9));

    const auto bad = certify_attracting(sys, constant_strip(2, {0.3, 0.7}));
    CHECK(!bad.certified);
    CHECK(bad.margin < 0.0); // f2([0.3,0.7]) = [0.55,0.75] leaves the strip
}

TEST_CASE("certify_repelling: the gap between two attracting strips repels") {
    const auto sys = two_basin_system();
    const auto low = certify_attracting(sys, constant_strip(2, {0.2, 0.3}));
    const auto high = certify_attracting(sys, constant_strip(2, {0.7, 0.8}));
    CHECK(low.certified);
    CHECK(high.certified);

    const auto gap = certify_repelling(sys, constant_strip(2, {0.3, 0.7}));
    CHECK(gap.certified);
    CHECK(gap.margin > 0.0);

    // a thin fiber at the repeller: inverse maps contract onto 0.5
    const auto thin = certify_repelling(sys, constant_strip(2, {0.5 - 1e-9, 0.5 + 1e-9}), 1e-11);
    CHECK(thin.certified);
}

TEST_CASE("certify_repelling: the whole absorbing space is not repelling") {
    const auto sys = fixtures::affine_preserving();
    const auto rep = certify_repelling(sys, constant_strip(2, Interval::unit()));
    CHECK(!rep.certified);
    CHECK(rep.margin == 0.0); // pullback of the image is all of [0,1]
}

TEST_CASE("maximal_attractor_fibers contract at the uniform rate") {
    const auto sys = fixtures::affine_preserving();
    Rng rng(8);
    std::vector<Word> pasts;
    for (int k = 0; k < 1000; ++k)
        pasts.push_back(sample_word(fixtures::bernoulli_half(), 60, 0, rng));
    const Strip whole = constant_strip(2, Interval::unit());
    const auto set = maximal_attractor_fibers(sys, whole, pasts, 60);
    REQUIRE(set.samples.size() == 1000);
    for (const auto& s : set.samples) CHECK(s.length <= 1e-17); // 0.5^60 < 1e-17

    // depth 0 returns the strip fibers themselves
    const auto shallow = maximal_attractor_fibers(sys, whole, {pasts.front()}, 0);
    CHECK(shallow.samples.front().fiber == Interval::unit());

    // a constant past pushes onto the fixed point of f1
    const Word ones = fixtures::periodic_word({1}, 80, 0);
    const auto fp = maximal_attractor_fibers(sys, whole, {ones}, 80);
    CHECK(fp.samples.front().fiber.contains(0.2));
    CHECK(fp.samples.front().length <= 1e-17);

    // a window shorter than the requested depth is an error, never a wrap
    CHECK_THROWS_AS(maximal_attractor_fibers(sys, whole, {ones}, 81), window_error);
}

TEST_CASE("attractor fiber lengths obey the uniform contraction rate") {
    // every map of the mixed extension has |g'| = 0.5, so depth-n fibers of
    // the whole-space strip have length at most 0.5^n
    const auto ext = build_extension(fixtures::affine_mixed());
    const auto lam = symmetric_extension(fixtures::bernoulli_half(), ext);
    Rng rng(19);
    const Strip whole = constant_strip(4, Interval::unit());
    for (int depth : {1, 5, 10, 20}) {
        std::vector<Word> pasts;
        for (int k = 0; k < 50; ++k) pasts.push_back(sample_word(lam.chain, depth, 0, rng));
        for (const auto& s : maximal_attractor_fibers(ext, whole, pasts, depth).samples)
            CHECK(s.length <= std::pow(0.5, depth) * (1.0 + 1e-12));
    }
}

TEST_CASE("attractor fiber lengths are nonincreasing in depth") {
    const auto sys = fixtures::bigraph();
    Rng rng(21);
    const Word past = sample_word(fixtures::bernoulli_half(), 40, 0, rng);
    const Strip whole = constant_strip(2, Interval::unit());
    double prev = 1.0;
    for (int depth = 0; depth <= 40; ++depth) {
        const auto set = maximal_attractor_fibers(sys, whole, {past}, depth);
        const double len = std::max(set.samples.front().length, set.samples.front().fiber.length());
        CHECK(len <= prev + 1e-12);
        prev = len;
    }
}

TEST_CASE("certified attracting strips stay certified after one push") {
    const auto ext = build_extension(fixtures::affine_mixed());
    const auto lam = symmetric_extension(fixtures::bernoulli_half(), ext);
    const auto res = stationary_measure(ext, lam, uniform_measure(lam.chain.p, 1024), 1e-9, 10000);
    REQUIRE(res.converged);
    Strip s = strip_from_measure(res.measure, 2.0 / 1024, &lam.chain.p);
    const auto rep = certify_attracting(ext, s);
    REQUIRE(rep.certified);

    // push: each fiber becomes the hull of incoming images
    Strip pushed;
    for (int j = 1; j <= 4; ++j) {
        double lo = 1.0, hi = 0.0;
        for (int i = 1; i <= 4; ++i) {
            if (!ext.A.at(i, j)) continue;
            const Interval img = ext.gmap(i).image(s.fiber(i));
            lo = std::min(lo, img.lo);
            hi = std::max(hi, img.hi);
        }
        pushed.fibers.push_back(Interval{lo, hi});
    }
    // nested trapping: images of the pushed strip sit at least as deep inside
    // the original fibers as the first-step images did
    double nested_margin = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) {
            if (!ext.A.at(i, j)) continue;
            const Interval img = ext.gmap(i).image(pushed.fiber(i));
            nested_margin = std::min(nested_margin, s.fiber(j).interior_margin(img));
        }
    CHECK(nested_margin > 0.0);
    CHECK(nested_margin >= rep.margin - 1e-12);
}

TEST_CASE("order_strips sorts disjoint strips and reports overlaps") {
    const Strip a = constant_strip(2, {0.1, 0.3});
    const Strip b = constant_strip(2, {0.5, 0.7});
    const auto ok = order_strips({b, a});
    REQUIRE(ok.comparable);
    CHECK(ok.order == std::vector<std::size_t>{1, 0});

    Strip c = constant_strip(2, {0.25, 0.6});
    const auto bad = order_strips({a, c});
    CHECK(!bad.comparable);

    const auto single = order_strips({a});
    CHECK(single.comparable);
    CHECK(single.order == std::vector<std::size_t>{0});
}

TEST_CASE("order_strips is transitive and antisymmetric on random disjoint strips") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        // random strictly separated bands per symbol
        const int k = 4;
        std::vector<Strip> strips(k);
        for (int sym = 0; sym < 2; ++sym) {
            std::vector<double> cuts;
            for (int c = 0; c < 2 * k; ++c) cuts.push_back(rng.uniform());
            std::sort(cuts.begin(), cuts.end());
            for (int s = 0; s < k; ++s)
                strips[static_cast<std::size_t>(s)].fibers.push_back(
                    Interval{cuts[static_cast<std::size_t>(2 * s)],
                             cuts[static_cast<std::size_t>(2 * s + 1)] - 1e-12});
        }
        const auto res = order_strips(strips);
        REQUIRE(res.comparable);
        for (std::size_t i = 0; i + 1 < res.order.size(); ++i) {
            CHECK(strip_less(strips[res.order[i]], strips[res.order[i + 1]]));
            CHECK(!strip_less(strips[res.order[i + 1]], strips[res.order[i]]));
        }
        CHECK(strip_less(strips[res.order.front()], strips[res.order.back()]));
    }
}

TEST_CASE("project_strip reflects the second sheet") {
    const auto ext = build_extension(fixtures::affine_mixed());
    Strip s;
    s.fibers = {Interval{0.1, 0.3}, Interval{0.15, 0.35}, Interval{0.6, 0.8}, Interval{0.55, 0.85}};
    s.kind = StripKind::attracting;
    const BiStrip bs = project_strip(ext, s);
    CHECK(bs.first.fiber(1) == Interval{0.1, 0.3});
    CHECK(bs.second.fiber(1) == Interval{1.0 - 0.8, 1.0 - 0.6});
    CHECK(bs.second.fiber(1).lo == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(bs.second.fiber(1).hi == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(bs.kind == StripKind::attracting);
}

TEST_CASE("mirrored strips project to the same bi-strip") {
    const auto ext = build_extension(fixtures::affine_mixed());
    const auto lam = symmetric_extension(fixtures::bernoulli_half(), ext);
    // power-of-two bins and dyadic eps keep every reflected endpoint exact
    const int bins = 512;
    const auto res = stationary_measure(ext, lam, uniform_measure(lam.chain.p, bins), 1e-10, 20000);
    REQUIRE(res.converged);
    const double eps = 2.0 / bins;
    const Strip s = strip_from_measure(res.measure, eps, &lam.chain.p);
    const Strip sm = strip_from_measure(mirror_measure(res.measure), eps, &lam.chain.p);
    const BiStrip a = project_strip(ext, s);
    const BiStrip b = project_strip(ext, sm);
    const bool direct = a.first.fibers == b.first.fibers && a.second.fibers == b.second.fibers;
    const bool swapped = a.first.fibers == b.second.fibers && a.second.fibers == b.first.fibers;
    CHECK((direct || swapped));
}

TEST_CASE("self-mirrored strips project to simple bi-strips") {
    const auto ext = build_extension(fixtures::affine_mixed());
    Strip s;
    const Interval j{0.125, 0.5};
    s.fibers = {j, j, j.reflected(), j.reflected()};
    const BiStrip bs = project_strip(ext, s);
    CHECK(bs.simple());
    CHECK(bs.first.fiber(1) == j);
}

TEST_CASE("bony_diagnostic: uniformly contracting systems have no bones") {
    const auto sys = fixtures::affine_preserving();
    const Strip whole = constant_strip(2, Interval::unit());
    const auto rep =
        bony_diagnostic(sys, whole, fixtures::bernoulli_half(), 500, 60, 1e-6, 123);
    CHECK(rep.fat_fraction == 0.0);
    CHECK(rep.bones.empty());

    const auto wide =
        bony_diagnostic(sys, whole, fixtures::bernoulli_half(), 100, 3, 1.0, 123);
    CHECK(wide.fat_fraction == 0.0); // delta >= 1 can never flag a fiber
}

TEST_CASE("bony_diagnostic runs on the bigraph system") {
    const auto sys = fixtures::bigraph();
    const Strip whole = constant_strip(2, Interval::unit());
    const auto rep = bony_diagnostic(sys, whole, fixtures::bernoulli_half(), 300, 40, 1e-3, 7);
    CHECK(rep.fat_fraction >= 0.0);
    CHECK(rep.fat_fraction <= 1.0);
    CHECK(rep.bones.size() == static_cast<std::size_t>(std::lround(rep.fat_fraction * 300)));
}

TEST_CASE("envelope_graphs: contracting system gives a simple graph") {
    const auto sys = fixtures::affine_preserving();
    Rng rng(9);
    std::vector<Word> pasts;
    for (int k = 0; k < 200; ++k)
        pasts.push_back(sample_word(fixtures::bernoulli_half(), 60, 0, rng));
    const auto set =
        maximal_attractor_fibers(sys, constant_strip(2, Interval::unit()), pasts, 60);
    const auto rep = envelope_graphs(set, 1e-7);
    CHECK(!rep.non_simple);
    for (const auto& r : rep.records) CHECK(r.phi_plus - r.phi_minus <= 1e-6);
    CHECK_THROWS_AS(envelope_graphs(FiberSampleSet{}, 1e-7), std::invalid_argument);
}

TEST_CASE("continuity modulus decays with agreement depth for contracting systems") {
    const auto sys = fixtures::affine_preserving();
    Rng rng(27);
    std::vector<Word> pasts;
    for (int k = 0; k < 500; ++k)
        pasts.push_back(sample_word(fixtures::bernoulli_half(), 30, 0, rng));
    const auto set =
        maximal_attractor_fibers(sys, constant_strip(2, Interval::unit()), pasts, 30);
    const auto rows = continuity_modulus(set, {0, 2, 4, 8, 12});
    REQUIRE(rows.size() == 5);
    // agreeing on d+1 recent symbols pins the fiber to within 0.5^d of the
    // shared push, so the sampled gaps shrink at least geometrically
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].max_gap <= std::pow(0.5, rows[k].agree_depth) + 1e-12);
        if (k > 0) CHECK(rows[k].max_gap <= rows[k - 1].max_gap + 1e-12);
    }
    CHECK(rows[0].pairs > 0);
}

TEST_CASE("fiber sample and certification wire formats") {
    FiberSampleSet set;
    set.samples.push_back(FiberSample{Word{{2, 1}, 1}, 1, Interval{0.25, 0.5}, 0.25});
    CHECK(fiber_samples_csv(set) == "past,depth,lo,hi\n2|1,1,0.25,0.5\n");

    Strip s = constant_strip(2, {0.25, 0.75}, StripKind::attracting);
    CertReport rep;
    rep.certified = true;
    rep.margin = 0.125;
    CHECK(strip_certification_csv(s, rep) ==
          "symbol,lo,hi,kind,margin\n1,0.25,0.75,attracting,0.125\n2,0.25,0.75,attracting,0.125\n");
}

TEST_CASE("envelope_graphs: the bigraph periodic orbit is non-simple") {
    const auto sys = fixtures::bigraph();
    // follow the (1212)-periodic orbit through 0.25 and collect fibers over
    // radius-6 windows of the periodic base word
    FiberSampleSet set;
    const int radius = 6;
    double p = 0.25;
    for (int k = 0; k < 200; ++k) {
        const int phase = k % 2;
        const Word window = phase == 0 ? fixtures::periodic_word({1, 2}, radius, radius)
                                       : fixtures::periodic_word({2, 1}, radius, radius);
        set.samples.push_back(FiberSample{window, radius, Interval{p, p}});
        p = sys.map(window.at(0)).eval(p);
    }
    const auto rep = envelope_graphs(set, 1e-7);
    CHECK(rep.non_simple);
    REQUIRE(rep.records.size() == 2);
    for (const auto& r : rep.records) {
        CHECK(std::abs(r.phi_minus - 0.25) <= 1e-9);
        CHECK(std::abs(r.phi_plus - 0.75) <= 1e-9);
    }
}
