#include <doctest.h>

#include <cmath>

#include "test_systems.hpp"

using namespace skewlab;

TEST_CASE("step_forward advances the origin and applies f_{xi_0}") {
    const auto sys = fixtures::affine_mixed();
    const PointState s{Word{{1, 2}, 0}, 0.0};
    const PointState next = step_forward(sys, s);
    CHECK(next.word.origin_offset == 1);
    CHECK(next.fiber == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(step_forward(sys, next), window_error); // future exhausted
}

TEST_CASE("iterating step_forward equals compose_eval of the prefix") {
    const auto sys = fixtures::bigraph();
    const Word w = fixtures::periodic_word({1, 2, 2, 1, 2}, 0, 12);
    PointState s{w, 0.3};
    for (int n = 1; n <= 10; ++n) {
        s = step_forward(sys, s);
        const auto direct = compose_eval(sys.maps, w.future(n), 0.3);
        CHECK(s.fiber == direct.value);
    }
}

TEST_CASE("step_backward inverts where defined") {
    const auto sys = fixtures::affine_mixed();
    const PointState s{Word{{1, 2}, 1}, 0.3};
    const auto prev = step_backward(sys, s);
    REQUIRE(prev);
    CHECK(prev->fiber == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(prev->word.origin_offset == 0);

    const PointState outside{Word{{1, 2}, 1}, 0.05}; // f1 image is [0.1, 0.6]
    CHECK(!step_backward(sys, outside));

    // backward then forward is the identity where both are defined
    const PointState round = step_forward(sys, *prev);
    CHECK(round.fiber == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(round.word == s.word);
}

TEST_CASE("fiber_interval: nested images of the unit interval") {
    const auto sys = fixtures::affine_preserving();
    const Word ones = fixtures::periodic_word({1}, 40, 0);
    CHECK(fiber_interval(sys, ones, 0) == Interval::unit());
    CHECK(fiber_interval(sys, ones, 1) == Interval{0.1, 0.6});
    for (int n = 1; n <= 40; ++n) {
        const Interval j = fiber_interval(sys, ones, n);
        CHECK(j.length() == doctest::Approx(std::pow(0.5, n)).epsilon(1e-12));
        CHECK(j.contains(0.2)); // fixed point of f1
        if (n > 1) {
            const Interval shallower = fiber_interval(sys, ones, n - 1);
            CHECK(shallower.lo <= j.lo + 1e-12);
            CHECK(j.hi <= shallower.hi + 1e-12);
        }
    }
    CHECK_THROWS_AS(fiber_interval(sys, ones, 41), window_error);
}

TEST_CASE("build_extension reproduces the four-case transition matrix") {
    const auto ext = build_extension(fixtures::affine_mixed());
    const std::vector<std::uint8_t> expected{
        1, 1, 0, 0,
        0, 0, 1, 1,
        0, 0, 1, 1,
        1, 1, 0, 0};
    CHECK(ext.A.entries == expected);

    // doubled maps, checked pointwise: g1 = g2 = 0.5x + 0.1, g3 = g4 = 0.5x + 0.4
    for (double x : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(ext.gmap(1).eval(x) == doctest::Approx(0.5 * x + 0.1).epsilon(1e-15));
        CHECK(ext.gmap(2).eval(x) == doctest::Approx(0.5 * x + 0.1).epsilon(1e-15));
        CHECK(ext.gmap(3).eval(x) == doctest::Approx(0.5 * x + 0.4).epsilon(1e-15));
        CHECK(ext.gmap(4).eval(x) == doctest::Approx(0.5 * x + 0.4).epsilon(1e-15));
    }
    for (int i = 1; i <= 4; ++i) CHECK(ext.gmap(i).preserves_orientation());
}

TEST_CASE("build_extension: sheets never communicate for all-preserving systems") {
    const auto ext = build_extension(fixtures::affine_preserving());
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            CHECK(ext.A.at(i, j));
            CHECK(ext.A.at(i + 2, j + 2));
            CHECK(!ext.A.at(i, j + 2));
            CHECK(!ext.A.at(i + 2, j));
        }
}

TEST_CASE("build_extension: single reversing map gives the swap matrix") {
    const StepSkewSystem sys({FiberMap::affine(-0.5, 0.9)}, true);
    const auto ext = build_extension(sys);
    CHECK(ext.A.entries == std::vector<std::uint8_t>{0, 1, 1, 0});
}

TEST_CASE("g_{i+N} is the R-conjugate of g_i") {
    for (const auto& sys : {fixtures::affine_mixed(), fixtures::bigraph()}) {
        const auto ext = build_extension(sys);
        for (int i = 1; i <= sys.N; ++i)
            for (int k = 0; k <= 50; ++k) {
                const double x = static_cast<double>(k) / 50;
                CHECK(ext.gmap(i + sys.N).eval(x) ==
                      doctest::Approx(1.0 - ext.gmap(i).eval(1.0 - x)).epsilon(1e-15));
            }
    }
}

TEST_CASE("lift of the (12)-periodic word is the (1234)-periodic word") {
    const auto ext = build_extension(fixtures::affine_mixed());
    const Word xi = fixtures::periodic_word({1, 2}, 8, 8);

    const Word lift1 = lift_sequence(ext, xi, LiftClass::first);
    const Word lift2 = lift_sequence(ext, xi, LiftClass::second);
    for (int t = -8; t <= 8; ++t) {
        const int expected = 1 + ((t % 4) + 4) % 4;
        CHECK(lift1.at(t) == expected);
        CHECK(lift2.at(t) == 1 + ((expected + 1) % 4)); // (3412)-aligned
    }
    CHECK(lift2.at(0) == 3);

    // lifts are A-admissible and project back to the input
    for (const Word* w : {&lift1, &lift2}) {
        for (int t = -8; t < 8; ++t) CHECK(ext.A.at(w->at(t), w->at(t + 1)));
        CHECK(project_word(ext, *w) == xi);
    }
}

TEST_CASE("all-preserving lift of class first is the word itself") {
    const auto ext = build_extension(fixtures::affine_preserving());
    const Word xi = fixtures::periodic_word({1, 2, 2, 1}, 5, 5);
    CHECK(lift_sequence(ext, xi, LiftClass::first) == xi);
}

TEST_CASE("project_point reflects the fiber on the second sheet") {
    const auto ext = build_extension(fixtures::affine_mixed());
    const PointState up{Word{{3}, 0}, 0.3};
    const PointState down = project_point(ext, up);
    CHECK(down.word.at(0) == 1);
    CHECK(down.fiber == doctest::Approx(0.7).epsilon(1e-15));

    const PointState sheet1{Word{{1}, 0}, 0.3};
    CHECK(project_point(ext, sheet1).fiber == 0.3);

    // Pi o lift = identity for class-first states
    const Word xi = fixtures::periodic_word({2, 1}, 3, 3);
    const PointState lifted{lift_sequence(ext, xi, LiftClass::first), 0.42};
    const PointState back = project_point(ext, lifted);
    CHECK(back.word == xi);
    CHECK(back.fiber == 0.42);
}

TEST_CASE("semiconjugacy holds and a corrupted map breaks it") {
    const auto sys = fixtures::affine_mixed();
    auto ext = build_extension(sys);
    const auto rep = verify_semiconjugacy(sys, ext, 10000, 99);
    CHECK(rep.max_fiber_discrepancy <= 1e-12);

    ext.gmaps[2] = FiberMap::affine(0.5, 0.25); // corrupt g3
    const auto bad = verify_semiconjugacy(sys, ext, 10000, 99);
    CHECK(bad.max_fiber_discrepancy > 0.01);
}

TEST_CASE("semiconjugacy for the anchored system") {
    const auto sys = fixtures::bigraph();
    const auto ext = build_extension(sys);
    const auto rep = verify_semiconjugacy(sys, ext, 10000, 5);
    CHECK(rep.max_fiber_discrepancy <= 1e-12);
}

TEST_CASE("every base window has exactly two lifts") {
    const auto mixed = build_extension(fixtures::affine_mixed());
    const auto census = two_to_one_census(mixed, 3);
    CHECK(census.windows == 128); // 2^7 windows of radius 3
    CHECK(census.all_two);

    const auto pres = build_extension(fixtures::affine_preserving());
    CHECK(two_to_one_census(pres, 2).all_two);

    const StepSkewSystem single({FiberMap::affine(-0.5, 0.9)}, true);
    CHECK(two_to_one_census(build_extension(single), 2).all_two);
}

TEST_CASE("two_to_one_census guards oversized enumerations") {
    std::vector<FiberMap> maps;
    for (int i = 0; i < 4; ++i) maps.push_back(FiberMap::affine(0.5, 0.05 + 0.1 * i));
    const auto ext = build_extension(StepSkewSystem(std::move(maps), true));
    CHECK_THROWS_AS(two_to_one_census(ext, 6), std::length_error); // 4^13 windows
}

TEST_CASE("fiber intervals of lifts match the base up to reflection") {
    const auto sys = fixtures::bigraph();
    const auto ext = build_extension(sys);
    Rng rng(31);
    const auto chain = fixtures::bernoulli_half();
    for (int trial = 0; trial < 50; ++trial) {
        const Word xi = sample_word(chain, 8, 1, rng);
        const Interval base = fiber_interval(sys, xi, 8);
        for (auto cls : {LiftClass::first, LiftClass::second}) {
            const Word omega = lift_sequence(ext, xi, cls);
            const Interval up = extended_fiber_interval(ext, omega, 8);
            const bool first_sheet = omega.at(0) <= sys.N;
            const Interval expect = first_sheet ? base : base.reflected();
            CHECK(std::abs(up.lo - expect.lo) <= 1e-12);
            CHECK(std::abs(up.hi - expect.hi) <= 1e-12);
        }
    }
}

TEST_CASE("distortion_global covers inverse branches") {
    // the affine control: inverse maps have constant derivative too
    CHECK(distortion_global(fixtures::affine_preserving(), 0.5) ==
          doctest::Approx(1.0).epsilon(1e-5));
}
