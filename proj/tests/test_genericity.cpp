#include <doctest.h>

#include <cmath>
#include <sstream>

#include "test_systems.hpp"

using namespace skewlab;

namespace {

std::string render_report(const GenericityReport& rep) {
    std::ostringstream os;
    os << rep.cond_i.pass << '|' << rep.cond_ii.pass << '|' << rep.cond_iii.pass << '|'
       << rep.cond_iii.vacuous << '|' << fmt(rep.cond_ii.min_gap) << '|';
    for (const auto& w : rep.cond_i.witnesses) os << w.view << ':' << w.label << ';';
    for (const auto& w : rep.cond_ii.witnesses) os << w.view << ':' << w.label << ';';
    if (rep.cond_iii.witness)
        os << fmt(rep.cond_iii.witness->a) << ',' << fmt(rep.cond_iii.witness->b) << ','
           << fmt(rep.cond_iii.witness->residual);
    return os.str();
}

} // namespace

TEST_CASE("fixed_points of a single affine map") {
    const auto sys = fixtures::affine_preserving();
    const auto recs = fixed_points(sys, {1});
    REQUIRE(recs.size() == 1);
    CHECK(std::abs(recs[0].x - 0.2) <= 1e-11);
    CHECK(recs[0].deriv == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(recs[0].stability == Stability::attracting);
}

TEST_CASE("fixed_points of a reversing map: exactly one record") {
    const auto sys = fixtures::affine_mixed();
    const auto recs = fixed_points(sys, {2});
    REQUIRE(recs.size() == 1); // strictly decreasing maps cross the diagonal once
    CHECK(std::abs(recs[0].x - 0.6) <= 1e-11); // solve 0.9 - 0.5x = x
    CHECK(recs[0].deriv == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(recs[0].stability == Stability::attracting);
}

TEST_CASE("fixed_points of the bigraph f1: two attractors around a repeller") {
    const auto sys = fixtures::bigraph();
    const auto recs = fixed_points(sys, {1});
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].x == doctest::Approx(0.25).epsilon(1e-11));
    CHECK(recs[0].stability == Stability::attracting);
    CHECK(recs[1].x == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(recs[1].stability == Stability::repelling);
    CHECK(recs[1].deriv == doctest::Approx(1.8).epsilon(1e-9));
    CHECK(recs[2].x == doctest::Approx(0.75).epsilon(1e-11));
    CHECK(recs[2].stability == Stability::attracting);
}

TEST_CASE("fixed-point records satisfy the residual invariant") {
    const auto sys = fixtures::bigraph();
    for (const auto& word : {std::vector<int>{1}, {2}, {1, 2}, {2, 2}, {1, 2, 1, 2}}) {
        for (const auto& rec : fixed_points(sys, word)) {
            const double img = compose_eval(sys.maps, rec.word, rec.x).value;
            CHECK(std::abs(img - rec.x) <= 1e-11);
        }
    }
}

TEST_CASE("the (1212) composition fixes the period-4 orbit points") {
    const auto sys = fixtures::bigraph();
    const auto recs = fixed_points(sys, {1, 2, 1, 2});
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].x == doctest::Approx(0.25).epsilon(1e-11));
    CHECK(recs[0].deriv == doctest::Approx(0.0625).epsilon(1e-9)); // (0.5)^4
    CHECK(recs[0].stability == Stability::attracting);
    CHECK(recs[2].x == doctest::Approx(0.75).epsilon(1e-11));
}

TEST_CASE("condition i: mixed affine system passes, planted tangency fails") {
    CHECK(check_condition_i(fixtures::affine_mixed()).pass);
    CHECK(check_condition_i(fixtures::bigraph()).pass);

    // planted neutral fixed point: f(0.5) = 0.5 with slope exactly 1
    const StepSkewSystem planted(
        {FiberMap::anchored({0.0, 0.5, 1.0}, {0.2, 0.5, 0.8}, {1.0, 1.0, 1.0})}, true);
    const auto rep = check_condition_i(planted);
    CHECK(!rep.pass);
    CHECK(!rep.witnesses.empty());
}

TEST_CASE("fixed_points probes tangencies between grid nodes") {
    // a neutral fixed point just off the 4096-node grid: the sign scan sees
    // no crossing there, but the near-zero probe catches it
    const double x0 = 0.5 + std::pow(2.0, -20);
    const auto f = FiberMap::anchored({0.0, x0, 1.0}, {0.2, x0, 0.8}, {1.0, 1.0, 1.0});
    const auto recs = fixed_points({f}, {1});
    bool tangency_found = false;
    for (const auto& r : recs)
        tangency_found =
            tangency_found || (std::abs(r.x - x0) <= 1e-6 && r.stability == Stability::indifferent);
    CHECK(tangency_found);
    CHECK(!check_condition_i(StepSkewSystem({f}, true)).pass);
}

TEST_CASE("condition ii: mixed system passes with a reported gap") {
    const auto rep = check_condition_ii(fixtures::affine_mixed());
    CHECK(rep.pass);
    // all compositions contract, so there are no repelling fixed points and
    // no candidate connections at all
    CHECK(rep.witnesses.empty());

    const auto bg = check_condition_ii(fixtures::bigraph());
    CHECK(bg.pass);
    CHECK(bg.min_gap > 1e-6);
}

TEST_CASE("condition ii: planted heteroclinic coincidence fails") {
    // f1 fixes 0.5 (attracting); the bigraph map has a repelling fixed point
    // at 0.5; the length-1 connector f1 sends one onto the other exactly
    const StepSkewSystem planted({FiberMap::affine(0.5, 0.25), fixtures::bigraph_f1()}, true);
    const auto rep = check_condition_ii(planted);
    CHECK(!rep.pass);
    REQUIRE(!rep.witnesses.empty());
    CHECK(rep.min_gap <= 1e-6);
}

TEST_CASE("condition ii guards against large alphabets") {
    std::vector<FiberMap> many;
    for (int i = 0; i < 5; ++i) many.push_back(FiberMap::affine(0.5, 0.02 * i + 0.1));
    const StepSkewSystem big(std::move(many), true);
    CHECK_THROWS_AS(check_condition_ii(big), std::invalid_argument);
}

TEST_CASE("condition iii: bigraph has the reflection cycle at (0.25, 0.25)") {
    const auto rep = check_condition_iii(fixtures::bigraph());
    CHECK(!rep.pass);
    REQUIRE(rep.witness);
    CHECK(std::abs(rep.witness->a - 0.25) <= 1e-9);
    CHECK(std::abs(rep.witness->b - 0.25) <= 1e-9);
    CHECK(rep.witness->residual < 1e-9);
}

TEST_CASE("condition iii: the shifted bigraph breaks the cycle") {
    const auto rep = check_condition_iii(fixtures::bigraph_shifted(), 1e-6);
    CHECK(rep.pass);
    CHECK(!rep.witness);
}

TEST_CASE("condition iii: mixed system has no cycle, preserving system is vacuous") {
    const auto mixed = check_condition_iii(fixtures::affine_mixed());
    CHECK(mixed.pass);
    CHECK(!mixed.vacuous);

    const auto pres = check_condition_iii(fixtures::affine_preserving());
    CHECK(pres.pass);
    CHECK(pres.vacuous);
}

TEST_CASE("condition iii: disjoint preserving fixed-point sets pass vacuously") {
    const StepSkewSystem sys(
        {FiberMap::affine(0.5, 0.1), FiberMap::affine(0.5, 0.2), FiberMap::affine(-0.5, 0.9)},
        true);
    // fixed points 0.2 and 0.4 differ, so no candidate a exists
    const auto rep = check_condition_iii(sys);
    CHECK(rep.pass);
    CHECK(!rep.witness);
}

TEST_CASE("condition iii is invariant under relabeling within the orientation classes") {
    const auto f1 = FiberMap::affine(0.5, 0.1);
    const auto f2 = FiberMap::affine(0.25, 0.15); // same fixed point 0.2
    const auto r1 = FiberMap::affine(-0.5, 0.9);
    const auto r2 = FiberMap::affine(-0.25, 0.65); // also maps 0.2 -> 0.6
    const StepSkewSystem a({f1, f2, r1, r2}, true);
    const StepSkewSystem b({f2, f1, r2, r1}, true);
    const auto ra = check_condition_iii(a);
    const auto rb = check_condition_iii(b);
    CHECK(ra.pass == rb.pass);
    CHECK(ra.vacuous == rb.vacuous);
    if (ra.witness && rb.witness) {
        CHECK(std::abs(ra.witness->a - rb.witness->a) <= 1e-9);
        CHECK(std::abs(ra.witness->b - rb.witness->b) <= 1e-9);
    }
}

TEST_CASE("genericity_report aggregates the verdict") {
    CHECK(genericity_report(fixtures::affine_mixed()).verdict ==
          GenericityVerdict::generic_candidate);
    CHECK(genericity_report(fixtures::bigraph()).verdict == GenericityVerdict::fails);
    CHECK(genericity_report(fixtures::affine_preserving()).verdict ==
          GenericityVerdict::vacuous_iii);
    CHECK(genericity_report(fixtures::bigraph_shifted()).verdict ==
          GenericityVerdict::generic_candidate);
}

TEST_CASE("genericity reports are deterministic") {
    const auto a = render_report(genericity_report(fixtures::bigraph()));
    const auto b = render_report(genericity_report(fixtures::bigraph()));
    CHECK(a == b);
    const auto c = render_report(genericity_report(fixtures::affine_mixed()));
    const auto d = render_report(genericity_report(fixtures::affine_mixed()));
    CHECK(c == d);
}
