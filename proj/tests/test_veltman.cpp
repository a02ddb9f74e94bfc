#include <doctest.h>

#include "ilw/proofcheck.hpp"
#include "ilw/veltman.hpp"
#include "support/support.hpp"

using namespace ilw;
using support::F;

namespace {

const char* kFixtures[] = {"fig_no_maximum.json", "fig_box_vs_assuring.json", "fig_downward.json",
                           "nonmax_labels.json", "control_not_p.json", "control_not_r.json"};

// 0 R 1,2,3,4 and 1 R 2; S_0 adds 2 -> 3. 3 is not above 1, so 2 S_1 3 is
// impossible and (0,1,2,3) is the only P failure.
auto p_failure_frame() -> OrdinaryModel {
    auto m = OrdinaryModel::with_size(5);
    for (std::size_t v : {1, 2, 3, 4}) m.add_r(0, v);
    m.add_r(1, 2);
    m.add_s(0, 2, 3);
    close_frame(m);
    return m;
}

// 0 R 1,2 and 1 R 2, with 2 S_0 1: 2 S_0 1 R 2 loops.
auto w_failure_frame() -> OrdinaryModel {
    auto m = OrdinaryModel::with_size(3);
    m.add_r(0, 1);
    m.add_r(0, 2);
    m.add_r(1, 2);
    m.add_s(0, 2, 1);
    close_frame(m);
    return m;
}

}  // namespace

TEST_CASE("validate examples") {
    auto one = OrdinaryModel::with_size(1);
    CHECK_FALSE(validate(one).has_value());

    auto cyc = OrdinaryModel::with_worlds({"a", "b"});
    cyc.add_r(0, 1);
    cyc.add_r(1, 0);
    auto v = validate(cyc);
    REQUIRE(v.has_value());
    CHECK_FALSE(v->message().empty());

    CHECK_FALSE(validate(support::ordinary("fig_no_maximum.json")).has_value());
    for (const char* f : kFixtures) {
        CAPTURE(f);
        CHECK_FALSE(validate(support::ordinary(f)).has_value());
    }
}

TEST_CASE("validate rejects broken S") {
    auto m = OrdinaryModel::with_size(3);
    m.add_r(0, 1);
    m.add_r(0, 2);
    close_frame(m);
    REQUIRE_FALSE(validate(m).has_value());

    auto outside = m;
    outside.add_s(0, 1, 0);  // 0 is not in R[0]
    CHECK(validate(outside).has_value());

    auto nonrefl = m;
    nonrefl.S[0][1].reset(1);
    CHECK(validate(nonrefl).has_value());

    auto nontrans = m;
    nontrans.add_s(0, 1, 2);
    nontrans.add_s(0, 2, 1);
    nontrans.S[0][1].reset(1);
    CHECK(validate(nontrans).has_value());
}

TEST_CASE("forcing on the box vs assuring figure") {
    auto m = support::ordinary("fig_box_vs_assuring.json");
    CHECK(force(m, "x", F("q |> ~p")));
    CHECK(force(m, "y", F("[]p")));
    CHECK(force(m, "y", F("p & q")));
}

TEST_CASE("forcing on the incomparable labels figure") {
    auto m = support::ordinary("fig_no_maximum.json");
    CHECK(force(m, "w", F("r |> (~p | ~q)")));
    CHECK_FALSE(force(m, "w", F("r |> ~p")));
    CHECK_FALSE(force(m, "w", F("r |> ~q")));
    CHECK_THROWS_AS(force(m, "nowhere", F("p")), UnknownWorld);

    // u1 and u2 agree on every formula of the pool
    auto pool = adequate_set(F("r |> (~p | ~q)")).formulas;
    CHECK(theory(m, m.world("u1"), pool) == theory(m, m.world("u2"), pool));
}

TEST_CASE("evaluator agrees with naive recursion") {
    Rng rng(21);
    std::vector<OrdinaryModel> models;
    for (const char* f : kFixtures) models.push_back(support::ordinary(f));
    for (int i = 0; i < 60; ++i) models.push_back(random_model(rng, Logic::parse("IL")));
    for (const auto& m : models) {
        Evaluator ev(m);
        for (int k = 0; k < 25; ++k) {
            Formula f = random_formula(rng, {"p", "q", "r"}, 3);
            for (std::size_t w = 0; w < m.size(); ++w) {
                CAPTURE(print(f));
                CHECK(ev.forces(w, f) == support::naive_force(m, w, f));
            }
        }
    }
}

TEST_CASE("valid_on_frame examples") {
    auto one = OrdinaryModel::with_size(1);
    CHECK(valid_on_frame(one, F("[]([]p -> p) -> []p"), {"p"}));

    auto chain = OrdinaryModel::with_size(2);
    chain.add_r(0, 1);
    close_frame(chain);
    CHECK_FALSE(valid_on_frame(chain, F("<>true"), {}));

    Rng rng(2);
    for (int i = 0; i < 30; ++i) {
        auto m = random_model(rng, Logic::parse("IL"), {.max_worlds = 5, .vars = {"p"}});
        CHECK(valid_on_frame(m, F("<>p |> p"), {"p"}));
    }

    auto big = OrdinaryModel::with_size(13);
    CHECK_THROWS_AS(valid_on_frame(big, F("p | q"), {"p", "q"}), CapExceeded);
    CHECK(valid_on_frame_sampled(big, F("p | ~p"), {"p", "q"}, 50, rng));
    CHECK_FALSE(valid_on_frame_sampled(big, F("p"), {"p", "q"}, 50, rng));
}

TEST_CASE("check_condition examples") {
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        auto m = random_model(rng, Logic::parse("IL"), {.s_density = 0.0});
        CHECK_FALSE(check_condition(m, Principle::M).has_value());
    }

    auto p = p_failure_frame();
    REQUIRE_FALSE(validate(p).has_value());
    auto cp = check_condition(p, Principle::P);
    REQUIRE(cp.has_value());
    CHECK(*cp == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK_FALSE(satisfies(p, Logic::parse("ILP")));
    CHECK(satisfies(p, Logic::parse("IL")));

    auto w = w_failure_frame();
    REQUIRE_FALSE(validate(w).has_value());
    auto cw = check_condition(w, Principle::W);
    REQUIRE(cw.has_value());
    REQUIRE(cw->size() >= 2);
    CHECK(cw->front() == 0);
    std::vector<std::size_t> cycle(cw->begin() + 1, cw->end());
    CHECK(cycle.front() == 2);
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        std::size_t x = cycle[i], next = cycle[(i + 1) % cycle.size()];
        bool linked = false;
        for (std::size_t y = 0; y < w.size(); ++y) linked |= w.S[0][x].test(y) && w.R[y].test(next);
        CHECK(linked);
    }

    auto fine = w;
    fine.S[0][2].reset(1);
    CHECK_FALSE(check_condition(fine, Principle::W).has_value());
}

TEST_CASE("conditions on the negative controls") {
    CHECK(check_condition(support::ordinary("control_not_p.json"), Principle::P).has_value());
    CHECK(check_condition(support::ordinary("control_not_r.json"), Principle::R).has_value());
}

TEST_CASE("random models satisfy their logic") {
    Rng rng(13);
    for (const char* name : {"IL", "ILP", "ILM", "ILM0", "ILR", "ILW", "ILWP"}) {
        auto logic = Logic::parse(name);
        for (int i = 0; i < 30; ++i) {
            auto m = random_model(rng, logic);
            CAPTURE(name);
            CHECK_FALSE(validate(m).has_value());
            CHECK(satisfies(m, logic));
        }
    }
}

TEST_CASE("IL axioms hold on random models") {
    Rng rng(17);
    const std::vector<std::string> vars{"p", "q", "r"};
    for (int i = 0; i < 80; ++i) {
        auto m = random_model(rng, Logic::parse("IL"));
        Evaluator ev(m);
        for (SchemaName s : {SchemaName::K, SchemaName::L, SchemaName::J1, SchemaName::J2, SchemaName::J3,
                             SchemaName::J4, SchemaName::J5}) {
            Substitution sigma;
            for (const char* meta : {"A", "B", "C"}) sigma[meta] = random_formula(rng, vars, 3);
            Formula inst = substitute(*schema_template(s), sigma);
            CAPTURE(print(inst));
            CHECK(ev.extension(inst).all());
        }
    }
}

TEST_CASE("principles hold on their frame class") {
    Rng rng(19);
    const std::vector<std::string> vars{"p", "q", "r"};
    for (Principle p : all_principles()) {
        auto logic = Logic::with({p});
        auto tmpl = *schema_template(parse_schema_name(principle_name(p)));
        for (int i = 0; i < 60; ++i) {
            auto m = random_model(rng, logic);
            Evaluator ev(m);
            Substitution sigma;
            for (const char* meta : {"A", "B", "C"}) sigma[meta] = random_formula(rng, vars, 3);
            CAPTURE(principle_name(p));
            CHECK(ev.extension(substitute(tmpl, sigma)).all());
        }
    }
}

TEST_CASE("close_frame adds exactly the mandatory pairs") {
    auto m = OrdinaryModel::with_size(4);
    m.add_r(0, 1);
    m.add_r(1, 2);
    m.add_r(0, 3);
    close_frame(m);
    CHECK(m.R[0].test(2));
    CHECK(m.S[0][1].test(1));
    CHECK(m.S[0][1].test(2));
    CHECK_FALSE(m.S[0][1].test(3));
    CHECK_FALSE(m.S[0][3].test(1));
    CHECK(m.S[1][2].test(2));
    CHECK(m.S[0][0].none());
}
