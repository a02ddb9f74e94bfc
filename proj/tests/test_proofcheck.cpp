#include <doctest.h>

#include <sstream>

#include "ilw/proofcheck.hpp"
#include "ilw/veltman.hpp"
#include "support/support.hpp"

using namespace ilw;
using support::F;

namespace {

struct Goal {
    const char* file;
    const char* theorem;
};

const Goal kGoals[] = {
    {"box_transitive.proof", "[]p -> [][]p"},
    {"box_as_rhd.proof", "([]p -> ~p |> false) & ((~p |> false) -> []p)"},
    {"loeb_class.proof", "(p |> p & []~p) & (p & []~p |> p)"},
    {"boxed_consequent.proof", "[]r & (p |> q) -> p |> q & r"},
    {"no_box_diamond.proof", "([]<>p -> []false) & ([]false -> []<>p)"},
};

auto split_lines(const std::string& text) -> std::vector<std::string> {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

auto join_lines(const std::vector<std::string>& lines) -> std::string {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

}  // namespace

TEST_CASE("schema matching examples") {
    auto j5 = match_schema(F("<>p |> p"), SchemaName::J5);
    REQUIRE(j5.has_value());
    CHECK(j5->size() == 1);
    CHECK(j5->at("A") == F("p"));

    auto j2 = match_schema(F("(p |> q) & (q |> r) -> p |> r"), SchemaName::J2);
    REQUIRE(j2.has_value());
    CHECK(j2->at("A") == F("p"));
    CHECK(j2->at("B") == F("q"));
    CHECK(j2->at("C") == F("r"));

    CHECK_FALSE(match_schema(F("p -> q"), SchemaName::J1).has_value());
    // same metavariable bound twice must agree
    CHECK_FALSE(match_schema(F("(p |> q) & (r |> s) -> p |> s"), SchemaName::J2).has_value());
}

TEST_CASE("tautology check") {
    CHECK(is_tautology(F("p -> p")));
    CHECK(is_tautology(F("[]q | ~[]q")));
    CHECK(is_tautology(F("(p |> q) & r -> r & (p |> q)")));
    CHECK_FALSE(is_tautology(F("[]p -> p")));
    CHECK_FALSE(is_tautology(F("p |> q -> q |> p")));
    std::string big = "p0";
    for (int i = 1; i <= 21; ++i) big = "(" + big + ") | p" + std::to_string(i);
    CHECK_THROWS_AS(is_tautology(F(big)), TooManyAtoms);
}

TEST_CASE("check_proof examples") {
    ProofScript top{Logic::parse("IL"), {}, {{F("true"), AxiomStep{SchemaName::Taut}, 0}}};
    CHECK_FALSE(check_proof(top, Logic::parse("IL")).has_value());

    ProofScript p{Logic::parse("IL"), {}, {{F("p |> q -> [](p |> q)"), AxiomStep{SchemaName::P}, 0}}};
    auto err = check_proof(p, Logic::parse("IL"));
    REQUIRE(err.has_value());
    CHECK(err->step == 0);
    CHECK(err->reason.find("not in") != std::string::npos);
    CHECK_FALSE(check_proof(p, Logic::parse("ILP")).has_value());
}

TEST_CASE("rules") {
    auto script = parse_proof_script(
        "logic: IL\n"
        "hyp: p\n"
        "p -> (q -> p) ; axiom:Taut\n"
        "p ; hyp:0\n"
        "q -> p ; mp:1,0\n"
        "[](p -> (q -> p)) ; nec:0\n");
    CHECK_FALSE(check_proof(script).has_value());

    auto bad_mp = parse_proof_script("logic: IL\np -> p ; axiom:Taut\nq ; mp:0,0\n");
    auto e = check_proof(bad_mp);
    REQUIRE(e.has_value());
    CHECK(e->step == 1);
    CHECK(e->line == 3);

    auto forward = parse_proof_script("logic: IL\np -> p ; axiom:Taut\n[](p -> p) ; nec:2\n");
    REQUIRE(check_proof(forward).has_value());
    CHECK(check_proof(forward)->step == 1);

    auto nohyp = parse_proof_script("logic: IL\np ; hyp:0\n");
    REQUIRE(check_proof(nohyp).has_value());

    CHECK_THROWS_AS(parse_proof_script("logic: IL\np -> p ; axiom:Nope\n"), std::exception);
    CHECK_THROWS_AS(parse_proof_script("logic: IL\np -> p axiom:Taut\n"), ScriptSyntaxError);
}

TEST_CASE("fixture scripts prove their theorems") {
    for (const auto& g : kGoals) {
        CAPTURE(g.file);
        auto script = parse_proof_script(support::read_fixture(std::string("proofs/") + g.file));
        REQUIRE(!script.steps.empty());
        auto err = check_proof(script);
        CHECK_FALSE(err.has_value());
        CHECK(script.steps.back().formula == F(g.theorem));
    }
}

TEST_CASE("every prefix of a valid script is valid") {
    for (const auto& g : kGoals) {
        auto script = parse_proof_script(support::read_fixture(std::string("proofs/") + g.file));
        for (std::size_t k = 1; k <= script.steps.size(); ++k) {
            ProofScript prefix = script;
            prefix.steps.resize(k);
            CAPTURE(g.file);
            CAPTURE(k);
            CHECK_FALSE(check_proof(prefix).has_value());
        }
    }
}

TEST_CASE("a negated step is rejected at its own line") {
    for (const auto& g : kGoals) {
        std::string text = support::read_fixture(std::string("proofs/") + g.file);
        auto script = parse_proof_script(text);
        auto lines = split_lines(text);
        for (std::size_t k = 0; k < script.steps.size(); ++k) {
            auto copy = lines;
            std::string& line = copy[script.steps[k].line - 1];
            auto semi = line.rfind(';');
            line = "~(" + line.substr(0, semi) + ") " + line.substr(semi);
            auto err = check_proof(parse_proof_script(join_lines(copy)));
            CAPTURE(g.file);
            CAPTURE(k);
            REQUIRE(err.has_value());
            CHECK(err->step == k);
            CHECK(err->line == script.steps[k].line);
        }
    }
}

TEST_CASE("axiom instances hold on random models of their frame class") {
    Rng rng(5);
    const std::vector<std::string> vars{"p", "q", "r"};
    for (SchemaName s : all_schemas()) {
        if (s == SchemaName::Taut) continue;
        Logic logic;
        for (Principle p : all_principles())
            if (schema_name(s) == principle_name(p)) logic = Logic::with({p});
        auto tmpl = schema_template(s);
        REQUIRE(tmpl.has_value());
        CAPTURE(schema_name(s));
        CHECK(schema_in_logic(s, logic));
        for (int i = 0; i < 40; ++i) {
            auto m = random_model(rng, logic);
            Substitution sigma;
            for (const char* meta : {"A", "B", "C"}) sigma[meta] = random_formula(rng, vars, 2);
            Formula inst = substitute(*tmpl, sigma);
            CHECK(match_schema(inst, s).has_value());
            Evaluator ev(m);
            CHECK(ev.extension(inst).all());
        }
    }
}
