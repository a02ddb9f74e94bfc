#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "ilw/decide.hpp"
#include "support/support.hpp"

using namespace ilw;
using support::F;

namespace {

// Rooted frames on n worlds listed by brute force: every strict order on
// 1..n-1 under 0, every admissible S_w. Labelled, not up to isomorphism.
struct RawFrame {
    std::size_t n;
    std::vector<std::vector<bool>> R;
    std::vector<std::vector<std::vector<bool>>> S;
};

auto raw_frames(std::size_t n) -> std::vector<RawFrame> {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j)
            if (i != j) pairs.emplace_back(i, j);
    std::vector<RawFrame> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
        std::vector<std::vector<bool>> R(n, std::vector<bool>(n, false));
        for (std::size_t j = 1; j < n; ++j) R[0][j] = true;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (mask >> k & 1U) R[pairs[k].first][pairs[k].second] = true;
        bool ok = true;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    if (R[a][b] && R[b][c] && (!R[a][c] || a == c)) ok = false;
        if (!ok) continue;

        // admissible S_w per world
        std::vector<std::vector<std::vector<std::vector<bool>>>> choices(n);
        for (std::size_t w = 0; w < n; ++w) {
            std::vector<std::size_t> up;
            for (std::size_t u = 0; u < n; ++u)
                if (R[w][u]) up.push_back(u);
            std::vector<std::pair<std::size_t, std::size_t>> free;
            for (std::size_t a : up)
                for (std::size_t b : up)
                    if (a != b && !R[a][b]) free.emplace_back(a, b);
            for (std::size_t sm = 0; sm < (std::size_t{1} << free.size()); ++sm) {
                std::vector<std::vector<bool>> S(n, std::vector<bool>(n, false));
                for (std::size_t a : up)
                    for (std::size_t b : up)
                        if (a == b || R[a][b]) S[a][b] = true;
                for (std::size_t k = 0; k < free.size(); ++k)
                    if (sm >> k & 1U) S[free[k].first][free[k].second] = true;
                bool trans = true;
                for (std::size_t a : up)
                    for (std::size_t b : up)
                        for (std::size_t c : up)
                            if (S[a][b] && S[b][c] && !S[a][c]) trans = false;
                if (trans) choices[w].push_back(S);
            }
        }
        std::vector<std::size_t> pick(n, 0);
        for (;;) {
            RawFrame f{n, R, {}};
            for (std::size_t w = 0; w < n; ++w) f.S.push_back(choices[w][pick[w]]);
            out.push_back(std::move(f));
            std::size_t w = 0;
            while (w < n && ++pick[w] == choices[w].size()) pick[w++] = 0;
            if (w == n) break;
        }
    }
    return out;
}

auto to_ordinary(const RawFrame& f) -> OrdinaryModel {
    auto m = OrdinaryModel::with_size(f.n);
    for (std::size_t a = 0; a < f.n; ++a)
        for (std::size_t b = 0; b < f.n; ++b) {
            if (f.R[a][b]) m.add_r(a, b);
            for (std::size_t c = 0; c < f.n; ++c)
                if (f.S[a][b][c]) m.add_s(a, b, c);
        }
    return m;
}

// Smallest encoding over relabellings that keep 0 fixed.
auto canonical(const RawFrame& f) -> std::vector<bool> {
    std::vector<std::size_t> perm(f.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<bool> best;
    do {
        std::vector<bool> code;
        for (std::size_t a = 0; a < f.n; ++a)
            for (std::size_t b = 0; b < f.n; ++b) code.push_back(f.R[perm[a]][perm[b]]);
        for (std::size_t a = 0; a < f.n; ++a)
            for (std::size_t b = 0; b < f.n; ++b)
                for (std::size_t c = 0; c < f.n; ++c) code.push_back(f.S[perm[a]][perm[b]][perm[c]]);
        if (best.empty() || code < best) best = code;
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return best;
}

auto naive_frame_count(std::size_t n, const Logic& logic) -> std::size_t {
    std::set<std::vector<bool>> classes;
    for (const auto& f : raw_frames(n))
        if (satisfies(to_ordinary(f), logic)) classes.insert(canonical(f));
    return classes.size();
}

auto enumerated_frame_count(std::size_t n, const Logic& logic) -> std::size_t {
    std::size_t count = 0;
    enumerate_models({}, logic, n, [&](const FrameVisit& v) {
        if (v.n == n) ++count;
        return true;
    });
    return count;
}

auto naive_sat(Formula f, const Logic& logic, std::size_t bound) -> bool {
    auto vars = variables(f);
    for (std::size_t n = 1; n <= bound; ++n)
        for (const auto& raw : raw_frames(n)) {
            auto m = to_ordinary(raw);
            if (!satisfies(m, logic)) continue;
            std::size_t bits = n * vars.size();
            for (std::size_t val = 0; val < (std::size_t{1} << bits); ++val) {
                auto mv = m;
                for (std::size_t k = 0; k < vars.size(); ++k) {
                    mv.valuation[vars[k]] = mv.empty_set();
                    for (std::size_t w = 0; w < n; ++w)
                        if (val >> (k * n + w) & 1U) mv.set_true(vars[k], w);
                }
                if (support::naive_force(mv, 0, f)) return true;
            }
        }
    return false;
}

void check_countermodel(const IlwDecision& d, Formula f) {
    REQUIRE(d.result.verdict == Verdict::Countermodel);
    REQUIRE(d.result.model.has_value());
    REQUIRE(d.result.designated.has_value());
    const auto& m = *d.result.model;
    CHECK_FALSE(validate(m).has_value());
    CHECK_FALSE(check_condition(m, Principle::W).has_value());
    CHECK_FALSE(support::naive_force(m, *d.result.designated, f));
    REQUIRE(d.construction.has_value());
    CHECK_FALSE(verify_truth_lemma(*d.construction, m).has_value());
    for (std::size_t w = 0; w < m.size(); ++w) {
        for (std::size_t u = 0; u < m.size(); ++u) {
            if (!m.R[w].test(u)) {
                CHECK(m.S[w][u].none());
                continue;
            }
            CHECK(m.S[w][u].test(u));
            CHECK(m.S[w][u].is_subset_of(m.R[w]));
            CHECK((m.R[u] & m.R[w]).is_subset_of(m.S[w][u]));
            for (std::size_t v = 0; v < m.size(); ++v)
                if (m.S[w][u].test(v)) CHECK(m.S[w][v].is_subset_of(m.S[w][u]));
        }
    }
}

}  // namespace

TEST_CASE("sat_bounded examples") {
    CHECK_FALSE(sat_bounded(Formula::bot(), Logic::parse("IL"), 4).sat);

    auto d = sat_bounded(F("<>true"), Logic::parse("IL"), 2);
    REQUIRE(d.sat);
    CHECK(d.model->size() == 2);
    CHECK(force(*d.model, d.designated, F("<>true")));

    auto w = sat_bounded(F("~(p |> q -> p |> (q & []~p))"), Logic::parse("IL"), 5);
    REQUIRE(w.sat);
    CHECK(support::naive_force(*w.model, w.designated, F("~(p |> q -> p |> (q & []~p))")));
    CHECK_FALSE(validate(*w.model).has_value());
}

TEST_CASE("consistent_up_to examples") {
    CHECK_FALSE(consistent_up_to({Formula::bot()}, Logic::parse("IL"), 3));
    CHECK(consistent_up_to({F("<>true")}, Logic::parse("IL"), 2));
    CHECK_FALSE(consistent_up_to({F("<>true")}, Logic::parse("IL"), 1));
    CHECK_FALSE(consistent_up_to({F("p |> q"), F("~(p |> (q & []~p))")}, Logic::parse("ILW"), 5));
    CHECK(consistent_up_to({F("p |> q"), F("~(p |> (q & []~p))")}, Logic::parse("IL"), 5));
}

TEST_CASE("enumerator frame counts match brute force") {
    for (std::size_t n = 1; n <= 4; ++n) {
        CAPTURE(n);
        CHECK(enumerated_frame_count(n, Logic::parse("IL")) == naive_frame_count(n, Logic::parse("IL")));
    }
    CHECK(naive_frame_count(1, Logic::parse("IL")) == 1);
    CHECK(naive_frame_count(2, Logic::parse("IL")) == 1);
    CHECK(naive_frame_count(3, Logic::parse("IL")) == 5);
    CHECK(naive_frame_count(4, Logic::parse("IL")) == 51);
    for (const char* name : {"ILW", "ILP", "ILM", "ILM0", "ILR"}) {
        auto logic = Logic::parse(name);
        for (std::size_t n = 3; n <= 4; ++n) {
            CAPTURE(name);
            CAPTURE(n);
            CHECK(enumerated_frame_count(n, logic) == naive_frame_count(n, logic));
        }
    }
}

TEST_CASE("sat_bounded agrees with brute force at bound 3") {
    Rng rng(89);
    for (const char* name : {"IL", "ILW", "ILP"}) {
        auto logic = Logic::parse(name);
        for (int i = 0; i < 40; ++i) {
            Formula f = random_formula(rng, {"p", "q"}, 3);
            CAPTURE(print(f));
            CHECK(sat_bounded(f, logic, 3).sat == naive_sat(f, logic, 3));
        }
    }
}

TEST_CASE("enumerated theories match forcing") {
    auto L = subformulas(F("(p |> []q) -> <>(p & ~q)"));
    std::size_t visits = 0;
    enumerate_models(L, Logic::parse("IL"), 3, [&](const FrameVisit& v) {
        auto m = to_model(v);
        CHECK_FALSE(validate(m).has_value());
        for (std::size_t w = 0; w < v.n; ++w)
            for (std::size_t k = 0; k < L.size(); ++k) CHECK(v.theories[w][k] == support::naive_force(m, w, L[k]));
        ++visits;
        return true;
    });
    CHECK(visits > 0);
}

TEST_CASE("search ceiling") {
    CHECK_THROWS_AS(sat_bounded(F("p"), Logic::parse("IL"), search_ceiling() + 1), CeilingExceeded);
}

TEST_CASE("phi_assuring") {
    auto phi = adequate_set(F("p |> q"));
    auto oracle = PhiOracle::build(phi, Logic::parse("ILW"), 3);
    const auto& mcs = oracle.mcs();
    REQUIRE(!mcs.empty());
    for (std::size_t g = 0; g < mcs.size(); ++g) {
        CHECK_FALSE(phi_assuring(oracle, g, Theory{}, g));
        for (std::size_t d = 0; d < mcs.size(); ++d) {
            // empty label: boxes of Γ pass up with their boxes, plus a new box
            bool plain = false;
            bool ok = true;
            for (std::size_t b : phi.boxed) {
                std::size_t inner = phi.position(phi.formulas[b].inner());
                if (mcs[g][b] && !(mcs[d][inner] && mcs[d][b])) ok = false;
                if (mcs[d][b] && !mcs[g][b]) plain = true;
            }
            CHECK(phi_assuring(oracle, g, Theory{}, d) == (ok && plain));
        }
    }
}

TEST_CASE("finite witnesses satisfy their labels") {
    Formula f = F("~(p |> q) & (q |> p)");
    auto phi = adequate_set(f);
    auto oracle = PhiOracle::build(phi, Logic::parse("ILW"), 3);
    const auto& mcs = oracle.mcs();
    std::size_t checked = 0;
    for (std::size_t g = 0; g < mcs.size(); ++g)
        for (std::size_t r : phi.rhd) {
            std::size_t a = phi.position(phi.formulas[r].left());
            std::size_t b = phi.position(phi.formulas[r].right());
            if (mcs[g][r]) continue;
            auto d = witness_wfin_probs(oracle, g, a, b);
            REQUIRE(d.has_value());
            CHECK(mcs[*d][a]);
            Theory label;
            label.set(phi.negation[b]);
            label.set(phi.position(Formula::box(single_negation(phi.formulas[a]))));
            CHECK(phi_assuring(oracle, g, label, *d));
            ++checked;
        }
    CHECK(checked > 0);
}

TEST_CASE("ilw_decide examples") {
    auto loeb = ilw_decide(F("[]([]p -> p) -> []p"), 4);
    CHECK(loeb.result.verdict == Verdict::ProvableUpToBound);

    Formula dt = F("<>true");
    auto d = ilw_decide(dt, 4);
    check_countermodel(d, dt);
    CHECK(d.result.model->size() == 1);
    CHECK(d.result.model->R[0].none());

    auto w = ilw_decide(F("p |> q -> p |> (q & []~p)"), 4);
    CHECK(w.result.verdict == Verdict::ProvableUpToBound);
}

TEST_CASE("ilw_decide agrees with search and yields sound countermodels") {
    const char* formulas[] = {"p -> []p",          "[]p -> p",          "<>p",
                              "p |> q",            "p |> q -> [](p |> q)", "p |> q -> p & []r |> q & []r",
                              "<>p -> []<>p",      "p |> q -> q |> p",  "[]p | []~p",
                              "<><>true",          "true |> p",         "~(p |> false)",
                              "(p |> q) & (q |> r) -> p |> r", "p |> <>p -> []~p", "[]<>p -> []false"};
    for (const char* s : formulas) {
        Formula f = F(s);
        CAPTURE(s);
        auto d = ilw_decide(f, 4);
        auto b = decide_bounded(f, Logic::parse("ILW"), 4);
        CHECK(d.result.verdict == b.verdict);
        if (d.result.verdict == Verdict::Countermodel) check_countermodel(d, f);
    }
}

TEST_CASE("truth lemma catches a corrupted valuation") {
    Formula f = F("p |> q -> q |> p");
    auto d = ilw_decide(f, 4);
    REQUIRE(d.result.verdict == Verdict::Countermodel);
    auto m = *d.result.model;
    REQUIRE_FALSE(verify_truth_lemma(*d.construction, m).has_value());
    m.valuation["p"].flip(*d.result.designated == 0 ? 1 : 0);
    auto fail = verify_truth_lemma(*d.construction, m);
    REQUIRE(fail.has_value());
    CHECK(fail->world < m.size());
}

TEST_CASE("verdicts are monotone in the bound") {
    const char* formulas[] = {"p |> q -> [](p |> q)", "p |> q -> q |> p", "<><><>true", "[]p -> p",
                              "p |> q -> p & []r |> q & []r"};
    for (const char* s : formulas) {
        bool found = false;
        for (std::size_t b = 1; b <= 4; ++b) {
            auto v = decide_bounded(F(s), Logic::parse("ILW"), b).verdict;
            CAPTURE(s);
            CAPTURE(b);
            if (found) CHECK(v == Verdict::Countermodel);
            found = found || v == Verdict::Countermodel;
        }
        CHECK(found);
    }
}

TEST_CASE("search countermodels falsify their formula") {
    Rng rng(97);
    for (int i = 0; i < 40; ++i) {
        Formula f = random_formula(rng, {"p", "q"}, 3);
        auto r = decide_bounded(f, Logic::parse("ILW"), 3);
        if (r.verdict != Verdict::Countermodel) continue;
        CHECK_FALSE(validate(*r.model).has_value());
        CHECK(satisfies(*r.model, Logic::parse("ILW")));
        CHECK_FALSE(support::naive_force(*r.model, *r.designated, f));
    }
}
