#include "ilw/proofcheck.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ilw {

auto schema_name(SchemaName s) -> std::string_view {
    switch (s) {
    case SchemaName::Taut: return "Taut";
    case SchemaName::K: return "K";
    case SchemaName::L: return "L";
    case SchemaName::J1: return "J1";
    case SchemaName::J2: return "J2";
    case SchemaName::J3: return "J3";
    case SchemaName::J4: return "J4";
    case SchemaName::J5: return "J5";
    case SchemaName::W: return "W";
    case SchemaName::M: return "M";
    case SchemaName::P: return "P";
    case SchemaName::M0: return "M0";
    case SchemaName::R: return "R";
    }
    return "?";
}

auto all_schemas() -> const std::vector<SchemaName>& {
    static const std::vector<SchemaName> all{SchemaName::Taut, SchemaName::K,  SchemaName::L,  SchemaName::J1,
                                             SchemaName::J2,   SchemaName::J3, SchemaName::J4, SchemaName::J5,
                                             SchemaName::W,    SchemaName::M,  SchemaName::P,  SchemaName::M0,
                                             SchemaName::R};
    return all;
}

auto parse_schema_name(std::string_view s) -> SchemaName {
    for (SchemaName n : all_schemas())
        if (schema_name(n) == s) return n;
    throw std::invalid_argument("unknown schema '" + std::string(s) + "'");
}

auto schema_template(SchemaName s) -> std::optional<Formula> {
    static const std::unordered_map<int, Formula> templates = [] {
        std::unordered_map<int, Formula> t;
        auto put = [&](SchemaName n, const char* text) { t.emplace(static_cast<int>(n), parse(text)); };
        put(SchemaName::K, "[](A -> B) -> ([]A -> []B)");
        put(SchemaName::L, "[]([]A -> A) -> []A");
        put(SchemaName::J1, "[](A -> B) -> A |> B");
        put(SchemaName::J2, "(A |> B) & (B |> C) -> A |> C");
        put(SchemaName::J3, "(A |> C) & (B |> C) -> (A | B) |> C");
        put(SchemaName::J4, "A |> B -> (<>A -> <>B)");
        put(SchemaName::J5, "<>A |> A");
        put(SchemaName::W, "A |> B -> A |> B & []~A");
        put(SchemaName::M, "A |> B -> A & []C |> B & []C");
        put(SchemaName::P, "A |> B -> [](A |> B)");
        put(SchemaName::M0, "A |> B -> <>A & []C |> B & []C");
        put(SchemaName::R, "A |> B -> ~(A |> ~C) |> B & []C");
        return t;
    }();
    auto it = templates.find(static_cast<int>(s));
    if (it == templates.end()) return std::nullopt;
    return it->second;
}

auto schema_in_logic(SchemaName s, const Logic& logic) -> bool {
    switch (s) {
    case SchemaName::W: return logic.has(Principle::W);
    case SchemaName::M: return logic.has(Principle::M);
    case SchemaName::P: return logic.has(Principle::P);
    case SchemaName::M0: return logic.has(Principle::M0);
    case SchemaName::R: return logic.has(Principle::R);
    default: return true;
    }
}

namespace {

void collect_atoms(Formula f, std::vector<Formula>& atoms) {
    if (f.is_bot()) return;
    if (f.is_implies()) {
        collect_atoms(f.left(), atoms);
        collect_atoms(f.right(), atoms);
        return;
    }
    if (std::find(atoms.begin(), atoms.end(), f) == atoms.end()) atoms.push_back(f);
}

auto truth(Formula f, const std::vector<Formula>& atoms, std::uint32_t row) -> bool {
    if (f.is_bot()) return false;
    if (f.is_implies()) return !truth(f.left(), atoms, row) || truth(f.right(), atoms, row);
    auto pos = std::find(atoms.begin(), atoms.end(), f) - atoms.begin();
    return (row >> pos) & 1U;
}

auto bind(Formula tmpl, Formula f, Substitution& sigma) -> bool {
    if (tmpl.is_var()) {
        auto [it, fresh] = sigma.emplace(tmpl.name(), f);
        return fresh || it->second == f;
    }
    if (tmpl.kind() != f.kind()) return false;
    switch (tmpl.kind()) {
    case Kind::Bot: return true;
    case Kind::Box: return bind(tmpl.inner(), f.inner(), sigma);
    case Kind::Implies:
    case Kind::Rhd: return bind(tmpl.left(), f.left(), sigma) && bind(tmpl.right(), f.right(), sigma);
    default: return false;
    }
}

}  // namespace

auto is_tautology(Formula f, std::size_t cap) -> bool {
    std::vector<Formula> atoms;
    collect_atoms(f, atoms);
    if (atoms.size() > cap)
        throw TooManyAtoms("tautology check over " + std::to_string(atoms.size()) + " atoms exceeds cap " +
                           std::to_string(cap));
    for (std::uint32_t row = 0; row < (std::uint32_t{1} << atoms.size()); ++row)
        if (!truth(f, atoms, row)) return false;
    return true;
}

auto match_template(Formula tmpl, Formula f) -> std::optional<Substitution> {
    Substitution sigma;
    if (!bind(tmpl, f, sigma)) return std::nullopt;
    return sigma;
}

auto match_schema(Formula f, SchemaName s) -> std::optional<Substitution> {
    if (s == SchemaName::Taut) {
        if (is_tautology(f)) return Substitution{};
        return std::nullopt;
    }
    return match_template(*schema_template(s), f);
}

auto check_proof(const ProofScript& script, const Logic& logic) -> std::optional<ProofError> {
    const auto& steps = script.steps;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const ProofStep& st = steps[i];
        auto fail = [&](std::string reason) { return ProofError{i, st.line, std::move(reason)}; };
        auto earlier = [&](std::size_t k) { return k < i; };

        if (const auto* ax = std::get_if<AxiomStep>(&st.why)) {
            if (!schema_in_logic(ax->schema, logic))
                return fail("schema " + std::string(schema_name(ax->schema)) + " not in logic " + logic.name());
            bool ok = false;
            try {
                ok = match_schema(st.formula, ax->schema).has_value();
            } catch (const TooManyAtoms& e) {
                return fail(e.what());
            }
            if (!ok) return fail("not an instance of " + std::string(schema_name(ax->schema)));
        } else if (const auto* h = std::get_if<HypStep>(&st.why)) {
            if (h->index >= script.hypotheses.size()) return fail("bad reference: no hypothesis " + std::to_string(h->index));
            if (script.hypotheses[h->index] != st.formula) return fail("formula differs from hypothesis");
        } else if (const auto* mp = std::get_if<MPStep>(&st.why)) {
            if (!earlier(mp->minor) || !earlier(mp->major)) return fail("bad reference in mp");
            Formula expected = Formula::implies(steps[mp->minor].formula, st.formula);
            if (steps[mp->major].formula != expected)
                return fail("mp shape violation: step " + std::to_string(mp->major) + " is not step " +
                            std::to_string(mp->minor) + " -> current");
        } else if (const auto* nec = std::get_if<NecStep>(&st.why)) {
            if (!earlier(nec->premise)) return fail("bad reference in nec");
            if (st.formula != Formula::box(steps[nec->premise].formula))
                return fail("nec shape violation: current is not [] of step " + std::to_string(nec->premise));
        }
    }
    return std::nullopt;
}

auto check_proof(const ProofScript& script) -> std::optional<ProofError> { return check_proof(script, script.logic); }

ScriptSyntaxError::ScriptSyntaxError(std::size_t l, const std::string& what)
    : std::runtime_error("line " + std::to_string(l) + ": " + what), line(l) {}

namespace {

auto trim(std::string_view s) -> std::string_view {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

auto parse_index(std::string_view s, std::size_t line) -> std::size_t {
    s = trim(s);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ScriptSyntaxError(line, "expected a step index, got '" + std::string(s) + "'");
    return std::stoul(std::string(s));
}

auto parse_justification(std::string_view s, std::size_t line) -> Justification {
    s = trim(s);
    auto colon = s.find(':');
    if (colon == std::string_view::npos) throw ScriptSyntaxError(line, "justification needs 'kind:args'");
    auto kind = trim(s.substr(0, colon));
    auto args = trim(s.substr(colon + 1));
    if (kind == "axiom") {
        try {
            return AxiomStep{parse_schema_name(args)};
        } catch (const std::invalid_argument& e) {
            throw ScriptSyntaxError(line, e.what());
        }
    }
    if (kind == "hyp") return HypStep{parse_index(args, line)};
    if (kind == "nec") return NecStep{parse_index(args, line)};
    if (kind == "mp") {
        auto comma = args.find(',');
        if (comma == std::string_view::npos) throw ScriptSyntaxError(line, "mp needs two indices");
        return MPStep{parse_index(args.substr(0, comma), line), parse_index(args.substr(comma + 1), line)};
    }
    throw ScriptSyntaxError(line, "unknown justification '" + std::string(kind) + "'");
}

auto parse_formula_at(std::string_view s, std::size_t line) -> Formula {
    try {
        return parse(s);
    } catch (const ParseError& e) {
        throw ScriptSyntaxError(line, e.what());
    }
}

}  // namespace

auto parse_proof_script(std::string_view text) -> ProofScript {
    ProofScript script;
    bool have_logic = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.substr(0, 6) == "logic:") {
            try {
                script.logic = Logic::parse(trim(s.substr(6)));
            } catch (const std::invalid_argument& e) {
                throw ScriptSyntaxError(line, e.what());
            }
            have_logic = true;
            continue;
        }
        if (s.substr(0, 4) == "hyp:" && s.find(';') == std::string_view::npos) {
            script.hypotheses.push_back(parse_formula_at(s.substr(4), line));
            continue;
        }
        auto semi = s.rfind(';');
        if (semi == std::string_view::npos) throw ScriptSyntaxError(line, "step needs 'FORMULA ; justification'");
        script.steps.push_back({parse_formula_at(s.substr(0, semi), line), parse_justification(s.substr(semi + 1), line), line});
    }
    if (!have_logic) throw ScriptSyntaxError(line, "missing 'logic:' header");
    return script;
}

}  // namespace ilw
