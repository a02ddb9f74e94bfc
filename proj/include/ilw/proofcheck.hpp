#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ilw/formula.hpp"
#include "ilw/logic.hpp"

namespace ilw {

enum class SchemaName { Taut, K, L, J1, J2, J3, J4, J5, W, M, P, M0, R };

auto schema_name(SchemaName s) -> std::string_view;
auto parse_schema_name(std::string_view s) -> SchemaName;
auto all_schemas() -> const std::vector<SchemaName>&;

// Template over metavariables A, B, C; Taut has none.
auto schema_template(SchemaName s) -> std::optional<Formula>;
auto schema_in_logic(SchemaName s, const Logic& logic) -> bool;

using Substitution = std::unordered_map<std::string, Formula>;

struct TooManyAtoms : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::size_t kTautologyAtomCap = 20;

// Truth-table check with maximal [] and |> subformulas as atoms.
auto is_tautology(Formula f, std::size_t cap = kTautologyAtomCap) -> bool;

auto match_template(Formula tmpl, Formula f) -> std::optional<Substitution>;
auto match_schema(Formula f, SchemaName s) -> std::optional<Substitution>;

struct AxiomStep {
    SchemaName schema;
};
struct HypStep {
    std::size_t index;
};
struct MPStep {
    std::size_t minor;  // A
    std::size_t major;  // A -> current
};
struct NecStep {
    std::size_t premise;
};
using Justification = std::variant<AxiomStep, HypStep, MPStep, NecStep>;

struct ProofStep {
    Formula formula;
    Justification why;
    std::size_t line = 0;  // source line, 1-based; 0 when built in code
};

struct ProofScript {
    Logic logic;
    std::vector<Formula> hypotheses;
    std::vector<ProofStep> steps;
};

struct ProofError {
    std::size_t step;
    std::size_t line;
    std::string reason;
};

auto check_proof(const ProofScript& script, const Logic& logic) -> std::optional<ProofError>;
auto check_proof(const ProofScript& script) -> std::optional<ProofError>;

struct ScriptSyntaxError : std::runtime_error {
    ScriptSyntaxError(std::size_t line, const std::string& what);
    std::size_t line;
};

// Text format: "logic: NAME" header, optional "hyp: FORMULA" lines, then
// one "FORMULA ; justification" per step. '#' starts a comment.
auto parse_proof_script(std::string_view text) -> ProofScript;

}  // namespace ilw
