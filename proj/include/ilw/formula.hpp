#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ilw {

enum class Kind : unsigned char { Bot, Var, Implies, Box, Rhd };

struct Node;

// Interned formula handle. Two handles are equal iff the formulas are
// structurally equal, so comparison and hashing are pointer operations.
class Formula {
public:
    Formula();

    static auto bot() -> Formula;
    static auto var(std::string_view name) -> Formula;
    static auto implies(Formula a, Formula b) -> Formula;
    static auto box(Formula a) -> Formula;
    static auto rhd(Formula a, Formula b) -> Formula;

    // Abbreviations, expanded on construction.
    static auto neg(Formula a) -> Formula;
    static auto top() -> Formula;
    static auto dia(Formula a) -> Formula;
    static auto conj(Formula a, Formula b) -> Formula;
    static auto disj(Formula a, Formula b) -> Formula;
    static auto boxdot(Formula a) -> Formula;

    auto kind() const -> Kind;
    auto name() const -> const std::string&;
    auto left() const -> Formula;
    auto right() const -> Formula;
    auto inner() const -> Formula { return left(); }
    auto size() const -> std::size_t;
    auto text() const -> const std::string&;
    auto id() const -> std::size_t;

    auto is_bot() const -> bool { return kind() == Kind::Bot; }
    auto is_var() const -> bool { return kind() == Kind::Var; }
    auto is_implies() const -> bool { return kind() == Kind::Implies; }
    auto is_box() const -> bool { return kind() == Kind::Box; }
    auto is_rhd() const -> bool { return kind() == Kind::Rhd; }
    // A -> false
    auto is_negation() const -> bool;

    friend auto operator==(Formula a, Formula b) -> bool { return a.node_ == b.node_; }
    friend auto operator!=(Formula a, Formula b) -> bool { return a.node_ != b.node_; }

private:
    explicit Formula(const Node* n) : node_(n) {}
    const Node* node_;
    friend struct Interner;
};

// Size first, then printed text. Total and deterministic.
struct StructuralLess {
    auto operator()(Formula a, Formula b) const -> bool;
};

// Negation with double negations collapsed: ~~A is never produced.
auto single_negation(Formula f) -> Formula;

// Disjunction of the given formulas; the empty disjunction is false.
auto big_or(const std::vector<Formula>& fs) -> Formula;
auto big_and(const std::vector<Formula>& fs) -> Formula;

struct ParseError : std::runtime_error {
    ParseError(std::size_t pos, const std::string& what);
    std::size_t position;
};

auto parse(std::string_view text) -> Formula;
auto print(Formula f) -> std::string;

// Reflexive-transitive subterms, ordered by StructuralLess.
auto subformulas(Formula f) -> std::vector<Formula>;
auto variables(Formula f) -> std::vector<std::string>;
auto modal_depth(Formula f) -> std::size_t;

// Uniform substitution of variables.
auto substitute(Formula f, const std::unordered_map<std::string, Formula>& sigma) -> Formula;

}  // namespace ilw

template <>
struct std::hash<ilw::Formula> {
    auto operator()(ilw::Formula f) const noexcept -> std::size_t { return f.id(); }
};

namespace ilw {

// Finite formula universe closed under the adequacy rules, with a fixed
// index per member.
struct AdequateSet {
    std::vector<Formula> formulas;
    std::unordered_map<Formula, std::size_t> index;
    std::vector<std::size_t> boxed;  // positions of []-formulas
    std::vector<std::size_t> rhd;    // positions of |>-formulas
    std::vector<std::size_t> negation;  // position of single_negation(formulas[i])

    auto size() const -> std::size_t { return formulas.size(); }
    auto contains(Formula f) const -> bool { return index.count(f) != 0; }
    auto position(Formula f) const -> std::size_t;
    auto find(Formula f) const -> std::optional<std::size_t>;
};

auto adequate_set(Formula f) -> AdequateSet;
auto adequate_set(const std::vector<Formula>& seeds) -> AdequateSet;

// Antecedents and consequents of the |>-formulas among fs.
auto rhd_pool(const std::vector<Formula>& fs) -> std::vector<Formula>;

// Empty when every adequacy invariant holds, else a description of the
// first failure.
auto adequate_set_violation(const AdequateSet& phi) -> std::optional<std::string>;

}  // namespace ilw
