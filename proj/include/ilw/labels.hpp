#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <stdexcept>
#include <string>
#include <vector>

#include "ilw/decide.hpp"
#include "ilw/formula.hpp"
#include "ilw/veltman.hpp"

namespace ilw {

// Finite label, kept sorted by StructuralLess without duplicates.
using Label = std::vector<Formula>;

auto make_label(std::vector<Formula> fs) -> Label;
auto label_union(const Label& a, const Label& b) -> Label;
auto label_subset(const Label& a, const Label& b) -> bool;
auto label_text(const Label& l) -> std::string;

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ~A |> \/{~s : s in S}; the empty disjunction is false.
auto promise(Formula a, const Label& S) -> Formula;

// xRy and, for A in pool, x forcing ~A |> \/~S makes y force A and []A.
auto semantic_assuring(const OrdinaryModel& m, std::size_t x, std::size_t y, const Label& S,
                       const std::vector<Formula>& pool) -> bool;

// Modal equivalence classes of a finite model: class id per world, ids in
// order of first occurrence.
auto modal_classes(const OrdinaryModel& m) -> std::vector<std::size_t>;

// The same test over every formula, i.e. between the full theories of x and
// y. With Bad the u in R[x] whose S_x-successors all force S, this holds iff
// xRy and every world of {y} ∪ R[y] is modally equivalent to a world of Bad.
auto full_assuring(const OrdinaryModel& m, std::size_t x, std::size_t y, const Label& S) -> bool;
auto full_assuring(const OrdinaryModel& m, const std::vector<std::size_t>& classes, std::size_t x, std::size_t y,
                   const Label& S) -> bool;

// {A, []A : A in pool, x forces ~A |> \/~T}; boxset keeps the []A parts.
auto boxdotset(const OrdinaryModel& m, std::size_t x, const Label& T, const std::vector<Formula>& pool) -> Label;
auto boxset(const OrdinaryModel& m, std::size_t x, const Label& T, const std::vector<Formula>& pool) -> Label;

struct QLabelSequence {
    std::vector<std::size_t> chain;  // w_0 .. w_n
    std::vector<Label> base;         // S_1 .. S_n
    Formula pivot;
    std::vector<Label> q;  // Q_1 .. Q_n
};

// Q_1 = S_1 ∪ {[]~B}, Q_{j+1} = S_{j+1} ∪ {[]~B} ∪ boxdotset(w_j, Q_j).
auto q_labels(const OrdinaryModel& m, const std::vector<std::size_t>& chain, const std::vector<Label>& base,
              Formula pivot, const std::vector<Formula>& pool) -> QLabelSequence;

enum class LabelLemma { P, Pfull, M, M0, R, Rfull, RTrans };

auto label_lemma_name(LabelLemma l) -> std::string;
auto parse_label_lemma(std::string_view s) -> LabelLemma;
auto all_label_lemmas() -> const std::vector<LabelLemma>&;
// Frame condition the lemma relies on.
auto lemma_principle(LabelLemma l) -> Principle;

struct HarnessViolation {
    LabelLemma lemma;
    std::vector<std::size_t> chain;  // x, y[, z]
    Label S;
    Label T;
    Label conclusion;  // label of the concluded pair, or the offending set for RTrans
    std::string failure;
};

// One instance of the lemma. Premises use full_assuring; the conclusion must
// hold both over pool and over full theories. Empty when the premises fail
// or the conclusion holds.
auto check_lemma_instance(LabelLemma lemma, const OrdinaryModel& m, const std::vector<std::size_t>& classes,
                          const std::vector<std::size_t>& chain, const Label& S, const Label& T,
                          const std::vector<Formula>& pool) -> std::optional<HarnessViolation>;

struct HarnessReport {
    std::vector<HarnessViolation> violations;
    std::size_t instances = 0;  // premises held
    std::size_t vacuous = 0;    // premises failed or no chain
};

struct HarnessOptions {
    std::size_t trials = 50;
    // Refuse frames violating the lemma's condition; off for negative controls.
    bool require_condition = true;
};

auto harness_labelling(LabelLemma lemma, const OrdinaryModel& m, const std::vector<Formula>& pool, Rng& rng,
                       const HarnessOptions& opts = {}) -> HarnessReport;

// u in R[x] forcing A with full_assuring(x, u, {[]~A, ~B}); x must force ~(A |> B).
auto witness_w_probs(const OrdinaryModel& m, std::size_t x, Formula a, Formula b) -> std::optional<std::size_t>;
// x forces B |> C, full_assuring(x, lambda, S), lambda forces B: u forcing C and
// []~C with full_assuring(x, u, S ∪ {[]~B}).
auto witness_w_defies(const OrdinaryModel& m, std::size_t x, std::size_t lambda, const Label& S, Formula b,
                      Formula c) -> std::optional<std::size_t>;

// Least label within Φ containing S and closed under Γ's boxdot promises
// (Γ ⊢ ~A |> \/~S gives A, []A), bounded consequence and necessitation.
auto full_closure_phi(const PhiOracle& oracle, std::size_t gamma, const Theory& S) -> Theory;

auto theory_to_label(const AdequateSet& phi, const Theory& t) -> Label;
auto label_to_theory(const AdequateSet& phi, const Label& l) -> Theory;

}  // namespace ilw
