#pragma once

#include <bitset>
#include <cstdint>
#include <memory>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ilw/formula.hpp"
#include "ilw/logic.hpp"
#include "ilw/veltman.hpp"

namespace ilw {

constexpr std::size_t kMaxPhi = 256;
// Membership vector over an AdequateSet or another indexed formula list.
using Theory = std::bitset<kMaxPhi>;

struct CeilingExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Largest world count the enumerator accepts; VELTMAN_CEILING overrides.
auto search_ceiling() -> std::size_t;

// Rooted frames up to max_worlds are enumerated in a fixed order: world
// count ascending, then R on worlds 1..n-1 as a naturally labelled strict
// order (i R j only if i < j) built from the last world down, then each
// S_i over its successors. World 0 sees every other world. Only one
// labelling per isomorphism class of the whole frame is visited.
struct FrameVisit {
    std::size_t n;
    const std::vector<std::uint32_t>& R;               // R[i] as bitmask
    const std::vector<std::vector<std::uint32_t>>& S;  // S[i][u] as bitmask
    const std::vector<Theory>& theories;               // per world
    const std::vector<std::uint32_t>& valuation;       // per world, bit k = vars[k]
    const std::vector<std::string>& vars;
};

// Model named w0..w{n-1} for a visited frame.
auto to_model(const FrameVisit& v) -> OrdinaryModel;

// Visits every (frame, valuation) over worlds of the logic's frame class,
// with the theory of each world over the formula list. formulas must list
// subformulas before their superformulas. The visitor returns false to
// stop. Returns false iff stopped early.
auto enumerate_models(const std::vector<Formula>& formulas, const Logic& logic, std::size_t max_worlds,
                      const std::function<bool(const FrameVisit&)>& visit) -> bool;

struct SatResult {
    bool sat = false;
    std::optional<OrdinaryModel> model;
    std::size_t designated = 0;
    std::size_t bound = 0;
};

// First rooted model, in enumeration order, forcing f at its root.
auto sat_bounded(Formula f, const Logic& logic, std::size_t max_worlds) -> SatResult;

// Bounded consistency of a finite set: its conjunction is satisfiable.
auto consistent_up_to(const std::vector<Formula>& fs, const Logic& logic, std::size_t bound) -> bool;

enum class Verdict { ProvableUpToBound, Countermodel };

auto verdict_name(Verdict v) -> std::string;

struct DecisionResult {
    Verdict verdict = Verdict::ProvableUpToBound;
    std::optional<OrdinaryModel> model;
    std::optional<std::size_t> designated;
    std::size_t bound = 0;
    std::string logic;
};

// Countermodel iff the negation is satisfiable within the bound.
auto decide_bounded(Formula f, const Logic& logic, std::size_t bound) -> DecisionResult;

// Provability and consistency relative to Φ, read off every rooted model of
// the logic up to the bound. A Φ-MCS is consistent iff some world realises
// it. Γ ⊢ A |> \/{~s : s in S} iff it holds at every world realising Γ.
class PhiOracle {
public:
    static auto build(const AdequateSet& phi, const Logic& logic, std::size_t bound) -> PhiOracle;

    auto phi() const -> const AdequateSet& { return *phi_; }
    auto bound() const -> std::size_t { return bound_; }
    auto logic() const -> const Logic& { return logic_; }
    // Realised Φ-MCSs in a fixed order.
    auto mcs() const -> const std::vector<Theory>& { return mcs_; }
    auto mcs_index(const Theory& t) const -> std::optional<std::size_t>;

    // Γ ⊢ A |> \/{~s : s in S}, Γ given by its position in mcs().
    auto proves_rhd(std::size_t gamma, std::size_t a, const Theory& S) const -> bool;
    // Every realised MCS containing premises contains f.
    auto entails(const Theory& premises, std::size_t f) const -> bool;

private:
    struct Pair {
        Theory here;    // theory of an R-successor u
        Theory common;  // members shared by every S-successor of u
    };
    std::shared_ptr<const AdequateSet> phi_;
    Logic logic_;
    std::size_t bound_ = 0;
    std::vector<Theory> mcs_;
    std::vector<std::vector<Pair>> pairs_;
    std::unordered_map<Theory, std::size_t> index_;
};

// Γ ≺^Φ_S Δ: for every []X in Φ, Γ ⊢ ~X |> \/~S forces X, []X into Δ,
// every []-formula of S is in Δ, and some []C of Δ is missing from Γ.
auto phi_assuring(const PhiOracle& oracle, std::size_t gamma, const Theory& S, std::size_t delta) -> bool;

// Witnesses from the finite existence lemmas; positions in oracle.mcs().
// probs: ~(A |> B) in Γ; Δ contains A and Γ ≺^Φ_{~B, []~A} Δ.
auto witness_wfin_probs(const PhiOracle& oracle, std::size_t gamma, std::size_t a, std::size_t b)
    -> std::optional<std::size_t>;
// defies: A |> B in Γ, Γ ≺^Φ_S Δ, A in Δ; Δ' contains B and Γ ≺^Φ_{S ∪ {[]~A}} Δ'.
auto witness_wfin_defies(const PhiOracle& oracle, std::size_t gamma, const Theory& S, std::size_t a, std::size_t b)
    -> std::optional<std::size_t>;

struct DecideError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IlwWorld {
    std::vector<Theory> sigma;
    std::size_t theory;  // position in oracle.mcs()
};

struct IlwConstruction {
    std::shared_ptr<const PhiOracle> oracle;
    std::vector<IlwWorld> worlds;
    OrdinaryModel model;
    std::size_t root = 0;
};

// Lazily materialised finite model over ⟨σ, Δ⟩ pairs, rooted at Γ.
auto build_ilw_model(std::shared_ptr<const PhiOracle> oracle, std::size_t gamma) -> IlwConstruction;

struct TruthFailure {
    std::size_t world;
    Formula formula;
    bool member;
};

// Membership in each world's theory agrees with forcing, over all of Φ.
auto verify_truth_lemma(const IlwConstruction& c) -> std::optional<TruthFailure>;
auto verify_truth_lemma(const IlwConstruction& c, const OrdinaryModel& m) -> std::optional<TruthFailure>;

// On a countermodel the model lives in result.model; construction keeps the
// worlds and oracle with an empty model.
struct IlwDecision {
    DecisionResult result;
    std::optional<IlwConstruction> construction;
};

auto ilw_decide(Formula g, std::size_t bound) -> IlwDecision;

}  // namespace ilw
