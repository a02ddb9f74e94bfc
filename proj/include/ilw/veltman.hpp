#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "ilw/formula.hpp"
#include "ilw/logic.hpp"

namespace ilw {

using WorldSet = boost::dynamic_bitset<>;
using Rng = std::mt19937_64;

struct UnknownWorld : std::out_of_range {
    explicit UnknownWorld(const std::string& w) : std::out_of_range("unknown world '" + w + "'") {}
};

struct OrdinaryModel {
    std::vector<std::string> worlds;
    std::vector<WorldSet> R;               // R[w] = successors of w
    std::vector<std::vector<WorldSet>> S;  // S[w][u] = {v : u S_w v}
    std::map<std::string, WorldSet> valuation;

    static auto with_worlds(std::vector<std::string> names) -> OrdinaryModel;
    // Worlds named "0", "1", ...
    static auto with_size(std::size_t n) -> OrdinaryModel;

    auto size() const -> std::size_t { return worlds.size(); }
    auto world(std::string_view name) const -> std::size_t;
    void add_r(std::size_t u, std::size_t v) { R[u].set(v); }
    void add_s(std::size_t w, std::size_t u, std::size_t v) { S[w][u].set(v); }
    void set_true(const std::string& var, std::size_t w);
    auto empty_set() const -> WorldSet { return WorldSet(size()); }
};

// Adds the mandatory S-pairs (reflexive on R[w], R inside R[w]) and closes
// every S_w transitively. R is closed transitively first.
void close_frame(OrdinaryModel& m);

struct Violation {
    std::string clause;
    std::vector<std::string> witness;
    auto message() const -> std::string;
};

auto validate(const OrdinaryModel& m) -> std::optional<Violation>;

// Extensions of formulas, memoised per model.
class Evaluator {
public:
    explicit Evaluator(const OrdinaryModel& m) : m_(m) {}
    auto extension(Formula f) -> const WorldSet&;
    auto forces(std::size_t w, Formula f) -> bool { return extension(f).test(w); }

private:
    const OrdinaryModel& m_;
    std::unordered_map<Formula, WorldSet> memo_;
};

auto force(const OrdinaryModel& m, std::size_t w, Formula f) -> bool;
auto force(const OrdinaryModel& m, std::string_view w, Formula f) -> bool;

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::size_t kFrameValidityCap = 24;

// Every world under every valuation of vars; other variables are false.
auto valid_on_frame(const OrdinaryModel& frame, Formula f, const std::vector<std::string>& vars,
                    std::size_t cap = kFrameValidityCap) -> bool;
// Randomised variant for frames beyond the exhaustive cap.
auto valid_on_frame_sampled(const OrdinaryModel& frame, Formula f, const std::vector<std::string>& vars,
                            std::size_t samples, Rng& rng) -> bool;

// Counterexample tuple, in the order of the condition's quantifiers.
// For W: the world w followed by a cycle of the composed relation.
auto check_condition(const OrdinaryModel& m, Principle p) -> std::optional<std::vector<std::size_t>>;
auto satisfies(const OrdinaryModel& m, const Logic& logic) -> bool;

struct RandomModelOptions {
    std::size_t min_worlds = 1;
    std::size_t max_worlds = 6;
    std::vector<std::string> vars{"p", "q", "r"};
    double r_density = 0.5;
    double s_density = 0.3;
    std::size_t attempts = 40;
};

// Random model whose frame satisfies the conditions of logic. World 0 is
// not necessarily a root. Extra S-pairs are thinned on rejection; the
// minimal S always satisfies every condition so generation terminates.
auto random_model(Rng& rng, const Logic& logic, const RandomModelOptions& opts = {}) -> OrdinaryModel;

// Random formula over vars with at most the given depth of connectives.
auto random_formula(Rng& rng, const std::vector<std::string>& vars, std::size_t depth) -> Formula;

// The set of formulas from pool forced at w.
auto theory(const OrdinaryModel& m, std::size_t w, const std::vector<Formula>& pool) -> std::vector<Formula>;

}  // namespace ilw
