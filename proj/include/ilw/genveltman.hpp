#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ilw/veltman.hpp"

namespace ilw {

struct SEntry {
    std::size_t u;
    WorldSet V;
};

// Generalised model; S[w] lists generators of the monotone relation
// Ŝ_w = {(u, V) : some listed (u, V0) has V0 ⊆ V ⊆ R[w]}.
struct GeneralisedModel {
    std::vector<std::string> worlds;
    std::vector<WorldSet> R;
    std::vector<std::vector<SEntry>> S;
    std::map<std::string, WorldSet> valuation;

    static auto with_worlds(std::vector<std::string> names) -> GeneralisedModel;
    static auto with_size(std::size_t n) -> GeneralisedModel;

    auto size() const -> std::size_t { return worlds.size(); }
    auto world(std::string_view name) const -> std::size_t;
    auto set_of(std::initializer_list<std::size_t> ws) const -> WorldSet;
    void add_r(std::size_t u, std::size_t v) { R[u].set(v); }
    // Ignores entries already listed.
    void add_s(std::size_t w, std::size_t u, const WorldSet& V);
    void set_true(const std::string& var, std::size_t w);

    // uŜ_wV
    auto related(std::size_t w, std::size_t u, const WorldSet& V) const -> bool;
};

// Seeds quasi-reflexive and clause-d entries, then closes under
// quasi-transitivity over listed entries. R is transitively closed first.
void close_frame(GeneralisedModel& m);

auto validate_gen(const GeneralisedModel& m) -> std::optional<Violation>;

class GenEvaluator {
public:
    explicit GenEvaluator(const GeneralisedModel& m) : m_(m) {}
    auto extension(Formula f) -> const WorldSet&;
    auto forces(std::size_t w, Formula f) -> bool { return extension(f).test(w); }

private:
    const GeneralisedModel& m_;
    std::unordered_map<Formula, WorldSet> memo_;
};

auto force_gen(const GeneralisedModel& m, std::size_t w, Formula f) -> bool;
auto force_gen(const GeneralisedModel& m, std::string_view w, Formula f) -> bool;

struct GenCounterexample {
    std::vector<std::size_t> worlds;
    WorldSet V;
};

auto check_gen_P(const GeneralisedModel& m) -> std::optional<GenCounterexample>;

struct GenWOptions {
    // Also quantify over every superset V of a generator inside R[w].
    bool strict = false;
    // Strict mode gives up on R[w] larger than this.
    std::size_t max_successors = 16;
};

auto check_gen_W(const GeneralisedModel& m, const GenWOptions& opts = {}) -> std::optional<GenCounterexample>;

// Listed generators replaced by the full monotone closure; only for small
// frames.
auto monotone_closure(const GeneralisedModel& m, std::size_t max_successors = 12) -> GeneralisedModel;

// Ordinary model viewed as generalised: u S_w v becomes (u, {v}).
auto as_generalised(const OrdinaryModel& m) -> GeneralisedModel;

struct RandomGenOptions {
    std::size_t min_worlds = 1;
    std::size_t max_worlds = 5;
    std::vector<std::string> vars{"p", "q"};
    double r_density = 0.5;
    std::size_t extra_entries = 3;
    std::size_t attempts = 40;
};

enum class GenCondition { None, P, W };

auto random_gen_model(Rng& rng, GenCondition cond, const RandomGenOptions& opts = {}) -> GeneralisedModel;

}  // namespace ilw
