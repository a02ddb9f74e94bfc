#include "ilw/veltman.hpp"

#include <algorithm>
#include <functional>

namespace ilw {

auto OrdinaryModel::with_worlds(std::vector<std::string> names) -> OrdinaryModel {
    OrdinaryModel m;
    const std::size_t n = names.size();
    m.worlds = std::move(names);
    m.R.assign(n, WorldSet(n));
    m.S.assign(n, std::vector<WorldSet>(n, WorldSet(n)));
    return m;
}

auto OrdinaryModel::with_size(std::size_t n) -> OrdinaryModel {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return with_worlds(std::move(names));
}

auto OrdinaryModel::world(std::string_view name) const -> std::size_t {
    for (std::size_t i = 0; i < worlds.size(); ++i)
        if (worlds[i] == name) return i;
    throw UnknownWorld(std::string(name));
}

void OrdinaryModel::set_true(const std::string& var, std::size_t w) {
    auto [it, _] = valuation.try_emplace(var, WorldSet(size()));
    it->second.set(w);
}

namespace {

// Warshall closure of a relation given as rows.
void transitive_close(std::vector<WorldSet>& rows) {
    const std::size_t n = rows.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (rows[i].test(k)) rows[i] |= rows[k];
}

auto each(const WorldSet& s) -> std::vector<std::size_t> {
    std::vector<std::size_t> out;
    for (auto i = s.find_first(); i != WorldSet::npos; i = s.find_next(i)) out.push_back(i);
    return out;
}

}  // namespace

void close_frame(OrdinaryModel& m) {
    transitive_close(m.R);
    for (std::size_t w = 0; w < m.size(); ++w) {
        for (std::size_t u : each(m.R[w])) {
            m.S[w][u].set(u);
            m.S[w][u] |= m.R[u] & m.R[w];
        }
        transitive_close(m.S[w]);
    }
}

auto Violation::message() const -> std::string {
    std::string s = clause;
    if (!witness.empty()) {
        s += " at (";
        for (std::size_t i = 0; i < witness.size(); ++i) s += (i ? ", " : "") + witness[i];
        s += ")";
    }
    return s;
}

auto validate(const OrdinaryModel& m) -> std::optional<Violation> {
    const std::size_t n = m.size();
    auto name = [&](std::size_t i) { return m.worlds[i]; };
    if (n == 0) return Violation{"no worlds", {}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m.worlds[i] == m.worlds[j]) return Violation{"duplicate world id", {name(i)}};
    if (m.R.size() != n || m.S.size() != n) return Violation{"relation size mismatch", {}};
    for (std::size_t w = 0; w < n; ++w) {
        if (m.R[w].size() != n || m.S[w].size() != n) return Violation{"relation size mismatch", {name(w)}};
        for (const auto& row : m.S[w])
            if (row.size() != n) return Violation{"relation size mismatch", {name(w)}};
    }
    for (const auto& [var, ext] : m.valuation)
        if (ext.size() != n) return Violation{"valuation size mismatch", {var}};

    for (std::size_t w = 0; w < n; ++w)
        if (m.R[w].test(w)) return Violation{"R not irreflexive", {name(w)}};
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v : each(m.R[u]))
            for (std::size_t z : each(m.R[v]))
                if (!m.R[u].test(z)) {
                    // A cycle through u shows up as a transitivity gap or a loop.
                    return Violation{z == u ? "R has a cycle" : "R not transitive", {name(u), name(v), name(z)}};
                }

    for (std::size_t w = 0; w < n; ++w) {
        const WorldSet& succ = m.R[w];
        for (std::size_t u = 0; u < n; ++u) {
            const WorldSet& row = m.S[w][u];
            if (row.none()) continue;
            if (!succ.test(u)) return Violation{"S_w not inside R[w]", {name(w), name(u), name(row.find_first())}};
            if (!row.is_subset_of(succ)) {
                WorldSet out = row - succ;
                return Violation{"S_w not inside R[w]", {name(w), name(u), name(out.find_first())}};
            }
        }
        for (std::size_t u : each(succ)) {
            if (!m.S[w][u].test(u)) return Violation{"S_w not reflexive on R[w]", {name(w), name(u)}};
            for (std::size_t v : each(m.R[u]))
                if (!m.S[w][u].test(v)) return Violation{"S_w misses R-pair", {name(w), name(u), name(v)}};
            for (std::size_t v : each(m.S[w][u]))
                for (std::size_t z : each(m.S[w][v]))
                    if (!m.S[w][u].test(z)) return Violation{"S_w not transitive", {name(w), name(u), name(v), name(z)}};
        }
    }
    return std::nullopt;
}

auto Evaluator::extension(Formula f) -> const WorldSet& {
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    const std::size_t n = m_.size();
    WorldSet out(n);
    switch (f.kind()) {
    case Kind::Bot: break;
    case Kind::Var: {
        auto it = m_.valuation.find(f.name());
        if (it != m_.valuation.end()) out = it->second;
        break;
    }
    case Kind::Implies: {
        WorldSet a = extension(f.left());
        out = ~a | extension(f.right());
        break;
    }
    case Kind::Box: {
        WorldSet a = extension(f.inner());
        for (std::size_t w = 0; w < n; ++w) out[w] = m_.R[w].is_subset_of(a);
        break;
    }
    case Kind::Rhd: {
        WorldSet a = extension(f.left());
        WorldSet b = extension(f.right());
        for (std::size_t w = 0; w < n; ++w) {
            bool ok = true;
            WorldSet cand = m_.R[w] & a;
            for (auto u = cand.find_first(); ok && u != WorldSet::npos; u = cand.find_next(u))
                ok = m_.S[w][u].intersects(b);
            out[w] = ok;
        }
        break;
    }
    }
    return memo_.emplace(f, std::move(out)).first->second;
}

auto force(const OrdinaryModel& m, std::size_t w, Formula f) -> bool {
    if (w >= m.size()) throw UnknownWorld(std::to_string(w));
    return Evaluator(m).forces(w, f);
}

auto force(const OrdinaryModel& m, std::string_view w, Formula f) -> bool { return force(m, m.world(w), f); }

namespace {

auto frame_valid_under(OrdinaryModel& m, Formula f) -> bool { return Evaluator(m).extension(f).all(); }

void assign(OrdinaryModel& m, const std::vector<std::string>& vars, const std::vector<bool>& bits) {
    const std::size_t n = m.size();
    m.valuation.clear();
    for (std::size_t k = 0; k < vars.size(); ++k) {
        WorldSet ext(n);
        for (std::size_t w = 0; w < n; ++w) ext[w] = bits[k * n + w];
        m.valuation[vars[k]] = ext;
    }
}

}  // namespace

auto valid_on_frame(const OrdinaryModel& frame, Formula f, const std::vector<std::string>& vars, std::size_t cap)
    -> bool {
    const std::size_t total = frame.size() * vars.size();
    if (total > cap)
        throw CapExceeded("frame sweep needs " + std::to_string(total) + " valuation bits, cap is " + std::to_string(cap));
    OrdinaryModel m = frame;
    std::vector<bool> bits(total);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << total); ++code) {
        for (std::size_t i = 0; i < total; ++i) bits[i] = (code >> i) & 1U;
        assign(m, vars, bits);
        if (!frame_valid_under(m, f)) return false;
    }
    return true;
}

auto valid_on_frame_sampled(const OrdinaryModel& frame, Formula f, const std::vector<std::string>& vars,
                            std::size_t samples, Rng& rng) -> bool {
    OrdinaryModel m = frame;
    std::vector<bool> bits(frame.size() * vars.size());
    std::bernoulli_distribution coin(0.5);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = coin(rng);
        assign(m, vars, bits);
        if (!frame_valid_under(m, f)) return false;
    }
    return true;
}

namespace {

using Tuple = std::optional<std::vector<std::size_t>>;

auto check_p(const OrdinaryModel& m) -> Tuple {
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t w2 : each(m.R[w]))
            for (std::size_t u : each(m.R[w2]))
                for (std::size_t v : each(m.S[w][u]))
                    if (!m.S[w2][u].test(v)) return std::vector<std::size_t>{w, w2, u, v};
    return std::nullopt;
}

auto check_m(const OrdinaryModel& m) -> Tuple {
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t u : each(m.R[w]))
            for (std::size_t v : each(m.S[w][u]))
                for (std::size_t z : each(m.R[v]))
                    if (!m.R[u].test(z)) return std::vector<std::size_t>{w, u, v, z};
    return std::nullopt;
}

auto check_m0(const OrdinaryModel& m) -> Tuple {
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t u : each(m.R[w]))
            for (std::size_t x : each(m.R[u]))
                for (std::size_t v : each(m.S[w][x]))
                    for (std::size_t z : each(m.R[v]))
                        if (!m.R[u].test(z)) return std::vector<std::size_t>{w, u, x, v, z};
    return std::nullopt;
}

auto check_r(const OrdinaryModel& m) -> Tuple {
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t x : each(m.R[w]))
            for (std::size_t y : each(m.R[x]))
                for (std::size_t y2 : each(m.S[w][y]))
                    for (std::size_t z : each(m.R[y2]))
                        if (!m.S[x][y].test(z)) return std::vector<std::size_t>{w, x, y, y2, z};
    return std::nullopt;
}

// Cycle search in x -> x' iff x S_w y R x' for some y.
auto check_w(const OrdinaryModel& m) -> Tuple {
    const std::size_t n = m.size();
    for (std::size_t w = 0; w < n; ++w) {
        std::vector<WorldSet> step(n, WorldSet(n));
        for (std::size_t x : each(m.R[w]))
            for (std::size_t y : each(m.S[w][x])) step[x] |= m.R[y];
        std::vector<int> colour(n, 0);
        std::vector<std::size_t> stack;
        std::optional<std::vector<std::size_t>> found;
        std::function<bool(std::size_t)> dfs = [&](std::size_t x) -> bool {
            colour[x] = 1;
            stack.push_back(x);
            for (std::size_t y : each(step[x])) {
                if (colour[y] == 1) {
                    std::vector<std::size_t> cyc{w};
                    auto it = std::find(stack.begin(), stack.end(), y);
                    cyc.insert(cyc.end(), it, stack.end());
                    found = cyc;
                    return true;
                }
                if (colour[y] == 0 && dfs(y)) return true;
            }
            stack.pop_back();
            colour[x] = 2;
            return false;
        };
        for (std::size_t x : each(m.R[w]))
            if (colour[x] == 0 && dfs(x)) return found;
    }
    return std::nullopt;
}

}  // namespace

auto check_condition(const OrdinaryModel& m, Principle p) -> std::optional<std::vector<std::size_t>> {
    switch (p) {
    case Principle::P: return check_p(m);
    case Principle::M: return check_m(m);
    case Principle::M0: return check_m0(m);
    case Principle::R: return check_r(m);
    case Principle::W: return check_w(m);
    }
    return std::nullopt;
}

auto satisfies(const OrdinaryModel& m, const Logic& logic) -> bool {
    for (Principle p : logic.principles())
        if (check_condition(m, p)) return false;
    return true;
}

auto random_model(Rng& rng, const Logic& logic, const RandomModelOptions& opts) -> OrdinaryModel {
    std::uniform_int_distribution<std::size_t> size_dist(opts.min_worlds, opts.max_worlds);
    const std::size_t n = size_dist(rng);
    std::bernoulli_distribution r_coin(opts.r_density);
    std::bernoulli_distribution half(0.5);

    OrdinaryModel base = OrdinaryModel::with_size(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (r_coin(rng)) base.add_r(i, j);
    close_frame(base);

    OrdinaryModel m = base;
    double density = opts.s_density;
    for (std::size_t attempt = 0; attempt <= opts.attempts; ++attempt) {
        m = base;
        if (attempt == opts.attempts) density = 0.0;
        std::bernoulli_distribution s_coin(density);
        for (std::size_t w = 0; w < n; ++w)
            for (std::size_t u : each(m.R[w]))
                for (std::size_t v : each(m.R[w]))
                    if (u != v && s_coin(rng)) m.add_s(w, u, v);
        close_frame(m);
        if (satisfies(m, logic)) break;
        if (attempt % 8 == 7) density *= 0.5;
    }
    for (const auto& var : opts.vars) {
        WorldSet ext(n);
        for (std::size_t w = 0; w < n; ++w) ext[w] = half(rng);
        m.valuation[var] = ext;
    }
    return m;
}

auto random_formula(Rng& rng, const std::vector<std::string>& vars, std::size_t depth) -> Formula {
    std::uniform_int_distribution<std::size_t> pick_var(0, vars.size() - 1);
    auto leaf = [&]() {
        if (std::uniform_int_distribution<int>(0, 9)(rng) == 0) return Formula::bot();
        return Formula::var(vars[pick_var(rng)]);
    };
    if (depth == 0) return leaf();
    switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
    case 0: return leaf();
    case 1: return Formula::neg(random_formula(rng, vars, depth - 1));
    case 2: return Formula::implies(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1));
    case 3: return Formula::conj(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1));
    case 4: return Formula::disj(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1));
    case 5: return Formula::box(random_formula(rng, vars, depth - 1));
    case 6: return Formula::dia(random_formula(rng, vars, depth - 1));
    default: return Formula::rhd(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1));
    }
}

auto theory(const OrdinaryModel& m, std::size_t w, const std::vector<Formula>& pool) -> std::vector<Formula> {
    Evaluator ev(m);
    std::vector<Formula> out;
    for (Formula f : pool)
        if (ev.forces(w, f)) out.push_back(f);
    return out;
}

}  // namespace ilw
