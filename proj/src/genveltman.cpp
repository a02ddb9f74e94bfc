#include "ilw/genveltman.hpp"

#include <functional>

namespace ilw {

namespace {

auto each(const WorldSet& s) -> std::vector<std::size_t> {
    std::vector<std::size_t> out;
    for (auto i = s.find_first(); i != WorldSet::npos; i = s.find_next(i)) out.push_back(i);
    return out;
}

auto entries_for(const std::vector<SEntry>& list, std::size_t u) -> std::vector<const SEntry*> {
    std::vector<const SEntry*> out;
    for (const auto& e : list)
        if (e.u == u) out.push_back(&e);
    return out;
}

auto image(const GeneralisedModel& m, const WorldSet& V) -> WorldSet {
    WorldSet out(m.size());
    for (std::size_t v : each(V)) out |= m.R[v];
    return out;
}

// Calls visit with the union of one listed Z_v per v in V, for every choice.
// Stops early when visit returns false.
auto for_each_choice(const std::vector<SEntry>& list, const WorldSet& V, std::size_t n,
                     const std::function<bool(const WorldSet&)>& visit) -> bool {
    std::vector<std::vector<const SEntry*>> options;
    for (std::size_t v : each(V)) {
        options.push_back(entries_for(list, v));
        if (options.back().empty()) return true;
    }
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
        WorldSet un(n);
        for (std::size_t i = 0; i < options.size(); ++i) un |= options[i][pick[i]]->V;
        if (!visit(un)) return false;
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
        if (i == pick.size()) return true;
    }
}

}  // namespace

auto GeneralisedModel::with_worlds(std::vector<std::string> names) -> GeneralisedModel {
    GeneralisedModel m;
    const std::size_t n = names.size();
    m.worlds = std::move(names);
    m.R.assign(n, WorldSet(n));
    m.S.assign(n, {});
    return m;
}

auto GeneralisedModel::with_size(std::size_t n) -> GeneralisedModel {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return with_worlds(std::move(names));
}

auto GeneralisedModel::world(std::string_view name) const -> std::size_t {
    for (std::size_t i = 0; i < worlds.size(); ++i)
        if (worlds[i] == name) return i;
    throw UnknownWorld(std::string(name));
}

auto GeneralisedModel::set_of(std::initializer_list<std::size_t> ws) const -> WorldSet {
    WorldSet s(size());
    for (std::size_t w : ws) s.set(w);
    return s;
}

void GeneralisedModel::add_s(std::size_t w, std::size_t u, const WorldSet& V) {
    for (const auto& e : S[w])
        if (e.u == u && e.V == V) return;
    S[w].push_back({u, V});
}

void GeneralisedModel::set_true(const std::string& var, std::size_t w) {
    auto [it, _] = valuation.try_emplace(var, WorldSet(size()));
    it->second.set(w);
}

auto GeneralisedModel::related(std::size_t w, std::size_t u, const WorldSet& V) const -> bool {
    if (!V.is_subset_of(R[w])) return false;
    for (const auto& e : S[w])
        if (e.u == u && e.V.is_subset_of(V)) return true;
    return false;
}

void close_frame(GeneralisedModel& m) {
    const std::size_t n = m.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (m.R[i].test(k)) m.R[i] |= m.R[k];
    for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t u : each(m.R[w])) {
            WorldSet single(n);
            single.set(u);
            if (!m.related(w, u, single)) m.add_s(w, u, single);
            for (std::size_t v : each(m.R[u])) {
                WorldSet sv(n);
                sv.set(v);
                if (!m.related(w, u, sv)) m.add_s(w, u, sv);
            }
        }
        for (bool changed = true; changed;) {
            changed = false;
            const std::vector<SEntry> snapshot = m.S[w];
            for (const auto& e : snapshot) {
                for_each_choice(m.S[w], e.V, n, [&](const WorldSet& un) {
                    if (!m.related(w, e.u, un)) {
                        m.add_s(w, e.u, un);
                        changed = true;
                    }
                    return true;
                });
            }
        }
    }
}

auto validate_gen(const GeneralisedModel& m) -> std::optional<Violation> {
    const std::size_t n = m.size();
    auto name = [&](std::size_t i) { return m.worlds[i]; };
    if (n == 0) return Violation{"no worlds", {}};
    if (m.R.size() != n || m.S.size() != n) return Violation{"relation size mismatch", {}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m.worlds[i] == m.worlds[j]) return Violation{"duplicate world id", {name(i)}};
    for (std::size_t w = 0; w < n; ++w)
        if (m.R[w].test(w)) return Violation{"R not irreflexive", {name(w)}};
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v : each(m.R[u]))
            for (std::size_t z : each(m.R[v]))
                if (!m.R[u].test(z))
                    return Violation{z == u ? "R has a cycle" : "R not transitive", {name(u), name(v), name(z)}};

    for (std::size_t w = 0; w < n; ++w) {
        for (const auto& e : m.S[w]) {
            if (e.u >= n || e.V.size() != n) return Violation{"malformed S entry", {name(w)}};
            if (!m.R[w].test(e.u)) return Violation{"S_w not inside R[w]", {name(w), name(e.u)}};
            if (e.V.none()) return Violation{"S_w relates to the empty set", {name(w), name(e.u)}};
            if (!e.V.is_subset_of(m.R[w])) return Violation{"S_w not inside R[w]", {name(w), name(e.u)}};
        }
        for (std::size_t u : each(m.R[w])) {
            WorldSet single(n);
            single.set(u);
            if (!m.related(w, u, single)) return Violation{"S_w not quasi-reflexive", {name(w), name(u)}};
            for (std::size_t v : each(m.R[u])) {
                WorldSet sv(n);
                sv.set(v);
                if (!m.related(w, u, sv)) return Violation{"S_w misses R-pair", {name(w), name(u), name(v)}};
            }
        }
        for (const auto& e : m.S[w]) {
            std::optional<Violation> bad;
            for_each_choice(m.S[w], e.V, n, [&](const WorldSet& un) {
                if (m.related(w, e.u, un)) return true;
                std::vector<std::string> wit{name(w), name(e.u)};
                for (std::size_t z : each(un)) wit.push_back(name(z));
                bad = Violation{"S_w not quasi-transitive", wit};
                return false;
            });
            if (bad) return bad;
        }
    }
    return std::nullopt;
}

auto GenEvaluator::extension(Formula f) -> const WorldSet& {
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
            for (std::size_t u : each(m_.R[w] & a)) {
                bool found = false;
                for (const auto& e : m_.S[w])
                    if (e.u == u && e.V.is_subset_of(b)) {
                        found = true;
                        break;
                    }
                if (!found) {
                    ok = false;
                    break;
                }
            }
            out[w] = ok;
        }
        break;
    }
    }
    return memo_.emplace(f, std::move(out)).first->second;
}

auto force_gen(const GeneralisedModel& m, std::size_t w, Formula f) -> bool {
    if (w >= m.size()) throw UnknownWorld(std::to_string(w));
    return GenEvaluator(m).forces(w, f);
}

auto force_gen(const GeneralisedModel& m, std::string_view w, Formula f) -> bool {
    return force_gen(m, m.world(w), f);
}

auto check_gen_P(const GeneralisedModel& m) -> std::optional<GenCounterexample> {
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t w2 : each(m.R[w]))
            for (const auto& e : m.S[w]) {
                if (!m.R[w2].test(e.u)) continue;
                if (!m.related(w2, e.u, e.V & m.R[w2])) return GenCounterexample{{w, w2, e.u}, e.V};
            }
    return std::nullopt;
}

namespace {

auto w_holds(const GeneralisedModel& m, std::size_t w, std::size_t u, const WorldSet& V) -> bool {
    WorldSet pre(m.size());
    for (std::size_t z : each(m.R[w]))
        if (m.related(w, z, V)) pre.set(z);
    for (const auto& e : m.S[w])
        if (e.u == u && e.V.is_subset_of(V) && !image(m, e.V).intersects(pre)) return true;
    return false;
}

}  // namespace

auto check_gen_W(const GeneralisedModel& m, const GenWOptions& opts) -> std::optional<GenCounterexample> {
    for (std::size_t w = 0; w < m.size(); ++w) {
        for (const auto& e : m.S[w])
            if (!w_holds(m, w, e.u, e.V)) return GenCounterexample{{w, e.u}, e.V};
        if (!opts.strict) continue;
        auto succ = each(m.R[w]);
        if (succ.size() > opts.max_successors)
            throw CapExceeded("strict (W)_gen check over " + std::to_string(succ.size()) + " successors");
        for (std::uint64_t code = 1; code < (std::uint64_t{1} << succ.size()); ++code) {
            WorldSet V(m.size());
            for (std::size_t i = 0; i < succ.size(); ++i)
                if ((code >> i) & 1U) V.set(succ[i]);
            for (std::size_t u : succ)
                if (m.related(w, u, V) && !w_holds(m, w, u, V)) return GenCounterexample{{w, u}, V};
        }
    }
    return std::nullopt;
}

auto monotone_closure(const GeneralisedModel& m, std::size_t max_successors) -> GeneralisedModel {
    GeneralisedModel out = m;
    for (std::size_t w = 0; w < m.size(); ++w) {
        auto succ = each(m.R[w]);
        if (succ.size() > max_successors)
            throw CapExceeded("monotone closure over " + std::to_string(succ.size()) + " successors");
        out.S[w].clear();
        for (std::uint64_t code = 1; code < (std::uint64_t{1} << succ.size()); ++code) {
            WorldSet V(m.size());
            for (std::size_t i = 0; i < succ.size(); ++i)
                if ((code >> i) & 1U) V.set(succ[i]);
            for (std::size_t u : succ)
                if (m.related(w, u, V)) out.S[w].push_back({u, V});
        }
    }
    return out;
}

auto as_generalised(const OrdinaryModel& m) -> GeneralisedModel {
    GeneralisedModel g = GeneralisedModel::with_worlds(m.worlds);
    g.R = m.R;
    g.valuation = m.valuation;
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t u = 0; u < m.size(); ++u)
            for (std::size_t v : each(m.S[w][u])) {
                WorldSet single(m.size());
                single.set(v);
                g.add_s(w, u, single);
            }
    return g;
}

auto random_gen_model(Rng& rng, GenCondition cond, const RandomGenOptions& opts) -> GeneralisedModel {
    std::uniform_int_distribution<std::size_t> size_dist(opts.min_worlds, opts.max_worlds);
    const std::size_t n = size_dist(rng);
    std::bernoulli_distribution r_coin(opts.r_density);
    std::bernoulli_distribution half(0.5);

    GeneralisedModel base = GeneralisedModel::with_size(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (r_coin(rng)) base.add_r(i, j);
    close_frame(base);

    GeneralisedModel m = base;
    std::size_t extras = opts.extra_entries;
    for (std::size_t attempt = 0; attempt <= opts.attempts; ++attempt) {
        m = base;
        if (attempt == opts.attempts) extras = 0;
        for (std::size_t w = 0; w < n; ++w) {
            auto succ = each(m.R[w]);
            if (succ.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
            for (std::size_t k = 0; k < extras; ++k) {
                WorldSet V(n);
                for (std::size_t v : succ)
                    if (half(rng)) V.set(v);
                if (V.none()) V.set(succ[pick(rng)]);
                m.add_s(w, succ[pick(rng)], V);
            }
        }
        close_frame(m);
        bool ok = true;
        if (cond == GenCondition::P) ok = !check_gen_P(m);
        if (cond == GenCondition::W) ok = !check_gen_W(m, {true, 16});
        if (ok) break;
        if (attempt % 8 == 7 && extras > 0) --extras;
    }
    for (const auto& var : opts.vars) {
        WorldSet ext(n);
        for (std::size_t w = 0; w < n; ++w) ext[w] = half(rng);
        m.valuation[var] = ext;
    }
    return m;
}

}  // namespace ilw
