#include "ilw/labels.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ilw {

namespace {

auto members(const WorldSet& s) -> std::vector<std::size_t> {
    std::vector<std::size_t> out;
    for (auto i = s.find_first(); i != WorldSet::npos; i = s.find_next(i)) out.push_back(i);
    return out;
}

}  // namespace

auto make_label(std::vector<Formula> fs) -> Label {
    std::sort(fs.begin(), fs.end(), StructuralLess{});
    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    return fs;
}

auto label_union(const Label& a, const Label& b) -> Label {
    Label out(a);
    out.insert(out.end(), b.begin(), b.end());
    return make_label(std::move(out));
}

auto label_subset(const Label& a, const Label& b) -> bool {
    return std::all_of(a.begin(), a.end(), [&](Formula f) { return std::find(b.begin(), b.end(), f) != b.end(); });
}

auto label_text(const Label& l) -> std::string {
    std::string out = "{";
    for (std::size_t i = 0; i < l.size(); ++i) out += (i ? ", " : "") + print(l[i]);
    return out + "}";
}

auto promise(Formula a, const Label& S) -> Formula {
    std::vector<Formula> negs;
    for (Formula s : S) negs.push_back(single_negation(s));
    return Formula::rhd(single_negation(a), big_or(negs));
}

auto semantic_assuring(const OrdinaryModel& m, std::size_t x, std::size_t y, const Label& S,
                       const std::vector<Formula>& pool) -> bool {
    if (!m.R[x].test(y)) return false;
    Evaluator ev(m);
    for (Formula a : pool) {
        if (!ev.forces(x, promise(a, S))) continue;
        if (!ev.forces(y, a) || !ev.forces(y, Formula::box(a))) return false;
    }
    return true;
}

auto modal_classes(const OrdinaryModel& m) -> std::vector<std::size_t> {
    const std::size_t n = m.size();
    std::vector<std::size_t> cls(n, 0);
    {
        std::map<std::vector<bool>, std::size_t> ids;
        for (std::size_t w = 0; w < n; ++w) {
            std::vector<bool> key;
            for (const auto& [name, ext] : m.valuation) key.push_back(ext.test(w));
            cls[w] = ids.emplace(key, ids.size()).first->second;
        }
    }
    // A world's |>-behaviour is fixed by, per class c of R-successors u, the
    // minimal sets among the classes met by S_w[u].
    using Hit = std::vector<std::size_t>;
    using Profile = std::pair<std::size_t, std::map<std::size_t, std::set<Hit>>>;
    for (std::size_t count = 0;;) {
        std::map<Profile, std::size_t> ids;
        std::vector<std::size_t> next(n);
        for (std::size_t w = 0; w < n; ++w) {
            std::map<std::size_t, std::set<Hit>> fam;
            for (std::size_t u : members(m.R[w])) {
                std::set<std::size_t> hit;
                for (std::size_t v : members(m.S[w][u])) hit.insert(cls[v]);
                fam[cls[u]].insert(Hit(hit.begin(), hit.end()));
            }
            for (auto& [c, sets] : fam) {
                std::set<Hit> minimal;
                for (const Hit& h : sets) {
                    bool dominated = false;
                    for (const Hit& g : sets)
                        if (g != h && std::includes(h.begin(), h.end(), g.begin(), g.end())) dominated = true;
                    if (!dominated) minimal.insert(h);
                }
                sets = std::move(minimal);
            }
            next[w] = ids.emplace(Profile{cls[w], std::move(fam)}, ids.size()).first->second;
        }
        cls = std::move(next);
        if (ids.size() == count) break;
        count = ids.size();
    }
    // renumber by first occurrence
    std::map<std::size_t, std::size_t> renum;
    for (auto& c : cls) c = renum.emplace(c, renum.size()).first->second;
    return cls;
}

auto full_assuring(const OrdinaryModel& m, const std::vector<std::size_t>& classes, std::size_t x, std::size_t y,
                   const Label& S) -> bool {
    if (!m.R[x].test(y)) return false;
    Evaluator ev(m);
    const WorldSet& good = ev.extension(big_and(S));
    std::set<std::size_t> bad;
    for (std::size_t u : members(m.R[x]))
        if (m.S[x][u].is_subset_of(good)) bad.insert(classes[u]);
    if (!bad.count(classes[y])) return false;
    for (std::size_t v : members(m.R[y]))
        if (!bad.count(classes[v])) return false;
    return true;
}

auto full_assuring(const OrdinaryModel& m, std::size_t x, std::size_t y, const Label& S) -> bool {
    return full_assuring(m, modal_classes(m), x, y, S);
}

auto boxdotset(const OrdinaryModel& m, std::size_t x, const Label& T, const std::vector<Formula>& pool) -> Label {
    Evaluator ev(m);
    Label out;
    for (Formula a : pool)
        if (ev.forces(x, promise(a, T))) {
            out.push_back(a);
            out.push_back(Formula::box(a));
        }
    return make_label(std::move(out));
}

auto boxset(const OrdinaryModel& m, std::size_t x, const Label& T, const std::vector<Formula>& pool) -> Label {
    Evaluator ev(m);
    Label out;
    for (Formula a : pool)
        if (ev.forces(x, promise(a, T))) out.push_back(Formula::box(a));
    return make_label(std::move(out));
}

auto q_labels(const OrdinaryModel& m, const std::vector<std::size_t>& chain, const std::vector<Label>& base,
              Formula pivot, const std::vector<Formula>& pool) -> QLabelSequence {
    if (base.empty() || chain.size() != base.size() + 1)
        throw std::invalid_argument("q_labels needs worlds w_0..w_n and labels S_1..S_n (got " +
                                    std::to_string(chain.size()) + " worlds, " + std::to_string(base.size()) +
                                    " labels)");
    for (std::size_t w : chain)
        if (w >= m.size()) throw std::out_of_range("q_labels: world index out of range");
    QLabelSequence out{chain, base, pivot, {}};
    Label pin{Formula::box(single_negation(pivot))};
    out.q.push_back(label_union(base[0], pin));
    for (std::size_t j = 1; j < base.size(); ++j) {
        Label promised = boxdotset(m, chain[j], out.q.back(), pool);
        out.q.push_back(label_union(label_union(base[j], pin), promised));
    }
    return out;
}

auto label_lemma_name(LabelLemma l) -> std::string {
    switch (l) {
    case LabelLemma::P: return "P";
    case LabelLemma::Pfull: return "Pfull";
    case LabelLemma::M: return "M";
    case LabelLemma::M0: return "M0";
    case LabelLemma::R: return "R";
    case LabelLemma::Rfull: return "Rfull";
    case LabelLemma::RTrans: return "RTrans";
    }
    return "?";
}

auto all_label_lemmas() -> const std::vector<LabelLemma>& {
    static const std::vector<LabelLemma> all{LabelLemma::P,  LabelLemma::Pfull, LabelLemma::M,     LabelLemma::M0,
                                             LabelLemma::R,  LabelLemma::Rfull, LabelLemma::RTrans};
    return all;
}

auto parse_label_lemma(std::string_view s) -> LabelLemma {
    for (LabelLemma l : all_label_lemmas())
        if (label_lemma_name(l) == s) return l;
    throw std::invalid_argument("unknown labelling lemma '" + std::string(s) + "'");
}

auto lemma_principle(LabelLemma l) -> Principle {
    switch (l) {
    case LabelLemma::P:
    case LabelLemma::Pfull: return Principle::P;
    case LabelLemma::M: return Principle::M;
    case LabelLemma::M0: return Principle::M0;
    default: return Principle::R;
    }
}

namespace {

auto chain_length(LabelLemma l) -> std::size_t {
    return (l == LabelLemma::M || l == LabelLemma::RTrans) ? 2 : 3;
}

auto boxed_all(const Label& T) -> Label {
    Label out;
    for (Formula t : T) out.push_back(Formula::box(t));
    return make_label(std::move(out));
}

}  // namespace

auto check_lemma_instance(LabelLemma lemma, const OrdinaryModel& m, const std::vector<std::size_t>& classes,
                          const std::vector<std::size_t>& chain, const Label& S, const Label& T,
                          const std::vector<Formula>& pool) -> std::optional<HarnessViolation> {
    if (chain.size() != chain_length(lemma))
        throw std::invalid_argument("lemma " + label_lemma_name(lemma) + " needs a chain of " +
                                    std::to_string(chain_length(lemma)) + " worlds");
    const std::size_t x = chain[0];
    const std::size_t y = chain[1];
    if (!full_assuring(m, classes, x, y, S)) return std::nullopt;

    HarnessViolation v{lemma, chain, S, T, {}, {}};
    if (lemma == LabelLemma::RTrans) {
        Label promised = boxset(m, y, T, pool);
        Label lhs = boxset(m, x, label_union(S, promised), pool);
        for (Formula f : lhs)
            if (std::find(promised.begin(), promised.end(), f) == promised.end()) {
                v.conclusion = lhs;
                v.failure = print(f) + " promised at x but not at y";
                return v;
            }
        return std::nullopt;
    }

    std::size_t z = y;
    if (chain.size() == 3) {
        z = chain[2];
        if (lemma == LabelLemma::M0) {
            if (!m.R[y].test(z)) return std::nullopt;
        } else if (!full_assuring(m, classes, y, z, T)) {
            return std::nullopt;
        }
    }

    Label target;
    switch (lemma) {
    case LabelLemma::P: target = label_union(S, boxdotset(m, y, T, pool)); break;
    case LabelLemma::Pfull: target = T; break;
    case LabelLemma::M:
    case LabelLemma::M0: target = label_union(S, boxset(m, y, {}, pool)); break;
    case LabelLemma::R: target = label_union(S, boxset(m, y, T, pool)); break;
    case LabelLemma::Rfull: target = label_union(S, boxed_all(T)); break;
    case LabelLemma::RTrans: break;
    }
    v.conclusion = target;

    Evaluator ev(m);
    for (Formula a : pool) {
        if (!ev.forces(x, promise(a, target))) continue;
        if (!ev.forces(z, a) || !ev.forces(z, Formula::box(a))) {
            v.failure = "x forces " + print(promise(a, target)) + " but the last world misses " + print(a) +
                        " or its box";
            return v;
        }
    }
    if (!full_assuring(m, classes, x, z, target)) {
        v.failure = "conclusion fails over full theories";
        return v;
    }
    return std::nullopt;
}

auto harness_labelling(LabelLemma lemma, const OrdinaryModel& m, const std::vector<Formula>& pool, Rng& rng,
                       const HarnessOptions& opts) -> HarnessReport {
    if (opts.require_condition && check_condition(m, lemma_principle(lemma)))
        throw PreconditionError("model violates the frame condition for " +
                                std::string(principle_name(lemma_principle(lemma))));
    HarnessReport report;
    auto classes = modal_classes(m);
    std::vector<std::vector<std::size_t>> chains;
    for (std::size_t x = 0; x < m.size(); ++x)
        for (std::size_t y : members(m.R[x])) {
            if (chain_length(lemma) == 2) chains.push_back({x, y});
            else
                for (std::size_t z : members(m.R[y])) chains.push_back({x, y, z});
        }
    std::bernoulli_distribution take(0.25);
    auto sample_label = [&]() {
        Label l;
        for (Formula f : pool)
            if (take(rng)) l.push_back(f);
        return make_label(std::move(l));
    };

    constexpr int kLabelTries = 8;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        if (chains.empty()) {
            ++report.vacuous;
            continue;
        }
        const auto& chain = chains[std::uniform_int_distribution<std::size_t>(0, chains.size() - 1)(rng)];
        bool premises = false;
        Label S, T;
        for (int attempt = 0; attempt < kLabelTries && !premises; ++attempt) {
            S = sample_label();
            T = sample_label();
            premises = full_assuring(m, classes, chain[0], chain[1], S);
            if (premises && chain.size() == 3 && lemma != LabelLemma::M0)
                premises = full_assuring(m, classes, chain[1], chain[2], T);
        }
        if (!premises) {
            ++report.vacuous;
            continue;
        }
        ++report.instances;
        if (auto v = check_lemma_instance(lemma, m, classes, chain, S, T, pool)) report.violations.push_back(*v);
    }
    return report;
}

auto witness_w_probs(const OrdinaryModel& m, std::size_t x, Formula a, Formula b) -> std::optional<std::size_t> {
    if (force(m, x, Formula::rhd(a, b))) throw PreconditionError("world forces " + print(Formula::rhd(a, b)));
    auto classes = modal_classes(m);
    Label label = make_label({Formula::box(single_negation(a)), single_negation(b)});
    Evaluator ev(m);
    for (std::size_t u : members(m.R[x]))
        if (ev.forces(u, a) && full_assuring(m, classes, x, u, label)) return u;
    return std::nullopt;
}

auto witness_w_defies(const OrdinaryModel& m, std::size_t x, std::size_t lambda, const Label& S, Formula b,
                      Formula c) -> std::optional<std::size_t> {
    auto classes = modal_classes(m);
    Evaluator ev(m);
    if (!ev.forces(x, Formula::rhd(b, c))) throw PreconditionError("world does not force " + print(Formula::rhd(b, c)));
    if (!ev.forces(lambda, b)) throw PreconditionError("middle world does not force " + print(b));
    if (!full_assuring(m, classes, x, lambda, S)) throw PreconditionError("middle world is not an assuring successor");
    Label label = label_union(S, {Formula::box(single_negation(b))});
    Formula boxed = Formula::box(single_negation(c));
    for (std::size_t u : members(m.R[x]))
        if (ev.forces(u, c) && ev.forces(u, boxed) && full_assuring(m, classes, x, u, label)) return u;
    return std::nullopt;
}

auto full_closure_phi(const PhiOracle& oracle, std::size_t gamma, const Theory& S) -> Theory {
    const AdequateSet& phi = oracle.phi();
    Theory cur = S;
    for (bool changed = true; changed;) {
        Theory next = cur;
        for (std::size_t bx : phi.boxed) {
            std::size_t a = phi.position(phi.formulas[bx].inner());
            // finite convention: Γ ⊢ ~A |> \/~S puts A, []A in the label
            if (oracle.proves_rhd(gamma, phi.negation[a], cur)) {
                next.set(a);
                next.set(bx);
            }
        }
        for (std::size_t f = 0; f < phi.size(); ++f)
            if (!next[f] && oracle.entails(cur, f)) next.set(f);
        for (std::size_t f = 0; f < phi.size(); ++f)
            if (cur[f])
                if (auto b = phi.find(Formula::box(phi.formulas[f]))) next.set(*b);
        changed = next != cur;
        cur = next;
    }
    return cur;
}

auto theory_to_label(const AdequateSet& phi, const Theory& t) -> Label {
    Label out;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (t[i]) out.push_back(phi.formulas[i]);
    return out;
}

auto label_to_theory(const AdequateSet& phi, const Label& l) -> Theory {
    Theory t;
    for (Formula f : l) t.set(phi.position(f));
    return t;
}

}  // namespace ilw
