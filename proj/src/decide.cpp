#include "ilw/decide.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <unordered_set>

namespace ilw {

auto search_ceiling() -> std::size_t {
    if (const char* env = std::getenv("VELTMAN_CEILING")) {
        try {
            std::size_t v = std::stoul(env);
            if (v > 0) return std::min<std::size_t>(v, 31);
        } catch (const std::exception&) {
        }
    }
    return 6;
}

namespace {

void check_ceiling(std::size_t n) {
    if (n > search_ceiling())
        throw CeilingExceeded("bound " + std::to_string(n) + " exceeds ceiling " + std::to_string(search_ceiling()) +
                              " (set VELTMAN_CEILING to raise it)");
}

auto bits(std::uint32_t m) -> std::vector<std::size_t> {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; m; ++i, m >>= 1)
        if (m & 1U) out.push_back(i);
    return out;
}

// Preorders on k points as k row masks, cached per k. Built by inserting
// the last point with an up-closed set above it and a down-closed set
// below it, every below point under every above point.
auto preorders(std::size_t k) -> const std::vector<std::vector<std::uint8_t>>& {
    static std::map<std::size_t, std::vector<std::vector<std::uint8_t>>> cache;
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    std::vector<std::vector<std::uint8_t>> out;
    if (k == 0) {
        out.push_back({});
    } else {
        for (const auto& p : preorders(k - 1)) {
            std::size_t m = k - 1;
            std::uint32_t all = (1U << m) - 1;
            for (std::uint32_t up = 0; up <= all; ++up) {
                bool up_ok = true;
                for (std::size_t a = 0; a < m && up_ok; ++a)
                    if ((up >> a & 1U) && (p[a] & ~up)) up_ok = false;
                if (!up_ok) continue;
                for (std::uint32_t down = 0; down <= all; ++down) {
                    bool ok = true;
                    for (std::size_t a = 0; a < m && ok; ++a) {
                        if (!(down >> a & 1U)) continue;
                        for (std::size_t b = 0; b < m; ++b)
                            if ((p[b] >> a & 1U) && !(down >> b & 1U)) ok = false;
                        if ((up & ~p[a]) != 0) ok = false;
                    }
                    if (!ok) continue;
                    std::vector<std::uint8_t> q(p);
                    q.push_back(static_cast<std::uint8_t>(up | (1U << m)));
                    for (std::size_t a = 0; a < m; ++a)
                        if (down >> a & 1U) q[a] |= static_cast<std::uint8_t>(1U << m);
                    out.push_back(std::move(q));
                }
            }
        }
    }
    return cache.emplace(k, std::move(out)).first->second;
}

class Enumerator {
public:
    Enumerator(const std::vector<Formula>& formulas, const Logic& logic,
               const std::function<bool(const FrameVisit&)>& visit)
        : logic_(logic), visit_(visit) {
        if (formulas.size() > kMaxPhi)
            throw std::length_error("formula list of " + std::to_string(formulas.size()) + " exceeds " +
                                    std::to_string(kMaxPhi));
        std::unordered_map<Formula, int> pos;
        for (std::size_t i = 0; i < formulas.size(); ++i) pos.emplace(formulas[i], static_cast<int>(i));
        auto at = [&](Formula g) {
            auto it = pos.find(g);
            if (it == pos.end()) throw std::invalid_argument("formula list not closed under subformulas: " + g.text());
            return it->second;
        };
        std::set<int> args;
        for (std::size_t i = 0; i < formulas.size(); ++i) {
            Formula f = formulas[i];
            Op op{f.kind()};
            switch (f.kind()) {
            case Kind::Bot: break;
            case Kind::Var: {
                auto v = std::find(vars_.begin(), vars_.end(), f.name());
                op.var = static_cast<int>(v - vars_.begin());
                if (v == vars_.end()) vars_.push_back(f.name());
                break;
            }
            case Kind::Implies:
            case Kind::Rhd:
                op.a = at(f.left());
                op.b = at(f.right());
                break;
            case Kind::Box: op.a = at(f.inner()); break;
            }
            if (op.a >= static_cast<int>(i) || op.b >= static_cast<int>(i))
                throw std::invalid_argument("formula list must list subformulas first");
            if (f.is_box()) args.insert(op.a);
            if (f.is_rhd()) {
                args.insert(op.a);
                args.insert(op.b);
            }
            ops_.push_back(op);
        }
        args_.assign(args.begin(), args.end());
        if (vars_.size() > 16) throw std::length_error("too many variables for exhaustive valuations");
    }

    auto run(std::size_t n) -> bool {
        n_ = n;
        R_.assign(n, 0);
        S_.assign(n, std::vector<std::uint32_t>(n, 0));
        th_.assign(n, Theory{});
        val_.assign(n, 0);
        Buf top{0, 1, {}, {}};
        return descend(n - 1, top);
    }

private:
    struct Op {
        Kind kind;
        int a = -1;
        int b = -1;
        int var = -1;
    };
    // States of worlds i..n-1: count rows of width theories/valuations.
    struct Buf {
        std::size_t width;
        std::size_t count;
        std::vector<Theory> th;
        std::vector<std::uint32_t> val;
    };

    auto descend(std::size_t i, const Buf& parent) -> bool {
        std::uint32_t all = (n_ >= 32) ? ~0U : ((1U << n_) - 1);
        std::uint32_t later = all & ~((1U << (i + 1)) - 1);
        if (i == 0) return with_r(0, later, parent);
        for (std::uint32_t sub = 0;; sub = (sub - later) & later) {
            bool closed = true;
            for (std::size_t j : bits(sub))
                if (R_[j] & ~sub) closed = false;
            if (closed && !with_r(i, sub, parent)) return false;
            if (sub == later) break;
        }
        return true;
    }

    auto with_r(std::size_t i, std::uint32_t r, const Buf& parent) -> bool {
        R_[i] = r;
        auto succ = bits(r);
        std::size_t k = succ.size();
        std::vector<std::uint8_t> base(k);
        for (std::size_t a = 0; a < k; ++a) {
            base[a] = static_cast<std::uint8_t>(1U << a);
            for (std::size_t b = 0; b < k; ++b)
                if (R_[succ[a]] >> succ[b] & 1U) base[a] |= static_cast<std::uint8_t>(1U << b);
        }
        for (const auto& p : preorders(k)) {
            bool contains = true;
            for (std::size_t a = 0; a < k && contains; ++a)
                if ((p[a] & base[a]) != base[a]) contains = false;
            if (!contains) continue;
            std::fill(S_[i].begin(), S_[i].end(), 0);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b)
                    if (p[a] >> b & 1U) S_[i][succ[a]] |= 1U << succ[b];
            if (!conditions_hold(i)) continue;
            if (i == 0 && !canonical()) continue;
            if (i == 0) {
                if (!visit_root(parent)) return false;
            } else {
                Buf cur = extend(i, parent);
                if (!descend(i - 1, cur)) return false;
            }
        }
        std::fill(S_[i].begin(), S_[i].end(), 0);
        R_[i] = 0;
        return true;
    }

    // Frame code under a relabelling; pi[old] = new.
    void code(const std::vector<std::size_t>& pi, std::vector<std::uint32_t>& out) const {
        auto map = [&](std::uint32_t m) {
            std::uint32_t r = 0;
            for (std::size_t j : bits(m)) r |= 1U << pi[j];
            return r;
        };
        out.assign(n_ * (n_ + 1), 0);
        for (std::size_t i = 0; i < n_; ++i) {
            out[pi[i] * (n_ + 1)] = map(R_[i]);
            for (std::size_t u = 0; u < n_; ++u) out[pi[i] * (n_ + 1) + 1 + pi[u]] = map(S_[i][u]);
        }
    }

    // Keeps one labelled frame per isomorphism class: the one whose code is
    // least among all natural relabellings fixing the root.
    auto canonical() -> bool {
        if (n_ <= 2) return true;
        std::vector<std::size_t> id(n_);
        for (std::size_t i = 0; i < n_; ++i) id[i] = i;
        code(id, mine_);
        std::vector<std::size_t> perm(id.begin() + 1, id.end());
        std::vector<std::size_t> pi(n_);
        while (std::next_permutation(perm.begin(), perm.end())) {
            pi[0] = 0;
            for (std::size_t k = 0; k + 1 < n_; ++k) pi[k + 1] = perm[k];
            bool natural = true;
            for (std::size_t i = 1; i < n_ && natural; ++i)
                for (std::size_t j : bits(R_[i]))
                    if (pi[i] >= pi[j]) natural = false;
            if (!natural) continue;
            code(pi, other_);
            if (other_ < mine_) return false;
        }
        return true;
    }

    auto conditions_hold(std::size_t w) const -> bool {
        std::uint32_t rw = R_[w];
        const auto& Sw = S_[w];
        auto succ = bits(rw);
        if (logic_.has(Principle::P))
            for (std::size_t w2 : succ)
                for (std::size_t u : bits(R_[w2]))
                    if (Sw[u] & ~S_[w2][u]) return false;
        if (logic_.has(Principle::M))
            for (std::size_t u : succ)
                for (std::size_t v : bits(Sw[u]))
                    if (R_[v] & ~R_[u]) return false;
        if (logic_.has(Principle::M0))
            for (std::size_t u : succ)
                for (std::size_t x : bits(R_[u]))
                    for (std::size_t v : bits(Sw[x]))
                        if (R_[v] & ~R_[u]) return false;
        if (logic_.has(Principle::R))
            for (std::size_t x : succ)
                for (std::size_t y : bits(R_[x]))
                    for (std::size_t y2 : bits(Sw[y]))
                        if (R_[y2] & ~S_[x][y]) return false;
        if (logic_.has(Principle::W)) {
            // x -> z when x S_w y R z; acyclic iff the transitive closure is irreflexive
            std::vector<std::uint32_t> step(n_, 0);
            for (std::size_t x : succ)
                for (std::size_t y : bits(Sw[x])) step[x] |= R_[y];
            std::vector<std::uint32_t> reach(step);
            for (bool changed = true; changed;) {
                changed = false;
                for (std::size_t x : succ) {
                    std::uint32_t next = reach[x];
                    for (std::size_t y : bits(reach[x])) next |= step[y];
                    if (next != reach[x]) {
                        reach[x] = next;
                        changed = true;
                    }
                }
            }
            for (std::size_t x : succ)
                if (reach[x] >> x & 1U) return false;
        }
        return true;
    }

    // Truth values at world i of the []- and |>-formulas, given theories of
    // worlds i+1..n-1 in row.
    void modal(std::size_t i, const Theory* row, Theory& out) {
        masks_.assign(ops_.size(), 0);
        for (std::size_t j = i + 1; j < n_; ++j) {
            const Theory& t = row[j - i - 1];
            for (int k : args_)
                if (t[k]) masks_[k] |= 1U << j;
        }
        std::uint32_t r = R_[i];
        for (std::size_t f = 0; f < ops_.size(); ++f) {
            const Op& op = ops_[f];
            if (op.kind == Kind::Box) {
                out[f] = (r & ~masks_[op.a]) == 0;
            } else if (op.kind == Kind::Rhd) {
                bool ok = true;
                std::uint32_t pending = r & masks_[op.a];
                for (std::size_t u = 0; pending && ok; ++u, pending >>= 1)
                    if ((pending & 1U) && (S_[i][u] & masks_[op.b]) == 0) ok = false;
                out[f] = ok;
            }
        }
    }

    void local(std::uint32_t val, const Theory& modal_part, Theory& t) const {
        t.reset();
        for (std::size_t f = 0; f < ops_.size(); ++f) {
            const Op& op = ops_[f];
            switch (op.kind) {
            case Kind::Bot: break;
            case Kind::Var: t[f] = (val >> op.var) & 1U; break;
            case Kind::Implies: t[f] = !t[op.a] || t[op.b]; break;
            default: t[f] = modal_part[f]; break;
            }
        }
    }

    auto extend(std::size_t i, const Buf& parent) -> Buf {
        std::size_t nv = std::size_t{1} << vars_.size();
        Buf cur{parent.width + 1, 0, {}, {}};
        cur.th.reserve(parent.count * nv * cur.width);
        cur.val.reserve(parent.count * nv * cur.width);
        Theory m, t;
        for (std::size_t s = 0; s < parent.count; ++s) {
            const Theory* row = parent.th.data() + s * parent.width;
            const std::uint32_t* vrow = parent.val.data() + s * parent.width;
            m.reset();
            modal(i, row, m);
            for (std::uint32_t val = 0; val < nv; ++val) {
                local(val, m, t);
                cur.th.push_back(t);
                cur.th.insert(cur.th.end(), row, row + parent.width);
                cur.val.push_back(val);
                cur.val.insert(cur.val.end(), vrow, vrow + parent.width);
                ++cur.count;
            }
        }
        return cur;
    }

    auto visit_root(const Buf& parent) -> bool {
        std::size_t nv = std::size_t{1} << vars_.size();
        Theory m;
        for (std::size_t s = 0; s < parent.count; ++s) {
            const Theory* row = parent.th.data() + s * parent.width;
            const std::uint32_t* vrow = parent.val.data() + s * parent.width;
            m.reset();
            modal(0, row, m);
            for (std::size_t j = 1; j < n_; ++j) {
                th_[j] = row[j - 1];
                val_[j] = vrow[j - 1];
            }
            for (std::uint32_t val = 0; val < nv; ++val) {
                local(val, m, th_[0]);
                val_[0] = val;
                FrameVisit v{n_, R_, S_, th_, val_, vars_};
                if (!visit_(v)) return false;
            }
        }
        return true;
    }

    Logic logic_;
    const std::function<bool(const FrameVisit&)>& visit_;
    std::vector<Op> ops_;
    std::vector<int> args_;
    std::vector<std::string> vars_;
    std::size_t n_ = 0;
    std::vector<std::uint32_t> R_;
    std::vector<std::vector<std::uint32_t>> S_;
    std::vector<Theory> th_;
    std::vector<std::uint32_t> val_;
    std::vector<std::uint32_t> masks_;
    std::vector<std::uint32_t> mine_;
    std::vector<std::uint32_t> other_;
};

}  // namespace

auto enumerate_models(const std::vector<Formula>& formulas, const Logic& logic, std::size_t max_worlds,
                      const std::function<bool(const FrameVisit&)>& visit) -> bool {
    check_ceiling(max_worlds);
    Enumerator e(formulas, logic, visit);
    for (std::size_t n = 1; n <= max_worlds; ++n)
        if (!e.run(n)) return false;
    return true;
}

auto to_model(const FrameVisit& v) -> OrdinaryModel {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < v.n; ++i) names.push_back("w" + std::to_string(i));
    OrdinaryModel m = OrdinaryModel::with_worlds(std::move(names));
    for (std::size_t i = 0; i < v.n; ++i) {
        for (std::size_t j : bits(v.R[i])) m.add_r(i, j);
        for (std::size_t u = 0; u < v.n; ++u)
            for (std::size_t x : bits(v.S[i][u])) m.add_s(i, u, x);
    }
    for (std::size_t k = 0; k < v.vars.size(); ++k) {
        m.valuation[v.vars[k]] = m.empty_set();
        for (std::size_t i = 0; i < v.n; ++i)
            if (v.valuation[i] >> k & 1U) m.set_true(v.vars[k], i);
    }
    return m;
}

auto sat_bounded(Formula f, const Logic& logic, std::size_t max_worlds) -> SatResult {
    SatResult res;
    res.bound = max_worlds;
    auto L = subformulas(f);
    std::size_t target = std::find(L.begin(), L.end(), f) - L.begin();
    enumerate_models(L, logic, max_worlds, [&](const FrameVisit& v) {
        if (!v.theories[0][target]) return true;
        res.sat = true;
        res.model = to_model(v);
        res.designated = 0;
        return false;
    });
    return res;
}

auto consistent_up_to(const std::vector<Formula>& fs, const Logic& logic, std::size_t bound) -> bool {
    return sat_bounded(big_and(fs), logic, bound).sat;
}

auto verdict_name(Verdict v) -> std::string {
    return v == Verdict::Countermodel ? "Countermodel" : "Provable-up-to-bound";
}

auto decide_bounded(Formula f, const Logic& logic, std::size_t bound) -> DecisionResult {
    DecisionResult d;
    d.bound = bound;
    d.logic = logic.name();
    auto s = sat_bounded(Formula::neg(f), logic, bound);
    if (s.sat) {
        d.verdict = Verdict::Countermodel;
        d.model = std::move(s.model);
        d.designated = s.designated;
    }
    return d;
}

namespace {

struct PairKey {
    Theory here;
    Theory common;
    friend auto operator==(const PairKey& a, const PairKey& b) -> bool {
        return a.here == b.here && a.common == b.common;
    }
};

struct PairKeyHash {
    auto operator()(const PairKey& p) const noexcept -> std::size_t {
        std::hash<Theory> h;
        return h(p.here) * 31 + h(p.common);
    }
};

auto theory_less(const Theory& a, const Theory& b) -> bool {
    Theory d = a ^ b;
    if (d.none()) return false;
#ifdef __GLIBCXX__
    return b[d._Find_first()];
#else
    std::size_t i = 0;
    while (!d[i]) ++i;
    return b[i];
#endif
}

auto pair_less(const PairKey& a, const PairKey& b) -> bool {
    if (a.here != b.here) return theory_less(a.here, b.here);
    return theory_less(a.common, b.common);
}

struct GroupHash {
    auto operator()(const std::vector<PairKey>& g) const noexcept -> std::size_t {
        std::size_t h = g.size();
        for (const auto& p : g) h = h * 1000003 ^ PairKeyHash{}(p);
        return h;
    }
};

}  // namespace

auto PhiOracle::build(const AdequateSet& phi, const Logic& logic, std::size_t bound) -> PhiOracle {
    PhiOracle o;
    o.phi_ = std::make_shared<const AdequateSet>(phi);
    o.logic_ = logic;
    o.bound_ = bound;
    // Pairs only depend on the non-root worlds, so they are interned once per
    // non-root state and each visit records (root theory, group).
    std::vector<std::vector<PairKey>> groups;
    std::unordered_map<std::vector<PairKey>, std::size_t, GroupHash> group_ids;
    std::unordered_map<Theory, std::unordered_set<std::size_t>> seen;
    std::size_t prev_n = 0, group = 0;
    std::vector<std::uint32_t> prev_S0;
    std::vector<Theory> prev_theories;
    Theory prev_root;
    bool have_prev = false;
    enumerate_models(phi.formulas, logic, bound, [&](const FrameVisit& v) {
        // pairs read only S_0 and the non-root theories
        bool same = have_prev && v.n == prev_n && v.S[0] == prev_S0 &&
                    std::equal(v.theories.begin() + 1, v.theories.begin() + v.n, prev_theories.begin() + 1);
        if (!same) {
            std::vector<PairKey> pairs;
            for (std::size_t u = 1; u < v.n; ++u) {
                Theory c;
                c.set();
                for (std::size_t x : bits(v.S[0][u])) c &= v.theories[x];
                pairs.push_back(PairKey{v.theories[u], c});
            }
            std::sort(pairs.begin(), pairs.end(), pair_less);
            pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
            auto it = group_ids.find(pairs);
            if (it == group_ids.end()) {
                it = group_ids.emplace(pairs, groups.size()).first;
                groups.push_back(std::move(pairs));
            }
            group = it->second;
            prev_n = v.n;
            prev_S0 = v.S[0];
            prev_theories.assign(v.theories.begin(), v.theories.begin() + v.n);
            have_prev = true;
        } else if (v.theories[0] == prev_root) {
            return true;
        }
        prev_root = v.theories[0];
        seen[v.theories[0]].insert(group);
        return true;
    });
    for (const auto& kv : seen) o.mcs_.push_back(kv.first);
    std::sort(o.mcs_.begin(), o.mcs_.end(), theory_less);
    for (std::size_t i = 0; i < o.mcs_.size(); ++i) {
        o.index_.emplace(o.mcs_[i], i);
        std::vector<Pair> ps;
        std::unordered_set<PairKey, PairKeyHash> merged;
        for (std::size_t g : seen[o.mcs_[i]])
            for (const auto& p : groups[g])
                if (merged.insert(p).second) ps.push_back(Pair{p.here, p.common});
        o.pairs_.push_back(std::move(ps));
    }
    return o;
}

auto PhiOracle::mcs_index(const Theory& t) const -> std::optional<std::size_t> {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

auto PhiOracle::proves_rhd(std::size_t gamma, std::size_t a, const Theory& S) const -> bool {
    for (const Pair& p : pairs_.at(gamma))
        if (p.here[a] && (S & ~p.common).none()) return false;
    return true;
}

auto PhiOracle::entails(const Theory& premises, std::size_t f) const -> bool {
    for (const Theory& t : mcs_)
        if ((premises & ~t).none() && !t[f]) return false;
    return true;
}

auto phi_assuring(const PhiOracle& oracle, std::size_t gamma, const Theory& S, std::size_t delta) -> bool {
    const AdequateSet& phi = oracle.phi();
    const Theory& g = oracle.mcs()[gamma];
    const Theory& d = oracle.mcs()[delta];
    bool fresh = false;
    for (std::size_t bx : phi.boxed) {
        if (d[bx] && !g[bx]) fresh = true;
        // boxed label members are carried into the successor; R∘S_w acyclicity needs it
        if (S[bx] && !d[bx]) return false;
        std::size_t x = phi.position(phi.formulas[bx].inner());
        if (oracle.proves_rhd(gamma, phi.negation[x], S) && !(d[x] && d[bx])) return false;
    }
    return fresh;
}

namespace {

auto box_not(const AdequateSet& phi, std::size_t a) -> std::size_t {
    auto pos = phi.find(Formula::box(single_negation(phi.formulas[a])));
    if (!pos) throw std::invalid_argument("adequate set lacks []~" + phi.formulas[a].text());
    return *pos;
}

}  // namespace

auto witness_wfin_probs(const PhiOracle& oracle, std::size_t gamma, std::size_t a, std::size_t b)
    -> std::optional<std::size_t> {
    const AdequateSet& phi = oracle.phi();
    Theory label;
    label.set(phi.negation[b]);
    label.set(box_not(phi, a));
    for (std::size_t d = 0; d < oracle.mcs().size(); ++d)
        if (oracle.mcs()[d][a] && phi_assuring(oracle, gamma, label, d)) return d;
    return std::nullopt;
}

auto witness_wfin_defies(const PhiOracle& oracle, std::size_t gamma, const Theory& S, std::size_t a, std::size_t b)
    -> std::optional<std::size_t> {
    Theory label = S;
    label.set(box_not(oracle.phi(), a));
    for (std::size_t d = 0; d < oracle.mcs().size(); ++d)
        if (oracle.mcs()[d][b] && phi_assuring(oracle, gamma, label, d)) return d;
    return std::nullopt;
}

namespace {

constexpr std::size_t kMaxLazyWorlds = 4096;

struct AssuringKey {
    std::size_t gamma;
    std::size_t delta;
    Theory label;
    friend auto operator==(const AssuringKey& a, const AssuringKey& b) -> bool {
        return a.gamma == b.gamma && a.delta == b.delta && a.label == b.label;
    }
};

struct AssuringKeyHash {
    auto operator()(const AssuringKey& k) const noexcept -> std::size_t {
        return std::hash<Theory>{}(k.label) ^ (k.gamma * 0x9e3779b97f4a7c15ULL) ^ (k.delta << 20);
    }
};

struct SigmaLess {
    auto operator()(const std::pair<std::size_t, std::vector<Theory>>& a,
                    const std::pair<std::size_t, std::vector<Theory>>& b) const -> bool {
        if (a.first != b.first) return a.first < b.first;
        return std::lexicographical_compare(a.second.begin(), a.second.end(), b.second.begin(), b.second.end(),
                                            theory_less);
    }
};

class LazyModel {
public:
    explicit LazyModel(const PhiOracle& o) : o_(o), phi_(o.phi()), box_not_(phi_.size(), kNone) {
        for (std::size_t f = 0; f < phi_.size(); ++f)
            if (auto pos = phi_.find(Formula::box(single_negation(phi_.formulas[f])))) box_not_[f] = *pos;
    }

    std::vector<IlwWorld> W;

    auto theory(std::size_t w) const -> const Theory& { return o_.mcs()[W[w].theory]; }
    auto successors(std::size_t w) const -> const std::vector<std::size_t>& { return succ_[w]; }
    auto R(std::size_t w, std::size_t v) const -> bool { return r_[w][v]; }

    auto assuring(std::size_t gamma, const Theory& S, std::size_t delta) -> bool {
        AssuringKey key{gamma, delta, S};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        bool r = phi_assuring(o_, gamma, S, delta);
        cache_.emplace(key, r);
        return r;
    }

    // Clause 3b: some C |> D of w with []~C in T and C or <>C at x.
    auto clause_b(std::size_t w, std::size_t x, const Theory& T) -> bool {
        const Theory& tw = theory(w);
        const Theory& tx = theory(x);
        for (std::size_t r : phi_.rhd) {
            if (!tw[r]) continue;
            std::size_t c = phi_.position(phi_.formulas[r].left());
            std::size_t bc = box_not(c);
            if (T[bc] && (tx[c] || !tx[bc])) return true;
        }
        return false;
    }

    auto S(std::size_t w, std::size_t x, std::size_t y) -> bool {
        if (!R(w, x) || !R(w, y)) return false;
        if (x == y || R(x, y)) return true;
        std::size_t d = W[w].sigma.size();
        const Theory& s = W[x].sigma[d];
        const Theory& t = W[y].sigma[d];
        if ((s & ~t).any()) return false;
        return clause_b(w, x, t);
    }

    void add_root(std::size_t gamma) { insert(IlwWorld{{}, gamma}); }

    auto add(std::size_t w, const Theory& label, std::size_t delta) -> bool {
        std::vector<Theory> sigma = W[w].sigma;
        sigma.push_back(label);
        if (index_.count({delta, sigma})) return false;
        if (W.size() >= kMaxLazyWorlds)
            throw DecideError("construction exceeded " + std::to_string(kMaxLazyWorlds) + " worlds");
        insert(IlwWorld{std::move(sigma), delta});
        return true;
    }

    // Adds the witnesses world w asks for; true if anything was added.
    auto demands(std::size_t w) -> bool {
        bool added = false;
        const std::size_t g = W[w].theory;
        auto missing = [](const std::string& what) {
            return DecideError("no witness for " + what + " within the oracle bound; increase --bound");
        };
        for (std::size_t bx : phi_.boxed) {
            if (theory(w)[bx]) continue;
            std::size_t x = phi_.position(phi_.formulas[bx].inner());
            bool have = false;
            for (std::size_t v : succ_[w])
                if (!theory(v)[x]) {
                    have = true;
                    break;
                }
            if (have) continue;
            std::optional<std::size_t> found;
            for (std::size_t d = 0; d < o_.mcs().size() && !found; ++d)
                if (!o_.mcs()[d][x] && assuring(g, Theory{}, d)) found = d;
            if (!found) throw missing("~" + phi_.formulas[bx].text());
            added |= add(w, Theory{}, *found);
        }
        for (std::size_t r : phi_.rhd) {
            std::size_t a = phi_.position(phi_.formulas[r].left());
            std::size_t b = phi_.position(phi_.formulas[r].right());
            if (!theory(w)[r]) {
                auto d = witness_wfin_probs(o_, g, a, b);
                if (!d) throw missing("~(" + phi_.formulas[r].text() + ")");
                Theory label;
                label.set(phi_.negation[b]);
                label.set(box_not(a));
                added |= add(w, label, *d);
                continue;
            }
            // succ_[w] may grow while we add witnesses
            for (std::size_t i = 0; i < succ_[w].size(); ++i) {
                std::size_t v = succ_[w][i];
                if (!theory(v)[a]) continue;
                bool have = false;
                for (std::size_t u : succ_[w])
                    if (theory(u)[b] && S(w, v, u)) {
                        have = true;
                        break;
                    }
                if (have) continue;
                Theory label = W[v].sigma[W[w].sigma.size()];
                auto d = witness_wfin_defies(o_, g, label, a, b);
                if (!d) throw missing(phi_.formulas[r].text());
                label.set(box_not(a));
                added |= add(w, label, *d);
            }
        }
        return added;
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    auto box_not(std::size_t f) const -> std::size_t {
        if (box_not_[f] == kNone) throw std::invalid_argument("adequate set lacks []~" + phi_.formulas[f].text());
        return box_not_[f];
    }

    auto compute_r(std::size_t w, std::size_t v) -> bool {
        const auto& sw = W[w].sigma;
        const auto& sv = W[v].sigma;
        if (sv.size() <= sw.size() || !std::equal(sw.begin(), sw.end(), sv.begin())) return false;
        return assuring(W[w].theory, sv[sw.size()], W[v].theory);
    }

    void insert(IlwWorld world) {
        std::size_t v = W.size();
        index_.emplace(std::make_pair(world.theory, world.sigma), v);
        W.push_back(std::move(world));
        for (auto& row : r_) row.push_back(false);
        r_.emplace_back(v + 1, false);
        succ_.emplace_back();
        for (std::size_t x = 0; x < v; ++x) {
            if (compute_r(x, v)) {
                r_[x][v] = true;
                succ_[x].push_back(v);
            }
            if (compute_r(v, x)) {
                r_[v][x] = true;
                succ_[v].push_back(x);
            }
        }
    }

    const PhiOracle& o_;
    const AdequateSet& phi_;
    std::vector<std::size_t> box_not_;
    std::unordered_map<AssuringKey, bool, AssuringKeyHash> cache_;
    std::map<std::pair<std::size_t, std::vector<Theory>>, std::size_t, SigmaLess> index_;
    std::vector<std::vector<bool>> r_;
    std::vector<std::vector<std::size_t>> succ_;
};

}  // namespace

auto build_ilw_model(std::shared_ptr<const PhiOracle> oracle, std::size_t gamma) -> IlwConstruction {
    const AdequateSet& phi = oracle->phi();
    LazyModel lazy(*oracle);
    lazy.add_root(gamma);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t w = 0; w < lazy.W.size(); ++w) changed |= lazy.demands(w);
    }

    std::size_t n = lazy.W.size();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
    OrdinaryModel m = OrdinaryModel::with_worlds(std::move(names));
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t v : lazy.successors(w)) m.add_r(w, v);
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t x : lazy.successors(w))
            for (std::size_t y : lazy.successors(w))
                if (lazy.S(w, x, y)) m.add_s(w, x, y);
    for (std::size_t f = 0; f < phi.size(); ++f) {
        if (!phi.formulas[f].is_var()) continue;
        const std::string& name = phi.formulas[f].name();
        m.valuation[name] = m.empty_set();
        for (std::size_t w = 0; w < n; ++w)
            if (lazy.theory(w)[f]) m.set_true(name, w);
    }
    return IlwConstruction{std::move(oracle), std::move(lazy.W), std::move(m), 0};
}

auto verify_truth_lemma(const IlwConstruction& c) -> std::optional<TruthFailure> {
    return verify_truth_lemma(c, c.model);
}

auto verify_truth_lemma(const IlwConstruction& c, const OrdinaryModel& m) -> std::optional<TruthFailure> {
    const AdequateSet& phi = c.oracle->phi();
    Evaluator ev(m);
    for (std::size_t f = 0; f < phi.size(); ++f) {
        const WorldSet& ext = ev.extension(phi.formulas[f]);
        for (std::size_t w = 0; w < c.worlds.size(); ++w) {
            bool member = c.oracle->mcs()[c.worlds[w].theory][f];
            if (member != ext.test(w)) return TruthFailure{w, phi.formulas[f], member};
        }
    }
    return std::nullopt;
}

auto ilw_decide(Formula g, std::size_t bound) -> IlwDecision {
    Logic ilw = Logic::parse("ILW");
    Formula target = single_negation(g);
    AdequateSet phi = adequate_set(target);
    if (phi.size() > kMaxPhi)
        throw DecideError("adequate set of " + std::to_string(phi.size()) + " formulas exceeds " +
                          std::to_string(kMaxPhi));
    auto oracle = std::make_shared<const PhiOracle>(PhiOracle::build(phi, ilw, bound));

    IlwDecision out;
    out.result.bound = bound;
    out.result.logic = ilw.name();
    std::size_t t = phi.position(target);
    std::optional<std::size_t> gamma;
    for (std::size_t i = 0; i < oracle->mcs().size() && !gamma; ++i)
        if (oracle->mcs()[i][t]) gamma = i;
    if (!gamma) return out;

    IlwConstruction c = build_ilw_model(oracle, *gamma);
    if (auto v = validate(c.model)) throw DecideError("constructed model is not a Veltman model: " + v->message());
    if (check_condition(c.model, Principle::W)) throw DecideError("constructed model violates the W condition");
    if (auto bad = verify_truth_lemma(c))
        throw DecideError("truth lemma fails at w" + std::to_string(bad->world) + " for " + bad->formula.text() +
                          "; increase --bound");
    if (force(c.model, c.root, g)) throw DecideError("constructed model forces the input at its root");
    out.result.verdict = Verdict::Countermodel;
    out.result.designated = c.root;
    out.result.model = std::move(c.model);
    c.model = OrdinaryModel{};
    out.construction = std::move(c);
    return out;
}

}  // namespace ilw
