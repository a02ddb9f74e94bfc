#include "ilw/formula.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <set>
#include <tuple>

namespace ilw {

namespace {

enum Prec : int { kImp = 0, kRhd = 1, kOr = 2, kAnd = 3, kAtom = 4 };

}  // namespace

struct Node {
    Kind kind;
    std::string name;
    const Node* left = nullptr;
    const Node* right = nullptr;
    std::size_t size = 1;
    std::size_t id = 0;
    int prec = kAtom;
    std::string text;
};

struct Interner {
    using Key = std::tuple<Kind, std::string, const Node*, const Node*>;

    struct KeyHash {
        auto operator()(const Key& k) const noexcept -> std::size_t {
            std::size_t h = std::hash<int>{}(static_cast<int>(std::get<0>(k)));
            h ^= std::hash<std::string>{}(std::get<1>(k)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= std::hash<const void*>{}(std::get<2>(k)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= std::hash<const void*>{}(std::get<3>(k)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        }
    };

    std::mutex mu;
    std::deque<Node> nodes;
    std::unordered_map<Key, const Node*, KeyHash> table;

    static auto instance() -> Interner& {
        static Interner in;
        return in;
    }

    static auto make(Kind k, std::string name, const Node* l, const Node* r) -> Formula {
        auto& in = instance();
        std::lock_guard<std::mutex> lock(in.mu);
        Key key{k, name, l, r};
        if (auto it = in.table.find(key); it != in.table.end()) return Formula(it->second);
        Node& n = in.nodes.emplace_back();
        n.kind = k;
        n.name = std::move(name);
        n.left = l;
        n.right = r;
        n.size = 1 + (l ? l->size : 0) + (r ? r->size : 0);
        n.id = in.nodes.size();
        render(n);
        in.table.emplace(std::move(key), &n);
        return Formula(&n);
    }

    static auto wrap(const Node* n, int min) -> std::string {
        return n->prec >= min ? n->text : "(" + n->text + ")";
    }

    static auto is_neg(const Node* n) -> bool {
        return n->kind == Kind::Implies && n->right->kind == Kind::Bot;
    }

    // Printing re-sugars ~, <>, &, true; everything else is primitive.
    static void render(Node& n) {
        switch (n.kind) {
        case Kind::Bot:
            n.text = "false";
            n.prec = kAtom;
            return;
        case Kind::Var:
            n.text = n.name;
            n.prec = kAtom;
            return;
        case Kind::Box:
            n.text = "[]" + wrap(n.left, kAtom);
            n.prec = kAtom;
            return;
        case Kind::Rhd:
            n.text = wrap(n.left, kOr) + " |> " + wrap(n.right, kOr);
            n.prec = kRhd;
            return;
        case Kind::Implies:
            break;
        }
        const Node* a = n.left;
        const Node* b = n.right;
        if (b->kind == Kind::Bot) {
            if (a->kind == Kind::Bot) {
                n.text = "true";
                n.prec = kAtom;
                return;
            }
            if (a->kind == Kind::Implies && is_neg(a->right)) {
                n.text = wrap(a->left, kAnd) + " & " + wrap(a->right->left, kAtom);
                n.prec = kAnd;
                return;
            }
            if (a->kind == Kind::Box && is_neg(a->left)) {
                n.text = "<>" + wrap(a->left->left, kAtom);
                n.prec = kAtom;
                return;
            }
            n.text = "~" + wrap(a, kAtom);
            n.prec = kAtom;
            return;
        }
        n.text = wrap(a, kRhd) + " -> " + wrap(b, kImp);
        n.prec = kImp;
    }
};

Formula::Formula() : node_(bot().node_) {}

auto Formula::bot() -> Formula {
    static const Formula b = Interner::make(Kind::Bot, "", nullptr, nullptr);
    return b;
}
auto Formula::var(std::string_view name) -> Formula {
    return Interner::make(Kind::Var, std::string(name), nullptr, nullptr);
}
auto Formula::implies(Formula a, Formula b) -> Formula {
    return Interner::make(Kind::Implies, "", a.node_, b.node_);
}
auto Formula::box(Formula a) -> Formula { return Interner::make(Kind::Box, "", a.node_, nullptr); }
auto Formula::rhd(Formula a, Formula b) -> Formula {
    return Interner::make(Kind::Rhd, "", a.node_, b.node_);
}

auto Formula::neg(Formula a) -> Formula { return implies(a, bot()); }
auto Formula::top() -> Formula { return neg(bot()); }
auto Formula::dia(Formula a) -> Formula { return neg(box(neg(a))); }
auto Formula::conj(Formula a, Formula b) -> Formula { return neg(implies(a, neg(b))); }
auto Formula::disj(Formula a, Formula b) -> Formula { return implies(neg(a), b); }
auto Formula::boxdot(Formula a) -> Formula { return conj(a, box(a)); }

auto Formula::kind() const -> Kind { return node_->kind; }
auto Formula::name() const -> const std::string& { return node_->name; }
auto Formula::left() const -> Formula {
    if (!node_->left) throw std::logic_error("formula has no left operand: " + node_->text);
    return Formula(node_->left);
}
auto Formula::right() const -> Formula {
    if (!node_->right) throw std::logic_error("formula has no right operand: " + node_->text);
    return Formula(node_->right);
}
auto Formula::size() const -> std::size_t { return node_->size; }
auto Formula::text() const -> const std::string& { return node_->text; }
auto Formula::id() const -> std::size_t { return node_->id; }
auto Formula::is_negation() const -> bool { return Interner::is_neg(node_); }

auto StructuralLess::operator()(Formula a, Formula b) const -> bool {
    if (a == b) return false;
    if (a.size() != b.size()) return a.size() < b.size();
    return a.text() < b.text();
}

auto single_negation(Formula f) -> Formula {
    return f.is_negation() ? f.left() : Formula::neg(f);
}

auto big_or(const std::vector<Formula>& fs) -> Formula {
    if (fs.empty()) return Formula::bot();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::disj(acc, fs[i]);
    return acc;
}

auto big_and(const std::vector<Formula>& fs) -> Formula {
    if (fs.empty()) return Formula::top();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::conj(acc, fs[i]);
    return acc;
}

ParseError::ParseError(std::size_t pos, const std::string& what)
    : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + what), position(pos) {}

namespace {

enum class Tok { End, Ident, False, True, Not, Box, Dia, And, Or, Rhd, Imp, LParen, RParen };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string text;
};

auto describe(const Token& t) -> std::string {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier '" + t.text + "'";
    default: return "'" + t.text + "'";
    }
}

auto lex(std::string_view s) -> std::vector<Token> {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        auto two = s.substr(i, 2);
        auto push = [&](Tok k, std::size_t len) {
            out.push_back({k, i, std::string(s.substr(i, len))});
            i += len;
        };
        if (two == "[]") push(Tok::Box, 2);
        else if (two == "<>") push(Tok::Dia, 2);
        else if (two == "|>") push(Tok::Rhd, 2);
        else if (two == "->") push(Tok::Imp, 2);
        else if (c == '~') push(Tok::Not, 1);
        else if (c == '&') push(Tok::And, 1);
        else if (c == '|') push(Tok::Or, 1);
        else if (c == '(') push(Tok::LParen, 1);
        else if (c == ')') push(Tok::RParen, 1);
        else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            std::string word(s.substr(i, j - i));
            Tok k = word == "false" ? Tok::False : word == "true" ? Tok::True : Tok::Ident;
            out.push_back({k, i, word});
            i = j;
        } else {
            throw ParseError(i, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, s.size(), ""});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view s) : toks_(lex(s)) {}

    auto run() -> Formula {
        Formula f = implication();
        if (peek().kind != Tok::End) throw ParseError(peek().pos, "unexpected " + describe(peek()));
        return f;
    }

private:
    std::vector<Token> toks_;
    std::size_t at_ = 0;

    auto peek() const -> const Token& { return toks_[at_]; }
    auto next() -> const Token& { return toks_[at_++]; }
    auto accept(Tok k) -> bool {
        if (peek().kind != k) return false;
        ++at_;
        return true;
    }

    auto implication() -> Formula {
        Formula lhs = interpretation();
        if (accept(Tok::Imp)) return Formula::implies(lhs, implication());
        return lhs;
    }

    auto interpretation() -> Formula {
        Formula lhs = disjunction();
        if (!accept(Tok::Rhd)) return lhs;
        Formula rhs = disjunction();
        if (peek().kind == Tok::Rhd)
            throw ParseError(peek().pos, "'|>' is not associative; add parentheses");
        return Formula::rhd(lhs, rhs);
    }

    auto disjunction() -> Formula {
        Formula acc = conjunction();
        while (accept(Tok::Or)) acc = Formula::disj(acc, conjunction());
        return acc;
    }

    auto conjunction() -> Formula {
        Formula acc = unary();
        while (accept(Tok::And)) acc = Formula::conj(acc, unary());
        return acc;
    }

    auto unary() -> Formula {
        if (accept(Tok::Not)) return Formula::neg(unary());
        if (accept(Tok::Box)) return Formula::box(unary());
        if (accept(Tok::Dia)) return Formula::dia(unary());
        return atom();
    }

    auto atom() -> Formula {
        const Token& t = next();
        switch (t.kind) {
        case Tok::False: return Formula::bot();
        case Tok::True: return Formula::top();
        case Tok::Ident: return Formula::var(t.text);
        case Tok::LParen: {
            Formula f = implication();
            if (!accept(Tok::RParen)) throw ParseError(peek().pos, "expected ')' but found " + describe(peek()));
            return f;
        }
        default: throw ParseError(t.pos, "expected a formula but found " + describe(t));
        }
    }
};

void collect(Formula f, std::set<Formula, StructuralLess>& out) {
    if (!out.insert(f).second) return;
    switch (f.kind()) {
    case Kind::Implies:
    case Kind::Rhd:
        collect(f.left(), out);
        collect(f.right(), out);
        break;
    case Kind::Box: collect(f.inner(), out); break;
    default: break;
    }
}

}  // namespace

auto parse(std::string_view text) -> Formula { return Parser(text).run(); }

auto print(Formula f) -> std::string { return f.text(); }

auto subformulas(Formula f) -> std::vector<Formula> {
    std::set<Formula, StructuralLess> s;
    collect(f, s);
    return {s.begin(), s.end()};
}

auto variables(Formula f) -> std::vector<std::string> {
    std::set<std::string> names;
    for (Formula g : subformulas(f))
        if (g.is_var()) names.insert(g.name());
    return {names.begin(), names.end()};
}

auto modal_depth(Formula f) -> std::size_t {
    switch (f.kind()) {
    case Kind::Implies: return std::max(modal_depth(f.left()), modal_depth(f.right()));
    case Kind::Box: return 1 + modal_depth(f.inner());
    case Kind::Rhd: return 1 + std::max(modal_depth(f.left()), modal_depth(f.right()));
    default: return 0;
    }
}

auto substitute(Formula f, const std::unordered_map<std::string, Formula>& sigma) -> Formula {
    switch (f.kind()) {
    case Kind::Bot: return f;
    case Kind::Var: {
        auto it = sigma.find(f.name());
        return it == sigma.end() ? f : it->second;
    }
    case Kind::Implies: return Formula::implies(substitute(f.left(), sigma), substitute(f.right(), sigma));
    case Kind::Box: return Formula::box(substitute(f.inner(), sigma));
    case Kind::Rhd: return Formula::rhd(substitute(f.left(), sigma), substitute(f.right(), sigma));
    }
    return f;
}

auto AdequateSet::position(Formula f) const -> std::size_t {
    auto it = index.find(f);
    if (it == index.end()) throw std::out_of_range("formula not in adequate set: " + f.text());
    return it->second;
}

auto AdequateSet::find(Formula f) const -> std::optional<std::size_t> {
    auto it = index.find(f);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

auto rhd_pool(const std::vector<Formula>& fs) -> std::vector<Formula> {
    std::set<Formula, StructuralLess> pool;
    for (Formula f : fs) {
        if (!f.is_rhd()) continue;
        pool.insert(f.left());
        pool.insert(f.right());
    }
    return {pool.begin(), pool.end()};
}

auto adequate_set(const std::vector<Formula>& seeds) -> AdequateSet {
    std::set<Formula, StructuralLess> members;
    for (Formula s : seeds) collect(s, members);
    collect(Formula::rhd(Formula::bot(), Formula::bot()), members);

    for (bool changed = true; changed;) {
        std::size_t before = members.size();
        std::vector<Formula> snapshot(members.begin(), members.end());
        for (Formula f : snapshot) collect(single_negation(f), members);
        auto pool = rhd_pool({members.begin(), members.end()});
        for (Formula a : pool) {
            for (Formula b : pool) collect(Formula::rhd(a, b), members);
            Formula boxed = Formula::box(single_negation(a));
            collect(boxed, members);
            collect(single_negation(boxed), members);
        }
        changed = members.size() != before;
    }

    AdequateSet phi;
    phi.formulas.assign(members.begin(), members.end());
    for (std::size_t i = 0; i < phi.formulas.size(); ++i) {
        phi.index.emplace(phi.formulas[i], i);
        if (phi.formulas[i].is_box()) phi.boxed.push_back(i);
        if (phi.formulas[i].is_rhd()) phi.rhd.push_back(i);
    }
    phi.negation.resize(phi.formulas.size());
    for (std::size_t i = 0; i < phi.formulas.size(); ++i)
        phi.negation[i] = phi.position(single_negation(phi.formulas[i]));
    return phi;
}

auto adequate_set(Formula f) -> AdequateSet { return adequate_set(std::vector<Formula>{f}); }

auto adequate_set_violation(const AdequateSet& phi) -> std::optional<std::string> {
    Formula bb = Formula::rhd(Formula::bot(), Formula::bot());
    if (!phi.contains(bb)) return "missing false |> false";
    for (std::size_t i = 0; i < phi.size(); ++i) {
        Formula f = phi.formulas[i];
        if (phi.index.at(f) != i) return "index mismatch at " + f.text();
        if (i > 0 && !StructuralLess{}(phi.formulas[i - 1], f)) return "ordering broken at " + f.text();
        for (Formula g : subformulas(f))
            if (!phi.contains(g)) return "not closed under subformulas: " + g.text() + " of " + f.text();
        if (!phi.contains(single_negation(f))) return "not closed under negation: " + f.text();
    }
    auto pool = rhd_pool(phi.formulas);
    for (Formula a : pool) {
        for (Formula b : pool) {
            Formula ab = Formula::rhd(a, b);
            if (!phi.contains(ab)) return "missing pair " + ab.text();
        }
        Formula boxed = Formula::box(single_negation(a));
        if (!phi.contains(boxed)) return "missing box augmentation " + boxed.text();
    }
    return std::nullopt;
}

}  // namespace ilw
