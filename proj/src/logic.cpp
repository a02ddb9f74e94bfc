#include "ilw/logic.hpp"

#include <stdexcept>

namespace ilw {

auto principle_name(Principle p) -> std::string_view {
    switch (p) {
    case Principle::P: return "P";
    case Principle::M: return "M";
    case Principle::M0: return "M0";
    case Principle::R: return "R";
    case Principle::W: return "W";
    }
    return "?";
}

auto parse_principle(std::string_view s) -> Principle {
    for (Principle p : all_principles())
        if (principle_name(p) == s) return p;
    throw std::invalid_argument("unknown principle '" + std::string(s) + "'");
}

auto all_principles() -> const std::vector<Principle>& {
    static const std::vector<Principle> ps{Principle::P, Principle::M, Principle::M0, Principle::R, Principle::W};
    return ps;
}

auto Logic::parse(std::string_view name) -> Logic {
    if (name.substr(0, 2) != "IL") throw std::invalid_argument("logic name must start with IL: '" + std::string(name) + "'");
    Logic l;
    std::string_view rest = name.substr(2);
    while (!rest.empty()) {
        Principle p;
        if (rest.substr(0, 2) == "M0") {
            p = Principle::M0;
            rest.remove_prefix(2);
        } else {
            p = parse_principle(rest.substr(0, 1));
            rest.remove_prefix(1);
        }
        l.bits_ |= 1U << static_cast<unsigned>(p);
    }
    return l;
}

auto Logic::with(std::vector<Principle> ps) -> Logic {
    Logic l;
    for (Principle p : ps) l.bits_ |= 1U << static_cast<unsigned>(p);
    return l;
}

auto Logic::principles() const -> std::vector<Principle> {
    std::vector<Principle> out;
    for (Principle p : all_principles())
        if (has(p)) out.push_back(p);
    return out;
}

auto Logic::name() const -> std::string {
    std::string s = "IL";
    for (Principle p : principles()) s += principle_name(p);
    return s;
}

}  // namespace ilw
