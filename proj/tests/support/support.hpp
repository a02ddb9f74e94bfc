#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ilw/formula.hpp"
#include "ilw/genveltman.hpp"
#include "ilw/model_io.hpp"
#include "ilw/veltman.hpp"

namespace support {

inline auto fixture_path(const std::string& rel) -> std::string { return std::string(ILW_FIXTURES) + "/" + rel; }

inline auto read_fixture(const std::string& rel) -> std::string {
    std::ifstream in(fixture_path(rel));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline auto ordinary(const std::string& name) -> ilw::OrdinaryModel {
    return std::get<ilw::OrdinaryModel>(ilw::load_model(fixture_path("models/" + name)));
}

inline auto generalised(const std::string& name) -> ilw::GeneralisedModel {
    return std::get<ilw::GeneralisedModel>(ilw::load_model(fixture_path("models/" + name)));
}

inline auto F(const std::string& s) -> ilw::Formula { return ilw::parse(s); }

// Straight recursion on the forcing clauses, no memo, no bitsets.
inline auto naive_force(const ilw::OrdinaryModel& m, std::size_t w, ilw::Formula f) -> bool {
    using ilw::Kind;
    switch (f.kind()) {
        case Kind::Bot:
            return false;
        case Kind::Var: {
            auto it = m.valuation.find(f.name());
            return it != m.valuation.end() && it->second.test(w);
        }
        case Kind::Implies:
            return !naive_force(m, w, f.left()) || naive_force(m, w, f.right());
        case Kind::Box:
            for (std::size_t v = 0; v < m.size(); ++v)
                if (m.R[w].test(v) && !naive_force(m, v, f.inner())) return false;
            return true;
        case Kind::Rhd:
            for (std::size_t u = 0; u < m.size(); ++u) {
                if (!m.R[w].test(u) || !naive_force(m, u, f.left())) continue;
                bool found = false;
                for (std::size_t v = 0; v < m.size() && !found; ++v)
                    found = m.S[w][u].test(v) && naive_force(m, v, f.right());
                if (!found) return false;
            }
            return true;
    }
    return false;
}

// Same for generalised models: some listed (u, V0) with V0 inside the
// consequent's extension, read through monotonicity.
inline auto naive_force_gen(const ilw::GeneralisedModel& m, std::size_t w, ilw::Formula f) -> bool {
    using ilw::Kind;
    switch (f.kind()) {
        case Kind::Bot:
            return false;
        case Kind::Var: {
            auto it = m.valuation.find(f.name());
            return it != m.valuation.end() && it->second.test(w);
        }
        case Kind::Implies:
            return !naive_force_gen(m, w, f.left()) || naive_force_gen(m, w, f.right());
        case Kind::Box:
            for (std::size_t v = 0; v < m.size(); ++v)
                if (m.R[w].test(v) && !naive_force_gen(m, v, f.inner())) return false;
            return true;
        case Kind::Rhd:
            for (std::size_t u = 0; u < m.size(); ++u) {
                if (!m.R[w].test(u) || !naive_force_gen(m, u, f.left())) continue;
                bool found = false;
                for (const auto& e : m.S[w]) {
                    if (e.u != u || found) continue;
                    bool inside = true;
                    for (std::size_t v = 0; v < m.size(); ++v)
                        if (e.V.test(v) && (!m.R[w].test(v) || !naive_force_gen(m, v, f.right()))) inside = false;
                    found = inside;
                }
                if (!found) return false;
            }
            return true;
    }
    return false;
}

}  // namespace support
