#include "ilw/model_io.hpp"

#include <fstream>
#include <sstream>

namespace ilw {

using nlohmann::json;

namespace {

auto members(const WorldSet& s) -> std::vector<std::size_t> {
    std::vector<std::size_t> out;
    for (auto i = s.find_first(); i != WorldSet::npos; i = s.find_next(i)) out.push_back(i);
    return out;
}

template <class M>
auto lookup(const M& m, const json& name) -> std::size_t {
    if (!name.is_string()) throw ModelFormatError("world names must be strings, got " + name.dump());
    try {
        return m.world(name.get<std::string>());
    } catch (const UnknownWorld& e) {
        throw ModelFormatError(e.what());
    }
}

auto world_names(const json& j) -> std::vector<std::string> {
    if (!j.contains("worlds") || !j["worlds"].is_array()) throw ModelFormatError("missing 'worlds' array");
    std::vector<std::string> names;
    for (const auto& w : j["worlds"]) {
        if (!w.is_string()) throw ModelFormatError("world names must be strings");
        if (std::find(names.begin(), names.end(), w.get<std::string>()) != names.end())
            throw ModelFormatError("duplicate world '" + w.get<std::string>() + "'");
        names.push_back(w.get<std::string>());
    }
    return names;
}

template <class M>
void read_common(M& m, const json& j) {
    if (j.contains("R")) {
        for (const auto& e : j["R"]) {
            if (!e.is_array() || e.size() != 2) throw ModelFormatError("R entries are [u, v] pairs");
            m.add_r(lookup(m, e[0]), lookup(m, e[1]));
        }
    }
    if (j.contains("valuation")) {
        for (const auto& [var, ws] : j["valuation"].items()) {
            m.valuation[var] = WorldSet(m.size());
            for (const auto& w : ws) m.set_true(var, lookup(m, w));
        }
    }
}

template <class M>
void write_common(const M& m, json& j) {
    j["worlds"] = m.worlds;
    json r = json::array();
    for (std::size_t u = 0; u < m.size(); ++u)
        for (std::size_t v : members(m.R[u])) r.push_back({m.worlds[u], m.worlds[v]});
    j["R"] = r;
    json val = json::object();
    for (const auto& [var, ext] : m.valuation) {
        json ws = json::array();
        for (std::size_t w : members(ext)) ws.push_back(m.worlds[w]);
        val[var] = ws;
    }
    j["valuation"] = val;
}

auto quote(const std::string& s) -> std::string {
    std::string out = "\"";
    for (char c : s) {
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

template <class M>
void dot_worlds(const M& m, std::ostringstream& out) {
    for (std::size_t w = 0; w < m.size(); ++w) {
        std::string vars;
        for (const auto& [var, ext] : m.valuation)
            if (ext.test(w)) vars += (vars.empty() ? "" : ",") + var;
        out << "  " << quote(m.worlds[w]) << " [label=" << quote(vars.empty() ? m.worlds[w] : m.worlds[w] + "\n" + vars)
            << "];\n";
    }
    for (std::size_t u = 0; u < m.size(); ++u)
        for (std::size_t v : members(m.R[u])) out << "  " << quote(m.worlds[u]) << " -> " << quote(m.worlds[v]) << ";\n";
}

}  // namespace

auto ordinary_from_json(const json& j) -> OrdinaryModel {
    OrdinaryModel m = OrdinaryModel::with_worlds(world_names(j));
    read_common(m, j);
    if (j.contains("S")) {
        for (const auto& [w, pairs] : j["S"].items()) {
            std::size_t wi = lookup(m, json(w));
            for (const auto& e : pairs) {
                if (!e.is_array() || e.size() != 2) throw ModelFormatError("S entries are [u, v] pairs");
                m.add_s(wi, lookup(m, e[0]), lookup(m, e[1]));
            }
        }
    }
    if (j.value("complete_frame", false)) close_frame(m);
    return m;
}

auto generalised_from_json(const json& j) -> GeneralisedModel {
    GeneralisedModel m = GeneralisedModel::with_worlds(world_names(j));
    read_common(m, j);
    if (j.contains("S")) {
        for (const auto& [w, entries] : j["S"].items()) {
            std::size_t wi = lookup(m, json(w));
            for (const auto& e : entries) {
                if (!e.is_object() || !e.contains("u") || !e.contains("V"))
                    throw ModelFormatError("generalised S entries are {\"u\": .., \"V\": [..]}");
                WorldSet V(m.size());
                for (const auto& v : e["V"]) V.set(lookup(m, v));
                m.add_s(wi, lookup(m, e["u"]), V);
            }
        }
    }
    if (j.value("complete_frame", false)) close_frame(m);
    return m;
}

auto model_from_json(const json& j) -> AnyModel {
    if (!j.is_object()) throw ModelFormatError("model must be a JSON object");
    std::string kind = j.value("type", "ordinary");
    if (kind == "ordinary") return ordinary_from_json(j);
    if (kind == "generalised") return generalised_from_json(j);
    throw ModelFormatError("unknown model kind '" + kind + "'");
}

auto to_json(const OrdinaryModel& m) -> json {
    json j;
    j["type"] = "ordinary";
    write_common(m, j);
    json s = json::object();
    for (std::size_t w = 0; w < m.size(); ++w) {
        json pairs = json::array();
        for (std::size_t u = 0; u < m.size(); ++u)
            for (std::size_t v : members(m.S[w][u])) pairs.push_back({m.worlds[u], m.worlds[v]});
        if (!pairs.empty()) s[m.worlds[w]] = pairs;
    }
    j["S"] = s;
    return j;
}

auto to_json(const GeneralisedModel& m) -> json {
    json j;
    j["type"] = "generalised";
    write_common(m, j);
    json s = json::object();
    for (std::size_t w = 0; w < m.size(); ++w) {
        json entries = json::array();
        for (const SEntry& e : m.S[w]) {
            json vs = json::array();
            for (std::size_t v : members(e.V)) vs.push_back(m.worlds[v]);
            entries.push_back({{"u", m.worlds[e.u]}, {"V", vs}});
        }
        if (!entries.empty()) s[m.worlds[w]] = entries;
    }
    j["S"] = s;
    return j;
}

auto load_model(const std::string& path) -> AnyModel {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ModelFormatError(path + ": " + e.what());
    }
    return model_from_json(j);
}

auto to_dot(const OrdinaryModel& m, const std::string& name) -> std::string {
    std::ostringstream out;
    out << "digraph " << quote(name) << " {\n";
    dot_worlds(m, out);
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t u = 0; u < m.size(); ++u)
            for (std::size_t v : members(m.S[w][u])) {
                if (u == v || m.R[u].test(v)) continue;
                out << "  " << quote(m.worlds[u]) << " -> " << quote(m.worlds[v])
                    << " [style=dashed, label=" << quote("S_" + m.worlds[w]) << "];\n";
            }
    out << "}\n";
    return out.str();
}

auto to_dot(const GeneralisedModel& m, const std::string& name) -> std::string {
    std::ostringstream out;
    out << "digraph " << quote(name) << " {\n";
    dot_worlds(m, out);
    // one point node per listed (u, V), fanning out to the members of V;
    // the quasi-reflexive (u, {u}) entries are left out
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t k = 0; k < m.S[w].size(); ++k) {
            const SEntry& e = m.S[w][k];
            if (e.V.count() == 1 && e.V.test(e.u)) continue;
            std::string hub = "S_" + m.worlds[w] + "#" + std::to_string(k);
            out << "  " << quote(hub) << " [shape=point];\n";
            out << "  " << quote(m.worlds[e.u]) << " -> " << quote(hub) << " [style=dashed, arrowhead=none, label="
                << quote("S_" + m.worlds[w]) << "];\n";
            for (std::size_t v : members(e.V))
                out << "  " << quote(hub) << " -> " << quote(m.worlds[v]) << " [style=dashed];\n";
        }
    out << "}\n";
    return out.str();
}

}  // namespace ilw
