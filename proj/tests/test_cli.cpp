#include <doctest.h>

#include <array>
#include <fstream>
#include <sstream>
#include <cstdio>
#include <sys/wait.h>

#include <json.hpp>

#include "support/support.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
};

auto run(const std::string& args) -> Run {
    std::string cmd = std::string(ILW_BINARY) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

auto model(const char* name) -> std::string { return "--model " + support::fixture_path(std::string("models/") + name); }

// Just the parts of draft-07 the report schema uses.
class MiniValidator {
public:
    explicit MiniValidator(json root) : root_(std::move(root)) {}

    auto errors(const json& doc) -> std::vector<std::string> {
        errs_.clear();
        check(root_, doc, "$");
        return errs_;
    }

private:
    auto resolve(const json& s) const -> const json& {
        if (!s.contains("$ref")) return s;
        std::string ref = s["$ref"];
        return root_.at(json::json_pointer(ref.substr(1)));
    }

    static auto type_ok(const std::string& t, const json& v) -> bool {
        if (t == "object") return v.is_object();
        if (t == "array") return v.is_array();
        if (t == "string") return v.is_string();
        if (t == "boolean") return v.is_boolean();
        if (t == "integer") return v.is_number_integer();
        if (t == "number") return v.is_number();
        if (t == "null") return v.is_null();
        return false;
    }

    auto matches(const json& s, const json& v) -> bool {
        auto saved = errs_;
        errs_.clear();
        check(s, v, "");
        bool ok = errs_.empty();
        errs_ = saved;
        return ok;
    }

    void check(const json& schema, const json& v, const std::string& at) {
        const json& s = resolve(schema);
        if (s.contains("type")) {
            bool ok = false;
            if (s["type"].is_array())
                for (const auto& t : s["type"]) ok = ok || type_ok(t, v);
            else
                ok = type_ok(s["type"], v);
            if (!ok) errs_.push_back(at + ": wrong type");
        }
        if (s.contains("const") && v != s["const"]) errs_.push_back(at + ": const");
        if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
            errs_.push_back(at + ": not in enum");
        if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
            errs_.push_back(at + ": below minimum");
        if (v.is_object()) {
            if (s.contains("required"))
                for (const auto& k : s["required"])
                    if (!v.contains(k.get<std::string>())) errs_.push_back(at + ": missing " + k.get<std::string>());
            for (const auto& [k, sub] : v.items()) {
                if (s.contains("properties") && s["properties"].contains(k))
                    check(s["properties"][k], sub, at + "." + k);
                else if (s.contains("additionalProperties"))
                    check(s["additionalProperties"], sub, at + "." + k);
            }
        }
        if (v.is_array() && s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], at + "[" + std::to_string(i) + "]");
        if (s.contains("allOf"))
            for (const auto& part : s["allOf"]) check(part, v, at);
        if (s.contains("if") && matches(s["if"], v) && s.contains("then")) check(s["then"], v, at);
    }

    json root_;
    std::vector<std::string> errs_;
};

auto validator() -> MiniValidator {
    return MiniValidator(json::parse(support::read_fixture("../tools/report.schema.json")));
}

auto report(const std::string& args, int want_code) -> json {
    auto r = run(args);
    CAPTURE(args);
    CHECK(r.code == want_code);
    json j = json::parse(r.out);
    auto errs = validator().errors(j);
    CAPTURE(r.out);
    CHECK(errs.empty());
    return j;
}

}  // namespace

TEST_CASE("eval example") {
    auto j = report("eval " + model("fig_no_maximum.json") + " --world w --formula \"r |> (~p | ~q)\"", 0);
    CHECK(j["forces"] == true);
    auto k = report("eval " + model("fig_no_maximum.json") + " --world w --formula \"r |> ~p\"", 0);
    CHECK(k["forces"] == false);
}

TEST_CASE("harness example") {
    auto j = report("harness --principle P --trials 200 --seed 7", 0);
    CHECK(j["violations"] == json::array());
    CHECK(j["instances"].get<int>() > 0);
}

TEST_CASE("same seed, same bytes") {
    for (const char* args : {"harness --principle R --trials 50 --seed 3", "harness --principle M0 --trials 50 --seed 3"}) {
        auto a = run(args), b = run(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
    CHECK(run("harness --principle P --trials 50 --seed 3").out != run("harness --principle P --trials 50 --seed 4").out);
}

TEST_CASE("negative controls through the cli") {
    auto j = report("harness --principle P " + model("control_not_p.json") +
                        " --allow-violating --trials 200 --pool p --pool q --pool \"~p\" --pool \"[]~q\"",
                    1);
    CHECK_FALSE(j["violations"].empty());
    CHECK(run("harness --principle P " + model("control_not_p.json") + " --trials 10").code == 64);
}

TEST_CASE("every subcommand report matches the schema") {
    report("parse --formula \"<>p |> p\"", 0);
    report("validate " + model("fig_downward.json"), 0);
    auto bad = report("validate " + model("gen_qt_bad.json"), 1);
    CHECK(bad["violation"]["witness"] == json({"w", "u", "z"}));
    auto conds = report("conditions " + model("control_not_p.json"), 0);
    CHECK(conds["conditions"]["P"]["ok"] == false);
    CHECK(conds["conditions"]["M"]["ok"] == true);
    auto gen = report("conditions " + model("gen_w_ok.json") + " --strict", 0);
    CHECK(gen["conditions"]["W"]["ok"] == true);
    auto lab = report("labels " + model("nonmax_labels.json") + " --x x --y y --label \"p, q\" --pool q", 0);
    CHECK(lab["semantic_assuring"] == true);
    report("closure --formula \"p |> q\" --label p --bound 3", 0);
    report("qlabels " + model("fig_no_maximum.json") + " --chain w,u1,v1 --base p --base q --pivot r --pool p", 0);
    report("proof-check --script " + support::fixture_path("proofs/loeb_class.proof"), 0);
}

TEST_CASE("decide exit codes") {
    auto loeb = report("decide --formula \"[]([]p -> p) -> []p\" --bound 3", 0);
    CHECK(loeb["verdict"] == "Provable-up-to-bound");
    auto dt = report("decide --formula \"<>true\" --bound 3", 1);
    CHECK(dt["verdict"] == "Countermodel");
    CHECK(dt["model"]["worlds"].size() == 1);
    auto s = report("decide --formula \"p |> q -> q |> p\" --bound 3 --method search --logic IL", 1);
    CHECK(s["method"] == "search");
    CHECK(run("decide --formula \"p |>\"").code == 2);
    CHECK(run("decide --formula p --method construct --logic ILP").code == 2);
}

TEST_CASE("decide writes model and dot files") {
    std::string base = std::string(ILW_SCRATCH) + "/cli_decide";
    auto r = run("decide --formula \"p |> q -> q |> p\" --bound 3 --emit " + base + ".json --dot " + base + ".dot");
    CHECK(r.code == 1);
    auto again = run("validate --model " + base + ".json");
    CHECK(again.code == 0);
    auto dot = run("export-dot --model " + base + ".json");
    CHECK(dot.code == 0);
    std::ifstream in(base + ".dot");
    std::stringstream ss;
    ss << in.rdbuf();
    // same drawing, only the graph name differs
    std::string written = ss.str();
    CHECK(written.rfind("digraph \"countermodel\"", 0) == 0);
    CHECK(written.substr(written.find('\n')) == dot.out.substr(dot.out.find('\n')));
}

TEST_CASE("error exit codes") {
    CHECK(run("").code == 64);
    CHECK(run("eval " + model("fig_no_maximum.json") + " --world w --formula \"p |>\"").code == 64);
    CHECK(run("eval " + model("fig_no_maximum.json") + " --world nowhere --formula p").code == 64);
    CHECK(run("eval --model /nonexistent.json --world w --formula p").code == 66);
    CHECK(run("parse").code == 64);
    CHECK(run("proof-check --script " + support::fixture_path("models/fig_downward.json")).code == 64);
}

TEST_CASE("schema check rejects malformed reports") {
    auto v = validator();
    json j = json::parse(run("parse --formula p").out);
    CHECK(v.errors(j).empty());
    json wrong = j;
    wrong["size"] = "three";
    CHECK_FALSE(v.errors(wrong).empty());
    json missing = j;
    missing.erase("variables");
    CHECK_FALSE(v.errors(missing).empty());
    json unknown = j;
    unknown["command"] = "nope";
    CHECK_FALSE(v.errors(unknown).empty());
}
