// Command-line entry point. Reports are JSON on stdout.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ilw/decide.hpp"
#include "ilw/formula.hpp"
#include "ilw/genveltman.hpp"
#include "ilw/labels.hpp"
#include "ilw/logic.hpp"
#include "ilw/model_io.hpp"
#include "ilw/proofcheck.hpp"
#include "ilw/veltman.hpp"

namespace {

using nlohmann::json;
using namespace ilw;

constexpr int kExitUsage = 64;
constexpr int kExitIO = 66;
constexpr int kExitInternal = 70;
constexpr int kReportVersion = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

auto report(const std::string& command) -> json { return json{{"version", kReportVersion}, {"command", command}}; }

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

auto parse_formula(const std::string& text) -> Formula {
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw UsageError("formula '" + text + "': " + e.what());
    }
}

auto parse_formulas(const std::vector<std::string>& texts) -> std::vector<Formula> {
    std::vector<Formula> out;
    for (const auto& t : texts) out.push_back(parse_formula(t));
    return out;
}

// "A, B, C" -> label; formulas never contain commas
auto parse_label(const std::string& text) -> Label {
    std::vector<Formula> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_formula(item));
    return make_label(out);
}

auto labels_json(const Label& l) -> json {
    json a = json::array();
    for (Formula f : l) a.push_back(print(f));
    return a;
}

auto names(const OrdinaryModel& m, const std::vector<std::size_t>& ws) -> json {
    json a = json::array();
    for (std::size_t w : ws) a.push_back(m.worlds.at(w));
    return a;
}

auto need_ordinary(const AnyModel& any) -> const OrdinaryModel& {
    if (const auto* m = std::get_if<OrdinaryModel>(&any)) return *m;
    throw UsageError("this command needs an ordinary model");
}

auto world_of(const OrdinaryModel& m, const std::string& name) -> std::size_t {
    try {
        return m.world(name);
    } catch (const UnknownWorld& e) {
        throw UsageError(e.what());
    }
}

auto parse_logic(const std::string& name) -> Logic {
    try {
        return Logic::parse(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write " + path);
    out << text;
}

auto read_file(const std::string& path) -> std::string {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

auto violation_json(const std::optional<Violation>& v) -> json {
    if (!v) return nullptr;
    return json{{"clause", v->clause}, {"witness", v->witness}, {"message", v->message()}};
}

auto gen_counterexample(const GeneralisedModel& m, const std::optional<GenCounterexample>& c) -> json {
    if (!c) return json{{"ok", true}};
    json ws = json::array();
    for (std::size_t w : c->worlds) ws.push_back(m.worlds.at(w));
    json V = json::array();
    for (auto i = c->V.find_first(); i != WorldSet::npos; i = c->V.find_next(i)) V.push_back(m.worlds.at(i));
    return json{{"ok", false}, {"counterexample", ws}, {"V", V}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Workbench for interpretability logics over Veltman semantics"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "Seed for every random choice")->default_val(1);

    std::string formula_text, model_path, world, logic_name = "ILW", out_path, emit_path, dot_path, script_path;
    std::string x_name, y_name, label_text_arg, pivot_text, method = "construct", principle_name_arg;
    std::vector<std::string> pool_texts, base_texts, chain_names;
    std::size_t bound = 4, trials = 200, per_model = 20;
    bool strict = false, allow_violating = false;

    auto* c_parse = app.add_subcommand("parse", "Parse and pretty-print a formula");
    c_parse->add_option("--formula", formula_text)->required();

    auto* c_eval = app.add_subcommand("eval", "Force a formula at a world");
    c_eval->add_option("--model", model_path)->required();
    c_eval->add_option("--world", world)->required();
    c_eval->add_option("--formula", formula_text)->required();

    auto* c_validate = app.add_subcommand("validate", "Check the Veltman frame clauses of a model");
    c_validate->add_option("--model", model_path)->required();

    auto* c_conditions = app.add_subcommand("conditions", "Check frame conditions per principle");
    c_conditions->add_option("--model", model_path)->required();
    c_conditions->add_flag("--strict", strict, "Generalised W: quantify over all supersets");

    auto* c_decide = app.add_subcommand("decide", "Decide a formula up to a model-size bound");
    c_decide->add_option("--formula", formula_text)->required();
    c_decide->add_option("--logic", logic_name)->default_val("ILW");
    c_decide->add_option("--bound", bound)->default_val(4);
    c_decide->add_option("--method", method, "construct (ILW only) or search")->default_val("construct");
    c_decide->add_option("--emit", emit_path, "Write the countermodel as JSON");
    c_decide->add_option("--dot", dot_path, "Write the countermodel as DOT");

    auto* c_labels = app.add_subcommand("labels", "Assuring-successor and box-set queries");
    c_labels->add_option("--model", model_path)->required();
    c_labels->add_option("--x", x_name)->required();
    c_labels->add_option("--y", y_name)->required();
    c_labels->add_option("--label", label_text_arg, "Comma-separated formulas")->default_val("");
    c_labels->add_option("--pool", pool_texts, "Pool formula (repeatable)");

    auto* c_closure = app.add_subcommand("closure", "Full closure of a label within an adequate set");
    c_closure->add_option("--formula", formula_text, "Seed of the adequate set; its MCS is the context")->required();
    c_closure->add_option("--label", label_text_arg, "Comma-separated formulas")->default_val("");
    c_closure->add_option("--bound", bound)->default_val(4);
    c_closure->add_option("--logic", logic_name)->default_val("ILW");

    auto* c_qlabels = app.add_subcommand("qlabels", "Iterated Q labels along a chain");
    c_qlabels->add_option("--model", model_path)->required();
    c_qlabels->add_option("--chain", chain_names, "Worlds w_0 .. w_n")->required()->delimiter(',');
    c_qlabels->add_option("--base", base_texts, "Labels S_1 .. S_n, one per flag, comma-separated")->required();
    c_qlabels->add_option("--pivot", pivot_text)->required();
    c_qlabels->add_option("--pool", pool_texts, "Pool formula (repeatable)");

    auto* c_harness = app.add_subcommand("harness", "Labelling-lemma harness on random or given models");
    c_harness->add_option("--principle", principle_name_arg, "P, Pfull, M, M0, R, Rfull or RTrans")->required();
    c_harness->add_option("--trials", trials, "Random models")->default_val(200);
    c_harness->add_option("--per-model", per_model, "Sampled instances per model")->default_val(20);
    c_harness->add_option("--model", model_path, "Use this model instead of random ones");
    c_harness->add_option("--pool", pool_texts, "Pool formula (repeatable); default random");
    c_harness->add_flag("--allow-violating", allow_violating, "Accept a --model that breaks the lemma's frame condition");

    auto* c_proof = app.add_subcommand("proof-check", "Check a Hilbert proof script");
    c_proof->add_option("--script", script_path)->required();
    c_proof->add_option("--logic", logic_name, "Override the script's logic");

    auto* c_dot = app.add_subcommand("export-dot", "Write a model as Graphviz DOT");
    c_dot->add_option("--model", model_path)->required();
    c_dot->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    Rng rng(seed);
    bool deciding = c_decide->parsed();
    try {
        if (c_parse->parsed()) {
            Formula f = parse_formula(formula_text);
            json r = report("parse");
            r["formula"] = print(f);
            r["size"] = f.size();
            r["modal_depth"] = modal_depth(f);
            r["variables"] = variables(f);
            emit(r);
            return 0;
        }
        if (c_eval->parsed()) {
            AnyModel any = load_model(model_path);
            Formula f = parse_formula(formula_text);
            json r = report("eval");
            r["world"] = world;
            r["formula"] = print(f);
            if (const auto* m = std::get_if<OrdinaryModel>(&any)) {
                r["forces"] = force(*m, world_of(*m, world), f);
            } else {
                const auto& g = std::get<GeneralisedModel>(any);
                try {
                    r["forces"] = force_gen(g, world, f);
                } catch (const UnknownWorld& e) {
                    throw UsageError(e.what());
                }
            }
            emit(r);
            return 0;
        }
        if (c_validate->parsed()) {
            AnyModel any = load_model(model_path);
            std::optional<Violation> v;
            if (const auto* m = std::get_if<OrdinaryModel>(&any)) v = validate(*m);
            else v = validate_gen(std::get<GeneralisedModel>(any));
            json r = report("validate");
            r["valid"] = !v.has_value();
            r["violation"] = violation_json(v);
            emit(r);
            return v ? 1 : 0;
        }
        if (c_conditions->parsed()) {
            AnyModel any = load_model(model_path);
            json r = report("conditions");
            json table = json::object();
            if (const auto* m = std::get_if<OrdinaryModel>(&any)) {
                for (Principle p : all_principles()) {
                    auto c = check_condition(*m, p);
                    table[std::string(principle_name(p))] =
                        c ? json{{"ok", false}, {"counterexample", names(*m, *c)}} : json{{"ok", true}};
                }
            } else {
                const auto& g = std::get<GeneralisedModel>(any);
                table["P"] = gen_counterexample(g, check_gen_P(g));
                GenWOptions opts;
                opts.strict = strict;
                table["W"] = gen_counterexample(g, check_gen_W(g, opts));
            }
            r["conditions"] = table;
            emit(r);
            return 0;
        }
        if (deciding) {
            Formula f = parse_formula(formula_text);
            Logic logic = parse_logic(logic_name);
            DecisionResult d;
            if (method == "construct") {
                if (!(logic == Logic::parse("ILW")))
                    throw UsageError("--method construct only applies to ILW; use --method search");
                d = ilw_decide(f, bound).result;
            } else if (method == "search") {
                d = decide_bounded(f, logic, bound);
            } else {
                throw UsageError("unknown method '" + method + "'");
            }
            json r = report("decide");
            r["formula"] = print(f);
            r["logic"] = d.logic;
            r["bound"] = d.bound;
            r["method"] = method;
            r["verdict"] = verdict_name(d.verdict);
            if (d.model) {
                r["model"] = to_json(*d.model);
                r["designated"] = d.model->worlds.at(*d.designated);
                if (!emit_path.empty()) write_file(emit_path, to_json(*d.model).dump(2) + "\n");
                if (!dot_path.empty()) write_file(dot_path, to_dot(*d.model, "countermodel"));
            }
            emit(r);
            return d.verdict == Verdict::Countermodel ? 1 : 0;
        }
        if (c_labels->parsed()) {
            AnyModel any = load_model(model_path);
            const auto& m = need_ordinary(any);
            std::size_t x = world_of(m, x_name), y = world_of(m, y_name);
            Label S = parse_label(label_text_arg);
            auto pool = parse_formulas(pool_texts);
            json r = report("labels");
            r["x"] = x_name;
            r["y"] = y_name;
            r["label"] = labels_json(S);
            r["semantic_assuring"] = semantic_assuring(m, x, y, S, pool);
            r["full_assuring"] = full_assuring(m, x, y, S);
            r["boxdotset"] = labels_json(boxdotset(m, x, S, pool));
            r["boxset"] = labels_json(boxset(m, x, S, pool));
            emit(r);
            return 0;
        }
        if (c_closure->parsed()) {
            Formula f = parse_formula(formula_text);
            Logic logic = parse_logic(logic_name);
            AdequateSet phi = adequate_set(f);
            PhiOracle oracle = PhiOracle::build(phi, logic, bound);
            std::size_t fi = phi.position(f);
            std::optional<std::size_t> gamma;
            for (std::size_t i = 0; i < oracle.mcs().size() && !gamma; ++i)
                if (oracle.mcs()[i][fi]) gamma = i;
            json r = report("closure");
            r["formula"] = print(f);
            r["bound"] = bound;
            r["logic"] = logic.name();
            if (!gamma) {
                r["consistent"] = false;
                emit(r);
                return 0;
            }
            Label S = parse_label(label_text_arg);
            for (Formula s : S)
                if (!phi.contains(s)) throw UsageError(print(s) + " is not in the adequate set of the formula");
            Theory closed = full_closure_phi(oracle, *gamma, label_to_theory(phi, S));
            r["consistent"] = true;
            r["context"] = labels_json(theory_to_label(phi, oracle.mcs()[*gamma]));
            r["label"] = labels_json(S);
            r["closure"] = labels_json(theory_to_label(phi, closed));
            emit(r);
            return 0;
        }
        if (c_qlabels->parsed()) {
            AnyModel any = load_model(model_path);
            const auto& m = need_ordinary(any);
            std::vector<std::size_t> chain;
            for (const auto& n : chain_names) chain.push_back(world_of(m, n));
            std::vector<Label> base;
            for (const auto& b : base_texts) base.push_back(parse_label(b));
            if (chain.size() != base.size() + 1)
                throw UsageError("--chain needs one more world than there are --base labels");
            auto seq = q_labels(m, chain, base, parse_formula(pivot_text), parse_formulas(pool_texts));
            json r = report("qlabels");
            r["chain"] = names(m, chain);
            r["pivot"] = print(seq.pivot);
            json q = json::array();
            for (const auto& l : seq.q) q.push_back(labels_json(l));
            r["q"] = q;
            emit(r);
            return 0;
        }
        if (c_harness->parsed()) {
            LabelLemma lemma;
            try {
                lemma = parse_label_lemma(principle_name_arg);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            std::vector<Formula> fixed_pool = parse_formulas(pool_texts);
            const std::vector<std::string> vars{"p", "q"};
            HarnessOptions opts;
            opts.trials = per_model;
            opts.require_condition = !allow_violating;
            json violations = json::array();
            std::size_t instances = 0, vacuous = 0, models = 0;
            auto run = [&](const OrdinaryModel& m) {
                std::vector<Formula> pool = fixed_pool;
                if (pool.empty()) {
                    for (int k = 0; k < 6; ++k) pool.push_back(random_formula(rng, vars, 2));
                    pool = make_label(pool);
                }
                auto rep = harness_labelling(lemma, m, pool, rng, opts);
                instances += rep.instances;
                vacuous += rep.vacuous;
                ++models;
                for (const auto& v : rep.violations)
                    violations.push_back({{"chain", names(m, v.chain)},
                                          {"S", labels_json(v.S)},
                                          {"T", labels_json(v.T)},
                                          {"conclusion", labels_json(v.conclusion)},
                                          {"failure", v.failure}});
            };
            if (!model_path.empty()) {
                AnyModel any = load_model(model_path);
                const auto& m = need_ordinary(any);
                opts.trials = std::max(trials, per_model);
                run(m);
            } else {
                Logic logic = Logic::with({lemma_principle(lemma)});
                RandomModelOptions mo;
                mo.max_worlds = 5;
                mo.vars = vars;
                for (std::size_t t = 0; t < trials; ++t) run(random_model(rng, logic, mo));
            }
            json r = report("harness");
            r["principle"] = label_lemma_name(lemma);
            r["seed"] = seed;
            r["models"] = models;
            r["instances"] = instances;
            r["vacuous"] = vacuous;
            r["violations"] = violations;
            emit(r);
            return violations.empty() ? 0 : 1;
        }
        if (c_proof->parsed()) {
            ProofScript script;
            try {
                script = parse_proof_script(read_file(script_path));
            } catch (const ScriptSyntaxError& e) {
                throw UsageError(script_path + ": " + e.what());
            }
            Logic logic = c_proof->count("--logic") ? parse_logic(logic_name) : script.logic;
            auto err = check_proof(script, logic);
            json r = report("proof-check");
            r["script"] = script_path;
            r["logic"] = logic.name();
            r["steps"] = script.steps.size();
            r["ok"] = !err;
            if (err) r["error"] = {{"step", err->step}, {"line", err->line}, {"reason", err->reason}};
            emit(r);
            return err ? 1 : 0;
        }
        if (c_dot->parsed()) {
            AnyModel any = load_model(model_path);
            std::string text = std::visit([](const auto& m) { return to_dot(m); }, any);
            if (out_path.empty()) std::cout << text;
            else write_file(out_path, text);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return deciding ? 2 : kExitUsage;
    } catch (const ModelFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return deciding ? 2 : kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return deciding ? 2 : kExitIO;
    } catch (const CeilingExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return deciding ? 2 : kExitUsage;
    } catch (const DecideError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return deciding ? 2 : kExitInternal;
    }
    return kExitUsage;
}
