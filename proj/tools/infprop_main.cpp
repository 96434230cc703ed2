// infprop command line: check, normalize, propagate, emit-rules, symbolic, rewrite, serve.
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "infprop/eval.hpp"
#include "infprop/io.hpp"
#include "infprop/normalize.hpp"
#include "infprop/oracle.hpp"
#include "infprop/propagate.hpp"
#include "infprop/rules.hpp"
#include "infprop/service.hpp"
#include "infprop/symbolic.hpp"

using namespace infprop;

namespace {

// exit 1: the input is at fault
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Problem load(const std::string& path) {
    Problem p;
    try {
        p = parse_problem(read_input(path));
    } catch (const ParseError& e) {
        throw InputError((path.empty() ? std::string("<stdin>") : path) + ":" + e.what());
    }
    auto diags = validate(p.theory, p.vocabulary);
    if (!diags.empty()) {
        std::string msg;
        for (auto& d : diags) msg += (msg.empty() ? "" : "\n") + d.kind + ": " + d.message;
        throw InputError(msg);
    }
    return p;
}

std::vector<InfSentence> symbolic_infs(const Problem& p, Vocabulary& voc) {
    if (!p.theory.definitions().empty()) throw InputError("symbolic propagation does not cover definitions");
    PropagateConfig cfg;
    auto plan = plan_propagation(p.theory, p.vocabulary, cfg);
    voc = plan.vocabulary;
    return plan.infs;
}

SymbolicStructure symbolic_run(const Problem& p, std::optional<std::size_t> rounds, std::size_t max_size) {
    Vocabulary voc;
    auto infs = symbolic_infs(p, voc);
    std::map<std::string, InputMode> modes(p.inputs.begin(), p.inputs.end());
    auto phi0 = initial_symbolic(voc, modes);
    SymbolicBudget b;
    b.rounds = rounds;
    b.max_query_size = max_size;
    return symbolic_propagate(infs, phi0, b);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint propagation for FO(ID) with aggregates"};
    app.require_subcommand(1);

    std::string file;
    auto add_file = [&](CLI::App* sub) { sub->add_option("file", file, "problem file (default: stdin)"); };

    auto* check = app.add_subcommand("check", "parse and validate a problem");
    add_file(check);

    bool enf = false, inf = false;
    auto* normalize = app.add_subcommand("normalize", "print the ENF or INF form of the theory");
    add_file(normalize);
    auto* enf_flag = normalize->add_flag("--enf", enf, "equivalence normal form");
    normalize->add_flag("--inf", inf, "implicational normal form")->excludes(enf_flag);

    bool oracle = false, trace = false, keep_aux = false;
    std::optional<std::size_t> budget;
    auto* prop = app.add_subcommand("propagate", "propagate the theory over the structure");
    add_file(prop);
    prop->add_flag("--oracle", oracle, "complete propagation by model enumeration (small inputs only)");
    prop->add_flag("--trace", trace, "print the refinement steps");
    prop->add_option("--budget", budget, "maximum number of propagator applications")->check(CLI::PositiveNumber);
    prop->add_flag("--keep-aux", keep_aux, "keep auxiliary predicates in the output");

    auto* emit = app.add_subcommand("emit-rules", "print the positive rule set of the INF sentences");
    add_file(emit);

    std::optional<std::size_t> rounds;
    std::size_t max_query = 20000;
    auto* sym = app.add_subcommand("symbolic", "symbolic propagation over the input predicates");
    add_file(sym);
    sym->add_option("--rounds", rounds, "rounds over the INF sentences")->check(CLI::PositiveNumber);
    sym->add_option("--max-query-size", max_query, "node cap per query")->check(CLI::PositiveNumber);

    std::string query;
    bool certain = false, possible = false;
    auto* rw = app.add_subcommand("rewrite", "rewrite a query over the input predicates");
    add_file(rw);
    rw->add_option("--query", query, "query such as \"{ c : Selected(c) }\"")->required();
    auto* cflag = rw->add_flag("--certain", certain, "certain answers only");
    rw->add_flag("--possible", possible, "possible answers only")->excludes(cflag);
    rw->add_option("--rounds", rounds, "rounds over the INF sentences")->check(CLI::PositiveNumber);
    rw->add_option("--max-query-size", max_query, "node cap per query")->check(CLI::PositiveNumber);

    int port = 8080;
    std::string host = "127.0.0.1";
    auto* srv = app.add_subcommand("serve", "run the HTTP session service");
    srv->add_option("--port", port, "port")->check(CLI::Range(1, 65535));
    srv->add_option("--host", host, "address to bind");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*check) {
            auto p = load(file);
            std::size_t nd = p.theory.definitions().size();
            std::cout << "ok: " << p.vocabulary.predicates().size() << " predicates, " << p.domain().size()
                      << " elements, " << p.theory.sentences().size() << " sentences, " << nd << " definitions\n";
        } else if (*normalize) {
            auto p = load(file);
            if (!enf && !inf) throw InputError("normalize needs --enf or --inf");
            if (enf) {
                auto fe = eliminate_functions(p.theory, p.vocabulary);
                for (auto& e : to_enf(fe.theory, fe.vocabulary).sentences) std::cout << to_string(e) << ".\n";
            } else {
                for (auto& s : theory_to_inf(p.theory, p.vocabulary).infs) std::cout << to_string(s) << ".\n";
            }
        } else if (*prop) {
            auto p = load(file);
            if (oracle) {
                auto r = complete_propagate(p.theory, p.vocabulary, p.structure);
                if (!r.three_valued()) std::cout << "// inconsistent\n";
                std::cout << print_structure(r);
            } else {
                PropagateConfig cfg;
                cfg.budget = budget;
                cfg.restrict_output = !keep_aux;
                auto r = propagate(p.theory, p.vocabulary, p.structure, cfg);
                if (trace) {
                    std::size_t k = 0;
                    for (auto& st : r.trace.steps) {
                        std::cout << "// step " << ++k << " "
                                  << (st.propagator < 0 ? std::string("input") : r.trace.propagators[st.propagator]);
                        if (st.changes.empty()) std::cout << " inconsistent";
                        for (auto& c : st.changes) std::cout << " " << to_string(c, r.working);
                        std::cout << "\n";
                    }
                    for (std::size_t j = 0; j < r.trace.propagators.size(); ++j)
                        std::cout << "// " << r.trace.propagators[j] << ": " << r.describe(static_cast<int>(j)) << "\n";
                }
                if (!r.trace.stabilized) std::cout << "// budget exhausted after " << r.trace.applications << " applications\n";
                if (!r.structure.three_valued()) std::cout << "// inconsistent\n";
                std::cout << print_structure(r.structure);
            }
        } else if (*emit) {
            auto p = load(file);
            auto plan = plan_propagation(p.theory, p.vocabulary);
            if (!plan.definitions.empty()) std::cout << "// definitions propagate through their well-founded model, not rules\n";
            std::cout << to_datalog(emit_rule_set(plan.infs));
        } else if (*sym) {
            auto p = load(file);
            std::cout << print_symbolic(symbolic_run(p, rounds, max_query));
        } else if (*rw) {
            auto p = load(file);
            Vocabulary voc;
            symbolic_infs(p, voc);
            QueryDef q;
            try {
                q = parse_query(query, voc);
            } catch (const ParseError& e) {
                throw InputError(std::string("query:") + e.what());
            }
            auto phi = symbolic_run(p, rounds, max_query);
            if (!possible) std::cout << "certain = " << to_string(rewrite_certain(phi, q)) << ".\n";
            if (!certain) std::cout << "possible = " << to_string(rewrite_possible(phi, q)) << ".\n";
        } else if (*srv) {
            SessionStore store;
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!serve(store, host, port)) throw InputError("cannot listen on port " + std::to_string(port));
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const OracleLimit& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
