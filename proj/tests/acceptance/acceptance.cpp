// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Usage: acceptance [substring-filter]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gen.hpp"
#include "naive.hpp"

#include "infprop/eval.hpp"
#include "infprop/io.hpp"
#include "infprop/normalize.hpp"
#include "infprop/oracle.hpp"
#include "infprop/propagate.hpp"
#include "infprop/rules.hpp"
#include "infprop/symbolic.hpp"

using namespace infprop;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Problem load(const std::string& name) { return parse_problem(read_file(std::string(INFPROP_DATA_DIR) + "/" + name)); }

std::string names(const std::vector<std::vector<std::string>>& v) {
    std::string s;
    for (auto& t : v) {
        if (!s.empty()) s += ",";
        for (std::size_t k = 0; k < t.size(); ++k) s += (k ? " " : "") + t[k];
    }
    return "{" + s + "}";
}

std::string selected(const Structure& s, bool ct) { return names(sorted_tuples(s, *s.signature().find("Selected"), ct)); }

Theory theory_of(std::vector<FormulaPtr> sentences) {
    Theory t;
    for (auto& f : sentences) t.elements.push_back(f);
    return t;
}

// ------------------------------------------------------------------ criteria

Outcome student() {
    auto p = load("student.fop");
    auto t0 = Clock::now();
    auto r = propagate(p.theory, p.vocabulary, p.structure);
    double dt = seconds_since(t0);
    std::string ct = selected(r.structure, true), cf = selected(r.structure, false);
    TV c4 = r.structure.value("Selected", std::vector<std::string>{"c4"});
    Outcome o;
    o.pass = ct == "{c1,c3,m1}" && cf == "{c2,m2}" && c4 == TV::U && dt < 1.0;
    o.detail = "ct=" + ct + " cf=" + cf + " c4=" + tv_char(c4) + " in " + std::to_string(dt) + "s";
    return o;
}

Outcome student_oracle() {
    auto p = load("student.fop");
    auto r = propagate(p.theory, p.vocabulary, p.structure);
    auto o1 = complete_propagate(p.theory, p.vocabulary, p.structure);
    auto o2 = naive::complete(p.theory, p.structure);
    Outcome o;
    o.pass = o1 == r.structure && o2 == r.structure;
    o.detail = o.pass ? "oracle and reference enumeration both equal the propagation result"
                      : "mismatch: oracle ct=" + selected(o1, true) + " cf=" + selected(o1, false);
    return o;
}

Outcome precision_gaps() {
    Vocabulary v;
    for (auto n : {"P", "Q", "R", "Aux"}) v.add_predicate(n, 0);
    auto dom = std::make_shared<Domain>(std::vector<std::string>{"a"});
    auto bottom = Structure(dom, make_signature(v));
    auto top = Structure::top(dom, make_signature(v));
    auto f = [&](const char* s) { return parse_formula(s, v); };

    auto t1 = theory_of({f("P <=> Q"), f("P <=> ~Q")});
    bool a = complete_propagate(t1, v, bottom) == top;
    bool b = sentence_limit(t1, v, bottom) == bottom;

    auto t2 = theory_of({f("P | Q"), f("(P | Q) => R")});
    TV r2 = sentence_limit(t2, v, bottom).value("R", Tuple{});
    auto t3 = theory_of({f("Aux <=> P | Q"), f("Aux"), f("Aux => R")});
    TV r3 = sentence_limit(t3, v, bottom).value("R", Tuple{});

    Outcome o;
    o.pass = a && b && r2 == TV::U && r3 == TV::T;
    o.detail = std::string("complete=top:") + (a ? "yes" : "no") + " limit=bottom:" + (b ? "yes" : "no") +
               " R(T)=" + tv_char(r2) + " R(T')=" + tv_char(r3);
    return o;
}

// Returns the number of mismatches over n sentences; *first gets the first one.
int enf_mismatches(std::uint64_t seed, int n, bool full_vars, std::string* first) {
    gen::Rng rng(seed);
    int bad = 0;
    for (int k = 0; k < n; ++k) {
        int dn = rng.uniform(1, 3);
        auto c = gen::enf_sentence(rng, dn, full_vars);
        auto voc = gen::vocabulary(c.preds);
        auto i = gen::structure(rng, gen::numeric_domain(dn), make_signature(voc), 0.7);
        gen::cap_unknown(rng, i, 16);
        auto infs = enf_to_inf(c.sentence);
        Structure lim = i;
        refine(lim, infs, {});
        lim = apply_inconsistency(lim);
        auto want = naive::complete(theory_of({c.sentence.to_formula()}), i);
        if (lim != want) {
            ++bad;
            if (first && first->empty()) *first = to_string(c.sentence);
        }
    }
    return bad;
}

Outcome enf_precision() {
    std::string first;
    int n = 1000;
    int bad = enf_mismatches(1001, n, false, &first);
    // Same check restricted to sentences whose body literals each mention every head variable.
    int bad_full = enf_mismatches(1002, n, true, nullptr);
    Outcome o;
    o.pass = bad == 0;
    o.detail = std::to_string(n) + " sentences, " + std::to_string(bad) + " mismatches" +
               (first.empty() ? "" : " (first: " + first + ")") + "; literals covering all head variables: " +
               std::to_string(n) + " sentences, " + std::to_string(bad_full) + " mismatches";
    return o;
}

Outcome backend_equivalence() {
    gen::Rng rng(2002);
    int n = 0, bad = 0, inconsistent = 0;
    for (; n < 600; ++n) {
        int dn = rng.uniform(1, 3);
        gen::FormulaOpts o;
        o.preds = gen::predicates(rng, rng.uniform(2, 4), 2);
        o.domain_size = dn;
        o.builtins = true;
        o.max_depth = rng.uniform(1, 3);
        auto infs = gen::inf_set(rng, o, rng.uniform(1, 5));
        auto voc = gen::vocabulary(o.preds);
        auto seed = gen::structure(rng, gen::numeric_domain(dn), make_signature(voc), 0.7, rng.coin(0.1) ? 0.05 : 0);
        Structure lim = seed;
        PropagateConfig cfg;
        cfg.short_circuit = false;
        auto tr = refine(lim, infs, {}, cfg);
        if (tr.inconsistent) ++inconsistent;
        auto lm = least_model(emit_rule_set(infs), tf_encode(seed));
        if (tf_encode(lim) != lm) ++bad;
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = std::to_string(n) + " instances (" + std::to_string(inconsistent) + " reach i), " +
               std::to_string(bad) + " mismatches";
    return o;
}

bool hamiltonian(std::string& why) {
    Vocabulary v;
    v.add_predicate("Edge", 2);
    v.add_predicate("Start", 1);
    v.add_predicate("InHam", 2);
    v.add_predicate("Aux", 3);
    auto f = [&](const char* s) { return parse_formula(s, v); };
    InfSentence s17{{"x", "y"}, f("~Edge(x,y)"), f("~InHam(x,y)")};
    InfSentence s18{{"x", "y"}, f("Start(y)"), f("~InHam(x,y)")};
    InfSentence s19{{"x", "y", "z"}, f("~InHam(x,y) & ~InHam(x,z)"), f("Aux(x,y,z)")};
    auto phi0 = initial_symbolic(v, {{"Edge", InputMode::TwoValued}, {"Start", InputMode::TwoValued}});

    auto same = [&](const QueryDef& q, const char* text) {
        auto want = parse_query(text, v);
        if (q.vars == want.vars && alpha_equal(q.body, want.body)) return true;
        why = "got " + to_string(q) + " want " + text;
        return false;
    };
    bool ok = same(phi0.query("InHam_ct"), "{ x y : false }") && same(phi0.query("Aux_cf"), "{ x y z : false }") &&
              same(phi0.query("Edge_cf"), "{ x y : ~Edge(x,y) }");
    auto p1 = symbolic_inf_step(phi0, s17);
    ok = ok && same(p1.query("InHam_cf"), "{ x y : false | ~Edge(x,y) }");
    auto p2 = symbolic_inf_step(p1, s18);
    ok = ok && same(p2.query("InHam_cf"), "{ x y : false | ~Edge(x,y) | Start(y) }");
    auto p3 = symbolic_inf_step(p2, s19);
    ok = ok && same(p3.query("Aux_ct"),
                    "{ x y z : false | ((false | ~Edge(x,y) | Start(y)) & (false | ~Edge(x,z) | Start(z))) }");
    ok = ok && same(simplify_query(p3.query("Aux_ct")), "{ x y z : (~Edge(x,y) | Start(y)) & (~Edge(x,z) | Start(z)) }");
    auto p = symbolic_propagate({s17, s18, s19}, phi0, SymbolicBudget{1});
    ok = ok && same(p.query("Aux_ct"), "{ x y z : (~Edge(x,y) | Start(y)) & (~Edge(x,z) | Start(z)) }");
    return ok;
}

Outcome symbolic_describes() {
    gen::Rng rng(3003);
    int n = 0, bad = 0, frozen = 0;
    for (; n < 600; ++n) {
        int dn = rng.uniform(1, 3);
        auto src = gen::predicates(rng, rng.uniform(1, 3), 2, "S");
        auto derived = gen::predicates(rng, rng.uniform(1, 2), 2, "T");
        std::vector<Symbol> all = src;
        all.insert(all.end(), derived.begin(), derived.end());
        auto voc = gen::vocabulary(all);
        std::map<std::string, InputMode> modes;
        for (auto& s : src) modes[s.name] = rng.coin(0.6) ? InputMode::TwoValued : InputMode::CtOnly;
        auto phi0 = initial_symbolic(voc, modes);
        gen::FormulaOpts o;
        o.preds = all;
        o.domain_size = dn;
        o.builtins = true;
        o.max_depth = 2;
        auto infs = gen::inf_set(rng, o, rng.uniform(1, 4));
        std::size_t rounds = static_cast<std::size_t>(rng.uniform(1, 2));
        SymbolicBudget b{rounds, std::size_t{1} << 22};
        auto phi = symbolic_propagate(infs, phi0, b);
        if (!phi.frozen.empty()) ++frozen;
        auto e = gen::two_valued(rng, gen::numeric_domain(dn), make_signature(phi0.source));
        Structure concrete = apply_to_structure(phi0, e);
        for (std::size_t k = 0; k < rounds; ++k)
            for (auto& s : infs) concrete = apply_inf(s, concrete);
        if (apply_to_structure(phi, e) != concrete) ++bad;
    }
    std::string why;
    bool ham = hamiltonian(why);
    Outcome o;
    o.pass = bad == 0 && frozen == 0 && ham;
    o.detail = std::to_string(n) + " instances, " + std::to_string(bad) + " mismatches, " + std::to_string(frozen) +
               " frozen; Hamiltonian walk-through " + (ham ? "matches" : "differs: " + why);
    return o;
}

Outcome soundness() {
    gen::Rng rng(4004);
    int n = 0, bad = 0, with_def = 0, with_agg = 0, incons = 0, derived = 0;
    std::size_t max_u = 0;
    std::string first;
    for (; n < 1100; ++n) {
        auto in = gen::theory_instance(rng, true, true, 20);
        if (!in.theory.definitions().empty()) ++with_def;
        for (auto& f : in.theory.sentences())
            if (has_aggregate(f)) {
                ++with_agg;
                break;
            }
        max_u = std::max(max_u, in.structure.count(TV::U));
        auto r = propagate(in.theory, in.vocabulary, in.structure);
        if (r.trace.inconsistent) ++incons;
        else if (r.structure != in.structure) ++derived;
        std::string why;
        if (!leq_p(in.structure, r.structure) || !naive::sound(in.theory, in.structure, r.structure, &why)) {
            ++bad;
            if (first.empty()) first = why;
        }
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = std::to_string(n) + " instances (" + std::to_string(with_def) + " with definitions, " +
               std::to_string(with_agg) + " with aggregates, " + std::to_string(incons) + " inconsistent, " +
               std::to_string(derived) + " others refined, max " +
               std::to_string(max_u) + " u-atoms), " + std::to_string(bad) + " unsound" +
               (first.empty() ? "" : "; first: " + first);
    return o;
}

Outcome foid() {
    Outcome o;
    // {P <- P}
    Vocabulary v;
    v.add_predicate("P", 0);
    Definition d;
    d.rules.push_back(Rule{{}, "P", {}, mk_atom("P")});
    auto dom = std::make_shared<Domain>(std::vector<std::string>{"a"});
    TV p = wfm(d, Structure(dom, make_signature(v))).value("P", Tuple{});
    bool self = p == TV::F;

    // Reach vs transitive closure
    gen::Rng rng(5005);
    Vocabulary rv;
    rv.add_predicate("Edge", 2);
    rv.add_predicate("Reach", 2);
    auto rt = parse_problem("vocabulary { Edge/2 Reach/2 }\ndomain { a }\ntheory {\n define {\n"
                            "  ! x y : Reach(x,y) <- Edge(x,y).\n"
                            "  ! x y : Reach(x,y) <- ? z : Reach(x,z) & Reach(z,y).\n }\n}\n")
                  .theory;
    auto reach_def = rt.definitions().at(0);
    int graphs = 0, reach_bad = 0;
    for (; graphs < 150; ++graphs) {
        int nn = rng.uniform(1, 8);
        std::vector<std::string> names;
        for (int k = 0; k < nn; ++k) names.push_back("n" + std::to_string(k));
        auto dm = std::make_shared<Domain>(names);
        Structure s(dm, make_signature(rv));
        std::vector<std::vector<bool>> adj(nn, std::vector<bool>(nn));
        double dens = rng.uniform(5, 40) / 100.0;
        int edge = *s.signature().find("Edge");
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b) {
                adj[a][b] = rng.coin(dens);
                s.set(edge, s.index({a, b}), adj[a][b] ? TV::T : TV::F);
            }
        auto tc = naive::transitive_closure(adj);
        auto w = wfm(reach_def, s);
        auto pr = propagate(rt, rv, s).structure;
        int reach = *s.signature().find("Reach");
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b) {
                TV want = tc[a][b] ? TV::T : TV::F;
                auto idx = s.index({a, b});
                if (w.get(reach, idx) != want || pr.get(reach, idx) != want) {
                    ++reach_bad;
                    a = b = nn;
                }
            }
    }

    // models of random definitions satisfy the completion
    int defs = 0, models = 0, comp_bad = 0;
    for (; defs < 300; ++defs) {
        int dn = rng.uniform(1, 2);
        auto defined = gen::predicates(rng, rng.uniform(1, 2), 1, "D");
        auto open = gen::predicates(rng, rng.uniform(1, 2), 2, "O");
        std::vector<Symbol> all = defined;
        all.insert(all.end(), open.begin(), open.end());
        gen::FormulaOpts fo;
        fo.preds = all;
        fo.domain_size = dn;
        fo.builtins = true;
        auto def = gen::definition(rng, fo, defined, rng.uniform(1, 3));
        auto voc = gen::vocabulary(all);
        auto comp = completion(def);
        Theory t;
        t.elements.push_back(def);
        Structure bottom(gen::numeric_domain(dn), make_signature(voc));
        if (bottom.count(TV::U) > 14) continue;
        for (auto& m : naive::all_models(t, bottom)) {
            ++models;
            for (auto& c : comp)
                if (naive::eval(m, c) != TV::T) {
                    ++comp_bad;
                    break;
                }
        }
    }
    o.pass = self && reach_bad == 0 && comp_bad == 0 && models > 0;
    o.detail = std::string("wfm{P<-P}: P=") + tv_char(p) + "; Reach on " + std::to_string(graphs) + " digraphs, " +
               std::to_string(reach_bad) + " mismatches; " + std::to_string(models) + " models of " +
               std::to_string(defs) + " definitions, " + std::to_string(comp_bad) + " violate the completion";
    return o;
}

Outcome aggregates() {
    gen::Rng rng(6006);
    static const std::vector<AggFn> fns{AggFn::Card, AggFn::Sum, AggFn::Prod, AggFn::Min, AggFn::Max};
    int sets = 0, bad = 0;
    // Through a structure: P(v, k) with v the value and k a tag so values can repeat.
    Vocabulary v;
    v.add_predicate("P", 2);
    for (; sets < 1200; ++sets) {
        AggFn fn = rng.pick(fns);
        bool nonneg = fn == AggFn::Prod;
        int lo = nonneg ? 0 : -3, hi = 4;
        std::vector<std::string> names;
        for (int x = lo; x <= hi; ++x) names.push_back(std::to_string(x));
        int tags = 3;
        for (int k = 0; k < tags; ++k) names.push_back("k" + std::to_string(k));
        auto dom = std::make_shared<Domain>(names);
        Structure s(dom, make_signature(v));
        int nvals = hi - lo + 1;
        std::vector<double> certain, unknown;
        std::set<std::size_t> chosen;
        int nu = rng.uniform(0, 10), nc = rng.uniform(0, 4);
        auto add = [&](TV tv, std::vector<double>& into) {
            int val = rng.uniform(0, nvals - 1), tag = nvals + rng.uniform(0, tags - 1);
            auto idx = s.index({val, tag});
            if (!chosen.insert(idx).second) return;
            s.set(0, idx, tv);
            into.push_back(lo + val);
        };
        for (int k = 0; k < nu; ++k) add(TV::U, unknown);
        for (int k = 0; k < nc; ++k) add(TV::T, certain);
        for (std::size_t a = 0; a < s.atom_count(0); ++a)
            if (!chosen.count(a)) s.set(0, a, TV::F);
        auto want = naive::subset_bounds(fn, certain, unknown);
        auto cond = mk_atom("P", {mk_var("v"), mk_var("k")});
        auto got = agg_bounds(s, {"v", "k"}, cond, fn);
        auto direct = bounds_of(fn, certain, unknown);
        if (!(got == want) || !(direct == want)) ++bad;
    }

    // aggregate INF propagation vs model enumeration
    int inst = 0, unsound = 0;
    for (int tries = 0; inst < 400 && tries < 20000; ++tries) {
        auto in = gen::theory_instance(rng, false, true, 16);
        bool agg = false;
        for (auto& f : in.theory.sentences()) agg = agg || has_aggregate(f);
        if (!agg) continue;
        ++inst;
        auto r = propagate(in.theory, in.vocabulary, in.structure);
        if (!leq_p(in.structure, r.structure) || !naive::sound(in.theory, in.structure, r.structure)) ++unsound;
    }
    Outcome o;
    o.pass = bad == 0 && unsound == 0;
    o.detail = std::to_string(sets) + " sets, " + std::to_string(bad) + " bound mismatches; " + std::to_string(inst) +
               " aggregate theories, " + std::to_string(unsound) + " unsound";
    return o;
}

Outcome chain() {
    std::vector<int> ns{10, 20, 40, 80};
    std::vector<double> times;
    bool values = true, fast = true;
    std::string detail;
    for (int n : ns) {
        auto p = parse_problem(gen::chain_problem(n));
        double best = 1e9;
        Structure res;
        for (int rep = 0; rep < 3; ++rep) {
            auto t0 = Clock::now();
            res = propagate(p.theory, p.vocabulary, p.structure).structure;
            best = std::min(best, seconds_since(t0));
            if (best > 5) break;
        }
        times.push_back(best);
        if (best >= 10) fast = false;
        std::string dn = "d" + std::to_string(n);
        for (int t = 1; t <= n; ++t)
            if (res.value("Do", std::vector<std::string>{dn, std::to_string(t)}) != TV::F) values = false;
        if (res.value("Do", std::vector<std::string>{dn, std::to_string(n + 1)}) != TV::U) values = false;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%sn=%d:%.3fs", detail.empty() ? "" : " ", n, best);
        detail += buf;
    }
    // least-squares slope of log(time) against log(n)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = static_cast<int>(ns.size());
    for (int k = 0; k < m; ++k) {
        double x = std::log(ns[k]), y = std::log(std::max(times[k], 1e-6));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    char buf[64];
    std::snprintf(buf, sizeof buf, " fitted degree %.2f", slope);
    Outcome o;
    o.pass = values && fast && slope <= 3.0;
    o.detail = detail + buf + (values ? "" : " wrong Do values");
    return o;
}

Outcome confluence() {
    gen::Rng rng(7007);
    int n = 0, bad = 0;
    for (; n < 100; ++n) {
        auto in = gen::theory_instance(rng, true, true, 20);
        PropagateConfig cfg;
        cfg.restrict_output = false;
        auto ref = propagate(in.theory, in.vocabulary, in.structure, cfg).structure;
        for (int k = 0; k < 20; ++k) {
            cfg.schedule_seed = rng.g();
            if (propagate(in.theory, in.vocabulary, in.structure, cfg).structure != ref) {
                ++bad;
                break;
            }
        }
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = std::to_string(n) + " instances x 20 schedules, " + std::to_string(bad) + " differ";
    return o;
}

} // namespace

int main(int argc, char** argv) {
    std::string filter = argc > 1 ? argv[1] : "";
    std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"student example reproduction", student},
        {"oracle agreement on the student instance", student_oracle},
        {"precision gaps", precision_gaps},
        {"ENF precision without repeated predicates", enf_precision},
        {"rule-set backend equivalence", backend_equivalence},
        {"symbolic propagation describes concrete propagation", symbolic_describes},
        {"soundness with definitions and aggregates", soundness},
        {"FO(ID): wfm, Reach, completion", foid},
        {"aggregates: bounds and propagation", aggregates},
        {"precedence chain scaling", chain},
        {"confluence under random schedules", confluence},
    };
    int failed = 0, run = 0;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        auto& [name, fn] = checks[k];
        if (!filter.empty() && name.find(filter) == std::string::npos) continue;
        ++run;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s [%zu] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", k + 1, name.c_str(), o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d/%d criteria passed\n", run - failed, run);
    return failed == 0 ? 0 : 1;
}
