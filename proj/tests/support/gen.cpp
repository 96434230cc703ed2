#include "gen.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

namespace gen {

using namespace infprop;

DomainPtr numeric_domain(int n) {
    std::vector<std::string> names;
    for (int k = 0; k < n; ++k) names.push_back(std::to_string(k));
    return std::make_shared<Domain>(names);
}

Vocabulary vocabulary(const std::vector<Symbol>& preds) {
    Vocabulary v;
    for (auto& s : preds) v.add_predicate(s.name, s.arity);
    return v;
}

std::vector<Symbol> predicates(Rng& r, int n, int max_arity, const std::string& stem) {
    std::vector<Symbol> out;
    for (int k = 0; k < n; ++k) out.push_back({stem + std::to_string(k), r.uniform(0, max_arity)});
    return out;
}

namespace {

TermPtr arg(Rng& r, const FormulaOpts& o, const std::vector<std::string>& scope) {
    if (!scope.empty() && (!o.constants || r.coin(0.8))) return mk_var(r.pick(scope));
    return mk_num(r.uniform(0, o.domain_size - 1));
}

std::string fresh(const std::vector<std::string>& scope) { return "v" + std::to_string(scope.size()); }

FormulaPtr aggregate(Rng& r, const FormulaOpts& o, const std::vector<std::string>& scope) {
    static const std::vector<AggFn> fns{AggFn::Card, AggFn::Sum, AggFn::Prod, AggFn::Min, AggFn::Max};
    static const std::vector<Cmp> cmps{Cmp::Geq, Cmp::Leq, Cmp::Gt, Cmp::Lt, Cmp::Eq};
    auto inner = scope;
    std::string y = fresh(scope);
    inner.push_back(y);
    // condition mentions y in first position when possible
    std::vector<Symbol> unary;
    for (auto& s : o.preds)
        if (s.arity >= 1) unary.push_back(s);
    FormulaPtr cond;
    if (!unary.empty() && r.coin(0.8)) {
        auto& s = r.pick(unary);
        std::vector<TermPtr> a{mk_var(y)};
        for (int k = 1; k < s.arity; ++k) a.push_back(arg(r, o, inner));
        cond = mk_atom(s.name, a);
        if (r.coin(0.3)) cond = mk_not(cond);
    } else {
        auto sub = o;
        sub.aggregates = false;
        cond = formula(r, sub, inner, 1);
    }
    TermPtr bound;
    if (!scope.empty() && r.coin(0.5))
        bound = mk_var(r.pick(scope));
    else
        bound = mk_num(r.uniform(-1, o.domain_size + 1));
    return mk_agg(bound, r.pick(cmps), r.pick(fns), {y}, cond);
}

} // namespace

FormulaPtr literal(Rng& r, const FormulaOpts& o, const std::vector<std::string>& scope) {
    if (r.coin(0.04)) return r.coin(0.5) ? mk_true() : mk_false();
    FormulaPtr a;
    if (o.builtins && r.coin(0.15)) {
        static const std::vector<std::string> b{"=", "<", "=<"};
        a = mk_atom(r.pick(b), {arg(r, o, scope), arg(r, o, scope)});
    } else {
        auto& s = r.pick(o.preds);
        std::vector<TermPtr> args;
        for (int k = 0; k < s.arity; ++k) args.push_back(arg(r, o, scope));
        a = mk_atom(s.name, args);
    }
    return r.coin(0.4) ? mk_not(a) : a;
}

FormulaPtr formula(Rng& r, const FormulaOpts& o, const std::vector<std::string>& scope, int depth) {
    if (depth <= 0 || r.coin(0.25)) {
        if (o.aggregates && r.coin(0.2)) return aggregate(r, o, scope);
        return literal(r, o, scope);
    }
    std::vector<int> kinds{0, 1, 2};
    if (o.sugar) kinds.insert(kinds.end(), {3, 4});
    if (o.quantifiers) kinds.insert(kinds.end(), {5, 6, 5, 6});
    if (o.aggregates) kinds.push_back(7);
    switch (r.pick(kinds)) {
    case 0: return mk_not(formula(r, o, scope, depth - 1));
    case 1:
    case 2: {
        std::vector<FormulaPtr> k;
        int n = r.uniform(2, 3);
        for (int i = 0; i < n; ++i) k.push_back(formula(r, o, scope, depth - 1));
        return r.coin(0.5) ? mk_and(k) : mk_or(k);
    }
    case 3: return mk_implies(formula(r, o, scope, depth - 1), formula(r, o, scope, depth - 1));
    case 4: return mk_iff(formula(r, o, scope, depth - 1), formula(r, o, scope, depth - 1));
    case 5:
    case 6: {
        auto inner = scope;
        std::string v = fresh(scope);
        inner.push_back(v);
        return mk_quant(r.coin(0.5) ? Op::Forall : Op::Exists, {v}, formula(r, o, inner, depth - 1));
    }
    default: return aggregate(r, o, scope);
    }
}

FormulaPtr sentence(Rng& r, const FormulaOpts& o) {
    if (o.quantifiers && r.coin(0.8)) {
        std::vector<std::string> scope{"v0"};
        return mk_quant(r.coin(0.6) ? Op::Forall : Op::Exists, {"v0"}, formula(r, o, scope, o.max_depth - 1));
    }
    return formula(r, o, {}, o.max_depth);
}

Structure structure(Rng& r, DomainPtr d, SignaturePtr sig, double pu, double pi) {
    Structure s(d, sig);
    for (int p = 0; p < static_cast<int>(sig->preds.size()); ++p)
        for (std::size_t a = 0; a < s.atom_count(p); ++a) {
            if (r.coin(pu)) continue;
            if (pi > 0 && r.coin(pi)) {
                s.set(p, a, TV::I);
                continue;
            }
            s.set(p, a, r.coin(0.5) ? TV::T : TV::F);
        }
    return s;
}

Structure two_valued(Rng& r, DomainPtr d, SignaturePtr sig) { return structure(r, d, sig, 0); }

void cap_unknown(Rng& r, Structure& s, std::size_t max_u) {
    std::vector<std::pair<int, std::size_t>> u;
    for (int p = 0; p < static_cast<int>(s.signature().preds.size()); ++p)
        for (std::size_t a = 0; a < s.atom_count(p); ++a)
            if (s.get(p, a) == TV::U) u.push_back({p, a});
    std::shuffle(u.begin(), u.end(), r.g);
    while (u.size() > max_u) {
        s.set(u.back().first, u.back().second, r.coin(0.5) ? TV::T : TV::F);
        u.pop_back();
    }
}

EnfCase enf_sentence(Rng& r, int domain_size, bool full_vars) {
    EnfCase c;
    int nx = r.uniform(0, domain_size >= 3 ? 1 : 2);
    std::vector<std::string> xs;
    for (int k = 0; k < nx; ++k) xs.push_back(k == 0 ? "x" : "y");
    int next = 0;
    auto fresh_pred = [&](int arity) {
        Symbol s{"Q" + std::to_string(next++), arity};
        c.preds.push_back(s);
        return s.name;
    };
    auto lit = [&](FormulaPtr a) { return r.coin(0.4) ? mk_not(a) : a; };
    std::vector<TermPtr> hargs;
    for (auto& x : xs) hargs.push_back(mk_var(x));
    c.sentence.vars = xs;
    c.sentence.head = lit(mk_atom(fresh_pred(nx), hargs));

    int kind = r.uniform(0, 3);
    if (kind <= 1) {
        int n = r.uniform(1, 3);
        std::vector<FormulaPtr> ls;
        for (int k = 0; k < n; ++k) {
            std::vector<TermPtr> a;
            if (k == 0 || full_vars) {
                auto perm = xs;
                std::shuffle(perm.begin(), perm.end(), r.g);
                for (auto& x : perm) a.push_back(mk_var(x));
            } else {
                int ar = r.uniform(0, 2);
                for (int i = 0; i < ar; ++i)
                    a.push_back(!xs.empty() && r.coin(0.8) ? mk_var(r.pick(xs)) : mk_num(r.uniform(0, domain_size - 1)));
            }
            ls.push_back(lit(mk_atom(fresh_pred(static_cast<int>(a.size())), a)));
        }
        c.sentence.body = ls.size() == 1 ? ls[0] : (kind == 0 ? mk_and(ls) : mk_or(ls));
    } else {
        auto vs = xs;
        vs.push_back("z");
        std::shuffle(vs.begin(), vs.end(), r.g);
        std::vector<TermPtr> a;
        for (auto& v : vs) a.push_back(mk_var(v));
        auto body = lit(mk_atom(fresh_pred(static_cast<int>(a.size())), a));
        c.sentence.body = mk_quant(kind == 2 ? Op::Forall : Op::Exists, {"z"}, body);
    }
    return c;
}

std::vector<InfSentence> inf_set(Rng& r, const FormulaOpts& o, int count) {
    std::vector<InfSentence> out;
    for (int i = 0; i < count; ++i) {
        InfSentence s;
        if (r.coin(0.06)) {
            int nv = r.uniform(0, 1);
            for (int k = 0; k < nv; ++k) s.vars.push_back("h" + std::to_string(k));
            s.head = mk_false();
        } else {
            auto& p = r.pick(o.preds);
            std::vector<TermPtr> args;
            for (int k = 0; k < p.arity; ++k) {
                if (r.coin(0.1)) {
                    args.push_back(mk_num(r.uniform(0, o.domain_size - 1)));
                } else {
                    std::string v = "h" + std::to_string(k);
                    if (k > 0 && r.coin(0.1)) v = "h0";
                    if (std::find(s.vars.begin(), s.vars.end(), v) == s.vars.end()) s.vars.push_back(v);
                    args.push_back(mk_var(v));
                }
            }
            s.head = mk_atom(p.name, args);
            if (r.coin(0.5)) s.head = mk_not(s.head);
        }
        auto sub = o;
        s.guard = formula(r, sub, s.vars, o.max_depth);
        out.push_back(s);
    }
    return out;
}

Definition definition(Rng& r, const FormulaOpts& o, const std::vector<Symbol>& defined, int rules) {
    Definition d;
    for (int i = 0; i < rules; ++i) {
        auto& h = i < static_cast<int>(defined.size()) ? defined[i] : r.pick(defined);
        Rule rule;
        rule.head = h.name;
        for (int k = 0; k < h.arity; ++k) {
            rule.vars.push_back("r" + std::to_string(k));
            rule.head_args.push_back(mk_var(rule.vars.back()));
        }
        if (r.coin(0.3)) rule.vars.push_back("r" + std::to_string(h.arity));
        auto sub = o;
        sub.max_depth = std::min(o.max_depth, 2);
        rule.body = formula(r, sub, rule.vars, sub.max_depth);
        d.rules.push_back(rule);
    }
    return d;
}

Instance theory_instance(Rng& r, bool definitions, bool aggregates, std::size_t max_u) {
    Instance in;
    int dn = r.uniform(1, 3);
    in.preds = predicates(r, r.uniform(2, 3), 2, "P");
    std::vector<Symbol> defined;
    if (definitions && r.coin(0.7)) {
        defined = predicates(r, r.uniform(1, 2), 1, "D");
        in.preds.insert(in.preds.end(), defined.begin(), defined.end());
    }
    FormulaOpts o;
    o.preds = in.preds;
    o.domain_size = dn;
    o.max_depth = 3;
    o.builtins = true;
    o.aggregates = aggregates;
    in.vocabulary = vocabulary(in.preds);
    int ns = r.uniform(1, 2);
    for (int k = 0; k < ns; ++k) in.theory.elements.push_back(sentence(r, o));
    if (!defined.empty()) {
        auto od = o;
        od.aggregates = aggregates && r.coin(0.3);
        in.theory.elements.push_back(definition(r, od, defined, r.uniform(1, 3)));
    }
    in.structure = structure(r, numeric_domain(dn), make_signature(in.vocabulary), 0.8);
    cap_unknown(r, in.structure, max_u);
    return in;
}

std::string chain_problem(int n) {
    std::ostringstream o;
    o << "vocabulary { Action/1 Time/1 Prec/2 Do/2 }\n";
    o << "domain { ";
    for (int i = 0; i <= n; ++i) o << "d" << i << ", ";
    for (int t = 1; t <= n + 1; ++t) o << t << (t <= n ? ", " : " }\n");
    o << "theory {\n  ! a ap t : Action(a) & Action(ap) & Time(t) & Prec(ap,a) & Do(a,t) =>"
         " ? tp : Time(tp) & tp < t & Do(ap,tp).\n}\n";
    o << "structure {\n  Action = { ";
    for (int i = 0; i <= n; ++i) o << "d" << i << (i < n ? ", " : " }.\n");
    o << "  Time = { ";
    for (int t = 1; t <= n + 1; ++t) o << t << (t <= n ? ", " : " }.\n");
    o << "  Prec = { ";
    for (int i = 0; i < n; ++i) o << "(d" << i << ",d" << i + 1 << ")" << (i + 1 < n ? ", " : " }.\n");
    o << "}\n";
    return o.str();
}

} // namespace gen
