#include "infprop/symbolic.hpp"

#include <algorithm>
#include <stdexcept>

#include "infprop/eval.hpp"

namespace infprop {

const QueryDef& SymbolicStructure::query(const std::string& name) const {
    auto it = queries.find(name);
    if (it == queries.end()) throw std::out_of_range("no query for " + name);
    return it->second;
}

std::size_t SymbolicStructure::size() const {
    std::size_t n = 0;
    for (auto& [k, q] : queries) n += formula_size(q.body);
    return n;
}

namespace {

std::vector<std::string> query_vars(int arity) {
    static const char* names[] = {"x", "y", "z"};
    std::vector<std::string> out;
    for (int i = 0; i < arity; ++i) out.push_back(arity <= 3 ? names[i] : "x" + std::to_string(i + 1));
    return out;
}

std::vector<TermPtr> var_terms(const std::vector<std::string>& vs) {
    std::vector<TermPtr> out;
    for (auto& v : vs) out.push_back(mk_var(v));
    return out;
}

} // namespace

SymbolicStructure initial_symbolic(const Vocabulary& v, const std::map<std::string, InputMode>& modes) {
    SymbolicStructure phi;
    phi.target = v.predicates();
    for (auto& p : v.predicates()) {
        auto vs = query_vars(p.arity);
        auto it = modes.find(p.name);
        InputMode m = it == modes.end() ? InputMode::NoInfo : it->second;
        FormulaPtr ct = mk_false(), cf = mk_false();
        if (m == InputMode::TwoValued) {
            phi.source.add_predicate(p.name, p.arity);
            ct = mk_atom(p.name, var_terms(vs));
            cf = mk_not(ct);
        } else if (m == InputMode::CtOnly) {
            auto name = tf_name(p.name, true);
            phi.source.add_predicate(name, p.arity);
            ct = mk_atom(name, var_terms(vs));
        }
        phi.queries[tf_name(p.name, true)] = {vs, ct};
        phi.queries[tf_name(p.name, false)] = {vs, cf};
    }
    return phi;
}

SymbolicStructure initial_symbolic(const Problem& p) {
    std::map<std::string, InputMode> modes(p.inputs.begin(), p.inputs.end());
    return initial_symbolic(p.vocabulary, modes);
}

std::vector<Tuple> answers(const QueryDef& q, const Structure& e) {
    Compiled c(q.body, q.vars, e.domain(), e.signature());
    int n = e.domain().size();
    int k = static_cast<int>(q.vars.size());
    std::vector<int> slots(std::max(1, c.slot_count()), 0);
    std::vector<Tuple> out;
    if (k > 0 && n == 0) return out;
    while (true) {
        if (c.ct(e, slots.data())) out.emplace_back(slots.begin(), slots.begin() + k);
        int i = k - 1;
        for (; i >= 0; --i) {
            if (++slots[i] < n) break;
            slots[i] = 0;
        }
        if (i < 0) break;
    }
    auto& dom = e.domain();
    std::sort(out.begin(), out.end(), [&](const Tuple& a, const Tuple& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return dom.name(a[i]) < dom.name(b[i]);
        return false;
    });
    return out;
}

Structure apply_to_structure(const SymbolicStructure& phi, const Structure& e) {
    auto sig = make_signature(phi.target);
    Structure out(e.domain_ptr(), sig);
    for (std::size_t p = 0; p < sig->preds.size(); ++p) {
        auto& sym = sig->preds[p];
        int pi = static_cast<int>(p);
        auto plain = phi.queries.find(sym.name);
        if (plain != phi.queries.end()) {
            for (std::size_t a = 0; a < out.atom_count(pi); ++a) out.set(pi, a, TV::F);
            for (auto& t : answers(plain->second, e)) out.set(pi, out.index(t), TV::T);
            continue;
        }
        for (bool ct : {true, false}) {
            auto it = phi.queries.find(tf_name(sym.name, ct));
            if (it == phi.queries.end()) continue;
            for (auto& t : answers(it->second, e)) {
                auto idx = out.index(t);
                out.set(pi, idx, lub_p(out.get(pi, idx), ct ? TV::T : TV::F));
            }
        }
    }
    return out;
}

FormulaPtr unfold(const SymbolicStructure& phi, const FormulaPtr& f) {
    if (f->op == Op::Atom) {
        auto it = phi.queries.find(f->pred);
        if (it != phi.queries.end()) return substitute(it->second.body, it->second.vars, f->args);
        // P_ct / P_cf of a two-valued target symbol P with a single query
        auto n = f->pred.size();
        if (n > 3 && (f->pred.compare(n - 3, 3, "_ct") == 0 || f->pred.compare(n - 3, 3, "_cf") == 0)) {
            auto plain = phi.queries.find(f->pred.substr(0, n - 3));
            if (plain != phi.queries.end()) {
                auto body = substitute(plain->second.body, plain->second.vars, f->args);
                return f->pred.back() == 't' ? body : mk_not(body);
            }
        }
        return f; // builtin, or a symbol of the source vocabulary
    }
    if (f->op == Op::Agg) throw EvalError("aggregate atoms cannot be unfolded symbolically");
    if (f->kids.empty()) return f;
    auto g = std::make_shared<Formula>(*f);
    for (auto& k : g->kids) k = unfold(phi, k);
    return g;
}

std::pair<FormulaPtr, FormulaPtr> apply_to_formula(const SymbolicStructure& phi, const FormulaPtr& f) {
    auto [ct, cf] = ct_cf(f);
    return {unfold(phi, ct), unfold(phi, cf)};
}

namespace {

// { x̄ | φ } ∪ { z̄ | ψ }, written over the old query's variables.
QueryDef union_query(const QueryDef& old, const std::vector<TermPtr>& head_args, const std::vector<std::string>& vars,
                     const FormulaPtr& body) {
    std::set<std::string> taken(old.vars.begin(), old.vars.end());
    auto av = all_variables(body);
    taken.insert(av.begin(), av.end());
    taken.insert(vars.begin(), vars.end());
    std::map<std::string, TermPtr> ren;
    std::vector<FormulaPtr> eqs;
    for (std::size_t i = 0; i < head_args.size(); ++i) {
        auto& a = head_args[i];
        auto z = mk_var(old.vars[i]);
        if (a->kind == Term::Kind::Var && !ren.count(a->name)) {
            ren[a->name] = z;
        } else {
            eqs.push_back(mk_eq(z, a->kind == Term::Kind::Var ? ren[a->name] : a));
        }
    }
    std::vector<std::string> hidden;
    for (auto& v : vars) {
        if (ren.count(v)) continue;
        auto nv = fresh_variable(v, taken);
        taken.insert(nv);
        ren[v] = mk_var(nv);
        hidden.push_back(nv);
    }
    auto nb = substitute(body, ren);
    if (!eqs.empty()) {
        eqs.push_back(nb);
        nb = mk_and(eqs);
    }
    if (!hidden.empty()) nb = mk_exists(hidden, nb);
    std::vector<FormulaPtr> kids;
    if (old.body->op == Op::Or)
        kids = old.body->kids;
    else
        kids.push_back(old.body);
    kids.push_back(nb);
    return {old.vars, mk_or(kids)};
}

} // namespace

SymbolicStructure symbolic_inf_step(const SymbolicStructure& phi, const InfSentence& s) {
    if (has_aggregate(s.guard)) throw EvalError("symbolic propagation does not cover aggregates");
    SymbolicStructure out = phi;
    if (s.head_is_true()) return out;
    auto guard = unfold(phi, ct_cf(s.guard).first);
    if (s.head_is_false()) {
        // the guard holding anywhere makes every symbol inconsistent
        FormulaPtr anywhere = s.vars.empty() ? guard : mk_exists(s.vars, guard);
        for (auto& [name, q] : out.queries) {
            if (out.frozen.count(name)) continue;
            q = union_query(q, {}, {}, anywhere);
        }
        return out;
    }
    auto atom = literal_atom(s.head);
    auto name = tf_name(atom->pred, s.head->op != Op::Not);
    auto it = out.queries.find(name);
    if (it == out.queries.end()) throw std::invalid_argument("symbolic structure has no query for " + name);
    if (out.frozen.count(name)) return out;
    it->second = union_query(it->second, atom->args, s.vars, guard);
    return out;
}

FormulaPtr simplify_formula(const FormulaPtr& f) {
    switch (f->op) {
    case Op::Not: {
        auto k = simplify_formula(f->kids[0]);
        if (k->op == Op::True) return mk_false();
        if (k->op == Op::False) return mk_true();
        if (k->op == Op::Not) return k->kids[0];
        return mk_not(k);
    }
    case Op::And:
    case Op::Or: {
        bool conj = f->op == Op::And;
        std::vector<FormulaPtr> kids;
        auto add = [&](const FormulaPtr& k) {
            for (auto& e : kids)
                if (alpha_equal(e, k)) return;
            kids.push_back(k);
        };
        for (auto& k0 : f->kids) {
            auto k = simplify_formula(k0);
            if (k->op == (conj ? Op::True : Op::False)) continue;
            if (k->op == (conj ? Op::False : Op::True)) return k;
            if (k->op == f->op)
                for (auto& g : k->kids) add(g);
            else
                add(k);
        }
        if (kids.empty()) return conj ? mk_true() : mk_false();
        if (kids.size() == 1) return kids[0];
        return conj ? mk_and(kids) : mk_or(kids);
    }
    case Op::Implies:
    case Op::Iff: {
        auto g = std::make_shared<Formula>(*f);
        for (auto& k : g->kids) k = simplify_formula(k);
        return g;
    }
    case Op::Forall:
    case Op::Exists: {
        auto body = simplify_formula(f->kids[0]);
        // domains are never empty, so a quantifier over variables the body does not use can go
        auto used = free_variable_set(body);
        std::vector<std::string> vs0;
        for (auto& v : f->vars)
            if (used.count(v)) vs0.push_back(v);
        if (vs0.empty()) return body;
        if (body->op == f->op) {
            auto vs = vs0;
            for (auto& v : body->vars)
                if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
            // inner variables shadow outer ones with the same name
            return mk_quant(f->op, vs, body->kids[0]);
        }
        return mk_quant(f->op, vs0, body);
    }
    case Op::Agg: {
        auto g = std::make_shared<Formula>(*f);
        for (auto& k : g->kids) k = simplify_formula(k);
        return g;
    }
    default: return f;
    }
}

QueryDef simplify_query(const QueryDef& q) { return {q.vars, simplify_formula(q.body)}; }

SymbolicStructure symbolic_propagate(const std::vector<InfSentence>& v, const SymbolicStructure& phi0,
                                     const SymbolicBudget& b) {
    SymbolicStructure phi = phi0;
    std::size_t rounds = b.rounds.value_or(v.size());
    for (std::size_t r = 0; r < rounds; ++r) {
        for (auto& s : v) {
            auto next = symbolic_inf_step(phi, s);
            for (auto& [name, q] : next.queries) {
                auto& old = phi.queries.at(name);
                if (q.body == old.body) continue;
                q = simplify_query(q);
                if (formula_size(q.body) > b.max_query_size) {
                    q = old;
                    next.frozen.insert(name);
                }
            }
            phi = std::move(next);
        }
    }
    return phi;
}

QueryDef rewrite_certain(const SymbolicStructure& phi, const QueryDef& q) {
    return simplify_query({q.vars, apply_to_formula(phi, q.body).first});
}

QueryDef rewrite_possible(const SymbolicStructure& phi, const QueryDef& q) {
    return simplify_query({q.vars, push_negations(mk_not(apply_to_formula(phi, q.body).second))});
}

std::string print_symbolic(const SymbolicStructure& phi) {
    std::string out;
    auto line = [&](const std::string& name) {
        auto it = phi.queries.find(name);
        if (it == phi.queries.end()) return;
        out += name + " = " + to_string(it->second) + ".";
        if (phi.frozen.count(name)) out += " // frozen";
        out += "\n";
    };
    for (auto& p : phi.target) {
        line(p.name);
        line(tf_name(p.name, true));
        line(tf_name(p.name, false));
    }
    return out;
}

} // namespace infprop
