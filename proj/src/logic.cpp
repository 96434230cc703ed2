#include "infprop/logic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace infprop {

bool is_builtin(const std::string& p) { return p == kEq || p == kNeq || p == kLt || p == kLe; }

const std::vector<Symbol>& Vocabulary::builtins() {
    static const std::vector<Symbol> b = {{kEq, 2}, {kLt, 2}, {kLe, 2}};
    return b;
}

void Vocabulary::add_predicate(const std::string& name, int arity) {
    if (is_builtin(name) || index_.count(name))
        throw std::invalid_argument("symbol declared twice: " + name);
    preds_.push_back({name, arity});
    index_[name] = {false, arity};
}

void Vocabulary::add_function(const std::string& name, int arity) {
    if (is_builtin(name) || index_.count(name))
        throw std::invalid_argument("symbol declared twice: " + name);
    funcs_.push_back({name, arity});
    index_[name] = {true, arity};
}

std::optional<int> Vocabulary::predicate_arity(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end() || it->second.first) return std::nullopt;
    return it->second.second;
}

std::optional<int> Vocabulary::function_arity(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end() || !it->second.first) return std::nullopt;
    return it->second.second;
}

bool Vocabulary::declared(const std::string& name) const { return index_.count(name) > 0; }

std::string Vocabulary::fresh_name(const std::string& stem) const {
    if (!declared(stem)) return stem;
    for (int k = 1;; ++k) {
        auto n = stem + "_" + std::to_string(k);
        if (!declared(n)) return n;
    }
}

// ---------------------------------------------------------------- construction

TermPtr mk_var(const std::string& name) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Var;
    t->name = name;
    return t;
}

TermPtr mk_func(const std::string& name, std::vector<TermPtr> args) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Func;
    t->name = name;
    t->args = std::move(args);
    return t;
}

static std::string number_text(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

TermPtr mk_num(double value) { return mk_num(value, number_text(value)); }

TermPtr mk_num(double value, const std::string& text) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Num;
    t->name = text;
    t->value = value;
    return t;
}

static FormulaPtr mk_op(Op op) {
    auto f = std::make_shared<Formula>();
    f->op = op;
    return f;
}

FormulaPtr mk_true() {
    static const FormulaPtr t = mk_op(Op::True);
    return t;
}

FormulaPtr mk_false() {
    static const FormulaPtr f = mk_op(Op::False);
    return f;
}

FormulaPtr mk_atom(const std::string& pred, std::vector<TermPtr> args) {
    auto f = std::make_shared<Formula>();
    f->op = Op::Atom;
    f->pred = pred;
    f->args = std::move(args);
    return f;
}

FormulaPtr mk_eq(TermPtr a, TermPtr b) { return mk_atom(kEq, {std::move(a), std::move(b)}); }
FormulaPtr mk_neq(TermPtr a, TermPtr b) { return mk_not(mk_eq(std::move(a), std::move(b))); }

FormulaPtr mk_not(FormulaPtr g) {
    auto f = std::make_shared<Formula>();
    f->op = Op::Not;
    f->kids = {std::move(g)};
    return f;
}

FormulaPtr mk_and(std::vector<FormulaPtr> kids) {
    auto f = std::make_shared<Formula>();
    f->op = Op::And;
    f->kids = std::move(kids);
    return f;
}

FormulaPtr mk_or(std::vector<FormulaPtr> kids) {
    auto f = std::make_shared<Formula>();
    f->op = Op::Or;
    f->kids = std::move(kids);
    return f;
}

FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->op = Op::Implies;
    f->kids = {std::move(a), std::move(b)};
    return f;
}

FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->op = Op::Iff;
    f->kids = {std::move(a), std::move(b)};
    return f;
}

FormulaPtr mk_quant(Op q, std::vector<std::string> vars, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->op = q;
    f->vars = std::move(vars);
    f->kids = {std::move(body)};
    return f;
}

FormulaPtr mk_forall(std::vector<std::string> vars, FormulaPtr body) {
    return mk_quant(Op::Forall, std::move(vars), std::move(body));
}

FormulaPtr mk_exists(std::vector<std::string> vars, FormulaPtr body) {
    return mk_quant(Op::Exists, std::move(vars), std::move(body));
}

FormulaPtr mk_agg(TermPtr bound, Cmp cmp, AggFn fn, std::vector<std::string> vars, FormulaPtr cond) {
    auto f = std::make_shared<Formula>();
    f->op = Op::Agg;
    f->args = {std::move(bound)};
    f->cmp = cmp;
    f->fn = fn;
    f->vars = std::move(vars);
    f->kids = {std::move(cond)};
    return f;
}

const char* agg_name(AggFn fn) {
    switch (fn) {
    case AggFn::Card: return "card";
    case AggFn::Sum: return "sum";
    case AggFn::Prod: return "prod";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    }
    return "?";
}

const char* cmp_name(Cmp c) {
    switch (c) {
    case Cmp::Geq: return ">=";
    case Cmp::Leq: return "=<";
    case Cmp::Gt: return ">";
    case Cmp::Lt: return "<";
    case Cmp::Eq: return "=";
    }
    return "?";
}

bool is_atom(const FormulaPtr& f) { return f->op == Op::Atom; }

bool is_literal(const FormulaPtr& f) {
    if (f->op == Op::Atom || f->op == Op::True || f->op == Op::False) return true;
    return f->op == Op::Not && f->kids[0]->op == Op::Atom;
}

bool is_builtin_literal(const FormulaPtr& f) {
    auto a = literal_atom(f);
    return a && is_builtin(a->pred);
}

FormulaPtr negate_literal(const FormulaPtr& lit) {
    switch (lit->op) {
    case Op::True: return mk_false();
    case Op::False: return mk_true();
    case Op::Not: return lit->kids[0];
    default: return mk_not(lit);
    }
}

FormulaPtr literal_atom(const FormulaPtr& lit) {
    if (lit->op == Op::Atom) return lit;
    if (lit->op == Op::Not && lit->kids[0]->op == Op::Atom) return lit->kids[0];
    return nullptr;
}

// ---------------------------------------------------------------- equality

bool equal(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
    if (a->kind == Term::Kind::Num && a->value != b->value) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    return true;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (a->op != b->op || a->pred != b->pred || a->vars != b->vars) return false;
    if (a->args.size() != b->args.size() || a->kids.size() != b->kids.size()) return false;
    if (a->op == Op::Agg && (a->fn != b->fn || a->cmp != b->cmp)) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
    return true;
}

namespace {

using Renaming = std::map<std::string, std::string>;

bool alpha_term(const TermPtr& a, const TermPtr& b, const Renaming& ra, const Renaming& rb) {
    if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
    if (a->kind == Term::Kind::Var) {
        auto ia = ra.find(a->name), ib = rb.find(b->name);
        bool ba = ia != ra.end(), bb = ib != rb.end();
        if (ba != bb) return false;
        return ba ? ia->second == ib->second : a->name == b->name;
    }
    if (a->name != b->name) return false;
    if (a->kind == Term::Kind::Num) return a->value == b->value;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_term(a->args[i], b->args[i], ra, rb)) return false;
    return true;
}

bool alpha(const FormulaPtr& a, const FormulaPtr& b, Renaming ra, Renaming rb, int& counter) {
    if (a->op != b->op || a->pred != b->pred) return false;
    if (a->args.size() != b->args.size() || a->kids.size() != b->kids.size()) return false;
    if (a->vars.size() != b->vars.size()) return false;
    if (a->op == Op::Agg && (a->fn != b->fn || a->cmp != b->cmp)) return false;
    if (a->op == Op::Agg && !alpha_term(a->args[0], b->args[0], ra, rb)) return false;
    if (a->op == Op::Forall || a->op == Op::Exists || a->op == Op::Agg) {
        for (std::size_t i = 0; i < a->vars.size(); ++i) {
            auto canon = "#" + std::to_string(counter++);
            ra[a->vars[i]] = canon;
            rb[b->vars[i]] = canon;
        }
    } else {
        for (std::size_t i = 0; i < a->args.size(); ++i)
            if (!alpha_term(a->args[i], b->args[i], ra, rb)) return false;
    }
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!alpha(a->kids[i], b->kids[i], ra, rb, counter)) return false;
    return true;
}

} // namespace

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
    int counter = 0;
    return alpha(a, b, {}, {}, counter);
}

// ---------------------------------------------------------------- variables

static void collect_term_vars(const TermPtr& t, std::vector<std::string>& out, std::set<std::string>& seen,
                              const std::multiset<std::string>& bound) {
    if (t->kind == Term::Kind::Var) {
        if (!bound.count(t->name) && seen.insert(t->name).second) out.push_back(t->name);
        return;
    }
    for (auto& a : t->args) collect_term_vars(a, out, seen, bound);
}

static void collect_free(const FormulaPtr& f, std::vector<std::string>& out, std::set<std::string>& seen,
                         std::multiset<std::string>& bound) {
    switch (f->op) {
    case Op::Atom:
        for (auto& a : f->args) collect_term_vars(a, out, seen, bound);
        return;
    case Op::Agg:
        collect_term_vars(f->args[0], out, seen, bound);
        [[fallthrough]];
    case Op::Forall:
    case Op::Exists: {
        for (auto& v : f->vars) bound.insert(v);
        collect_free(f->kids[0], out, seen, bound);
        for (auto& v : f->vars) bound.erase(bound.find(v));
        return;
    }
    default:
        for (auto& k : f->kids) collect_free(k, out, seen, bound);
    }
}

std::vector<std::string> free_variables(const FormulaPtr& f) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::multiset<std::string> bound;
    collect_free(f, out, seen, bound);
    return out;
}

std::vector<std::string> term_variables(const TermPtr& t) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    collect_term_vars(t, out, seen, {});
    return out;
}

std::set<std::string> free_variable_set(const FormulaPtr& f) {
    auto v = free_variables(f);
    return {v.begin(), v.end()};
}

static void collect_all(const TermPtr& t, std::set<std::string>& out) {
    if (t->kind == Term::Kind::Var) out.insert(t->name);
    for (auto& a : t->args) collect_all(a, out);
}

static void collect_all(const FormulaPtr& f, std::set<std::string>& out) {
    for (auto& v : f->vars) out.insert(v);
    for (auto& a : f->args) collect_all(a, out);
    for (auto& k : f->kids) collect_all(k, out);
}

std::set<std::string> all_variables(const FormulaPtr& f) {
    std::set<std::string> out;
    collect_all(f, out);
    return out;
}

std::string fresh_variable(const std::string& base, const std::set<std::string>& taken) {
    std::string n = base + "'";
    while (taken.count(n)) n += "'";
    return n;
}

// ---------------------------------------------------------------- substitution

TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& m) {
    if (t->kind == Term::Kind::Var) {
        auto it = m.find(t->name);
        return it == m.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    std::vector<TermPtr> args;
    bool changed = false;
    for (auto& a : t->args) {
        args.push_back(substitute(a, m));
        changed |= args.back() != a;
    }
    return changed ? mk_func(t->name, std::move(args)) : t;
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, TermPtr>& m) {
    if (m.empty()) return f;
    switch (f->op) {
    case Op::True:
    case Op::False: return f;
    case Op::Atom: {
        std::vector<TermPtr> args;
        for (auto& a : f->args) args.push_back(substitute(a, m));
        return mk_atom(f->pred, std::move(args));
    }
    case Op::Forall:
    case Op::Exists:
    case Op::Agg: {
        auto body_free = free_variable_set(f->kids[0]);
        std::map<std::string, TermPtr> inner;
        for (auto& [v, t] : m)
            if (std::find(f->vars.begin(), f->vars.end(), v) == f->vars.end() && body_free.count(v))
                inner[v] = t;
        // variables the incoming terms would bring into scope
        std::set<std::string> incoming;
        for (auto& [v, t] : inner)
            for (auto& x : term_variables(t)) incoming.insert(x);
        std::vector<std::string> vars = f->vars;
        if (!inner.empty()) {
            std::set<std::string> taken = all_variables(f->kids[0]);
            taken.insert(incoming.begin(), incoming.end());
            for (auto& [v, t] : inner) taken.insert(v);
            for (auto& v : vars) taken.insert(v);
            for (auto& v : vars) {
                if (!incoming.count(v)) continue;
                auto nv = fresh_variable(v, taken);
                taken.insert(nv);
                inner[v] = mk_var(nv);
                v = nv;
            }
        }
        auto body = substitute(f->kids[0], inner);
        if (f->op == Op::Agg) {
            auto bound = substitute(f->args[0], m);
            return mk_agg(bound, f->cmp, f->fn, vars, body);
        }
        return mk_quant(f->op, vars, body);
    }
    default: {
        auto g = std::make_shared<Formula>(*f);
        for (auto& k : g->kids) k = substitute(k, m);
        return g;
    }
    }
}

FormulaPtr substitute(const FormulaPtr& f, const std::vector<std::string>& vars,
                      const std::vector<TermPtr>& terms) {
    if (vars.size() != terms.size()) throw std::invalid_argument("substitute: length mismatch");
    std::map<std::string, TermPtr> m;
    for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = terms[i];
    return substitute(f, m);
}

// ---------------------------------------------------------------- queries on formulas

static void collect_preds(const FormulaPtr& f, std::set<std::string>& out) {
    if (f->op == Op::Atom && !is_builtin(f->pred)) out.insert(f->pred);
    for (auto& k : f->kids) collect_preds(k, out);
}

std::set<std::string> predicates_of(const FormulaPtr& f) {
    std::set<std::string> out;
    collect_preds(f, out);
    return out;
}

bool has_aggregate(const FormulaPtr& f) {
    if (f->op == Op::Agg) return true;
    return std::any_of(f->kids.begin(), f->kids.end(), [](auto& k) { return has_aggregate(k); });
}

static bool term_has_function(const TermPtr& t) {
    if (t->kind == Term::Kind::Func) return true;
    return false;
}

bool has_function(const FormulaPtr& f) {
    for (auto& a : f->args)
        if (term_has_function(a)) return true;
    return std::any_of(f->kids.begin(), f->kids.end(), [](auto& k) { return has_function(k); });
}

static std::size_t term_size(const TermPtr& t) {
    std::size_t n = 1;
    for (auto& a : t->args) n += term_size(a);
    return n;
}

std::size_t formula_size(const FormulaPtr& f) {
    std::size_t n = 1;
    for (auto& a : f->args) n += term_size(a);
    for (auto& k : f->kids) n += formula_size(k);
    return n;
}

// ---------------------------------------------------------------- theories

std::vector<std::string> Definition::defined() const {
    std::vector<std::string> out;
    for (auto& r : rules)
        if (std::find(out.begin(), out.end(), r.head) == out.end()) out.push_back(r.head);
    return out;
}

std::vector<std::string> Definition::open() const {
    auto def = defined();
    std::vector<std::string> out;
    for (auto& r : rules)
        for (auto& p : predicates_of(r.body))
            if (std::find(def.begin(), def.end(), p) == def.end() &&
                std::find(out.begin(), out.end(), p) == out.end())
                out.push_back(p);
    return out;
}

std::vector<FormulaPtr> Theory::sentences() const {
    std::vector<FormulaPtr> out;
    for (auto& e : elements)
        if (auto f = std::get_if<FormulaPtr>(&e)) out.push_back(*f);
    return out;
}

std::vector<Definition> Theory::definitions() const {
    std::vector<Definition> out;
    for (auto& e : elements)
        if (auto d = std::get_if<Definition>(&e)) out.push_back(*d);
    return out;
}

bool equal(const Rule& a, const Rule& b) {
    if (a.vars != b.vars || a.head != b.head || a.head_args.size() != b.head_args.size()) return false;
    for (std::size_t i = 0; i < a.head_args.size(); ++i)
        if (!equal(a.head_args[i], b.head_args[i])) return false;
    return equal(a.body, b.body);
}

bool equal(const Theory& a, const Theory& b) {
    if (a.elements.size() != b.elements.size()) return false;
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
        auto& x = a.elements[i];
        auto& y = b.elements[i];
        if (x.index() != y.index()) return false;
        if (auto f = std::get_if<FormulaPtr>(&x)) {
            if (!equal(*f, std::get<FormulaPtr>(y))) return false;
        } else {
            auto& dx = std::get<Definition>(x).rules;
            auto& dy = std::get<Definition>(y).rules;
            if (dx.size() != dy.size()) return false;
            for (std::size_t j = 0; j < dx.size(); ++j)
                if (!equal(dx[j], dy[j])) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------- validation

namespace {

struct Validator {
    const Vocabulary& voc;
    std::vector<Diagnostic>& out;

    void term(const TermPtr& t, const std::multiset<std::string>& scope) {
        switch (t->kind) {
        case Term::Kind::Var:
            if (!scope.count(t->name)) out.push_back({"unbound-variable", "variable " + t->name + " is not bound"});
            return;
        case Term::Kind::Num: return;
        case Term::Kind::Func: {
            auto ar = voc.function_arity(t->name);
            if (!ar)
                out.push_back({"unknown-symbol", "unknown function " + t->name});
            else if (*ar != static_cast<int>(t->args.size()))
                out.push_back({"arity", "function " + t->name + "/" + std::to_string(*ar) + " used with " +
                                            std::to_string(t->args.size()) + " arguments"});
            for (auto& a : t->args) term(a, scope);
        }
        }
    }

    void formula(const FormulaPtr& f, std::multiset<std::string>& scope) {
        switch (f->op) {
        case Op::True:
        case Op::False: return;
        case Op::Atom: {
            if (is_builtin(f->pred)) {
                if (f->args.size() != 2) out.push_back({"arity", "builtin " + f->pred + " takes 2 arguments"});
            } else if (auto ar = voc.predicate_arity(f->pred)) {
                if (*ar != static_cast<int>(f->args.size()))
                    out.push_back({"arity", "predicate " + f->pred + "/" + std::to_string(*ar) + " used with " +
                                                std::to_string(f->args.size()) + " arguments"});
            } else {
                out.push_back({"unknown-symbol", "unknown predicate " + f->pred});
            }
            for (auto& a : f->args) term(a, scope);
            return;
        }
        case Op::Agg: {
            term(f->args[0], scope);
            std::set<std::string> distinct(f->vars.begin(), f->vars.end());
            if (distinct.size() != f->vars.size())
                out.push_back({"aggregate", "set expression binds a variable twice"});
            if (f->vars.empty()) out.push_back({"aggregate", "set expression binds no variable"});
            if (f->args[0]->kind == Term::Kind::Func)
                out.push_back({"aggregate", "aggregate bound must be a variable or a numeral"});
            [[fallthrough]];
        }
        case Op::Forall:
        case Op::Exists: {
            for (auto& v : f->vars) scope.insert(v);
            formula(f->kids[0], scope);
            for (auto& v : f->vars) scope.erase(scope.find(v));
            return;
        }
        default:
            for (auto& k : f->kids) formula(k, scope);
        }
    }
};

} // namespace

std::vector<Diagnostic> validate_formula(const FormulaPtr& f, const Vocabulary& v,
                                         const std::set<std::string>& allowed_free) {
    std::vector<Diagnostic> out;
    Validator val{v, out};
    std::multiset<std::string> scope(allowed_free.begin(), allowed_free.end());
    val.formula(f, scope);
    return out;
}

std::vector<Diagnostic> validate(const Theory& t, const Vocabulary& v) {
    std::vector<Diagnostic> out;
    Validator val{v, out};
    std::map<std::string, int> defined_in;
    int def_no = 0;
    for (auto& e : t.elements) {
        if (auto f = std::get_if<FormulaPtr>(&e)) {
            std::multiset<std::string> scope;
            val.formula(*f, scope);
            continue;
        }
        auto& d = std::get<Definition>(e);
        for (auto& r : d.rules) {
            auto ar = v.predicate_arity(r.head);
            if (!ar) {
                out.push_back({"unknown-symbol", "rule head uses unknown predicate " + r.head});
            } else if (*ar != static_cast<int>(r.head_args.size())) {
                out.push_back({"arity", "rule head " + r.head + " has wrong arity"});
            }
            std::set<std::string> hv(r.vars.begin(), r.vars.end());
            for (auto& a : r.head_args)
                if (a->kind != Term::Kind::Var || !hv.count(a->name))
                    out.push_back({"rule", "rule head argument of " + r.head + " must be a quantified variable"});
            for (auto& fv : free_variables(r.body))
                if (!hv.count(fv))
                    out.push_back({"rule", "body variable " + fv + " of a rule for " + r.head +
                                               " is not among the head variables"});
            std::multiset<std::string> scope(r.vars.begin(), r.vars.end());
            std::vector<Diagnostic> body_diags;
            Validator bv{v, body_diags};
            bv.formula(r.body, scope);
            for (auto& dd : body_diags)
                if (dd.kind != "unbound-variable") out.push_back(dd);
        }
        for (auto& p : d.defined()) {
            auto [it, fresh] = defined_in.emplace(p, def_no);
            if (!fresh && it->second != def_no)
                out.push_back({"definition", "predicate " + p + " is defined by more than one definition"});
        }
        ++def_no;
    }
    return out;
}

// ---------------------------------------------------------------- printing

std::string to_string(const TermPtr& t) {
    if (t->kind != Term::Kind::Func || t->args.empty()) return t->name;
    std::string s = t->name + "(";
    for (std::size_t i = 0; i < t->args.size(); ++i) s += (i ? "," : "") + to_string(t->args[i]);
    return s + ")";
}

namespace {

int precedence(const FormulaPtr& f) {
    switch (f->op) {
    case Op::Forall:
    case Op::Exists: return 0;
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not: return f->kids[0]->op == Op::Atom && f->kids[0]->pred == kEq ? 6 : 5;
    default: return 6;
    }
}

void print(const FormulaPtr& f, std::string& out);

void print_child(const FormulaPtr& f, int min_prec, std::string& out) {
    if (precedence(f) < min_prec) {
        out += '(';
        print(f, out);
        out += ')';
    } else {
        print(f, out);
    }
}

void print_args(const std::vector<TermPtr>& args, std::string& out) {
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += to_string(args[i]);
    }
    out += ')';
}

void print(const FormulaPtr& f, std::string& out) {
    switch (f->op) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Atom:
        if (is_builtin(f->pred)) {
            out += to_string(f->args[0]) + " " + f->pred + " " + to_string(f->args[1]);
            return;
        }
        out += f->pred;
        if (!f->args.empty()) print_args(f->args, out);
        return;
    case Op::Not: {
        auto& a = f->kids[0];
        if (a->op == Op::Atom && a->pred == kEq) {
            out += to_string(a->args[0]) + " ~= " + to_string(a->args[1]);
            return;
        }
        out += '~';
        print_child(a, 5, out);
        return;
    }
    case Op::And:
    case Op::Or: {
        if (f->kids.empty()) {
            out += f->op == Op::And ? "true" : "false";
            // an empty connective cannot be written; callers avoid building one
            return;
        }
        int p = f->op == Op::And ? 5 : 4;
        for (std::size_t i = 0; i < f->kids.size(); ++i) {
            if (i) out += f->op == Op::And ? " & " : " | ";
            print_child(f->kids[i], p, out);
        }
        return;
    }
    case Op::Implies:
        print_child(f->kids[0], 3, out);
        out += " => ";
        print_child(f->kids[1], 3, out);
        return;
    case Op::Iff:
        print_child(f->kids[0], 2, out);
        out += " <=> ";
        print_child(f->kids[1], 2, out);
        return;
    case Op::Forall:
    case Op::Exists:
        out += f->op == Op::Forall ? "!" : "?";
        for (auto& v : f->vars) out += " " + v;
        out += " : ";
        print(f->kids[0], out);
        return;
    case Op::Agg:
        out += to_string(f->args[0]) + " " + cmp_name(f->cmp) + " " + agg_name(f->fn) + "{";
        for (auto& v : f->vars) out += " " + v;
        out += " : ";
        print(f->kids[0], out);
        out += " }";
        return;
    }
}

} // namespace

std::string to_string(const FormulaPtr& f) {
    std::string out;
    print(f, out);
    return out;
}

std::string to_string(const Rule& r) {
    std::string out;
    if (!r.vars.empty()) {
        out += "!";
        for (auto& v : r.vars) out += " " + v;
        out += " : ";
    }
    out += r.head;
    if (!r.head_args.empty()) print_args(r.head_args, out);
    out += " <- " + to_string(r.body);
    return out;
}

std::string to_string(const QueryDef& q) {
    std::string out = "{";
    for (auto& v : q.vars) out += " " + v;
    out += " : " + to_string(q.body) + " }";
    return out;
}

} // namespace infprop
