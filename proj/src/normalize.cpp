#include "infprop/normalize.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace infprop {

namespace {

FormulaPtr conj(std::vector<FormulaPtr> kids) {
    if (kids.empty()) return mk_true();
    if (kids.size() == 1) return kids[0];
    return mk_and(std::move(kids));
}

FormulaPtr disj(std::vector<FormulaPtr> kids) {
    if (kids.empty()) return mk_false();
    if (kids.size() == 1) return kids[0];
    return mk_or(std::move(kids));
}

std::vector<TermPtr> var_terms(const std::vector<std::string>& vars) {
    std::vector<TermPtr> out;
    for (auto& v : vars) out.push_back(mk_var(v));
    return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

// Quantifier with nested same-kind quantifiers merged and vacuous variables dropped.
FormulaPtr quant(Op q, std::vector<std::string> vars, FormulaPtr body) {
    while (body->op == q) {
        std::vector<std::string> merged;
        for (auto& v : vars)
            if (!contains(body->vars, v)) merged.push_back(v);
        for (auto& v : body->vars) merged.push_back(v);
        vars = std::move(merged);
        body = body->kids[0];
    }
    auto free = free_variable_set(body);
    std::vector<std::string> keep;
    for (auto& v : vars)
        if (free.count(v) && !contains(keep, v)) keep.push_back(v);
    if (keep.empty()) return body;
    return mk_quant(q, keep, body);
}

FormulaPtr flat(Op op, const std::vector<FormulaPtr>& kids) {
    std::vector<FormulaPtr> out;
    for (auto& k : kids) {
        if (k->op == op)
            out.insert(out.end(), k->kids.begin(), k->kids.end());
        else
            out.push_back(k);
    }
    return op == Op::And ? conj(out) : disj(out);
}

FormulaPtr pn(const FormulaPtr& f, bool neg) {
    switch (f->op) {
    case Op::True: return neg ? mk_false() : f;
    case Op::False: return neg ? mk_true() : f;
    case Op::Atom: return neg ? mk_not(f) : f;
    case Op::Not: return pn(f->kids[0], !neg);
    case Op::And:
    case Op::Or: {
        std::vector<FormulaPtr> kids;
        for (auto& k : f->kids) kids.push_back(pn(k, neg));
        bool conj_out = (f->op == Op::And) != neg;
        return flat(conj_out ? Op::And : Op::Or, kids);
    }
    case Op::Implies: {
        auto& a = f->kids[0];
        auto& b = f->kids[1];
        if (!neg) return flat(Op::Or, {pn(a, true), pn(b, false)});
        return flat(Op::And, {pn(a, false), pn(b, true)});
    }
    case Op::Iff: {
        auto& a = f->kids[0];
        auto& b = f->kids[1];
        if (!neg)
            return flat(Op::And, {flat(Op::Or, {pn(a, true), pn(b, false)}), flat(Op::Or, {pn(a, false), pn(b, true)})});
        return flat(Op::And, {flat(Op::Or, {pn(a, false), pn(b, false)}), flat(Op::Or, {pn(a, true), pn(b, true)})});
    }
    case Op::Forall:
    case Op::Exists: {
        Op q = (f->op == Op::Forall) != neg ? Op::Forall : Op::Exists;
        return quant(q, f->vars, pn(f->kids[0], neg));
    }
    case Op::Agg: {
        auto cond = pn(f->kids[0], false);
        auto& b = f->args[0];
        auto agg = [&](Cmp c) { return mk_agg(b, c, f->fn, f->vars, cond); };
        auto lit = [&](Cmp c, bool negative) { return negative ? mk_not(agg(c)) : agg(c); };
        switch (f->cmp) {
        case Cmp::Geq: return lit(Cmp::Geq, neg);
        case Cmp::Leq: return lit(Cmp::Leq, neg);
        case Cmp::Gt: return lit(Cmp::Leq, !neg);
        case Cmp::Lt: return lit(Cmp::Geq, !neg);
        case Cmp::Eq:
            if (!neg) return mk_and({agg(Cmp::Geq), agg(Cmp::Leq)});
            return mk_or({mk_not(agg(Cmp::Geq)), mk_not(agg(Cmp::Leq))});
        }
    }
    }
    return f;
}

// ---------------------------------------------------------------- ENF

class EnfBuilder {
public:
    EnfBuilder(NormalizationResult& res) : res_(res) {}

    FormulaPtr name(const FormulaPtr& chi, int source) {
        auto vars = free_variables(chi);
        std::string n;
        do n = "Aux" + std::to_string(next_++);
        while (res_.vocabulary.declared(n));
        res_.vocabulary.add_predicate(n, static_cast<int>(vars.size()));
        res_.aux.push_back({n, vars, chi, source});
        auto atom = mk_atom(n, var_terms(vars));
        queue_.push_back({EnfSentence{vars, atom, chi}, source});
        return atom;
    }

    // Bring one sentence and every definition it spawns into ENF.
    void run(EnfSentence e, int source) {
        queue_.push_back({std::move(e), source});
        run_pending();
    }

    void run_pending() {
        while (!queue_.empty()) {
            auto [s, src] = queue_.front();
            queue_.pop_front();
            finish(s, src);
            res_.sentences.push_back(std::move(s));
            res_.source.push_back(src);
        }
    }

private:
    void finish(EnfSentence& e, int source) {
        if (e.body->op == Op::Not && e.body->kids[0]->op == Op::Agg) {
            e.head = negate_literal(e.head);
            e.body = e.body->kids[0];
        }
        auto& b = e.body;
        switch (b->op) {
        case Op::And:
        case Op::Or: {
            std::vector<FormulaPtr> kids;
            for (auto& k : b->kids) kids.push_back(is_literal(k) ? k : name(k, source));
            b = b->op == Op::And ? mk_and(kids) : mk_or(kids);
            break;
        }
        case Op::Forall:
        case Op::Exists:
            if (!is_literal(b->kids[0])) b = mk_quant(b->op, b->vars, name(b->kids[0], source));
            break;
        case Op::Agg:
            if (!is_literal(b->kids[0])) b = mk_agg(b->args[0], b->cmp, b->fn, b->vars, name(b->kids[0], source));
            break;
        default:
            if (!is_literal(b)) throw std::logic_error("unexpected formula in ENF body: " + to_string(b));
        }
    }

    NormalizationResult& res_;
    std::deque<std::pair<EnfSentence, int>> queue_;
    int next_ = 1;
};

// Leading ∀ block and the matrix underneath it.
std::pair<std::vector<std::string>, FormulaPtr> strip_forall(FormulaPtr f) {
    std::vector<std::string> vars;
    while (f->op == Op::Forall) {
        for (auto& v : f->vars)
            if (!contains(vars, v)) vars.push_back(v);
        f = f->kids[0];
    }
    return {vars, f};
}

bool usable_head(const FormulaPtr& l) {
    return is_literal(l) && literal_atom(l) && !is_builtin_literal(l);
}

// ∀x̄ (L ↔ ψ) with free(L) = free(ψ): returns the ENF candidate.
std::optional<EnfSentence> definitional_form(const FormulaPtr& sentence) {
    auto [vars, m] = strip_forall(sentence);
    if (m->op != Op::Iff) return std::nullopt;
    for (int side = 0; side < 2; ++side) {
        auto& l = m->kids[side];
        auto& psi = m->kids[1 - side];
        if (usable_head(l) && free_variable_set(l) == free_variable_set(psi))
            return EnfSentence{free_variables(l), l, push_negations(psi)};
    }
    return std::nullopt;
}

FormulaPtr vars_differ(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<FormulaPtr> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(mk_neq(mk_var(a[i]), mk_var(b[i])));
    return disj(d);
}

FormulaPtr vars_equal(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<FormulaPtr> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(mk_eq(mk_var(a[i]), mk_var(b[i])));
    return conj(d);
}

std::vector<std::string> primed(const std::vector<std::string>& vars, std::set<std::string>& taken) {
    std::vector<std::string> out;
    for (auto& v : vars) {
        auto n = fresh_variable(v, taken);
        taken.insert(n);
        out.push_back(n);
    }
    return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    for (auto& v : b)
        if (!contains(a, v)) a.push_back(v);
    return a;
}

} // namespace

FormulaPtr push_negations(const FormulaPtr& f) { return pn(f, false); }

FormulaPtr EnfSentence::to_formula() const {
    auto iff = mk_iff(head, body);
    return vars.empty() ? iff : mk_forall(vars, iff);
}

FormulaPtr InfSentence::to_formula() const {
    auto imp = mk_implies(guard, head);
    return vars.empty() ? imp : mk_forall(vars, imp);
}

std::string to_string(const EnfSentence& e) { return to_string(e.to_formula()); }
std::string to_string(const InfSentence& s) { return to_string(s.to_formula()); }

bool is_enf(const EnfSentence& e) {
    if (!is_literal(e.head) || is_builtin_literal(e.head)) return false;
    if (free_variable_set(e.head) != free_variable_set(e.body)) return false;
    auto& b = e.body;
    switch (b->op) {
    case Op::And:
    case Op::Or:
        return std::all_of(b->kids.begin(), b->kids.end(), [](auto& k) { return is_literal(k); });
    case Op::Forall:
    case Op::Exists:
    case Op::Agg: return is_literal(b->kids[0]) && (b->op != Op::Agg || b->cmp == Cmp::Geq || b->cmp == Cmp::Leq);
    default: return is_literal(b);
    }
}

NormalizationResult to_enf(const std::vector<FormulaPtr>& sentences, const Vocabulary& v) {
    NormalizationResult res;
    res.vocabulary = v;
    EnfBuilder b(res);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        auto e = definitional_form(sentences[i]);
        if (!e) e = EnfSentence{{}, mk_true(), push_negations(sentences[i])};
        b.run(*e, static_cast<int>(i));
    }
    return res;
}

NormalizationResult to_enf(const Theory& t, const Vocabulary& v) { return to_enf(t.sentences(), v); }

InfSentence make_inf(const std::vector<std::string>& prefix, const FormulaPtr& guard, const FormulaPtr& head) {
    InfSentence s;
    if (head->op == Op::True || head->op == Op::False || is_builtin_literal(head)) {
        FormulaPtr g = guard;
        if (head->op != Op::False && head->op != Op::True)
            g = flat(Op::And, {guard, negate_literal(head)});
        auto free = free_variable_set(g);
        for (auto& v : prefix)
            if (free.count(v)) s.vars.push_back(v);
        s.guard = g;
        s.head = head->op == Op::True ? head : mk_false();
        return s;
    }
    s.vars = free_variables(head);
    s.head = head;
    auto free = free_variable_set(guard);
    std::vector<std::string> ex;
    for (auto& v : prefix)
        if (!contains(s.vars, v) && free.count(v)) ex.push_back(v);
    if (ex.empty()) {
        s.guard = guard;
        return s;
    }
    auto mentions = [&](const FormulaPtr& k) {
        auto fv = free_variable_set(k);
        return std::any_of(ex.begin(), ex.end(), [&](auto& v) { return fv.count(v) > 0; });
    };
    if (guard->op == Op::And) {
        std::vector<FormulaPtr> outside, inside;
        for (auto& k : guard->kids) (mentions(k) ? inside : outside).push_back(k);
        outside.push_back(quant(Op::Exists, ex, conj(inside)));
        s.guard = conj(outside);
    } else {
        s.guard = quant(Op::Exists, ex, guard);
    }
    return s;
}

std::vector<InfSentence> enf_to_inf(const EnfSentence& e) {
    std::vector<InfSentence> out;
    const auto& x = e.vars;
    auto L = e.head;
    auto b = e.body;
    auto nl = [](const FormulaPtr& l) { return negate_literal(l); };
    auto add = [&](const std::vector<std::string>& prefix, const FormulaPtr& g, const FormulaPtr& h) {
        out.push_back(make_inf(prefix, g, h));
    };
    auto taken = all_variables(e.to_formula());

    if (b->op == Op::Or) {
        auto& ls = b->kids;
        std::vector<FormulaPtr> negs;
        for (auto& l : ls) negs.push_back(nl(l));
        add(x, conj(negs), nl(L));
        for (auto& l : ls) add(x, l, L);
        for (auto& l : ls) add(x, nl(L), nl(l));
        for (std::size_t i = 0; i < ls.size(); ++i) {
            std::vector<FormulaPtr> g{L};
            for (std::size_t j = 0; j < ls.size(); ++j)
                if (j != i) g.push_back(nl(ls[j]));
            add(x, conj(g), ls[i]);
        }
        return out;
    }
    if (b->op == Op::Forall || b->op == Op::Exists) {
        auto& y = b->vars;
        auto lp = b->kids[0];
        auto z = primed(y, taken);
        auto lz = substitute(lp, y, var_terms(z));
        auto xy = concat(x, y);
        if (b->op == Op::Forall) {
            add(x, b, L);
            add(x, mk_exists(y, nl(lp)), nl(L));
            add(xy, L, lp);
            add(xy, mk_and({nl(L), mk_forall(z, mk_implies(vars_differ(y, z), lz))}), nl(lp));
        } else {
            add(x, mk_forall(y, nl(lp)), nl(L));
            add(x, b, L);
            add(xy, nl(L), nl(lp));
            add(xy, mk_and({L, mk_forall(z, mk_implies(vars_differ(y, z), nl(lz)))}), lp);
        }
        return out;
    }
    if (b->op == Op::Agg) {
        Cmp weak = b->cmp;
        if (weak == Cmp::Gt || weak == Cmp::Lt) {
            L = nl(L);
            weak = weak == Cmp::Gt ? Cmp::Leq : Cmp::Geq;
        } else if (weak == Cmp::Eq) {
            throw std::invalid_argument("equality aggregate is not in ENF");
        }
        Cmp strict = weak == Cmp::Geq ? Cmp::Lt : Cmp::Gt;
        auto& y = b->vars;
        auto lp = b->kids[0];
        auto yp = primed(y, taken);
        auto lyp = substitute(lp, y, var_terms(yp));
        auto bound = b->args[0];
        auto agg = [&](Cmp c, const FormulaPtr& cond) { return mk_agg(bound, c, b->fn, y, cond); };
        auto vminus = flat(Op::And, {vars_differ(y, yp), lp});
        auto vplus = flat(Op::Or, {vars_equal(y, yp), lp});
        auto xy = concat(x, yp);
        add(x, agg(weak, lp), L);
        add(x, agg(strict, lp), nl(L));
        add(xy, mk_and({L, agg(strict, vminus)}), lyp);
        add(xy, mk_and({L, agg(strict, vplus)}), nl(lyp));
        add(xy, mk_and({nl(L), agg(weak, vminus)}), lyp);
        add(xy, mk_and({nl(L), agg(weak, vplus)}), nl(lyp));
        return out;
    }
    // conjunction, n >= 1
    std::vector<FormulaPtr> ls = b->op == Op::And ? b->kids : std::vector<FormulaPtr>{b};
    add(x, conj(ls), L);
    for (auto& l : ls) add(x, nl(l), nl(L));
    for (auto& l : ls) add(x, L, l);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        std::vector<FormulaPtr> g{nl(L)};
        for (std::size_t j = 0; j < ls.size(); ++j)
            if (j != i) g.push_back(ls[j]);
        add(x, conj(g), nl(ls[i]));
    }
    return out;
}

namespace {

struct InfCollector {
    InfResult& res;
    EnfBuilder builder;
    std::size_t consumed = 0; // ENF sentences already expanded

    explicit InfCollector(InfResult& r) : res(r), builder(r.normalization) {}

    void drain() {
        auto& n = res.normalization;
        for (; consumed < n.sentences.size(); ++consumed) {
            for (auto& s : enf_to_inf(n.sentences[consumed])) {
                res.infs.push_back(std::move(s));
                res.source.push_back(n.source[consumed]);
            }
        }
    }

    void emit(const InfSentence& s, int src) {
        res.infs.push_back(s);
        res.source.push_back(src);
    }

    // ∀x̄ (L1 ∨ … ∨ Ln) straight to INF; top-level conjunctions are split first.
    bool clause(const FormulaPtr& f, std::vector<std::string> prefix, int src) {
        auto [vars, m] = strip_forall(f);
        prefix = concat(prefix, vars);
        if (m->op == Op::And) {
            for (auto& k : m->kids) {
                auto fv = free_variable_set(k);
                std::vector<std::string> kp;
                for (auto& v : prefix)
                    if (fv.count(v)) kp.push_back(v);
                if (!clause(k, kp, src)) {
                    builder.run(EnfSentence{{}, mk_true(), quant(Op::Forall, kp, k)}, src);
                    drain();
                }
            }
            return true;
        }
        if (m->op != Op::Or && !is_literal(m)) return false;
        std::vector<FormulaPtr> ls = m->op == Op::Or ? m->kids : std::vector<FormulaPtr>{m};
        // Emit the clause INFs before the auxiliary definitions they mention.
        std::vector<FormulaPtr> named;
        for (auto& l : ls) named.push_back(is_literal(l) ? l : builder.name(l, src));
        if (named.size() == 1) {
            emit(make_inf(prefix, mk_true(), named[0]), src);
        } else {
            for (std::size_t i = 0; i < named.size(); ++i) {
                std::vector<FormulaPtr> g;
                for (std::size_t j = 0; j < named.size(); ++j)
                    if (j != i) g.push_back(negate_literal(named[j]));
                emit(make_inf(prefix, conj(g), named[i]), src);
            }
        }
        builder.run_pending();
        drain();
        return true;
    }
};

} // namespace

InfResult sentences_to_inf(const std::vector<FormulaPtr>& sentences, const Vocabulary& v, const NormalizeOptions& opt) {
    InfResult res;
    res.normalization.vocabulary = v;
    InfCollector c(res);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        int src = static_cast<int>(i);
        if (auto e = definitional_form(sentences[i])) {
            c.builder.run(*e, src);
            c.drain();
            continue;
        }
        auto g = push_negations(sentences[i]);
        if (opt.clause_shortcut && c.clause(g, {}, src)) continue;
        c.builder.run(EnfSentence{{}, mk_true(), g}, src);
        c.drain();
    }
    return res;
}

InfResult theory_to_inf(const Theory& t, const Vocabulary& v, const NormalizeOptions& opt) {
    return sentences_to_inf(t.sentences(), v, opt);
}

// ---------------------------------------------------------------- simplification

FormulaPtr fold_constants(const FormulaPtr& f) {
    switch (f->op) {
    case Op::True:
    case Op::False:
    case Op::Atom: return f;
    case Op::Not: {
        auto k = fold_constants(f->kids[0]);
        if (k->op == Op::True) return mk_false();
        if (k->op == Op::False) return mk_true();
        return k == f->kids[0] ? f : mk_not(k);
    }
    case Op::And:
    case Op::Or: {
        bool is_and = f->op == Op::And;
        std::vector<FormulaPtr> kids;
        for (auto& k : f->kids) {
            auto g = fold_constants(k);
            if (g->op == (is_and ? Op::False : Op::True)) return g;
            if (g->op == (is_and ? Op::True : Op::False)) continue;
            kids.push_back(g);
        }
        return is_and ? conj(kids) : disj(kids);
    }
    case Op::Implies: {
        auto a = fold_constants(f->kids[0]);
        auto b = fold_constants(f->kids[1]);
        if (a->op == Op::False || b->op == Op::True) return mk_true();
        if (a->op == Op::True) return b;
        if (b->op == Op::False) return fold_constants(mk_not(a));
        return mk_implies(a, b);
    }
    case Op::Iff: {
        auto a = fold_constants(f->kids[0]);
        auto b = fold_constants(f->kids[1]);
        if (a->op == Op::True) return b;
        if (b->op == Op::True) return a;
        if (a->op == Op::False) return fold_constants(mk_not(b));
        if (b->op == Op::False) return fold_constants(mk_not(a));
        return mk_iff(a, b);
    }
    case Op::Forall:
    case Op::Exists: {
        auto k = fold_constants(f->kids[0]);
        // ∀x ⊥ and ∃x ⊤ depend on the domain being non-empty; leave them alone
        if (f->op == Op::Forall && k->op == Op::True) return k;
        if (f->op == Op::Exists && k->op == Op::False) return k;
        return mk_quant(f->op, f->vars, k);
    }
    case Op::Agg: return mk_agg(f->args[0], f->cmp, f->fn, f->vars, fold_constants(f->kids[0]));
    }
    return f;
}

namespace {

std::string canonical_head(const InfSentence& s) {
    std::vector<TermPtr> ts;
    for (std::size_t i = 0; i < s.vars.size(); ++i) ts.push_back(mk_var("#" + std::to_string(i)));
    return to_string(substitute(s.head, s.vars, ts));
}

} // namespace

std::vector<InfSentence> simplify_inf(const std::vector<InfSentence>& v) {
    std::vector<InfSentence> live;
    std::vector<bool> unconditional;
    for (auto& s : v) {
        if (s.head_is_true()) continue;
        auto g = fold_constants(s.guard);
        if (g->op == Op::False) continue;
        live.push_back(s);
        unconditional.push_back(g->op == Op::True);
    }
    std::set<std::string> covered;
    for (std::size_t i = 0; i < live.size(); ++i)
        if (unconditional[i] && !live[i].head_is_false()) covered.insert(canonical_head(live[i]));
    std::vector<InfSentence> out;
    std::vector<std::string> heads;
    for (std::size_t i = 0; i < live.size(); ++i) {
        auto h = canonical_head(live[i]);
        if (!unconditional[i] && covered.count(h)) continue;
        bool dup = false;
        auto fi = live[i].to_formula();
        for (std::size_t j = 0; j < out.size() && !dup; ++j)
            dup = heads[j] == h && alpha_equal(out[j].to_formula(), fi);
        if (dup) continue;
        out.push_back(live[i]);
        heads.push_back(h);
    }
    return out;
}

// ---------------------------------------------------------------- functions

namespace {

class FunctionEliminator {
public:
    FunctionEliminator(const std::map<std::string, std::string>& graph) : graph_(graph) {}

    FormulaPtr run(const FormulaPtr& f) {
        taken_ = all_variables(f);
        return walk(f);
    }

    FormulaPtr run_body(const FormulaPtr& f, const std::vector<std::string>& extra) {
        taken_ = all_variables(f);
        taken_.insert(extra.begin(), extra.end());
        return walk(f);
    }

private:
    static bool has_func(const TermPtr& t) {
        if (t->kind == Term::Kind::Func) return true;
        for (auto& a : t->args)
            if (has_func(a)) return true;
        return false;
    }
    // First function term (left to right) whose arguments are function-free.
    static TermPtr innermost(const TermPtr& t) {
        if (t->kind != Term::Kind::Func) return nullptr;
        for (auto& a : t->args)
            if (auto r = innermost(a)) return r;
        return t;
    }
    static TermPtr replace(const TermPtr& t, const TermPtr& target, const TermPtr& by) {
        if (equal(t, target)) return by;
        if (t->kind != Term::Kind::Func) return t;
        std::vector<TermPtr> args;
        for (auto& a : t->args) args.push_back(replace(a, target, by));
        return mk_func(t->name, args);
    }

    std::string fresh() {
        static const char* names[] = {"x", "y", "z", "u", "v", "w"};
        for (auto n : names)
            if (!taken_.count(n)) {
                taken_.insert(n);
                return n;
            }
        for (int k = 1;; ++k) {
            auto n = "x" + std::to_string(k);
            if (!taken_.count(n)) {
                taken_.insert(n);
                return n;
            }
        }
    }

    FormulaPtr graph_atom(const TermPtr& f, const TermPtr& value) {
        auto args = f->args;
        args.push_back(value);
        return mk_atom(graph_.at(f->name), args);
    }

    FormulaPtr atom(const FormulaPtr& a) {
        bool any = std::any_of(a->args.begin(), a->args.end(), [](auto& t) { return has_func(t); });
        if (!any) return a;
        if (a->pred == kEq) {
            for (int side = 0; side < 2; ++side) {
                auto& f = a->args[side];
                auto& w = a->args[1 - side];
                if (f->kind == Term::Kind::Func && !has_func(w) &&
                    std::none_of(f->args.begin(), f->args.end(), [](auto& t) { return has_func(t); }))
                    return graph_atom(f, w);
            }
        }
        TermPtr target;
        for (auto& t : a->args)
            if ((target = innermost(t))) break;
        auto y = mk_var(fresh());
        std::vector<TermPtr> args;
        for (auto& t : a->args) args.push_back(replace(t, target, y));
        return mk_forall({y->name}, mk_implies(graph_atom(target, y), atom(mk_atom(a->pred, args))));
    }

    FormulaPtr walk(const FormulaPtr& f) {
        switch (f->op) {
        case Op::True:
        case Op::False: return f;
        case Op::Atom: return atom(f);
        case Op::Agg: return mk_agg(f->args[0], f->cmp, f->fn, f->vars, walk(f->kids[0]));
        case Op::Forall:
        case Op::Exists: return mk_quant(f->op, f->vars, walk(f->kids[0]));
        default: {
            auto g = std::make_shared<Formula>(*f);
            for (auto& k : g->kids) k = walk(k);
            return g;
        }
        }
    }

    const std::map<std::string, std::string>& graph_;
    std::set<std::string> taken_;
};

} // namespace

FunctionElimination eliminate_functions(const Theory& t, const Vocabulary& v) {
    FunctionElimination out;
    if (v.functions().empty()) {
        out.theory = t;
        out.vocabulary = v;
        return out;
    }
    for (auto& p : v.predicates()) out.vocabulary.add_predicate(p.name, p.arity);
    std::vector<FormulaPtr> axioms;
    for (auto& fn : v.functions()) {
        auto name = v.fresh_name("P_" + fn.name);
        while (out.vocabulary.declared(name)) name += "_";
        out.vocabulary.add_predicate(name, fn.arity + 1);
        out.graph[fn.name] = name;
        std::vector<std::string> xs;
        for (int i = 1; i <= fn.arity; ++i) xs.push_back(fn.arity == 1 ? "x" : "x" + std::to_string(i));
        auto with = [&](const std::string& y) {
            auto args = var_terms(xs);
            args.push_back(mk_var(y));
            return mk_atom(name, args);
        };
        auto total = mk_exists({"y"}, with("y"));
        auto func = mk_forall({"y1", "y2"}, mk_implies(mk_and({with("y1"), with("y2")}), mk_eq(mk_var("y1"), mk_var("y2"))));
        axioms.push_back(xs.empty() ? total : mk_forall(xs, total));
        axioms.push_back(xs.empty() ? func : mk_forall(xs, func));
    }
    for (auto& a : axioms) out.theory.elements.emplace_back(a);
    FunctionEliminator fe(out.graph);
    for (auto& e : t.elements) {
        if (auto f = std::get_if<FormulaPtr>(&e)) {
            out.theory.elements.emplace_back(fe.run(*f));
            continue;
        }
        Definition d = std::get<Definition>(e);
        for (auto& r : d.rules) r.body = fe.run_body(r.body, r.vars);
        out.theory.elements.emplace_back(d);
    }
    return out;
}

} // namespace infprop
