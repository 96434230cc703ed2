#include "infprop/rules.hpp"

#include <algorithm>
#include <cctype>

#include "infprop/eval.hpp"

namespace infprop {

bool negation_free(const FormulaPtr& f) {
    if (f->op == Op::Not || f->op == Op::Implies || f->op == Op::Iff) return false;
    if (f->op == Op::Atom && f->pred == kNeq) return true; // builtin, evaluated directly
    for (auto& k : f->kids)
        if (!negation_free(k)) return false;
    return true;
}

RuleSet emit_rule_set(const std::vector<InfSentence>& v) {
    RuleSet out;
    for (auto& s : v) {
        if (has_aggregate(s.guard)) throw EvalError("aggregate guard has no rule-set form: " + to_string(s));
        PositiveRule r;
        r.vars = s.vars;
        r.body = ct_cf(s.guard).first;
        if (s.head_is_true()) continue;
        if (!s.head_is_false()) {
            auto atom = literal_atom(s.head);
            r.head = tf_name(atom->pred, s.head->op != Op::Not);
            r.head_args = atom->args;
        }
        out.rules.push_back(std::move(r));
    }
    return out;
}

namespace {

struct CompiledRule {
    Compiled body;
    int width = 0;
    int head = -1; // -1: constraint
    std::vector<int> arg_slot, arg_elem;
    std::vector<int> watched;

    CompiledRule(const PositiveRule& r, const Domain& dom, const Signature& sig)
        : body(r.body, r.vars, dom, sig), width(static_cast<int>(r.vars.size())) {
        if (!r.constraint()) {
            auto p = sig.find(r.head);
            if (!p) throw EvalError("rule head " + r.head + " is not in the signature");
            head = *p;
            for (auto& t : r.head_args) {
                int slot = -1, elem = -1;
                if (t->kind == Term::Kind::Var) {
                    slot = static_cast<int>(std::find(r.vars.begin(), r.vars.end(), t->name) - r.vars.begin());
                    if (slot == width) throw EvalError("unbound head variable " + t->name);
                } else if (t->kind == Term::Kind::Num) {
                    auto e = dom.find_number(t->value);
                    if (!e) throw EvalError("head numeral outside the domain");
                    elem = *e;
                } else {
                    throw EvalError("function term in a rule head");
                }
                arg_slot.push_back(slot);
                arg_elem.push_back(elem);
            }
        }
        watched = body.predicates();
    }

    std::size_t head_index(const int* slots, std::size_t n) const {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < arg_slot.size(); ++k) idx = idx * n + (arg_slot[k] >= 0 ? slots[arg_slot[k]] : arg_elem[k]);
        return idx;
    }
};

bool holds(const Structure& m, int p, std::size_t idx) { return m.get(p, idx) == TV::T; }

Structure all_true(const Structure& m) {
    Structure out(m.domain_ptr(), m.signature_ptr());
    for (std::size_t p = 0; p < m.signature().preds.size(); ++p)
        for (std::size_t a = 0; a < out.atom_count(static_cast<int>(p)); ++a) out.set(static_cast<int>(p), a, TV::T);
    return out;
}

// Closed-world copy: anything not t becomes f.
Structure normalized(const Structure& m) {
    Structure out = m;
    for (std::size_t p = 0; p < m.signature().preds.size(); ++p)
        for (std::size_t a = 0; a < out.atom_count(static_cast<int>(p)); ++a)
            if (out.get(static_cast<int>(p), a) != TV::T) out.set(static_cast<int>(p), a, TV::F);
    return out;
}

std::vector<CompiledRule> compile(const RuleSet& r, const Structure& m) {
    std::vector<CompiledRule> out;
    for (auto& rule : r.rules) out.emplace_back(rule, m.domain(), m.signature());
    return out;
}

// Every body-true instance of rule cr over all assignments; calls emit(head index) or
// returns true at the first true constraint body.
template <class Emit>
bool full_round(const CompiledRule& cr, const Structure& m, Emit&& emit) {
    int n = m.domain().size();
    std::vector<int> slots(std::max(1, cr.body.slot_count()), 0);
    if (cr.width > 0 && n == 0) return false;
    while (true) {
        if (cr.body.ct(m, slots.data())) {
            if (cr.head < 0) return true;
            emit(cr.head_index(slots.data(), n));
        }
        int i = cr.width - 1;
        for (; i >= 0; --i) {
            if (++slots[i] < n) break;
            slots[i] = 0;
        }
        if (i < 0) break;
    }
    return false;
}

} // namespace

Structure immediate_consequence(const RuleSet& r, const Structure& m0) {
    Structure m = normalized(m0);
    auto rules = compile(r, m);
    Structure out = m;
    for (auto& cr : rules) {
        if (full_round(cr, m, [&](std::size_t idx) { out.set(cr.head, idx, TV::T); })) return all_true(m);
    }
    return out;
}

Structure least_model_naive(const RuleSet& r, const Structure& seed) {
    Structure m = normalized(seed);
    while (true) {
        Structure next = immediate_consequence(r, m);
        if (next == m) return m;
        m = std::move(next);
    }
}

Structure least_model(const RuleSet& r, const Structure& seed) {
    Structure m = normalized(seed);
    auto rules = compile(r, m);
    int n = m.domain().size();
    std::size_t npred = m.signature().preds.size();
    std::vector<std::vector<int>> readers(npred);
    for (std::size_t k = 0; k < rules.size(); ++k)
        for (int p : rules[k].watched) readers[p].push_back(static_cast<int>(k));

    // round 0: everything
    std::vector<std::pair<int, std::size_t>> delta;
    for (auto& cr : rules) {
        bool bad = full_round(cr, m, [&](std::size_t idx) {
            if (!holds(m, cr.head, idx)) delta.emplace_back(cr.head, idx);
        });
        if (bad) return all_true(m);
    }
    std::vector<int> fixed, slots, unbound;
    while (true) {
        std::sort(delta.begin(), delta.end());
        delta.erase(std::unique(delta.begin(), delta.end()), delta.end());
        for (auto& [p, idx] : delta) m.set(p, idx, TV::T);
        if (delta.empty()) return m;
        std::vector<std::vector<std::size_t>> by_pred(npred);
        for (auto& [p, idx] : delta) by_pred[p].push_back(idx);
        std::vector<bool> touched(rules.size(), false);
        for (std::size_t p = 0; p < npred; ++p)
            if (!by_pred[p].empty())
                for (int k : readers[p]) touched[k] = true;
        std::vector<std::pair<int, std::size_t>> next;
        for (std::size_t k = 0; k < rules.size(); ++k) {
            if (!touched[k]) continue;
            auto& cr = rules[k];
            auto& occs = cr.body.occurrences();
            fixed.assign(cr.width, -1);
            slots.assign(std::max(1, cr.body.slot_count()), 0);
            for (auto& occ : occs) {
                for (std::size_t idx : by_pred[occ.pred]) {
                    Tuple t = m.tuple(occ.pred, idx);
                    std::fill(fixed.begin(), fixed.end(), -1);
                    bool ok = true;
                    for (std::size_t a = 0; a < t.size() && ok; ++a) {
                        if (occ.const_elem[a] >= 0 && occ.const_elem[a] != t[a]) ok = false;
                        int fs = occ.free_slot[a];
                        if (fs < 0) continue;
                        if (fixed[fs] < 0)
                            fixed[fs] = t[a];
                        else if (fixed[fs] != t[a])
                            ok = false;
                    }
                    if (!ok) continue;
                    unbound.clear();
                    for (int i = 0; i < cr.width; ++i) {
                        slots[i] = fixed[i] < 0 ? 0 : fixed[i];
                        if (fixed[i] < 0) unbound.push_back(i);
                    }
                    if (!unbound.empty() && n == 0) continue;
                    while (true) {
                        if (cr.body.ct(m, slots.data())) {
                            if (cr.head < 0) return all_true(m);
                            std::size_t h = cr.head_index(slots.data(), n);
                            if (!holds(m, cr.head, h)) next.emplace_back(cr.head, h);
                        }
                        int i = static_cast<int>(unbound.size()) - 1;
                        for (; i >= 0; --i) {
                            if (++slots[unbound[i]] < n) break;
                            slots[unbound[i]] = 0;
                        }
                        if (i < 0) break;
                    }
                }
            }
        }
        delta = std::move(next);
    }
}

namespace {

std::string dl_var(const std::string& v) {
    std::string out;
    for (char c : v) out += c == '\'' ? std::string("p") : std::string(1, c);
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

std::string dl_term(const TermPtr& t) {
    if (t->kind == Term::Kind::Var) return dl_var(t->name);
    return to_string(t);
}

std::string dl_args(const std::vector<TermPtr>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + dl_term(args[i]);
    return out;
}

std::string dl_vars(const std::vector<std::string>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "," : "") + dl_var(vs[i]);
    return out;
}

std::string dl_body(const FormulaPtr& f, bool nested) {
    switch (f->op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: {
        if (is_builtin(f->pred)) {
            std::string op = f->pred == kNeq ? "!=" : f->pred;
            return dl_term(f->args[0]) + " " + op + " " + dl_term(f->args[1]);
        }
        if (f->args.empty()) return f->pred;
        return f->pred + "(" + dl_args(f->args) + ")";
    }
    case Op::And: {
        std::string out;
        for (std::size_t i = 0; i < f->kids.size(); ++i) out += (i ? ", " : "") + dl_body(f->kids[i], true);
        return nested && f->kids.size() > 1 ? "(" + out + ")" : out;
    }
    case Op::Or: {
        std::string out;
        for (std::size_t i = 0; i < f->kids.size(); ++i) out += (i ? " ; " : "") + dl_body(f->kids[i], true);
        return f->kids.size() > 1 ? "(" + out + ")" : out;
    }
    case Op::Exists: return "exists(" + dl_vars(f->vars) + ": " + dl_body(f->kids[0], false) + ")";
    case Op::Forall: return "forall(" + dl_vars(f->vars) + ": " + dl_body(f->kids[0], false) + ")";
    default: return to_string(f);
    }
}

} // namespace

std::string to_datalog(const PositiveRule& r) {
    std::string head;
    if (!r.constraint()) head = r.head_args.empty() ? r.head : r.head + "(" + dl_args(r.head_args) + ")";
    std::string body = dl_body(r.body, false);
    if (r.body->op == Op::True) return head + ".";
    return (head.empty() ? ":- " : head + " :- ") + body + ".";
}

std::string to_datalog(const RuleSet& r) {
    std::string out;
    for (auto& rule : r.rules) out += to_datalog(rule) + "\n";
    return out;
}

} // namespace infprop
