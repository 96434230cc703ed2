#include "infprop/eval.hpp"

#include <algorithm>
#include <limits>

namespace infprop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int builtin_code(const std::string& p) {
    if (p == kEq) return 0;
    if (p == kNeq) return 1;
    if (p == kLt) return 2;
    if (p == kLe) return 3;
    return -1;
}

// Advance an odometer over the domain; false when it wraps around.
inline bool next_assignment(const std::vector<int>& qslots, int* slots, int n) {
    for (int i = static_cast<int>(qslots.size()) - 1; i >= 0; --i) {
        int& v = slots[qslots[i]];
        if (++v < n) return true;
        v = 0;
    }
    return false;
}

inline void reset_assignment(const std::vector<int>& qslots, int* slots) {
    for (int q : qslots) slots[q] = 0;
}

} // namespace

Compiled::Compiled(const FormulaPtr& f, const std::vector<std::string>& free_vars, const Domain& dom,
                   const Signature& sig) {
    std::map<std::string, std::vector<int>> scope;
    for (auto& v : free_vars) scope[v].push_back(nslots_++);
    nfree_ = nslots_;
    root_ = build(f, scope, dom, sig);
}

Compiled::Arg Compiled::build_arg(const TermPtr& t, std::map<std::string, std::vector<int>>& scope,
                                  const Domain& dom) {
    Arg a;
    switch (t->kind) {
    case Term::Kind::Var: {
        auto it = scope.find(t->name);
        if (it == scope.end() || it->second.empty()) throw EvalError("variable " + t->name + " is not assigned");
        a.slot = it->second.back();
        return a;
    }
    case Term::Kind::Num: {
        a.numeric = true;
        a.num = t->value;
        if (auto e = dom.find_number(t->value)) a.elem = *e;
        return a;
    }
    case Term::Kind::Func: throw EvalError("function " + t->name + " must be eliminated before evaluation");
    }
    return a;
}

int Compiled::build(const FormulaPtr& f, std::map<std::string, std::vector<int>>& scope, const Domain& dom,
                    const Signature& sig) {
    Node nd;
    nd.op = f->op;
    switch (f->op) {
    case Op::True:
    case Op::False: break;
    case Op::Atom: {
        nd.builtin = builtin_code(f->pred);
        for (auto& t : f->args) nd.args.push_back(build_arg(t, scope, dom));
        if (nd.builtin >= 0) {
            if (nd.args.size() != 2) throw EvalError("builtin " + f->pred + " needs two arguments");
            break;
        }
        auto p = sig.find(f->pred);
        if (!p) throw EvalError("predicate " + f->pred + " is not interpreted by the structure");
        if (sig.arity(*p) != static_cast<int>(nd.args.size())) throw EvalError("arity mismatch for " + f->pred);
        nd.pred = *p;
        Occurrence oc;
        oc.pred = *p;
        for (auto& a : nd.args) {
            if (a.slot < 0 && a.elem < 0)
                throw EvalError("numeral in " + f->pred + " is not a domain element");
            oc.free_slot.push_back(a.slot >= 0 && a.slot < nfree_ ? a.slot : -1);
            oc.const_elem.push_back(a.slot < 0 ? a.elem : -1);
        }
        occ_.push_back(std::move(oc));
        break;
    }
    case Op::Forall:
    case Op::Exists:
    case Op::Agg: {
        if (f->op == Op::Agg) {
            has_agg_ = true;
            nd.args.push_back(build_arg(f->args[0], scope, dom));
            nd.fn = f->fn;
            nd.cmp = f->cmp;
        }
        for (auto& v : f->vars) {
            nd.qslots.push_back(nslots_);
            scope[v].push_back(nslots_++);
        }
        nd.kids.push_back(build(f->kids[0], scope, dom, sig));
        for (auto& v : f->vars) scope[v].pop_back();
        break;
    }
    default:
        for (auto& k : f->kids) nd.kids.push_back(build(k, scope, dom, sig));
    }
    nodes_.push_back(std::move(nd));
    return static_cast<int>(nodes_.size()) - 1;
}

std::vector<int> Compiled::predicates() const {
    std::vector<int> out;
    for (auto& o : occ_)
        if (std::find(out.begin(), out.end(), o.pred) == out.end()) out.push_back(o.pred);
    return out;
}

std::size_t Compiled::atom_index(const Node& nd, const Structure& s, const int* slots) const {
    std::size_t idx = 0, n = s.domain().size();
    for (auto& a : nd.args) idx = idx * n + (a.slot >= 0 ? slots[a.slot] : a.elem);
    return idx;
}

bool Compiled::builtin_holds(const Node& nd, const Structure& s, const int* slots) const {
    const Domain& d = s.domain();
    auto& x = nd.args[0];
    auto& y = nd.args[1];
    int ex = x.slot >= 0 ? slots[x.slot] : x.elem;
    int ey = y.slot >= 0 ? slots[y.slot] : y.elem;
    int c; // -1, 0, 1
    if (ex >= 0 && ey >= 0) {
        c = ex == ey ? 0 : (d.less(ex, ey) ? -1 : 1);
    } else {
        // at least one numeral outside the domain; numbers sort before names
        auto num = [&](const Arg& a, int e) -> std::optional<double> {
            if (e < 0) return a.num;
            return d.number(e);
        };
        auto nx = num(x, ex), ny = num(y, ey);
        if (nx && ny)
            c = *nx < *ny ? -1 : (*nx > *ny ? 1 : 0);
        else
            c = nx ? -1 : 1;
    }
    switch (nd.builtin) {
    case 0: return c == 0;
    case 1: return c != 0;
    case 2: return c < 0;
    default: return c <= 0;
    }
}

TV Compiled::eval_node(int n, const Structure& s, int* slots) const {
    const Node& nd = nodes_[n];
    switch (nd.op) {
    case Op::True: return TV::T;
    case Op::False: return TV::F;
    case Op::Atom:
        if (nd.builtin >= 0) return builtin_holds(nd, s, slots) ? TV::T : TV::F;
        return s.get(nd.pred, atom_index(nd, s, slots));
    case Op::Not: return inverse(eval_node(nd.kids[0], s, slots));
    case Op::And: {
        TV acc = TV::T;
        for (int k : nd.kids) {
            acc = glb_t(acc, eval_node(k, s, slots));
            if (acc == TV::F) break;
        }
        return acc;
    }
    case Op::Or: {
        TV acc = TV::F;
        for (int k : nd.kids) {
            acc = lub_t(acc, eval_node(k, s, slots));
            if (acc == TV::T) break;
        }
        return acc;
    }
    case Op::Implies:
        return lub_t(inverse(eval_node(nd.kids[0], s, slots)), eval_node(nd.kids[1], s, slots));
    case Op::Iff: {
        TV a = eval_node(nd.kids[0], s, slots), b = eval_node(nd.kids[1], s, slots);
        return glb_t(lub_t(inverse(a), b), lub_t(inverse(b), a));
    }
    case Op::Forall:
    case Op::Exists: {
        bool all = nd.op == Op::Forall;
        TV acc = all ? TV::T : TV::F;
        int dn = s.domain().size();
        if (dn == 0) return acc;
        reset_assignment(nd.qslots, slots);
        do {
            TV v = eval_node(nd.kids[0], s, slots);
            acc = all ? glb_t(acc, v) : lub_t(acc, v);
            if (acc == (all ? TV::F : TV::T)) break;
        } while (next_assignment(nd.qslots, slots, dn));
        return acc;
    }
    case Op::Agg: return eval_agg(nd, s, slots);
    }
    return TV::U;
}

bool Compiled::holds(int n, bool want_ct, const Structure& s, int* slots) const {
    const Node& nd = nodes_[n];
    switch (nd.op) {
    case Op::True: return want_ct;
    case Op::False: return !want_ct;
    case Op::Atom: {
        if (nd.builtin >= 0) return builtin_holds(nd, s, slots) == want_ct;
        TV v = s.get(nd.pred, atom_index(nd, s, slots));
        return want_ct ? ct_bit(v) : cf_bit(v);
    }
    case Op::Not: return holds(nd.kids[0], !want_ct, s, slots);
    case Op::And:
    case Op::Or: {
        // ct of a conjunction and cf of a disjunction need every child
        bool every = (nd.op == Op::And) == want_ct;
        for (int k : nd.kids) {
            bool h = holds(k, want_ct, s, slots);
            if (every && !h) return false;
            if (!every && h) return true;
        }
        return every;
    }
    case Op::Implies:
        if (want_ct) return holds(nd.kids[0], false, s, slots) || holds(nd.kids[1], true, s, slots);
        return holds(nd.kids[0], true, s, slots) && holds(nd.kids[1], false, s, slots);
    case Op::Iff: {
        int a = nd.kids[0], b = nd.kids[1];
        if (want_ct)
            return (holds(a, false, s, slots) || holds(b, true, s, slots)) &&
                   (holds(b, false, s, slots) || holds(a, true, s, slots));
        return (holds(a, true, s, slots) && holds(b, false, s, slots)) ||
               (holds(b, true, s, slots) && holds(a, false, s, slots));
    }
    case Op::Forall:
    case Op::Exists: {
        bool every = (nd.op == Op::Forall) == want_ct;
        int dn = s.domain().size();
        if (dn == 0) return every;
        reset_assignment(nd.qslots, slots);
        do {
            bool h = holds(nd.kids[0], want_ct, s, slots);
            if (every && !h) return false;
            if (!every && h) return true;
        } while (next_assignment(nd.qslots, slots, dn));
        return every;
    }
    case Op::Agg: {
        TV v = eval_agg(nd, s, slots);
        return want_ct ? ct_bit(v) : cf_bit(v);
    }
    }
    return false;
}

TV Compiled::eval_agg(const Node& nd, const Structure& s, int* slots) const {
    const Domain& d = s.domain();
    const Arg& b = nd.args[0];
    std::optional<double> bound;
    if (b.slot >= 0)
        bound = d.number(slots[b.slot]);
    else
        bound = b.num;
    std::vector<double> certain, unknown;
    int dn = d.size();
    bool inconsistent = false;
    if (dn > 0) {
        reset_assignment(nd.qslots, slots);
        do {
            TV v = eval_node(nd.kids[0], s, slots);
            if (v == TV::F) continue;
            if (v == TV::I) {
                inconsistent = true;
                continue;
            }
            double x = 1;
            if (nd.fn != AggFn::Card) {
                auto num = d.number(slots[nd.qslots[0]]);
                if (!num)
                    throw EvalError(std::string("non-numeric element ") + d.name(slots[nd.qslots[0]]) + " in " +
                                    agg_name(nd.fn));
                x = *num;
            }
            (v == TV::T ? certain : unknown).push_back(x);
        } while (next_assignment(nd.qslots, slots, dn));
    }
    if (inconsistent) return TV::I;
    if (!bound) return TV::F;
    return compare_bounds(*bound, nd.cmp, bounds_of(nd.fn, certain, unknown));
}

// ---------------------------------------------------------------- aggregates

Bounds bounds_of(AggFn fn, const std::vector<double>& certain, const std::vector<double>& unknown) {
    switch (fn) {
    case AggFn::Card:
        return {static_cast<double>(certain.size()), static_cast<double>(certain.size() + unknown.size())};
    case AggFn::Sum: {
        double base = 0, lo = 0, hi = 0;
        for (double x : certain) base += x;
        for (double x : unknown) (x < 0 ? lo : hi) += x;
        return {base + lo, base + hi};
    }
    case AggFn::Prod: {
        for (double x : certain)
            if (x < 0) throw EvalError("prod over a negative value");
        for (double x : unknown)
            if (x < 0) throw EvalError("prod over a negative value");
        double p = 1;
        for (double x : certain) p *= x;
        if (p == 0) return {0, 0};
        double lo = p, hi = p;
        bool zero = false;
        for (double x : unknown) {
            if (x == 0) zero = true;
            else if (x < 1) lo *= x;
            else hi *= x;
        }
        return {zero ? 0 : lo, hi};
    }
    case AggFn::Min: {
        double all = kInf, sure = kInf;
        for (double x : certain) sure = std::min(sure, x);
        all = sure;
        for (double x : unknown) all = std::min(all, x);
        return {all, sure};
    }
    case AggFn::Max: {
        double all = -kInf, sure = -kInf;
        for (double x : certain) sure = std::max(sure, x);
        all = sure;
        for (double x : unknown) all = std::max(all, x);
        return {sure, all};
    }
    }
    return {};
}

TV compare_bounds(double bound, Cmp cmp, const Bounds& b) {
    auto geq = [&] { return bound >= b.max ? TV::T : (bound >= b.min ? TV::U : TV::F); };
    auto leq = [&] { return bound <= b.min ? TV::T : (bound <= b.max ? TV::U : TV::F); };
    switch (cmp) {
    case Cmp::Geq: return geq();
    case Cmp::Leq: return leq();
    case Cmp::Lt: return inverse(geq());
    case Cmp::Gt: return inverse(leq());
    case Cmp::Eq: return glb_t(geq(), leq());
    }
    return TV::U;
}

// ---------------------------------------------------------------- entry points

static std::vector<std::string> assignment_vars(const Assignment& asg) {
    std::vector<std::string> v;
    for (auto& [k, e] : asg) v.push_back(k);
    return v;
}

TV evaluate(const Structure& s, const FormulaPtr& f, const Assignment& asg) {
    auto vars = assignment_vars(asg);
    Compiled c(f, vars, s.domain(), s.signature());
    std::vector<int> slots(std::max(1, c.slot_count()), 0);
    for (std::size_t i = 0; i < vars.size(); ++i) slots[i] = asg.at(vars[i]);
    return c.eval(s, slots.data());
}

ThreeValuedSet three_valued_set(const Structure& s, const std::vector<std::string>& vars, const FormulaPtr& cond,
                                const Assignment& asg) {
    auto outer = assignment_vars(asg);
    auto all = outer;
    all.insert(all.end(), vars.begin(), vars.end());
    Compiled c(cond, all, s.domain(), s.signature());
    std::vector<int> slots(std::max(1, c.slot_count()), 0);
    for (std::size_t i = 0; i < outer.size(); ++i) slots[i] = asg.at(outer[i]);
    ThreeValuedSet out;
    int dn = s.domain().size();
    std::vector<int> q;
    for (std::size_t i = 0; i < vars.size(); ++i) q.push_back(static_cast<int>(outer.size() + i));
    if (dn == 0) return out;
    reset_assignment(q, slots.data());
    do {
        Tuple t;
        for (int k : q) t.push_back(slots[k]);
        out.elems.emplace_back(std::move(t), c.eval(s, slots.data()));
    } while (next_assignment(q, slots.data(), dn));
    return out;
}

Bounds agg_bounds(const Structure& s, const std::vector<std::string>& vars, const FormulaPtr& cond, AggFn fn,
                  const Assignment& asg) {
    auto set = three_valued_set(s, vars, cond, asg);
    std::vector<double> certain, unknown;
    for (auto& [t, v] : set.elems) {
        if (v == TV::F) continue;
        if (v == TV::I) throw EvalError("set expression is inconsistent");
        double x = 1;
        if (fn != AggFn::Card) {
            auto num = s.domain().number(t[0]);
            if (!num) throw EvalError("non-numeric element " + s.domain().name(t[0]) + " in " + agg_name(fn));
            x = *num;
        }
        (v == TV::T ? certain : unknown).push_back(x);
    }
    return bounds_of(fn, certain, unknown);
}

// ---------------------------------------------------------------- ct / cf

std::pair<FormulaPtr, FormulaPtr> ct_cf(const FormulaPtr& f) {
    switch (f->op) {
    case Op::True: return {mk_true(), mk_false()};
    case Op::False: return {mk_false(), mk_true()};
    case Op::Atom: {
        auto& a = f->args;
        if (f->pred == kEq) return {f, mk_atom(kNeq, a)};
        if (f->pred == kNeq) return {f, mk_atom(kEq, a)};
        if (f->pred == kLt) return {f, mk_atom(kLe, {a[1], a[0]})};
        if (f->pred == kLe) return {f, mk_atom(kLt, {a[1], a[0]})};
        return {mk_atom(tf_name(f->pred, true), a), mk_atom(tf_name(f->pred, false), a)};
    }
    case Op::Not: {
        auto [t, c] = ct_cf(f->kids[0]);
        return {c, t};
    }
    case Op::And:
    case Op::Or: {
        std::vector<FormulaPtr> ts, cs;
        for (auto& k : f->kids) {
            auto [t, c] = ct_cf(k);
            ts.push_back(t);
            cs.push_back(c);
        }
        if (f->op == Op::And) return {mk_and(ts), mk_or(cs)};
        return {mk_or(ts), mk_and(cs)};
    }
    case Op::Implies: {
        auto [at, ac] = ct_cf(f->kids[0]);
        auto [bt, bc] = ct_cf(f->kids[1]);
        return {mk_or({ac, bt}), mk_and({at, bc})};
    }
    case Op::Iff: {
        auto [at, ac] = ct_cf(f->kids[0]);
        auto [bt, bc] = ct_cf(f->kids[1]);
        return {mk_and({mk_or({ac, bt}), mk_or({bc, at})}), mk_or({mk_and({at, bc}), mk_and({bt, ac})})};
    }
    case Op::Forall:
    case Op::Exists: {
        auto [t, c] = ct_cf(f->kids[0]);
        if (f->op == Op::Forall) return {mk_forall(f->vars, t), mk_exists(f->vars, c)};
        return {mk_exists(f->vars, t), mk_forall(f->vars, c)};
    }
    case Op::Agg: throw EvalError("ct/cf is not defined for aggregate atoms");
    }
    return {f, f};
}

} // namespace infprop
