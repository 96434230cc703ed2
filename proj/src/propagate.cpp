#include "infprop/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "infprop/eval.hpp"

namespace infprop {

std::size_t RefinementTrace::change_count() const {
    std::size_t n = 0;
    for (auto& s : steps) n += s.changes.size();
    return n;
}

std::string to_string(const Change& c, const Structure& s) {
    auto& name = s.signature().preds[c.pred].name;
    auto t = s.tuple(c.pred, c.index);
    std::string out = name + "(";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + s.domain().name(t[i]);
    return out + ")=" + tv_char(c.value);
}

namespace {

constexpr std::size_t kBitmapLimit = std::size_t(1) << 24;

struct HeadArg {
    int slot = -1;
    int elem = -1;
};

std::vector<HeadArg> compile_head_args(const std::vector<TermPtr>& args, const std::vector<std::string>& vars,
                                       const Domain& dom) {
    std::vector<HeadArg> out;
    for (auto& t : args) {
        HeadArg a;
        if (t->kind == Term::Kind::Var) {
            auto it = std::find(vars.begin(), vars.end(), t->name);
            if (it == vars.end()) throw EvalError("head variable " + t->name + " is not quantified");
            a.slot = static_cast<int>(it - vars.begin());
        } else if (t->kind == Term::Kind::Num) {
            auto e = dom.find_number(t->value);
            if (!e) throw EvalError("numeral " + t->name + " in a head is not a domain element");
            a.elem = *e;
        } else {
            throw EvalError("function term in a head");
        }
        out.push_back(a);
    }
    return out;
}

std::size_t head_index(const std::vector<HeadArg>& args, const int* slots, std::size_t n) {
    std::size_t idx = 0;
    for (auto& a : args) idx = idx * n + (a.slot >= 0 ? slots[a.slot] : a.elem);
    return idx;
}

bool next_tuple(int* slots, int k, int n) {
    for (int i = k - 1; i >= 0; --i) {
        if (++slots[i] < n) return true;
        slots[i] = 0;
    }
    return false;
}

// Pull top-level existentials out of a conjunctive guard: ∃ȳ(A ∧ ∃z B) becomes
// vars ȳz over the conjunction A ∧ B, as long as no name is reused.
void peel_exists(const FormulaPtr& f, std::vector<std::string>& vars, std::vector<FormulaPtr>& conj) {
    if (f->op == Op::And) {
        for (auto& k : f->kids) peel_exists(k, vars, conj);
        return;
    }
    if (f->op == Op::Exists) {
        bool clash = false;
        for (auto& v : f->vars)
            if (std::find(vars.begin(), vars.end(), v) != vars.end()) clash = true;
        if (!clash) {
            vars.insert(vars.end(), f->vars.begin(), f->vars.end());
            peel_exists(f->kids[0], vars, conj);
            return;
        }
    }
    conj.push_back(f);
}

// A conjunct of a quantifier-free-prefix guard. Universal conjuncts remember, per head
// tuple, where their last scan met a non-certain instance and resume from there.
struct Part {
    Compiled c;
    int ny = -1; // -1: plain conjunct; else the number of universally bound slots
    std::size_t span = 1;
    mutable std::vector<std::uint32_t> watch;
};

struct InfProp {
    Compiled guard;
    // guard with its outer existentials turned into extra free slots h..mh-1;
    // a new witness must touch a changed atom, which is what the delta pass enumerates
    Compiled matrix;
    // top-level conjuncts of the matrix, each with the free slots it reads
    std::vector<Compiled> conj;
    std::vector<std::vector<int>> conj_slots;
    // per matrix occurrence: conjuncts fully determined by the slots that occurrence binds
    std::vector<std::vector<int>> prefilter;
    std::vector<Part> parts_eval;
    int h = 0;
    int mh = 0;
    bool head_false = false;
    bool head_true = false;
    int head_pred = -1;
    std::vector<HeadArg> head_args;
    TV value = TV::T;

    int scratch_size() const {
        int n = std::max(1, matrix.slot_count());
        for (auto& c : conj) n = std::max(n, c.slot_count());
        for (auto& pt : parts_eval) n = std::max(n, pt.c.slot_count());
        return n;
    }

    InfProp(const InfSentence& s, const Domain& dom, const Signature& sig)
        : guard(s.guard, s.vars, dom, sig), h(static_cast<int>(s.vars.size())) {
        std::vector<std::string> mv = s.vars;
        std::vector<FormulaPtr> parts;
        peel_exists(s.guard, mv, parts);
        if (mv.size() > s.vars.size())
            matrix = Compiled(parts.size() == 1 ? parts[0] : mk_and(parts), mv, dom, sig);
        else
            matrix = guard;
        mh = static_cast<int>(mv.size());
        if (parts.size() > 1) {
            for (auto& c : parts) {
                conj.emplace_back(c, mv, dom, sig);
                std::vector<int> used;
                for (auto& v : free_variables(c))
                    used.push_back(static_cast<int>(std::find(mv.begin(), mv.end(), v) - mv.begin()));
                conj_slots.push_back(std::move(used));
            }
        }
        if (mh == h && ipow(dom.size(), h) <= kBitmapLimit) {
            bool any_forall = false;
            for (auto& c : parts) {
                Part pt;
                bool clash = c->op != Op::Forall;
                if (!clash)
                    for (auto& v : c->vars)
                        if (std::find(mv.begin(), mv.end(), v) != mv.end()) clash = true;
                if (clash) {
                    pt.c = Compiled(c, mv, dom, sig);
                } else {
                    auto fv = mv;
                    fv.insert(fv.end(), c->vars.begin(), c->vars.end());
                    pt.c = Compiled(c->kids[0], fv, dom, sig);
                    pt.ny = static_cast<int>(c->vars.size());
                    pt.span = ipow(dom.size(), pt.ny);
                    any_forall = true;
                }
                parts_eval.push_back(std::move(pt));
            }
            if (!any_forall || dom.size() == 0) parts_eval.clear();
        }
        for (auto& occ : matrix.occurrences()) {
            std::vector<bool> bound(mh, false);
            for (int fs : occ.free_slot)
                if (fs >= 0) bound[fs] = true;
            std::vector<int> pre;
            for (std::size_t k = 0; k < conj_slots.size(); ++k)
                if (std::all_of(conj_slots[k].begin(), conj_slots[k].end(), [&](int v) { return bound[v]; }))
                    pre.push_back(static_cast<int>(k));
            prefilter.push_back(std::move(pre));
        }
        if (s.head_is_false()) {
            head_false = true;
            return;
        }
        if (s.head_is_true()) {
            head_true = true;
            return;
        }
        auto atom = literal_atom(s.head);
        if (!atom || is_builtin(atom->pred)) throw EvalError("INF head must be a non-builtin literal");
        auto p = sig.find(atom->pred);
        if (!p) throw EvalError("predicate " + atom->pred + " is not interpreted by the structure");
        head_pred = *p;
        value = s.head->op == Op::Not ? TV::F : TV::T;
        head_args = compile_head_args(atom->args, s.vars, dom);
    }

    // true when the head atom for these slots already carries the bit this sentence adds
    bool settled(const Structure& st, const int* slots) const {
        if (head_false || head_true) return head_true;
        TV cur = st.get(head_pred, head_index(head_args, slots, st.domain().size()));
        return lub_p(cur, value) == cur;
    }

    // ct of the matrix; code is the head tuple's code (used only with watches)
    bool check(const Structure& st, int* slots, std::uint64_t code) const {
        if (parts_eval.empty()) return matrix.ct(st, slots);
        std::size_t n = st.domain().size();
        for (auto& pt : parts_eval) {
            if (pt.ny < 0) {
                if (!pt.c.ct(st, slots)) return false;
                continue;
            }
            if (pt.watch.empty()) pt.watch.assign(ipow(n, h), 0);
            std::size_t start = pt.watch[code];
            for (std::size_t k = 0; k < pt.span; ++k) {
                std::size_t pos = start + k;
                if (pos >= pt.span) pos -= pt.span;
                std::size_t rest = pos;
                for (int i = mh + pt.ny - 1; i >= mh; --i) {
                    slots[i] = static_cast<int>(rest % n);
                    rest /= n;
                }
                if (!pt.c.ct(st, slots)) {
                    pt.watch[code] = static_cast<std::uint32_t>(pos);
                    return false;
                }
            }
        }
        return true;
    }

    // Head atoms (or, for a false head, a marker) for which the guard is certainly true.
    template <class Fire>
    void eval_at(const Structure& st, int* slots, Fire&& fire) const {
        if (settled(st, slots)) return;
        bool ok;
        if (parts_eval.empty()) {
            ok = guard.ct(st, slots);
        } else {
            std::uint64_t code = 0;
            for (int i = 0; i < h; ++i) code = code * st.domain().size() + slots[i];
            ok = check(st, slots, code);
        }
        if (ok) fire(head_false ? 0 : head_index(head_args, slots, st.domain().size()));
    }
};

// Precomputed ground rule instances of a definition.
class WfmSolver {
public:
    WfmSolver(const Definition& d, const Domain& dom, const Signature& sig) : n_(dom.size()) {
        for (auto& name : d.defined()) {
            auto p = sig.find(name);
            if (!p) throw EvalError("defined predicate " + name + " is not interpreted by the structure");
            defined_.push_back(*p);
        }
        for (auto& name : d.open())
            if (auto p = sig.find(name)) open_.push_back(*p);
        support_.resize(defined_.size());
        for (std::size_t k = 0; k < defined_.size(); ++k) support_[k].resize(ipow(n_, sig.arity(defined_[k])));
        for (std::size_t r = 0; r < d.rules.size(); ++r) {
            auto& rule = d.rules[r];
            bodies_.emplace_back(rule.body, rule.vars, dom, sig);
            widths_.push_back(static_cast<int>(rule.vars.size()));
            auto args = compile_head_args(rule.head_args, rule.vars, dom);
            int hp = *sig.find(rule.head);
            int k = static_cast<int>(std::find(defined_.begin(), defined_.end(), hp) - defined_.begin());
            int w = widths_.back();
            std::vector<int> slots(std::max(1, w), 0);
            if (w > 0 && n_ == 0) continue;
            std::uint64_t code = 0;
            do {
                std::size_t idx = head_index(args, slots.data(), n_);
                support_[k][idx].push_back(static_cast<int>(insts_.size()));
                insts_.push_back({static_cast<int>(r), code, k, idx});
                ++code;
            } while (next_tuple(slots.data(), w, n_));
        }
    }

    const std::vector<int>& defined() const { return defined_; }
    const std::vector<int>& open() const { return open_; }

    TV body_value(int inst, const Structure& s) const {
        auto& in = insts_[inst];
        auto& c = bodies_[in.rule];
        std::vector<int> slots(std::max(1, c.slot_count()), 0);
        std::uint64_t code = in.code;
        for (int i = widths_[in.rule] - 1; i >= 0; --i) {
            slots[i] = static_cast<int>(code % n_);
            code /= n_;
        }
        return c.eval(s, slots.data());
    }

    Structure run(const Structure& i) const {
        if (!i.three_valued()) throw std::invalid_argument("well-founded model of a strictly four-valued structure");
        Structure j = i;
        for (int p : defined_)
            for (std::size_t a = 0; a < j.atom_count(p); ++a) j.set(p, a, TV::U);
        while (true) {
            bool changed = false;
            for (bool more = true; more;) {
                more = false;
                for (std::size_t k = 0; k < insts_.size(); ++k) {
                    auto& in = insts_[k];
                    int p = defined_[in.pred];
                    if (j.get(p, in.idx) != TV::U) continue;
                    if (body_value(static_cast<int>(k), j) == TV::T) {
                        j.set(p, in.idx, TV::T);
                        more = changed = true;
                    }
                }
            }
            // greatest unfounded set by downward iteration
            std::vector<std::pair<int, std::size_t>> u;
            for (std::size_t k = 0; k < defined_.size(); ++k)
                for (std::size_t a = 0; a < j.atom_count(defined_[k]); ++a)
                    if (j.get(defined_[k], a) == TV::U) u.emplace_back(static_cast<int>(k), a);
            if (u.empty()) break;
            Structure g = j;
            for (auto& [k, a] : u) g.set(defined_[k], a, TV::F);
            std::vector<bool> in_u(u.size(), true);
            for (bool more = true; more;) {
                more = false;
                for (std::size_t x = 0; x < u.size(); ++x) {
                    if (!in_u[x]) continue;
                    auto [k, a] = u[x];
                    for (int inst : support_[k][a]) {
                        if (body_value(inst, g) != TV::F) {
                            in_u[x] = false;
                            g.set(defined_[k], a, TV::U);
                            more = true;
                            break;
                        }
                    }
                }
            }
            for (std::size_t x = 0; x < u.size(); ++x) {
                if (!in_u[x]) continue;
                j.set(defined_[u[x].first], u[x].second, TV::F);
                changed = true;
            }
            if (!changed) break;
        }
        return j;
    }

private:
    struct Inst {
        int rule;
        std::uint64_t code;
        int pred; // index into defined_
        std::size_t idx;
    };
    std::size_t n_;
    std::vector<int> defined_, open_;
    std::vector<Compiled> bodies_;
    std::vector<int> widths_;
    std::vector<Inst> insts_;
    std::vector<std::vector<std::vector<int>>> support_;
};

class Engine {
public:
    Engine(Structure& s, const std::vector<InfSentence>& infs, const std::vector<Definition>& defs,
           const PropagateConfig& cfg, RefinementTrace& tr)
        : s_(s), cfg_(cfg), tr_(tr), n_(s.domain().size()) {
        const auto& sig = s.signature();
        log_.resize(sig.preds.size());
        watchers_.resize(sig.preds.size());
        for (std::size_t k = 0; k < infs.size(); ++k) {
            infs_.emplace_back(infs[k], s.domain(), sig);
            tr_.propagators.push_back("inf:" + std::to_string(k));
        }
        for (std::size_t k = 0; k < defs.size(); ++k) {
            defs_.emplace_back(defs[k], s.domain(), sig);
            tr_.propagators.push_back("def:" + std::to_string(k));
        }
        std::size_t total = infs_.size() + defs_.size();
        watched_.resize(total);
        cursor_.resize(total);
        occ_.resize(total);
        full_.assign(total, true);
        queued_.assign(total, false);
        for (std::size_t p = 0; p < infs_.size(); ++p) {
            auto& g = infs_[p].matrix;
            watched_[p] = g.predicates();
            auto& occs = g.occurrences();
            for (int q : watched_[p]) {
                std::vector<int> ids;
                for (std::size_t o = 0; o < occs.size(); ++o)
                    if (occs[o].pred == q) ids.push_back(static_cast<int>(o));
                occ_[p].push_back(std::move(ids));
            }
        }
        for (std::size_t d = 0; d < defs_.size(); ++d) watched_[infs_.size() + d] = defs_[d].open();
        for (std::size_t p = 0; p < total; ++p) {
            cursor_[p].assign(watched_[p].size(), 0);
            for (int q : watched_[p]) watchers_[q].push_back(static_cast<int>(p));
        }
        for (std::size_t p = 0; p < sig.preds.size(); ++p)
            for (std::size_t a = 0; a < s.atom_count(static_cast<int>(p)); ++a)
                if (s.get(static_cast<int>(p), a) == TV::I) ++icount_;
        if (cfg.schedule_seed) rng_.seed(*cfg.schedule_seed);
    }

    void run() {
        if (icount_ > 0 && cfg_.short_circuit) {
            go_top(-1);
            return;
        }
        for (std::size_t p = 0; p < full_.size(); ++p) enqueue(static_cast<int>(p));
        while (!queue_.empty() && !stop_) {
            if (cfg_.budget && tr_.applications >= *cfg_.budget) {
                tr_.stabilized = false;
                return;
            }
            int p = pop();
            ++tr_.applications;
            if (p < static_cast<int>(infs_.size()))
                apply_inf(p);
            else
                apply_def(p);
        }
    }

private:
    void enqueue(int p) {
        if (queued_[p]) return;
        queued_[p] = true;
        queue_.push_back(p);
    }

    int pop() {
        std::size_t k = 0;
        if (cfg_.schedule_seed) {
            k = std::uniform_int_distribution<std::size_t>(0, queue_.size() - 1)(rng_);
            std::swap(queue_[k], queue_.front());
        }
        int p = queue_.front();
        queue_.pop_front();
        queued_[p] = false;
        return p;
    }

    void go_top(int p) {
        s_ = Structure::top(s_.domain_ptr(), s_.signature_ptr());
        tr_.inconsistent = true;
        tr_.steps.push_back({p, {}});
        stop_ = true;
    }

    void sync_cursors(int p) {
        for (std::size_t w = 0; w < watched_[p].size(); ++w) cursor_[p][w] = log_[watched_[p][w]].size();
    }

    // Apply collected firings; returns false once the run has stopped.
    void commit(int p, int pred, const std::vector<std::size_t>& idxs, TV value) {
        TraceStep step{p, {}};
        for (std::size_t idx : idxs) {
            TV cur = s_.get(pred, idx);
            TV nv = lub_p(cur, value);
            if (nv == cur) continue;
            set(pred, idx, nv, step);
        }
        finish(step);
    }

    void set(int pred, std::size_t idx, TV nv, TraceStep& step) {
        if (nv == TV::I) ++icount_;
        s_.set(pred, idx, nv);
        log_[pred].push_back(idx);
        step.changes.push_back({pred, idx, nv});
        for (int w : watchers_[pred]) enqueue(w);
    }

    void finish(TraceStep& step) {
        if (step.changes.empty()) return;
        int p = step.propagator;
        tr_.steps.push_back(std::move(step));
        if (icount_ > 0 && cfg_.short_circuit) go_top(p);
    }

    void apply_inf(int p) {
        const InfProp& ip = infs_[p];
        if (ip.guard.has_aggregate() && icount_ > 0) {
            go_top(p);
            return;
        }
        std::vector<std::size_t> fires;
        bool contradiction = false;
        auto fire = [&](std::size_t idx) {
            if (ip.head_false)
                contradiction = true;
            else
                fires.push_back(idx);
        };
        bool full = full_[p];
        if (!full) {
            double est = 0;
            for (std::size_t w = 0; w < watched_[p].size(); ++w) {
                std::size_t pending = log_[watched_[p][w]].size() - cursor_[p][w];
                for (int o : occ_[p][w]) est += static_cast<double>(pending) * unbound_space(ip, o);
            }
            full = est >= std::pow(static_cast<double>(n_), ip.mh);
        }
        if (full) {
            full_[p] = false;
            sync_cursors(p);
            std::vector<int> slots(std::max(ip.scratch_size(), ip.guard.slot_count()), 0);
            if (ip.h == 0 || n_ > 0) {
                do {
                    ip.eval_at(s_, slots.data(), fire);
                    if (contradiction) break;
                } while (next_tuple(slots.data(), ip.h, n_));
            }
        } else {
            delta_pass(p, fire, contradiction);
            sync_cursors(p);
        }
        if (contradiction) {
            go_top(p);
            return;
        }
        if (!fires.empty()) commit(p, ip.head_pred, fires, ip.value);
    }

    double unbound_space(const InfProp& ip, int o) const {
        auto& occ = ip.matrix.occurrences()[o];
        std::vector<bool> bound(ip.mh, false);
        for (int fs : occ.free_slot)
            if (fs >= 0) bound[fs] = true;
        double r = 1;
        for (bool b : bound)
            if (!b) r *= n_;
        return r;
    }

    // Re-check only matrix instances that read an atom changed since the last visit.
    template <class Fire>
    void delta_pass(int p, Fire& fire, const bool& contradiction) {
        const InfProp& ip = infs_[p];
        std::size_t space = ipow(n_, ip.h);
        bool use_bitmap = space <= kBitmapLimit;
        if (use_bitmap && bitmap_.size() < space) bitmap_.resize(space, 0);
        std::vector<std::uint64_t> marked;
        std::unordered_set<std::uint64_t> marked_set;
        auto done = [&](std::uint64_t c) { return use_bitmap ? bitmap_[c] != 0 : marked_set.count(c) != 0; };
        auto mark = [&](std::uint64_t c) {
            if (use_bitmap) {
                bitmap_[c] = 1;
                marked.push_back(c);
            } else {
                marked_set.insert(c);
            }
        };
        std::vector<int> fixed(ip.mh), slots(ip.scratch_size(), 0);
        std::vector<int> unbound, t;
        auto& occs = ip.matrix.occurrences();
        for (std::size_t w = 0; w < watched_[p].size() && !contradiction; ++w) {
            int q = watched_[p][w];
            auto& lg = log_[q];
            for (std::size_t c = cursor_[p][w]; c < lg.size() && !contradiction; ++c) {
                t.resize(static_cast<std::size_t>(s_.signature().arity(q)));
                for (std::size_t k = t.size(), rest = lg[c]; k-- > 0; rest /= n_) t[k] = static_cast<int>(rest % n_);
                for (int o : occ_[p][w]) {
                    auto& occ = occs[o];
                    std::fill(fixed.begin(), fixed.end(), -1);
                    bool ok = true;
                    for (std::size_t k = 0; k < t.size() && ok; ++k) {
                        if (occ.const_elem[k] >= 0 && occ.const_elem[k] != t[k]) ok = false;
                        int fs = occ.free_slot[k];
                        if (fs < 0) continue;
                        if (fixed[fs] < 0)
                            fixed[fs] = t[k];
                        else if (fixed[fs] != t[k])
                            ok = false;
                    }
                    if (!ok) continue;
                    unbound.clear();
                    for (int i = 0; i < ip.mh; ++i) {
                        slots[i] = fixed[i] < 0 ? 0 : fixed[i];
                        if (fixed[i] < 0) unbound.push_back(i);
                    }
                    if (!unbound.empty() && n_ == 0) continue;
                    bool pass = true;
                    for (int k : ip.prefilter[o])
                        if (!ip.conj[k].ct(s_, slots.data())) {
                            pass = false;
                            break;
                        }
                    if (!pass) continue;
                    while (true) {
                        std::uint64_t code = 0;
                        for (int i = 0; i < ip.h; ++i) code = code * n_ + slots[i];
                        if (!done(code)) {
                            if (ip.settled(s_, slots.data())) {
                                mark(code);
                            } else if (ip.check(s_, slots.data(), code)) {
                                fire(ip.head_false ? 0 : head_index(ip.head_args, slots.data(), n_));
                                mark(code);
                                if (contradiction) break;
                            } else if (ip.mh == ip.h) {
                                mark(code);
                            }
                        }
                        int i = static_cast<int>(unbound.size()) - 1;
                        for (; i >= 0; --i) {
                            int& v = slots[unbound[i]];
                            if (++v < static_cast<int>(n_)) break;
                            v = 0;
                        }
                        if (i < 0) break;
                    }
                    if (contradiction) break;
                }
            }
        }
        for (auto c : marked) bitmap_[c] = 0;
    }

    void apply_def(int p) {
        auto& solver = defs_[p - infs_.size()];
        full_[p] = false;
        sync_cursors(p);
        if (icount_ > 0) {
            go_top(p);
            return;
        }
        Structure w = solver.run(s_);
        TraceStep step{p, {}};
        for (int q : solver.defined()) {
            for (std::size_t a = 0; a < s_.atom_count(q); ++a) {
                TV wv = w.get(q, a);
                if (wv != TV::T && wv != TV::F) continue;
                TV cur = s_.get(q, a);
                TV nv = lub_p(cur, wv);
                if (nv != cur) set(q, a, nv, step);
            }
        }
        finish(step);
    }

    Structure& s_;
    const PropagateConfig& cfg_;
    RefinementTrace& tr_;
    std::size_t n_;
    std::vector<InfProp> infs_;
    std::vector<WfmSolver> defs_;
    std::vector<std::vector<std::size_t>> log_;
    std::vector<std::vector<int>> watchers_;
    std::vector<std::vector<int>> watched_;
    std::vector<std::vector<std::size_t>> cursor_;
    std::vector<std::vector<std::vector<int>>> occ_;
    std::vector<bool> full_, queued_;
    std::deque<int> queue_;
    std::vector<std::uint8_t> bitmap_;
    std::mt19937_64 rng_;
    std::size_t icount_ = 0;
    bool stop_ = false;
};

} // namespace

RefinementTrace refine(Structure& s, const std::vector<InfSentence>& infs, const std::vector<Definition>& defs,
                       const PropagateConfig& cfg) {
    RefinementTrace tr;
    Engine e(s, infs, defs, cfg, tr);
    e.run();
    return tr;
}

Structure apply_inf(const InfSentence& s, const Structure& i) {
    InfProp ip(s, i.domain(), i.signature());
    if (ip.guard.has_aggregate() && !i.three_valued()) return Structure::top(i.domain_ptr(), i.signature_ptr());
    std::vector<int> slots(std::max(ip.scratch_size(), ip.guard.slot_count()), 0);
    std::vector<std::size_t> fires;
    bool contradiction = false;
    int n = i.domain().size();
    if (ip.h == 0 || n > 0) {
        do {
            ip.eval_at(i, slots.data(), [&](std::size_t idx) {
                if (ip.head_false)
                    contradiction = true;
                else
                    fires.push_back(idx);
            });
        } while (!contradiction && next_tuple(slots.data(), ip.h, n));
    }
    if (contradiction) return Structure::top(i.domain_ptr(), i.signature_ptr());
    Structure out = i;
    for (auto idx : fires) out.set(ip.head_pred, idx, lub_p(out.get(ip.head_pred, idx), ip.value));
    return out;
}

Structure apply_inconsistency(const Structure& i) {
    if (i.three_valued()) return i;
    return Structure::top(i.domain_ptr(), i.signature_ptr());
}

Structure wfm(const Definition& d, const Structure& i) {
    WfmSolver w(d, i.domain(), i.signature());
    return w.run(i);
}

Structure apply_definition(const Definition& d, const Structure& i) {
    if (!i.three_valued()) return Structure::top(i.domain_ptr(), i.signature_ptr());
    WfmSolver w(d, i.domain(), i.signature());
    Structure m = w.run(i);
    Structure out = i;
    for (int q : w.defined())
        for (std::size_t a = 0; a < i.atom_count(q); ++a) {
            TV v = m.get(q, a);
            if (v == TV::T || v == TV::F) out.set(q, a, lub_p(i.get(q, a), v));
        }
    return out;
}

std::vector<FormulaPtr> completion(const Definition& d) {
    std::vector<FormulaPtr> out;
    std::set<std::string> taken;
    for (auto& r : d.rules) {
        taken.insert(r.vars.begin(), r.vars.end());
        auto av = all_variables(r.body);
        taken.insert(av.begin(), av.end());
    }
    for (auto& p : d.defined()) {
        std::vector<const Rule*> rules;
        for (auto& r : d.rules)
            if (r.head == p) rules.push_back(&r);
        auto& first = *rules.front();
        std::vector<std::string> xs;
        bool distinct_vars = true;
        for (auto& a : first.head_args) {
            if (a->kind != Term::Kind::Var || std::find(xs.begin(), xs.end(), a->name) != xs.end()) {
                distinct_vars = false;
                break;
            }
            xs.push_back(a->name);
        }
        if (!distinct_vars) {
            xs.clear();
            for (std::size_t k = 1, made = 0; made < first.head_args.size(); ++k) {
                auto n = "x" + std::to_string(k);
                if (taken.count(n)) continue;
                xs.push_back(n);
                ++made;
            }
        }
        std::set<std::string> local = taken;
        local.insert(xs.begin(), xs.end());
        std::vector<FormulaPtr> disjuncts;
        for (auto* r : rules) {
            std::map<std::string, TermPtr> ren;
            std::vector<std::string> renamed;
            for (auto& v : r->vars) {
                auto nv = fresh_variable(v, local);
                local.insert(nv);
                ren[v] = mk_var(nv);
                renamed.push_back(nv);
            }
            std::vector<FormulaPtr> parts;
            for (std::size_t k = 0; k < xs.size(); ++k) parts.push_back(mk_eq(mk_var(xs[k]), substitute(r->head_args[k], ren)));
            auto body = substitute(r->body, ren);
            if (body->op == Op::And)
                parts.insert(parts.end(), body->kids.begin(), body->kids.end());
            else
                parts.push_back(body);
            FormulaPtr c = parts.size() == 1 ? parts[0] : mk_and(parts);
            disjuncts.push_back(renamed.empty() ? c : mk_exists(renamed, c));
        }
        std::vector<TermPtr> args;
        for (auto& x : xs) args.push_back(mk_var(x));
        auto iff = mk_iff(mk_atom(p, args), disjuncts.size() == 1 ? disjuncts[0] : mk_or(disjuncts));
        out.push_back(xs.empty() ? iff : mk_forall(xs, iff));
    }
    return out;
}

PropagationPlan plan_propagation(const Theory& t, const Vocabulary& v, const PropagateConfig& cfg) {
    PropagationPlan plan;
    auto fe = eliminate_functions(t, v);
    auto sentences = fe.theory.sentences();
    auto defs = fe.theory.definitions();
    if (cfg.definitions != DefinitionMode::WellFounded)
        for (auto& d : defs)
            for (auto& c : completion(d)) sentences.push_back(c);
    plan.normalization = sentences_to_inf(sentences, fe.vocabulary, NormalizeOptions{cfg.clause_shortcut});
    plan.infs = cfg.simplify ? simplify_inf(plan.normalization.infs) : plan.normalization.infs;
    if (cfg.definitions != DefinitionMode::Completion) plan.definitions = defs;
    plan.vocabulary = plan.normalization.normalization.vocabulary;
    plan.signature = make_signature(plan.vocabulary);
    return plan;
}

std::string PropagateResult::describe(int p) const {
    if (p < 0) return "inconsistent input";
    std::size_t k = static_cast<std::size_t>(p);
    if (k < plan.infs.size()) return to_string(plan.infs[k]);
    k -= plan.infs.size();
    if (k < plan.definitions.size()) {
        std::string out = "definition of";
        for (auto& d : plan.definitions[k].defined()) out += " " + d;
        return out;
    }
    return "?";
}

PropagateResult propagate(const Theory& t, const Vocabulary& v, const Structure& i, const PropagateConfig& cfg) {
    PropagateResult r;
    r.plan = plan_propagation(t, v, cfg);
    Structure s = i.extend(r.plan.signature);
    r.trace = refine(s, r.plan.infs, r.plan.definitions, cfg);
    r.working = s;
    r.structure = apply_inconsistency(s);
    if (cfg.restrict_output) r.structure = r.structure.restrict(i.signature_ptr());
    return r;
}

} // namespace infprop
