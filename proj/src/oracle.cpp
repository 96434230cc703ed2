#include "infprop/oracle.hpp"

#include <algorithm>
#include <optional>

#include "infprop/eval.hpp"
#include "infprop/normalize.hpp"
#include "infprop/propagate.hpp"

namespace infprop {

namespace {

// Backtracking search over a chosen set of u-atoms.
class Search {
public:
    Search(const Theory& t, const Structure& i, bool relevant_only, std::size_t max_unknown) : base_(i) {
        for (auto& s : t.sentences()) sentences_.emplace_back(s, std::vector<std::string>{}, i.domain(), i.signature());
        defs_ = t.definitions();
        std::vector<bool> use(i.signature().preds.size(), !relevant_only);
        if (relevant_only) {
            auto mark = [&](const FormulaPtr& f) {
                for (auto& p : predicates_of(f))
                    if (auto k = i.signature().find(p)) use[*k] = true;
            };
            for (auto& s : t.sentences()) mark(s);
            for (auto& d : defs_)
                for (auto& r : d.rules) {
                    mark(r.body);
                    if (auto k = i.signature().find(r.head)) use[*k] = true;
                }
        }
        for (std::size_t p = 0; p < use.size(); ++p) {
            if (!use[p]) continue;
            int pi = static_cast<int>(p);
            for (std::size_t a = 0; a < i.atom_count(pi); ++a)
                if (i.get(pi, a) == TV::U) atoms_.emplace_back(pi, a);
        }
        if (atoms_.size() > max_unknown)
            throw OracleLimit("oracle refuses " + std::to_string(atoms_.size()) + " unknown atoms (limit " +
                              std::to_string(max_unknown) + ")");
    }

    const std::vector<std::pair<int, std::size_t>>& atoms() const { return atoms_; }

    // Depth-first; visit(m) returns false to stop. fixed[k] pins atom k (or U for free).
    template <class Visit>
    void run(const std::vector<TV>& fixed, Visit&& visit) {
        Structure m = base_;
        stop_ = false;
        dfs(m, 0, fixed, visit);
    }

private:
    bool consistent(const Structure& m) const {
        for (auto& c : sentences_) {
            std::vector<int> slots(std::max(1, c.slot_count()), 0);
            if (c.eval(m, slots.data()) == TV::F) return false;
        }
        return true;
    }

    bool leaf_ok(const Structure& m) const {
        for (auto& c : sentences_) {
            std::vector<int> slots(std::max(1, c.slot_count()), 0);
            if (c.eval(m, slots.data()) != TV::T) return false;
        }
        for (auto& d : defs_) {
            Structure w = wfm(d, m);
            for (auto& name : d.defined()) {
                int p = *m.signature().find(name);
                for (std::size_t a = 0; a < m.atom_count(p); ++a)
                    if (w.get(p, a) != m.get(p, a)) return false;
            }
        }
        return true;
    }

    template <class Visit>
    void dfs(Structure& m, std::size_t k, const std::vector<TV>& fixed, Visit& visit) {
        if (stop_) return;
        if (!consistent(m)) return;
        if (k == atoms_.size()) {
            if (leaf_ok(m) && !visit(m)) stop_ = true;
            return;
        }
        auto [p, a] = atoms_[k];
        for (TV v : {TV::F, TV::T}) {
            if (fixed[k] != TV::U && fixed[k] != v) continue;
            m.set(p, a, v);
            dfs(m, k + 1, fixed, visit);
            if (stop_) break;
        }
        m.set(p, a, TV::U);
    }

    Structure base_;
    std::vector<Compiled> sentences_;
    std::vector<Definition> defs_;
    std::vector<std::pair<int, std::size_t>> atoms_;
    bool stop_ = false;
};

struct Prepared {
    Theory theory;
    Structure start; // over the function-free vocabulary
};

Prepared prepare(const Theory& t, const Vocabulary& v, const Structure& i) {
    auto fe = eliminate_functions(t, v);
    auto sig = make_signature(fe.vocabulary);
    return {fe.theory, i.extend(sig)};
}

Structure complete_on(const Theory& t, const Structure& s, const OracleOptions& o) {
    if (!s.three_valued()) return Structure::top(s.domain_ptr(), s.signature_ptr());
    Search search(t, s, true, o.max_unknown);
    auto& atoms = search.atoms();
    std::vector<bool> seen_t(atoms.size(), false), seen_f(atoms.size(), false);
    bool any = false;
    auto record = [&](const Structure& m) {
        any = true;
        for (std::size_t k = 0; k < atoms.size(); ++k)
            (m.get(atoms[k].first, atoms[k].second) == TV::T ? seen_t : seen_f)[k] = true;
        return false;
    };
    std::vector<TV> fixed(atoms.size(), TV::U);
    search.run(fixed, record);
    if (!any) return Structure::top(s.domain_ptr(), s.signature_ptr());
    // look for a witness of each value not seen yet
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        for (TV v : {TV::T, TV::F}) {
            if ((v == TV::T ? seen_t : seen_f)[k]) continue;
            fixed[k] = v;
            search.run(fixed, record);
            fixed[k] = TV::U;
        }
    }
    Structure out = s;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (seen_t[k] && !seen_f[k]) out.set(atoms[k].first, atoms[k].second, TV::T);
        if (seen_f[k] && !seen_t[k]) out.set(atoms[k].first, atoms[k].second, TV::F);
    }
    return out;
}

} // namespace

bool is_model(const Theory& t, const Vocabulary& v, const Structure& m) {
    if (!m.two_valued()) return false;
    auto pr = prepare(t, v, m);
    if (!pr.start.two_valued()) {
        // function graphs are not part of m; look for them
        OracleOptions o;
        Search s(pr.theory, pr.start, true, o.max_unknown);
        bool found = false;
        s.run(std::vector<TV>(s.atoms().size(), TV::U), [&](const Structure&) {
            found = true;
            return false;
        });
        return found;
    }
    Search s(pr.theory, pr.start, true, 0);
    bool found = false;
    s.run({}, [&](const Structure&) {
        found = true;
        return false;
    });
    return found;
}

std::vector<Structure> enumerate_models(const Theory& t, const Vocabulary& v, const Structure& i,
                                        const OracleOptions& o) {
    std::vector<Structure> out;
    if (!i.three_valued()) return out;
    auto pr = prepare(t, v, i);
    Search s(pr.theory, pr.start, false, o.max_unknown);
    std::vector<Structure> found;
    s.run(std::vector<TV>(s.atoms().size(), TV::U), [&](const Structure& m) {
        Structure r = m.restrict(i.signature_ptr());
        if (found.empty() || found.back() != r) found.push_back(std::move(r));
        if (found.size() > o.cap) throw OracleLimit("model cap exceeded");
        return true;
    });
    // several function graphs can give the same restriction
    for (auto& m : found)
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
    return out;
}

Structure complete_propagate(const Theory& t, const Vocabulary& v, const Structure& i, const OracleOptions& o) {
    auto pr = prepare(t, v, i);
    Structure r = complete_on(pr.theory, pr.start, o);
    return r.restrict(i.signature_ptr());
}

Structure sentence_limit(const Theory& t, const Vocabulary& v, const Structure& i, const OracleOptions& o) {
    auto pr = prepare(t, v, i);
    Structure cur = pr.start;
    if (!cur.three_valued()) return Structure::top(i.domain_ptr(), i.signature_ptr());
    while (true) {
        Structure before = cur;
        for (auto& e : pr.theory.elements) {
            Theory single;
            single.elements.push_back(e);
            cur = complete_on(single, cur, o);
            if (!cur.three_valued()) return Structure::top(i.domain_ptr(), i.signature_ptr());
        }
        if (cur == before) break;
    }
    return cur.restrict(i.signature_ptr());
}

} // namespace infprop
