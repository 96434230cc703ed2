#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "infprop/logic.hpp"
#include "infprop/structure.hpp"

namespace infprop {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Assignment = std::map<std::string, int>; // variable -> domain element

TV evaluate(const Structure& s, const FormulaPtr& f, const Assignment& asg = {});

// Element tuples of { x̄ | φ } annotated t/f/u (or i on four-valued input).
struct ThreeValuedSet {
    std::vector<std::pair<Tuple, TV>> elems;
};

ThreeValuedSet three_valued_set(const Structure& s, const std::vector<std::string>& vars, const FormulaPtr& cond,
                                const Assignment& asg = {});

struct Bounds {
    double min = 0, max = 0;
    bool operator==(const Bounds&) const = default;
};

// Exact min/max of fn over the two-valued sets between the certain and the certain-plus-unknown values.
Bounds bounds_of(AggFn fn, const std::vector<double>& certain, const std::vector<double>& unknown);
Bounds agg_bounds(const Structure& s, const std::vector<std::string>& vars, const FormulaPtr& cond, AggFn fn,
                  const Assignment& asg = {});
// Compare a bound against (min,max) following the three-valued aggregate clauses.
TV compare_bounds(double bound, Cmp cmp, const Bounds& b);

// (ct φ, cf φ) over the tf-vocabulary; both negation-free.
std::pair<FormulaPtr, FormulaPtr> ct_cf(const FormulaPtr& f);

// Formula compiled against one domain and signature. Variables become slots;
// free variables get slots 0..k-1 in the order given at construction.
class Compiled {
public:
    struct Arg {
        int slot = -1;
        int elem = -1;
        double num = 0;
        bool numeric = false;
    };
    struct Node {
        Op op = Op::True;
        int pred = -1;
        int builtin = -1; // 0 '=', 1 '~=', 2 '<', 3 '=<'
        std::vector<Arg> args;
        std::vector<int> kids;
        std::vector<int> qslots;
        AggFn fn = AggFn::Card;
        Cmp cmp = Cmp::Geq;
    };
    // An atom occurrence; for each argument position the free slot it reads (or -1)
    // and the constant element it requires (or -1).
    struct Occurrence {
        int pred = -1;
        std::vector<int> free_slot;
        std::vector<int> const_elem;
    };

    Compiled() = default;
    Compiled(const FormulaPtr& f, const std::vector<std::string>& free_vars, const Domain& dom, const Signature& sig);

    TV eval(const Structure& s, int* slots) const { return eval_node(root_, s, slots); }
    bool ct(const Structure& s, int* slots) const { return holds(root_, true, s, slots); }
    bool cf(const Structure& s, int* slots) const { return holds(root_, false, s, slots); }

    int slot_count() const { return nslots_; }
    int free_count() const { return nfree_; }
    const std::vector<Occurrence>& occurrences() const { return occ_; }
    std::vector<int> predicates() const;
    bool has_aggregate() const { return has_agg_; }

private:
    int build(const FormulaPtr& f, std::map<std::string, std::vector<int>>& scope, const Domain& dom,
              const Signature& sig);
    Arg build_arg(const TermPtr& t, std::map<std::string, std::vector<int>>& scope, const Domain& dom);

    TV eval_node(int n, const Structure& s, int* slots) const;
    bool holds(int n, bool want_ct, const Structure& s, int* slots) const;
    bool builtin_holds(const Node& nd, const Structure& s, const int* slots) const;
    std::size_t atom_index(const Node& nd, const Structure& s, const int* slots) const;
    TV eval_agg(const Node& nd, const Structure& s, int* slots) const;

    std::vector<Node> nodes_;
    std::vector<Occurrence> occ_;
    int root_ = -1;
    int nslots_ = 0;
    int nfree_ = 0;
    bool has_agg_ = false;
};

} // namespace infprop
