#pragma once

#include <string>
#include <vector>

#include "infprop/logic.hpp"
#include "infprop/normalize.hpp"
#include "infprop/structure.hpp"

namespace infprop {

// ∀x̄ (H(x̄) ⇐ body) over the tf-vocabulary. A constraint rule has no head: when its
// body holds the rule set has no model, and the least model is the all-true structure.
struct PositiveRule {
    std::vector<std::string> vars;
    std::string head; // tf predicate name; empty for a constraint
    std::vector<TermPtr> head_args;
    FormulaPtr body;

    bool constraint() const { return head.empty(); }
};

struct RuleSet {
    std::vector<PositiveRule> rules;
};

// One rule per sentence: ct(L) ⇐ ct(ψ). Throws EvalError on aggregate guards.
RuleSet emit_rule_set(const std::vector<InfSentence>& v);
bool negation_free(const FormulaPtr& f);

// Two-valued structures over a tf signature (ct/cf predicates); only t/f are read.
Structure immediate_consequence(const RuleSet& r, const Structure& m);
// Semi-naive: after the first round only rule instances reading a fresh tuple are re-evaluated.
Structure least_model(const RuleSet& r, const Structure& seed);
Structure least_model_naive(const RuleSet& r, const Structure& seed);

// Datalog-like text, one rule per line: P_ct(X) :- Q_ct(X), R_cf(X,Y).
std::string to_datalog(const PositiveRule& r);
std::string to_datalog(const RuleSet& r);

} // namespace infprop
