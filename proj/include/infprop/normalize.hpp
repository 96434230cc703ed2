#pragma once

#include <map>
#include <string>
#include <vector>

#include "infprop/logic.hpp"

namespace infprop {

// ∀x̄ (head ↔ body). body is a conjunction or disjunction of literals (a single
// literal counts as a conjunction), ∀ȳ L, ∃ȳ L, or an aggregate atom whose
// condition is a literal. The head may be true or false for sentence-level constraints.
struct EnfSentence {
    std::vector<std::string> vars;
    FormulaPtr head;
    FormulaPtr body;

    FormulaPtr to_formula() const;
};

// ∀x̄ (guard → head). head is a non-builtin atom, its negation, true, or false
// (false means: the guard holding anywhere is a contradiction).
struct InfSentence {
    std::vector<std::string> vars;
    FormulaPtr guard;
    FormulaPtr head;

    FormulaPtr to_formula() const;
    bool head_is_false() const { return head->op == Op::False; }
    bool head_is_true() const { return head->op == Op::True; }
};

bool is_enf(const EnfSentence& e);

struct AuxInfo {
    std::string name;
    std::vector<std::string> vars;
    FormulaPtr origin;  // the subformula it names
    int source = -1;    // index of the input sentence it came from
};

struct NormalizationResult {
    std::vector<EnfSentence> sentences;
    std::vector<int> source; // per output sentence: index of the input sentence
    std::vector<AuxInfo> aux;
    Vocabulary vocabulary;   // input vocabulary plus auxiliaries
};

struct NormalizeOptions {
    // Emit ∀x̄(L1 ∨ … ∨ Ln) directly as n INF sentences instead of naming it.
    bool clause_shortcut = false;
};

struct FunctionElimination {
    Theory theory;
    Vocabulary vocabulary;
    std::map<std::string, std::string> graph; // F -> P_F
};

FunctionElimination eliminate_functions(const Theory& t, const Vocabulary& v);
FormulaPtr push_negations(const FormulaPtr& f);

// Sentences of t (definitions are skipped). Vocabulary v is used to keep names fresh.
NormalizationResult to_enf(const std::vector<FormulaPtr>& sentences, const Vocabulary& v);
NormalizationResult to_enf(const Theory& t, const Vocabulary& v);

std::vector<InfSentence> enf_to_inf(const EnfSentence& e);

struct InfResult {
    std::vector<InfSentence> infs;
    std::vector<int> source; // per INF: index of the input sentence
    NormalizationResult normalization;
};

InfResult theory_to_inf(const Theory& t, const Vocabulary& v, const NormalizeOptions& opt = {});
InfResult sentences_to_inf(const std::vector<FormulaPtr>& sentences, const Vocabulary& v,
                           const NormalizeOptions& opt = {});

// ∀x̄(guard → head) built from a quantifier prefix: prefix variables absent from the
// head are existentially quantified inside the guard (after pulling out conjuncts
// that do not mention them). Builtin heads become false-headed sentences.
InfSentence make_inf(const std::vector<std::string>& prefix, const FormulaPtr& guard, const FormulaPtr& head);

std::vector<InfSentence> simplify_inf(const std::vector<InfSentence>& v);
// Constant folding of true/false; used to spot dead guards.
FormulaPtr fold_constants(const FormulaPtr& f);

std::string to_string(const EnfSentence& e);
std::string to_string(const InfSentence& s);

} // namespace infprop
