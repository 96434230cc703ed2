#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace infprop {

// ---------------------------------------------------------------- symbols

struct Symbol {
    std::string name;
    int arity = 0;
    bool operator==(const Symbol&) const = default;
};

// Builtin (interpreted) predicates. "~=" only shows up in ct/cf output.
inline constexpr const char* kEq = "=";
inline constexpr const char* kNeq = "~=";
inline constexpr const char* kLt = "<";
inline constexpr const char* kLe = "=<";

bool is_builtin(const std::string& pred);

class Vocabulary {
public:
    Vocabulary() = default;

    // Throws std::invalid_argument on a duplicate or builtin name.
    void add_predicate(const std::string& name, int arity);
    void add_function(const std::string& name, int arity);

    const std::vector<Symbol>& predicates() const { return preds_; }
    const std::vector<Symbol>& functions() const { return funcs_; }
    // The interpreted predicates, flagged separately from user symbols.
    static const std::vector<Symbol>& builtins();

    std::optional<int> predicate_arity(const std::string& name) const;
    std::optional<int> function_arity(const std::string& name) const;
    bool has_predicate(const std::string& name) const { return predicate_arity(name).has_value(); }
    bool has_function(const std::string& name) const { return function_arity(name).has_value(); }
    bool declared(const std::string& name) const;

    // A name starting with `stem` that is not declared yet.
    std::string fresh_name(const std::string& stem) const;

    bool operator==(const Vocabulary& o) const { return preds_ == o.preds_ && funcs_ == o.funcs_; }

private:
    std::vector<Symbol> preds_;
    std::vector<Symbol> funcs_;
    std::map<std::string, std::pair<bool, int>> index_; // name -> (is_function, arity)
};

// ---------------------------------------------------------------- terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Func, Num };
    Kind kind = Kind::Var;
    std::string name;   // variable, function name, or numeral text
    double value = 0.0; // Num only
    std::vector<TermPtr> args;
};

TermPtr mk_var(const std::string& name);
TermPtr mk_func(const std::string& name, std::vector<TermPtr> args);
TermPtr mk_num(double value);
TermPtr mk_num(double value, const std::string& text);

// ---------------------------------------------------------------- formulas

enum class Op { True, False, Atom, Not, And, Or, Implies, Iff, Forall, Exists, Agg };
enum class AggFn { Card, Sum, Prod, Min, Max };
// Reads "bound <cmp> agg(V)".
enum class Cmp { Geq, Leq, Gt, Lt, Eq };

const char* agg_name(AggFn fn);
const char* cmp_name(Cmp c);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    Op op = Op::True;
    std::string pred;               // Atom
    std::vector<TermPtr> args;      // Atom arguments; Agg: args[0] is the bound
    std::vector<FormulaPtr> kids;   // Not/Forall/Exists/Agg: 1, Implies/Iff: 2, And/Or: n
    std::vector<std::string> vars;  // quantified variables, or set-expression variables for Agg
    AggFn fn = AggFn::Card;
    Cmp cmp = Cmp::Geq;
};

FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_atom(const std::string& pred, std::vector<TermPtr> args = {});
FormulaPtr mk_eq(TermPtr a, TermPtr b);
FormulaPtr mk_neq(TermPtr a, TermPtr b); // ~(a = b)
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_and(std::vector<FormulaPtr> kids);
FormulaPtr mk_or(std::vector<FormulaPtr> kids);
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_forall(std::vector<std::string> vars, FormulaPtr body);
FormulaPtr mk_exists(std::vector<std::string> vars, FormulaPtr body);
FormulaPtr mk_quant(Op q, std::vector<std::string> vars, FormulaPtr body);
FormulaPtr mk_agg(TermPtr bound, Cmp cmp, AggFn fn, std::vector<std::string> vars, FormulaPtr cond);

// Literal: atom, negated atom, true or false.
bool is_atom(const FormulaPtr& f);
bool is_literal(const FormulaPtr& f);
bool is_builtin_literal(const FormulaPtr& f);
// Negation of a literal with double negation removed and true/false swapped.
FormulaPtr negate_literal(const FormulaPtr& lit);
// Atom underneath a literal (nullptr for true/false).
FormulaPtr literal_atom(const FormulaPtr& lit);

// Deep structural equality.
bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const TermPtr& a, const TermPtr& b);
// Equality up to renaming of bound variables.
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);

// Free variables in order of first occurrence.
std::vector<std::string> free_variables(const FormulaPtr& f);
std::vector<std::string> term_variables(const TermPtr& t);
std::set<std::string> free_variable_set(const FormulaPtr& f);
// Every variable name used anywhere (free or bound).
std::set<std::string> all_variables(const FormulaPtr& f);

// Capture-avoiding simultaneous substitution f[vars/terms].
FormulaPtr substitute(const FormulaPtr& f, const std::vector<std::string>& vars,
                      const std::vector<TermPtr>& terms);
TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& m);
FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, TermPtr>& m);

// A variable name based on `base` avoiding everything in `taken` (x, x', x'', ...).
std::string fresh_variable(const std::string& base, const std::set<std::string>& taken);

// Predicates (non-builtin) mentioned in f.
std::set<std::string> predicates_of(const FormulaPtr& f);
bool has_aggregate(const FormulaPtr& f);
bool has_function(const FormulaPtr& f);
std::size_t formula_size(const FormulaPtr& f);

// ---------------------------------------------------------------- theories

struct Rule {
    std::vector<std::string> vars; // x̄ of the rule's quantifier prefix
    std::string head;
    std::vector<TermPtr> head_args;
    FormulaPtr body;
};

struct Definition {
    std::vector<Rule> rules;
    std::vector<std::string> defined() const; // in order of first rule
    std::vector<std::string> open() const;    // body predicates that are not defined
};

using TheoryElement = std::variant<FormulaPtr, Definition>;

struct Theory {
    std::vector<TheoryElement> elements;

    std::vector<FormulaPtr> sentences() const;
    std::vector<Definition> definitions() const;
    bool empty() const { return elements.empty(); }
};

struct QueryDef {
    std::vector<std::string> vars;
    FormulaPtr body;
};

bool equal(const Theory& a, const Theory& b);
bool equal(const Rule& a, const Rule& b);

// ---------------------------------------------------------------- validation

struct Diagnostic {
    std::string kind; // arity, unknown-symbol, unbound-variable, rule, aggregate, definition
    std::string message;
};

std::vector<Diagnostic> validate(const Theory& t, const Vocabulary& v);
std::vector<Diagnostic> validate_formula(const FormulaPtr& f, const Vocabulary& v,
                                         const std::set<std::string>& allowed_free = {});

// ---------------------------------------------------------------- printing

std::string to_string(const TermPtr& t);
std::string to_string(const FormulaPtr& f);
std::string to_string(const Rule& r);
std::string to_string(const QueryDef& q);

} // namespace infprop
