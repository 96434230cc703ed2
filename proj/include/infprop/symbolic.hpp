#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "infprop/io.hpp"
#include "infprop/logic.hpp"
#include "infprop/normalize.hpp"
#include "infprop/structure.hpp"

namespace infprop {

// A query over the source vocabulary per target symbol. Four-valued structures key
// their queries by tf name (P_ct, P_cf); a plain name P means a two-valued symbol
// whose cf side is the complement.
struct SymbolicStructure {
    std::vector<Symbol> target;
    Vocabulary source;
    std::map<std::string, QueryDef> queries;
    std::set<std::string> frozen; // queries that hit the size cap

    const QueryDef& query(const std::string& name) const;
    std::size_t size() const; // total query node count
};

struct SymbolicBudget {
    std::optional<std::size_t> rounds; // default: number of sentences
    std::size_t max_query_size = 20000;
};

SymbolicStructure initial_symbolic(const Vocabulary& v, const std::map<std::string, InputMode>& modes);
// Input modes from a problem's input block; unlisted predicates carry no information.
SymbolicStructure initial_symbolic(const Problem& p);

Structure apply_to_structure(const SymbolicStructure& phi, const Structure& e);
// Replace every atom by its query (capture-avoiding).
FormulaPtr unfold(const SymbolicStructure& phi, const FormulaPtr& f);
// (Φ(ct f), Φ(cf f))
std::pair<FormulaPtr, FormulaPtr> apply_to_formula(const SymbolicStructure& phi, const FormulaPtr& f);

SymbolicStructure symbolic_inf_step(const SymbolicStructure& phi, const InfSentence& s);
SymbolicStructure symbolic_propagate(const std::vector<InfSentence>& v, const SymbolicStructure& phi0,
                                     const SymbolicBudget& b = {});

FormulaPtr simplify_formula(const FormulaPtr& f);
QueryDef simplify_query(const QueryDef& q);

QueryDef rewrite_certain(const SymbolicStructure& phi, const QueryDef& q);
QueryDef rewrite_possible(const SymbolicStructure& phi, const QueryDef& q);

// Rows of { x̄ | φ } in e, sorted by element names.
std::vector<Tuple> answers(const QueryDef& q, const Structure& e);

// "P_ct = { x y : body }." lines in target order.
std::string print_symbolic(const SymbolicStructure& phi);

} // namespace infprop
