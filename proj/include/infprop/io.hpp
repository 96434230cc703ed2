#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "infprop/logic.hpp"
#include "infprop/structure.hpp"

namespace infprop {

enum class InputMode { TwoValued, CtOnly, NoInfo };

struct Problem {
    Vocabulary vocabulary;
    Theory theory;
    Structure structure; // over the vocabulary's predicates
    std::vector<std::pair<std::string, InputMode>> inputs;

    const Domain& domain() const { return structure.domain(); }
};

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(const std::string& msg, int l, int c);
};

Problem parse_problem(std::string_view text);
std::string print_problem(const Problem& p);
bool equal(const Problem& a, const Problem& b);

// Free identifiers that are not symbols parse as variables.
FormulaPtr parse_formula(std::string_view text, const Vocabulary& v);
// "{ x y : phi }"
QueryDef parse_query(std::string_view text, const Vocabulary& v);

// "structure { ... }" block; tuples sorted by element names.
std::string print_structure(const Structure& s, const std::string& indent = "  ");
// Element-name tuples whose ct (or cf) bit is set, in lexicographic order.
std::vector<std::vector<std::string>> sorted_tuples(const Structure& s, int pred, bool ct_side);

nlohmann::json structure_to_json(const Structure& s);
Structure structure_from_json(const nlohmann::json& j, SignaturePtr sig);

} // namespace infprop
