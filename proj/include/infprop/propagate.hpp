#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infprop/logic.hpp"
#include "infprop/normalize.hpp"
#include "infprop/structure.hpp"

namespace infprop {

enum class DefinitionMode { WellFounded, Completion, Both };

struct PropagateConfig {
    std::optional<std::size_t> budget; // max propagator applications
    DefinitionMode definitions = DefinitionMode::Both;
    bool restrict_output = true;
    // Jump to the inconsistent structure as soon as some atom becomes i.
    bool short_circuit = true;
    bool clause_shortcut = true;
    bool simplify = true;
    std::optional<std::uint64_t> schedule_seed; // random fair order instead of FIFO
};

struct Change {
    int pred = -1;
    std::size_t index = 0;
    TV value = TV::U; // value after the step
};

struct TraceStep {
    int propagator = -1;
    std::vector<Change> changes;
};

struct RefinementTrace {
    std::vector<TraceStep> steps;
    std::vector<std::string> propagators; // id per propagator: inf:k, def:k
    bool stabilized = true;
    bool inconsistent = false;
    std::size_t applications = 0;
    std::size_t change_count() const;
};

// Apply one INF propagator; the structure's signature must cover the sentence.
Structure apply_inf(const InfSentence& s, const Structure& i);
Structure apply_inconsistency(const Structure& i);

// Well-founded model of d given the open symbols in i; defined atoms start at u.
// Throws std::invalid_argument on strictly four-valued input.
Structure wfm(const Definition& d, const Structure& i);
Structure apply_definition(const Definition& d, const Structure& i);
std::vector<FormulaPtr> completion(const Definition& d);

// Stabilizing (or budgeted) refinement over INF and definition propagators.
// The structure is modified in place; returns the trace.
RefinementTrace refine(Structure& s, const std::vector<InfSentence>& infs, const std::vector<Definition>& defs,
                       const PropagateConfig& cfg = {});

struct PropagationPlan {
    Vocabulary vocabulary; // input plus graph predicates and auxiliaries
    SignaturePtr signature;
    std::vector<InfSentence> infs;
    std::vector<Definition> definitions;
    InfResult normalization;
};

PropagationPlan plan_propagation(const Theory& t, const Vocabulary& v, const PropagateConfig& cfg = {});

struct PropagateResult {
    Structure structure; // after iprop, restricted if configured
    Structure working;   // full working vocabulary, before iprop
    RefinementTrace trace;
    PropagationPlan plan;

    std::string describe(int propagator) const;
};

PropagateResult propagate(const Theory& t, const Vocabulary& v, const Structure& i, const PropagateConfig& cfg = {});

std::string to_string(const Change& c, const Structure& s);

} // namespace infprop
