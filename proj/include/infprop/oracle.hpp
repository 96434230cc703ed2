#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "infprop/logic.hpp"
#include "infprop/structure.hpp"

namespace infprop {

// Raised when the search space is beyond desk scale.
struct OracleLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleOptions {
    std::size_t max_unknown = 30;
    std::size_t cap = 1u << 20; // enumerate_models only
};

// Is the two-valued m a model of t? Definitions hold when m equals their well-founded model.
bool is_model(const Theory& t, const Vocabulary& v, const Structure& m);

// Two-valued completions of i satisfying t, in lexicographic order of the u-atoms (f before t).
std::vector<Structure> enumerate_models(const Theory& t, const Vocabulary& v, const Structure& i,
                                        const OracleOptions& o = {});

// glb of all models above i, ⊤̃ when there are none.
Structure complete_propagate(const Theory& t, const Vocabulary& v, const Structure& i, const OracleOptions& o = {});

// Limit of the per-element complete propagators (each sentence or definition on its own).
Structure sentence_limit(const Theory& t, const Vocabulary& v, const Structure& i, const OracleOptions& o = {});

} // namespace infprop
