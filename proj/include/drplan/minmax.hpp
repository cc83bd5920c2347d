#pragma once

#include <span>
#include <vector>

#include "drplan/evaluators.hpp"
#include "drplan/planning.hpp"

namespace drplan {

enum class MasterStrategy {
    exact_search,  // depth-first search of the integer plan lattice (reference, default)
    mip,           // explicit mixed-integer encoding with one t-constraint per evaluator
};

struct MinMaxOptions {
    MasterStrategy strategy = MasterStrategy::exact_search;
    /// The MIP encoding refuses to assemble more rows than this.
    int max_mip_rows = 50'000;
    long long node_budget = 50'000;
};

struct MasterSolution {
    PullForwardPlan plan;
    double objective = 0.0;   // worst-case expected cost over the evaluators
    int active_index = -1;    // argmax evaluator (smallest index on ties)
    long long evaluator_calls = 0;
    long long nodes_explored = 0;
};

/// Minimises max_d f_d(y) over plans satisfying the pull bounds. Ties between
/// plans break to the lexicographically smallest amount vector in the
/// (to_day, from_day) component order. Deterministic and single-threaded.
MasterSolution solve_min_max(const Instance& instance, const PairSets& pairs,
                             std::span<const CostEvaluator* const> evaluators,
                             const MinMaxOptions& options = {});

}  // namespace drplan
