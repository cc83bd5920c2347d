#pragma once

#include <span>
#include <vector>

#include "drplan/evaluators.hpp"
#include "drplan/parallel.hpp"
#include "drplan/planning.hpp"

namespace drplan {

/// Result of pricing one plan against every candidate distribution.
struct SweepResult {
    int index = -1;     // argmax candidate; smallest index on exact ties
    double cost = 0.0;  // the maximum expected cost
    long long evaluator_calls = 0;
};

/// Serial reference implementation of the candidate sweep.
SweepResult worst_case_sweep_serial(const Instance& instance, const DayAggregates& agg,
                                    std::span<const CostEvaluator* const> candidates);

/// OpenMP variant; identical result (per-thread maxima merged with the same
/// smallest-index tie rule, and each evaluation is bitwise identical no
/// matter which thread runs it).
SweepResult worst_case_sweep_parallel(const Instance& instance, const DayAggregates& agg,
                                      std::span<const CostEvaluator* const> candidates);

SweepResult worst_case_sweep(const Instance& instance, const DayAggregates& agg,
                             std::span<const CostEvaluator* const> candidates, ExecPolicy policy);

/// All candidate costs for one plan (used by report aggregation).
std::vector<double> cost_sweep(const Instance& instance, const DayAggregates& agg,
                               std::span<const CostEvaluator* const> candidates,
                               ExecPolicy policy);

}  // namespace drplan
