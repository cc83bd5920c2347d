#include "drplan/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drplan {

SweepResult worst_case_sweep_serial(const Instance& instance, const DayAggregates& agg,
                                    std::span<const CostEvaluator* const> candidates) {
    SweepResult res;
    EvalWorkspace ws;
    ws.begin_plan();
    for (size_t k = 0; k < candidates.size(); ++k) {
        const double v = candidates[k]->expected_cost(instance, agg, ws);
        ++res.evaluator_calls;
        if (res.index < 0 || v > res.cost) {
            res.cost = v;
            res.index = static_cast<int>(k);
        }
    }
    return res;
}

SweepResult worst_case_sweep_parallel(const Instance& instance, const DayAggregates& agg,
                                      std::span<const CostEvaluator* const> candidates) {
#ifndef _OPENMP
    return worst_case_sweep_serial(instance, agg, candidates);
#else
    const int n = static_cast<int>(candidates.size());
    SweepResult res;
    res.evaluator_calls = n;
#pragma omp parallel
    {
        EvalWorkspace ws;
        ws.begin_plan();
        int local_index = -1;
        double local_cost = 0.0;
#pragma omp for schedule(static)
        for (int k = 0; k < n; ++k) {
            const double v = candidates[k]->expected_cost(instance, agg, ws);
            if (local_index < 0 || v > local_cost) {
                local_cost = v;
                local_index = k;
            }
        }
#pragma omp critical
        {
            // merge keeps the smallest index among exact-cost ties
            if (local_index >= 0 &&
                (res.index < 0 || local_cost > res.cost ||
                 (local_cost == res.cost && local_index < res.index))) {
                res.cost = local_cost;
                res.index = local_index;
            }
        }
    }
    return res;
#endif
}

SweepResult worst_case_sweep(const Instance& instance, const DayAggregates& agg,
                             std::span<const CostEvaluator* const> candidates,
                             ExecPolicy policy) {
    return policy == ExecPolicy::parallel ? worst_case_sweep_parallel(instance, agg, candidates)
                                          : worst_case_sweep_serial(instance, agg, candidates);
}

std::vector<double> cost_sweep(const Instance& instance, const DayAggregates& agg,
                               std::span<const CostEvaluator* const> candidates,
                               ExecPolicy policy) {
    const int n = static_cast<int>(candidates.size());
    std::vector<double> costs(n);
    if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel
        {
            EvalWorkspace ws;
            ws.begin_plan();
#pragma omp for schedule(static)
            for (int k = 0; k < n; ++k)
                costs[k] = candidates[k]->expected_cost(instance, agg, ws);
        }
        return costs;
#endif
    }
    EvalWorkspace ws;
    ws.begin_plan();
    for (int k = 0; k < n; ++k) costs[k] = candidates[k]->expected_cost(instance, agg, ws);
    return costs;
}

}  // namespace drplan
