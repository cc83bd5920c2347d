#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drplan/intake.hpp"
#include "drplan/planning.hpp"

namespace drplan {

/// Exact law of the rollover R_t for each day, under independent binomial
/// intakes: day_pmf[t][r] = P(R_t = r), with support 0..UB_t from the
/// deterministic recursion at i = i_max.
struct RolloverDistribution {
    std::vector<std::vector<double>> day_pmf;
};

struct CostProfile {
    double total = 0.0;
    std::vector<double> expected_rollover;  // E[R_t] per day
};

/// Expected rollover cost by full enumeration of the intake space with
/// pairwise summation. The oracle path; refuses spaces larger than
/// `enumeration_cap`.
double expected_cost_enumeration(const Instance& instance, const DayAggregates& agg,
                                 std::span<const double> p, const IntakeSpace& space,
                                 std::int64_t enumeration_cap = 1'000'000);

/// Expected rollover cost by day-by-day convolution of the rollover law with
/// the binomial intake law (the Lindley structure makes this exact).
/// Algebraically equal to enumeration; O(L * maxUB * max i_max).
CostProfile expected_cost_convolution(const Instance& instance, const DayAggregates& agg,
                                      std::span<const double> p);

/// Same propagation with the per-day binomial tables supplied by the caller
/// (used by evaluators that share cached tables).
double convolved_cost(const Instance& instance, const DayAggregates& agg,
                      std::span<const std::vector<double>> day_tables,
                      std::vector<double>& buf_a, std::vector<double>& buf_b,
                      std::vector<double>* expected_out = nullptr);

RolloverDistribution rollover_distribution(const Instance& instance, const DayAggregates& agg,
                                           std::span<const double> p);

/// Truncated expectation over the retained intakes only; probabilities are
/// deliberately not renormalised.
double expected_cost_reduced(const Instance& instance, const DayAggregates& agg,
                             std::span<const double> p, const IntakeSpace& space,
                             const ReducedIntakeSet& reduced);

/// Number of times convolution renormalised a day distribution because the
/// accumulated drift exceeded 1e-12.
long long convolution_renormalisations();

/// Numerically careful sum of f(i) for i in [0, n) by pairwise reduction.
double pairwise_sum(std::int64_t n, const std::function<double(std::int64_t)>& term);

}  // namespace drplan
