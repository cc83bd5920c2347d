#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drplan/evaluators.hpp"
#include "drplan/intake.hpp"
#include "drplan/minmax.hpp"
#include "drplan/planning.hpp"

namespace drplan {

struct SolveCounters {
    long long evaluator_calls = 0;
    long long pmf_table_sets = 0;
};

struct IterationRecord {
    int iteration = 0;
    std::vector<std::vector<double>> pool;  // ambiguity subset the master saw
    std::vector<int> plan_amount;           // y^k
    double master_value = 0.0;              // t^k
    std::vector<double> separated;          // p^k
    double separated_cost = 0.0;            // C_{p^k}
    double lower_bound = 0.0;               // Benders only
    double upper_bound = 0.0;               // Benders only
};

struct SolveReport {
    std::string algorithm;
    PullForwardPlan plan;
    std::vector<double> worst_p;             // parametric algorithms
    std::vector<double> worst_distribution;  // non-parametric joint weights
    std::vector<int> worst_intake;           // robust baseline
    double objective = 0.0;
    std::optional<double> truncated_objective;  // AO's own objective value
    long long reduced_set_size = 0;             // AO: |retained intakes|
    int iterations = 1;
    bool converged = true;
    bool stopped_on_repeat = false;  // cutting surface: ended on a repeated parameter
    std::vector<IterationRecord> trace;
    SolveCounters counters;
    double wall_ms = 0.0;
};

enum class ExactEngine {
    convolution,  // default expectation engine
    enumeration,  // explicit joint weights over the intake space (oracle route)
};

/// Exact parametric solve: one worst-case constraint per member of theta.
SolveReport solve_exact_P(const Instance& instance, const ParametricAmbiguitySet& theta,
                          const MinMaxOptions& master = {},
                          ExecPolicy policy = ExecPolicy::serial,
                          ExactEngine engine = ExactEngine::convolution);

/// Worst-case member of `candidates` for a fixed plan: exhaustive evaluation,
/// ties to the lexicographically smallest member. Returns (member index, cost).
std::pair<int, double> distribution_separation(const Instance& instance,
                                               const PullForwardPlan& plan,
                                               const ParametricAmbiguitySet& candidates,
                                               PmfTableCache& cache, SolveCounters& counters,
                                               ExecPolicy policy = ExecPolicy::serial);

enum class SeparationScope {
    full,     // separate over all of theta (the optimal variant)
    extreme,  // separate over the extreme subset only (the fast heuristic)
};

struct CutSurfaceOptions {
    double epsilon = 0.01;
    int k_max = 10;
    MinMaxOptions master;
    /// Initial singleton pool; defaults to the set's p_hat.
    std::vector<double> p_init;
};

/// The cutting-surface loop: master over a growing pool, separation over
/// either theta or its extreme subset, stopping on epsilon-closeness or on a
/// repeated parameter.
SolveReport solve_cutting_surface(const Instance& instance, const ParametricAmbiguitySet& theta,
                                  SeparationScope scope, const CutSurfaceOptions& options = {},
                                  ExecPolicy policy = ExecPolicy::serial);

struct AoOptions {
    double beta = 1e-3;
    MinMaxOptions master;
};

/// Approximate-objective solve: full theta, truncated expectations over the
/// reduced intake set. The reported objective is the exact re-evaluation at
/// the chosen plan and parameter; the truncated value is kept alongside.
SolveReport solve_AO(const Instance& instance, const ParametricAmbiguitySet& theta,
                     const AoOptions& options = {}, ExecPolicy policy = ExecPolicy::serial);

/// Robust baseline: the worst case over the intake box is always i_max, so
/// this is the deterministic model evaluated at i = i_max.
SolveReport solve_RO(const Instance& instance, const MinMaxOptions& master = {});

struct GapMetrics {
    double worst_case_cost = 0.0;  // max over theta of f(y^x, p)
    double p_gap = 0.0;
    double y_gap = 0.0;
    double p_apg = 0.0;  // as absolute percentage of worst_case_cost
    double y_apg = 0.0;  // as absolute percentage of z_star
};

/// Brute-force quality metrics of a report against the exact optimum z_star.
GapMetrics brute_force_metrics(const Instance& instance, const ParametricAmbiguitySet& theta,
                               const SolveReport& report, double z_star,
                               ExecPolicy policy = ExecPolicy::serial);

struct BendersOptions {
    double epsilon = 1e-8;
    int max_iterations = 1000;
    MinMaxOptions master;
};

/// Classical Benders decomposition: master over (z, y), subproblem the dual
/// of the residual problem in (R, t). The dual optimum is assembled from the
/// binding worst-case member and per-scenario chain duals; lp_solve verifies
/// this construction in the test suite on small instances.
SolveReport solve_benders(const Instance& instance, const ParametricAmbiguitySet& theta,
                          const BendersOptions& options = {},
                          ExecPolicy policy = ExecPolicy::serial);

/// Subproblem dual pieces, exposed for the lp_solve cross-check.
struct BendersCut {
    double constant = 0.0;
    std::vector<double> coef;  // per pair, aligned with PairSets::all
    double value_at(const PullForwardPlan& plan) const;
};
BendersCut benders_optimality_cut(const Instance& instance, const PairSets& pairs,
                                  const IntakeSpace& space, std::span<const double> joint_weights,
                                  const DayAggregates& agg);

}  // namespace drplan
