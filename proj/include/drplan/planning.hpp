#pragma once

#include <span>
#include <string>
#include <vector>

namespace drplan {

/// A tactical planning problem: per-day capacity, known workstacks, rollover
/// costs and the maximum possible intake per day. Days are indexed 0..L-1.
struct Instance {
    int horizon = 0;  // L, number of days
    int window = 0;   // K, max days a job may be completed early
    std::vector<int> capacity;        // c, jobs/day
    std::vector<int> workstack;       // D, jobs due per day
    std::vector<double> rollover_cost;  // a, cost per rolled-over job
    std::vector<int> intake_max;      // i^max, upper bound on intake per day

    /// Spare capacity max(c - D, 0) on a day.
    int spare(int day) const {
        int s = capacity[day] - workstack[day];
        return s > 0 ? s : 0;
    }

    /// Throws std::invalid_argument if dimensions or ranges are inconsistent.
    void validate() const;
};

/// A (from_day, to_day) pair: jobs due on `from_day` completed early on
/// `to_day`, with to_day in [from_day - K, from_day - 1].
struct DayPair {
    int from_day = 0;  // day the jobs are due (>= 1)
    int to_day = 0;    // earlier day they are completed on

    friend bool operator==(const DayPair&, const DayPair&) = default;
};

/// Canonical pair order: by to_day, then from_day. This is also the component
/// order used for lexicographic plan comparisons.
inline bool pair_less(const DayPair& a, const DayPair& b) {
    if (a.to_day != b.to_day) return a.to_day < b.to_day;
    return a.from_day < b.from_day;
}

/// All structurally possible pairs F and the subset F+ where a positive pull
/// is feasible (spare capacity on to_day, nonempty workstack on from_day).
struct PairSets {
    std::vector<DayPair> all;       // F, sorted by pair_less
    std::vector<DayPair> feasible;  // F+ subset, same order

    int index_of(int from_day, int to_day) const;  // -1 if not in F
};

PairSets feasible_pairs(const Instance& instance);

/// A pull-forward decision: one amount per pair of F, aligned with
/// PairSets::all.
struct PullForwardPlan {
    std::vector<int> amount;

    long long total() const {
        long long t = 0;
        for (int a : amount) t += a;
        return t;
    }
};

/// Sparse plan entry used at IO boundaries (days 0-based here; file formats
/// use 1-based days).
struct PullEntry {
    int from_day = 0;
    int to_day = 0;
    int amount = 0;
};

/// Builds a dense plan from sparse entries. Throws std::invalid_argument when
/// an entry names a pair outside F (a structural error, as opposed to a
/// constraint violation reported by validate_plan).
PullForwardPlan plan_from_entries(const PairSets& pairs, std::span<const PullEntry> entries);

std::vector<PullEntry> plan_to_entries(const PairSets& pairs, const PullForwardPlan& plan);

/// Per-day pull totals: pulled_in[t] = jobs moved onto day t, pulled_out[t] =
/// jobs due on day t completed earlier. Rollover depends on a plan only
/// through these.
struct DayAggregates {
    std::vector<int> pulled_in;
    std::vector<int> pulled_out;
};

DayAggregates plan_aggregates(const Instance& instance, const PairSets& pairs,
                              const PullForwardPlan& plan);

struct PlanViolation {
    enum class Kind { workstack_bound, spare_bound };
    Kind kind;
    int day;         // 0-based day the constraint belongs to
    long long lhs;   // attempted total
    long long bound;

    std::string describe() const;
};

struct PlanValidation {
    std::vector<PlanViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks the pull bounds: per from_day the total may not exceed the
/// workstack, per to_day it may not exceed spare capacity.
PlanValidation validate_plan(const Instance& instance, const PairSets& pairs,
                             const PullForwardPlan& plan);

struct RolloverTrajectory {
    std::vector<double> rollover;  // R, per day
    double total_cost = 0.0;       // sum a_t * R_t
};

/// Minimal rollover for a fixed intake realisation, by the recursion
/// R_t = max(0, R_{t-1} + i_t + pulled_in_t - (c_t - D_t + pulled_out_t)).
/// Throws std::invalid_argument when intake lies outside [0, i^max].
RolloverTrajectory rollover_trajectory(const Instance& instance, const PairSets& pairs,
                                       const PullForwardPlan& plan, std::span<const int> intake);

RolloverTrajectory rollover_trajectory(const Instance& instance, const DayAggregates& agg,
                                       std::span<const int> intake);

/// Cost-only variant used in hot loops; no intake range check.
double rollover_cost_unchecked(const Instance& instance, const DayAggregates& agg,
                               std::span<const int> intake);

}  // namespace drplan
