#include "drplan/planning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drplan {

void Instance::validate() const {
    if (horizon < 2) throw std::invalid_argument("instance: horizon must be >= 2");
    if (window < 1) throw std::invalid_argument("instance: window must be >= 1");
    if (window > horizon - 1)
        throw std::invalid_argument("instance: window must be <= horizon - 1");
    auto check_len = [&](size_t n, const char* what) {
        if (n != static_cast<size_t>(horizon))
            throw std::invalid_argument(std::string("instance: ") + what +
                                        " must have one entry per day");
    };
    check_len(capacity.size(), "capacity");
    check_len(workstack.size(), "workstack");
    check_len(rollover_cost.size(), "rollover_cost");
    check_len(intake_max.size(), "intake_max");
    for (int d = 0; d < horizon; ++d) {
        if (capacity[d] < 0 || workstack[d] < 0 || intake_max[d] < 0)
            throw std::invalid_argument("instance: negative entry");
        if (!(rollover_cost[d] >= 0.0) || !std::isfinite(rollover_cost[d]))
            throw std::invalid_argument("instance: rollover_cost must be finite and >= 0");
    }
}

int PairSets::index_of(int from_day, int to_day) const {
    for (size_t k = 0; k < all.size(); ++k)
        if (all[k].from_day == from_day && all[k].to_day == to_day) return static_cast<int>(k);
    return -1;
}

PairSets feasible_pairs(const Instance& instance) {
    instance.validate();
    PairSets sets;
    for (int from = 1; from < instance.horizon; ++from) {
        int lo = std::max(from - instance.window, 0);
        for (int to = lo; to < from; ++to) sets.all.push_back({from, to});
    }
    std::sort(sets.all.begin(), sets.all.end(), pair_less);
    for (const DayPair& p : sets.all) {
        if (instance.capacity[p.to_day] > instance.workstack[p.to_day] &&
            instance.workstack[p.from_day] > 0)
            sets.feasible.push_back(p);
    }
    return sets;
}

PullForwardPlan plan_from_entries(const PairSets& pairs, std::span<const PullEntry> entries) {
    PullForwardPlan plan;
    plan.amount.assign(pairs.all.size(), 0);
    for (const PullEntry& e : entries) {
        int k = pairs.index_of(e.from_day, e.to_day);
        if (k < 0)
            throw std::invalid_argument("plan entry (" + std::to_string(e.from_day + 1) + "," +
                                        std::to_string(e.to_day + 1) +
                                        ") is outside the pair set F");
        if (e.amount < 0) throw std::invalid_argument("plan entry amount must be >= 0");
        plan.amount[k] += e.amount;
    }
    return plan;
}

std::vector<PullEntry> plan_to_entries(const PairSets& pairs, const PullForwardPlan& plan) {
    std::vector<PullEntry> out;
    for (size_t k = 0; k < pairs.all.size(); ++k)
        if (plan.amount[k] != 0)
            out.push_back({pairs.all[k].from_day, pairs.all[k].to_day, plan.amount[k]});
    return out;
}

DayAggregates plan_aggregates(const Instance& instance, const PairSets& pairs,
                              const PullForwardPlan& plan) {
    if (plan.amount.size() != pairs.all.size())
        throw std::invalid_argument("plan size does not match pair set");
    DayAggregates agg;
    agg.pulled_in.assign(instance.horizon, 0);
    agg.pulled_out.assign(instance.horizon, 0);
    for (size_t k = 0; k < pairs.all.size(); ++k) {
        agg.pulled_in[pairs.all[k].to_day] += plan.amount[k];
        agg.pulled_out[pairs.all[k].from_day] += plan.amount[k];
    }
    return agg;
}

std::string PlanViolation::describe() const {
    const char* fam = kind == Kind::workstack_bound ? "workstack bound" : "spare-capacity bound";
    return std::string(fam) + " on day " + std::to_string(day + 1) + ": " + std::to_string(lhs) +
           " > " + std::to_string(bound);
}

PlanValidation validate_plan(const Instance& instance, const PairSets& pairs,
                             const PullForwardPlan& plan) {
    DayAggregates agg = plan_aggregates(instance, pairs, plan);
    PlanValidation res;
    for (int d = 1; d < instance.horizon; ++d) {
        if (agg.pulled_out[d] > instance.workstack[d])
            res.violations.push_back({PlanViolation::Kind::workstack_bound, d, agg.pulled_out[d],
                                      instance.workstack[d]});
    }
    for (int d = 0; d + 1 < instance.horizon; ++d) {
        if (agg.pulled_in[d] > instance.spare(d))
            res.violations.push_back(
                {PlanViolation::Kind::spare_bound, d, agg.pulled_in[d], instance.spare(d)});
    }
    return res;
}

RolloverTrajectory rollover_trajectory(const Instance& instance, const DayAggregates& agg,
                                       std::span<const int> intake) {
    if (intake.size() != static_cast<size_t>(instance.horizon))
        throw std::invalid_argument("intake vector length mismatch");
    for (int d = 0; d < instance.horizon; ++d)
        if (intake[d] < 0 || intake[d] > instance.intake_max[d])
            throw std::invalid_argument("intake outside [0, i_max] on day " +
                                        std::to_string(d + 1));
    RolloverTrajectory traj;
    traj.rollover.resize(instance.horizon);
    double prev = 0.0;
    for (int d = 0; d < instance.horizon; ++d) {
        double load = prev + intake[d] + agg.pulled_in[d];
        double room = instance.capacity[d] - instance.workstack[d] + agg.pulled_out[d];
        prev = std::max(0.0, load - room);
        traj.rollover[d] = prev;
        traj.total_cost += instance.rollover_cost[d] * prev;
    }
    return traj;
}

RolloverTrajectory rollover_trajectory(const Instance& instance, const PairSets& pairs,
                                       const PullForwardPlan& plan, std::span<const int> intake) {
    return rollover_trajectory(instance, plan_aggregates(instance, pairs, plan), intake);
}

double rollover_cost_unchecked(const Instance& instance, const DayAggregates& agg,
                               std::span<const int> intake) {
    double prev = 0.0;
    double cost = 0.0;
    for (int d = 0; d < instance.horizon; ++d) {
        double load = prev + intake[d] + agg.pulled_in[d];
        double room = instance.capacity[d] - instance.workstack[d] + agg.pulled_out[d];
        prev = load > room ? load - room : 0.0;
        cost += instance.rollover_cost[d] * prev;
    }
    return cost;
}

}  // namespace drplan
