#include "drplan/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "drplan/simplex.hpp"

namespace drplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SearchState {
    const Instance* instance;
    const PairSets* pairs;
    std::span<const CostEvaluator* const> evaluators;
    EvalWorkspace ws;
    DayAggregates agg;
    std::vector<int> amount;
    std::vector<int> work_left;   // per day, remaining workstack budget
    std::vector<int> spare_left;  // per day, remaining spare budget
    std::vector<int> eval_order;  // adaptive: last argmax first

    PullForwardPlan best_plan;
    double best_value = kInf;
    int best_active = -1;
    long long eval_calls = 0;
    long long nodes = 0;
    DayAggregates relax_agg;
    std::vector<int> extra_out;

    double evaluate(int d) {
        ++eval_calls;
        return evaluators[d]->expected_cost(*instance, agg, ws);
    }

    // Full max over evaluators with early exit against the incumbent. On a
    // strict improvement, updates the incumbent (ties keep the earlier, i.e.
    // lexicographically smaller, plan).
    void evaluate_leaf() {
        ws.begin_plan();
        double worst = -kInf;
        int active = -1;
        for (size_t pos = 0; pos < eval_order.size(); ++pos) {
            const int d = eval_order[pos];
            const double v = evaluate(d);
            if (v > worst || (v == worst && d < active)) {
                worst = v;
                active = d;
            }
            if (worst >= best_value) return;  // cannot strictly improve
        }
        best_value = worst;
        best_active = active;
        best_plan.amount = amount;
        // move the argmax to the front so later leaves fail fast
        auto it = std::find(eval_order.begin(), eval_order.end(), active);
        std::rotate(eval_order.begin(), it, it + 1);
    }

    // Admissible lower bound on every completion of the current prefix:
    // future pulls can only add capacity on their from-days (good) and load
    // on their to-days (bad), so granting every remaining pair its maximum
    // out-flow while adding no in-flow bounds the cost from below for any
    // distribution. Evaluated under the incumbent's argmax evaluator only.
    bool prune(size_t next_pair) {
        if (best_active < 0) return false;
        relax_agg.pulled_in = agg.pulled_in;
        relax_agg.pulled_out = agg.pulled_out;
        const auto& all = pairs->all;
        extra_out.assign(instance->horizon, 0);
        for (size_t k = next_pair; k < all.size(); ++k) {
            const DayPair& pr = all[k];
            extra_out[pr.from_day] += std::min(work_left[pr.from_day], spare_left[pr.to_day]);
        }
        for (int d = 0; d < instance->horizon; ++d)
            relax_agg.pulled_out[d] += std::min(extra_out[d], work_left[d]);
        ws.begin_plan();
        ++eval_calls;
        const double bound = evaluators[best_active]->expected_cost(*instance, relax_agg, ws);
        return bound >= best_value - 1e-12;
    }

    void dfs(size_t k) {
        ++nodes;
        if (k == pairs->all.size()) {
            evaluate_leaf();
            return;
        }
        if (prune(k)) return;
        const DayPair& pr = pairs->all[k];
        const int ub = std::min(work_left[pr.from_day], spare_left[pr.to_day]);
        for (int v = 0; v <= ub; ++v) {
            amount[k] = v;
            agg.pulled_in[pr.to_day] += v;
            agg.pulled_out[pr.from_day] += v;
            work_left[pr.from_day] -= v;
            spare_left[pr.to_day] -= v;
            dfs(k + 1);
            agg.pulled_in[pr.to_day] -= v;
            agg.pulled_out[pr.from_day] -= v;
            work_left[pr.from_day] += v;
            spare_left[pr.to_day] += v;
        }
        amount[k] = 0;
    }
};

MasterSolution solve_by_search(const Instance& instance, const PairSets& pairs,
                               std::span<const CostEvaluator* const> evaluators) {
    SearchState st;
    st.instance = &instance;
    st.pairs = &pairs;
    st.evaluators = evaluators;
    st.agg.pulled_in.assign(instance.horizon, 0);
    st.agg.pulled_out.assign(instance.horizon, 0);
    st.amount.assign(pairs.all.size(), 0);
    st.work_left = instance.workstack;
    st.spare_left.resize(instance.horizon);
    for (int d = 0; d < instance.horizon; ++d) st.spare_left[d] = instance.spare(d);
    st.eval_order.resize(evaluators.size());
    std::iota(st.eval_order.begin(), st.eval_order.end(), 0);

    st.dfs(0);

    MasterSolution sol;
    sol.plan = std::move(st.best_plan);
    sol.objective = st.best_value;
    sol.active_index = st.best_active;
    sol.evaluator_calls = st.eval_calls;
    sol.nodes_explored = st.nodes;
    return sol;
}

MasterSolution solve_by_mip(const Instance& instance, const PairSets& pairs,
                            std::span<const CostEvaluator* const> evaluators,
                            const MinMaxOptions& options) {
    const int L = instance.horizon;
    IntakeSpace space(instance.intake_max);
    const std::int64_t scen = space.size();
    const long long rows_needed = static_cast<long long>(L) * scen + evaluators.size() + 2L * L;
    if (rows_needed > options.max_mip_rows)
        throw std::invalid_argument("min-max MIP encoding exceeds the row cap");

    LinearProgram lp;
    const int n_pairs = static_cast<int>(pairs.all.size());
    // y variables, bounded by the single-pair implications of the pull bounds
    std::vector<int> yvar(n_pairs);
    for (int k = 0; k < n_pairs; ++k) {
        const DayPair& pr = pairs.all[k];
        const int ub = std::min(instance.workstack[pr.from_day], instance.spare(pr.to_day));
        yvar[k] = lp.add_var(0.0, 0.0, ub, true);
    }
    const int tvar = lp.add_var(1.0, 0.0, kInf, false);  // objective: min t
    // rollover variables R[scenario][day]
    std::vector<int> rvar(static_cast<size_t>(scen) * L);
    for (std::int64_t j = 0; j < scen; ++j)
        for (int d = 0; d < L; ++d)
            rvar[static_cast<size_t>(j) * L + d] = lp.add_var(0.0, 0.0, kInf, false);

    // pull bounds per day
    for (int day = 1; day < L; ++day) {
        bool has = false;
        for (int k = 0; k < n_pairs; ++k) has = has || pairs.all[k].from_day == day;
        if (!has) continue;
        int row = lp.add_row('L', instance.workstack[day]);
        for (int k = 0; k < n_pairs; ++k)
            if (pairs.all[k].from_day == day) lp.set(row, yvar[k], 1.0);
    }
    for (int day = 0; day + 1 < L; ++day) {
        bool has = false;
        for (int k = 0; k < n_pairs; ++k) has = has || pairs.all[k].to_day == day;
        if (!has) continue;
        int row = lp.add_row('L', instance.spare(day));
        for (int k = 0; k < n_pairs; ++k)
            if (pairs.all[k].to_day == day) lp.set(row, yvar[k], 1.0);
    }

    // rollover recursion per scenario and day:
    //   R_d - R_{d-1} - pulled_in_d(y) + pulled_out_d(y) >= i_d - (c_d - D_d)
    std::vector<int> intake(L);
    for (std::int64_t j = 0; j < scen; ++j) {
        space.decode(j, intake);
        for (int d = 0; d < L; ++d) {
            int row = lp.add_row('G', intake[d] - (instance.capacity[d] - instance.workstack[d]));
            lp.set(row, rvar[static_cast<size_t>(j) * L + d], 1.0);
            if (d > 0) lp.set(row, rvar[static_cast<size_t>(j) * L + d - 1], -1.0);
            for (int k = 0; k < n_pairs; ++k) {
                if (pairs.all[k].to_day == d) lp.set(row, yvar[k], -1.0);
                if (pairs.all[k].from_day == d) lp.set(row, yvar[k], 1.0);
            }
        }
    }

    // one worst-case constraint per evaluator, written as
    // sum_d a_d E[R_d] - t <= 0 so the slack basis starts feasible
    for (const CostEvaluator* ev : evaluators) {
        std::vector<double> w = ev->joint_weights(space);
        int row = lp.add_row('L', 0.0);
        lp.set(row, tvar, -1.0);
        for (std::int64_t j = 0; j < scen; ++j) {
            if (w[j] == 0.0) continue;
            for (int d = 0; d < L; ++d) {
                double coef = instance.rollover_cost[d] * w[j];
                if (coef != 0.0) lp.set(row, rvar[static_cast<size_t>(j) * L + d], coef);
            }
        }
    }

    MipOptions mip_opts;
    mip_opts.node_budget = options.node_budget;
    MipSolution mip = mip_solve(lp, mip_opts);
    if (mip.status != MipStatus::optimal)
        throw std::runtime_error("min-max MIP did not solve to optimality");

    MasterSolution sol;
    sol.plan.amount.resize(n_pairs);
    for (int k = 0; k < n_pairs; ++k)
        sol.plan.amount[k] = static_cast<int>(std::llround(mip.values[yvar[k]]));
    sol.nodes_explored = mip.nodes;

    // report the worst case through the evaluators themselves so both
    // strategies agree bit-for-bit on the objective semantics
    DayAggregates agg = plan_aggregates(instance, pairs, sol.plan);
    EvalWorkspace ws;
    ws.begin_plan();
    double worst = -kInf;
    int active = -1;
    for (size_t d = 0; d < evaluators.size(); ++d) {
        double v = evaluators[d]->expected_cost(instance, agg, ws);
        ++sol.evaluator_calls;
        if (v > worst) {
            worst = v;
            active = static_cast<int>(d);
        }
    }
    if (std::fabs(worst - mip.objective) > 1e-5)
        throw std::runtime_error("min-max MIP objective disagrees with evaluator re-pricing");
    sol.objective = worst;
    sol.active_index = active;
    return sol;
}

}  // namespace

MasterSolution solve_min_max(const Instance& instance, const PairSets& pairs,
                             std::span<const CostEvaluator* const> evaluators,
                             const MinMaxOptions& options) {
    if (evaluators.empty()) throw std::invalid_argument("solve_min_max: no evaluators");
    instance.validate();
    if (options.strategy == MasterStrategy::mip)
        return solve_by_mip(instance, pairs, evaluators, options);
    return solve_by_search(instance, pairs, evaluators);
}

}  // namespace drplan
