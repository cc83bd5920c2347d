#include "drplan/parametric.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "drplan/kernels.hpp"
#include "drplan/simplex.hpp"

namespace drplan {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<ConvolutionEvaluator> make_member_evaluators(const ParametricAmbiguitySet& theta,
                                                         PmfTableCache& cache) {
    std::vector<ConvolutionEvaluator> evals;
    evals.reserve(theta.size());
    for (const auto& p : theta.members()) evals.emplace_back(p, &cache.tables(p));
    return evals;
}

std::vector<const CostEvaluator*> evaluator_ptrs(const std::vector<ConvolutionEvaluator>& evals) {
    std::vector<const CostEvaluator*> ptrs;
    ptrs.reserve(evals.size());
    for (const auto& e : evals) ptrs.push_back(&e);
    return ptrs;
}

std::string format_label(const std::vector<double>& p) {
    std::string s = "(";
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

}  // namespace

SolveReport solve_exact_P(const Instance& instance, const ParametricAmbiguitySet& theta,
                          const MinMaxOptions& master, ExecPolicy policy, ExactEngine engine) {
    (void)policy;
    const auto start = Clock::now();
    if (theta.empty()) throw std::invalid_argument("solve_exact_P: empty ambiguity set");
    PairSets pairs = feasible_pairs(instance);
    PmfTableCache cache(instance.intake_max);

    IntakeSpace space(instance.intake_max);
    std::vector<ConvolutionEvaluator> conv_evals;
    std::vector<JointWeightEvaluator> joint_evals;
    std::vector<const CostEvaluator*> ptrs;
    if (engine == ExactEngine::convolution) {
        conv_evals = make_member_evaluators(theta, cache);
        for (const auto& e : conv_evals) ptrs.push_back(&e);
    } else {
        joint_evals.reserve(theta.size());
        for (const auto& p : theta.members()) {
            ConvolutionEvaluator tmp(p, &cache.tables(p));
            joint_evals.emplace_back(tmp.joint_weights(space), &space, "joint " + format_label(p));
        }
        for (const auto& e : joint_evals) ptrs.push_back(&e);
    }

    MasterSolution sol = solve_min_max(instance, pairs, ptrs, master);

    SolveReport report;
    report.algorithm = engine == ExactEngine::convolution ? "P" : "oracle";
    report.plan = sol.plan;
    report.worst_p = theta.member(sol.active_index);
    report.objective = sol.objective;
    report.counters.evaluator_calls = sol.evaluator_calls;
    report.counters.pmf_table_sets = cache.table_sets_built();
    report.wall_ms = elapsed_ms(start);
    return report;
}

std::pair<int, double> distribution_separation(const Instance& instance,
                                               const PullForwardPlan& plan,
                                               const ParametricAmbiguitySet& candidates,
                                               PmfTableCache& cache, SolveCounters& counters,
                                               ExecPolicy policy) {
    if (candidates.empty())
        throw std::invalid_argument("distribution_separation: no candidates");
    PairSets pairs = feasible_pairs(instance);
    DayAggregates agg = plan_aggregates(instance, pairs, plan);
    auto evals = make_member_evaluators(candidates, cache);
    auto ptrs = evaluator_ptrs(evals);
    SweepResult sweep = worst_case_sweep(instance, agg, ptrs, policy);
    counters.evaluator_calls += sweep.evaluator_calls;
    return {sweep.index, sweep.cost};
}

SolveReport solve_cutting_surface(const Instance& instance, const ParametricAmbiguitySet& theta,
                                  SeparationScope scope, const CutSurfaceOptions& options,
                                  ExecPolicy policy) {
    const auto start = Clock::now();
    if (theta.empty()) throw std::invalid_argument("cutting surface: empty ambiguity set");
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("cutting surface: epsilon <= 0");
    if (options.k_max < 1) throw std::invalid_argument("cutting surface: k_max < 1");
    PairSets pairs = feasible_pairs(instance);

    SolveReport report;
    report.algorithm = scope == SeparationScope::full ? "CS_opt" : "CS";

    PmfTableCache cache(instance.intake_max);

    std::vector<double> p_init = options.p_init;
    if (p_init.empty()) {
        p_init = theta.meta().p_hat;
        if (p_init.empty()) p_init = theta.member(0);
    }

    // the separation set is fixed up front; CS prices only these members
    ParametricAmbiguitySet separation_set =
        scope == SeparationScope::full ? theta : build_extreme_set(theta);
    auto sep_evals = make_member_evaluators(separation_set, cache);
    auto sep_ptrs = evaluator_ptrs(sep_evals);

    std::vector<std::vector<double>> pool{p_init};

    for (int k = 1; k <= options.k_max; ++k) {
        std::vector<ConvolutionEvaluator> pool_evals;
        pool_evals.reserve(pool.size());
        for (const auto& p : pool) pool_evals.emplace_back(p, &cache.tables(p));
        auto pool_ptrs = evaluator_ptrs(pool_evals);
        MasterSolution master = solve_min_max(instance, pairs, pool_ptrs, options.master);
        report.counters.evaluator_calls += master.evaluator_calls;

        DayAggregates agg = plan_aggregates(instance, pairs, master.plan);
        SweepResult sep = worst_case_sweep(instance, agg, sep_ptrs, policy);
        report.counters.evaluator_calls += sep.evaluator_calls;
        const std::vector<double>& p_k = separation_set.member(sep.index);

        IterationRecord rec;
        rec.iteration = k;
        rec.pool = pool;
        rec.plan_amount = master.plan.amount;
        rec.master_value = master.objective;
        rec.separated = p_k;
        rec.separated_cost = sep.cost;
        report.trace.push_back(std::move(rec));

        const bool eps_stop = sep.cost <= master.objective + options.epsilon / 2.0;
        const bool repeat = std::find(pool.begin(), pool.end(), p_k) != pool.end();
        if (repeat && !eps_stop)
            throw std::logic_error(
                "cutting surface: repeated parameter without epsilon-closeness; "
                "separation and master disagree on the same evaluation");
        report.iterations = k;
        if (eps_stop || repeat) {
            report.plan = master.plan;
            report.worst_p = p_k;
            report.objective = sep.cost;
            report.converged = true;
            report.stopped_on_repeat = repeat;
            report.counters.pmf_table_sets = cache.table_sets_built();
            report.wall_ms = elapsed_ms(start);
            return report;
        }
        pool.push_back(p_k);
        // keep the incumbent in case the iteration budget runs out
        report.plan = master.plan;
        report.worst_p = p_k;
        report.objective = sep.cost;
    }
    report.converged = false;
    report.counters.pmf_table_sets = cache.table_sets_built();
    report.wall_ms = elapsed_ms(start);
    return report;
}

SolveReport solve_AO(const Instance& instance, const ParametricAmbiguitySet& theta,
                     const AoOptions& options, ExecPolicy policy) {
    const auto start = Clock::now();
    if (theta.empty()) throw std::invalid_argument("solve_AO: empty ambiguity set");
    PairSets pairs = feasible_pairs(instance);
    ReducedIntakeSet reduced = reduce_intake_set(theta, instance.intake_max, options.beta, policy);
    IntakeSpace space(instance.intake_max);

    PmfTableCache cache(instance.intake_max);
    std::vector<ReducedSetEvaluator> evals;
    evals.reserve(theta.size());
    for (const auto& p : theta.members())
        evals.emplace_back(p, cache.tables(p), &space, &reduced);
    std::vector<const CostEvaluator*> ptrs;
    for (const auto& e : evals) ptrs.push_back(&e);

    MasterSolution sol = solve_min_max(instance, pairs, ptrs, options.master);

    SolveReport report;
    report.algorithm = "AO";
    report.plan = sol.plan;
    report.worst_p = theta.member(sol.active_index);
    report.truncated_objective = sol.objective;
    // gap metrics are defined against the exact objective, so re-price the
    // chosen pair exactly
    DayAggregates agg = plan_aggregates(instance, pairs, sol.plan);
    EvalWorkspace ws;
    ws.begin_plan();
    ConvolutionEvaluator exact(report.worst_p, &cache.tables(report.worst_p));
    report.objective = exact.expected_cost(instance, agg, ws);
    report.counters.evaluator_calls = sol.evaluator_calls + 1;
    report.counters.pmf_table_sets = cache.table_sets_built();
    report.reduced_set_size = static_cast<long long>(reduced.retained.size());
    report.wall_ms = elapsed_ms(start);
    return report;
}

SolveReport solve_RO(const Instance& instance, const MinMaxOptions& master) {
    const auto start = Clock::now();
    instance.validate();
    PairSets pairs = feasible_pairs(instance);
    PointMassEvaluator worst_point(instance.intake_max);
    const CostEvaluator* ptr = &worst_point;
    MasterSolution sol = solve_min_max(instance, pairs, {&ptr, 1}, master);

    SolveReport report;
    report.algorithm = "RO";
    report.plan = sol.plan;
    report.worst_intake = instance.intake_max;
    report.objective = sol.objective;
    report.counters.evaluator_calls = sol.evaluator_calls;
    report.wall_ms = elapsed_ms(start);
    return report;
}

GapMetrics brute_force_metrics(const Instance& instance, const ParametricAmbiguitySet& theta,
                               const SolveReport& report, double z_star, ExecPolicy policy) {
    PairSets pairs = feasible_pairs(instance);
    DayAggregates agg = plan_aggregates(instance, pairs, report.plan);
    PmfTableCache cache(instance.intake_max);
    auto evals = make_member_evaluators(theta, cache);
    auto ptrs = evaluator_ptrs(evals);
    SweepResult sweep = worst_case_sweep(instance, agg, ptrs, policy);

    GapMetrics gaps;
    gaps.worst_case_cost = sweep.cost;
    gaps.p_gap = sweep.cost - report.objective;
    gaps.y_gap = sweep.cost - z_star;
    gaps.p_apg = gaps.worst_case_cost != 0.0
                     ? std::fabs(gaps.p_gap) / std::fabs(gaps.worst_case_cost) * 100.0
                     : 0.0;
    gaps.y_apg = z_star != 0.0 ? std::fabs(gaps.y_gap) / std::fabs(z_star) * 100.0 : 0.0;
    return gaps;
}

// ---------------------------------------------------------------------------
// Benders decomposition

double BendersCut::value_at(const PullForwardPlan& plan) const {
    double v = constant;
    for (size_t k = 0; k < coef.size(); ++k) v += coef[k] * plan.amount[k];
    return v;
}

BendersCut benders_optimality_cut(const Instance& instance, const PairSets& pairs,
                                  const IntakeSpace& space, std::span<const double> joint_weights,
                                  const DayAggregates& agg) {
    const int L = instance.horizon;
    BendersCut cut;
    cut.coef.assign(pairs.all.size(), 0.0);
    std::vector<double> u(L, 0.0);        // chain duals of one scenario
    std::vector<double> rollover(L, 0.0);
    std::vector<double> day_u_sum(L, 0.0);  // sum over scenarios of u_{j,d}

    space.for_each([&](std::int64_t j, std::span<const int> intake) {
        const double w = joint_weights[j];
        // rollover trajectory at this scenario
        double prev = 0.0;
        for (int d = 0; d < L; ++d) {
            double load = prev + intake[d] + agg.pulled_in[d];
            double room = instance.capacity[d] - instance.workstack[d] + agg.pulled_out[d];
            prev = load > room ? load - room : 0.0;
            rollover[d] = prev;
        }
        if (w == 0.0) return;
        // backward pass: u_d = u_{d+1} + a_d w where the recursion row binds
        double next = 0.0;
        for (int d = L - 1; d >= 0; --d) {
            u[d] = rollover[d] > 0.0 ? next + instance.rollover_cost[d] * w : 0.0;
            next = u[d];
        }
        for (int d = 0; d < L; ++d) {
            if (u[d] == 0.0) continue;
            day_u_sum[d] += u[d];
            cut.constant +=
                u[d] * (intake[d] - (instance.capacity[d] - instance.workstack[d]));
        }
    });

    for (size_t k = 0; k < pairs.all.size(); ++k) {
        cut.coef[k] = day_u_sum[pairs.all[k].to_day] - day_u_sum[pairs.all[k].from_day];
    }
    return cut;
}

SolveReport solve_benders(const Instance& instance, const ParametricAmbiguitySet& theta,
                          const BendersOptions& options, ExecPolicy policy) {
    const auto start = Clock::now();
    if (theta.empty()) throw std::invalid_argument("solve_benders: empty ambiguity set");
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("solve_benders: epsilon <= 0");
    PairSets pairs = feasible_pairs(instance);
    IntakeSpace space(instance.intake_max);
    PmfTableCache cache(instance.intake_max);
    auto evals = make_member_evaluators(theta, cache);
    auto ptrs = evaluator_ptrs(evals);

    SolveReport report;
    report.algorithm = "benders";

    // master: min z over z >= 0 (costs are non-negative) and y in the pull
    // polytope; optimality cuts accumulate as rows
    LinearProgram master;
    const int n_pairs = static_cast<int>(pairs.all.size());
    std::vector<int> yvar(n_pairs);
    for (int k = 0; k < n_pairs; ++k) {
        const DayPair& pr = pairs.all[k];
        int ub = std::min(instance.workstack[pr.from_day], instance.spare(pr.to_day));
        yvar[k] = master.add_var(0.0, 0.0, ub, true);
    }
    const int zvar = master.add_var(1.0, 0.0, std::numeric_limits<double>::infinity(), false);
    for (int day = 1; day < instance.horizon; ++day) {
        int row = master.add_row('L', instance.workstack[day]);
        bool used = false;
        for (int k = 0; k < n_pairs; ++k)
            if (pairs.all[k].from_day == day) {
                master.set(row, yvar[k], 1.0);
                used = true;
            }
        if (!used) {
            master.sense.pop_back();
            master.rhs.pop_back();
        }
    }
    for (int day = 0; day + 1 < instance.horizon; ++day) {
        int row = master.add_row('L', instance.spare(day));
        bool used = false;
        for (int k = 0; k < n_pairs; ++k)
            if (pairs.all[k].to_day == day) {
                master.set(row, yvar[k], 1.0);
                used = true;
            }
        if (!used) {
            master.sense.pop_back();
            master.rhs.pop_back();
        }
    }

    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    PullForwardPlan best_plan;
    int best_theta = -1;
    double prev_lb = -std::numeric_limits<double>::infinity();

    MipOptions mip_opts;
    mip_opts.node_budget = options.master.node_budget;

    for (int it = 1; it <= options.max_iterations; ++it) {
        MipSolution msol = mip_solve(master, mip_opts);
        if (msol.status != MipStatus::optimal)
            throw std::runtime_error("benders: master MIP failed");
        PullForwardPlan ybar;
        ybar.amount.resize(n_pairs);
        for (int k = 0; k < n_pairs; ++k)
            ybar.amount[k] = static_cast<int>(std::llround(msol.values[yvar[k]]));
        lb = msol.objective;
        if (lb < prev_lb - 1e-9)
            throw std::logic_error("benders: master lower bound decreased");
        prev_lb = lb;

        // subproblem: binding worst-case member, then chain duals per scenario
        DayAggregates agg = plan_aggregates(instance, pairs, ybar);
        SweepResult sep = worst_case_sweep(instance, agg, ptrs, policy);
        report.counters.evaluator_calls += sep.evaluator_calls;
        std::vector<double> weights = evals[sep.index].joint_weights(space);
        BendersCut cut = benders_optimality_cut(instance, pairs, space, weights, agg);
        const double z_sub = cut.value_at(ybar);

        if (z_sub < ub) {
            ub = z_sub;
            best_plan = ybar;
            best_theta = sep.index;
        }

        IterationRecord rec;
        rec.iteration = it;
        rec.plan_amount = ybar.amount;
        rec.master_value = lb;
        rec.separated = theta.member(sep.index);
        rec.separated_cost = z_sub;
        rec.lower_bound = lb;
        rec.upper_bound = ub;
        report.trace.push_back(std::move(rec));
        report.iterations = it;

        if (ub - lb <= options.epsilon) {
            report.converged = true;
            break;
        }
        if (it == options.max_iterations) {
            report.converged = false;
            break;
        }

        // optimality cut: z >= constant + coef'y
        int row = master.add_row('G', cut.constant);
        master.set(row, zvar, 1.0);
        for (int k = 0; k < n_pairs; ++k)
            if (cut.coef[k] != 0.0) master.set(row, yvar[k], -cut.coef[k]);
    }

    report.plan = best_plan;
    report.worst_p = best_theta >= 0 ? theta.member(best_theta) : std::vector<double>{};
    report.objective = ub;
    report.counters.pmf_table_sets = cache.table_sets_built();
    report.wall_ms = elapsed_ms(start);
    return report;
}

}  // namespace drplan
