#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drplan/planning.hpp"
#include "drplan/simplex.hpp"

using namespace drplan;

namespace {

// the two-day worked instance used throughout: c=(30,10), D=(5,20),
// i_max=(20,20), unit rollover costs
Instance two_day() {
    Instance ins;
    ins.horizon = 2;
    ins.window = 1;
    ins.capacity = {30, 10};
    ins.workstack = {5, 20};
    ins.rollover_cost = {1.0, 1.0};
    ins.intake_max = {20, 20};
    return ins;
}

Instance random_instance(std::mt19937& rng, int L = 4) {
    std::uniform_int_distribution<int> cap(5, 30), work(0, 30), im(0, 6);
    Instance ins;
    ins.horizon = L;
    ins.window = std::uniform_int_distribution<int>(1, L - 1)(rng);
    for (int d = 0; d < L; ++d) {
        ins.capacity.push_back(cap(rng));
        ins.workstack.push_back(work(rng));
        ins.rollover_cost.push_back(std::uniform_real_distribution<double>(0.1, 3.0)(rng));
        ins.intake_max.push_back(im(rng));
    }
    return ins;
}

std::vector<int> random_intake(std::mt19937& rng, const Instance& ins) {
    std::vector<int> intake(ins.horizon);
    for (int d = 0; d < ins.horizon; ++d)
        intake[d] = std::uniform_int_distribution<int>(0, ins.intake_max[d])(rng);
    return intake;
}

PullForwardPlan random_feasible_plan(std::mt19937& rng, const Instance& ins,
                                     const PairSets& pairs) {
    PullForwardPlan plan;
    plan.amount.assign(pairs.all.size(), 0);
    std::vector<int> work_left = ins.workstack;
    std::vector<int> spare_left(ins.horizon);
    for (int d = 0; d < ins.horizon; ++d) spare_left[d] = ins.spare(d);
    for (size_t k = 0; k < pairs.all.size(); ++k) {
        int ub = std::min(work_left[pairs.all[k].from_day], spare_left[pairs.all[k].to_day]);
        int v = std::uniform_int_distribution<int>(0, ub)(rng);
        plan.amount[k] = v;
        work_left[pairs.all[k].from_day] -= v;
        spare_left[pairs.all[k].to_day] -= v;
    }
    return plan;
}

}  // namespace

TEST_CASE("instance validation") {
    Instance ins = two_day();
    CHECK_NOTHROW(ins.validate());
    ins.window = 2;
    CHECK_THROWS_AS(ins.validate(), std::invalid_argument);  // K > L-1
    ins.window = 1;
    ins.capacity = {30};
    CHECK_THROWS_AS(ins.validate(), std::invalid_argument);
}

TEST_CASE("pair sets") {
    SUBCASE("two-day instance has the single pair") {
        PairSets sets = feasible_pairs(two_day());
        REQUIRE(sets.all.size() == 1);
        CHECK(sets.all[0].from_day == 1);
        CHECK(sets.all[0].to_day == 0);
        CHECK(sets.feasible.size() == 1);
    }
    SUBCASE("five-day pattern with three feasible pairs") {
        // c - D = (8, -15, -15, 8, -15), all workstacks positive
        Instance ins;
        ins.horizon = 5;
        ins.window = 2;
        ins.capacity = {30, 30, 30, 30, 30};
        ins.workstack = {22, 45, 45, 22, 45};
        ins.rollover_cost.assign(5, 1.0);
        ins.intake_max.assign(5, 3);
        PairSets sets = feasible_pairs(ins);
        CHECK(sets.all.size() == 7);
        REQUIRE(sets.feasible.size() == 3);
        // (2,1), (3,1), (5,4) in 1-based day numbers
        CHECK(sets.feasible[0] == DayPair{1, 0});
        CHECK(sets.feasible[1] == DayPair{2, 0});
        CHECK(sets.feasible[2] == DayPair{4, 3});
    }
    SUBCASE("all-spare pattern has every pair feasible") {
        Instance ins;
        ins.horizon = 5;
        ins.window = 2;
        ins.capacity = {30, 30, 30, 30, 30};
        ins.workstack = {22, 22, 22, 22, 22};
        ins.rollover_cost.assign(5, 1.0);
        ins.intake_max.assign(5, 3);
        CHECK(feasible_pairs(ins).feasible.size() == 7);
    }
}

TEST_CASE("plan validation") {
    Instance ins = two_day();
    PairSets pairs = feasible_pairs(ins);

    SUBCASE("zero plan is feasible") {
        PullForwardPlan zero;
        zero.amount = {0};
        CHECK(validate_plan(ins, pairs, zero).ok());
    }
    SUBCASE("y = 9 is feasible") {
        PullForwardPlan plan = plan_from_entries(pairs, std::vector<PullEntry>{{1, 0, 9}});
        CHECK(validate_plan(ins, pairs, plan).ok());
    }
    SUBCASE("y = 26 violates the spare bound on day 1 (and the workstack bound)") {
        PullForwardPlan plan = plan_from_entries(pairs, std::vector<PullEntry>{{1, 0, 26}});
        PlanValidation res = validate_plan(ins, pairs, plan);
        REQUIRE_FALSE(res.ok());
        bool spare_day1 = false, workstack_day2 = false;
        for (const auto& v : res.violations) {
            if (v.kind == PlanViolation::Kind::spare_bound && v.day == 0 && v.bound == 25)
                spare_day1 = true;
            if (v.kind == PlanViolation::Kind::workstack_bound && v.day == 1 && v.bound == 20)
                workstack_day2 = true;
        }
        CHECK(spare_day1);
        CHECK(workstack_day2);  // 26 also exceeds the day-2 workstack of 20
    }
    SUBCASE("y = 22 violates only the workstack bound") {
        PullForwardPlan plan = plan_from_entries(pairs, std::vector<PullEntry>{{1, 0, 22}});
        PlanValidation res = validate_plan(ins, pairs, plan);
        REQUIRE(res.violations.size() == 1);
        CHECK(res.violations[0].kind == PlanViolation::Kind::workstack_bound);
        CHECK(res.violations[0].day == 1);
    }
    SUBCASE("entry outside F is a structural error") {
        CHECK_THROWS_AS(plan_from_entries(pairs, std::vector<PullEntry>{{0, 1, 1}}),
                        std::invalid_argument);
    }
}

TEST_CASE("rollover recursion on the worked two-day instance") {
    Instance ins = two_day();
    PairSets pairs = feasible_pairs(ins);

    SUBCASE("y=9, full intake: R=(4,25), cost 29") {
        PullForwardPlan plan = plan_from_entries(pairs, std::vector<PullEntry>{{1, 0, 9}});
        auto traj = rollover_trajectory(ins, pairs, plan, std::vector<int>{20, 20});
        CHECK(traj.rollover[0] == doctest::Approx(4.0));
        CHECK(traj.rollover[1] == doctest::Approx(25.0));
        CHECK(traj.total_cost == doctest::Approx(29.0));
    }
    SUBCASE("y=5, full intake: R=(0,25), cost 25") {
        PullForwardPlan plan = plan_from_entries(pairs, std::vector<PullEntry>{{1, 0, 5}});
        auto traj = rollover_trajectory(ins, pairs, plan, std::vector<int>{20, 20});
        CHECK(traj.rollover[0] == doctest::Approx(0.0));
        CHECK(traj.rollover[1] == doctest::Approx(25.0));
        CHECK(traj.total_cost == doctest::Approx(25.0));
    }
    SUBCASE("no intake, enough capacity: zero rollover") {
        Instance easy = two_day();
        easy.workstack = {5, 9};
        PullForwardPlan zero;
        zero.amount = {0};
        auto traj = rollover_trajectory(easy, feasible_pairs(easy), zero, std::vector<int>{0, 0});
        CHECK(traj.total_cost == 0.0);
    }
    SUBCASE("intake outside the box is a domain error") {
        PullForwardPlan zero;
        zero.amount = {0};
        CHECK_THROWS_AS(rollover_trajectory(ins, pairs, zero, std::vector<int>{21, 0}),
                        std::invalid_argument);
    }
}

TEST_CASE("rollover monotone in intake and in capacity") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Instance ins = random_instance(rng);
        PairSets pairs = feasible_pairs(ins);
        PullForwardPlan plan = random_feasible_plan(rng, ins, pairs);
        std::vector<int> intake = random_intake(rng, ins);
        auto base = rollover_trajectory(ins, pairs, plan, intake);

        // bump one intake up: no component may decrease
        int d = std::uniform_int_distribution<int>(0, ins.horizon - 1)(rng);
        if (intake[d] < ins.intake_max[d]) {
            auto bumped_intake = intake;
            ++bumped_intake[d];
            auto bumped = rollover_trajectory(ins, pairs, plan, bumped_intake);
            for (int t = 0; t < ins.horizon; ++t)
                CHECK(bumped.rollover[t] >= base.rollover[t] - 1e-12);
        }

        // bump one capacity up: no component may increase
        Instance more = ins;
        ++more.capacity[d];
        auto relaxed = rollover_trajectory(more, plan_aggregates(ins, pairs, plan), intake);
        for (int t = 0; t < ins.horizon; ++t)
            CHECK(relaxed.rollover[t] <= base.rollover[t] + 1e-12);
    }
}

TEST_CASE("recursion returns the componentwise-minimal feasible rollover (LP oracle)") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Instance ins = random_instance(rng, 3 + trial % 3);
        PairSets pairs = feasible_pairs(ins);
        PullForwardPlan plan = random_feasible_plan(rng, ins, pairs);
        std::vector<int> intake = random_intake(rng, ins);
        DayAggregates agg = plan_aggregates(ins, pairs, plan);
        auto traj = rollover_trajectory(ins, agg, intake);

        // LP: min sum R subject to the recursion inequalities, R >= 0
        LinearProgram lp;
        const double inf = std::numeric_limits<double>::infinity();
        for (int d = 0; d < ins.horizon; ++d) lp.add_var(1.0, 0.0, inf);
        for (int d = 0; d < ins.horizon; ++d) {
            double rhs = intake[d] + agg.pulled_in[d] -
                         (ins.capacity[d] - ins.workstack[d] + agg.pulled_out[d]);
            int row = lp.add_row('G', rhs);
            lp.set(row, d, 1.0);
            if (d > 0) lp.set(row, d - 1, -1.0);
        }
        LpSolution sol = lp_solve(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        for (int d = 0; d < ins.horizon; ++d)
            CHECK(sol.primal[d] == doctest::Approx(traj.rollover[d]).epsilon(1e-7));
    }
}
