#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drplan/expectation.hpp"
#include "drplan/intake.hpp"
#include "drplan/planning.hpp"

using namespace drplan;

namespace {

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

DayAggregates two_day_aggregates(int y) {
    DayAggregates agg;
    agg.pulled_in = {y, 0};
    agg.pulled_out = {0, y};
    return agg;
}

Instance random_instance(std::mt19937& rng, int L, int imax_hi) {
    Instance ins;
    ins.horizon = L;
    ins.window = std::uniform_int_distribution<int>(1, L - 1)(rng);
    for (int d = 0; d < L; ++d) {
        ins.capacity.push_back(std::uniform_int_distribution<int>(4, 20)(rng));
        ins.workstack.push_back(std::uniform_int_distribution<int>(0, 20)(rng));
        ins.rollover_cost.push_back(std::uniform_real_distribution<double>(0.1, 2.0)(rng));
        ins.intake_max.push_back(std::uniform_int_distribution<int>(0, imax_hi)(rng));
    }
    return ins;
}

DayAggregates random_aggregates(std::mt19937& rng, const Instance& ins) {
    PairSets pairs = feasible_pairs(ins);
    PullForwardPlan plan;
    plan.amount.assign(pairs.all.size(), 0);
    std::vector<int> work_left = ins.workstack;
    std::vector<int> spare_left(ins.horizon);
    for (int d = 0; d < ins.horizon; ++d) spare_left[d] = ins.spare(d);
    for (size_t k = 0; k < pairs.all.size(); ++k) {
        int ub = std::min(work_left[pairs.all[k].from_day], spare_left[pairs.all[k].to_day]);
        plan.amount[k] = std::uniform_int_distribution<int>(0, ub)(rng);
        work_left[pairs.all[k].from_day] -= plan.amount[k];
        spare_left[pairs.all[k].to_day] -= plan.amount[k];
    }
    return plan_aggregates(ins, pairs, plan);
}

std::vector<double> random_probs(std::mt19937& rng, int L) {
    std::vector<double> p(L);
    for (double& v : p) v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return p;
}

}  // namespace

TEST_CASE("enumeration engine on the worked instance") {
    Instance ins = two_day();
    IntakeSpace space(ins.intake_max);

    SUBCASE("point mass at zero intake") {
        DayAggregates agg = two_day_aggregates(9);
        std::vector<double> p{0.0, 0.0};
        double cost = expected_cost_enumeration(ins, agg, p, space);
        std::vector<int> zero{0, 0};
        CHECK(cost == doctest::Approx(rollover_cost_unchecked(ins, agg, zero)));
        CHECK(cost == doctest::Approx(1.0));  // day-2 deficit 10 minus 9 pulled out
    }
    SUBCASE("worked worst-case values") {
        DayAggregates agg = two_day_aggregates(9);
        CHECK(expected_cost_enumeration(ins, agg, std::vector<double>{0.82, 0.82}, space) ==
              doctest::Approx(19.2).epsilon(0.002));
        CHECK(expected_cost_enumeration(ins, agg, std::vector<double>{0.84, 0.79}, space) ==
              doctest::Approx(19.07).epsilon(0.001));
    }
    SUBCASE("cap refusal") {
        CHECK_THROWS_AS(
            expected_cost_enumeration(ins, two_day_aggregates(0), std::vector<double>{0.5, 0.5},
                                      space, 100),
            std::invalid_argument);
    }
}

TEST_CASE("convolution equals enumeration") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        int L = std::uniform_int_distribution<int>(2, 5)(rng);
        Instance ins = random_instance(rng, L, 6);
        IntakeSpace space(ins.intake_max);
        if (space.size() > 10'000) continue;
        DayAggregates agg = random_aggregates(rng, ins);
        std::vector<double> p = random_probs(rng, L);
        double by_enum = expected_cost_enumeration(ins, agg, p, space);
        CostProfile by_conv = expected_cost_convolution(ins, agg, p);
        CHECK(by_conv.total == doctest::Approx(by_enum).epsilon(1e-9));
    }
}

TEST_CASE("convolution at degenerate p equals the deterministic trajectory") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        int L = std::uniform_int_distribution<int>(2, 5)(rng);
        Instance ins = random_instance(rng, L, 8);
        DayAggregates agg = random_aggregates(rng, ins);
        std::vector<double> p(L);
        std::vector<int> intake(L);
        for (int d = 0; d < L; ++d) {
            bool hi = std::bernoulli_distribution(0.5)(rng);
            p[d] = hi ? 1.0 : 0.0;
            intake[d] = hi ? ins.intake_max[d] : 0;
        }
        CostProfile prof = expected_cost_convolution(ins, agg, p);
        auto traj = rollover_trajectory(ins, agg, intake);
        CHECK(prof.total == doctest::Approx(traj.total_cost).epsilon(1e-12));
        for (int d = 0; d < L; ++d)
            CHECK(prof.expected_rollover[d] == doctest::Approx(traj.rollover[d]).epsilon(1e-12));
    }
}

TEST_CASE("worked instance through the convolution engine") {
    Instance ins = two_day();
    CostProfile prof =
        expected_cost_convolution(ins, two_day_aggregates(9), std::vector<double>{0.82, 0.82});
    CHECK(prof.total == doctest::Approx(19.2).epsilon(0.002));
}

TEST_CASE("expected cost is monotone in p") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        int L = std::uniform_int_distribution<int>(2, 5)(rng);
        Instance ins = random_instance(rng, L, 8);
        DayAggregates agg = random_aggregates(rng, ins);
        std::vector<double> p = random_probs(rng, L);
        double base = expected_cost_convolution(ins, agg, p).total;
        int d = std::uniform_int_distribution<int>(0, L - 1)(rng);
        std::vector<double> bumped = p;
        bumped[d] = std::min(1.0, bumped[d] + std::uniform_real_distribution<double>(0, 0.3)(rng));
        CHECK(expected_cost_convolution(ins, agg, bumped).total >= base - 1e-9);
    }
}

TEST_CASE("rollover distribution is a proper law with the recursion bound") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        int L = std::uniform_int_distribution<int>(2, 4)(rng);
        Instance ins = random_instance(rng, L, 6);
        DayAggregates agg = random_aggregates(rng, ins);
        std::vector<double> p = random_probs(rng, L);
        RolloverDistribution dist = rollover_distribution(ins, agg, p);
        auto worst = rollover_trajectory(ins, agg, ins.intake_max);
        for (int d = 0; d < L; ++d) {
            double total = 0.0;
            for (double v : dist.day_pmf[d]) total += v;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(dist.day_pmf[d].size() == static_cast<size_t>(worst.rollover[d]) + 1);
        }
    }
}

TEST_CASE("reduced expectation") {
    Instance ins = two_day();
    IntakeSpace space(ins.intake_max);
    std::vector<double> p_hat{0.75, 0.75};
    ParametricAmbiguitySet theta = build_confidence_set(p_hat, 10, ins.intake_max, 0.005, 100);

    SUBCASE("beta = 0 with interior p equals full enumeration") {
        ReducedIntakeSet all = reduce_intake_set(theta, ins.intake_max, 0.0);
        REQUIRE(all.retained.size() == static_cast<size_t>(space.size()));
        DayAggregates agg = two_day_aggregates(9);
        std::vector<double> p{0.8, 0.7};
        CHECK(expected_cost_reduced(ins, agg, p, space, all) ==
              doctest::Approx(expected_cost_enumeration(ins, agg, p, space)).epsilon(1e-12));
    }
    SUBCASE("truncation bound: dropped mass times max cost") {
        ReducedIntakeSet reduced = reduce_intake_set(theta, ins.intake_max, 1e-3);
        std::mt19937 rng(41);
        for (int trial = 0; trial < 25; ++trial) {
            DayAggregates agg = two_day_aggregates(std::uniform_int_distribution<int>(0, 20)(rng));
            std::vector<double> p{std::uniform_real_distribution<double>(0.6, 0.9)(rng),
                                  std::uniform_real_distribution<double>(0.6, 0.9)(rng)};
            double full = expected_cost_enumeration(ins, agg, p, space);
            double trunc = expected_cost_reduced(ins, agg, p, space, reduced);
            CHECK(trunc <= full + 1e-12);
            // removed mass
            std::vector<std::vector<double>> tables(2);
            for (int d = 0; d < 2; ++d) tables[d] = binomial_pmf_table(ins.intake_max[d], p[d]);
            double kept_mass = 0.0;
            std::vector<int> buf(2);
            for (std::int64_t idx : reduced.retained) {
                space.decode(idx, buf);
                kept_mass += tables[0][buf[0]] * tables[1][buf[1]];
            }
            auto worst = rollover_trajectory(ins, agg, ins.intake_max);
            double bound = (1.0 - kept_mass) * worst.total_cost;
            CHECK(full - trunc <= bound + 1e-9);
            CHECK(full - trunc >= -1e-12);
        }
    }
    SUBCASE("worked instance: truncated objective at y=9 near the exact one") {
        ReducedIntakeSet reduced = reduce_intake_set(theta, ins.intake_max, 1e-3);
        DayAggregates agg = two_day_aggregates(9);
        std::vector<double> p{0.82, 0.82};
        double trunc = expected_cost_reduced(ins, agg, p, space, reduced);
        CHECK(trunc == doctest::Approx(19.2).epsilon(0.006));
        CHECK(std::fabs(trunc - 19.196) < 0.1);
    }
}
