#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drplan/simplex.hpp"

using namespace drplan;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("lp basics") {
    SUBCASE("max x+y subject to x+y <= 1") {
        LinearProgram lp;
        lp.maximize = true;
        int x = lp.add_var(1.0, 0.0, kInf);
        int y = lp.add_var(1.0, 0.0, kInf);
        int row = lp.add_row('L', 1.0);
        lp.set(row, x, 1.0);
        lp.set(row, y, 1.0);
        LpSolution sol = lp_solve(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(1.0));
        CHECK(sol.primal[x] + sol.primal[y] == doctest::Approx(1.0));
    }
    SUBCASE("infeasible system x >= 1, x <= 0") {
        LinearProgram lp;
        int x = lp.add_var(0.0, 0.0, kInf);
        int r1 = lp.add_row('G', 1.0);
        lp.set(r1, x, 1.0);
        int r2 = lp.add_row('L', 0.0);
        lp.set(r2, x, 1.0);
        CHECK(lp_solve(lp).status == LpStatus::infeasible);
    }
    SUBCASE("unbounded max x") {
        LinearProgram lp;
        lp.maximize = true;
        int x = lp.add_var(1.0, 0.0, kInf);
        int row = lp.add_row('G', 0.0);
        lp.set(row, x, 1.0);
        CHECK(lp_solve(lp).status == LpStatus::unbounded);
    }
    SUBCASE("equality rows and free variables") {
        // min |style| problem: min x + y st x - y = 3, x,y >= 0 -> (3, 0)
        LinearProgram lp;
        int x = lp.add_var(1.0, 0.0, kInf);
        int y = lp.add_var(1.0, 0.0, kInf);
        int row = lp.add_row('E', 3.0);
        lp.set(row, x, 1.0);
        lp.set(row, y, -1.0);
        LpSolution sol = lp_solve(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(3.0));
        CHECK(sol.primal[x] == doctest::Approx(3.0));

        // free variable: min z st z >= -5 (as a row), objective z
        LinearProgram lp2;
        int z = lp2.add_var(1.0, -kInf, kInf);
        int r = lp2.add_row('G', -5.0);
        lp2.set(r, z, 1.0);
        LpSolution sol2 = lp_solve(lp2);
        REQUIRE(sol2.status == LpStatus::optimal);
        CHECK(sol2.objective == doctest::Approx(-5.0));
    }
    SUBCASE("variable bounds are honoured") {
        LinearProgram lp;
        lp.maximize = true;
        int x = lp.add_var(1.0, 2.0, 7.5);
        (void)x;
        LpSolution sol = lp_solve(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(7.5));
    }
}

TEST_CASE("random LPs satisfy strong duality") {
    std::mt19937 rng(13);
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = std::uniform_int_distribution<int>(1, 6)(rng);
        int m = std::uniform_int_distribution<int>(1, 6)(rng);
        LinearProgram lp;
        for (int j = 0; j < n; ++j)
            lp.add_var(std::uniform_real_distribution<double>(-2, 2)(rng), 0.0, kInf);
        for (int i = 0; i < m; ++i) {
            char sense = "LG"[std::uniform_int_distribution<int>(0, 1)(rng)];
            double rhs = std::uniform_real_distribution<double>(-1, 5)(rng);
            int row = lp.add_row(sense, rhs);
            for (int j = 0; j < n; ++j) {
                double v = std::uniform_real_distribution<double>(-2, 2)(rng);
                if (std::fabs(v) > 0.4) lp.set(row, j, v);
            }
        }
        LpSolution sol = lp_solve(lp);
        if (sol.status != LpStatus::optimal) continue;
        ++solved;
        // duality: obj = sum dual_i rhs_i (all variable bounds are [0, inf))
        double dual_obj = 0.0;
        for (int i = 0; i < m; ++i) dual_obj += sol.dual[i] * lp.rhs[i];
        CHECK(sol.objective == doctest::Approx(dual_obj).epsilon(1e-6));
        // dual signs: minimisation, '>=' rows non-negative, '<=' rows non-positive
        for (int i = 0; i < m; ++i) {
            if (lp.sense[i] == 'G') CHECK(sol.dual[i] >= -1e-7);
            if (lp.sense[i] == 'L') CHECK(sol.dual[i] <= 1e-7);
        }
        // primal feasibility
        std::vector<double> lhs(m, 0.0);
        for (const auto& e : lp.entries) lhs[e.row] += e.value * sol.primal[e.col];
        for (int i = 0; i < m; ++i) {
            if (lp.sense[i] == 'G') CHECK(lhs[i] >= lp.rhs[i] - 1e-6);
            if (lp.sense[i] == 'L') CHECK(lhs[i] <= lp.rhs[i] + 1e-6);
        }
    }
    CHECK(solved > 50);  // a healthy share must be bounded and feasible
}

TEST_CASE("mip basics") {
    SUBCASE("LP-integral instance equals the relaxation") {
        LinearProgram lp;
        lp.maximize = true;
        int x = lp.add_var(1.0, 0.0, 4.0, true);
        int row = lp.add_row('L', 4.0);
        lp.set(row, x, 1.0);
        MipSolution mip = mip_solve(lp);
        REQUIRE(mip.status == MipStatus::optimal);
        CHECK(mip.objective == doctest::Approx(lp_solve(lp).objective));
    }
    SUBCASE("small knapsack: max 5x+4y, 3x+2y <= 4, binary") {
        LinearProgram lp;
        lp.maximize = true;
        int x = lp.add_var(5.0, 0.0, 1.0, true);
        int y = lp.add_var(4.0, 0.0, 1.0, true);
        int row = lp.add_row('L', 4.0);
        lp.set(row, x, 3.0);
        lp.set(row, y, 2.0);
        MipSolution mip = mip_solve(lp);
        REQUIRE(mip.status == MipStatus::optimal);
        CHECK(mip.objective == doctest::Approx(5.0));
        CHECK(mip.values[x] == doctest::Approx(1.0));
        CHECK(mip.values[y] == doctest::Approx(0.0));
    }
    SUBCASE("infeasible integer program") {
        LinearProgram lp;
        int x = lp.add_var(1.0, 0.0, 10.0, true);
        int r1 = lp.add_row('G', 0.4);
        lp.set(r1, x, 1.0);
        int r2 = lp.add_row('L', 0.6);
        lp.set(r2, x, 1.0);
        CHECK(mip_solve(lp).status == MipStatus::infeasible);
    }
}

TEST_CASE("random MIPs match exhaustive enumeration") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 3)(rng);
        const int m = std::uniform_int_distribution<int>(1, 4)(rng);
        const int ub = 4;
        LinearProgram lp;
        lp.maximize = std::bernoulli_distribution(0.5)(rng);
        for (int j = 0; j < n; ++j)
            lp.add_var(std::uniform_real_distribution<double>(-3, 3)(rng), 0.0, ub, true);
        std::vector<std::vector<double>> rows(m, std::vector<double>(n));
        for (int i = 0; i < m; ++i) {
            char sense = "LG"[std::uniform_int_distribution<int>(0, 1)(rng)];
            double rhs = std::uniform_real_distribution<double>(-2, 10)(rng);
            int row = lp.add_row(sense, rhs);
            for (int j = 0; j < n; ++j) {
                rows[i][j] = std::uniform_real_distribution<double>(-2, 3)(rng);
                lp.set(row, j, rows[i][j]);
            }
        }
        // exhaustive oracle over the (ub+1)^n lattice
        double best = lp.maximize ? -kInf : kInf;
        std::vector<int> x(n, 0);
        bool any = false;
        while (true) {
            bool ok = true;
            for (int i = 0; i < m && ok; ++i) {
                double lhs = 0.0;
                for (int j = 0; j < n; ++j) lhs += rows[i][j] * x[j];
                ok = lp.sense[i] == 'L' ? lhs <= lp.rhs[i] + 1e-9 : lhs >= lp.rhs[i] - 1e-9;
            }
            if (ok) {
                any = true;
                double obj = 0.0;
                for (int j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
                best = lp.maximize ? std::max(best, obj) : std::min(best, obj);
            }
            int d = n - 1;
            while (d >= 0 && x[d] == ub) x[d--] = 0;
            if (d < 0) break;
            ++x[d];
        }
        MipSolution mip = mip_solve(lp);
        if (!any) {
            CHECK(mip.status == MipStatus::infeasible);
        } else {
            REQUIRE(mip.status == MipStatus::optimal);
            CHECK(mip.objective == doctest::Approx(best).epsilon(1e-6));
        }
    }
}
