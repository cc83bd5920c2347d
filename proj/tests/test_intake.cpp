#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "drplan/intake.hpp"

using namespace drplan;

TEST_CASE("space cardinality reproduces the published set sizes") {
    CHECK(space_cardinality(std::vector<int>{1, 6, 6, 1, 1}) == 392);
    CHECK(space_cardinality(std::vector<int>{1, 3, 3, 3, 3}) == 512);
    CHECK(space_cardinality(std::vector<int>{2, 2, 2, 6, 2}) == 567);
    CHECK(space_cardinality(std::vector<int>{2, 2, 8, 8, 2}) == 2187);
    CHECK(space_cardinality(std::vector<int>{5, 5, 1, 5, 5}) == 2592);
    CHECK(space_cardinality(std::vector<int>{1, 7, 7, 7, 7}) == 8192);
    CHECK(space_cardinality(std::vector<int>{9, 9, 1, 9, 9}) == 20000);
    CHECK(space_cardinality(std::vector<int>{0, 0, 0}) == 1);
    CHECK_THROWS_AS(space_cardinality(std::vector<int>(64, 1000)), std::overflow_error);
}

TEST_CASE("intake space index round-trips") {
    IntakeSpace space({2, 3, 1});
    REQUIRE(space.size() == 24);
    std::vector<int> buf(3);
    for (std::int64_t j = 0; j < space.size(); ++j) {
        space.decode(j, buf);
        CHECK(space.encode(buf) == j);
    }
    // lexicographic order, day 1 most significant
    space.decode(0, buf);
    CHECK(buf == std::vector<int>{0, 0, 0});
    space.decode(23, buf);
    CHECK(buf == std::vector<int>{2, 3, 1});
    space.decode(8, buf);
    CHECK(buf == std::vector<int>{1, 0, 0});
}

TEST_CASE("binomial pmf") {
    CHECK(binomial_pmf(2, 0.5, 1) == doctest::Approx(0.5));
    CHECK(binomial_pmf(20, 0.75, 20) == doctest::Approx(std::pow(0.75, 20)).epsilon(1e-12));
    CHECK(binomial_pmf(20, 0.75, 20) == doctest::Approx(3.1712e-3).epsilon(1e-4));
    SUBCASE("degenerate p") {
        CHECK(binomial_pmf(5, 0.0, 0) == 1.0);
        CHECK(binomial_pmf(5, 0.0, 3) == 0.0);
        CHECK(binomial_pmf(5, 1.0, 5) == 1.0);
        CHECK(binomial_pmf(5, 1.0, 4) == 0.0);
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(binomial_pmf(3, 0.5, 4), std::invalid_argument);
        CHECK_THROWS_AS(binomial_pmf(3, 1.5, 1), std::invalid_argument);
    }
    SUBCASE("table matches the pointwise recurrence and sums to one") {
        std::mt19937 rng(3);
        for (int t = 0; t < 50; ++t) {
            int n = std::uniform_int_distribution<int>(0, 40)(rng);
            double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            auto table = binomial_pmf_table(n, p);
            double sum = 0.0;
            for (int k = 0; k <= n; ++k) {
                CHECK(table[k] == doctest::Approx(binomial_pmf(n, p, k)).epsilon(1e-12));
                sum += table[k];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("joint pmf") {
    std::vector<int> imax{2, 3};
    SUBCASE("single day reduces to the binomial") {
        std::vector<int> one{4};
        CHECK(joint_pmf(std::vector<double>{0.3}, one, std::vector<int>{2}) ==
              doctest::Approx(binomial_pmf(4, 0.3, 2)));
    }
    SUBCASE("point mass at i_max when p = 1") {
        CHECK(joint_pmf(std::vector<double>{1.0, 1.0}, imax, std::vector<int>{2, 3}) == 1.0);
    }
    SUBCASE("normalisation over the full space") {
        std::mt19937 rng(9);
        for (int t = 0; t < 20; ++t) {
            std::vector<int> im{std::uniform_int_distribution<int>(0, 5)(rng),
                                std::uniform_int_distribution<int>(0, 5)(rng),
                                std::uniform_int_distribution<int>(0, 5)(rng)};
            std::vector<double> p{std::uniform_real_distribution<double>(0, 1)(rng),
                                  std::uniform_real_distribution<double>(0, 1)(rng),
                                  std::uniform_real_distribution<double>(0, 1)(rng)};
            IntakeSpace space(im);
            double total = 0.0;
            space.for_each([&](std::int64_t, std::span<const int> intake) {
                total += joint_pmf(p, im, intake);
            });
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("MLE of success probabilities") {
    std::vector<int> imax{4, 8};
    SUBCASE("all-zero samples give zero") {
        std::vector<std::vector<int>> samples(3, std::vector<int>{0, 0});
        auto p = mle_success_probs(samples, imax);
        CHECK(p == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("samples at three quarters of the maximum") {
        std::vector<std::vector<int>> samples{{3, 6}, {3, 6}};
        auto p = mle_success_probs(samples, imax);
        CHECK(p[0] == doctest::Approx(0.75));
        CHECK(p[1] == doctest::Approx(0.75));
    }
    SUBCASE("one sample at the maximum gives one") {
        std::vector<std::vector<int>> samples{{4, 8}};
        auto p = mle_success_probs(samples, imax);
        CHECK(p == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("degenerate day maps to zero") {
        std::vector<std::vector<int>> samples{{2, 0}};
        auto p = mle_success_probs(samples, std::vector<int>{4, 0});
        CHECK(p[1] == 0.0);
    }
    CHECK_THROWS_AS(mle_success_probs({}, imax), std::invalid_argument);
}

TEST_CASE("chi-square quantile") {
    // reference values computed independently by inverting the chi-square
    // CDF at high precision
    CHECK(chi_square_quantile(2, 0.995) == doctest::Approx(10.596634733).epsilon(1e-8));
    CHECK(chi_square_quantile(5, 0.95) == doctest::Approx(11.070497694).epsilon(1e-8));
    CHECK(chi_square_quantile(1, 0.5) == doctest::Approx(0.4549364231).epsilon(1e-8));
    CHECK_THROWS_AS(chi_square_quantile(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(chi_square_quantile(2, 1.0), std::invalid_argument);
}

TEST_CASE("base grid") {
    BaseGrid grid = build_base_grid(1, 2);
    CHECK(grid.member_count() == 4);
    CHECK(grid.member(0) == std::vector<double>{0.0, 0.0});
    CHECK(grid.member(3) == std::vector<double>{1.0, 1.0});

    BaseGrid fine = build_base_grid(100, 2);
    CHECK(fine.member_count() == 101 * 101);
    SUBCASE("members are exact multiples of the step") {
        BaseGrid g = build_base_grid(4, 3);
        g.for_each([&](std::span<const double> p) {
            for (double v : p) {
                double scaled = v * 4;
                CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-15));
            }
        });
    }
}

namespace {

ParametricAmbiguitySet worked_confidence_set() {
    std::vector<double> p_hat{0.75, 0.75};
    std::vector<int> imax{20, 20};
    return build_confidence_set(p_hat, 10, imax, 0.005, 100);
}

}  // namespace

TEST_CASE("confidence set reproduces the worked two-day construction") {
    ParametricAmbiguitySet theta = worked_confidence_set();
    CHECK(theta.size() == 305);
    double max_p1 = 0.0, max_p2 = 0.0;
    for (const auto& m : theta.members()) {
        max_p1 = std::max(max_p1, m[0]);
        max_p2 = std::max(max_p2, m[1]);
    }
    CHECK(max_p1 == doctest::Approx(0.84));
    CHECK(max_p2 == doctest::Approx(0.84));
    CHECK_FALSE(theta.meta().nearest_fallback);
}

TEST_CASE("confidence set pruning equals naive grid filtering") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        int L = std::uniform_int_distribution<int>(1, 3)(rng);
        int n_probs = std::uniform_int_distribution<int>(3, 8)(rng);
        int N = std::uniform_int_distribution<int>(2, 30)(rng);
        std::vector<int> imax(L);
        std::vector<double> p_hat(L);
        for (int d = 0; d < L; ++d) {
            imax[d] = std::uniform_int_distribution<int>(1, 8)(rng);
            p_hat[d] = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
        }
        ParametricAmbiguitySet theta = build_confidence_set(p_hat, N, imax, 0.05, n_probs);

        // naive full-grid filter
        double thr = chi_square_quantile(L, 0.95);
        std::vector<std::vector<double>> expect;
        BaseGrid grid = build_base_grid(n_probs, L);
        grid.for_each([&](std::span<const double> p) {
            double acc = 0.0;
            for (int d = 0; d < L; ++d)
                acc += N * imax[d] * (p_hat[d] - p[d]) * (p_hat[d] - p[d]) /
                       (p_hat[d] * (1.0 - p_hat[d]));
            if (acc <= thr) expect.emplace_back(p.begin(), p.end());
        });
        if (expect.empty()) {
            CHECK(theta.meta().nearest_fallback);
            continue;
        }
        REQUIRE(theta.size() == expect.size());
        for (size_t k = 0; k < expect.size(); ++k) CHECK(theta.member(k) == expect[k]);
    }
}

TEST_CASE("confidence set edge cases") {
    std::vector<int> imax{20, 20};
    SUBCASE("boundary MLE is rejected, clamp fixes it") {
        std::vector<double> p_hat{0.0, 0.5};
        CHECK_THROWS_AS(build_confidence_set(p_hat, 10, imax, 0.05, 10), std::invalid_argument);
        auto clamped = clamp_mle(p_hat, 10, imax);
        CHECK(clamped[0] == doctest::Approx(1.0 / 400));
        CHECK_NOTHROW(build_confidence_set(clamped, 10, imax, 0.05, 10));
    }
    SUBCASE("huge N collapses to the grid point nearest the anchor") {
        std::vector<double> p_hat{0.73, 0.73};
        ParametricAmbiguitySet theta = build_confidence_set(p_hat, 2'000'000, imax, 0.05, 10);
        REQUIRE(theta.size() == 1);
        CHECK(theta.member(0) == std::vector<double>{0.7, 0.7});
        CHECK(theta.meta().nearest_fallback);
    }
    SUBCASE("every member of a (non-fallback) set is a base grid point") {
        ParametricAmbiguitySet theta = worked_confidence_set();
        for (const auto& m : theta.members())
            for (double v : m) CHECK(std::round(v * 100) == doctest::Approx(v * 100));
    }
}

TEST_CASE("extreme set") {
    SUBCASE("worked two-day construction") {
        ParametricAmbiguitySet ext = build_extreme_set(worked_confidence_set());
        REQUIRE(ext.size() == 2);
        CHECK(ext.member(0) == std::vector<double>{0.79, 0.84});
        CHECK(ext.member(1) == std::vector<double>{0.84, 0.79});
    }
    SUBCASE("singleton set is its own extreme set") {
        ParametricAmbiguitySet one({{0.4, 0.6}}, {});
        ParametricAmbiguitySet ext = build_extreme_set(one);
        REQUIRE(ext.size() == 1);
        CHECK(ext.member(0) == std::vector<double>{0.4, 0.6});
    }
    SUBCASE("subset and per-coordinate maximality over random sets") {
        std::mt19937 rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            int L = std::uniform_int_distribution<int>(1, 4)(rng);
            int count = std::uniform_int_distribution<int>(1, 30)(rng);
            std::vector<std::vector<double>> members;
            for (int i = 0; i < count; ++i) {
                std::vector<double> p(L);
                for (double& v : p)
                    v = std::uniform_int_distribution<int>(0, 10)(rng) / 10.0;
                members.push_back(std::move(p));
            }
            ParametricAmbiguitySet theta(std::move(members), {});
            ParametricAmbiguitySet ext = build_extreme_set(theta);
            std::set<std::vector<double>> all(theta.members().begin(), theta.members().end());
            for (const auto& m : ext.members()) CHECK(all.count(m) == 1);
            // every extreme member attains the maximum of some coordinate
            for (const auto& m : ext.members()) {
                bool attains = false;
                for (int d = 0; d < L && !attains; ++d) {
                    double pmax = 0.0;
                    for (const auto& q : theta.members()) pmax = std::max(pmax, q[d]);
                    attains = m[d] == pmax;
                }
                CHECK(attains);
            }
            // with all-distinct argmaxes the set has at most L members; in
            // general ties only add members that are also coordinate-maximal
            CHECK(ext.size() <= theta.size());
        }
    }
}

TEST_CASE("reduced intake set") {
    SUBCASE("worked two-day reduction keeps 150 of 441") {
        ParametricAmbiguitySet theta = worked_confidence_set();
        ReducedIntakeSet reduced = reduce_intake_set(theta, std::vector<int>{20, 20}, 1e-3);
        CHECK(reduced.retained.size() == 150);
    }
    SUBCASE("beta = 0 keeps everything reachable") {
        ParametricAmbiguitySet theta({{0.4, 0.5}}, {});
        ReducedIntakeSet reduced = reduce_intake_set(theta, std::vector<int>{3, 3}, 0.0);
        CHECK(reduced.retained.size() == 16);
    }
    SUBCASE("retained set grows as beta shrinks") {
        ParametricAmbiguitySet theta = worked_confidence_set();
        std::vector<int> imax{20, 20};
        auto r1 = reduce_intake_set(theta, imax, 3e-3);
        auto r2 = reduce_intake_set(theta, imax, 1e-3);
        auto r3 = reduce_intake_set(theta, imax, 1e-4);
        CHECK(r1.retained.size() <= r2.retained.size());
        CHECK(r2.retained.size() <= r3.retained.size());
        // inclusion, not just cardinality
        CHECK(std::includes(r2.retained.begin(), r2.retained.end(), r1.retained.begin(),
                            r1.retained.end()));
        CHECK(std::includes(r3.retained.begin(), r3.retained.end(), r2.retained.begin(),
                            r2.retained.end()));
    }
    SUBCASE("beta too large empties the set") {
        ParametricAmbiguitySet theta({{0.5, 0.5}}, {});
        CHECK_THROWS_AS(reduce_intake_set(theta, std::vector<int>{20, 20}, 0.9),
                        std::invalid_argument);
    }
}
