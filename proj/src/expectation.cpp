#include "drplan/expectation.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace drplan {

namespace {

std::atomic<long long> g_renorm_count{0};

constexpr double kAtomFlush = 1e-300;
constexpr double kDriftTol = 1e-12;

}  // namespace

long long convolution_renormalisations() { return g_renorm_count.load(); }

double pairwise_sum(std::int64_t n, const std::function<double(std::int64_t)>& term) {
    // blocks of 128 summed directly, halves combined recursively
    std::function<double(std::int64_t, std::int64_t)> rec = [&](std::int64_t lo,
                                                                std::int64_t hi) -> double {
        if (hi - lo <= 128) {
            double s = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) s += term(i);
            return s;
        }
        std::int64_t mid = lo + (hi - lo) / 2;
        return rec(lo, mid) + rec(mid, hi);
    };
    return n > 0 ? rec(0, n) : 0.0;
}

double expected_cost_enumeration(const Instance& instance, const DayAggregates& agg,
                                 std::span<const double> p, const IntakeSpace& space,
                                 std::int64_t enumeration_cap) {
    if (space.size() > enumeration_cap)
        throw std::invalid_argument(
            "expected_cost_enumeration: intake space exceeds the enumeration cap; "
            "use the convolution engine");
    const int L = instance.horizon;
    std::vector<std::vector<double>> tables(L);
    for (int d = 0; d < L; ++d) tables[d] = binomial_pmf_table(instance.intake_max[d], p[d]);
    std::vector<int> intake(L);
    return pairwise_sum(space.size(), [&](std::int64_t j) {
        space.decode(j, intake);
        double w = 1.0;
        for (int d = 0; d < L; ++d) w *= tables[d][intake[d]];
        if (w == 0.0) return 0.0;
        return w * rollover_cost_unchecked(instance, agg, intake);
    });
}

double convolved_cost(const Instance& instance, const DayAggregates& agg,
                      std::span<const std::vector<double>> day_tables,
                      std::vector<double>& buf_a, std::vector<double>& buf_b,
                      std::vector<double>* expected_out) {
    const int L = instance.horizon;
    if (expected_out) expected_out->assign(L, 0.0);

    // support bound per day from the recursion at i = i_max
    // (monotone in intake, so this dominates every realisation)
    double cost = 0.0;
    buf_a.assign(1, 1.0);  // law of R_0 = 0
    long long prev_ub = 0;
    for (int d = 0; d < L; ++d) {
        const long long shift = agg.pulled_in[d] - (instance.capacity[d] - instance.workstack[d] +
                                                    agg.pulled_out[d]);
        const int imax = instance.intake_max[d];
        const long long ub = std::max<long long>(0, prev_ub + imax + shift);
        buf_b.assign(static_cast<size_t>(ub) + 1, 0.0);
        const std::vector<double>& pmf = day_tables[d];
        for (long long r = 0; r <= prev_ub; ++r) {
            double mass = buf_a[r];
            if (mass < kAtomFlush) continue;
            const long long base = r + shift;
            for (int i = 0; i <= imax; ++i) {
                long long next = base + i;
                buf_b[next > 0 ? next : 0] += mass * pmf[i];
            }
        }
        double total = 0.0;
        for (double v : buf_b) total += v;
        if (std::fabs(total - 1.0) > kDriftTol && total > 0.0) {
            g_renorm_count.fetch_add(1, std::memory_order_relaxed);
            for (double& v : buf_b) v /= total;
        }
        double mean = 0.0;
        for (long long r = 1; r <= ub; ++r) mean += static_cast<double>(r) * buf_b[r];
        if (expected_out) (*expected_out)[d] = mean;
        cost += instance.rollover_cost[d] * mean;
        buf_a.swap(buf_b);
        prev_ub = ub;
    }
    return cost;
}

CostProfile expected_cost_convolution(const Instance& instance, const DayAggregates& agg,
                                      std::span<const double> p) {
    const int L = instance.horizon;
    std::vector<std::vector<double>> tables(L);
    for (int d = 0; d < L; ++d) tables[d] = binomial_pmf_table(instance.intake_max[d], p[d]);
    CostProfile profile;
    std::vector<double> a, b;
    profile.total = convolved_cost(instance, agg, tables, a, b, &profile.expected_rollover);
    return profile;
}

RolloverDistribution rollover_distribution(const Instance& instance, const DayAggregates& agg,
                                           std::span<const double> p) {
    const int L = instance.horizon;
    std::vector<std::vector<double>> tables(L);
    for (int d = 0; d < L; ++d) tables[d] = binomial_pmf_table(instance.intake_max[d], p[d]);

    RolloverDistribution dist;
    dist.day_pmf.resize(L);
    std::vector<double> a(1, 1.0), b;
    long long prev_ub = 0;
    for (int d = 0; d < L; ++d) {
        const long long shift = agg.pulled_in[d] - (instance.capacity[d] - instance.workstack[d] +
                                                    agg.pulled_out[d]);
        const int imax = instance.intake_max[d];
        const long long ub = std::max<long long>(0, prev_ub + imax + shift);
        b.assign(static_cast<size_t>(ub) + 1, 0.0);
        for (long long r = 0; r <= prev_ub; ++r) {
            double mass = a[r];
            if (mass < kAtomFlush) continue;
            const long long base = r + shift;
            for (int i = 0; i <= imax; ++i) {
                long long next = base + i;
                b[next > 0 ? next : 0] += mass * tables[d][i];
            }
        }
        double total = 0.0;
        for (double v : b) total += v;
        if (std::fabs(total - 1.0) > kDriftTol && total > 0.0) {
            g_renorm_count.fetch_add(1, std::memory_order_relaxed);
            for (double& v : b) v /= total;
        }
        dist.day_pmf[d] = b;
        a = b;
        prev_ub = ub;
    }
    return dist;
}

double expected_cost_reduced(const Instance& instance, const DayAggregates& agg,
                             std::span<const double> p, const IntakeSpace& space,
                             const ReducedIntakeSet& reduced) {
    const int L = instance.horizon;
    std::vector<std::vector<double>> tables(L);
    for (int d = 0; d < L; ++d) tables[d] = binomial_pmf_table(instance.intake_max[d], p[d]);
    std::vector<int> intake(L);
    return pairwise_sum(static_cast<std::int64_t>(reduced.retained.size()), [&](std::int64_t k) {
        space.decode(reduced.retained[k], intake);
        double w = 1.0;
        for (int d = 0; d < L; ++d) w *= tables[d][intake[d]];
        if (w == 0.0) return 0.0;
        return w * rollover_cost_unchecked(instance, agg, intake);
    });
}

}  // namespace drplan
