#include "drplan/nonparametric.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "drplan/expectation.hpp"

namespace drplan {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr double kResidualTol = 1e-9;

}  // namespace

double compute_rho(int sample_count, int dof, double alpha, double phi_second_deriv_at_1) {
    if (sample_count < 1) throw std::invalid_argument("compute_rho: need N >= 1");
    return phi_second_deriv_at_1 / (2.0 * sample_count) * chi_square_quantile(dof, 1.0 - alpha);
}

double mod_chi2_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("mod_chi2_divergence: size mismatch");
    double acc = 0.0;
    for (size_t j = 0; j < p.size(); ++j) {
        const double diff = p[j] - q[j];
        if (diff == 0.0) continue;
        if (q[j] <= 0.0)
            throw std::invalid_argument("mod_chi2_divergence: P charges a Q-null scenario");
        acc += diff * diff / q[j];
    }
    return acc;
}

double conjugate_mod_chi2(double s) {
    const double t = std::max(s / 2.0 + 1.0, 0.0);
    return t * t - 1.0;
}

bool verify_cone_encoding(double lambda, double u, double z) {
    if (lambda < 0.0) throw std::invalid_argument("verify_cone_encoding: lambda must be >= 0");
    const double lhs = std::sqrt(4.0 * z * z + (lambda - u) * (lambda - u));
    return lhs <= lambda + u + 1e-12;
}

void NonparametricAmbiguity::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("np ambiguity: radius must be > 0");
    double total = 0.0;
    for (double w : nominal) {
        if (w < 0.0) throw std::invalid_argument("np ambiguity: negative nominal weight");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-10)
        throw std::invalid_argument("np ambiguity: nominal weights must sum to 1");
}

NonparametricAmbiguity make_binomial_nominal(const Instance& instance,
                                             std::span<const double> p_hat, double rho,
                                             std::int64_t max_scenarios) {
    instance.validate();
    IntakeSpace space(instance.intake_max);
    if (space.size() > max_scenarios)
        throw std::invalid_argument(
            "make_binomial_nominal: intake space too large for the explicit joint "
            "representation");
    std::vector<std::vector<double>> tables(instance.horizon);
    for (int d = 0; d < instance.horizon; ++d)
        tables[d] = binomial_pmf_table(instance.intake_max[d], p_hat[d]);
    NonparametricAmbiguity amb;
    amb.radius = rho;
    amb.nominal.resize(space.size());
    space.for_each([&](std::int64_t j, std::span<const int> intake) {
        double w = 1.0;
        for (int d = 0; d < instance.horizon; ++d) w *= tables[d][intake[d]];
        amb.nominal[j] = w;
    });
    amb.validate();
    return amb;
}

namespace {

// Normalisation residual g(nu) = sum Q_j max(1 + (c_j - nu)/(2 lambda), 0) - 1,
// strictly decreasing in nu wherever some term is active.
double solve_nu(std::span<const double> costs, std::span<const double> q, double lambda,
                double c_min, double c_max) {
    double lo = c_min - 2.0 * lambda;  // g > 0 here
    double hi = c_max + 2.0 * lambda;  // g < 0 here (all terms vanish)
    for (int it = 0; it < 200; ++it) {
        const double nu = 0.5 * (lo + hi);
        double g = -1.0;
        for (size_t j = 0; j < costs.size(); ++j) {
            const double t = 1.0 + (costs[j] - nu) / (2.0 * lambda);
            if (t > 0.0) g += q[j] * t;
        }
        if (g > 0.0)
            lo = nu;
        else
            hi = nu;
        if (hi - lo < 1e-15 * std::max(1.0, std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

double divergence_at(std::span<const double> costs, std::span<const double> q, double lambda,
                     double nu) {
    double d = 0.0;
    for (size_t j = 0; j < costs.size(); ++j) {
        const double t = std::max(1.0 + (costs[j] - nu) / (2.0 * lambda), 0.0);
        const double diff = t - 1.0;
        d += q[j] * diff * diff;
    }
    return d;
}

}  // namespace

InnerSolution np_worst_case_distribution(std::span<const double> costs,
                                         const NonparametricAmbiguity& ambiguity) {
    ambiguity.validate();
    const auto& q = ambiguity.nominal;
    if (costs.size() != q.size())
        throw std::invalid_argument("np_worst_case_distribution: cost/nominal size mismatch");
    const double rho = ambiguity.radius;
    const size_t n = costs.size();

    double c_min = std::numeric_limits<double>::infinity();
    double c_max = -std::numeric_limits<double>::infinity();
    for (double c : costs) {
        if (!std::isfinite(c)) throw std::invalid_argument("np inner: non-finite cost");
        c_min = std::min(c_min, c);
        c_max = std::max(c_max, c);
    }

    InnerSolution sol;
    if (c_max - c_min <= 1e-10) {
        // objective constant over the ball
        sol.worst.assign(q.begin(), q.end());
        sol.lambda = 0.0;
        sol.nu = c_max;
        sol.primal_value = sol.dual_value = c_max;
        sol.divergence = 0.0;
        sol.boundary = false;
        return sol;
    }

    // interior regime: if concentrating the nominal on the argmax scenarios
    // stays inside the ball, the vertex value c_max is attainable
    double q_arg = 0.0;
    for (size_t j = 0; j < n; ++j)
        if (costs[j] >= c_max - 1e-12) q_arg += q[j];
    if (q_arg > 0.0 && (1.0 / q_arg - 1.0) <= rho) {
        sol.worst.assign(n, 0.0);
        for (size_t j = 0; j < n; ++j)
            if (costs[j] >= c_max - 1e-12) sol.worst[j] = q[j] / q_arg;
        sol.lambda = 0.0;
        sol.nu = c_max;
        sol.primal_value = sol.dual_value = c_max;
        sol.divergence = 1.0 / q_arg - 1.0;
        sol.boundary = false;
        return sol;
    }

    // boundary regime: bisection on lambda for d_phi(P*(lambda), Q) = rho
    double inv_q_sum = 0.0;
    for (double w : q)
        if (w > 0.0) inv_q_sum += 1.0 / w;
    double lam_hi = (c_max - c_min) * std::sqrt(inv_q_sum);
    auto div_of = [&](double lambda, double* nu_out) {
        const double nu = solve_nu(costs, q, lambda, c_min, c_max);
        if (nu_out) *nu_out = nu;
        return divergence_at(costs, q, lambda, nu);
    };
    while (div_of(lam_hi, nullptr) >= rho) lam_hi *= 2.0;
    double lam_lo = lam_hi;
    while (div_of(lam_lo, nullptr) <= rho) {
        lam_lo *= 0.5;
        if (lam_lo < 1e-280)
            throw std::runtime_error("np inner: failed to bracket the radius equation");
    }
    double lambda = lam_hi, nu = 0.0;
    for (int it = 0; it < 200; ++it) {
        lambda = 0.5 * (lam_lo + lam_hi);
        const double d = div_of(lambda, &nu);
        if (std::fabs(d - rho) <= kResidualTol * std::max(1.0, rho)) break;
        if (d > rho)
            lam_lo = lambda;
        else
            lam_hi = lambda;
    }
    nu = solve_nu(costs, q, lambda, c_min, c_max);

    sol.lambda = lambda;
    sol.nu = nu;
    sol.worst.resize(n);
    double norm = 0.0;
    for (size_t j = 0; j < n; ++j) {
        const double t = std::max(1.0 + (costs[j] - nu) / (2.0 * lambda), 0.0);
        sol.worst[j] = q[j] * t;
        norm += sol.worst[j];
    }
    // the normalisation residual is already within tolerance; tidy the last
    // few ulps so downstream sums see an exact probability vector
    if (norm > 0.0)
        for (double& w : sol.worst) w /= norm;
    sol.divergence = mod_chi2_divergence(sol.worst, q);

    sol.primal_value = 0.0;
    for (size_t j = 0; j < n; ++j) sol.primal_value += sol.worst[j] * costs[j];
    double conj = 0.0;
    for (size_t j = 0; j < n; ++j)
        conj += q[j] * conjugate_mod_chi2((costs[j] - nu) / lambda);
    sol.dual_value = lambda * rho + nu + lambda * conj;
    if (std::fabs(sol.primal_value - sol.dual_value) > 1e-6 * std::max(1.0, std::fabs(sol.dual_value)))
        throw std::runtime_error("np inner: duality gap above tolerance");
    sol.boundary = true;
    return sol;
}

SolveReport solve_NP(const Instance& instance, const NonparametricAmbiguity& ambiguity,
                     const NpOptions& options) {
    const auto start = Clock::now();
    ambiguity.validate();
    PairSets pairs = feasible_pairs(instance);
    IntakeSpace space(instance.intake_max);
    if (static_cast<std::int64_t>(ambiguity.nominal.size()) != space.size())
        throw std::invalid_argument("solve_NP: nominal length does not match the intake space");

    SolveReport report;
    report.algorithm = "NP";

    std::vector<std::vector<double>> pool{ambiguity.nominal};
    std::vector<JointWeightEvaluator> evals;

    auto rebuild_evals = [&]() {
        evals.clear();
        evals.reserve(pool.size());
        for (size_t i = 0; i < pool.size(); ++i)
            evals.emplace_back(pool[i], &space, "np-pool-" + std::to_string(i));
    };

    EvalWorkspace ws;
    for (int k = 1; k <= options.max_cuts; ++k) {
        rebuild_evals();
        std::vector<const CostEvaluator*> ptrs;
        for (const auto& e : evals) ptrs.push_back(&e);
        MasterSolution master = solve_min_max(instance, pairs, ptrs, options.master);
        report.counters.evaluator_calls += master.evaluator_calls;

        DayAggregates agg = plan_aggregates(instance, pairs, master.plan);
        ws.begin_plan();
        const std::vector<double>& costs = scenario_costs(instance, agg, space, ws);
        InnerSolution inner = np_worst_case_distribution(costs, ambiguity);

        IterationRecord rec;
        rec.iteration = k;
        rec.plan_amount = master.plan.amount;
        rec.master_value = master.objective;
        rec.separated_cost = inner.primal_value;
        report.trace.push_back(std::move(rec));
        report.iterations = k;

        bool repeat = false;
        for (const auto& member : pool) {
            double dist = 0.0;
            for (size_t j = 0; j < member.size(); ++j)
                dist = std::max(dist, std::fabs(member[j] - inner.worst[j]));
            if (dist <= 1e-12) {
                repeat = true;
                break;
            }
        }
        if (inner.primal_value <= master.objective + options.epsilon / 2.0 || repeat) {
            report.plan = master.plan;
            report.worst_distribution = std::move(inner.worst);
            report.objective = inner.primal_value;
            report.converged = true;
            report.stopped_on_repeat = repeat;
            report.wall_ms = elapsed_ms(start);
            return report;
        }
        pool.push_back(std::move(inner.worst));
        report.plan = master.plan;
        report.objective = inner.primal_value;
    }
    report.converged = false;
    report.wall_ms = elapsed_ms(start);
    return report;
}

DistributionSummary distribution_summary(std::span<const double> p, std::span<const double> q,
                                         const IntakeSpace& space, int rounding_dp) {
    if (p.size() != q.size() || static_cast<std::int64_t>(p.size()) != space.size())
        throw std::invalid_argument("distribution_summary: size mismatch");
    DistributionSummary s;
    s.mod_chi2 = mod_chi2_divergence(p, q);

    for (size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) {
            if (q[j] <= 0.0) {
                s.kl_divergence = std::numeric_limits<double>::infinity();
            } else if (std::isfinite(s.kl_divergence)) {
                s.kl_divergence += p[j] * std::log(p[j] / q[j]);
            }
            s.entropy -= p[j] * std::log(p[j]);
        }
    }

    // per-day marginal moments from the joint, totals as sums over days
    const int dims = space.dims();
    std::vector<std::vector<double>> marginal(dims);
    for (int d = 0; d < dims; ++d) marginal[d].assign(space.intake_max()[d] + 1, 0.0);
    space.for_each([&](std::int64_t j, std::span<const int> intake) {
        if (p[j] == 0.0) return;
        for (int d = 0; d < dims; ++d) marginal[d][intake[d]] += p[j];
    });
    for (int d = 0; d < dims; ++d) {
        double mean = 0.0;
        for (size_t v = 0; v < marginal[d].size(); ++v) mean += v * marginal[d][v];
        double m2 = 0.0, m3 = 0.0;
        for (size_t v = 0; v < marginal[d].size(); ++v) {
            const double c = static_cast<double>(v) - mean;
            m2 += marginal[d][v] * c * c;
            m3 += marginal[d][v] * c * c * c;
        }
        s.total_mean += mean;
        s.total_variance += m2;
        if (m2 > 0.0) s.total_skewness += m3 / std::pow(m2, 1.5);
    }

    const double scale = std::pow(10.0, rounding_dp);
    for (size_t j = 0; j < p.size(); ++j) {
        const bool p_pos = std::round(p[j] * scale) > 0.0;
        const bool q_pos = std::round(q[j] * scale) > 0.0;
        if (p_pos && !q_pos) ++s.popped;
        if (!p_pos && q_pos) ++s.suppressed;
    }
    return s;
}

}  // namespace drplan
