#pragma once

#include <span>
#include <vector>

#include "drplan/intake.hpp"
#include "drplan/parametric.hpp"
#include "drplan/planning.hpp"

namespace drplan {

/// Divergence-ball radius phi''(1)/(2N) * chi2_{k,1-alpha}; the modified
/// chi-square has phi''(1) = 2.
double compute_rho(int sample_count, int dof, double alpha, double phi_second_deriv_at_1 = 2.0);

/// Modified chi-square distance sum (P_j - Q_j)^2 / Q_j. Requires Q_j > 0
/// wherever P_j > 0.
double mod_chi2_divergence(std::span<const double> p, std::span<const double> q);

/// Conjugate of the modified chi-square divergence function:
/// max(s/2 + 1, 0)^2 - 1.
double conjugate_mod_chi2(double s);

/// True iff sqrt(4 z^2 + (lambda - u)^2) <= lambda + u, the conic form of
/// lambda u >= z^2 with lambda + u >= 0.
bool verify_cone_encoding(double lambda, double u, double z);

/// A modified-chi-square ball of joint distributions around a nominal Q.
struct NonparametricAmbiguity {
    std::vector<double> nominal;  // Q, one weight per intake of the space
    double radius = 0.0;          // rho

    void validate() const;
};

/// Q as the joint binomial at p_hat over the instance's intake space.
/// Refuses spaces beyond `max_scenarios` (default 1e5); the explicit joint
/// representation is a desk-scale tool.
NonparametricAmbiguity make_binomial_nominal(const Instance& instance,
                                             std::span<const double> p_hat, double rho,
                                             std::int64_t max_scenarios = 100'000);

struct InnerSolution {
    std::vector<double> worst;  // P*
    double lambda = 0.0;
    double nu = 0.0;
    double primal_value = 0.0;  // sum P*_j c_j
    double dual_value = 0.0;    // lambda rho + nu + lambda sum Q_j phi*(s_j)
    double divergence = 0.0;    // d_phi(P*, Q)
    bool boundary = true;       // false in the lambda* = 0 regime
};

/// Worst case of a linear objective over the ball: solves the two
/// stationarity conditions (normalisation of P* and divergence at the
/// radius) by nested one-dimensional root finding, then checks strong
/// duality. P*_j = Q_j max(1 + s_j/2, 0) with s_j = (c_j - nu)/lambda.
InnerSolution np_worst_case_distribution(std::span<const double> costs,
                                         const NonparametricAmbiguity& ambiguity);

struct NpOptions {
    double epsilon = 1e-4;
    int max_cuts = 50;
    MinMaxOptions master;
};

/// Outer minimisation by a cut loop: master over a finite pool of explicit
/// distributions (initially {Q}), separation by the analytic inner solver.
/// Objective-equivalent to the conic reformulation by strong duality.
SolveReport solve_NP(const Instance& instance, const NonparametricAmbiguity& ambiguity,
                     const NpOptions& options = {});

struct DistributionSummary {
    double mod_chi2 = 0.0;
    double kl_divergence = 0.0;
    double entropy = 0.0;
    double total_mean = 0.0;
    double total_variance = 0.0;
    double total_skewness = 0.0;  // sum of per-day standardised third moments
    long long popped = 0;         // P > 0 where Q = 0, after rounding
    long long suppressed = 0;     // P = 0 where Q > 0, after rounding
};

DistributionSummary distribution_summary(std::span<const double> p, std::span<const double> q,
                                         const IntakeSpace& space, int rounding_dp = 6);

}  // namespace drplan
