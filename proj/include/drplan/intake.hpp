#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drplan/parallel.hpp"

namespace drplan {

/// The finite set of intake vectors {0..i_max_1} x ... x {0..i_max_L}, with a
/// bijective lexicographic index (day 1 most significant).
class IntakeSpace {
  public:
    explicit IntakeSpace(std::vector<int> intake_max);

    std::int64_t size() const { return size_; }
    int dims() const { return static_cast<int>(intake_max_.size()); }
    std::span<const int> intake_max() const { return intake_max_; }

    void decode(std::int64_t index, std::span<int> out) const;
    std::int64_t encode(std::span<const int> intake) const;

    /// Calls fn(index, intake) for every vector in lexicographic order,
    /// reusing one buffer.
    void for_each(const std::function<void(std::int64_t, std::span<const int>)>& fn) const;

  private:
    std::vector<int> intake_max_;
    std::vector<std::int64_t> stride_;
    std::int64_t size_ = 1;
};

/// Product of (i_max + 1) over days. Throws std::overflow_error when the
/// product leaves the int64 range.
std::int64_t space_cardinality(std::span<const int> intake_max);

/// Binomial pmf C(n,k) p^k (1-p)^(n-k) via the multiplicative recurrence from
/// (1-p)^n; exact point masses at p = 0 and p = 1.
double binomial_pmf(int n, double p, int k);

/// Full pmf table over k = 0..n.
std::vector<double> binomial_pmf_table(int n, double p);

/// Product of per-day binomial pmfs (intakes are independent across days).
double joint_pmf(std::span<const double> p, std::span<const int> intake_max,
                 std::span<const int> intake);

/// MLE of the per-day success probabilities from N intake samples:
/// p_hat_t = sum_s i_s[t] / (N * i_max_t), and 0 where i_max_t = 0.
std::vector<double> mle_success_probs(std::span<const std::vector<int>> samples,
                                      std::span<const int> intake_max);

/// Quantile of the chi-square distribution with k degrees of freedom,
/// computed by inverting the regularised incomplete gamma function.
/// Relative error <= 1e-8.
double chi_square_quantile(int dof, double prob);

struct AmbiguityMeta {
    int n_probs = 0;
    int sample_count = 0;  // N
    double alpha = 0.0;
    std::vector<double> p_hat;
    /// True when the confidence inequality admitted no grid point and the set
    /// fell back to the grid point(s) nearest to p_hat.
    bool nearest_fallback = false;
};

/// A finite, materialised collection of success-probability vectors, kept in
/// ascending lexicographic order with no duplicates.
class ParametricAmbiguitySet {
  public:
    ParametricAmbiguitySet() = default;
    ParametricAmbiguitySet(std::vector<std::vector<double>> members, AmbiguityMeta meta);

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const std::vector<double>& member(std::size_t k) const { return members_[k]; }
    const std::vector<std::vector<double>>& members() const { return members_; }
    const AmbiguityMeta& meta() const { return meta_; }

    bool contains(std::span<const double> p) const;

  private:
    std::vector<std::vector<double>> members_;
    AmbiguityMeta meta_;
};

/// The full discretisation {j/n_probs : j=0..n_probs}^L. Grid points are
/// never materialised up front; iterate or index on demand.
class BaseGrid {
  public:
    BaseGrid(int n_probs, int dims);

    std::int64_t member_count() const { return count_; }
    int n_probs() const { return n_probs_; }
    int dims() const { return dims_; }

    std::vector<double> member(std::int64_t index) const;
    void for_each(const std::function<void(std::span<const double>)>& fn) const;

  private:
    int n_probs_;
    int dims_;
    std::int64_t count_;
};

BaseGrid build_base_grid(int n_probs, int dims);

/// Grid points of {j/n_probs}^L inside the confidence ellipsoid
///   sum_t N i_max_t (p_hat_t - p_t)^2 / (p_hat_t (1 - p_hat_t)) <= chi2_{L,1-alpha}.
/// Enumeration prunes each coordinate to the interval where its own term
/// stays below the threshold. If no grid point qualifies, returns the grid
/// point(s) minimising the weighted distance to p_hat and flags the metadata
/// (the inequality-defined set shrinks to empty as N grows; the nearest grid
/// point is its natural limit).
/// Throws std::invalid_argument when some p_hat_t is 0 or 1 with i_max_t > 0;
/// callers are expected to clamp boundary MLEs first.
ParametricAmbiguitySet build_confidence_set(std::span<const double> p_hat, int sample_count,
                                            std::span<const int> intake_max, double alpha,
                                            int n_probs,
                                            ExecPolicy policy = ExecPolicy::serial);

/// Clamp an MLE into the open interval used by build_confidence_set:
/// [1/(2 N i_max), 1 - 1/(2 N i_max)] per day (days with i_max = 0 are left
/// untouched; their confidence term is dropped).
std::vector<double> clamp_mle(std::span<const double> p_hat, int sample_count,
                              std::span<const int> intake_max);

/// Extreme members: for each day t, the members attaining max p_t, filtered to
/// those maximising the coordinate sum, union over days (ties kept).
ParametricAmbiguitySet build_extreme_set(const ParametricAmbiguitySet& theta);

/// Intakes retained by the approximate-objective reduction: those whose
/// best-case probability over theta exceeds beta.
struct ReducedIntakeSet {
    double beta = 0.0;
    std::vector<std::int64_t> retained;  // indices into the IntakeSpace, ascending
};

/// Throws std::invalid_argument when nothing survives (beta too large).
ReducedIntakeSet reduce_intake_set(const ParametricAmbiguitySet& theta,
                                   std::span<const int> intake_max, double beta,
                                   ExecPolicy policy = ExecPolicy::serial);

}  // namespace drplan
