#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drplan/expectation.hpp"
#include "drplan/intake.hpp"
#include "drplan/planning.hpp"

namespace drplan {

/// Per-solve cache of binomial pmf table sets, keyed by the success
/// probability vector. One "table set" is the L per-day tables for one
/// distribution; the build count is the hardware-independent cost counter the
/// timing claims rest on.
class PmfTableCache {
  public:
    explicit PmfTableCache(std::vector<int> intake_max) : intake_max_(std::move(intake_max)) {}

    const std::vector<std::vector<double>>& tables(const std::vector<double>& p);
    long long table_sets_built() const { return builds_; }

  private:
    std::vector<int> intake_max_;
    std::map<std::vector<double>, std::vector<std::vector<double>>> cache_;
    long long builds_ = 0;
};

/// Scratch space reused across cost evaluations. Scenario-cost vectors are
/// memoised per plan; begin_plan() invalidates them.
struct EvalWorkspace {
    std::vector<double> conv_a, conv_b;
    std::vector<int> intake_buf;
    const void* full_key = nullptr;
    std::vector<double> full_costs;  // rollover cost per intake of a space
    const void* reduced_key = nullptr;
    std::vector<double> reduced_costs;  // per retained intake

    void begin_plan() {
        full_key = nullptr;
        reduced_key = nullptr;
    }
};

/// One intake distribution, able to price a plan. Implementations are pure
/// and safe to call concurrently with distinct workspaces.
class CostEvaluator {
  public:
    virtual ~CostEvaluator() = default;

    virtual double expected_cost(const Instance& instance, const DayAggregates& agg,
                                 EvalWorkspace& ws) const = 0;

    /// Explicit joint weights over `space`, for masters that need the
    /// distribution itself (the MIP reformulation). Weights below 1e-300 are
    /// flushed to zero.
    virtual std::vector<double> joint_weights(const IntakeSpace& space) const = 0;

    virtual std::string describe() const = 0;
};

/// Binomial distribution evaluated through the convolution engine.
class ConvolutionEvaluator final : public CostEvaluator {
  public:
    ConvolutionEvaluator(std::vector<double> p, const std::vector<std::vector<double>>* tables)
        : p_(std::move(p)), tables_(tables) {}

    double expected_cost(const Instance& instance, const DayAggregates& agg,
                         EvalWorkspace& ws) const override;
    std::vector<double> joint_weights(const IntakeSpace& space) const override;
    std::string describe() const override;

    const std::vector<double>& success_probs() const { return p_; }

  private:
    std::vector<double> p_;
    const std::vector<std::vector<double>>* tables_;  // owned by a PmfTableCache
};

/// Binomial distribution summed over a reduced intake set only (the truncated
/// approximate objective). Weights are not renormalised.
class ReducedSetEvaluator final : public CostEvaluator {
  public:
    ReducedSetEvaluator(std::vector<double> p, const std::vector<std::vector<double>>& tables,
                        const IntakeSpace* space, const ReducedIntakeSet* reduced);

    double expected_cost(const Instance& instance, const DayAggregates& agg,
                         EvalWorkspace& ws) const override;
    std::vector<double> joint_weights(const IntakeSpace& space) const override;
    std::string describe() const override;

    const std::vector<double>& success_probs() const { return p_; }

  private:
    std::vector<double> p_;
    const IntakeSpace* space_;
    const ReducedIntakeSet* reduced_;
    std::vector<double> weights_;  // per retained intake
};

/// Arbitrary distribution given by explicit joint weights over a space.
class JointWeightEvaluator final : public CostEvaluator {
  public:
    JointWeightEvaluator(std::vector<double> weights, const IntakeSpace* space, std::string label)
        : weights_(std::move(weights)), space_(space), label_(std::move(label)) {}

    double expected_cost(const Instance& instance, const DayAggregates& agg,
                         EvalWorkspace& ws) const override;
    std::vector<double> joint_weights(const IntakeSpace& space) const override;
    std::string describe() const override { return label_; }

    const std::vector<double>& weights() const { return weights_; }

  private:
    std::vector<double> weights_;
    const IntakeSpace* space_;
    std::string label_;
};

/// Point mass on a single intake realisation (the robust baseline).
class PointMassEvaluator final : public CostEvaluator {
  public:
    explicit PointMassEvaluator(std::vector<int> intake) : intake_(std::move(intake)) {}

    double expected_cost(const Instance& instance, const DayAggregates& agg,
                         EvalWorkspace& ws) const override;
    std::vector<double> joint_weights(const IntakeSpace& space) const override;
    std::string describe() const override { return "point-mass"; }

    const std::vector<int>& intake() const { return intake_; }

  private:
    std::vector<int> intake_;
};

/// Rollover cost of every intake in the space for the given plan, memoised in
/// the workspace (shared across evaluators pricing the same plan).
const std::vector<double>& scenario_costs(const Instance& instance, const DayAggregates& agg,
                                          const IntakeSpace& space, EvalWorkspace& ws);

}  // namespace drplan
