#include "drplan/evaluators.hpp"

#include <stdexcept>

namespace drplan {

const std::vector<std::vector<double>>& PmfTableCache::tables(const std::vector<double>& p) {
    auto [it, inserted] = cache_.try_emplace(p);
    if (inserted) {
        ++builds_;
        it->second.resize(intake_max_.size());
        for (size_t d = 0; d < intake_max_.size(); ++d)
            it->second[d] = binomial_pmf_table(intake_max_[d], p[d]);
    }
    return it->second;
}

const std::vector<double>& scenario_costs(const Instance& instance, const DayAggregates& agg,
                                          const IntakeSpace& space, EvalWorkspace& ws) {
    if (ws.full_key == &space) return ws.full_costs;
    ws.full_costs.resize(space.size());
    space.for_each([&](std::int64_t j, std::span<const int> intake) {
        ws.full_costs[j] = rollover_cost_unchecked(instance, agg, intake);
    });
    ws.full_key = &space;
    return ws.full_costs;
}

double ConvolutionEvaluator::expected_cost(const Instance& instance, const DayAggregates& agg,
                                           EvalWorkspace& ws) const {
    return convolved_cost(instance, agg, *tables_, ws.conv_a, ws.conv_b);
}

std::vector<double> ConvolutionEvaluator::joint_weights(const IntakeSpace& space) const {
    std::vector<double> w(space.size());
    std::vector<int> intake(space.dims());
    for (std::int64_t j = 0; j < space.size(); ++j) {
        space.decode(j, intake);
        double prod = 1.0;
        for (int d = 0; d < space.dims(); ++d) prod *= (*tables_)[d][intake[d]];
        w[j] = prod >= 1e-300 ? prod : 0.0;
    }
    return w;
}

std::string ConvolutionEvaluator::describe() const {
    std::string s = "binomial p=(";
    for (size_t i = 0; i < p_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p_[i]);
    }
    return s + ")";
}

ReducedSetEvaluator::ReducedSetEvaluator(std::vector<double> p,
                                         const std::vector<std::vector<double>>& tables,
                                         const IntakeSpace* space,
                                         const ReducedIntakeSet* reduced)
    : p_(std::move(p)), space_(space), reduced_(reduced) {
    weights_.resize(reduced_->retained.size());
    std::vector<int> intake(space_->dims());
    for (size_t k = 0; k < reduced_->retained.size(); ++k) {
        space_->decode(reduced_->retained[k], intake);
        double prod = 1.0;
        for (int d = 0; d < space_->dims(); ++d) prod *= tables[d][intake[d]];
        weights_[k] = prod >= 1e-300 ? prod : 0.0;
    }
}

double ReducedSetEvaluator::expected_cost(const Instance& instance, const DayAggregates& agg,
                                          EvalWorkspace& ws) const {
    if (ws.reduced_key != reduced_) {
        ws.reduced_costs.resize(reduced_->retained.size());
        std::vector<int>& intake = ws.intake_buf;
        intake.resize(space_->dims());
        for (size_t k = 0; k < reduced_->retained.size(); ++k) {
            space_->decode(reduced_->retained[k], intake);
            ws.reduced_costs[k] = rollover_cost_unchecked(instance, agg, intake);
        }
        ws.reduced_key = reduced_;
    }
    const auto& costs = ws.reduced_costs;
    return pairwise_sum(static_cast<std::int64_t>(costs.size()),
                        [&](std::int64_t k) { return weights_[k] * costs[k]; });
}

std::vector<double> ReducedSetEvaluator::joint_weights(const IntakeSpace& space) const {
    if (&space != space_ && space.size() != space_->size())
        throw std::invalid_argument("reduced evaluator asked for weights over a foreign space");
    std::vector<double> w(space.size(), 0.0);
    for (size_t k = 0; k < reduced_->retained.size(); ++k)
        w[reduced_->retained[k]] = weights_[k];
    return w;
}

std::string ReducedSetEvaluator::describe() const {
    return "binomial (reduced intake set, beta=" + std::to_string(reduced_->beta) + ")";
}

double JointWeightEvaluator::expected_cost(const Instance& instance, const DayAggregates& agg,
                                           EvalWorkspace& ws) const {
    const std::vector<double>& costs = scenario_costs(instance, agg, *space_, ws);
    return pairwise_sum(static_cast<std::int64_t>(costs.size()),
                        [&](std::int64_t j) { return weights_[j] * costs[j]; });
}

std::vector<double> JointWeightEvaluator::joint_weights(const IntakeSpace& space) const {
    if (space.size() != static_cast<std::int64_t>(weights_.size()))
        throw std::invalid_argument("joint evaluator asked for weights over a foreign space");
    return weights_;
}

double PointMassEvaluator::expected_cost(const Instance& instance, const DayAggregates& agg,
                                         EvalWorkspace& ws) const {
    (void)ws;
    return rollover_cost_unchecked(instance, agg, intake_);
}

std::vector<double> PointMassEvaluator::joint_weights(const IntakeSpace& space) const {
    std::vector<double> w(space.size(), 0.0);
    w[space.encode(intake_)] = 1.0;
    return w;
}

}  // namespace drplan
