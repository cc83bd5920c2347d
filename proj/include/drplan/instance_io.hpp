#pragma once

#include <string>
#include <vector>

#include "drplan/intake.hpp"
#include "drplan/planning.hpp"

namespace drplan {

/// How the parametric ambiguity set is anchored: either an explicit MLE or
/// raw samples it is computed from.
struct AmbiguitySpec {
    int sample_count = 0;  // N
    double alpha = 0.05;
    int n_probs = 0;
    std::vector<double> p_hat;               // used when samples are absent
    std::vector<std::vector<int>> samples;   // optional raw intake samples

    /// The anchor MLE: p_hat, or the MLE of the samples, clamped away from
    /// the boundary as build_confidence_set requires.
    std::vector<double> anchor(std::span<const int> intake_max) const;
};

struct InstanceDoc {
    std::string id;
    Instance instance;
    AmbiguitySpec ambiguity;
};

/// Single-document JSON format, day-indexed arrays ordered day 1..L:
/// {schema_version, L, K, capacity, workstack, rollover_cost, i_max,
///  ambiguity: {N, alpha, n_probs, p_hat | samples}}
InstanceDoc load_instance(const std::string& path);
void save_instance(const InstanceDoc& doc, const std::string& path);
InstanceDoc instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const InstanceDoc& doc);

/// Confidence set per the document's ambiguity block.
ParametricAmbiguitySet build_ambiguity(const InstanceDoc& doc,
                                       ExecPolicy policy = ExecPolicy::serial);

/// Serialised plan, 1-based days: "(from,to):amount;..." or "-" when empty.
std::string format_plan(const PairSets& pairs, const PullForwardPlan& plan);

/// Serialised probability vector "(p1,p2,...)" with 10 significant digits.
std::string format_probs(std::span<const double> p);

/// Stable FNV-1a hash of a weight vector (used to identify non-parametric
/// worst-case distributions in result rows).
std::string weights_hash(std::span<const double> w);

std::string format_double(double v);  // 10 significant digits

}  // namespace drplan
