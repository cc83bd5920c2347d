#include "drplan/instance_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace drplan {

using nlohmann::json;

std::vector<double> AmbiguitySpec::anchor(std::span<const int> intake_max) const {
    std::vector<double> anchor_p = p_hat;
    if (!samples.empty()) anchor_p = mle_success_probs(samples, intake_max);
    if (anchor_p.empty())
        throw std::invalid_argument("ambiguity: neither p_hat nor samples given");
    return clamp_mle(anchor_p, std::max(sample_count, 1), intake_max);
}

InstanceDoc instance_from_json_text(const std::string& text) {
    json j = json::parse(text);
    InstanceDoc doc;
    doc.id = j.value("id", std::string{});
    const int schema = j.value("schema_version", 1);
    if (schema != 1) throw std::invalid_argument("unsupported schema_version");
    doc.instance.horizon = j.at("L").get<int>();
    doc.instance.window = j.at("K").get<int>();
    doc.instance.capacity = j.at("capacity").get<std::vector<int>>();
    doc.instance.workstack = j.at("workstack").get<std::vector<int>>();
    doc.instance.rollover_cost = j.at("rollover_cost").get<std::vector<double>>();
    doc.instance.intake_max = j.at("i_max").get<std::vector<int>>();
    doc.instance.validate();
    if (j.contains("ambiguity")) {
        const json& a = j.at("ambiguity");
        doc.ambiguity.sample_count = a.value("N", 0);
        doc.ambiguity.alpha = a.value("alpha", 0.05);
        doc.ambiguity.n_probs = a.value("n_probs", 0);
        if (a.contains("p_hat")) doc.ambiguity.p_hat = a.at("p_hat").get<std::vector<double>>();
        if (a.contains("samples"))
            doc.ambiguity.samples = a.at("samples").get<std::vector<std::vector<int>>>();
    }
    return doc;
}

std::string instance_to_json_text(const InstanceDoc& doc) {
    json j;
    j["schema_version"] = 1;
    if (!doc.id.empty()) j["id"] = doc.id;
    j["L"] = doc.instance.horizon;
    j["K"] = doc.instance.window;
    j["capacity"] = doc.instance.capacity;
    j["workstack"] = doc.instance.workstack;
    j["rollover_cost"] = doc.instance.rollover_cost;
    j["i_max"] = doc.instance.intake_max;
    json a;
    a["N"] = doc.ambiguity.sample_count;
    a["alpha"] = doc.ambiguity.alpha;
    a["n_probs"] = doc.ambiguity.n_probs;
    if (!doc.ambiguity.p_hat.empty()) a["p_hat"] = doc.ambiguity.p_hat;
    if (!doc.ambiguity.samples.empty()) a["samples"] = doc.ambiguity.samples;
    j["ambiguity"] = std::move(a);
    return j.dump(2) + "\n";
}

InstanceDoc load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open instance file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return instance_from_json_text(ss.str());
}

void save_instance(const InstanceDoc& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write instance file: " + path);
    out << instance_to_json_text(doc);
}

ParametricAmbiguitySet build_ambiguity(const InstanceDoc& doc, ExecPolicy policy) {
    const AmbiguitySpec& spec = doc.ambiguity;
    if (spec.sample_count < 1 || spec.n_probs < 1)
        throw std::invalid_argument("ambiguity: N and n_probs must be given and >= 1");
    std::vector<double> anchor = spec.anchor(doc.instance.intake_max);
    return build_confidence_set(anchor, spec.sample_count, doc.instance.intake_max, spec.alpha,
                                spec.n_probs, policy);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string format_plan(const PairSets& pairs, const PullForwardPlan& plan) {
    std::string out;
    for (size_t k = 0; k < pairs.all.size(); ++k) {
        if (plan.amount.size() <= k || plan.amount[k] == 0) continue;
        if (!out.empty()) out += ";";
        out += "(" + std::to_string(pairs.all[k].from_day + 1) + "," +
               std::to_string(pairs.all[k].to_day + 1) + "):" + std::to_string(plan.amount[k]);
    }
    return out.empty() ? "-" : out;
}

std::string format_probs(std::span<const double> p) {
    std::string out = "(";
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += format_double(p[i]);
    }
    return out + ")";
}

std::string weights_hash(std::span<const double> w) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : w) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace drplan
