#include "drplan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drplan {

using nlohmann::json;

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

SuiteConfig suite_config_from_json_text(const std::string& text) {
    json j = json::parse(text);
    SuiteConfig c;
    c.horizon = j.value("L", 5);
    c.window = j.value("K", 2);
    c.base_capacity = j.value("base_capacity", 30);
    c.cd_patterns = j.value("cd_patterns", std::vector<std::vector<int>>{});
    c.imax_families = j.value("imax_families", std::vector<std::vector<int>>{});
    c.sample_counts = j.value("N_values", std::vector<int>{});
    c.n_probs_values = j.value("n_probs_values", std::vector<int>{});
    c.alpha = j.value("alpha", 0.05);
    c.p_hat = j.value("p_hat", std::vector<double>{});
    c.algorithms = j.value("algorithms", std::vector<std::string>{});
    c.epsilon = j.value("epsilon", 0.01);
    c.k_max = j.value("k_max", 10);
    c.beta = j.value("beta", 1e-3);
    c.np_epsilon = j.value("np_epsilon", 1e-4);
    c.np_dof = j.value("np_dof", 0);
    c.benders_epsilon = j.value("benders_epsilon", 1e-8);
    c.max_intake_space = j.value("max_intake_space", static_cast<std::int64_t>(0));
    c.max_ambiguity = j.value("max_ambiguity", static_cast<std::int64_t>(0));
    c.jobs = j.value("jobs", 1);
    c.seed = j.value("seed", 1u);
    c.out_dir = j.value("out_dir", std::string{});
    return c;
}

SuiteConfig load_suite_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return suite_config_from_json_text(ss.str());
}

std::vector<GeneratedInstance> generate_instances(const SuiteConfig& config,
                                                  std::vector<std::string>* skip_log) {
    if (config.cd_patterns.empty() || config.imax_families.empty() ||
        config.sample_counts.empty() || config.n_probs_values.empty())
        throw std::invalid_argument("suite config: patterns, families, N and n_probs required");
    std::vector<GeneratedInstance> out;
    const int L = config.horizon;

    for (size_t pi = 0; pi < config.cd_patterns.size(); ++pi) {
        const auto& pattern = config.cd_patterns[pi];
        if (pattern.size() != static_cast<size_t>(L))
            throw std::invalid_argument("cd pattern length must equal L");
        Instance base;
        base.horizon = L;
        base.window = config.window;
        base.capacity.assign(L, config.base_capacity);
        base.workstack.resize(L);
        base.rollover_cost.assign(L, 1.0);
        for (int d = 0; d < L; ++d) base.workstack[d] = config.base_capacity - pattern[d];
        long long spare_sum = 0;
        for (int d = 0; d < L; ++d) spare_sum += base.spare(d);

        for (size_t fi = 0; fi < config.imax_families.size(); ++fi) {
            std::vector<int> imax = config.imax_families[fi];
            if (imax.size() != static_cast<size_t>(L))
                throw std::invalid_argument("i_max family length must equal L");
            long long imax_sum = std::accumulate(imax.begin(), imax.end(), 0LL);
            if (imax_sum > spare_sum) {
                // scale down proportionally so intake can always be absorbed
                for (int d = 0; d < L; ++d)
                    imax[d] = static_cast<int>(
                        std::floor(static_cast<double>(imax[d]) * spare_sum / imax_sum));
                imax_sum = std::accumulate(imax.begin(), imax.end(), 0LL);
            }
            if (imax_sum == 0) {
                if (skip_log)
                    skip_log->push_back("skip pattern " + std::to_string(pi) + " family " +
                                        std::to_string(fi) +
                                        ": i_max degenerate after the intake-absorption bound");
                continue;
            }
            base.intake_max = imax;
            const std::int64_t space = space_cardinality(imax);
            if (config.max_intake_space > 0 && space > config.max_intake_space) {
                if (skip_log)
                    skip_log->push_back("skip pattern " + std::to_string(pi) + " family " +
                                        std::to_string(fi) + ": |I| = " + std::to_string(space) +
                                        " above cap");
                continue;
            }

            PairSets pairs = feasible_pairs(base);
            int n_high = 0;
            for (int d = 0; d < L; ++d)
                if (imax[d] > base.capacity[d] - base.workstack[d]) ++n_high;

            for (int N : config.sample_counts) {
                for (int n_probs : config.n_probs_values) {
                    GeneratedInstance gi;
                    gi.doc.instance = base;
                    gi.doc.ambiguity.sample_count = N;
                    gi.doc.ambiguity.alpha = config.alpha;
                    gi.doc.ambiguity.n_probs = n_probs;
                    gi.doc.ambiguity.p_hat =
                        config.p_hat.empty() ? std::vector<double>(L, 0.75) : config.p_hat;
                    gi.fplus_size = static_cast<int>(pairs.feasible.size());
                    gi.n_high_intake = n_high;
                    gi.intake_space_size = space;
                    gi.doc.id = "L" + std::to_string(L) + "_cd" + std::to_string(pi) + "_im" +
                                std::to_string(fi) + "_N" + std::to_string(N) + "_np" +
                                std::to_string(n_probs);
                    out.push_back(std::move(gi));
                }
            }
        }
    }
    return out;
}

SolveReport run_algorithm(const std::string& name, const InstanceDoc& doc,
                          const AlgoOptions& options) {
    const Instance& instance = doc.instance;
    auto theta = [&]() {
        ParametricAmbiguitySet set = build_ambiguity(doc, options.policy);
        if (options.max_ambiguity > 0 &&
            static_cast<std::int64_t>(set.size()) > options.max_ambiguity)
            throw std::invalid_argument("ambiguity set larger than the configured cap (" +
                                        std::to_string(set.size()) + ")");
        return set;
    };

    if (name == "P") return solve_exact_P(instance, theta(), options.master, options.policy);
    if (name == "oracle")
        return solve_exact_P(instance, theta(), options.master, options.policy,
                             ExactEngine::enumeration);
    if (name == "CS" || name == "CS_opt") {
        CutSurfaceOptions cs;
        cs.epsilon = options.epsilon;
        cs.k_max = options.k_max;
        cs.master = options.master;
        return solve_cutting_surface(
            instance, theta(),
            name == "CS" ? SeparationScope::extreme : SeparationScope::full, cs, options.policy);
    }
    if (name == "AO") {
        AoOptions ao;
        ao.beta = options.beta;
        ao.master = options.master;
        return solve_AO(instance, theta(), ao, options.policy);
    }
    if (name == "RO") return solve_RO(instance, options.master);
    if (name == "benders") {
        BendersOptions b;
        b.epsilon = options.benders_epsilon;
        b.master = options.master;
        return solve_benders(instance, theta(), b, options.policy);
    }
    if (name == "NP") {
        std::vector<double> anchor = doc.ambiguity.anchor(instance.intake_max);
        const int dof = options.np_dof > 0 ? options.np_dof : instance.horizon;
        const double rho =
            compute_rho(doc.ambiguity.sample_count, dof, doc.ambiguity.alpha);
        NonparametricAmbiguity amb = make_binomial_nominal(instance, anchor, rho);
        NpOptions np;
        np.epsilon = options.np_epsilon;
        np.master = options.master;
        return solve_NP(instance, amb, np);
    }
    throw std::invalid_argument("unknown algorithm: " + name);
}

namespace {

ResultRow row_from_report(const GeneratedInstance& gi, const PairSets& pairs,
                          const SolveReport& report, const GapMetrics& gaps,
                          std::int64_t theta_size) {
    ResultRow row;
    row.instance_id = gi.doc.id;
    row.algorithm = report.algorithm;
    row.plan = format_plan(pairs, report.plan);
    if (!report.worst_p.empty())
        row.worst = format_probs(report.worst_p);
    else if (!report.worst_distribution.empty())
        row.worst = weights_hash(report.worst_distribution);
    else if (!report.worst_intake.empty()) {
        std::vector<double> as_double(report.worst_intake.begin(), report.worst_intake.end());
        row.worst = format_probs(as_double);
    }
    row.objective = report.objective;
    row.p_gap = gaps.p_gap;
    row.y_gap = gaps.y_gap;
    row.p_apg = gaps.p_apg;
    row.y_apg = gaps.y_apg;
    row.iterations = report.iterations;
    row.pmf_tables = report.counters.pmf_table_sets;
    row.evaluator_calls = report.counters.evaluator_calls;
    row.wall_ms = report.wall_ms;
    row.theta_size = theta_size;
    row.intake_space_size = gi.intake_space_size;
    row.fplus_size = gi.fplus_size;
    row.n_high_intake = gi.n_high_intake;
    return row;
}

void run_one_instance(const SuiteConfig& config, const GeneratedInstance& gi,
                      std::vector<ResultRow>& rows,
                      std::vector<SuiteOutput::NpCompareRow>& np_rows) {
    AlgoOptions options;
    options.epsilon = config.epsilon;
    options.k_max = config.k_max;
    options.beta = config.beta;
    options.np_epsilon = config.np_epsilon;
    options.np_dof = config.np_dof;
    options.benders_epsilon = config.benders_epsilon;
    options.max_ambiguity = config.max_ambiguity;
    options.policy = ExecPolicy::serial;  // instances already run in parallel

    const PairSets pairs = feasible_pairs(gi.doc.instance);

    ParametricAmbiguitySet theta;
    try {
        theta = build_ambiguity(gi.doc, options.policy);
    } catch (const std::exception& e) {
        ResultRow row;
        row.instance_id = gi.doc.id;
        row.algorithm = "-";
        row.status = std::string("error:") + e.what();
        rows.push_back(std::move(row));
        return;
    }
    if (config.max_ambiguity > 0 &&
        static_cast<std::int64_t>(theta.size()) > config.max_ambiguity) {
        ResultRow row;
        row.instance_id = gi.doc.id;
        row.algorithm = "-";
        row.status = "skipped:ambiguity set above cap (" + std::to_string(theta.size()) + ")";
        rows.push_back(std::move(row));
        return;
    }
    const auto theta_size = static_cast<std::int64_t>(theta.size());

    // reference solve anchors every gap metric
    SolveReport ref;
    try {
        ref = solve_exact_P(gi.doc.instance, theta, MinMaxOptions{}, options.policy);
    } catch (const std::exception& e) {
        ResultRow row;
        row.instance_id = gi.doc.id;
        row.algorithm = "P";
        row.status = std::string("error:") + e.what();
        rows.push_back(std::move(row));
        return;
    }
    const double z_star = ref.objective;

    std::optional<SolveReport> np_report;
    for (const std::string& name : config.algorithms) {
        try {
            SolveReport rep = name == "P"
                                  ? ref
                                  : run_algorithm(name, gi.doc, options);
            GapMetrics gaps =
                brute_force_metrics(gi.doc.instance, theta, rep, z_star, options.policy);
            rows.push_back(row_from_report(gi, pairs, rep, gaps, theta_size));
            if (name == "NP") np_report = std::move(rep);
        } catch (const std::exception& e) {
            ResultRow row;
            row.instance_id = gi.doc.id;
            row.algorithm = name;
            row.status = std::string("error:") + e.what();
            row.theta_size = theta_size;
            row.intake_space_size = gi.intake_space_size;
            row.fplus_size = gi.fplus_size;
            row.n_high_intake = gi.n_high_intake;
            rows.push_back(std::move(row));
        }
    }

    if (np_report && !np_report->worst_distribution.empty()) {
        // Table-6 style comparison of the two worst-case distributions
        // against the nominal MLE distribution
        try {
            IntakeSpace space(gi.doc.instance.intake_max);
            std::vector<double> anchor = gi.doc.ambiguity.anchor(gi.doc.instance.intake_max);
            NonparametricAmbiguity nominal = make_binomial_nominal(gi.doc.instance, anchor, 1.0);
            NonparametricAmbiguity pworst =
                make_binomial_nominal(gi.doc.instance, ref.worst_p, 1.0);
            SuiteOutput::NpCompareRow cmp;
            cmp.instance_id = gi.doc.id;
            cmp.parametric = distribution_summary(pworst.nominal, nominal.nominal, space);
            cmp.nonparametric =
                distribution_summary(np_report->worst_distribution, nominal.nominal, space);
            np_rows.push_back(std::move(cmp));
        } catch (const std::exception&) {
            // comparison is best-effort; solver rows already recorded
        }
    }
}

}  // namespace

SuiteOutput run_suite(const SuiteConfig& config) {
    SuiteOutput output;
    std::vector<GeneratedInstance> instances = generate_instances(config, &output.skip_log);

    std::vector<std::vector<ResultRow>> row_slots(instances.size());
    std::vector<std::vector<SuiteOutput::NpCompareRow>> np_slots(instances.size());

    const int jobs = std::max(1, config.jobs);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(instances.size()); ++i) {
        run_one_instance(config, instances[i], row_slots[i], np_slots[i]);
    }

    for (size_t i = 0; i < instances.size(); ++i) {
        for (auto& r : row_slots[i]) output.rows.push_back(std::move(r));
        for (auto& r : np_slots[i]) output.np_compare.push_back(std::move(r));
    }
    std::stable_sort(output.rows.begin(), output.rows.end(),
                     [](const ResultRow& a, const ResultRow& b) {
                         if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
                         return a.algorithm < b.algorithm;
                     });
    std::stable_sort(output.np_compare.begin(), output.np_compare.end(),
                     [](const auto& a, const auto& b) { return a.instance_id < b.instance_id; });
    return output;
}

std::string result_csv_header() {
    return "instance_id,algorithm,status,plan,worst,objective,p_gap,y_gap,p_apg,y_apg,"
           "iterations,pmf_tables,evaluator_calls,wall_ms,theta_size,intake_space,fplus,"
           "n_high_intake";
}

std::string result_csv_line(const ResultRow& row) {
    std::string line = csv_quote(row.instance_id);
    line += "," + csv_quote(row.algorithm);
    line += "," + csv_quote(row.status);
    line += "," + csv_quote(row.plan);
    line += "," + csv_quote(row.worst);
    line += "," + format_double(row.objective);
    line += "," + format_double(row.p_gap);
    line += "," + format_double(row.y_gap);
    line += "," + format_double(row.p_apg);
    line += "," + format_double(row.y_apg);
    line += "," + std::to_string(row.iterations);
    line += "," + std::to_string(row.pmf_tables);
    line += "," + std::to_string(row.evaluator_calls);
    line += "," + format_double(row.wall_ms);
    line += "," + std::to_string(row.theta_size);
    line += "," + std::to_string(row.intake_space_size);
    line += "," + std::to_string(row.fplus_size);
    line += "," + std::to_string(row.n_high_intake);
    return line;
}

namespace {

std::string np_compare_header() {
    return "instance_id,which,mod_chi2,kld,entropy,total_mean,total_variance,total_skewness,"
           "popped,suppressed";
}

std::string np_compare_line(const std::string& id, const char* which,
                            const DistributionSummary& s) {
    std::string line = csv_quote(id);
    line += std::string(",") + which;
    line += "," + format_double(s.mod_chi2);
    line += "," + format_double(s.kl_divergence);
    line += "," + format_double(s.entropy);
    line += "," + format_double(s.total_mean);
    line += "," + format_double(s.total_variance);
    line += "," + format_double(s.total_skewness);
    line += "," + std::to_string(s.popped);
    line += "," + std::to_string(s.suppressed);
    return line;
}

}  // namespace

void write_suite_output(const SuiteConfig& config, const SuiteOutput& output) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);

    std::ofstream results(fs::path(config.out_dir) / "results.csv");
    results << result_csv_header() << "\n";
    for (const ResultRow& row : output.rows) results << result_csv_line(row) << "\n";

    if (!output.np_compare.empty()) {
        std::ofstream cmp(fs::path(config.out_dir) / "np_compare.csv");
        cmp << np_compare_header() << "\n";
        for (const auto& row : output.np_compare) {
            cmp << np_compare_line(row.instance_id, "P", row.parametric) << "\n";
            cmp << np_compare_line(row.instance_id, "NP", row.nonparametric) << "\n";
        }
    }

    json manifest;
    manifest["schema_version"] = 1;
    manifest["tool"] = "drplan 0.1.0";
    manifest["seed"] = config.seed;
    manifest["jobs"] = config.jobs;
    manifest["L"] = config.horizon;
    manifest["K"] = config.window;
    manifest["base_capacity"] = config.base_capacity;
    manifest["cd_patterns"] = config.cd_patterns;
    manifest["imax_families"] = config.imax_families;
    manifest["N_values"] = config.sample_counts;
    manifest["n_probs_values"] = config.n_probs_values;
    manifest["alpha"] = config.alpha;
    manifest["algorithms"] = config.algorithms;
    manifest["epsilon"] = config.epsilon;
    manifest["k_max"] = config.k_max;
    manifest["beta"] = config.beta;
    manifest["np_epsilon"] = config.np_epsilon;
    manifest["benders_epsilon"] = config.benders_epsilon;
    manifest["skipped"] = output.skip_log;
    std::ofstream mf(fs::path(config.out_dir) / "manifest.json");
    mf << manifest.dump(2) << "\n";
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty results file");
    if (line != result_csv_header())
        throw std::invalid_argument("results schema mismatch; header was: " + line);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 18)
            throw std::invalid_argument("results schema mismatch at a row with " +
                                        std::to_string(f.size()) + " fields");
        ResultRow row;
        row.instance_id = f[0];
        row.algorithm = f[1];
        row.status = f[2];
        row.plan = f[3];
        row.worst = f[4];
        row.objective = std::stod(f[5]);
        row.p_gap = std::stod(f[6]);
        row.y_gap = std::stod(f[7]);
        row.p_apg = std::stod(f[8]);
        row.y_apg = std::stod(f[9]);
        row.iterations = std::stoi(f[10]);
        row.pmf_tables = std::stoll(f[11]);
        row.evaluator_calls = std::stoll(f[12]);
        row.wall_ms = std::stod(f[13]);
        row.theta_size = std::stoll(f[14]);
        row.intake_space_size = std::stoll(f[15]);
        row.fplus_size = std::stoi(f[16]);
        row.n_high_intake = std::stoi(f[17]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SuiteOutput::NpCompareRow> read_np_compare_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) return {};
    std::string line;
    if (!std::getline(in, line) || line != np_compare_header())
        throw std::invalid_argument("np_compare schema mismatch");
    std::vector<SuiteOutput::NpCompareRow> rows;
    auto parse_summary = [](const std::vector<std::string>& f) {
        DistributionSummary s;
        s.mod_chi2 = std::stod(f[2]);
        s.kl_divergence = std::stod(f[3]);
        s.entropy = std::stod(f[4]);
        s.total_mean = std::stod(f[5]);
        s.total_variance = std::stod(f[6]);
        s.total_skewness = std::stod(f[7]);
        s.popped = std::stoll(f[8]);
        s.suppressed = std::stoll(f[9]);
        return s;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f1 = csv_split(line);
        if (f1.size() != 10 || f1[1] != "P")
            throw std::invalid_argument("np_compare schema mismatch (expected a P row)");
        if (!std::getline(in, line))
            throw std::invalid_argument("np_compare: dangling P row");
        auto f2 = csv_split(line);
        if (f2.size() != 10 || f2[1] != "NP" || f2[0] != f1[0])
            throw std::invalid_argument("np_compare schema mismatch (expected the NP row)");
        SuiteOutput::NpCompareRow row;
        row.instance_id = f1[0];
        row.parametric = parse_summary(f1);
        row.nonparametric = parse_summary(f2);
        rows.push_back(std::move(row));
    }
    return rows;
}

AggregateReport aggregate_report(const std::vector<ResultRow>& rows,
                                 const std::vector<SuiteOutput::NpCompareRow>& np_rows) {
    constexpr double kOptTol = 1e-6;
    AggregateReport report;

    auto summarise = [&](const std::vector<const ResultRow*>& subset) {
        std::vector<AggregateReport::AlgoSummary> out;
        for (const ResultRow* row : subset) {
            if (row->status != "ok") continue;
            auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) {
                return s.algorithm == row->algorithm;
            });
            if (it == out.end()) {
                out.push_back({});
                it = std::prev(out.end());
                it->algorithm = row->algorithm;
            }
            ++it->rows;
            const bool p_opt = std::fabs(row->p_gap) <= kOptTol;
            const bool y_opt = std::fabs(row->y_gap) <= kOptTol;
            if (p_opt) ++it->p_optimal;
            if (y_opt) ++it->y_optimal;
            if (p_opt && y_opt) ++it->optimal;
            it->avg_p_gap += row->p_gap;
            it->avg_y_gap += row->y_gap;
            it->avg_p_apg += row->p_apg;
            it->avg_y_apg += row->y_apg;
        }
        for (auto& s : out) {
            if (s.rows == 0) continue;
            s.avg_p_gap /= s.rows;
            s.avg_y_gap /= s.rows;
            s.avg_p_apg /= s.rows;
            s.avg_y_apg /= s.rows;
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.algorithm < b.algorithm; });
        return out;
    };

    std::vector<const ResultRow*> all;
    for (const auto& r : rows) all.push_back(&r);
    report.overall = summarise(all);

    auto grouped = [&](auto key_fn) {
        std::vector<std::pair<std::string, std::vector<AggregateReport::AlgoSummary>>> out;
        std::vector<std::pair<std::string, std::vector<const ResultRow*>>> groups;
        for (const auto& r : rows) {
            std::string key = key_fn(r);
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return g.first == key; });
            if (it == groups.end()) {
                groups.push_back({key, {}});
                it = std::prev(groups.end());
            }
            it->second.push_back(&r);
        }
        std::sort(groups.begin(), groups.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& g : groups) out.push_back({g.first, summarise(g.second)});
        return out;
    };

    report.by_theta_bucket = grouped([](const ResultRow& r) {
        const auto t = r.theta_size;
        if (t <= 1) return std::string("|Theta|=1");
        if (t <= 20) return std::string("|Theta| 2-20");
        if (t <= 100) return std::string("|Theta| 21-100");
        if (t <= 500) return std::string("|Theta| 101-500");
        if (t <= 1000) return std::string("|Theta| 501-1000");
        return std::string("|Theta| >1000");
    });
    report.by_intake_size = grouped(
        [](const ResultRow& r) { return "|I|=" + std::to_string(r.intake_space_size); });
    report.by_fplus = grouped(
        [](const ResultRow& r) { return "|F+|=" + std::to_string(r.fplus_size); });

    if (!np_rows.empty()) {
        report.have_np_compare = true;
        report.np_compare_rows = static_cast<int>(np_rows.size());
        auto add = [](DistributionSummary& acc, const DistributionSummary& s) {
            acc.mod_chi2 += s.mod_chi2;
            acc.kl_divergence += s.kl_divergence;
            acc.entropy += s.entropy;
            acc.total_mean += s.total_mean;
            acc.total_variance += s.total_variance;
            acc.total_skewness += s.total_skewness;
            acc.popped += s.popped;
            acc.suppressed += s.suppressed;
        };
        for (const auto& r : np_rows) {
            add(report.avg_parametric, r.parametric);
            add(report.avg_nonparametric, r.nonparametric);
        }
        auto scale = [&](DistributionSummary& s) {
            const double n = np_rows.size();
            s.mod_chi2 /= n;
            s.kl_divergence /= n;
            s.entropy /= n;
            s.total_mean /= n;
            s.total_variance /= n;
            s.total_skewness /= n;
        };
        scale(report.avg_parametric);
        scale(report.avg_nonparametric);
    }
    return report;
}

namespace {

void render_summary_block(std::ostream& os, const std::string& title,
                          const std::vector<AggregateReport::AlgoSummary>& block) {
    os << "# " << title << "\n";
    os << "algorithm,rows,optimal,p_optimal,y_optimal,avg_p_gap,avg_y_gap,avg_p_apg,avg_y_apg\n";
    for (const auto& s : block) {
        os << csv_quote(s.algorithm) << "," << s.rows << "," << s.optimal << "," << s.p_optimal
           << "," << s.y_optimal << "," << format_double(s.avg_p_gap) << ","
           << format_double(s.avg_y_gap) << "," << format_double(s.avg_p_apg) << ","
           << format_double(s.avg_y_apg) << "\n";
    }
}

json summary_to_json(const std::vector<AggregateReport::AlgoSummary>& block) {
    json arr = json::array();
    for (const auto& s : block) {
        json j;
        j["algorithm"] = s.algorithm;
        j["rows"] = s.rows;
        j["optimal"] = s.optimal;
        j["p_optimal"] = s.p_optimal;
        j["y_optimal"] = s.y_optimal;
        j["avg_p_gap"] = s.avg_p_gap;
        j["avg_y_gap"] = s.avg_y_gap;
        j["avg_p_apg"] = s.avg_p_apg;
        j["avg_y_apg"] = s.avg_y_apg;
        arr.push_back(std::move(j));
    }
    return arr;
}

json dist_summary_to_json(const DistributionSummary& s) {
    json j;
    j["mod_chi2"] = s.mod_chi2;
    j["kld"] = s.kl_divergence;
    j["entropy"] = s.entropy;
    j["total_mean"] = s.total_mean;
    j["total_variance"] = s.total_variance;
    j["total_skewness"] = s.total_skewness;
    j["popped"] = s.popped;
    j["suppressed"] = s.suppressed;
    return j;
}

}  // namespace

std::string render_report_csv(const AggregateReport& report) {
    std::ostringstream os;
    render_summary_block(os, "overall", report.overall);
    for (const auto& [key, block] : report.by_theta_bucket)
        render_summary_block(os, key, block);
    for (const auto& [key, block] : report.by_intake_size)
        render_summary_block(os, key, block);
    for (const auto& [key, block] : report.by_fplus) render_summary_block(os, key, block);
    if (report.have_np_compare) {
        os << "# distribution comparison (averages over " << report.np_compare_rows
           << " instances)\n";
        os << "which,mod_chi2,kld,entropy,total_mean,total_variance,total_skewness,"
              "avg_popped,avg_suppressed\n";
        auto line = [&](const char* which, const DistributionSummary& s) {
            os << which << "," << format_double(s.mod_chi2) << ","
               << format_double(s.kl_divergence) << "," << format_double(s.entropy) << ","
               << format_double(s.total_mean) << "," << format_double(s.total_variance) << ","
               << format_double(s.total_skewness) << ","
               << format_double(static_cast<double>(s.popped) / report.np_compare_rows) << ","
               << format_double(static_cast<double>(s.suppressed) / report.np_compare_rows)
               << "\n";
        };
        line("P", report.avg_parametric);
        line("NP", report.avg_nonparametric);
    }
    return os.str();
}

std::string render_report_json(const AggregateReport& report) {
    json j;
    j["overall"] = summary_to_json(report.overall);
    json buckets = json::object();
    for (const auto& [key, block] : report.by_theta_bucket) buckets[key] = summary_to_json(block);
    j["by_theta_bucket"] = std::move(buckets);
    json by_i = json::object();
    for (const auto& [key, block] : report.by_intake_size) by_i[key] = summary_to_json(block);
    j["by_intake_size"] = std::move(by_i);
    json by_f = json::object();
    for (const auto& [key, block] : report.by_fplus) by_f[key] = summary_to_json(block);
    j["by_fplus"] = std::move(by_f);
    if (report.have_np_compare) {
        j["np_compare"]["rows"] = report.np_compare_rows;
        j["np_compare"]["P"] = dist_summary_to_json(report.avg_parametric);
        j["np_compare"]["NP"] = dist_summary_to_json(report.avg_nonparametric);
    }
    return j.dump(2) + "\n";
}

}  // namespace drplan
