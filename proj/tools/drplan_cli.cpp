#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "drplan/experiments.hpp"
#include "drplan/instance_io.hpp"
#include "drplan/parametric.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

json report_to_json(const drplan::InstanceDoc& doc, const drplan::SolveReport& report) {
    drplan::PairSets pairs = drplan::feasible_pairs(doc.instance);
    json j;
    j["instance_id"] = doc.id;
    j["algorithm"] = report.algorithm;
    j["plan"] = drplan::format_plan(pairs, report.plan);
    json entries = json::array();
    for (const auto& e : drplan::plan_to_entries(pairs, report.plan)) {
        entries.push_back({{"from_day", e.from_day + 1},
                           {"to_day", e.to_day + 1},
                           {"amount", e.amount}});
    }
    j["plan_entries"] = std::move(entries);
    if (!report.worst_p.empty()) j["worst_p"] = report.worst_p;
    if (!report.worst_intake.empty()) j["worst_intake"] = report.worst_intake;
    if (!report.worst_distribution.empty())
        j["worst_distribution_hash"] = drplan::weights_hash(report.worst_distribution);
    j["objective"] = report.objective;
    if (report.truncated_objective) j["truncated_objective"] = *report.truncated_objective;
    if (report.reduced_set_size > 0) j["reduced_set_size"] = report.reduced_set_size;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["stopped_on_repeat"] = report.stopped_on_repeat;
    j["pmf_table_sets"] = report.counters.pmf_table_sets;
    j["evaluator_calls"] = report.counters.evaluator_calls;
    j["wall_ms"] = report.wall_ms;
    if (!report.trace.empty()) {
        json trace = json::array();
        for (const auto& rec : report.trace) {
            json r;
            r["iteration"] = rec.iteration;
            r["plan"] = rec.plan_amount;
            r["master_value"] = rec.master_value;
            if (!rec.separated.empty()) r["separated_p"] = rec.separated;
            r["separated_cost"] = rec.separated_cost;
            if (report.algorithm == "benders") {
                r["lower_bound"] = rec.lower_bound;
                r["upper_bound"] = rec.upper_bound;
            }
            trace.push_back(std::move(r));
        }
        j["trace"] = std::move(trace);
    }
    return j;
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write output file: " + out_path);
    out << text;
}

int env_jobs(int flag_jobs) {
    if (flag_jobs > 0) return flag_jobs;
    if (const char* env = std::getenv("DRPLAN_JOBS")) return std::max(1, std::atoi(env));
    return 0;
}

std::string env_out_dir(const std::string& flag_dir) {
    if (!flag_dir.empty()) return flag_dir;
    if (const char* env = std::getenv("DRPLAN_OUT_DIR")) return env;
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributionally robust pull-forward planning"};
    app.require_subcommand(1);

    // ---- solve
    auto* solve = app.add_subcommand("solve", "solve one instance with one algorithm");
    std::string instance_path, algorithm, out_path, format = "json";
    double epsilon = 0.01, beta = 1e-3;
    std::optional<double> alpha_override;
    int k_max = 10, np_dof = 0;
    double np_epsilon = 1e-4, benders_epsilon = 1e-8;
    solve->add_option("--instance", instance_path, "instance JSON file")->required();
    solve->add_option("--algorithm", algorithm, "P|CS|CS_opt|AO|NP|RO|benders|oracle")
        ->required();
    solve->add_option("--epsilon", epsilon, "cutting-surface tolerance");
    solve->add_option("--kmax", k_max, "cutting-surface iteration cap");
    solve->add_option("--beta", beta, "approximate-objective probability floor");
    solve->add_option("--alpha", alpha_override, "override the confidence level");
    solve->add_option("--np-epsilon", np_epsilon, "non-parametric cut tolerance");
    solve->add_option("--np-dof", np_dof, "degrees of freedom for the ball radius (0 = L)");
    solve->add_option("--benders-epsilon", benders_epsilon, "Benders gap tolerance");
    solve->add_option("--out", out_path, "output file (default stdout)");
    solve->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    // ---- gen
    auto* gen = app.add_subcommand("gen", "generate instance files from a suite config");
    std::string config_path, out_dir;
    gen->add_option("--config", config_path, "suite config JSON")->required();
    gen->add_option("--out-dir", out_dir, "output directory");

    // ---- suite
    auto* suite = app.add_subcommand("suite", "run the experiment suite");
    std::string suite_config_path, suite_out_dir, suite_format = "csv";
    int jobs = 0;
    suite->add_option("--config", suite_config_path, "suite config JSON")->required();
    suite->add_option("--out-dir", suite_out_dir, "output directory");
    suite->add_option("--jobs", jobs, "parallel instances (env DRPLAN_JOBS)");

    // ---- report
    auto* report_cmd = app.add_subcommand("report", "aggregate suite results");
    std::string report_in, report_out, report_format = "csv";
    report_cmd->add_option("--in", report_in, "directory containing results.csv")->required();
    report_cmd->add_option("--out", report_out, "output file (default stdout)");
    report_cmd->add_option("--format", report_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (solve->parsed()) {
            drplan::InstanceDoc doc = drplan::load_instance(instance_path);
            if (alpha_override) doc.ambiguity.alpha = *alpha_override;
            drplan::AlgoOptions options;
            options.epsilon = epsilon;
            options.k_max = k_max;
            options.beta = beta;
            options.np_epsilon = np_epsilon;
            options.np_dof = np_dof;
            options.benders_epsilon = benders_epsilon;
            options.policy = drplan::ExecPolicy::parallel;
            drplan::SolveReport rep = drplan::run_algorithm(algorithm, doc, options);
            if (format == "json") {
                write_text(out_path, report_to_json(doc, rep).dump(2) + "\n");
            } else {
                drplan::PairSets pairs = drplan::feasible_pairs(doc.instance);
                drplan::ResultRow row;
                row.instance_id = doc.id;
                row.algorithm = rep.algorithm;
                row.plan = drplan::format_plan(pairs, rep.plan);
                if (!rep.worst_p.empty())
                    row.worst = drplan::format_probs(rep.worst_p);
                else if (!rep.worst_distribution.empty())
                    row.worst = drplan::weights_hash(rep.worst_distribution);
                row.objective = rep.objective;
                row.iterations = rep.iterations;
                row.pmf_tables = rep.counters.pmf_table_sets;
                row.evaluator_calls = rep.counters.evaluator_calls;
                row.wall_ms = rep.wall_ms;
                write_text(out_path,
                           drplan::result_csv_header() + "\n" + drplan::result_csv_line(row) +
                               "\n");
            }
            return kExitOk;
        }

        if (gen->parsed()) {
            drplan::SuiteConfig config = drplan::load_suite_config(config_path);
            std::string dir = env_out_dir(out_dir);
            if (dir.empty()) dir = config.out_dir;
            if (dir.empty()) throw std::invalid_argument("gen: no output directory given");
            fs::create_directories(dir);
            std::vector<std::string> skip_log;
            auto instances = drplan::generate_instances(config, &skip_log);
            json manifest;
            manifest["schema_version"] = 1;
            manifest["tool"] = "drplan 0.1.0";
            manifest["seed"] = config.seed;
            manifest["count"] = instances.size();
            manifest["skipped"] = skip_log;
            json tags = json::object();
            for (const auto& gi : instances) {
                drplan::save_instance(gi.doc, (fs::path(dir) / (gi.doc.id + ".json")).string());
                tags[gi.doc.id] = {{"fplus", gi.fplus_size},
                                   {"n_high_intake", gi.n_high_intake},
                                   {"intake_space", gi.intake_space_size}};
            }
            manifest["instances"] = std::move(tags);
            std::ofstream mf(fs::path(dir) / "gen_manifest.json");
            mf << manifest.dump(2) << "\n";
            std::cout << "wrote " << instances.size() << " instances to " << dir << "\n";
            return kExitOk;
        }

        if (suite->parsed()) {
            drplan::SuiteConfig config = drplan::load_suite_config(suite_config_path);
            std::string dir = env_out_dir(suite_out_dir);
            if (!dir.empty()) config.out_dir = dir;
            if (config.out_dir.empty())
                throw std::invalid_argument("suite: no output directory given");
            int j = env_jobs(jobs);
            if (j > 0) config.jobs = j;
            drplan::SuiteOutput output = drplan::run_suite(config);
            drplan::write_suite_output(config, output);
            int errors = 0;
            for (const auto& row : output.rows)
                if (row.status != "ok") ++errors;
            std::cout << "suite: " << output.rows.size() << " rows (" << errors
                      << " non-ok), skipped " << output.skip_log.size() << ", results in "
                      << config.out_dir << "\n";
            return kExitOk;
        }

        if (report_cmd->parsed()) {
            auto rows = drplan::read_results_csv(
                (fs::path(report_in) / "results.csv").string());
            std::vector<drplan::SuiteOutput::NpCompareRow> np_rows;
            const auto np_path = fs::path(report_in) / "np_compare.csv";
            if (fs::exists(np_path)) np_rows = drplan::read_np_compare_csv(np_path.string());
            drplan::AggregateReport agg = drplan::aggregate_report(rows, np_rows);
            write_text(report_out, report_format == "json"
                                       ? drplan::render_report_json(agg)
                                       : drplan::render_report_csv(agg));
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitValidation;
}
