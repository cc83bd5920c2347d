#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drplan/instance_io.hpp"
#include "drplan/nonparametric.hpp"
#include "drplan/parametric.hpp"

namespace drplan {

struct SuiteConfig {
    int horizon = 5;
    int window = 2;
    int base_capacity = 30;  // c is flat; workstacks derive from the c-D patterns
    std::vector<std::vector<int>> cd_patterns;     // c - D per day
    std::vector<std::vector<int>> imax_families;   // i_max vectors (scaled to fit)
    std::vector<int> sample_counts;                // N values
    std::vector<int> n_probs_values;
    double alpha = 0.05;
    std::vector<double> p_hat;  // default anchor (0.75 each when empty)

    std::vector<std::string> algorithms;  // of P, CS, CS_opt, AO, NP, RO, benders, oracle
    double epsilon = 0.01;
    int k_max = 10;
    double beta = 1e-3;
    double np_epsilon = 1e-4;
    int np_dof = 0;  // 0 -> horizon
    double benders_epsilon = 1e-8;

    std::int64_t max_intake_space = 0;  // skip instances above these caps (0 = none)
    std::int64_t max_ambiguity = 0;

    int jobs = 1;
    unsigned seed = 1;
    std::string out_dir;
};

SuiteConfig load_suite_config(const std::string& path);
SuiteConfig suite_config_from_json_text(const std::string& text);

struct GeneratedInstance {
    InstanceDoc doc;
    int fplus_size = 0;
    int n_high_intake = 0;  // n(i_max): days with i_max above remaining capacity
    std::int64_t intake_space_size = 0;
};

/// Deterministic cartesian product of patterns x i_max families x (N,
/// n_probs); i_max scaled down proportionally when it exceeds the spare-sum
/// bound. Degenerate or over-cap combinations are skipped with a log entry.
std::vector<GeneratedInstance> generate_instances(const SuiteConfig& config,
                                                  std::vector<std::string>* skip_log = nullptr);

struct ResultRow {
    std::string instance_id;
    std::string algorithm;
    std::string status = "ok";  // or error:<what>
    std::string plan;           // serialised y
    std::string worst;          // serialised p, or distribution hash, or intake
    double objective = 0.0;
    double p_gap = 0.0;
    double y_gap = 0.0;
    double p_apg = 0.0;
    double y_apg = 0.0;
    int iterations = 0;
    long long pmf_tables = 0;
    long long evaluator_calls = 0;
    double wall_ms = 0.0;
    // instance tags carried along for grouping
    std::int64_t theta_size = 0;
    std::int64_t intake_space_size = 0;
    int fplus_size = 0;
    int n_high_intake = 0;
};

std::string result_csv_header();
std::string result_csv_line(const ResultRow& row);

struct SuiteOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> skip_log;
    /// Table-6-style per-instance comparison rows (present when both P and
    /// NP ran on an instance).
    struct NpCompareRow {
        std::string instance_id;
        DistributionSummary parametric;
        DistributionSummary nonparametric;
    };
    std::vector<NpCompareRow> np_compare;
};

/// Runs every configured algorithm on every generated instance. The exact
/// parametric solve always runs first to anchor the gap metrics. Individual
/// failures become error rows, never aborts. Deterministic row order; with
/// jobs > 1 instances run on a worker pool and results are merged back into
/// the same order.
SuiteOutput run_suite(const SuiteConfig& config);

/// Writes results.csv, np_compare.csv, skip log and a manifest into out_dir.
void write_suite_output(const SuiteConfig& config, const SuiteOutput& output);

struct AggregateReport {
    struct AlgoSummary {
        std::string algorithm;
        int rows = 0;
        int optimal = 0;
        int p_optimal = 0;
        int y_optimal = 0;
        double avg_p_gap = 0.0;
        double avg_y_gap = 0.0;
        double avg_p_apg = 0.0;
        double avg_y_apg = 0.0;
    };
    std::vector<AlgoSummary> overall;
    // keyed group -> summaries (grouping by ambiguity-size bucket, intake
    // size and pull-pair count)
    std::vector<std::pair<std::string, std::vector<AlgoSummary>>> by_theta_bucket;
    std::vector<std::pair<std::string, std::vector<AlgoSummary>>> by_intake_size;
    std::vector<std::pair<std::string, std::vector<AlgoSummary>>> by_fplus;
    // Table-6 style: averaged distribution summaries for P vs NP
    bool have_np_compare = false;
    DistributionSummary avg_parametric;
    DistributionSummary avg_nonparametric;
    int np_compare_rows = 0;
};

/// Options shared by the CLI and the suite runner when dispatching a single
/// algorithm by name (P, CS, CS_opt, AO, NP, RO, benders, oracle).
struct AlgoOptions {
    double epsilon = 0.01;
    int k_max = 10;
    double beta = 1e-3;
    double np_epsilon = 1e-4;
    int np_dof = 0;
    double benders_epsilon = 1e-8;
    std::int64_t max_ambiguity = 0;
    MinMaxOptions master;
    ExecPolicy policy = ExecPolicy::serial;
};

SolveReport run_algorithm(const std::string& name, const InstanceDoc& doc,
                          const AlgoOptions& options);

std::vector<ResultRow> read_results_csv(const std::string& path);
AggregateReport aggregate_report(const std::vector<ResultRow>& rows,
                                 const std::vector<SuiteOutput::NpCompareRow>& np_rows = {});
std::string render_report_csv(const AggregateReport& report);
std::string render_report_json(const AggregateReport& report);

std::vector<SuiteOutput::NpCompareRow> read_np_compare_csv(const std::string& path);

}  // namespace drplan
