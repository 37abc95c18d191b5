#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcts_bai/algorithms.hpp"
#include "mcts_bai/tree.hpp"

namespace mcts_bai {

/// Where the experiment tree comes from. Exactly one of: an embedded JSON
/// document, a file path, or the full b-ary generator. A file or embedded
/// tree is fixed across repetitions; the generator draws a fresh tree per
/// repetition (the random-ensemble design: each repetition is a new
/// instance, seeded by (master seed, repetition)).
struct TreeSource {
    std::string label;        ///< Stable description echoed into reports.
    std::string inline_json;  ///< Embedded document (presets).
    std::string file;         ///< Path to a tree JSON file.
    int branching = 0;        ///< Generator arity (>= 2 enables it).
    int depth = 0;            ///< Generator depth (>= 1).
};

enum class ReportFormat : std::uint8_t { Csv, Json };
std::string to_string(ReportFormat format);
ReportFormat report_format_from_string(const std::string& name);

struct ExperimentSpec {
    TreeSource tree;
    std::vector<Algorithm> algorithms;
    double epsilon = 0.0;
    double delta = 0.1;
    RateVariant rate = RateVariant::Experiments;
    CiFamily ci = CiFamily::KlBernoulli;
    std::uint64_t repetitions = 1;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
    std::uint64_t budget_cap = 100000000;
    std::string out_path;  ///< Empty or "-" writes to stdout.
    ReportFormat format = ReportFormat::Csv;
    /// Attaches self-check instrumentation to every run and prints the
    /// aggregated counters to stderr.
    bool trace = false;
};

/// Full b-ary tree of the given depth, levels alternating max/min from a
/// max root, leaf means i.i.d. uniform on [0, 1] from the substream reserved
/// for tree generation. Same (seed, repetition) gives the same tree.
GameTree generate_random_tree(int branching, int depth, std::uint64_t master_seed,
                              std::uint64_t repetition = 0);

/// Per-algorithm aggregate over the repetitions that completed. Scalar
/// statistics are NaN when no run completed (emitted as explicit nulls).
struct AlgorithmStats {
    Algorithm algorithm = Algorithm::LucbMcts;
    std::uint64_t repetitions = 0;  ///< Completed runs.
    std::uint64_t failures = 0;     ///< Runs that threw; excluded from stats.
    double mean_tau = 0.0;
    double std_tau = 0.0;  ///< Sample standard deviation (n - 1).
    double min_tau = 0.0;
    double max_tau = 0.0;
    double error_rate = 0.0;
    double wilson_lower = 0.0;  ///< 95% score interval for the error rate.
    double wilson_upper = 0.0;
    std::uint64_t budget_cap_hits = 0;
    std::vector<double> mean_leaf_pulls;  ///< By leaf rank; sums to mean_tau.
};

struct AggregateReport {
    /// Config echo; workers and output destination are intentionally not
    /// part of the report so that artifacts are byte-identical across
    /// worker counts.
    std::string tree_label;
    std::vector<Algorithm> algorithms;
    double epsilon = 0.0;
    double delta = 0.1;
    RateVariant rate = RateVariant::Experiments;
    CiFamily ci = CiFamily::KlBernoulli;
    std::uint64_t repetitions = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t budget_cap = 0;
    std::size_t leaf_count = 0;

    std::vector<AlgorithmStats> results;  ///< Order follows `algorithms`.

    /// Measured but never emitted into artifacts (not reproducible).
    double wall_clock_seconds = 0.0;
};

/// Equality over report content as emitted (wall clock excluded).
bool operator==(const AggregateReport& a, const AggregateReport& b);
bool operator!=(const AggregateReport& a, const AggregateReport& b);

/// Wilson 95% score interval for x successes in n trials; {0, 1} when n = 0.
struct WilsonInterval {
    double lower = 0.0;
    double upper = 1.0;
};
WilsonInterval wilson_interval(std::uint64_t x, std::uint64_t n);

/// Runs repetitions x algorithms with derived seeds on a bounded worker
/// pool. Deterministic: the report depends only on the spec minus
/// workers/output fields. Per-run exceptions are recorded as failures
/// without aborting the batch; tree resolution errors propagate.
AggregateReport run_experiment(const ExperimentSpec& spec);

/// Renders the report (CSV: '#' config-echo comments, a header row, one row
/// per (algorithm, statistic) and per (algorithm, leaf); JSON: structured
/// document that parses back to an equal report).
std::string render_report(const AggregateReport& report, ReportFormat format);

/// Writes render_report output to the path ("-" or "" for stdout). IO
/// failures raise Error with the path in the message.
void emit_report(const AggregateReport& report, ReportFormat format, const std::string& path);

/// Inverse of render_report for JSON.
AggregateReport parse_report_json(const std::string& text);

}  // namespace mcts_bai
