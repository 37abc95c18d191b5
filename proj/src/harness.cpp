#include "mcts_bai/harness.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

namespace mcts_bai {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_integer(std::uint64_t v) { return std::to_string(v); }

/// Per-algorithm reward-stream seed, so adding or dropping an algorithm
/// never shifts any other algorithm's draws.
std::uint64_t algorithm_seed(std::uint64_t master_seed, Algorithm algorithm) {
    return mix64(master_seed ^ mix64(0x616C676F00000000ULL + static_cast<std::uint64_t>(algorithm) + 1));
}

struct RunSlot {
    std::uint64_t tau = 0;
    bool correct = false;
    bool capped = false;
    bool failed = false;
    std::vector<std::uint64_t> leaf_pulls;
    std::string error;
};

std::string derive_label(const TreeSource& tree) {
    if (!tree.label.empty()) {
        return tree.label;
    }
    if (!tree.inline_json.empty()) {
        return "inline";
    }
    if (!tree.file.empty()) {
        return "file:" + tree.file;
    }
    return "random:b=" + std::to_string(tree.branching) + ",depth=" + std::to_string(tree.depth);
}

nlohmann::json scalar_or_null(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    return v;
}

nlohmann::json integer_or_null(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    return static_cast<std::uint64_t>(v);
}

double json_scalar(const nlohmann::json& j) {
    if (j.is_null()) {
        return kNan;
    }
    return j.get<double>();
}

}  // namespace

std::string to_string(ReportFormat format) {
    return format == ReportFormat::Csv ? "csv" : "json";
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw DomainError("unknown report format: " + name + " (expected csv or json)");
}

GameTree generate_random_tree(int branching, int depth, std::uint64_t master_seed,
                              std::uint64_t repetition) {
    if (branching < 2 || depth < 1) {
        throw DomainError("random tree needs branching >= 2 and depth >= 1");
    }
    std::mt19937_64 engine = make_stream(master_seed, repetition, kTreeMeansStream);
    GameTree::Builder builder;
    const NodeId root = builder.add_internal(NodeKind::Max, kNoNode);
    auto grow = [&](auto&& self, NodeId parent, int level) -> void {
        for (int i = 0; i < branching; ++i) {
            if (level == depth) {
                builder.add_leaf(canonical_uniform(engine), parent);
            } else {
                const NodeId id = builder.add_internal(
                    level % 2 == 0 ? NodeKind::Max : NodeKind::Min, parent);
                self(self, id, level + 1);
            }
        }
    };
    grow(grow, root, 1);
    return builder.build();
}

WilsonInterval wilson_interval(std::uint64_t x, std::uint64_t n) {
    if (n == 0) {
        return {0.0, 1.0};
    }
    const double z = 1.959963984540054;  // two-sided 95%
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(x) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    // The score interval is exact at the boundary counts; the general formula
    // only reproduces that up to rounding noise.
    const double lower = x == 0 ? 0.0 : std::max(0.0, center - half);
    const double upper = x == n ? 1.0 : std::min(1.0, center + half);
    return {lower, upper};
}

AggregateReport run_experiment(const ExperimentSpec& spec) {
    if (spec.repetitions < 1) {
        throw DomainError("experiment needs at least one repetition");
    }
    if (spec.algorithms.empty()) {
        throw DomainError("experiment needs at least one algorithm");
    }
    const bool has_inline = !spec.tree.inline_json.empty();
    const bool has_file = !spec.tree.file.empty();
    const bool has_generator = spec.tree.branching != 0 || spec.tree.depth != 0;
    if (static_cast<int>(has_inline) + static_cast<int>(has_file) +
            static_cast<int>(has_generator) != 1) {
        throw DomainError("experiment needs exactly one tree source (inline, file or random)");
    }

    std::optional<GameTree> fixed_tree;
    std::optional<TreeAnalysis> fixed_analysis;
    std::size_t leaf_count = 0;
    if (has_inline) {
        fixed_tree = GameTree::from_json(spec.tree.inline_json);
    } else if (has_file) {
        fixed_tree = GameTree::load_file(spec.tree.file);
    }
    if (fixed_tree) {
        fixed_analysis = evaluate_tree(*fixed_tree);
        leaf_count = fixed_tree->leaf_count();
    } else {
        if (spec.tree.branching < 2 || spec.tree.depth < 1) {
            throw DomainError("random tree needs branching >= 2 and depth >= 1");
        }
        leaf_count = 1;
        for (int level = 0; level < spec.tree.depth; ++level) {
            leaf_count *= static_cast<std::size_t>(spec.tree.branching);
        }
    }

    const std::size_t algo_count = spec.algorithms.size();
    const std::uint64_t reps = spec.repetitions;
    std::vector<std::vector<RunSlot>> slots(algo_count);
    for (auto& row : slots) {
        row.resize(reps);
    }

    const std::size_t total_tasks = algo_count * static_cast<std::size_t>(reps);
    std::atomic<std::size_t> next_task{0};
    std::size_t worker_count = std::max(1u, spec.workers);
    worker_count = std::min(worker_count, total_tasks);

    std::vector<Instrumentation> worker_instr(spec.trace ? worker_count : 0);

    auto work = [&](std::size_t worker_index) {
        Instrumentation* instr = spec.trace ? &worker_instr[worker_index] : nullptr;
        for (;;) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= total_tasks) {
                break;
            }
            const std::size_t ai = task / reps;
            const std::uint64_t rep = task % reps;
            RunSlot& slot = slots[ai][static_cast<std::size_t>(rep)];
            try {
                std::optional<GameTree> generated;
                std::optional<TreeAnalysis> generated_analysis;
                const GameTree* tree = fixed_tree ? &*fixed_tree : nullptr;
                const TreeAnalysis* analysis = fixed_analysis ? &*fixed_analysis : nullptr;
                if (tree == nullptr) {
                    generated = generate_random_tree(spec.tree.branching, spec.tree.depth,
                                                     spec.master_seed, rep);
                    generated_analysis = evaluate_tree(*generated);
                    tree = &*generated;
                    analysis = &*generated_analysis;
                }

                AlgorithmConfig config;
                config.algorithm = spec.algorithms[ai];
                config.epsilon = spec.epsilon;
                config.delta = spec.delta;
                config.rate = spec.rate;
                config.ci = spec.ci;
                config.budget_cap = spec.budget_cap;
                // The benchmark experiments run the elimination baseline at
                // epsilon = 0 by letting it eliminate down to one action.
                if (config.algorithm == Algorithm::FindTopWinner && config.epsilon == 0.0) {
                    config.eliminate_to_sole_survivor = true;
                }

                LeafOracle oracle(*tree, algorithm_seed(spec.master_seed, config.algorithm), rep);
                if (instr != nullptr) {
                    instr->analysis = analysis;
                }
                const RunResult run = run_algorithm(*tree, *analysis, oracle, config, instr);
                if (instr != nullptr) {
                    instr->analysis = nullptr;
                }
                slot.tau = run.tau;
                slot.correct = run.correct;
                slot.capped = run.stopped_by == StopReason::BudgetCap;
                slot.leaf_pulls = std::move(run.leaf_pulls);
            } catch (const std::exception& e) {
                slot.failed = true;
                slot.error = e.what();
            }
        }
    };

    const auto start = std::chrono::steady_clock::now();
    if (worker_count <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    const auto end = std::chrono::steady_clock::now();

    AggregateReport report;
    report.tree_label = derive_label(spec.tree);
    report.algorithms = spec.algorithms;
    report.epsilon = spec.epsilon;
    report.delta = spec.delta;
    report.rate = spec.rate;
    report.ci = spec.ci;
    report.repetitions = spec.repetitions;
    report.master_seed = spec.master_seed;
    report.budget_cap = spec.budget_cap;
    report.leaf_count = leaf_count;
    report.wall_clock_seconds = std::chrono::duration<double>(end - start).count();

    for (std::size_t ai = 0; ai < algo_count; ++ai) {
        AlgorithmStats stats;
        stats.algorithm = spec.algorithms[ai];
        std::uint64_t tau_sum = 0;
        std::uint64_t errors = 0;
        std::uint64_t min_tau = std::numeric_limits<std::uint64_t>::max();
        std::uint64_t max_tau = 0;
        std::vector<std::uint64_t> pull_sums(leaf_count, 0);
        for (const RunSlot& slot : slots[ai]) {
            if (slot.failed) {
                ++stats.failures;
                if (stats.failures == 1) {
                    std::cerr << "run failure (" << to_string(stats.algorithm)
                              << "): " << slot.error << "\n";
                }
                continue;
            }
            ++stats.repetitions;
            tau_sum += slot.tau;
            min_tau = std::min(min_tau, slot.tau);
            max_tau = std::max(max_tau, slot.tau);
            errors += slot.correct ? 0 : 1;
            stats.budget_cap_hits += slot.capped ? 1 : 0;
            for (std::size_t l = 0; l < leaf_count; ++l) {
                pull_sums[l] += slot.leaf_pulls[l];
            }
        }
        const std::uint64_t n = stats.repetitions;
        if (n == 0) {
            stats.mean_tau = stats.std_tau = stats.min_tau = stats.max_tau = kNan;
            stats.error_rate = stats.wilson_lower = stats.wilson_upper = kNan;
            stats.mean_leaf_pulls.assign(leaf_count, kNan);
        } else {
            stats.mean_tau = static_cast<double>(tau_sum) / static_cast<double>(n);
            double ss = 0.0;
            for (const RunSlot& slot : slots[ai]) {
                if (!slot.failed) {
                    const double d = static_cast<double>(slot.tau) - stats.mean_tau;
                    ss += d * d;
                }
            }
            stats.std_tau = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            stats.min_tau = static_cast<double>(min_tau);
            stats.max_tau = static_cast<double>(max_tau);
            stats.error_rate = static_cast<double>(errors) / static_cast<double>(n);
            const WilsonInterval wilson = wilson_interval(errors, n);
            stats.wilson_lower = wilson.lower;
            stats.wilson_upper = wilson.upper;
            stats.mean_leaf_pulls.resize(leaf_count);
            for (std::size_t l = 0; l < leaf_count; ++l) {
                stats.mean_leaf_pulls[l] =
                    static_cast<double>(pull_sums[l]) / static_cast<double>(n);
            }
        }
        report.results.push_back(std::move(stats));
    }

    if (spec.trace) {
        Instrumentation total;
        for (const Instrumentation& instr : worker_instr) {
            total.representative_leaf_calls += instr.representative_leaf_calls;
            total.nesting_checks += instr.nesting_checks;
            total.nesting_violations += instr.nesting_violations;
            total.node_coverage_checks += instr.node_coverage_checks;
            total.node_coverage_violations += instr.node_coverage_violations;
            total.pull_bound_checks += instr.pull_bound_checks;
            total.pull_bound_violations += instr.pull_bound_violations;
            total.selection_order_checks += instr.selection_order_checks;
            total.selection_order_violations += instr.selection_order_violations;
        }
        std::cerr << "trace: representative_leaf_calls=" << total.representative_leaf_calls
                  << " nesting=" << total.nesting_violations << "/" << total.nesting_checks
                  << " coverage=" << total.node_coverage_violations << "/"
                  << total.node_coverage_checks << " pull_bound=" << total.pull_bound_violations
                  << "/" << total.pull_bound_checks
                  << " selection_order=" << total.selection_order_violations << "/"
                  << total.selection_order_checks << "\n";
    }

    return report;
}

namespace {

std::string render_csv(const AggregateReport& report) {
    std::ostringstream out;
    out << "# tree: " << report.tree_label << "\n";
    out << "# algorithms: ";
    for (std::size_t i = 0; i < report.algorithms.size(); ++i) {
        out << (i ? "," : "") << to_string(report.algorithms[i]);
    }
    out << "\n";
    out << "# epsilon: " << format_number(report.epsilon) << "\n";
    out << "# delta: " << format_number(report.delta) << "\n";
    out << "# rate: " << to_string(report.rate) << "\n";
    out << "# ci: " << to_string(report.ci) << "\n";
    out << "# repetitions: " << format_integer(report.repetitions) << "\n";
    out << "# seed: " << format_integer(report.master_seed) << "\n";
    out << "# budget_cap: " << format_integer(report.budget_cap) << "\n";
    out << "# leaf_count: " << format_integer(report.leaf_count) << "\n";
    out << "# failures: ";
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        out << (i ? "," : "") << format_integer(report.results[i].failures);
    }
    out << "\n";
    out << "algorithm,statistic,value,wilson_lower,wilson_upper\n";
    for (const AlgorithmStats& stats : report.results) {
        const std::string name = to_string(stats.algorithm);
        auto scalar_row = [&](const char* stat, double value) {
            out << name << "," << stat << ","
                << (std::isnan(value) ? std::string() : format_number(value)) << ",,\n";
        };
        auto integer_row = [&](const char* stat, double value) {
            out << name << "," << stat << ","
                << (std::isnan(value) ? std::string()
                                      : format_integer(static_cast<std::uint64_t>(value)))
                << ",,\n";
        };
        scalar_row("mean_tau", stats.mean_tau);
        scalar_row("std_tau", stats.std_tau);
        integer_row("min_tau", stats.min_tau);
        integer_row("max_tau", stats.max_tau);
        out << name << ",error_rate,"
            << (std::isnan(stats.error_rate) ? std::string() : format_number(stats.error_rate))
            << ","
            << (std::isnan(stats.wilson_lower) ? std::string()
                                               : format_number(stats.wilson_lower))
            << ","
            << (std::isnan(stats.wilson_upper) ? std::string()
                                               : format_number(stats.wilson_upper))
            << "\n";
        out << name << ",budget_cap_hits," << format_integer(stats.budget_cap_hits) << ",,\n";
        for (std::size_t l = 0; l < stats.mean_leaf_pulls.size(); ++l) {
            scalar_row(("leaf_" + std::to_string(l)).c_str(), stats.mean_leaf_pulls[l]);
        }
    }
    return out.str();
}

nlohmann::json report_to_json(const AggregateReport& report) {
    nlohmann::json config;
    config["tree"] = report.tree_label;
    std::vector<std::string> algo_names;
    algo_names.reserve(report.algorithms.size());
    for (Algorithm algorithm : report.algorithms) {
        algo_names.push_back(to_string(algorithm));
    }
    config["algorithms"] = algo_names;
    config["epsilon"] = report.epsilon;
    config["delta"] = report.delta;
    config["rate"] = to_string(report.rate);
    config["ci"] = to_string(report.ci);
    config["repetitions"] = report.repetitions;
    config["seed"] = report.master_seed;
    config["budget_cap"] = report.budget_cap;

    nlohmann::json results = nlohmann::json::array();
    for (const AlgorithmStats& stats : report.results) {
        nlohmann::json entry;
        entry["algorithm"] = to_string(stats.algorithm);
        entry["repetitions"] = stats.repetitions;
        entry["failures"] = stats.failures;
        entry["mean_tau"] = scalar_or_null(stats.mean_tau);
        entry["std_tau"] = scalar_or_null(stats.std_tau);
        entry["min_tau"] = integer_or_null(stats.min_tau);
        entry["max_tau"] = integer_or_null(stats.max_tau);
        entry["error_rate"] = scalar_or_null(stats.error_rate);
        entry["wilson_lower"] = scalar_or_null(stats.wilson_lower);
        entry["wilson_upper"] = scalar_or_null(stats.wilson_upper);
        entry["budget_cap_hits"] = stats.budget_cap_hits;
        if (!stats.mean_leaf_pulls.empty() && !std::isnan(stats.mean_leaf_pulls[0])) {
            entry["mean_leaf_pulls"] = stats.mean_leaf_pulls;
        } else {
            entry["mean_leaf_pulls"] = nullptr;
        }
        results.push_back(std::move(entry));
    }

    nlohmann::json j;
    j["config"] = std::move(config);
    j["leaf_count"] = report.leaf_count;
    j["results"] = std::move(results);
    return j;
}

}  // namespace

std::string render_report(const AggregateReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        return render_csv(report);
    }
    return report_to_json(report).dump(2) + "\n";
}

void emit_report(const AggregateReport& report, ReportFormat format, const std::string& path) {
    const std::string text = render_report(report, format);
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open report path for writing: " + path);
    }
    out << text;
    out.flush();
    if (!out) {
        throw Error("failed while writing report to: " + path);
    }
}

AggregateReport parse_report_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("report JSON parse failure: ") + e.what());
    }
    AggregateReport report;
    const nlohmann::json& config = j.at("config");
    report.tree_label = config.at("tree").get<std::string>();
    for (const auto& name : config.at("algorithms")) {
        report.algorithms.push_back(algorithm_from_string(name.get<std::string>()));
    }
    report.epsilon = config.at("epsilon").get<double>();
    report.delta = config.at("delta").get<double>();
    report.rate = rate_variant_from_string(config.at("rate").get<std::string>());
    report.ci = ci_family_from_string(config.at("ci").get<std::string>());
    report.repetitions = config.at("repetitions").get<std::uint64_t>();
    report.master_seed = config.at("seed").get<std::uint64_t>();
    report.budget_cap = config.at("budget_cap").get<std::uint64_t>();
    report.leaf_count = j.at("leaf_count").get<std::size_t>();
    for (const auto& entry : j.at("results")) {
        AlgorithmStats stats;
        stats.algorithm = algorithm_from_string(entry.at("algorithm").get<std::string>());
        stats.repetitions = entry.at("repetitions").get<std::uint64_t>();
        stats.failures = entry.at("failures").get<std::uint64_t>();
        stats.mean_tau = json_scalar(entry.at("mean_tau"));
        stats.std_tau = json_scalar(entry.at("std_tau"));
        stats.min_tau = json_scalar(entry.at("min_tau"));
        stats.max_tau = json_scalar(entry.at("max_tau"));
        stats.error_rate = json_scalar(entry.at("error_rate"));
        stats.wilson_lower = json_scalar(entry.at("wilson_lower"));
        stats.wilson_upper = json_scalar(entry.at("wilson_upper"));
        stats.budget_cap_hits = entry.at("budget_cap_hits").get<std::uint64_t>();
        if (entry.at("mean_leaf_pulls").is_null()) {
            stats.mean_leaf_pulls.assign(report.leaf_count, kNan);
        } else {
            stats.mean_leaf_pulls = entry.at("mean_leaf_pulls").get<std::vector<double>>();
        }
        report.results.push_back(std::move(stats));
    }
    return report;
}

bool operator==(const AggregateReport& a, const AggregateReport& b) {
    return report_to_json(a) == report_to_json(b);
}

bool operator!=(const AggregateReport& a, const AggregateReport& b) { return !(a == b); }

}  // namespace mcts_bai
