// Acceptance gate: runs the seven release criteria end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.
//
//   acceptance_tests [--criterion N] [--workers W]

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mcts_bai/algorithms.hpp"
#include "mcts_bai/bounds.hpp"
#include "mcts_bai/confidence.hpp"
#include "mcts_bai/harness.hpp"
#include "mcts_bai/oracle.hpp"
#include "mcts_bai/presets.hpp"
#include "mcts_bai/tree.hpp"

using namespace mcts_bai;

namespace {

unsigned g_workers = std::max(1u, std::thread::hardware_concurrency());

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

void expect_within(Check& check, const std::string& name, double value, double target,
                   double fraction) {
    const double low = target * (1.0 - fraction);
    const double high = target * (1.0 + fraction);
    check.expect(value >= low && value <= high,
                 name + " = " + fmt(value) + " outside [" + fmt(low) + ", " + fmt(high) + "]");
}

void expect_error_rate(Check& check, const AlgorithmStats& stats, double cap) {
    check.expect(stats.error_rate <= cap, to_string(stats.algorithm) + " error rate " +
                                              fmt(stats.error_rate) + " > " + fmt(cap));
}

const AlgorithmStats& stats_for(const AggregateReport& report, Algorithm algorithm) {
    for (const AlgorithmStats& stats : report.results) {
        if (stats.algorithm == algorithm) {
            return stats;
        }
    }
    throw Error("algorithm missing from report: " + to_string(algorithm));
}

AggregateReport run_preset(const std::string& name) {
    ExperimentSpec spec = preset_spec(name);
    spec.workers = g_workers;
    return run_experiment(spec);
}

// Criterion 1: depth-two benchmark, 1000 repetitions per algorithm.
Check criterion_1() {
    Check check;
    const AggregateReport report = run_preset("fig2");
    const AlgorithmStats& lucb = stats_for(report, Algorithm::LucbMcts);
    const AlgorithmStats& ugape = stats_for(report, Algorithm::UgapeMcts);
    const AlgorithmStats& ftw = stats_for(report, Algorithm::FindTopWinner);
    const AlgorithmStats& mlucb = stats_for(report, Algorithm::MLucb);
    expect_within(check, "lucb mean tau", lucb.mean_tau, 2460.0, 0.15);
    expect_within(check, "ugape mean tau", ugape.mean_tau, 2419.0, 0.15);
    expect_within(check, "ftw mean tau", ftw.mean_tau, 17097.0, 0.25);
    check.expect(ftw.mean_tau >= 5.0 * lucb.mean_tau, "ftw mean tau " + fmt(ftw.mean_tau) +
                                                          " < 5x lucb " + fmt(lucb.mean_tau));
    expect_within(check, "mlucb mean tau", mlucb.mean_tau, 2399.0, 0.15);
    for (const AlgorithmStats& stats : report.results) {
        expect_error_rate(check, stats, 0.02);
    }
    check.expect(report.wall_clock_seconds <= 300.0,
                 "runtime " + fmt(report.wall_clock_seconds) + "s > 300s");
    return check;
}

// Criterion 2: depth-three benchmark.
Check criterion_2() {
    Check check;
    const AggregateReport report = run_preset("fig3");
    expect_within(check, "lucb mean tau", stats_for(report, Algorithm::LucbMcts).mean_tau, 1551.0,
                  0.15);
    expect_within(check, "ugape mean tau", stats_for(report, Algorithm::UgapeMcts).mean_tau,
                  1584.0, 0.15);
    expect_within(check, "ftw mean tau", stats_for(report, Algorithm::FindTopWinner).mean_tau,
                  20730.0, 0.25);
    for (const AlgorithmStats& stats : report.results) {
        expect_error_rate(check, stats, 0.02);
    }
    check.expect(report.wall_clock_seconds <= 600.0,
                 "runtime " + fmt(report.wall_clock_seconds) + "s > 600s");
    return check;
}

// Criterion 3: random ensemble of 100 ten-ary depth-three trees.
Check criterion_3() {
    Check check;
    const AggregateReport report = run_preset("ensemble");
    expect_within(check, "lucb mean tau", stats_for(report, Algorithm::LucbMcts).mean_tau,
                  141811.0, 0.20);
    expect_within(check, "ugape mean tau", stats_for(report, Algorithm::UgapeMcts).mean_tau,
                  142953.0, 0.20);
    expect_within(check, "ftw mean tau", stats_for(report, Algorithm::FindTopWinner).mean_tau,
                  2254560.0, 0.25);
    for (const AlgorithmStats& stats : report.results) {
        check.expect(stats.error_rate == 0.0,
                     to_string(stats.algorithm) + " made " + fmt(stats.error_rate * 100.0) +
                         "% errors (expected none)");
        check.expect(stats.failures == 0, to_string(stats.algorithm) + " had failed runs");
    }
    check.expect(report.wall_clock_seconds <= 1800.0,
                 "runtime " + fmt(report.wall_clock_seconds) + "s > 1800s");
    return check;
}

// Criterion 4: depth-two lower-bound solver on the benchmark matrix.
Check criterion_4() {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    const GameTree tree = GameTree::from_json(fig2_tree_json());
    const LowerBoundSolution sol = solve_depth_two_lower_bound(tree, 0.1);
    check.expect(sol.converged, "solver did not converge");
    expect_within(check, "characteristic time", sol.characteristic_time, 259.9, 0.01);
    expect_within(check, "lower bound at delta 0.1", sol.lower_bound_at_delta, 456.9, 0.01);

    const MeanMatrix expected = {{0.3633, 0.1057, 0.0532}, {0.3738, 0.0, 0.0}, {0.1040, 0.0, 0.0}};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        for (std::size_t j = 0; j < expected[i].size(); ++j) {
            const double got = sol.weights[i][j];
            if (i >= 1 && j >= 1) {
                check.expect(got == 0.0, "weight[" + std::to_string(i) + "][" + std::to_string(j) +
                                             "] = " + fmt(got) + " not exactly 0");
            } else {
                check.expect(std::abs(got - expected[i][j]) <= 0.005,
                             "weight[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                                 fmt(got) + " off target " + fmt(expected[i][j]));
            }
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(seconds <= 60.0, "runtime " + fmt(seconds) + "s > 60s");
    return check;
}

// Criterion 5: divergence value and the d(delta, 1-delta) floor.
Check criterion_5() {
    Check check;
    check.expect(std::abs(kl_div(0.1, 0.9) - 1.757780) <= 1e-6,
                 "kl_div(0.1, 0.9) = " + fmt(kl_div(0.1, 0.9)));
    for (double delta = 1e-6; delta <= 0.5; delta *= 1.2) {
        const bool holds = kl_div(delta, 1.0 - delta) >= std::log(1.0 / (2.4 * delta));
        check.expect(holds, "floor fails at delta " + fmt(delta));
        if (!holds) {
            break;
        }
    }
    return check;
}

// Criterion 6: invariant suite (a)-(h).
Check criterion_6() {
    Check check;

    // (a)-(d): instrumented runs on random trees; every self-check counter
    // must have fired and none may have recorded a violation.
    {
        Instrumentation instr;
        std::uint64_t runs = 0;
        std::mt19937_64 engine(20260814);
        for (std::uint64_t rep = 0; rep < 60; ++rep) {
            const int branching = 2 + static_cast<int>(engine() % 3);
            const int depth = 2 + static_cast<int>(engine() % 2);
            const GameTree tree = generate_random_tree(branching, depth, 4242, rep);
            const TreeAnalysis analysis = evaluate_tree(tree);
            if (analysis.ambiguous_best) {
                continue;
            }
            instr.analysis = &analysis;
            for (Algorithm algorithm :
                 {Algorithm::UgapeMcts, Algorithm::LucbMcts, Algorithm::LucbMctsTwoLeaf}) {
                AlgorithmConfig config;
                config.algorithm = algorithm;
                config.epsilon = 0.01;
                config.delta = 0.1;
                config.rate = RateVariant::Experiments;
                config.budget_cap = 500000;
                LeafOracle oracle(tree, 515151, rep);
                instr.reset_run();
                run_algorithm(tree, analysis, oracle, config, &instr);
                ++runs;
            }
        }
        check.expect(runs >= 100, "(a-d) only " + std::to_string(runs) + " instrumented runs");
        check.expect(instr.node_coverage_checks > 0, "(a) no node-coverage checks ran");
        check.expect(instr.node_coverage_violations == 0,
                     "(a) " + std::to_string(instr.node_coverage_violations) +
                         " node-coverage violations");
        check.expect(instr.pull_bound_checks > 0, "(c) no pull-bound checks ran");
        check.expect(instr.pull_bound_violations == 0,
                     "(c) " + std::to_string(instr.pull_bound_violations) +
                         " pull-bound violations");
        check.expect(instr.selection_order_checks > 0, "(d) no selection-order checks ran");
        check.expect(instr.selection_order_violations == 0,
                     "(d) " + std::to_string(instr.selection_order_violations) +
                         " selection-order violations");

        // (b) continued below; the runs above already contribute calls.
        std::uint64_t rep2 = 0;
        while (instr.representative_leaf_calls < 1000000) {
            const GameTree tree = generate_random_tree(3, 3, 99887, rep2);
            SearchState state(tree, ExplorationRate(RateVariant::Experiments, tree.leaf_count(), 0.3),
                              CiFamily::KlBernoulli);
            state.attach(&instr);
            LeafOracle oracle(tree, 31337, rep2);
            std::mt19937_64 pick(rep2);
            for (int step = 0; step < 400; ++step) {
                const NodeId leaf =
                    tree.leaf(static_cast<std::int32_t>(pick() % tree.leaf_count()));
                state.observe(leaf, oracle.draw(leaf));
                state.representative_leaf(tree.root());
                for (NodeId child : tree.node(tree.root()).children) {
                    state.representative_leaf(child);
                }
            }
            ++rep2;
        }
        check.expect(instr.nesting_checks >= 1000000,
                     "(b) only " + std::to_string(instr.nesting_checks) + " nesting checks");
        check.expect(instr.nesting_violations == 0,
                     "(b) " + std::to_string(instr.nesting_violations) + " nesting violations");
    }

    // (e) run-level error with the theoretical rate stays within delta.
    {
        ExperimentSpec spec;
        spec.tree.label = "two-leaf calibration";
        spec.tree.inline_json = twoleaf_tree_json();
        spec.algorithms = {Algorithm::UgapeMcts, Algorithm::LucbMcts};
        spec.epsilon = 0.0;
        spec.delta = 0.1;
        spec.rate = RateVariant::Theoretical;
        spec.repetitions = 1000;
        spec.master_seed = 606060;
        spec.workers = g_workers;
        const AggregateReport report = run_experiment(spec);
        for (const AlgorithmStats& stats : report.results) {
            check.expect(stats.failures == 0, "(e) " + to_string(stats.algorithm) + " had failures");
            check.expect(stats.error_rate <= 0.1, "(e) " + to_string(stats.algorithm) +
                                                      " error rate " + fmt(stats.error_rate) +
                                                      " > delta = 0.1");
        }
    }

    // (f) log-log inversion sandwich against brute force.
    {
        for (double a : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            for (double C : {1.5, std::log(10.0), 4.0, 9.2}) {
                const LogLogInversion inv = invert_loglog(a, C);
                auto margin = [&](double s) {
                    return a * (C + 1.5 * std::log1p(std::log(s))) - s;
                };
                std::uint64_t hi = 2;
                while (margin(static_cast<double>(hi)) >= 0.0) {
                    hi *= 2;
                }
                std::uint64_t lo = hi / 2;
                while (hi - lo > 1) {
                    const std::uint64_t mid = lo + (hi - lo) / 2;
                    (margin(static_cast<double>(mid)) >= 0.0 ? lo : hi) = mid;
                }
                const double sup = static_cast<double>(lo);
                const bool ok = inv.lower <= sup + 1.0 && sup <= inv.upper;
                check.expect(ok, "(f) sandwich misses brute force at a=" + fmt(a) +
                                     ", C=" + fmt(C) + " (sup " + fmt(sup) + ", [" +
                                     fmt(inv.lower) + ", " + fmt(inv.upper) + "])");
            }
        }
    }

    // (g) incremental propagation equals full recomputation.
    {
        std::mt19937_64 engine(777001);
        for (int t = 0; t < 100; ++t) {
            const GameTree tree = generate_random_tree(2 + static_cast<int>(engine() % 2),
                                                       2 + static_cast<int>(engine() % 2), 1000,
                                                       static_cast<std::uint64_t>(t));
            SearchState incremental(
                tree, ExplorationRate(RateVariant::Experiments, tree.leaf_count(), 0.4),
                CiFamily::KlBernoulli);
            SearchState full = incremental;
            LeafOracle oracle(tree, 515, static_cast<std::uint64_t>(t));
            for (int step = 0; step < 200; ++step) {
                const NodeId leaf =
                    tree.leaf(static_cast<std::int32_t>(engine() % tree.leaf_count()));
                const double reward = oracle.draw(leaf);
                incremental.observe(leaf, reward);
                full.observe_raw(leaf, reward);
                full.full_recompute();
                for (NodeId node = 0; node < static_cast<NodeId>(tree.node_count()); ++node) {
                    const Interval a = incremental.interval(node);
                    const Interval b = full.interval(node);
                    if (a.lower != b.lower || a.upper != b.upper) {
                        check.expect(false, "(g) interval mismatch at tree " + std::to_string(t) +
                                                " node " + std::to_string(node));
                        t = 100;
                        step = 200;
                        break;
                    }
                }
            }
        }
    }

    // (h) reports are byte-identical across worker counts.
    {
        ExperimentSpec spec;
        spec.tree.label = "worker determinism probe";
        spec.tree.inline_json = fig2_tree_json();
        spec.algorithms = {Algorithm::UgapeMcts, Algorithm::FindTopWinner};
        spec.epsilon = 0.0;
        spec.delta = 0.9;
        spec.repetitions = 40;
        spec.master_seed = 321321;
        spec.workers = 1;
        const std::string one = render_report(run_experiment(spec), ReportFormat::Json);
        spec.workers = 5;
        const std::string five = render_report(run_experiment(spec), ReportFormat::Json);
        spec.workers = 16;
        const std::string sixteen = render_report(run_experiment(spec), ReportFormat::Json);
        check.expect(one == five && five == sixteen,
                     "(h) reports differ across 1/5/16 workers");
    }

    return check;
}

// Criterion 7: stopping-time bound calculators hold on the calibration tree.
Check criterion_7() {
    Check check;
    const GameTree tree = GameTree::from_json(twoleaf_tree_json());
    const TreeAnalysis analysis = evaluate_tree(tree);
    const double ugape_bound = ugape_sample_bound(analysis, 0.0, 0.1, tree.leaf_count());
    const double two_leaf_bound = two_leaf_lucb_sample_bound(analysis, 0.0, 0.1, tree.leaf_count());

    struct Case {
        Algorithm algorithm;
        double bound;
    };
    for (const Case& c : {Case{Algorithm::UgapeMcts, ugape_bound},
                          Case{Algorithm::LucbMctsTwoLeaf, two_leaf_bound}}) {
        AlgorithmConfig config;
        config.algorithm = c.algorithm;
        config.epsilon = 0.0;
        config.delta = 0.1;
        config.rate = RateVariant::Theoretical;
        std::uint64_t within = 0;
        for (std::uint64_t rep = 0; rep < 1000; ++rep) {
            LeafOracle oracle(tree, 910910, rep);
            const RunResult run = run_algorithm(tree, analysis, oracle, config);
            if (static_cast<double>(run.tau) <= c.bound) {
                ++within;
            }
        }
        check.expect(within >= 990, to_string(c.algorithm) + ": only " + std::to_string(within) +
                                        "/1000 runs within the bound " + fmt(c.bound));
    }
    return check;
}

const char* kDescriptions[7] = {
    "depth-two benchmark means and error rates",
    "depth-three benchmark means and error rates",
    "random-ensemble means with zero errors",
    "lower-bound solver T*, weights and bound value",
    "divergence value and d(delta, 1-delta) floor",
    "invariant suite (coverage, nesting, pull bounds, selection, error, sandwich, propagation, determinism)",
    "stopping-time bound calculators on the calibration tree",
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
            g_workers = static_cast<unsigned>(std::max(1, std::atoi(argv[++i])));
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N] [--workers W]\n", argv[0]);
            return 2;
        }
    }

    Check (*criteria[7])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                              criterion_5, criterion_6, criterion_7};
    int failures = 0;
    for (int n = 1; n <= 7; ++n) {
        if (only != 0 && only != n) {
            continue;
        }
        Check result;
        try {
            result = criteria[n - 1]();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail << "exception: " << e.what();
        }
        if (result.ok) {
            std::printf("PASS criterion %d: %s\n", n, kDescriptions[n - 1]);
        } else {
            std::printf("FAIL criterion %d: %s (%s)\n", n, kDescriptions[n - 1],
                        result.detail.str().c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures;
}
