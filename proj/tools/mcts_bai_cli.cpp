#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mcts_bai/bounds.hpp"
#include "mcts_bai/harness.hpp"
#include "mcts_bai/presets.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

std::vector<mcts_bai::Algorithm> parse_algorithms(const std::string& list) {
    std::vector<mcts_bai::Algorithm> algorithms;
    std::stringstream stream(list);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (!token.empty()) {
            algorithms.push_back(mcts_bai::algorithm_from_string(token));
        }
    }
    if (algorithms.empty()) {
        throw mcts_bai::DomainError("empty algorithm list");
    }
    return algorithms;
}

/// Parses "b=10,depth=3".
void parse_random_source(const std::string& text, mcts_bai::TreeSource& tree) {
    int branching = 0;
    int depth = 0;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw mcts_bai::DomainError("bad --random item (want key=value): " + token);
        }
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        try {
            if (key == "b" || key == "branching") {
                branching = std::stoi(value);
            } else if (key == "depth" || key == "d") {
                depth = std::stoi(value);
            } else {
                throw mcts_bai::DomainError("unknown --random key: " + key);
            }
        } catch (const std::logic_error&) {
            throw mcts_bai::DomainError("bad --random value: " + token);
        }
    }
    if (branching < 2 || depth < 1) {
        throw mcts_bai::DomainError("--random needs b >= 2 and depth >= 1");
    }
    tree = mcts_bai::TreeSource{};
    tree.branching = branching;
    tree.depth = depth;
}

struct RunOptions {
    std::string tree_file;
    std::string random_spec;
    std::string preset;
    std::string algorithms = "lucb";
    double epsilon = 0.0;
    double delta = 0.1;
    std::string rate = "experiments";
    std::string ci = "kl";
    std::uint64_t reps = 1000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out;
    std::string format = "csv";
    bool trace = false;
};

int do_run(const RunOptions& options, const CLI::App& cmd) {
    mcts_bai::ExperimentSpec spec;
    if (!options.preset.empty()) {
        spec = mcts_bai::preset_spec(options.preset);
    }
    if (!options.tree_file.empty()) {
        spec.tree = mcts_bai::TreeSource{};
        spec.tree.file = options.tree_file;
    }
    if (!options.random_spec.empty()) {
        parse_random_source(options.random_spec, spec.tree);
    }
    auto given = [&](const std::string& name) { return cmd.count(name) > 0; };
    if (options.preset.empty() || given("--algo")) {
        spec.algorithms = parse_algorithms(options.algorithms);
    }
    if (options.preset.empty() || given("--epsilon")) spec.epsilon = options.epsilon;
    if (options.preset.empty() || given("--delta")) spec.delta = options.delta;
    if (options.preset.empty() || given("--beta")) {
        spec.rate = mcts_bai::rate_variant_from_string(options.rate);
    }
    if (options.preset.empty() || given("--ci")) {
        spec.ci = mcts_bai::ci_family_from_string(options.ci);
    }
    if (options.preset.empty() || given("--reps")) spec.repetitions = options.reps;
    if (options.preset.empty() || given("--seed")) spec.master_seed = options.seed;
    spec.workers = options.workers;
    spec.out_path = options.out;
    spec.format = mcts_bai::report_format_from_string(options.format);
    spec.trace = options.trace;

    const mcts_bai::AggregateReport report = mcts_bai::run_experiment(spec);
    std::cerr << "wall clock: " << report.wall_clock_seconds << " s\n";
    mcts_bai::emit_report(report, spec.format, spec.out_path);
    return 0;
}

struct BoundsOptions {
    std::string tree_file;
    double delta = 0.1;
    double epsilon = 0.0;
};

int do_bounds(const BoundsOptions& options) {
    const mcts_bai::GameTree tree = mcts_bai::GameTree::load_file(options.tree_file);
    const mcts_bai::TreeAnalysis analysis = mcts_bai::evaluate_tree(tree);

    nlohmann::json j;
    j["tree"] = "file:" + options.tree_file;
    j["leaf_count"] = tree.leaf_count();
    j["epsilon"] = options.epsilon;
    j["delta"] = options.delta;
    j["complexity_standard"] = mcts_bai::complexity_term(tree, analysis, options.epsilon,
                                                         mcts_bai::GapVariant::Standard);
    j["complexity_below_top"] = mcts_bai::complexity_term(tree, analysis, options.epsilon,
                                                          mcts_bai::GapVariant::BelowTop);
    j["ugape_sample_bound"] = mcts_bai::ugape_sample_bound(analysis, options.epsilon,
                                                           options.delta, tree.leaf_count());
    j["two_leaf_lucb_sample_bound"] = mcts_bai::two_leaf_lucb_sample_bound(
        analysis, options.epsilon, options.delta, tree.leaf_count());

    try {
        const mcts_bai::LowerBoundSolution solution =
            mcts_bai::solve_depth_two_lower_bound(tree, options.delta);
        nlohmann::json lower;
        lower["characteristic_time"] = solution.characteristic_time;
        lower["objective"] = solution.objective;
        lower["weights"] = solution.weights;
        lower["lower_bound_at_delta"] = solution.lower_bound_at_delta;
        lower["iterations"] = solution.iterations;
        lower["converged"] = solution.converged;
        j["depth_two"] = std::move(lower);
    } catch (const mcts_bai::NotDepthTwoError&) {
        j["depth_two"] = nullptr;
    }

    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixed-confidence best-action identification in stochastic game trees"};
    app.require_subcommand(1);

    RunOptions run_options;
    CLI::App* run = app.add_subcommand("run", "Run repeated identification experiments");
    run->add_option("--tree", run_options.tree_file, "Tree JSON file");
    run->add_option("--random", run_options.random_spec,
                    "Random full tree source, e.g. b=10,depth=3 (fresh tree per repetition)");
    run->add_option("--preset", run_options.preset, "Canned experiment: fig2, fig3 or ensemble");
    run->add_option("--algo", run_options.algorithms,
                    "Comma-separated: ugape, lucb, lucb2, ftw, mlucb");
    run->add_option("--epsilon", run_options.epsilon, "Slack of the identification target");
    run->add_option("--delta", run_options.delta, "Risk budget");
    run->add_option("--beta", run_options.rate,
                    "Exploration rate: theoretical, practical or experiments");
    run->add_option("--ci", run_options.ci, "Confidence intervals: hoeffding or kl");
    run->add_option("--reps", run_options.reps, "Repetitions");
    run->add_option("--seed", run_options.seed, "Master seed");
    run->add_option("--workers", run_options.workers, "Worker threads");
    run->add_option("--out", run_options.out, "Report path (default stdout)");
    run->add_option("--format", run_options.format, "csv or json");
    run->add_flag("--trace", run_options.trace, "Print self-check counters to stderr");

    BoundsOptions bounds_options;
    CLI::App* bounds = app.add_subcommand(
        "bounds", "Print complexity terms, sample-complexity bounds and the depth-two lower bound");
    bounds->add_option("--tree", bounds_options.tree_file, "Tree JSON file")->required();
    bounds->add_option("--delta", bounds_options.delta, "Risk budget");
    bounds->add_option("--epsilon", bounds_options.epsilon, "Slack of the identification target");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            return do_run(run_options, *run);
        }
        return do_bounds(bounds_options);
    } catch (const mcts_bai::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
