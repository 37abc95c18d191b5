#include "mcts_bai/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace mcts_bai {

namespace {

/// Elimination baseline constants. The round schedule is
///   n_r = ceil(kRoundSampleScale * (2 / eps_r^2) * ln(16 L / (eps_r delta)))
/// cumulative pulls per surviving leaf, and a node is pruned when its
/// estimate strays from its parent's by more than kPruneMarginScale * eps_r.
/// kRoundSampleScale = 1 keeps the textbook count; the margin is calibrated
/// so that pruning fires one round earlier than the worst-case analysis
/// requires, which matches the benchmark pull counts.
constexpr double kRoundSampleScale = 1.0;
constexpr double kPruneMarginScale = 0.85;

const std::vector<NodeId>& root_children_checked(const GameTree& tree) {
    const auto& children = tree.node(tree.root()).children;
    if (children.size() < 2) {
        throw SingleActionError("root has a single action; nothing to identify");
    }
    return children;
}

void finish(RunResult& result, const TreeAnalysis& analysis, double epsilon,
            std::uint64_t tau) {
    result.tau = tau;
    result.correct =
        analysis.values[static_cast<std::size_t>(analysis.best_action)] -
            analysis.values[static_cast<std::size_t>(result.recommendation)] <=
        epsilon + kTieTolerance;
}

/// Immediate result for a root with one child: the answer needs no samples.
bool trivial_single_action(const GameTree& tree, RunResult& result) {
    const auto& children = tree.node(tree.root()).children;
    if (children.size() != 1) {
        return false;
    }
    result.recommendation = children[0];
    result.tau = 0;
    result.correct = true;
    result.stopped_by = StopReason::StoppingRule;
    return true;
}

void draw_into(SearchState& state, LeafOracle& oracle, RunResult& result, NodeId leaf) {
    const double reward = oracle.draw(leaf);
    state.observe(leaf, reward);
    ++result.leaf_pulls[static_cast<std::size_t>(state.tree().node(leaf).leaf_index)];
}

/// Pull-count self-check on runs whose intervals have covered the truth so
/// far: the leaf selected at time t obeys
///   N <= 8 beta(N) / max(leaf gap, root gap, epsilon)^2.
void check_pull_bound(const SearchState& state, Instrumentation* instr, NodeId leaf,
                      double epsilon) {
    if (instr == nullptr || instr->analysis == nullptr || !instr->leaf_intervals_valid) {
        return;
    }
    const std::int32_t rank = state.tree().node(leaf).leaf_index;
    const std::uint64_t pulls = state.pulls(leaf);
    if (pulls == 0) {
        return;
    }
    const double gap = std::max({instr->analysis->leaf_gaps[static_cast<std::size_t>(rank)],
                                 instr->analysis->root_gap, epsilon});
    if (!(gap > 0.0) || !std::isfinite(gap)) {
        return;
    }
    ++instr->pull_bound_checks;
    const double limit = 8.0 * state.rate()(pulls) / (gap * gap);
    if (static_cast<double>(pulls) > limit * (1.0 + 1e-9) + 1e-9) {
        ++instr->pull_bound_violations;
    }
}

}  // namespace

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::UgapeMcts:
            return "ugape";
        case Algorithm::LucbMcts:
            return "lucb";
        case Algorithm::LucbMctsTwoLeaf:
            return "lucb2";
        case Algorithm::FindTopWinner:
            return "ftw";
        case Algorithm::MLucb:
            return "mlucb";
    }
    std::abort();
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "ugape") return Algorithm::UgapeMcts;
    if (name == "lucb") return Algorithm::LucbMcts;
    if (name == "lucb2") return Algorithm::LucbMctsTwoLeaf;
    if (name == "ftw") return Algorithm::FindTopWinner;
    if (name == "mlucb") return Algorithm::MLucb;
    throw DomainError("unknown algorithm name: " + name +
                      " (expected ugape, lucb, lucb2, ftw or mlucb)");
}

PromisingPair ugape_promising(const SearchState& state) {
    const auto& children = root_children_checked(state.tree());

    double best_upper = -std::numeric_limits<double>::infinity();
    double second_upper = -std::numeric_limits<double>::infinity();
    std::size_t best_upper_at = 0;
    for (std::size_t i = 0; i < children.size(); ++i) {
        const double u = state.interval(children[i]).upper;
        if (u > best_upper) {
            second_upper = best_upper;
            best_upper = u;
            best_upper_at = i;
        } else if (u > second_upper) {
            second_upper = u;
        }
    }

    PromisingPair pair;
    pair.gap_indices.resize(children.size());
    std::size_t best_at = 0;
    for (std::size_t i = 0; i < children.size(); ++i) {
        const double others_upper = i == best_upper_at ? second_upper : best_upper;
        pair.gap_indices[i] = others_upper - state.interval(children[i]).lower;
        if (pair.gap_indices[i] < pair.gap_indices[best_at]) {
            best_at = i;
        }
    }
    pair.best = children[best_at];

    std::size_t challenger_at = best_at == 0 ? 1 : 0;
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (i == best_at) {
            continue;
        }
        if (state.interval(children[i]).upper > state.interval(children[challenger_at]).upper) {
            challenger_at = i;
        }
    }
    pair.challenger = children[challenger_at];
    return pair;
}

PromisingPair lucb_promising(const SearchState& state) {
    const auto& children = root_children_checked(state.tree());

    PromisingPair pair;
    std::size_t best_at = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < children.size(); ++i) {
        const NodeId leaf = state.representative_leaf(children[i]);
        const double value = state.empirical_mean(leaf);
        if (value > best_value) {
            best_value = value;
            best_at = i;
        }
    }
    pair.best = children[best_at];

    std::size_t challenger_at = best_at == 0 ? 1 : 0;
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (i == best_at) {
            continue;
        }
        if (state.interval(children[i]).upper > state.interval(children[challenger_at]).upper) {
            challenger_at = i;
        }
    }
    pair.challenger = children[challenger_at];
    return pair;
}

NodeId select_among_pair(const SearchState& state, const PromisingPair& pair) {
    return state.interval(pair.challenger).width() > state.interval(pair.best).width()
               ? pair.challenger
               : pair.best;
}

bool stopping_rule(const SearchState& state, const PromisingPair& pair, double epsilon) {
    return state.interval(pair.challenger).upper - state.interval(pair.best).lower < epsilon;
}

RunResult run_bai_mcts(const GameTree& tree, const TreeAnalysis& analysis, LeafOracle& oracle,
                       const AlgorithmConfig& config, Instrumentation* instr) {
    RunResult result;
    result.leaf_pulls.assign(tree.leaf_count(), 0);
    if (trivial_single_action(tree, result)) {
        return result;
    }

    ExplorationRate rate(config.rate, tree.leaf_count(), config.delta);
    SearchState state(tree, rate, config.ci);
    state.attach(instr);
    if (instr != nullptr) {
        instr->reset_run();
    }

    const bool gap_index_rule = config.algorithm == Algorithm::UgapeMcts;
    const bool two_leaf = config.algorithm == Algorithm::LucbMctsTwoLeaf;

    while (true) {
        const PromisingPair pair = gap_index_rule ? ugape_promising(state) : lucb_promising(state);
        const double stop_gap =
            state.interval(pair.challenger).upper - state.interval(pair.best).lower;
        if (stop_gap < config.epsilon) {
            result.recommendation = pair.best;
            result.stopped_by = StopReason::StoppingRule;
            break;
        }
        if (state.total_pulls() >= config.budget_cap) {
            result.recommendation = pair.best;
            result.stopped_by = StopReason::BudgetCap;
            break;
        }

        if (two_leaf) {
            const NodeId leaf_best = state.representative_leaf(pair.best);
            const NodeId leaf_challenger = state.representative_leaf(pair.challenger);
            if (instr != nullptr && instr->record_rounds) {
                instr->rounds.push_back({state.total_pulls(), pair.best, pair.challenger, kNoNode,
                                         leaf_best, stop_gap});
            }
            draw_into(state, oracle, result, leaf_best);
            if (state.total_pulls() >= config.budget_cap) {
                result.recommendation = pair.best;
                result.stopped_by = StopReason::BudgetCap;
                break;
            }
            draw_into(state, oracle, result, leaf_challenger);
        } else {
            const NodeId chosen = select_among_pair(state, pair);
            if (instr != nullptr && gap_index_rule) {
                ++instr->selection_order_checks;
                const bool dominated =
                    chosen == pair.best
                        ? state.interval(pair.challenger).upper <=
                              state.interval(pair.best).upper + kTieTolerance
                        : state.interval(pair.challenger).lower <=
                              state.interval(pair.best).lower + kTieTolerance;
                if (!dominated) {
                    ++instr->selection_order_violations;
                }
            }
            const NodeId leaf = state.representative_leaf(chosen);
            if (gap_index_rule) {
                check_pull_bound(state, instr, leaf, config.epsilon);
            }
            if (instr != nullptr && instr->record_rounds) {
                instr->rounds.push_back(
                    {state.total_pulls(), pair.best, pair.challenger, chosen, leaf, stop_gap});
            }
            draw_into(state, oracle, result, leaf);
        }
    }

    finish(result, analysis, config.epsilon, state.total_pulls());
    return result;
}

RunResult run_find_top_winner(const GameTree& tree, const TreeAnalysis& analysis,
                              LeafOracle& oracle, const AlgorithmConfig& config,
                              Instrumentation* instr) {
    if (config.epsilon <= 0.0 && !config.eliminate_to_sole_survivor) {
        throw EpsilonZeroUnsupportedError(
            "the elimination baseline's precision schedule never reaches epsilon = 0; "
            "set eliminate_to_sole_survivor to run until one action remains");
    }
    (void)instr;

    RunResult result;
    result.leaf_pulls.assign(tree.leaf_count(), 0);
    if (trivial_single_action(tree, result)) {
        return result;
    }
    const auto& actions = tree.node(tree.root()).children;

    const std::size_t node_count = tree.node_count();
    std::vector<char> alive(node_count, 1);
    std::vector<double> estimate(node_count, 0.0);
    std::vector<std::uint64_t> counts(tree.leaf_count(), 0);
    std::vector<double> sums(tree.leaf_count(), 0.0);
    std::uint64_t total = 0;
    bool capped = false;

    auto best_alive_action = [&]() {
        NodeId best = kNoNode;
        for (NodeId action : actions) {
            if (alive[static_cast<std::size_t>(action)] &&
                (best == kNoNode || estimate[static_cast<std::size_t>(action)] >
                                        estimate[static_cast<std::size_t>(best)])) {
                best = action;
            }
        }
        return best;
    };

    for (int round = 1;; ++round) {
        const double round_eps = std::ldexp(1.0, -round);
        const double target_real =
            std::ceil(kRoundSampleScale * (2.0 / (round_eps * round_eps)) *
                      std::log(16.0 * static_cast<double>(tree.leaf_count()) /
                               (round_eps * config.delta)));
        const std::uint64_t target =
            target_real >= 9.0e18 ? std::numeric_limits<std::uint64_t>::max()
                                  : static_cast<std::uint64_t>(target_real);

        for (std::size_t rank = 0; rank < tree.leaf_count() && !capped; ++rank) {
            const NodeId leaf = tree.leaf(static_cast<std::int32_t>(rank));
            if (!alive[static_cast<std::size_t>(leaf)]) {
                continue;
            }
            while (counts[rank] < target) {
                if (total >= config.budget_cap) {
                    capped = true;
                    break;
                }
                sums[rank] += oracle.draw(leaf);
                ++counts[rank];
                ++result.leaf_pulls[rank];
                ++total;
            }
        }

        for (std::size_t i = node_count; i-- > 0;) {
            const NodeId id = static_cast<NodeId>(i);
            if (!alive[i]) {
                continue;
            }
            const Node& node = tree.node(id);
            if (node.kind == NodeKind::Leaf) {
                estimate[i] = counts[static_cast<std::size_t>(node.leaf_index)] > 0
                                  ? sums[static_cast<std::size_t>(node.leaf_index)] /
                                        static_cast<double>(
                                            counts[static_cast<std::size_t>(node.leaf_index)])
                                  : 0.0;
                continue;
            }
            bool first = true;
            double value = 0.0;
            for (NodeId child : node.children) {
                if (!alive[static_cast<std::size_t>(child)]) {
                    continue;
                }
                const double child_value = estimate[static_cast<std::size_t>(child)];
                if (first) {
                    value = child_value;
                    first = false;
                } else {
                    value = node.kind == NodeKind::Max ? std::max(value, child_value)
                                                       : std::min(value, child_value);
                }
            }
            estimate[i] = value;
        }

        if (capped) {
            result.recommendation = best_alive_action();
            result.stopped_by = StopReason::BudgetCap;
            break;
        }

        // Prune on this round's snapshot; a pruned node takes its whole
        // subtree with it (ids ascend, so parents are decided first).
        const double margin = kPruneMarginScale * round_eps;
        for (std::size_t i = 1; i < node_count; ++i) {
            if (!alive[i]) {
                continue;
            }
            const std::size_t parent = static_cast<std::size_t>(tree.node(static_cast<NodeId>(i)).parent);
            if (!alive[parent] || std::abs(estimate[i] - estimate[parent]) > margin) {
                alive[i] = 0;
            }
        }

        std::size_t survivors = 0;
        NodeId last_survivor = kNoNode;
        for (NodeId action : actions) {
            if (alive[static_cast<std::size_t>(action)]) {
                ++survivors;
                last_survivor = action;
            }
        }
        if (survivors == 1) {
            result.recommendation = last_survivor;
            result.stopped_by = StopReason::StoppingRule;
            break;
        }
        if (!config.eliminate_to_sole_survivor && round_eps <= config.epsilon / 2.0) {
            result.recommendation = best_alive_action();
            result.stopped_by = StopReason::StoppingRule;
            break;
        }
    }

    finish(result, analysis, config.epsilon, total);
    return result;
}

RunResult run_m_lucb(const GameTree& tree, const TreeAnalysis& analysis, LeafOracle& oracle,
                     const AlgorithmConfig& config, Instrumentation* instr) {
    RunResult result;
    result.leaf_pulls.assign(tree.leaf_count(), 0);
    if (trivial_single_action(tree, result)) {
        return result;
    }

    ExplorationRate rate(config.rate, tree.leaf_count(), config.delta);
    SearchState state(tree, rate, config.ci);
    state.attach(instr);
    if (instr != nullptr) {
        instr->reset_run();
    }
    const auto& actions = root_children_checked(tree);
    const std::size_t node_count = tree.node_count();
    std::vector<double> empirical(node_count, 0.0);

    while (true) {
        state.recompute_all(rate(std::max<std::uint64_t>(state.total_pulls(), 1)));

        // Empirical minimax values; unvisited leaves pessimistic for the
        // player to move (0 under a max parent, 1 under a min parent).
        for (std::size_t i = node_count; i-- > 0;) {
            const NodeId id = static_cast<NodeId>(i);
            const Node& node = tree.node(id);
            if (node.kind == NodeKind::Leaf) {
                if (state.pulls(id) > 0) {
                    empirical[i] = state.empirical_mean(id);
                } else {
                    empirical[i] =
                        node.parent != kNoNode &&
                                tree.node(node.parent).kind == NodeKind::Min
                            ? 1.0
                            : 0.0;
                }
                continue;
            }
            double value = empirical[static_cast<std::size_t>(node.children[0])];
            for (std::size_t k = 1; k < node.children.size(); ++k) {
                const double child_value = empirical[static_cast<std::size_t>(node.children[k])];
                value = node.kind == NodeKind::Max ? std::max(value, child_value)
                                                   : std::min(value, child_value);
            }
            empirical[i] = value;
        }

        NodeId best = actions[0];
        for (NodeId action : actions) {
            if (empirical[static_cast<std::size_t>(action)] >
                empirical[static_cast<std::size_t>(best)]) {
                best = action;
            }
        }

        const NodeId best_leaf = state.representative_leaf(best);
        NodeId challenger = kNoNode;
        NodeId challenger_leaf = kNoNode;
        for (NodeId action : actions) {
            if (action == best) {
                continue;
            }
            const NodeId leaf = state.representative_leaf(action);
            if (challenger == kNoNode ||
                state.interval(leaf).upper > state.interval(challenger_leaf).upper) {
                challenger = action;
                challenger_leaf = leaf;
            }
        }

        const double stop_gap =
            state.interval(challenger_leaf).upper - state.interval(best_leaf).lower;
        if (stop_gap < config.epsilon) {
            result.recommendation = best;
            result.stopped_by = StopReason::StoppingRule;
            break;
        }
        if (state.total_pulls() >= config.budget_cap) {
            result.recommendation = best;
            result.stopped_by = StopReason::BudgetCap;
            break;
        }
        if (instr != nullptr && instr->record_rounds) {
            instr->rounds.push_back(
                {state.total_pulls(), best, challenger, kNoNode, best_leaf, stop_gap});
        }

        state.observe_raw(best_leaf, oracle.draw(best_leaf));
        ++result.leaf_pulls[static_cast<std::size_t>(tree.node(best_leaf).leaf_index)];
        if (state.total_pulls() >= config.budget_cap) {
            result.recommendation = best;
            result.stopped_by = StopReason::BudgetCap;
            break;
        }
        state.observe_raw(challenger_leaf, oracle.draw(challenger_leaf));
        ++result.leaf_pulls[static_cast<std::size_t>(tree.node(challenger_leaf).leaf_index)];
    }

    finish(result, analysis, config.epsilon, state.total_pulls());
    return result;
}

RunResult run_algorithm(const GameTree& tree, const TreeAnalysis& analysis, LeafOracle& oracle,
                        const AlgorithmConfig& config, Instrumentation* instr) {
    switch (config.algorithm) {
        case Algorithm::UgapeMcts:
        case Algorithm::LucbMcts:
        case Algorithm::LucbMctsTwoLeaf:
            return run_bai_mcts(tree, analysis, oracle, config, instr);
        case Algorithm::FindTopWinner:
            return run_find_top_winner(tree, analysis, oracle, config, instr);
        case Algorithm::MLucb:
            return run_m_lucb(tree, analysis, oracle, config, instr);
    }
    std::abort();
}

}  // namespace mcts_bai
