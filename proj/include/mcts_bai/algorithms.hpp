#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcts_bai/confidence.hpp"
#include "mcts_bai/oracle.hpp"
#include "mcts_bai/tree.hpp"

namespace mcts_bai {

/// A single-action root makes every identification question trivial.
struct SingleActionError : Error {
    using Error::Error;
};

/// The elimination baseline's precision schedule cannot reach epsilon = 0;
/// see AlgorithmConfig::eliminate_to_sole_survivor for the documented escape.
struct EpsilonZeroUnsupportedError : Error {
    using Error::Error;
};

enum class Algorithm : std::uint8_t {
    UgapeMcts,
    LucbMcts,
    LucbMctsTwoLeaf,
    FindTopWinner,
    MLucb,
};

/// Short CLI names: ugape, lucb, lucb2, ftw, mlucb.
std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct AlgorithmConfig {
    Algorithm algorithm = Algorithm::UgapeMcts;
    double epsilon = 0.0;
    double delta = 0.1;
    RateVariant rate = RateVariant::Experiments;
    CiFamily ci = CiFamily::KlBernoulli;
    /// Safety valve against non-termination; a run that hits it reports
    /// StopReason::BudgetCap with the current best guess.
    std::uint64_t budget_cap = 100000000;
    /// Lets the elimination baseline accept epsilon = 0 by running rounds
    /// until a single depth-one action survives (matching how the
    /// benchmark experiments use it); off by default.
    bool eliminate_to_sole_survivor = false;
};

enum class StopReason : std::uint8_t { StoppingRule, BudgetCap };

struct RunResult {
    NodeId recommendation = kNoNode;  ///< A depth-one child of the root.
    std::uint64_t tau = 0;            ///< Total leaf evaluations.
    std::vector<std::uint64_t> leaf_pulls;  ///< By leaf rank; sums to tau.
    bool correct = false;  ///< V(best) - V(recommendation) <= epsilon.
    StopReason stopped_by = StopReason::StoppingRule;
};

/// Best-guess depth-one node and its optimistic challenger.
struct PromisingPair {
    NodeId best = kNoNode;
    NodeId challenger = kNoNode;
    /// Gap indices max_{s' != s} U_{s'} - L_s per depth-one child (only
    /// filled by the gap-index rule).
    std::vector<double> gap_indices;
};

/// Gap-index rule: best minimizes max_{s' != s} U_{s'} - L_s, challenger
/// maximizes U among the rest. Ties to the lowest index. Throws
/// SingleActionError when the root has one child.
PromisingPair ugape_promising(const SearchState& state);

/// Empirical rule: best maximizes the representative leaf's empirical mean
/// (0 when unvisited), challenger maximizes U among the rest.
PromisingPair lucb_promising(const SearchState& state);

/// Picks the candidate with the wider interval; ties go to best.
NodeId select_among_pair(const SearchState& state, const PromisingPair& pair);

/// True when U_challenger - L_best < epsilon.
bool stopping_rule(const SearchState& state, const PromisingPair& pair, double epsilon);

/// Confidence-interval-driven search: per round compute the promising pair,
/// stop or descend to a representative leaf and sample it. Covers the
/// gap-index rule, the empirical rule, and the even-round variant that
/// samples both promising nodes' representative leaves per round.
RunResult run_bai_mcts(const GameTree& tree, const TreeAnalysis& analysis, LeafOracle& oracle,
                       const AlgorithmConfig& config, Instrumentation* instr = nullptr);

/// Round-based uniform-sampling elimination baseline: halve the precision
/// each round, top every surviving leaf up to the round's pull count, prune
/// nodes whose estimate strays from their parent's by more than the margin.
RunResult run_find_top_winner(const GameTree& tree, const TreeAnalysis& analysis,
                              LeafOracle& oracle, const AlgorithmConfig& config,
                              Instrumentation* instr = nullptr);

/// Reversed architecture baseline: per round compute every depth-one node's
/// representative leaf, run one LUCB step over those leaves with a
/// global-time exploration rate, and sample both promising leaves.
RunResult run_m_lucb(const GameTree& tree, const TreeAnalysis& analysis, LeafOracle& oracle,
                     const AlgorithmConfig& config, Instrumentation* instr = nullptr);

/// Dispatches on config.algorithm.
RunResult run_algorithm(const GameTree& tree, const TreeAnalysis& analysis, LeafOracle& oracle,
                        const AlgorithmConfig& config, Instrumentation* instr = nullptr);

}  // namespace mcts_bai
