#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcts_bai/tree.hpp"

namespace mcts_bai {

enum class RateVariant : std::uint8_t { Theoretical, Practical, Experiments };
enum class CiFamily : std::uint8_t { Hoeffding, KlBernoulli };

std::string to_string(RateVariant variant);
std::string to_string(CiFamily family);
RateVariant rate_variant_from_string(const std::string& name);
CiFamily ci_family_from_string(const std::string& name);

/// Exploration rate beta(s, delta) evaluated at a per-leaf pull count (or at
/// the global round count, depending on the algorithm). Three variants:
///   Theoretical: ln(L/d) + 3 ln ln(L/d) + (3/2) ln(ln s + 1)   [proven]
///   Practical:   ln(ln(e s) / d)                               [aggressive]
///   Experiments: ln(L/d) + ln(ln s + 1)                        [benchmark]
/// The constructor validates the regime each formula is stated for and
/// throws InvalidRegimeError outside it. delta >= 1 is accepted up to
/// 0.1 * leaf_count (the per-leaf union-bound budget used by the benchmark
/// presets) but flags the confidence statement as vacuous.
class ExplorationRate {
public:
    ExplorationRate(RateVariant variant, std::size_t leaf_count, double delta);

    /// Requires s >= 1.
    double operator()(std::uint64_t s) const;

    RateVariant variant() const { return variant_; }
    std::size_t leaf_count() const { return leaf_count_; }
    double delta() const { return delta_; }
    /// True when delta >= 1, i.e. the error guarantee is vacuous and the
    /// rate only makes sense as a benchmark tuning.
    bool vacuous_confidence() const { return delta_ >= 1.0; }

private:
    RateVariant variant_;
    std::size_t leaf_count_;
    double delta_;
    double base_;  // s-independent part
};

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
    double width() const { return upper - lower; }
    bool contains(double x, double slack = 0.0) const {
        return lower - slack <= x && x <= upper + slack;
    }
};

/// Binary KL divergence helpers clipped to the open unit interval; used by
/// the KL confidence intervals. threshold is beta / N.
double kl_upper_confidence(double mean_hat, double threshold);
double kl_lower_confidence(double mean_hat, double threshold);

/// Confidence interval for one leaf from its pull count, empirical mean and
/// exploration-rate value. Unvisited leaves get [0, 1]. Hoeffding intervals
/// are mean +- sqrt(beta / 2N) clipped to [0, 1]; KL intervals are
/// {q : N * kl(mean, q) <= beta}.
Interval leaf_interval(CiFamily family, std::uint64_t pulls, double mean_hat, double beta);

/// Counters for the optional self-checks wired through SearchState and the
/// algorithm runners. Attach a TreeAnalysis to enable the checks that need
/// ground truth.
struct Instrumentation {
    const TreeAnalysis* analysis = nullptr;

    std::uint64_t representative_leaf_calls = 0;
    std::uint64_t nesting_checks = 0;
    std::uint64_t nesting_violations = 0;

    /// True while every leaf interval so far contained its true mean. Reset
    /// per run by the runners.
    bool leaf_intervals_valid = true;
    std::uint64_t node_coverage_checks = 0;
    std::uint64_t node_coverage_violations = 0;  // node interval missed V(s) despite valid leaves

    std::uint64_t pull_bound_checks = 0;
    std::uint64_t pull_bound_violations = 0;  // selected leaf exceeded 8 beta / gap^2

    std::uint64_t selection_order_checks = 0;
    std::uint64_t selection_order_violations = 0;  // picked arm did not dominate as required

    struct Round {
        std::uint64_t t;
        NodeId best;
        NodeId challenger;
        NodeId chosen;
        NodeId leaf;
        double stop_gap;
    };
    bool record_rounds = false;
    std::vector<Round> rounds;

    void reset_run() {
        leaf_intervals_valid = true;
        rounds.clear();
    }
};

/// Mutable per-run state: per-leaf counts and sums, one confidence interval
/// per node, and the representative child pointers that define the
/// representative leaf of every internal node.
///
/// Intervals at internal nodes take the max (max nodes) or min (min nodes)
/// of the children's bounds; the representative child is the child attaining
/// the upper bound at a max node and the lower bound at a min node, ties to
/// the lowest index.
class SearchState {
public:
    SearchState(const GameTree& tree, ExplorationRate rate, CiFamily family);

    /// Records a reward, refreshes the leaf interval with beta = rate(N) and
    /// re-propagates intervals and representative children along the leaf's
    /// ancestor path.
    void observe(NodeId leaf, double reward);

    /// Records a reward without touching intervals (for algorithms that
    /// recompute every interval per round with a global rate).
    void observe_raw(NodeId leaf, double reward);

    /// Rebuilds every leaf interval with the given beta value and propagates
    /// bottom-up; used with rates evaluated at the global round count.
    void recompute_all(double beta);

    /// Rebuilds every interval from scratch with per-leaf beta = rate(N).
    /// The incremental path updates must leave the state identical to this.
    void full_recompute();

    std::uint64_t pulls(NodeId leaf) const;
    /// Empirical mean; 0 when the leaf is unvisited.
    double empirical_mean(NodeId leaf) const;
    std::uint64_t total_pulls() const { return total_pulls_; }
    const Interval& interval(NodeId id) const { return intervals_[static_cast<std::size_t>(id)]; }
    NodeId representative_child(NodeId id) const {
        return rep_child_[static_cast<std::size_t>(id)];
    }
    /// Follows representative children down to a leaf. With instrumentation
    /// attached, verifies that intervals are nested along the descent.
    NodeId representative_leaf(NodeId id) const;

    const GameTree& tree() const { return *tree_; }
    const ExplorationRate& rate() const { return rate_; }
    CiFamily family() const { return family_; }

    void attach(Instrumentation* instr) { instr_ = instr; }
    Instrumentation* instrumentation() const { return instr_; }

private:
    void refresh_leaf_interval(NodeId leaf, double beta);
    void refresh_internal(NodeId id);
    void propagate_from(NodeId leaf);
    void check_coverage_after_update(NodeId leaf);

    const GameTree* tree_;
    ExplorationRate rate_;
    CiFamily family_;
    std::vector<std::uint64_t> leaf_pulls_;  // by leaf rank
    std::vector<double> leaf_sums_;          // by leaf rank
    std::vector<Interval> intervals_;        // by node id
    std::vector<NodeId> rep_child_;          // by node id, kNoNode for leaves
    std::uint64_t total_pulls_ = 0;
    Instrumentation* instr_ = nullptr;
};

}  // namespace mcts_bai
