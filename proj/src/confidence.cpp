#include "mcts_bai/confidence.hpp"

#include <algorithm>
#include <cmath>

namespace mcts_bai {

namespace {

constexpr double kBisectTol = 1e-9;
constexpr int kBisectMaxIter = 100;

/// Binary KL divergence for q in the open unit interval.
double kl_bern(double p, double q) {
    if (p <= 0.0) return -std::log1p(-q);
    if (p >= 1.0) return -std::log(q);
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

}  // namespace

std::string to_string(RateVariant variant) {
    switch (variant) {
        case RateVariant::Theoretical: return "theoretical";
        case RateVariant::Practical: return "practical";
        case RateVariant::Experiments: return "experiments";
    }
    return "?";
}

std::string to_string(CiFamily family) {
    return family == CiFamily::Hoeffding ? "hoeffding" : "kl";
}

RateVariant rate_variant_from_string(const std::string& name) {
    if (name == "theoretical") return RateVariant::Theoretical;
    if (name == "practical") return RateVariant::Practical;
    if (name == "experiments") return RateVariant::Experiments;
    throw InvalidRegimeError("unknown exploration rate variant: " + name);
}

CiFamily ci_family_from_string(const std::string& name) {
    if (name == "hoeffding") return CiFamily::Hoeffding;
    if (name == "kl") return CiFamily::KlBernoulli;
    throw InvalidRegimeError("unknown confidence interval family: " + name);
}

ExplorationRate::ExplorationRate(RateVariant variant, std::size_t leaf_count, double delta)
    : variant_(variant), leaf_count_(leaf_count), delta_(delta), base_(0.0) {
    if (leaf_count == 0) throw InvalidRegimeError("exploration rate needs at least one leaf");
    if (!std::isfinite(delta) || delta <= 0.0) {
        throw InvalidRegimeError("delta must be a positive real");
    }
    // The presets drive delta up to 0.1 * leaf_count (one 0.1 budget per
    // leaf); anything larger is rejected rather than silently extrapolated.
    const double delta_cap = std::max(0.1 * static_cast<double>(leaf_count), 1.0);
    if (delta > delta_cap * (1.0 + 1e-12)) {
        throw InvalidRegimeError("delta exceeds 0.1 * leaf_count; outside the stated regime");
    }
    const double ratio = static_cast<double>(leaf_count) / delta;
    switch (variant) {
        case RateVariant::Theoretical: {
            constexpr double kE = 2.718281828459045;
            if (ratio < kE) {
                throw InvalidRegimeError(
                    "theoretical rate needs leaf_count/delta >= e for its log-log term");
            }
            base_ = std::log(ratio) + 3.0 * std::log(std::log(ratio));
            break;
        }
        case RateVariant::Practical: {
            if (delta >= 1.0) {
                throw InvalidRegimeError("practical rate needs delta < 1 to stay positive");
            }
            base_ = -std::log(delta);
            break;
        }
        case RateVariant::Experiments: {
            if (ratio <= 1.0) {
                throw InvalidRegimeError("experiments rate needs leaf_count/delta > 1");
            }
            base_ = std::log(ratio);
            break;
        }
    }
}

double ExplorationRate::operator()(std::uint64_t s) const {
    if (s == 0) throw InvalidRegimeError("exploration rate evaluated at s = 0");
    const double log_s = std::log(static_cast<double>(s));
    switch (variant_) {
        case RateVariant::Theoretical: return base_ + 1.5 * std::log1p(log_s);
        case RateVariant::Practical: return base_ + std::log1p(log_s);
        case RateVariant::Experiments: return base_ + std::log1p(log_s);
    }
    return base_;
}

double kl_upper_confidence(double mean_hat, double threshold) {
    if (threshold <= 0.0) return mean_hat;
    if (mean_hat >= 1.0) return 1.0;
    if (mean_hat <= 0.0) return std::min(1.0, -std::expm1(-threshold));
    double lo = mean_hat;
    double hi = 1.0;
    // Precision relative to the distance from 1: the divergence blows up
    // there, so an absolute tolerance would leave a large error in it.
    for (int i = 0; i < kBisectMaxIter && hi - lo > kBisectTol * (1.0 - lo); ++i) {
        const double mid = 0.5 * (lo + hi);
        (kl_bern(mean_hat, mid) <= threshold ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double kl_lower_confidence(double mean_hat, double threshold) {
    if (threshold <= 0.0) return mean_hat;
    if (mean_hat <= 0.0) return 0.0;
    if (mean_hat >= 1.0) return std::exp(-threshold);
    double lo = 0.0;
    double hi = mean_hat;
    // Precision relative to the root itself, which can sit arbitrarily close
    // to 0 where the divergence blows up.
    for (int i = 0; i < kBisectMaxIter && hi - lo > kBisectTol * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kl_bern(mean_hat, mid) <= threshold ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

Interval leaf_interval(CiFamily family, std::uint64_t pulls, double mean_hat, double beta) {
    if (pulls == 0) return Interval{0.0, 1.0};
    beta = std::max(beta, 0.0);
    if (family == CiFamily::Hoeffding) {
        const double half_width = std::sqrt(beta / (2.0 * static_cast<double>(pulls)));
        return Interval{std::max(0.0, mean_hat - half_width),
                        std::min(1.0, mean_hat + half_width)};
    }
    const double threshold = beta / static_cast<double>(pulls);
    return Interval{kl_lower_confidence(mean_hat, threshold),
                    kl_upper_confidence(mean_hat, threshold)};
}

SearchState::SearchState(const GameTree& tree, ExplorationRate rate, CiFamily family)
    : tree_(&tree),
      rate_(rate),
      family_(family),
      leaf_pulls_(tree.leaf_count(), 0),
      leaf_sums_(tree.leaf_count(), 0.0),
      intervals_(tree.node_count()),
      rep_child_(tree.node_count(), kNoNode) {
    for (std::size_t id = 0; id < tree.node_count(); ++id) {
        const Node& node = tree.node(static_cast<NodeId>(id));
        if (node.kind != NodeKind::Leaf) rep_child_[id] = node.children[0];
    }
}

std::uint64_t SearchState::pulls(NodeId leaf) const {
    const Node& node = tree_->node(leaf);
    if (node.kind != NodeKind::Leaf) throw NotALeafError("pulls queried on an internal node");
    return leaf_pulls_[static_cast<std::size_t>(node.leaf_index)];
}

double SearchState::empirical_mean(NodeId leaf) const {
    const Node& node = tree_->node(leaf);
    if (node.kind != NodeKind::Leaf) throw NotALeafError("mean queried on an internal node");
    const auto rank = static_cast<std::size_t>(node.leaf_index);
    if (leaf_pulls_[rank] == 0) return 0.0;
    return leaf_sums_[rank] / static_cast<double>(leaf_pulls_[rank]);
}

void SearchState::refresh_leaf_interval(NodeId leaf, double beta) {
    const auto rank = static_cast<std::size_t>(tree_->node(leaf).leaf_index);
    const double mean =
        leaf_pulls_[rank] == 0 ? 0.0 : leaf_sums_[rank] / static_cast<double>(leaf_pulls_[rank]);
    intervals_[static_cast<std::size_t>(leaf)] =
        leaf_interval(family_, leaf_pulls_[rank], mean, beta);
}

void SearchState::refresh_internal(NodeId id) {
    const Node& node = tree_->node(id);
    NodeId rep = node.children[0];
    Interval agg = intervals_[static_cast<std::size_t>(node.children[0])];
    if (node.kind == NodeKind::Max) {
        for (std::size_t c = 1; c < node.children.size(); ++c) {
            const NodeId child = node.children[c];
            const Interval& iv = intervals_[static_cast<std::size_t>(child)];
            if (iv.lower > agg.lower) agg.lower = iv.lower;
            if (iv.upper > agg.upper) {
                agg.upper = iv.upper;
                rep = child;
            }
        }
    } else {
        for (std::size_t c = 1; c < node.children.size(); ++c) {
            const NodeId child = node.children[c];
            const Interval& iv = intervals_[static_cast<std::size_t>(child)];
            if (iv.upper < agg.upper) agg.upper = iv.upper;
            if (iv.lower < agg.lower) {
                agg.lower = iv.lower;
                rep = child;
            }
        }
    }
    intervals_[static_cast<std::size_t>(id)] = agg;
    rep_child_[static_cast<std::size_t>(id)] = rep;
}

void SearchState::propagate_from(NodeId leaf) {
    for (NodeId s = tree_->node(leaf).parent; s != kNoNode; s = tree_->node(s).parent) {
        refresh_internal(s);
    }
}

void SearchState::check_coverage_after_update(NodeId leaf) {
    const TreeAnalysis& analysis = *instr_->analysis;
    if (instr_->leaf_intervals_valid &&
        !intervals_[static_cast<std::size_t>(leaf)].contains(tree_->node(leaf).mean,
                                                             kTieTolerance)) {
        instr_->leaf_intervals_valid = false;
    }
    if (!instr_->leaf_intervals_valid) return;
    for (NodeId s = tree_->node(leaf).parent; s != kNoNode; s = tree_->node(s).parent) {
        ++instr_->node_coverage_checks;
        if (!intervals_[static_cast<std::size_t>(s)].contains(
                analysis.values[static_cast<std::size_t>(s)], kTieTolerance)) {
            ++instr_->node_coverage_violations;
        }
    }
}

void SearchState::observe(NodeId leaf, double reward) {
    const Node& node = tree_->node(leaf);
    if (node.kind != NodeKind::Leaf) throw NotALeafError("observe called on an internal node");
    const auto rank = static_cast<std::size_t>(node.leaf_index);
    ++leaf_pulls_[rank];
    leaf_sums_[rank] += reward;
    ++total_pulls_;
    refresh_leaf_interval(leaf, rate_(leaf_pulls_[rank]));
    propagate_from(leaf);
    if (instr_ != nullptr && instr_->analysis != nullptr) check_coverage_after_update(leaf);
}

void SearchState::observe_raw(NodeId leaf, double reward) {
    const Node& node = tree_->node(leaf);
    if (node.kind != NodeKind::Leaf) throw NotALeafError("observe_raw called on an internal node");
    const auto rank = static_cast<std::size_t>(node.leaf_index);
    ++leaf_pulls_[rank];
    leaf_sums_[rank] += reward;
    ++total_pulls_;
}

void SearchState::recompute_all(double beta) {
    for (NodeId leaf : tree_->leaves()) refresh_leaf_interval(leaf, beta);
    for (std::size_t i = tree_->node_count(); i-- > 0;) {
        if (tree_->node(static_cast<NodeId>(i)).kind != NodeKind::Leaf) {
            refresh_internal(static_cast<NodeId>(i));
        }
    }
    if (instr_ == nullptr || instr_->analysis == nullptr) return;
    const TreeAnalysis& analysis = *instr_->analysis;
    if (instr_->leaf_intervals_valid) {
        for (NodeId leaf : tree_->leaves()) {
            if (!intervals_[static_cast<std::size_t>(leaf)].contains(tree_->node(leaf).mean,
                                                                     kTieTolerance)) {
                instr_->leaf_intervals_valid = false;
                break;
            }
        }
    }
    if (!instr_->leaf_intervals_valid) return;
    for (std::size_t i = 0; i < tree_->node_count(); ++i) {
        if (tree_->node(static_cast<NodeId>(i)).kind == NodeKind::Leaf) continue;
        ++instr_->node_coverage_checks;
        if (!intervals_[i].contains(analysis.values[i], kTieTolerance)) {
            ++instr_->node_coverage_violations;
        }
    }
}

void SearchState::full_recompute() {
    for (NodeId leaf : tree_->leaves()) {
        const auto rank = static_cast<std::size_t>(tree_->node(leaf).leaf_index);
        const double beta = leaf_pulls_[rank] == 0 ? 0.0 : rate_(leaf_pulls_[rank]);
        refresh_leaf_interval(leaf, beta);
    }
    for (std::size_t i = tree_->node_count(); i-- > 0;) {
        if (tree_->node(static_cast<NodeId>(i)).kind != NodeKind::Leaf) {
            refresh_internal(static_cast<NodeId>(i));
        }
    }
}

NodeId SearchState::representative_leaf(NodeId id) const {
    if (instr_ != nullptr) ++instr_->representative_leaf_calls;
    NodeId current = id;
    while (tree_->node(current).kind != NodeKind::Leaf) {
        const NodeId next = rep_child_[static_cast<std::size_t>(current)];
        if (instr_ != nullptr) {
            ++instr_->nesting_checks;
            const Interval& parent = intervals_[static_cast<std::size_t>(current)];
            const Interval& child = intervals_[static_cast<std::size_t>(next)];
            if (parent.lower < child.lower || parent.upper > child.upper) {
                ++instr_->nesting_violations;
            }
        }
        current = next;
    }
    return current;
}

}  // namespace mcts_bai
