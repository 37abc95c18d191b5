#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mcts_bai/tree.hpp"

namespace mcts_bai {

/// Stream id reserved for drawing the leaf means of generated trees, kept
/// clear of any plausible leaf index.
inline constexpr std::uint64_t kTreeMeansStream = 0xFFFF'FFFF'0000'0000ULL;

/// SplitMix64 finalizer; full avalanche on 64 bits.
std::uint64_t mix64(std::uint64_t z);

/// Seed of the independent substream identified by (master_seed, repetition,
/// stream). Distinct triples give unrelated seeds, so reward streams never
/// depend on scheduling or on how many other streams were consumed.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t repetition,
                                 std::uint64_t stream);

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t repetition,
                            std::uint64_t stream);

/// Uniform double in [0, 1) using the top 53 bits of the engine output.
/// Unlike std::uniform_real_distribution this mapping is pinned down exactly,
/// so runs replay bit-identically on any toolchain.
inline double canonical_uniform(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Stochastic leaf evaluator: draw(leaf) returns an independent Bernoulli
/// sample with that leaf's mean. Each leaf owns one substream keyed by
/// (master_seed, repetition, leaf rank).
class LeafOracle {
public:
    LeafOracle(const GameTree& tree, std::uint64_t master_seed, std::uint64_t repetition);

    /// One Bernoulli draw from the leaf's distribution (0.0 or 1.0).
    /// Throws NotALeafError when the node is internal.
    double draw(NodeId leaf);

    std::uint64_t total_draws() const { return total_draws_; }
    const GameTree& tree() const { return *tree_; }

private:
    const GameTree* tree_;
    std::vector<std::mt19937_64> engines_;  // indexed by leaf rank
    std::uint64_t total_draws_ = 0;
};

}  // namespace mcts_bai
