#pragma once

#include <cstdint>
#include <vector>

#include "mcts_bai/tree.hpp"

namespace mcts_bai {

/// Binary KL divergence d(x, y) = x ln(x/y) + (1-x) ln((1-x)/(1-y)) with the
/// convention 0 ln 0 = 0. Throws DomainError when y is 0 or 1 (unless x = y,
/// which gives 0) or when either argument leaves [0, 1].
double kl_div(double x, double y);

/// High-probability upper bound on the stopping time of the gap-index
/// (UGapE-style) tree search run with the theoretical exploration rate:
///   8 H ln(L/d) + sum_l (16/g_l^2) lnln(1/g_l^2)
///   + 8 H [3 lnln(L/d) + 2 lnln(8e ln(L/d) + 24e lnln(L/d))] + 1
/// where g_l = max(leaf gap, root gap, epsilon) and H = sum_l 1/g_l^2.
/// Inner ln ln terms whose argument is at most e are floored at zero.
/// Requires delta <= min(1, 0.1 L); throws InfiniteComplexityError when some
/// g_l is zero.
double ugape_sample_bound(const TreeAnalysis& analysis, double epsilon, double delta,
                          std::size_t leaf_count);

/// Same kind of bound for the even-round two-leaf LUCB variant, which is
/// governed by the below-top gaps:
///   16 H~ [C + 2 lnln(16 e H~ C)]  with  C = ln(L/d) + 3 lnln(L/d).
double two_leaf_lucb_sample_bound(const TreeAnalysis& analysis, double epsilon, double delta,
                                  std::size_t leaf_count);

/// Sandwich for S = sup { s >= 1 : a beta(s) >= s } with
/// beta(s) = C + (3/2) ln(1 + ln s):
///   lower   = aC + (3/2) a ln(1+ln(aC))
///   upper   = aC + (3/2) a ln(1+ln(aC)) * C(1+ln(aC)) / (C(1+ln(aC)) - 3/2)
///   relaxed = aC + 2 a ln(1+ln(aC))   (valid once C(1+ln(aC)) >= 6)
struct LogLogInversion {
    double lower;
    double upper;
    double relaxed_upper;
};

/// Requires a >= 1 and C >= 1; throws DegenerateRegimeError when
/// C(1+ln(aC)) <= 3/2 (the tight upper bound is vacuous there).
LogLogInversion invert_loglog(double a, double C);

/// Row-major matrix of depth-two leaf means: one row per root action, the
/// leaves of that action's min node in order. Rows may have different widths.
using MeanMatrix = std::vector<std::vector<double>>;

/// Extracts the mean matrix of a depth-two tree (max root, min rows, leaf
/// entries). Throws NotDepthTwoError for any other shape.
MeanMatrix depth_two_means(const GameTree& tree);

/// Transport cost of confusing best-action column a with suboptimal row i
/// (0-based: i >= 1):
///   w[0][a] d(mu[0][a], m) + w[i][0] d(mu[i][0], m),
/// m the weight-weighted mean of the two entries; 0 when either weight is 0.
/// Validates the ordering assumptions (row minima strictly in column 0,
/// row 0 strictly best) and throws OrderingViolatedError on failure.
double pair_objective(const MeanMatrix& means, const MeanMatrix& weights, std::size_t i,
                      std::size_t a);

struct LowerBoundSolution {
    double characteristic_time = 0.0;  ///< T*, in expected samples.
    double objective = 0.0;            ///< 1 / T*, the optimal min pair value.
    /// Optimal sampling proportions, same shape as the input matrix. Entries
    /// outside the support (suboptimal row, non-minimal column) are exactly 0.
    MeanMatrix weights;
    double lower_bound_at_delta = 0.0;  ///< T* times kl_div(delta, 1 - delta).
    /// Pair objectives at the returned weights, canonical frame: entry
    /// [i-1][a] is the cost of pair (suboptimal action i, best-row column a).
    std::vector<std::vector<double>> pair_values;
    std::uint64_t iterations = 0;
    bool converged = false;
    double final_step = 0.0;
};

/// Maximizes the min pair objective over the sparse simplex (full first row,
/// minimal column of every other row) by exponentiated-gradient ascent:
/// uniform start, step 0.1/sqrt(iter), at most 1e6 iterations, stopping once
/// the best objective improves by less than 1e-10 over 1000 iterations.
/// The input matrix is brought into canonical order (best action first, row
/// minima first) internally; outputs are mapped back to the input layout.
/// delta enters only through the reported lower bound.
LowerBoundSolution solve_depth_two_lower_bound(const MeanMatrix& means, double delta);
LowerBoundSolution solve_depth_two_lower_bound(const GameTree& tree, double delta);

/// Minimum pair objective at the given weights (canonical-ordered input).
double min_pair_objective(const MeanMatrix& means, const MeanMatrix& weights);

}  // namespace mcts_bai
