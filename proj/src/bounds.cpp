#include "mcts_bai/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace mcts_bai {

namespace {

/// ln ln x floored at 0; also 0 whenever ln ln is undefined (x <= 1).
double lnln_pos(double x) {
    if (x <= 1.0) return 0.0;
    const double inner = std::log(x);
    return inner > 1.0 ? std::log(inner) : 0.0;
}

void check_bound_regime(double epsilon, double delta, std::size_t leaf_count) {
    if (leaf_count == 0) throw InvalidRegimeError("sample bound needs at least one leaf");
    if (!(epsilon >= 0.0)) throw InvalidRegimeError("epsilon must be nonnegative");
    const double cap = std::min(1.0, 0.1 * static_cast<double>(leaf_count));
    if (!(delta > 0.0) || delta > cap * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "sample bound stated for 0 < delta <= min(1, 0.1 L); got delta = " << delta
            << " with L = " << leaf_count;
        throw InvalidRegimeError(msg.str());
    }
}

double effective_gap(double leaf_gap, double root_gap, double epsilon) {
    return std::max({leaf_gap, root_gap, epsilon});
}

/// Objective of one confusion pair given the two entries and their weights.
/// Assumes mu_a > mu_i (guaranteed by the canonical ordering).
double pair_value(double mu_a, double mu_i, double w_a, double w_i) {
    if (w_a <= 0.0 || w_i <= 0.0) return 0.0;
    const double m = (w_a * mu_a + w_i * mu_i) / (w_a + w_i);
    if (m <= 0.0 || m >= 1.0) return 0.0;  // only when both entries sit on that boundary
    return w_a * kl_div(mu_a, m) + w_i * kl_div(mu_i, m);
}

void check_ordering(const MeanMatrix& means) {
    if (means.size() < 2) throw NotDepthTwoError("lower bound needs at least two root actions");
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (means[i].empty()) throw NotDepthTwoError("empty action row");
        for (std::size_t j = 1; j < means[i].size(); ++j) {
            if (!(means[i][j] - means[i][0] > kTieTolerance)) {
                std::ostringstream msg;
                msg << "row " << i << " minimum is not strictly in column 0";
                throw OrderingViolatedError(msg.str());
            }
        }
    }
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (!(means[0][0] - means[i][0] > kTieTolerance)) {
            throw OrderingViolatedError("row 0 is not the strictly best action");
        }
    }
}

struct CanonicalMap {
    std::vector<std::size_t> rows;              // canonical row -> original row
    std::vector<std::vector<std::size_t>> cols;  // canonical row -> canonical col -> original col
};

std::pair<MeanMatrix, CanonicalMap> canonicalize(const MeanMatrix& means) {
    if (means.size() < 2) throw NotDepthTwoError("lower bound needs at least two root actions");
    const std::size_t rows = means.size();
    std::vector<std::size_t> min_col(rows);
    std::vector<double> row_value(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        if (means[r].empty()) throw NotDepthTwoError("empty action row");
        std::size_t best = 0;
        for (std::size_t j = 1; j < means[r].size(); ++j) {
            if (means[r][j] < means[r][best]) best = j;
        }
        for (std::size_t j = 0; j < means[r].size(); ++j) {
            if (j != best && means[r][j] - means[r][best] <= kTieTolerance) {
                std::ostringstream msg;
                msg << "tied minimum in action row " << r;
                throw OrderingViolatedError(msg.str());
            }
        }
        min_col[r] = best;
        row_value[r] = means[r][best];
    }
    std::size_t best_row = 0;
    for (std::size_t r = 1; r < rows; ++r) {
        if (row_value[r] > row_value[best_row]) best_row = r;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (r != best_row && row_value[best_row] - row_value[r] <= kTieTolerance) {
            throw OrderingViolatedError("tied best action at the root");
        }
    }

    CanonicalMap map;
    map.rows.push_back(best_row);
    for (std::size_t r = 0; r < rows; ++r) {
        if (r != best_row) map.rows.push_back(r);
    }
    MeanMatrix canonical(rows);
    map.cols.resize(rows);
    for (std::size_t c = 0; c < rows; ++c) {
        const std::size_t orig = map.rows[c];
        map.cols[c].push_back(min_col[orig]);
        for (std::size_t j = 0; j < means[orig].size(); ++j) {
            if (j != min_col[orig]) map.cols[c].push_back(j);
        }
        for (std::size_t j : map.cols[c]) canonical[c].push_back(means[orig][j]);
    }
    check_ordering(canonical);
    return {std::move(canonical), std::move(map)};
}

}  // namespace

double kl_div(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("kl_div: first argument outside [0, 1]");
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("kl_div: second argument outside [0, 1]");
    if (y <= 0.0 || y >= 1.0) {
        if (x == y) return 0.0;
        throw DomainError("kl_div: divergence is infinite for a boundary second argument");
    }
    if (x <= 0.0) return -std::log1p(-y);
    if (x >= 1.0) return -std::log(y);
    return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

double ugape_sample_bound(const TreeAnalysis& analysis, double epsilon, double delta,
                          std::size_t leaf_count) {
    check_bound_regime(epsilon, delta, leaf_count);
    const double ratio = static_cast<double>(leaf_count) / delta;
    const double log_ratio = std::log(ratio);
    const double loglog_ratio = lnln_pos(ratio);
    double h_star = 0.0;
    double second_order = 0.0;
    for (double gap : analysis.leaf_gaps) {
        const double g = effective_gap(gap, analysis.root_gap, epsilon);
        if (g == 0.0) {
            throw InfiniteComplexityError("sample bound is infinite: a leaf has zero effective gap");
        }
        if (std::isinf(g)) continue;
        const double inv_sq = 1.0 / (g * g);
        h_star += inv_sq;
        second_order += 16.0 * inv_sq * lnln_pos(inv_sq);
    }
    constexpr double kE = 2.718281828459045;
    const double inner = 8.0 * kE * log_ratio + 24.0 * kE * loglog_ratio;
    return 8.0 * h_star * log_ratio + second_order +
           8.0 * h_star * (3.0 * loglog_ratio + 2.0 * lnln_pos(inner)) + 1.0;
}

double two_leaf_lucb_sample_bound(const TreeAnalysis& analysis, double epsilon, double delta,
                                  std::size_t leaf_count) {
    check_bound_regime(epsilon, delta, leaf_count);
    const double ratio = static_cast<double>(leaf_count) / delta;
    const double c = std::log(ratio) + 3.0 * lnln_pos(ratio);
    double h_tilde = 0.0;
    for (double gap : analysis.leaf_gaps_below_top) {
        const double g = effective_gap(gap, analysis.root_gap, epsilon);
        if (g == 0.0) {
            throw InfiniteComplexityError("sample bound is infinite: a leaf has zero effective gap");
        }
        if (std::isinf(g)) continue;
        h_tilde += 1.0 / (g * g);
    }
    constexpr double kE = 2.718281828459045;
    return 16.0 * h_tilde * (c + 2.0 * lnln_pos(16.0 * kE * h_tilde * c));
}

LogLogInversion invert_loglog(double a, double C) {
    if (!(a >= 1.0) || !(C >= 1.0)) {
        throw InvalidRegimeError("invert_loglog stated for a >= 1 and C >= 1");
    }
    const double ac = a * C;
    const double log_ac = std::log(ac);
    const double g = std::log1p(log_ac);
    const double scale = C * (1.0 + log_ac);
    if (scale <= 1.5) {
        throw DegenerateRegimeError("invert_loglog upper bound vacuous: C(1+ln(aC)) <= 3/2");
    }
    LogLogInversion out;
    out.lower = ac + 1.5 * a * g;
    out.upper = ac + 1.5 * a * g * scale / (scale - 1.5);
    out.relaxed_upper = ac + 2.0 * a * g;
    return out;
}

MeanMatrix depth_two_means(const GameTree& tree) {
    const Node& root = tree.node(tree.root());
    MeanMatrix means;
    means.reserve(root.children.size());
    for (NodeId child : root.children) {
        const Node& row = tree.node(child);
        if (row.kind != NodeKind::Min) {
            throw NotDepthTwoError("depth-one node is not a min node");
        }
        std::vector<double> entries;
        entries.reserve(row.children.size());
        for (NodeId leaf : row.children) {
            const Node& node = tree.node(leaf);
            if (node.kind != NodeKind::Leaf) {
                throw NotDepthTwoError("depth-two node is not a leaf");
            }
            entries.push_back(node.mean);
        }
        means.push_back(std::move(entries));
    }
    return means;
}

double pair_objective(const MeanMatrix& means, const MeanMatrix& weights, std::size_t i,
                      std::size_t a) {
    check_ordering(means);
    if (i == 0 || i >= means.size() || a >= means[0].size()) {
        throw OrderingViolatedError("pair index outside (suboptimal row, best-row column) range");
    }
    return pair_value(means[0][a], means[i][0], weights[0][a], weights[i][0]);
}

double min_pair_objective(const MeanMatrix& means, const MeanMatrix& weights) {
    check_ordering(means);
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < means.size(); ++i) {
        for (std::size_t a = 0; a < means[0].size(); ++a) {
            out = std::min(out, pair_value(means[0][a], means[i][0], weights[0][a], weights[i][0]));
        }
    }
    return out;
}

LowerBoundSolution solve_depth_two_lower_bound(const GameTree& tree, double delta) {
    return solve_depth_two_lower_bound(depth_two_means(tree), delta);
}

LowerBoundSolution solve_depth_two_lower_bound(const MeanMatrix& means, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw DomainError("lower bound needs delta in (0, 1)");
    }
    auto [mu, map] = canonicalize(means);
    const std::size_t rows = mu.size();
    const std::size_t cols = mu[0].size();
    const std::size_t support = cols + rows - 1;

    // w[0..cols) are the best row's columns, w[cols + i - 1] is row i's
    // minimal entry.
    std::vector<double> w(support, 1.0 / static_cast<double>(support));
    std::vector<double> best_w = w;
    std::vector<double> grad(support);
    std::vector<double> values((rows - 1) * cols);
    double best_f = -std::numeric_limits<double>::infinity();
    double checkpoint_f = -std::numeric_limits<double>::infinity();
    double step = 0.0;
    bool converged = false;
    constexpr std::uint64_t kMaxIterations = 1000000;
    constexpr std::uint64_t kCheckEvery = 1000;
    constexpr double kImprovementTol = 1e-10;
    constexpr double kActiveTol = 1e-12;

    std::uint64_t iter = 0;
    while (iter < kMaxIterations) {
        ++iter;
        double f = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < rows; ++i) {
            for (std::size_t a = 0; a < cols; ++a) {
                const double g = pair_value(mu[0][a], mu[i][0], w[a], w[cols + i - 1]);
                values[(i - 1) * cols + a] = g;
                f = std::min(f, g);
            }
        }
        if (f > best_f) {
            best_f = f;
            best_w = w;
        }

        std::fill(grad.begin(), grad.end(), 0.0);
        std::size_t active = 0;
        for (std::size_t i = 1; i < rows; ++i) {
            for (std::size_t a = 0; a < cols; ++a) {
                if (values[(i - 1) * cols + a] > f + kActiveTol) continue;
                ++active;
                const double w_a = w[a];
                const double w_i = w[cols + i - 1];
                const double m = (w_a * mu[0][a] + w_i * mu[i][0]) / (w_a + w_i);
                grad[a] += kl_div(mu[0][a], m);
                grad[cols + i - 1] += kl_div(mu[i][0], m);
            }
        }
        // Normalize the averaged supergradient so the step size is scale
        // free; the raw KL magnitudes are tiny near uniform weights.
        double scale = 0.0;
        for (std::size_t k = 0; k < support; ++k) {
            grad[k] /= static_cast<double>(active);
            scale = std::max(scale, grad[k]);
        }
        if (scale <= 0.0) {
            converged = true;
            break;
        }
        step = 0.1 / std::sqrt(static_cast<double>(iter));
        double norm = 0.0;
        for (std::size_t k = 0; k < support; ++k) {
            w[k] *= std::exp(step * grad[k] / scale);
            norm += w[k];
        }
        for (double& wk : w) wk /= norm;

        if (iter % kCheckEvery == 0) {
            if (best_f - checkpoint_f < kImprovementTol) {
                converged = true;
                break;
            }
            checkpoint_f = best_f;
        }
    }

    LowerBoundSolution solution;
    solution.objective = best_f;
    solution.characteristic_time = 1.0 / best_f;
    solution.lower_bound_at_delta = solution.characteristic_time * kl_div(delta, 1.0 - delta);
    solution.iterations = iter;
    solution.converged = converged;
    solution.final_step = step;

    solution.weights.resize(means.size());
    for (std::size_t r = 0; r < means.size(); ++r) solution.weights[r].assign(means[r].size(), 0.0);
    for (std::size_t a = 0; a < cols; ++a) {
        solution.weights[map.rows[0]][map.cols[0][a]] = best_w[a];
    }
    for (std::size_t i = 1; i < rows; ++i) {
        solution.weights[map.rows[i]][map.cols[i][0]] = best_w[cols + i - 1];
    }

    solution.pair_values.assign(rows - 1, std::vector<double>(cols, 0.0));
    for (std::size_t i = 1; i < rows; ++i) {
        for (std::size_t a = 0; a < cols; ++a) {
            solution.pair_values[i - 1][a] =
                pair_value(mu[0][a], mu[i][0], best_w[a], best_w[cols + i - 1]);
        }
    }
    return solution;
}

}  // namespace mcts_bai
