#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "otcnet/activity.hpp"
#include "otcnet/common.hpp"
#include "otcnet/network.hpp"

namespace otcnet {

namespace detail {

/// Weighted degree over the surviving neighborhood:
///   khat_i = [ k_i^alpha * (sum_j w_ij)^beta ]^(1/(alpha+beta))
/// Sums run in ascending index order so repeated runs are bit-identical.
inline double weighted_degree_masked(const SquareMatrix& w, std::span<const char> alive, int node,
                                     double alpha, double beta) {
    int degree = 0;
    double strength = 0.0;
    for (int j = 0; j < w.size(); ++j) {
        if (j == node || !alive[j]) continue;
        double wij = w.at(node, j);
        if (wij > 0.0) {
            ++degree;
            strength += wij;
        }
    }
    if (degree == 0) return 0.0;
    return std::pow(std::pow(static_cast<double>(degree), alpha) * std::pow(strength, beta),
                    1.0 / (alpha + beta));
}

}  // namespace detail

/// Weighted degree of a node in the intact graph.
inline double weighted_degree(const SquareMatrix& w, int node, double alpha, double beta) {
    if (!(alpha + beta > 0.0)) throw ValidationError("weighted_degree: alpha + beta must be > 0");
    if (node < 0 || node >= w.size()) throw ValidationError("weighted_degree: node out of range");
    std::vector<char> alive(w.size(), 1);
    return detail::weighted_degree_masked(w, alive, node, alpha, beta);
}

/// How pruning thresholds advance. Weighted degrees are real-valued, so the
/// default schedule walks the sorted distinct surviving values; integer_steps
/// reproduces the classic K = 1, 2, ... enumeration for integer degrees.
enum class CoreSchedule { distinct_values, integer_steps };

struct CoreDecomposition {
    double alpha = 0.0;
    double beta = 1.0;
    CoreSchedule schedule = CoreSchedule::distinct_values;
    std::vector<double> core;             // K_i per node
    std::vector<double> core_normalized;  // K_i / K_max
    struct RemovalStep {
        int node;
        double threshold;       // core value being assigned
        double weighted_degree; // khat at the moment of removal
    };
    std::vector<RemovalStep> removal_log;  // replayable pruning order
};

/// Recursive pruning: for each threshold K in ascending order, repeatedly
/// remove every node whose current weighted degree is <= K (recomputing after
/// each wave) and assign the removed nodes core K. Nodes with no surviving
/// links have weighted degree zero and end up in core 0.
inline CoreDecomposition decompose(const AggregatedGraph& graph, double alpha, double beta,
                                   CoreSchedule schedule = CoreSchedule::distinct_values) {
    if (!(alpha + beta > 0.0)) throw ValidationError("decompose: alpha + beta must be > 0");
    const int n = graph.size();
    if (n == 0) throw ValidationError("decompose: empty graph");
    const SquareMatrix& w = graph.weights;

    CoreDecomposition out;
    out.alpha = alpha;
    out.beta = beta;
    out.schedule = schedule;
    out.core.assign(n, 0.0);

    std::vector<char> alive(n, 1);
    int remaining = n;
    const double eps = 1e-12;
    double integer_threshold = 1.0;
    while (remaining > 0) {
        double threshold;
        if (schedule == CoreSchedule::integer_steps) {
            threshold = integer_threshold;
            integer_threshold += 1.0;
        } else {
            threshold = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i)
                if (alive[i])
                    threshold =
                        std::min(threshold, detail::weighted_degree_masked(w, alive, i, alpha, beta));
        }
        // Cascade at this threshold until no removable node is left. Nodes
        // are peeled one at a time (lowest degree first, then index) so the
        // removal log replays exactly; because degrees are monotone under
        // removals this assigns the same cores as removing whole waves.
        while (true) {
            int pick = -1;
            double pick_khat = 0.0;
            for (int i = 0; i < n; ++i) {
                if (!alive[i]) continue;
                double khat = detail::weighted_degree_masked(w, alive, i, alpha, beta);
                if (khat <= threshold + eps && (pick < 0 || khat < pick_khat)) {
                    pick = i;
                    pick_khat = khat;
                }
            }
            if (pick < 0) break;
            alive[pick] = 0;
            --remaining;
            out.core[pick] = threshold;
            out.removal_log.push_back({pick, threshold, pick_khat});
        }
    }

    double kmax = *std::max_element(out.core.begin(), out.core.end());
    out.core_normalized.assign(n, 0.0);
    if (kmax > 0)
        for (int i = 0; i < n; ++i) out.core_normalized[i] = out.core[i] / kmax;
    return out;
}

/// Institutions ordered by descending core index; ties break by descending
/// importance W_i, then name. This ordering also sorts correlation-matrix
/// axes.
inline std::vector<int> topological_ranking(const CoreDecomposition& decomp,
                                            const AggregatedGraph& graph,
                                            std::span<const std::string> names) {
    const int n = graph.size();
    if (static_cast<int>(decomp.core.size()) != n || static_cast<int>(names.size()) != n)
        throw ValidationError("topological_ranking: size mismatch");
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (decomp.core[a] != decomp.core[b]) return decomp.core[a] > decomp.core[b];
        if (graph.importance[a] != graph.importance[b])
            return graph.importance[a] > graph.importance[b];
        return names[a] < names[b];
    });
    return order;
}

/// Joined table of the topology-based and activity-based rankings.
struct CoreVsActivityRow {
    int institution;
    double core;
    double core_normalized;
    int topological_rank;  // 1-based position in the k-core ordering
    int activity_rank;     // R_i
    int displacement;      // |topological - activity|
};

inline std::vector<CoreVsActivityRow> compare_core_vs_activity(std::span<const int> topological_order,
                                                               const CoreDecomposition& decomp,
                                                               const AggregateRanking& agg) {
    if (topological_order.size() != agg.rank.size())
        throw ValidationError("compare_core_vs_activity: institution sets differ");
    std::vector<CoreVsActivityRow> rows;
    for (std::size_t pos = 0; pos < topological_order.size(); ++pos) {
        int i = topological_order[pos];
        if (i < 0 || i >= static_cast<int>(agg.rank.size()))
            throw ValidationError("compare_core_vs_activity: institution sets differ");
        CoreVsActivityRow row;
        row.institution = i;
        row.core = decomp.core[i];
        row.core_normalized = decomp.core_normalized[i];
        row.topological_rank = static_cast<int>(pos) + 1;
        row.activity_rank = agg.rank[i];
        row.displacement = std::abs(row.topological_rank - row.activity_rank);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace otcnet
