#pragma once

#include <span>
#include <vector>

#include "otcnet/common.hpp"
#include "otcnet/panel.hpp"
#include "otcnet/quarter.hpp"

namespace otcnet {

/// Dense symmetric matrix with zero diagonal; N is small (tens of nodes), so
/// dense storage indexed by registry order keeps everything deterministic.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n) : n_(n), v_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * n_ + j]; }
    void set(int i, int j, double w) {
        v_[static_cast<std::size_t>(i) * n_ + j] = w;
        v_[static_cast<std::size_t>(j) * n_ + i] = w;
    }
    /// Row sum in fixed index order (bit-stable regardless of caller).
    double row_sum(int i) const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += at(i, j);
        return s;
    }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    int n_ = 0;
    std::vector<double> v_;
};

enum class LinkMode { binary, rank_weighted };

inline const char* to_string(LinkMode mode) {
    return mode == LinkMode::binary ? "binary" : "rank_weighted";
}

/// Co-occurrence links for one quarter: l_ij = 1 when both institutions hold
/// a rank in 1..25, 0 otherwise. Self links are always zero.
inline SquareMatrix binary_links(std::span<const int> ranks) {
    SquareMatrix m(static_cast<int>(ranks.size()));
    for (int i = 0; i < m.size(); ++i) {
        if (ranks[i] < 1 || ranks[i] > 25) continue;
        for (int j = i + 1; j < m.size(); ++j) {
            if (ranks[j] < 1 || ranks[j] > 25) continue;
            m.set(i, j, 1.0);
        }
    }
    return m;
}

/// Rank-weighted links: l_ij = min(1/r_i, 1/r_j) = 1/max(r_i, r_j), so a
/// link weighs no more than the activity of its less active endpoint.
inline SquareMatrix rank_weighted_links(std::span<const int> ranks) {
    SquareMatrix m(static_cast<int>(ranks.size()));
    for (int i = 0; i < m.size(); ++i) {
        if (ranks[i] < 1 || ranks[i] > 25) continue;
        for (int j = i + 1; j < m.size(); ++j) {
            if (ranks[j] < 1 || ranks[j] > 25) continue;
            m.set(i, j, 1.0 / static_cast<double>(std::max(ranks[i], ranks[j])));
        }
    }
    return m;
}

/// Per-quarter link matrices over a quarter range.
struct TemporalNetwork {
    LinkMode mode = LinkMode::binary;
    Quarter start{};                    // calendar quarter of frames[0]
    std::vector<SquareMatrix> frames;   // one symmetric matrix per quarter

    int quarters() const { return static_cast<int>(frames.size()); }
    Quarter quarter_label(int t) const { return quarter_at(start, t - 1); }
};

inline TemporalNetwork build_temporal_network(const Panel& panel, LinkMode mode) {
    TemporalNetwork net;
    net.mode = mode;
    net.start = panel.start();
    net.frames.reserve(panel.quarters());
    for (int t = 1; t <= panel.quarters(); ++t) {
        std::vector<int> ranks = panel.ranks_at(t);
        net.frames.push_back(mode == LinkMode::binary ? binary_links(ranks)
                                                      : rank_weighted_links(ranks));
    }
    return net;
}

/// Time-aggregated weights w_ij = (1/T) sum_t l_ij(t), normalized over the
/// full declared range (quarters where a pair is absent still count in T),
/// with node importances W_i = sum_j w_ij.
struct AggregatedGraph {
    LinkMode mode = LinkMode::binary;
    int quarters = 0;  // T used as the normalization denominator
    SquareMatrix weights;
    std::vector<double> importance;             // W_i
    std::vector<double> normalized_importance;  // W_i / sum W

    int size() const { return weights.size(); }
};

inline AggregatedGraph aggregate_links(const TemporalNetwork& net) {
    if (net.frames.empty()) throw ValidationError("aggregate_links: empty temporal network");
    const int n = net.frames.front().size();
    AggregatedGraph g;
    g.mode = net.mode;
    g.quarters = net.quarters();
    g.weights = SquareMatrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (const SquareMatrix& frame : net.frames) acc += frame.at(i, j);
            g.weights.set(i, j, acc / g.quarters);
        }
    }
    g.importance.resize(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        g.importance[i] = g.weights.row_sum(i);
        total += g.importance[i];
    }
    g.normalized_importance.resize(n);
    for (int i = 0; i < n; ++i)
        g.normalized_importance[i] = total > 0 ? g.importance[i] / total : 0.0;
    return g;
}

/// Restriction of a temporal network to a run of quarters; the aggregation
/// denominator of the result is the restricted length.
inline TemporalNetwork period_subnetwork(const TemporalNetwork& net, QuarterSpan span) {
    if (span.first < 1 || span.last > net.quarters() || span.first > span.last)
        throw ValidationError("period_subnetwork: empty or out-of-range span");
    TemporalNetwork sub;
    sub.mode = net.mode;
    sub.start = quarter_at(net.start, span.first - 1);
    sub.frames.assign(net.frames.begin() + (span.first - 1), net.frames.begin() + span.last);
    return sub;
}

}  // namespace otcnet
