#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcnet/common.hpp"
#include "otcnet/panel.hpp"

namespace otcnet {

/// Ranks one quarter's activities: strictly greater activity gets a strictly
/// smaller rank, ties break by name order, zero activity means absence and
/// yields rank 0. Throws when nothing is rankable.
inline std::vector<int> rank_quarter(std::span<const Currency> activities,
                                     std::span<const std::string> names) {
    if (activities.size() != names.size())
        throw ValidationError("rank_quarter: activities and names differ in length");
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < activities.size(); ++i) {
        if (activities[i] < 0) throw ValidationError("rank_quarter: negative activity");
        if (activities[i] > 0) order.push_back(i);
    }
    if (order.empty()) throw ValidationError("rank_quarter: no positive activity to rank");
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (activities[a] != activities[b]) return activities[a] > activities[b];
        return names[a] < names[b];
    });
    std::vector<int> ranks(activities.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
    return ranks;
}

/// Whole-period activity totals and the rankings they induce.
struct AggregateRanking {
    std::vector<Currency> total;      // A_i
    std::vector<Currency> total_otc;  // A_i over OTC volume only
    std::vector<Currency> total_etd;
    std::vector<int> rank;            // R_i, rank of total
    std::vector<int> rank_otc;        // rank of the OTC totals
};

/// Sums activities over all quarters (absent quarters contribute zero) and
/// ranks the aggregates with rank_quarter semantics.
inline AggregateRanking aggregate(const Panel& panel) {
    const int n = panel.institutions();
    AggregateRanking agg;
    agg.total.assign(n, 0);
    agg.total_otc.assign(n, 0);
    agg.total_etd.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int t : panel.presence(i)) {
            const QuarterRecord* rec = panel.record(i, t);
            agg.total[i] += rec->activity;
            agg.total_otc[i] += rec->activity_otc;
            agg.total_etd[i] += rec->activity_etd;
        }
    }
    agg.rank = rank_quarter(agg.total, panel.registry());
    agg.rank_otc = rank_quarter(agg.total_otc, panel.registry());
    return agg;
}

/// Fraction of total aggregated activity held by the top_k ranked
/// institutions within the given period. Nondecreasing in top_k, 1 at k=N.
inline double market_share(const Panel& panel, int top_k, QuarterSpan period) {
    if (top_k < 1) throw ValidationError("market_share: top_k must be >= 1");
    if (period.first < 1 || period.last > panel.quarters() || period.first > period.last)
        throw ValidationError("market_share: period out of range");
    std::vector<Currency> totals(panel.institutions(), 0);
    for (int i = 0; i < panel.institutions(); ++i)
        for (int t : panel.presence(i))
            if (period.contains(t)) totals[i] += panel.record(i, t)->activity;
    std::sort(totals.begin(), totals.end(), std::greater<>());
    double all = 0.0, top = 0.0;
    for (std::size_t i = 0; i < totals.size(); ++i) {
        all += static_cast<double>(totals[i]);
        if (static_cast<int>(i) < top_k) top += static_cast<double>(totals[i]);
    }
    if (all <= 0) throw ValidationError("market_share: no activity in period");
    return top / all;
}

/// Per-institution OTC/ETD composition of the aggregated activity.
struct OtcRatio {
    enum class Flag { ok, infinite, undefined };
    int institution = -1;
    double ratio = 0.0;  // meaningful only when flag == ok
    Flag flag = Flag::ok;
};

inline std::vector<OtcRatio> otc_ratio(const AggregateRanking& agg) {
    std::vector<OtcRatio> out;
    for (std::size_t i = 0; i < agg.total.size(); ++i) {
        OtcRatio r;
        r.institution = static_cast<int>(i);
        if (agg.total_etd[i] > 0) {
            r.ratio = static_cast<double>(agg.total_otc[i]) / static_cast<double>(agg.total_etd[i]);
            r.flag = OtcRatio::Flag::ok;
        } else if (agg.total_otc[i] > 0) {
            r.flag = OtcRatio::Flag::infinite;
        } else {
            r.flag = OtcRatio::Flag::undefined;
        }
        out.push_back(r);
    }
    return out;
}

/// Positional displacement of each institution between two rankings over the
/// same set, with the maximum displacement in fixed rank bands (1-15, 16-50,
/// 51+).
struct RankComparison {
    struct Row {
        int institution;
        int rank_a;
        int rank_b;
        int displacement;  // |rank_a - rank_b|
    };
    std::vector<Row> rows;          // ordered by rank_a
    std::map<std::string, int> max_displacement_by_band;
};

inline RankComparison compare_rankings(std::span<const int> rank_a, std::span<const int> rank_b) {
    if (rank_a.size() != rank_b.size())
        throw ValidationError("compare_rankings: rankings cover different institution sets");
    for (std::size_t i = 0; i < rank_a.size(); ++i)
        if ((rank_a[i] == 0) != (rank_b[i] == 0))
            throw ValidationError("compare_rankings: rankings cover different institution sets");
    RankComparison cmp;
    cmp.max_displacement_by_band = {{"1-15", 0}, {"16-50", 0}, {"51+", 0}};
    for (std::size_t i = 0; i < rank_a.size(); ++i) {
        if (rank_a[i] == 0) continue;
        RankComparison::Row row{static_cast<int>(i), rank_a[i], rank_b[i],
                                std::abs(rank_a[i] - rank_b[i])};
        std::string band = row.rank_a <= 15 ? "1-15" : row.rank_a <= 50 ? "16-50" : "51+";
        auto& best = cmp.max_displacement_by_band[band];
        best = std::max(best, row.displacement);
        cmp.rows.push_back(row);
    }
    std::sort(cmp.rows.begin(), cmp.rows.end(),
              [](const auto& a, const auto& b) { return a.rank_a < b.rank_a; });
    return cmp;
}

/// Least-squares trend of log activity against time in years.
struct GrowthTrend {
    double slope_per_year = 0.0;
    double yearly_ratio = 1.0;         // exp(slope)
    int points = 0;                    // observations used
    std::vector<int> excluded_quarters;  // zero-activity quarters in the window
};

/// Regresses ln a(t) on time measured in years over the window [first,last]
/// (1-based quarter indices into the series). Quarters with zero activity
/// are excluded and reported; fewer than 8 usable points is an error.
inline GrowthTrend growth_trend(std::span<const Currency> series, QuarterSpan window) {
    if (window.first < 1 || window.last > static_cast<int>(series.size()) ||
        window.first > window.last)
        throw ValidationError("growth_trend: window out of range");
    GrowthTrend trend;
    std::vector<double> xs, ys;
    for (int t = window.first; t <= window.last; ++t) {
        Currency a = series[t - 1];
        if (a <= 0) {
            trend.excluded_quarters.push_back(t);
            continue;
        }
        xs.push_back((t - window.first) / 4.0);
        ys.push_back(std::log(static_cast<double>(a)));
    }
    if (xs.size() < 8)
        throw ValidationError("growth_trend: need at least 8 positive observations, have " +
                              std::to_string(xs.size()));
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0) throw ValidationError("growth_trend: degenerate time axis");
    trend.slope_per_year = sxy / sxx;
    trend.yearly_ratio = std::exp(trend.slope_per_year);
    trend.points = static_cast<int>(xs.size());
    return trend;
}

/// Activity series of one institution over the full panel range, zero when
/// absent.
inline std::vector<Currency> activity_series(const Panel& panel, int institution) {
    std::vector<Currency> out(panel.quarters(), 0);
    for (int t : panel.presence(institution)) out[t - 1] = panel.record(institution, t)->activity;
    return out;
}

}  // namespace otcnet
