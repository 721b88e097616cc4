#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcnet/common.hpp"
#include "otcnet/network.hpp"
#include "otcnet/panel.hpp"

namespace otcnet {

/// Which reported series a correlation runs over. Activity availability is
/// the presence set; exposure availability additionally requires a non-null
/// reported cell.
enum class SeriesField { activity_total, activity_otc, cce, tce };

inline const char* to_string(SeriesField f) {
    switch (f) {
        case SeriesField::activity_total: return "activity_total";
        case SeriesField::activity_otc: return "activity_otc";
        case SeriesField::cce: return "cce";
        case SeriesField::tce: return "tce";
    }
    return "?";
}

inline SeriesField series_field_from_string(const std::string& s) {
    if (s == "activity_total") return SeriesField::activity_total;
    if (s == "activity_otc") return SeriesField::activity_otc;
    if (s == "cce") return SeriesField::cce;
    if (s == "tce") return SeriesField::tce;
    throw ConfigError("unknown series field: '" + s + "'");
}

/// A per-quarter series with explicit availability. Values at unavailable
/// quarters are zero-filled for the diagnostic full-length correlation only.
struct Series {
    std::vector<double> value;      // length T, zero where unavailable
    std::vector<char> available;    // length T
};

inline Series extract_series(const Panel& panel, int institution, SeriesField field) {
    Series s;
    s.value.assign(panel.quarters(), 0.0);
    s.available.assign(panel.quarters(), 0);
    for (int t : panel.presence(institution)) {
        const QuarterRecord* rec = panel.record(institution, t);
        std::optional<Currency> v;
        switch (field) {
            case SeriesField::activity_total: v = rec->activity; break;
            case SeriesField::activity_otc: v = rec->activity_otc; break;
            case SeriesField::cce: v = rec->cce; break;
            case SeriesField::tce: v = rec->tce; break;
        }
        if (!v) continue;  // null exposure cell: ranked but unavailable
        s.value[t - 1] = static_cast<double>(*v);
        s.available[t - 1] = 1;
    }
    return s;
}

/// Product-moment correlation over two full-length series (the zero-fill
/// diagnostic mode). Undefined (nullopt) when either variance vanishes.
inline std::optional<double> pearson_full(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw ValidationError("pearson_full: series lengths differ or are empty");
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t t = 0; t < n; ++t) {
        mx += x[t];
        my += y[t];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t t = 0; t < n; ++t) {
        sxx += (x[t] - mx) * (x[t] - mx);
        syy += (y[t] - my) * (y[t] - my);
        sxy += (x[t] - mx) * (y[t] - my);
    }
    if (sxx <= 0 || syy <= 0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

struct PairwiseResult {
    std::optional<double> rho;  // nullopt: undefined (overlap < 2 or zero variance)
    int overlap = 0;            // #[T_i intersect T_j], always reported
};

/// Correlation over pairwise-available observations: the sum, means and
/// standard deviations all restrict to the overlap of the two availability
/// sets, which keeps rho in [-1, 1] and makes a complete overlap coincide
/// with pearson_full.
inline PairwiseResult pearson_pairwise(std::span<const double> x, std::span<const double> y,
                                       std::span<const char> x_avail, std::span<const char> y_avail) {
    if (x.size() != y.size() || x.size() != x_avail.size() || y.size() != y_avail.size())
        throw ValidationError("pearson_pairwise: series lengths differ");
    std::vector<double> xs, ys;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (x_avail[t] && y_avail[t]) {
            xs.push_back(x[t]);
            ys.push_back(y[t]);
        }
    }
    PairwiseResult result;
    result.overlap = static_cast<int>(xs.size());
    if (result.overlap < 2) return result;
    result.rho = pearson_full(xs, ys);
    return result;
}

/// Correlation matrix with per-cell definedness, overlap counts and
/// weight-scaled values. Cells are stored in registry order; axis_order
/// carries the topological ordering used for export.
struct CorrelationMatrix {
    SeriesField field = SeriesField::activity_total;
    QuarterSpan period{};
    bool scaled = false;

    struct Cell {
        std::optional<double> rho;
        int overlap = 0;
        double weight = 0.0;                 // w_ij from binary-mode aggregation
        std::optional<double> scaled_value;  // rho * w_ij when defined and scaling on
    };

    int n = 0;
    std::vector<Cell> cells;      // n * n, registry order
    std::vector<int> axis_order;  // export order (topological ranking)

    const Cell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * n + j]; }
    Cell& at(int i, int j) { return cells[static_cast<std::size_t>(i) * n + j]; }
};

/// Multiplies defined coefficients by the binary co-occurrence weights,
/// bounding each cell by [-w_ij, +w_ij]. The diagonal uses w_ii = 1 so
/// self-correlation still displays as 1. Rank-weighted aggregations are
/// rejected: scaling is defined over the fraction of co-appearing quarters.
inline void scale_by_weight(CorrelationMatrix& matrix, const AggregatedGraph& weights) {
    if (weights.mode != LinkMode::binary)
        throw ValidationError("scale_by_weight: weights must come from binary-mode aggregation");
    if (weights.size() != matrix.n) throw ValidationError("scale_by_weight: size mismatch");
    matrix.scaled = true;
    for (int i = 0; i < matrix.n; ++i) {
        for (int j = 0; j < matrix.n; ++j) {
            auto& cell = matrix.at(i, j);
            cell.weight = i == j ? 1.0 : weights.weights.at(i, j);
            if (cell.rho) cell.scaled_value = *cell.rho * cell.weight;
        }
    }
}

/// Full pairwise-available correlation matrix of one field over a period,
/// optionally weight-scaled. axis_order (usually the k-core topological
/// ranking) is recorded for export; pass an empty span to keep registry
/// order.
inline CorrelationMatrix correlation_matrix(const Panel& panel, SeriesField field, QuarterSpan period,
                                            bool scaled, const AggregatedGraph& binary_weights,
                                            std::span<const int> axis_order = {}) {
    if (period.first < 1 || period.last > panel.quarters() || period.first > period.last)
        throw ValidationError("correlation_matrix: empty or out-of-range period");
    const int n = panel.institutions();
    CorrelationMatrix m;
    m.field = field;
    m.period = period;
    m.n = n;
    m.cells.resize(static_cast<std::size_t>(n) * n);
    if (axis_order.empty()) {
        m.axis_order.resize(n);
        for (int i = 0; i < n; ++i) m.axis_order[i] = i;
    } else {
        if (static_cast<int>(axis_order.size()) != n)
            throw ValidationError("correlation_matrix: axis order size mismatch");
        m.axis_order.assign(axis_order.begin(), axis_order.end());
    }

    // restrict series to the period
    const int len = period.length();
    std::vector<Series> series(n);
    for (int i = 0; i < n; ++i) {
        Series full = extract_series(panel, i, field);
        Series cut;
        cut.value.assign(full.value.begin() + (period.first - 1), full.value.begin() + period.last);
        cut.available.assign(full.available.begin() + (period.first - 1),
                             full.available.begin() + period.last);
        series[i] = std::move(cut);
    }
    (void)len;

    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            PairwiseResult r = pearson_pairwise(series[i].value, series[j].value,
                                                series[i].available, series[j].available);
            auto& cell = m.at(i, j);
            cell.rho = r.rho;
            cell.overlap = r.overlap;
            if (i != j) m.at(j, i) = cell;
        }
    }
    if (scaled) scale_by_weight(m, binary_weights);
    return m;
}

/// Splits the panel range at a boundary quarter: period A is everything
/// before it, period B starts at the boundary (the boundary quarter marks the
/// beginning of the "after" period). The boundary may not sit at either
/// extreme, so both periods are nonempty.
inline std::pair<QuarterSpan, QuarterSpan> split_at(const Panel& panel, Quarter boundary) {
    int b = quarters_between(boundary, panel.start()) + 1;
    if (b <= 1 || b > panel.quarters())
        throw ValidationError("split_at: boundary " + boundary.label() +
                              " must lie strictly inside the panel range");
    return {QuarterSpan{1, b - 1}, QuarterSpan{b, panel.quarters()}};
}

}  // namespace otcnet
