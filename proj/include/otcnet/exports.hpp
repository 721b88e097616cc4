#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "otcnet/activity.hpp"
#include "otcnet/correlate.hpp"
#include "otcnet/kcore.hpp"
#include "otcnet/network.hpp"
#include "otcnet/panel.hpp"
#include "otcnet/stats.hpp"

namespace otcnet {

using json = nlohmann::json;

// All emitters take explicit streams so tests can capture output; the CLI
// layer owns file creation. Numbers in CSV use 9-significant-digit fixed
// formatting, undefined values serialize as empty CSV cells / JSON nulls.

inline void write_registry_json(const Panel& panel, std::ostream& out) {
    json doc;
    doc["institutions"] = json::array();
    for (int i = 0; i < panel.institutions(); ++i)
        doc["institutions"].push_back({{"id", i}, {"name", panel.name(i)}});
    doc["quarters"] = {{"start", panel.start().label()},
                       {"end", panel.quarter_label(panel.quarters()).label()},
                       {"count", panel.quarters()}};
    doc["ranked_records"] = panel.ranked_record_count();
    out << doc.dump(2) << '\n';
}

inline void write_rank_activity_csv(const Panel& panel, const AggregateRanking& agg,
                                    std::ostream& out) {
    csv::Writer w(out);
    w.field("institution").field("rank").field("activity").field("activity_otc")
        .field("activity_etd").field("rank_otc").field("rank_displacement");
    w.endrow();
    RankComparison cmp = compare_rankings(agg.rank, agg.rank_otc);
    std::vector<int> displacement(agg.rank.size(), 0);
    for (const auto& row : cmp.rows) displacement[row.institution] = row.displacement;
    std::vector<int> order(agg.rank.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return agg.rank[a] < agg.rank[b]; });
    for (int i : order) {
        w.field(panel.name(i)).field(agg.rank[i]).field(agg.total[i]).field(agg.total_otc[i])
            .field(agg.total_etd[i]).field(agg.rank_otc[i]).field(displacement[i]);
        w.endrow();
    }
}

inline void write_cumulative_share_csv(const Panel& panel, std::ostream& out) {
    csv::Writer w(out);
    w.field("top_k").field("cumulative_share");
    w.endrow();
    for (int k = 1; k <= panel.institutions(); ++k) {
        w.field(k).field(market_share(panel, k, panel.full_span()));
        w.endrow();
    }
}

inline void write_otc_ratio_csv(const Panel& panel, const AggregateRanking& agg, std::ostream& out) {
    csv::Writer w(out);
    w.field("institution").field("rank").field("otc_to_etd_ratio").field("flag");
    w.endrow();
    std::vector<OtcRatio> ratios = otc_ratio(agg);
    std::sort(ratios.begin(), ratios.end(),
              [&](const OtcRatio& a, const OtcRatio& b) {
                  return agg.rank[a.institution] < agg.rank[b.institution];
              });
    for (const OtcRatio& r : ratios) {
        w.field(panel.name(r.institution)).field(agg.rank[r.institution]);
        switch (r.flag) {
            case OtcRatio::Flag::ok: w.field(r.ratio).field("ok"); break;
            case OtcRatio::Flag::infinite: w.empty().field("infinite"); break;
            case OtcRatio::Flag::undefined: w.empty().field("undefined"); break;
        }
        w.endrow();
    }
}

inline void write_stats_json(const LognormalFit& fit, const std::string& fit_method,
                             const std::string& fit_normalization, double gini_value,
                             double skewness_value, const KsResult& ks, std::ostream& out) {
    json doc;
    doc["mu"] = fit.mu;
    doc["sigma"] = fit.sigma;
    doc["gini"] = gini_value;
    doc["skewness"] = skewness_value;
    doc["ks"] = {{"trials", ks.trials}, {"threshold", ks.p_threshold},
                 {"passes", ks.passes}, {"seed", ks.seed},   {"prng", ks.prng}};
    doc["fit"] = {{"method", fit_method}, {"normalization", fit_normalization}};
    out << doc.dump(2) << '\n';
}

// -- graph exports ----------------------------------------------------------

inline void write_edge_list_csv(const Panel& panel, const AggregatedGraph& graph, std::ostream& out) {
    csv::Writer w(out);
    w.field("i").field("j").field("weight");
    w.endrow();
    for (int i = 0; i < graph.size(); ++i)
        for (int j = i + 1; j < graph.size(); ++j)
            if (graph.weights.at(i, j) > 0) {
                w.field(panel.name(i)).field(panel.name(j)).field(graph.weights.at(i, j));
                w.endrow();
            }
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline void write_graphml(const Panel& panel, const AggregatedGraph& graph, std::ostream& out) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
        << "  <key id=\"importance\" for=\"node\" attr.name=\"importance\" attr.type=\"double\"/>\n"
        << "  <key id=\"nimportance\" for=\"node\" attr.name=\"normalized_importance\" attr.type=\"double\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (int i = 0; i < graph.size(); ++i) {
        out << "    <node id=\"n" << i << "\">"
            << "<data key=\"name\">" << xml_escape(panel.name(i)) << "</data>"
            << "<data key=\"importance\">" << csv::format_number(graph.importance[i]) << "</data>"
            << "<data key=\"nimportance\">" << csv::format_number(graph.normalized_importance[i])
            << "</data></node>\n";
    }
    int edge_id = 0;
    for (int i = 0; i < graph.size(); ++i)
        for (int j = i + 1; j < graph.size(); ++j)
            if (graph.weights.at(i, j) > 0)
                out << "    <edge id=\"e" << edge_id++ << "\" source=\"n" << i << "\" target=\"n" << j
                    << "\"><data key=\"weight\">" << csv::format_number(graph.weights.at(i, j))
                    << "</data></edge>\n";
    out << "  </graph>\n</graphml>\n";
}

inline void write_dot(const Panel& panel, const AggregatedGraph& graph, std::ostream& out) {
    out << "graph counterparty_risk {\n";
    for (int i = 0; i < graph.size(); ++i)
        out << "  n" << i << " [label=\"" << panel.name(i) << "\" width="
            << csv::format_number(graph.normalized_importance[i]) << "];\n";
    for (int i = 0; i < graph.size(); ++i)
        for (int j = i + 1; j < graph.size(); ++j)
            if (graph.weights.at(i, j) > 0)
                out << "  n" << i << " -- n" << j << " [weight="
                    << csv::format_number(graph.weights.at(i, j)) << "];\n";
    out << "}\n";
}

/// One plot-ready frame per quarter: present nodes with their quarterly
/// importance (sum of that quarter's link weights) and the quarter's links.
/// When a correlation matrix is supplied, each link carries its scaled
/// correlation as a color value (null where undefined).
inline json frame_json(const Panel& panel, const TemporalNetwork& net, int t,
                       const CorrelationMatrix* correlations = nullptr) {
    const SquareMatrix& frame = net.frames.at(t - 1);
    json doc;
    doc["quarter"] = net.quarter_label(t).label();
    doc["mode"] = to_string(net.mode);
    doc["nodes"] = json::array();
    doc["links"] = json::array();
    std::vector<double> quarterly_importance(frame.size(), 0.0);
    double total = 0.0;
    for (int i = 0; i < frame.size(); ++i) {
        quarterly_importance[i] = frame.row_sum(i);
        total += quarterly_importance[i];
    }
    for (int i = 0; i < frame.size(); ++i) {
        if (panel.rank(i, t) < 1) continue;  // absent institutions are omitted
        doc["nodes"].push_back({{"id", i},
                                {"name", panel.name(i)},
                                {"rank", panel.rank(i, t)},
                                {"importance", quarterly_importance[i]},
                                {"normalized_importance",
                                 total > 0 ? quarterly_importance[i] / total : 0.0}});
    }
    for (int i = 0; i < frame.size(); ++i) {
        for (int j = i + 1; j < frame.size(); ++j) {
            if (frame.at(i, j) <= 0) continue;
            json link = {{"source", i}, {"target", j}, {"weight", frame.at(i, j)}};
            if (correlations) {
                const auto& cell = correlations->at(i, j);
                if (cell.scaled_value)
                    link["correlation"] = *cell.scaled_value;
                else if (cell.rho && !correlations->scaled)
                    link["correlation"] = *cell.rho;
                else
                    link["correlation"] = nullptr;
            }
            doc["links"].push_back(link);
        }
    }
    return doc;
}

// -- k-core and correlation exports ------------------------------------------

inline void write_kcore_csv(const Panel& panel, const std::vector<CoreVsActivityRow>& rows,
                            std::ostream& out) {
    csv::Writer w(out);
    w.field("institution").field("core").field("core_normalized").field("topological_rank")
        .field("activity_rank").field("displacement");
    w.endrow();
    for (const auto& row : rows) {
        w.field(panel.name(row.institution)).field(row.core).field(row.core_normalized)
            .field(row.topological_rank).field(row.activity_rank).field(row.displacement);
        w.endrow();
    }
}

/// Matrix CSV with header row/column of institution names in axis order;
/// undefined cells are empty. Scaled matrices emit the scaled value.
inline void write_matrix_csv(const Panel& panel, const CorrelationMatrix& m, std::ostream& out) {
    csv::Writer w(out);
    w.field("institution");
    for (int idx : m.axis_order) w.field(panel.name(idx));
    w.endrow();
    for (int i : m.axis_order) {
        w.field(panel.name(i));
        for (int j : m.axis_order) {
            const auto& cell = m.at(i, j);
            std::optional<double> v = m.scaled ? cell.scaled_value : cell.rho;
            v ? (void)w.field(*v) : (void)w.empty();
        }
        w.endrow();
    }
}

/// Sidecar with per-cell overlap counts, definedness and scaling weights.
inline void write_matrix_sidecar_json(const Panel& panel, const CorrelationMatrix& m,
                                      std::ostream& out) {
    json doc;
    doc["field"] = to_string(m.field);
    doc["period"] = {{"first", panel.quarter_label(m.period.first).label()},
                     {"last", panel.quarter_label(m.period.last).label()},
                     {"quarters", m.period.length()}};
    doc["scaled"] = m.scaled;
    doc["order"] = json::array();
    for (int idx : m.axis_order) doc["order"].push_back(panel.name(idx));
    json rho = json::array(), overlap = json::array(), weight = json::array(),
         scaled_value = json::array();
    for (int i : m.axis_order) {
        json rrow = json::array(), orow = json::array(), wrow = json::array(), srow = json::array();
        for (int j : m.axis_order) {
            const auto& cell = m.at(i, j);
            rrow.push_back(cell.rho ? json(*cell.rho) : json(nullptr));
            orow.push_back(cell.overlap);
            wrow.push_back(cell.weight);
            srow.push_back(cell.scaled_value ? json(*cell.scaled_value) : json(nullptr));
        }
        rho.push_back(rrow);
        overlap.push_back(orow);
        weight.push_back(wrow);
        scaled_value.push_back(srow);
    }
    doc["rho"] = rho;
    doc["overlap"] = overlap;
    doc["weight"] = weight;
    if (m.scaled) doc["scaled_value"] = scaled_value;
    out << doc.dump(2) << '\n';
}

}  // namespace otcnet
