#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "otcnet/activity.hpp"
#include "otcnet/alias.hpp"
#include "otcnet/correlate.hpp"
#include "otcnet/detail/sha256.hpp"
#include "otcnet/exports.hpp"
#include "otcnet/kcore.hpp"
#include "otcnet/network.hpp"
#include "otcnet/panel.hpp"
#include "otcnet/stats.hpp"

namespace otcnet {

namespace fs = std::filesystem;

/// Effective run configuration. A config file provides defaults, CLI flags
/// override individual fields, and the merged result is echoed into the
/// manifest so every tunable constant of a run stays auditable.
struct RunConfig {
    // inputs
    std::string input_csv;   // raw 17-column table (ingest)
    std::string alias_tsv;   // entity-resolution table (ingest)
    std::string panel_csv;   // normalized panel (analysis commands)
    std::optional<std::string> quarter_start;
    std::optional<std::string> quarter_end;

    // k-core exponents
    double alpha = 0.0;
    double beta = 1.0;

    // correlations
    std::vector<std::string> correlation_fields = {"activity_total", "cce", "tce"};
    std::optional<std::string> split_quarter = "2008-Q4";
    std::optional<std::string> period;  // full | pre | post | YYYY-Qn:YYYY-Qn
    bool scaled = true;

    // distribution fit / KS
    std::string fit_method = "log_moments";  // or "nls_logspace"
    std::string fit_normalization = "unnormalized";
    int ks_trials = 10000;
    double ks_p_threshold = 0.10;
    std::uint64_t seed = 20120331;

    std::string out_dir = "out";
    bool tolerant = false;
    bool override_merge_safety = false;

    void validate() const {
        if (!(alpha + beta > 0.0)) throw ConfigError("alpha + beta must be > 0");
        if (fit_method != "log_moments" && fit_method != "nls_logspace")
            throw ConfigError("fit_method must be log_moments or nls_logspace");
        if (fit_normalization != "unnormalized" && fit_normalization != "unit_sum")
            throw ConfigError("fit_normalization must be unnormalized or unit_sum");
        for (const auto& f : correlation_fields) series_field_from_string(f);
        if (!(ks_p_threshold > 0.0 && ks_p_threshold < 1.0))
            throw ConfigError("ks_p_threshold must lie in (0,1)");
        if (ks_trials < 1) throw ConfigError("ks_trials must be >= 1");
    }

    json to_json() const {
        json j;
        j["input_csv"] = input_csv;
        j["alias_tsv"] = alias_tsv;
        j["panel_csv"] = panel_csv;
        j["quarter_start"] = quarter_start ? json(*quarter_start) : json(nullptr);
        j["quarter_end"] = quarter_end ? json(*quarter_end) : json(nullptr);
        j["alpha"] = alpha;
        j["beta"] = beta;
        j["correlation_fields"] = correlation_fields;
        j["split_quarter"] = split_quarter ? json(*split_quarter) : json(nullptr);
        j["period"] = period ? json(*period) : json(nullptr);
        j["scaled"] = scaled;
        j["fit_method"] = fit_method;
        j["fit_normalization"] = fit_normalization;
        j["ks_trials"] = ks_trials;
        j["ks_p_threshold"] = ks_p_threshold;
        j["seed"] = seed;
        j["out_dir"] = out_dir;
        j["tolerant"] = tolerant;
        j["override_merge_safety"] = override_merge_safety;
        return j;
    }

    static RunConfig from_json(const json& j) {
        RunConfig cfg;
        auto get_str = [&](const char* key, std::string& into) {
            if (j.contains(key) && !j[key].is_null()) into = j[key].get<std::string>();
        };
        auto get_opt = [&](const char* key, std::optional<std::string>& into) {
            if (j.contains(key)) {
                if (j[key].is_null()) into.reset();
                else into = j[key].get<std::string>();
            }
        };
        get_str("input_csv", cfg.input_csv);
        get_str("alias_tsv", cfg.alias_tsv);
        get_str("panel_csv", cfg.panel_csv);
        get_opt("quarter_start", cfg.quarter_start);
        get_opt("quarter_end", cfg.quarter_end);
        if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
        if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
        if (j.contains("correlation_fields"))
            cfg.correlation_fields = j["correlation_fields"].get<std::vector<std::string>>();
        get_opt("split_quarter", cfg.split_quarter);
        get_opt("period", cfg.period);
        if (j.contains("scaled")) cfg.scaled = j["scaled"].get<bool>();
        get_str("fit_method", cfg.fit_method);
        get_str("fit_normalization", cfg.fit_normalization);
        if (j.contains("ks_trials")) cfg.ks_trials = j["ks_trials"].get<int>();
        if (j.contains("ks_p_threshold")) cfg.ks_p_threshold = j["ks_p_threshold"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        get_str("out_dir", cfg.out_dir);
        if (j.contains("tolerant")) cfg.tolerant = j["tolerant"].get<bool>();
        if (j.contains("override_merge_safety"))
            cfg.override_merge_safety = j["override_merge_safety"].get<bool>();
        return cfg;
    }

    static RunConfig load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        json j;
        in >> j;
        return from_json(j);
    }
};

struct Artifact {
    std::string path;  // relative to out_dir
    std::string family;
    std::string description;
};

namespace detail {

inline void ensure_out_dir(const RunConfig& cfg) { fs::create_directories(cfg.out_dir); }

template <typename Fn>
void write_file(const RunConfig& cfg, const std::string& rel, Fn&& body) {
    fs::path full = fs::path(cfg.out_dir) / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + full.string());
    body(out);
}

inline void write_lines(const RunConfig& cfg, const std::string& rel,
                        const std::vector<std::string>& lines) {
    write_file(cfg, rel, [&](std::ostream& out) {
        for (const auto& line : lines) out << line << '\n';
    });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands. Each returns the artifacts it wrote (paths relative to out_dir).

inline std::vector<Artifact> run_ingest(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.input_csv.empty()) throw ConfigError("ingest requires input_csv");
    if (cfg.alias_tsv.empty()) throw ConfigError("ingest requires alias_tsv");
    if (!fs::exists(cfg.input_csv)) throw ConfigError("input file does not exist: " + cfg.input_csv);
    if (!fs::exists(cfg.alias_tsv)) throw ConfigError("alias file does not exist: " + cfg.alias_tsv);
    detail::ensure_out_dir(cfg);

    AliasTable aliases = AliasTable::load_tsv(cfg.alias_tsv);
    RawParseResult raw = read_raw_rows_file(cfg.input_csv, cfg.tolerant);
    if (raw.rows.empty()) throw ValidationError(cfg.input_csv + ": no usable rows");

    Quarter start, end;
    if (cfg.quarter_start && cfg.quarter_end) {
        start = Quarter::parse(*cfg.quarter_start);
        end = Quarter::parse(*cfg.quarter_end);
    } else {
        start = Quarter::parse(raw.rows.front().quarter_label);
        end = start;
        for (const RawRow& row : raw.rows) {
            Quarter q = Quarter::parse(row.quarter_label);
            if (q < start) start = q;
            if (end < q) end = q;
        }
    }

    BuildOptions opt;
    opt.tolerant = cfg.tolerant;
    opt.override_merge_safety = cfg.override_merge_safety;
    BuildResult built = build_panel(raw.rows, aliases, start, end, opt);

    std::vector<std::string> recovery = raw.recovery;
    recovery.insert(recovery.end(), built.recovery_log.begin(), built.recovery_log.end());

    detail::write_file(cfg, "panel.csv", [&](std::ostream& o) { write_panel_csv(built.panel, o); });
    detail::write_file(cfg, "registry.json",
                       [&](std::ostream& o) { write_registry_json(built.panel, o); });
    detail::write_lines(cfg, "recovery.log", recovery);
    detail::write_lines(cfg, "merge.log", built.merge_log);
    return {{"panel.csv", "panel", "normalized panel, one ranked record per row"},
            {"registry.json", "panel", "canonical institution registry"},
            {"recovery.log", "panel", "skipped and repaired input rows"},
            {"merge.log", "panel", "identity merges and merge-safety findings"}};
}

/// Loads the panel an analysis command works on: the configured normalized
/// panel if given, otherwise the one a prior ingest left in out_dir.
inline Panel load_run_panel(const RunConfig& cfg) {
    std::string path = cfg.panel_csv;
    if (path.empty()) path = (fs::path(cfg.out_dir) / "panel.csv").string();
    if (!fs::exists(path)) throw ConfigError("normalized panel not found: " + path);
    return load_panel_csv_file(path);
}

inline std::vector<Artifact> run_stats(const RunConfig& cfg, const Panel& panel) {
    cfg.validate();
    detail::ensure_out_dir(cfg);
    AggregateRanking agg = aggregate(panel);

    // aggregates ordered by rank R_i = 1..N
    std::vector<double> by_rank(agg.total.size());
    for (std::size_t i = 0; i < agg.total.size(); ++i)
        by_rank[agg.rank[i] - 1] = static_cast<double>(agg.total[i]);

    LognormalFit fit;
    if (cfg.fit_method == "nls_logspace") {
        fit = fit_lognormal_rank(by_rank, cfg.fit_normalization == "unit_sum"
                                              ? FitNormalization::unit_sum
                                              : FitNormalization::unnormalized);
    } else {
        fit = fit_lognormal_moments(by_rank);
    }
    double g = gini(by_rank);
    double skew = sample_skewness(by_rank);
    KsConfig ks_cfg{cfg.ks_trials, cfg.ks_p_threshold, cfg.seed};
    KsResult ks = ks_montecarlo(by_rank, fit.mu, fit.sigma, ks_cfg);

    detail::write_file(cfg, "stats.json", [&](std::ostream& o) {
        write_stats_json(fit, cfg.fit_method, cfg.fit_normalization, g, skew, ks, o);
    });
    detail::write_file(cfg, "rank_activity.csv",
                       [&](std::ostream& o) { write_rank_activity_csv(panel, agg, o); });
    detail::write_file(cfg, "cumulative_share.csv",
                       [&](std::ostream& o) { write_cumulative_share_csv(panel, o); });
    detail::write_file(cfg, "otc_ratio.csv",
                       [&](std::ostream& o) { write_otc_ratio_csv(panel, agg, o); });
    return {{"stats.json", "stats", "concentration statistics, distribution fit and KS summary"},
            {"rank_activity.csv", "rank_activity",
             "aggregated activity and OTC ranking per institution"},
            {"cumulative_share.csv", "cumulative_share", "cumulative market share by rank"},
            {"otc_ratio.csv", "otc_ratio", "OTC/ETD composition per institution"}};
}

inline std::vector<Artifact> run_network(const RunConfig& cfg, const Panel& panel) {
    cfg.validate();
    detail::ensure_out_dir(cfg);
    std::vector<Artifact> artifacts;
    for (LinkMode mode : {LinkMode::binary, LinkMode::rank_weighted}) {
        TemporalNetwork net = build_temporal_network(panel, mode);
        AggregatedGraph graph = aggregate_links(net);
        std::string tag = to_string(mode);
        detail::write_file(cfg, "graph_" + tag + "_edges.csv",
                           [&](std::ostream& o) { write_edge_list_csv(panel, graph, o); });
        detail::write_file(cfg, "graph_" + tag + ".graphml",
                           [&](std::ostream& o) { write_graphml(panel, graph, o); });
        detail::write_file(cfg, "graph_" + tag + ".dot",
                           [&](std::ostream& o) { write_dot(panel, graph, o); });
        artifacts.push_back({"graph_" + tag + "_edges.csv", "graph",
                             "aggregated " + tag + " co-occurrence network, edge list"});
        artifacts.push_back({"graph_" + tag + ".graphml", "graph",
                             "aggregated " + tag + " co-occurrence network, GraphML"});
        artifacts.push_back({"graph_" + tag + ".dot", "graph",
                             "aggregated " + tag + " co-occurrence network, DOT"});
    }
    return artifacts;
}

/// Topological ordering shared by the kcore report and correlation axes:
/// decomposition of the rank-weighted aggregated network.
inline std::vector<int> topological_order_for(const RunConfig& cfg, const Panel& panel) {
    AggregatedGraph graph = aggregate_links(build_temporal_network(panel, LinkMode::rank_weighted));
    CoreDecomposition decomp = decompose(graph, cfg.alpha, cfg.beta);
    return topological_ranking(decomp, graph, panel.registry());
}

inline std::vector<Artifact> run_kcore(const RunConfig& cfg, const Panel& panel) {
    cfg.validate();
    detail::ensure_out_dir(cfg);
    AggregatedGraph graph = aggregate_links(build_temporal_network(panel, LinkMode::rank_weighted));
    CoreDecomposition decomp = decompose(graph, cfg.alpha, cfg.beta);
    std::vector<int> topo = topological_ranking(decomp, graph, panel.registry());
    AggregateRanking agg = aggregate(panel);
    std::vector<CoreVsActivityRow> rows = compare_core_vs_activity(topo, decomp, agg);
    detail::write_file(cfg, "kcore.csv",
                       [&](std::ostream& o) { write_kcore_csv(panel, rows, o); });
    return {{"kcore.csv", "kcore", "weighted core decomposition vs activity ranking"}};
}

inline std::vector<Artifact> run_correlate(const RunConfig& cfg, const Panel& panel) {
    cfg.validate();
    detail::ensure_out_dir(cfg);
    AggregatedGraph binary = aggregate_links(build_temporal_network(panel, LinkMode::binary));
    std::vector<int> topo = topological_order_for(cfg, panel);

    std::vector<Artifact> artifacts;
    auto emit = [&](SeriesField field, QuarterSpan span, const std::string& period_tag) {
        CorrelationMatrix m = correlation_matrix(panel, field, span, cfg.scaled, binary, topo);
        std::string base = std::string("correlation_") + to_string(field) + "_" + period_tag +
                           (cfg.scaled ? "_scaled" : "");
        detail::write_file(cfg, base + ".csv",
                           [&](std::ostream& o) { write_matrix_csv(panel, m, o); });
        detail::write_file(cfg, base + ".json",
                           [&](std::ostream& o) { write_matrix_sidecar_json(panel, m, o); });
        std::string desc = std::string(to_string(field)) + " correlations, " + period_tag +
                           (cfg.scaled ? ", weight-scaled" : "");
        artifacts.push_back({base + ".csv", "correlations", desc});
        artifacts.push_back({base + ".json", "correlations", desc + " (cell metadata)"});
    };

    std::optional<std::pair<QuarterSpan, QuarterSpan>> split;
    if (cfg.split_quarter) {
        Quarter boundary = Quarter::parse(*cfg.split_quarter);
        int b = quarters_between(boundary, panel.start()) + 1;
        if (b > 1 && b <= panel.quarters()) split = split_at(panel, boundary);
    }
    std::string split_tag = cfg.split_quarter ? Quarter::parse(*cfg.split_quarter).compact_label() : "";

    for (const std::string& field_name : cfg.correlation_fields) {
        SeriesField field = series_field_from_string(field_name);
        if (cfg.period) {
            // explicit period selector: exactly one matrix per field
            const std::string& sel = *cfg.period;
            if (sel == "full") {
                emit(field, panel.full_span(), "full");
            } else if (sel == "pre" || sel == "post") {
                if (!split)
                    throw ConfigError("period '" + sel + "' needs a split_quarter inside the range");
                emit(field, sel == "pre" ? split->first : split->second, sel + "_" + split_tag);
            } else if (auto colon = sel.find(':'); colon != std::string::npos) {
                Quarter a = Quarter::parse(sel.substr(0, colon));
                Quarter b = Quarter::parse(sel.substr(colon + 1));
                QuarterSpan span{quarters_between(a, panel.start()) + 1,
                                 quarters_between(b, panel.start()) + 1};
                emit(field, span, "range_" + a.compact_label() + "_" + b.compact_label());
            } else {
                throw ConfigError("bad period selector: '" + sel + "'");
            }
            continue;
        }
        emit(field, panel.full_span(), "full");
        bool exposure = field == SeriesField::cce || field == SeriesField::tce;
        if (exposure && split) {
            emit(field, split->first, "pre_" + split_tag);
            emit(field, split->second, "post_" + split_tag);
        }
    }
    return artifacts;
}

inline std::vector<Artifact> run_frames(const RunConfig& cfg, const Panel& panel) {
    cfg.validate();
    detail::ensure_out_dir(cfg);
    TemporalNetwork net = build_temporal_network(panel, LinkMode::rank_weighted);
    AggregatedGraph binary = aggregate_links(build_temporal_network(panel, LinkMode::binary));
    std::vector<int> topo = topological_order_for(cfg, panel);
    CorrelationMatrix corr = correlation_matrix(panel, SeriesField::activity_total,
                                                panel.full_span(), true, binary, topo);
    std::vector<Artifact> artifacts;
    for (int t = 1; t <= panel.quarters(); ++t) {
        json doc = frame_json(panel, net, t, &corr);
        std::string rel = "frames/frame_" + net.quarter_label(t).compact_label() + ".json";
        detail::write_file(cfg, rel, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
        artifacts.push_back({rel, "frames", "per-quarter network frame"});
    }
    return artifacts;
}

/// One-shot reproduction run: every export plus a manifest that lists each
/// artifact with its content hash and the effective parameter set.
inline std::vector<Artifact> run_report(const RunConfig& cfg) {
    cfg.validate();
    detail::ensure_out_dir(cfg);
    std::vector<Artifact> artifacts;
    auto append = [&](std::vector<Artifact> more) {
        artifacts.insert(artifacts.end(), more.begin(), more.end());
    };
    if (!cfg.input_csv.empty()) append(run_ingest(cfg));
    Panel panel = load_run_panel(cfg);
    append(run_stats(cfg, panel));
    append(run_network(cfg, panel));
    append(run_kcore(cfg, panel));
    append(run_correlate(cfg, panel));
    append(run_frames(cfg, panel));

    json manifest;
    manifest["artifacts"] = json::array();
    for (const Artifact& a : artifacts) {
        std::string full = (fs::path(cfg.out_dir) / a.path).string();
        manifest["artifacts"].push_back({{"path", a.path},
                                         {"family", a.family},
                                         {"description", a.description},
                                         {"sha256", detail::sha256_file_hex(full)}});
    }
    manifest["config"] = cfg.to_json();
    manifest["parameters"] = {{"alpha", cfg.alpha},
                              {"beta", cfg.beta},
                              {"core_schedule", "distinct_values"},
                              {"seed", cfg.seed},
                              {"ks_trials", cfg.ks_trials},
                              {"ks_p_threshold", cfg.ks_p_threshold},
                              {"split_quarter",
                               cfg.split_quarter ? json(*cfg.split_quarter) : json(nullptr)},
                              {"fit_method", cfg.fit_method},
                              {"fit_normalization", cfg.fit_normalization},
                              {"prng", "mt19937_64/as241"}};
    detail::write_file(cfg, "manifest.json",
                       [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
    artifacts.push_back({"manifest.json", "manifest", "artifact inventory with content hashes"});
    return artifacts;
}

}  // namespace otcnet
