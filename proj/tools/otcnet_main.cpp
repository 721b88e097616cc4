// Command-line front-end: reconstructs the counterparty-risk network from
// quarterly derivative-activity rankings and emits plot-ready artifacts.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "otcnet/report.hpp"

namespace {

using otcnet::RunConfig;

void print_error(const std::string& kind, const std::string& what) {
    nlohmann::json err = {{"error", what}, {"kind", kind}};
    std::cerr << err.dump() << '\n';
}

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::string input_csv;
    std::string alias_tsv;
    std::string panel_csv;
    std::string quarter_start;
    std::string quarter_end;
    std::string split_quarter;
    std::string period;
    std::string fit_method;
    std::string fit_normalization;
    std::vector<std::string> fields;
    double alpha = -1;  // sentinel: negative means "not set" (valid alphas are >= 0)
    double beta = -1;
    int ks_trials = -1;
    double ks_p_threshold = -1;
    long long seed = -1;
    bool tolerant = false;
    bool override_merge_safety = false;
    bool scaled = false;
    bool no_scaled = false;
};

RunConfig merge_config(const CliOverrides& ov) {
    RunConfig cfg;
    if (!ov.config_path.empty()) cfg = RunConfig::load_file(ov.config_path);
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (!ov.input_csv.empty()) cfg.input_csv = ov.input_csv;
    if (!ov.alias_tsv.empty()) cfg.alias_tsv = ov.alias_tsv;
    if (!ov.panel_csv.empty()) cfg.panel_csv = ov.panel_csv;
    if (!ov.quarter_start.empty()) cfg.quarter_start = ov.quarter_start;
    if (!ov.quarter_end.empty()) cfg.quarter_end = ov.quarter_end;
    if (!ov.split_quarter.empty()) cfg.split_quarter = ov.split_quarter;
    if (!ov.period.empty()) cfg.period = ov.period;
    if (!ov.fit_method.empty()) cfg.fit_method = ov.fit_method;
    if (!ov.fit_normalization.empty()) cfg.fit_normalization = ov.fit_normalization;
    if (!ov.fields.empty()) cfg.correlation_fields = ov.fields;
    if (ov.alpha >= 0) cfg.alpha = ov.alpha;
    if (ov.beta >= 0) cfg.beta = ov.beta;
    if (ov.ks_trials >= 0) cfg.ks_trials = ov.ks_trials;
    if (ov.ks_p_threshold >= 0) cfg.ks_p_threshold = ov.ks_p_threshold;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.tolerant) cfg.tolerant = true;
    if (ov.override_merge_safety) cfg.override_merge_safety = true;
    if (ov.scaled) cfg.scaled = true;
    if (ov.no_scaled) cfg.scaled = false;
    return cfg;
}

void report_written(const std::vector<otcnet::Artifact>& artifacts, const RunConfig& cfg) {
    std::cout << "wrote " << artifacts.size() << " artifact(s) under " << cfg.out_dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterparty-risk network reconstruction from quarterly activity rankings"};
    app.require_subcommand(1);

    CliOverrides ov;
    app.add_option("--config", ov.config_path, "JSON config file; flags override its fields");
    app.add_option("--out", ov.out_dir, "output directory");
    app.add_option("--seed", ov.seed, "PRNG seed for Monte-Carlo runs");
    app.add_flag("--tolerant", ov.tolerant, "skip and log structurally broken input rows");

    auto* ingest = app.add_subcommand("ingest", "parse the raw quarterly table into a normalized panel");
    ingest->add_option("--input", ov.input_csv, "raw 17-column CSV");
    ingest->add_option("--aliases", ov.alias_tsv, "alias table TSV (pattern<TAB>canonical)");
    ingest->add_option("--start", ov.quarter_start, "first quarter of the declared range (YYYY-Qn)");
    ingest->add_option("--end", ov.quarter_end, "last quarter of the declared range (YYYY-Qn)");
    ingest->add_flag("--override-merge-safety", ov.override_merge_safety,
                     "proceed despite merge-safety violations (co-appearing alias sources)");

    auto* stats = app.add_subcommand("stats", "concentration statistics, distribution fit, KS test");
    stats->add_option("--panel", ov.panel_csv, "normalized panel CSV");
    stats->add_option("--trials", ov.ks_trials, "KS Monte-Carlo trials");
    stats->add_option("--p-threshold", ov.ks_p_threshold, "KS rejection threshold in (0,1)");
    stats->add_option("--fit-method", ov.fit_method, "log_moments | nls_logspace");
    stats->add_option("--fit-normalization", ov.fit_normalization, "unnormalized | unit_sum");

    auto* network = app.add_subcommand("network", "temporal and aggregated co-occurrence networks");
    network->add_option("--panel", ov.panel_csv, "normalized panel CSV");

    auto* kcore = app.add_subcommand("kcore", "weighted core decomposition and topological ranking");
    kcore->add_option("--panel", ov.panel_csv, "normalized panel CSV");
    kcore->add_option("--alpha", ov.alpha, "degree exponent (default 0)");
    kcore->add_option("--beta", ov.beta, "strength exponent (default 1)");

    auto* correlate = app.add_subcommand("correlate", "pairwise-available correlation matrices");
    correlate->add_option("--panel", ov.panel_csv, "normalized panel CSV");
    correlate->add_option("--field", ov.fields,
                          "series field (activity_total|activity_otc|cce|tce); repeatable");
    correlate->add_option("--period", ov.period, "full | pre | post | YYYY-Qn:YYYY-Qn");
    correlate->add_option("--split", ov.split_quarter, "boundary quarter for pre/post periods");
    correlate->add_flag("--scaled", ov.scaled, "scale coefficients by co-occurrence weights");
    correlate->add_flag("--no-scaled", ov.no_scaled, "emit raw pairwise coefficients");

    auto* frames = app.add_subcommand("frames", "per-quarter network frame files");
    frames->add_option("--panel", ov.panel_csv, "normalized panel CSV");

    auto* report = app.add_subcommand("report", "run every stage and write a hashed manifest");
    report->add_option("--input", ov.input_csv, "raw 17-column CSV (ingested first when given)");
    report->add_option("--aliases", ov.alias_tsv, "alias table TSV");
    report->add_option("--panel", ov.panel_csv, "normalized panel CSV (skips ingest)");
    report->add_option("--start", ov.quarter_start, "first quarter of the declared range");
    report->add_option("--end", ov.quarter_end, "last quarter of the declared range");
    report->add_option("--alpha", ov.alpha, "degree exponent");
    report->add_option("--beta", ov.beta, "strength exponent");
    report->add_option("--split", ov.split_quarter, "boundary quarter for exposure period splits");
    report->add_option("--field", ov.fields, "correlation fields; repeatable");
    report->add_option("--trials", ov.ks_trials, "KS Monte-Carlo trials");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = merge_config(ov);
        if (ingest->parsed()) {
            report_written(otcnet::run_ingest(cfg), cfg);
        } else if (stats->parsed()) {
            report_written(otcnet::run_stats(cfg, otcnet::load_run_panel(cfg)), cfg);
        } else if (network->parsed()) {
            report_written(otcnet::run_network(cfg, otcnet::load_run_panel(cfg)), cfg);
        } else if (kcore->parsed()) {
            report_written(otcnet::run_kcore(cfg, otcnet::load_run_panel(cfg)), cfg);
        } else if (correlate->parsed()) {
            report_written(otcnet::run_correlate(cfg, otcnet::load_run_panel(cfg)), cfg);
        } else if (frames->parsed()) {
            report_written(otcnet::run_frames(cfg, otcnet::load_run_panel(cfg)), cfg);
        } else if (report->parsed()) {
            report_written(otcnet::run_report(cfg), cfg);
        }
        return 0;
    } catch (const otcnet::ConfigError& e) {
        print_error("input", e.what());
        return 1;
    } catch (const otcnet::ParseError& e) {
        print_error("input", e.what());
        return 1;
    } catch (const otcnet::ValidationError& e) {
        print_error("input", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 2;
    }
}
