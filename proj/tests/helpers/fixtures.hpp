#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "otcnet/alias.hpp"
#include "otcnet/csv.hpp"
#include "otcnet/detail/random.hpp"
#include "otcnet/panel.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) {
    return std::string(OTCNET_TEST_DATA) + "/" + name;
}

inline otcnet::AliasTable small_aliases() {
    return otcnet::AliasTable::load_tsv(data_path("small_aliases.tsv"));
}

/// The bundled 6-institution, 4-quarter panel (2001-Q1..Q4).
inline otcnet::Panel small_panel() {
    auto raw = otcnet::read_raw_rows_file(data_path("small_raw.csv"));
    auto built = otcnet::build_panel(raw.rows, small_aliases(), otcnet::Quarter{2001, 1},
                                     otcnet::Quarter{2001, 4});
    return built.panel;
}

// ---------------------------------------------------------------------------
// Deterministic synthetic panel: 57 quarters (1998-Q4..2012-Q4) of top-25
// rankings drawn from a fixed-seed activity process. A stable high-activity
// group keeps the core populated while the periphery churns.

inline std::vector<otcnet::RawRow> synthetic_rows(std::uint64_t seed = 7321) {
    using otcnet::Currency;
    const int n_banks = 61;
    const int n_quarters = 57;
    std::vector<otcnet::RawRow> rows;
    std::vector<std::string> names;
    for (int i = 0; i < n_banks; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "BANK %02d", i + 1);
        names.emplace_back(buf);
    }
    otcnet::Quarter q{1998, 4};
    int line_no = 2;
    for (int t = 0; t < n_quarters; ++t, q = q.next()) {
        struct Draw {
            int bank;
            double activity;
        };
        std::vector<Draw> draws;
        for (int i = 0; i < n_banks; ++i) {
            std::mt19937_64 eng(otcnet::detail::splitmix64(seed ^ (0x9e37ULL * i + 131 * t)));
            double base = 16.0 - 0.22 * i;  // log scale; steep enough for a stable top group
            double noise = (i < 8 ? 0.05 : 0.8) * otcnet::detail::normal_draw(eng);
            double growth = 0.03 * t;
            draws.push_back({i, std::exp(base + growth + noise)});
        }
        std::sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) {
            if (a.activity != b.activity) return a.activity > b.activity;
            return a.bank < b.bank;
        });
        for (int r = 0; r < 25; ++r) {
            const Draw& d = draws[r];
            otcnet::RawRow row;
            row.line_no = line_no++;
            row.quarter_label = q.label();
            row.name = names[d.bank];
            row.state = "NY";
            row.rank = r + 1;
            Currency act = std::max<Currency>(1, static_cast<Currency>(std::llround(d.activity)));
            // per-bank ETD share in [0, 0.3), fixed over time
            double etd_share = 0.3 * ((d.bank * 37) % 100) / 100.0;
            Currency etd = static_cast<Currency>(std::llround(static_cast<double>(act) * etd_share));
            Currency otc = act - etd;
            row.total_assets = act * 3;
            row.total_derivatives = act;
            row.derivative_types = {etd, Currency{0}, otc, Currency{0}, Currency{0}, Currency{0},
                                    Currency{0}};
            Currency cce = act / 100 + 1;
            Currency pfe = act / 200 + 1;
            row.cce = cce;
            row.pfe = pfe;
            row.tce = cce + pfe;
            row.tce_to_capital = 1.0;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline void write_raw_csv(const std::vector<otcnet::RawRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    otcnet::csv::Writer w(out);
    for (const char* col : otcnet::raw_schema_columns()) w.field(col);
    w.endrow();
    for (const auto& r : rows) {
        w.field(r.quarter_label).field(r.name).field(r.state);
        r.rank ? (void)w.field(*r.rank) : (void)w.empty();
        r.total_assets ? (void)w.field(*r.total_assets) : (void)w.empty();
        r.total_derivatives ? (void)w.field(*r.total_derivatives) : (void)w.empty();
        for (const auto& v : r.derivative_types) v ? (void)w.field(*v) : (void)w.empty();
        r.cce ? (void)w.field(*r.cce) : (void)w.empty();
        r.pfe ? (void)w.field(*r.pfe) : (void)w.empty();
        r.tce ? (void)w.field(*r.tce) : (void)w.empty();
        r.tce_to_capital ? (void)w.field(*r.tce_to_capital) : (void)w.empty();
        w.endrow();
    }
}

inline otcnet::Panel synthetic_panel(std::uint64_t seed = 7321) {
    otcnet::AliasTable aliases;  // plain names, no rules needed
    auto rows = synthetic_rows(seed);
    auto built = otcnet::build_panel(rows, aliases, otcnet::Quarter{1998, 4}, otcnet::Quarter{2012, 4});
    return built.panel;
}

}  // namespace fixtures
