#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "otcnet/alias.hpp"
#include "otcnet/common.hpp"
#include "otcnet/csv.hpp"
#include "otcnet/quarter.hpp"

namespace otcnet {

/// One line of the 17-column quarterly table, prior to entity resolution.
/// Currency cells may be absent; absent exposure cells stay null downstream
/// because zero is a legitimate reported value.
struct RawRow {
    std::string quarter_label;
    std::string name;
    std::string state;  // two-letter code or empty
    std::optional<int> rank;
    std::optional<Currency> total_assets;
    std::optional<Currency> total_derivatives;
    // futures_etd, options_etd, forwards_otc, swaps_otc, options_otc, credit_otc, spot_fx
    std::array<std::optional<Currency>, 7> derivative_types;
    std::optional<Currency> cce;
    std::optional<Currency> pfe;
    std::optional<Currency> tce;
    std::optional<double> tce_to_capital;  // percent
    int line_no = 0;

    Currency activity_etd() const {
        return derivative_types[0].value_or(0) + derivative_types[1].value_or(0);
    }
    Currency activity_otc() const {
        return derivative_types[2].value_or(0) + derivative_types[3].value_or(0) +
               derivative_types[4].value_or(0) + derivative_types[5].value_or(0);
    }
};

inline const std::array<const char*, 17>& raw_schema_columns() {
    static const std::array<const char*, 17> cols = {
        "quarter",      "name",        "state",        "rank",
        "total_assets", "total_derivatives",
        "futures_etd",  "options_etd", "forwards_otc", "swaps_otc",
        "options_otc",  "credit_otc",  "spot_fx",
        "cce",          "pfe",         "tce",          "tce_to_capital"};
    return cols;
}

/// One institution-quarter observation after entity resolution.
/// rank == 0 never occurs inside a Panel: absent pairs simply have no record.
struct QuarterRecord {
    int institution = -1;  // registry id
    int quarter = 0;       // 1-based index t within the panel range
    Currency activity = 0;
    Currency activity_etd = 0;
    Currency activity_otc = 0;
    std::optional<Currency> cce;
    std::optional<Currency> pfe;
    std::optional<Currency> tce;
    int rank = 0;

    friend bool operator==(const QuarterRecord&, const QuarterRecord&) = default;
};

enum class ViolationKind { activity_split, tce_identity, negative_value, bad_rank };

struct RecordViolation {
    ViolationKind kind;
    std::string message;
};

/// Pure additive-identity and sign check; an empty result means clean.
/// Identities involving null cells cannot be checked and are not violations.
inline std::vector<RecordViolation> validate_record(const QuarterRecord& rec, double tolerance = 0.5) {
    std::vector<RecordViolation> out;
    auto fail = [&](ViolationKind k, const std::string& m) { out.push_back({k, m}); };
    double split_gap = std::abs(static_cast<double>(rec.activity) -
                                static_cast<double>(rec.activity_etd + rec.activity_otc));
    if (split_gap > tolerance)
        fail(ViolationKind::activity_split,
             "activity " + std::to_string(rec.activity) + " != etd " + std::to_string(rec.activity_etd) +
                 " + otc " + std::to_string(rec.activity_otc));
    if (rec.cce && rec.pfe && rec.tce) {
        double gap = std::abs(static_cast<double>(*rec.tce) - static_cast<double>(*rec.cce + *rec.pfe));
        if (gap > tolerance)
            fail(ViolationKind::tce_identity,
                 "tce " + std::to_string(*rec.tce) + " != cce " + std::to_string(*rec.cce) + " + pfe " +
                     std::to_string(*rec.pfe));
    }
    auto nonneg = [&](const char* label, std::optional<Currency> v) {
        if (v && *v < 0) fail(ViolationKind::negative_value, std::string(label) + " is negative");
    };
    if (rec.activity < 0) fail(ViolationKind::negative_value, "activity is negative");
    if (rec.activity_etd < 0) fail(ViolationKind::negative_value, "activity_etd is negative");
    if (rec.activity_otc < 0) fail(ViolationKind::negative_value, "activity_otc is negative");
    nonneg("cce", rec.cce);
    nonneg("pfe", rec.pfe);
    nonneg("tce", rec.tce);
    if (rec.rank < 0) fail(ViolationKind::bad_rank, "rank is negative");
    return out;
}

/// The institutions x quarters matrix assembled from the quarterly reports.
/// Immutable after construction and safe to share across threads.
class Panel {
public:
    Panel() = default;
    Panel(std::vector<std::string> registry, Quarter start, int T,
          std::vector<QuarterRecord> records)
        : registry_(std::move(registry)), start_(start), T_(T) {
        cells_.assign(static_cast<std::size_t>(registry_.size()) * T_, std::nullopt);
        presence_.assign(registry_.size(), {});
        for (auto& rec : records) insert(rec);
        for (auto& p : presence_) std::sort(p.begin(), p.end());
        validate();
    }

    int institutions() const { return static_cast<int>(registry_.size()); }
    int quarters() const { return T_; }
    Quarter start() const { return start_; }
    Quarter quarter_label(int t) const { return quarter_at(start_, t - 1); }
    QuarterSpan full_span() const { return {1, T_}; }

    const std::vector<std::string>& registry() const { return registry_; }
    const std::string& name(int id) const { return registry_.at(id); }
    int id_of(const std::string& canonical) const {
        auto it = std::lower_bound(registry_.begin(), registry_.end(), canonical);
        if (it == registry_.end() || *it != canonical) return -1;
        return static_cast<int>(it - registry_.begin());
    }

    const QuarterRecord* record(int id, int t) const {
        const auto& cell = cells_.at(index(id, t));
        return cell ? &*cell : nullptr;
    }
    Currency activity(int id, int t) const {
        const QuarterRecord* r = record(id, t);
        return r ? r->activity : 0;  // absent institutions have activity zero
    }
    int rank(int id, int t) const {
        const QuarterRecord* r = record(id, t);
        return r ? r->rank : 0;
    }
    /// Quarters where the institution holds a rank (the presence set).
    const std::vector<int>& presence(int id) const { return presence_.at(id); }

    /// Records of one quarter ordered by rank.
    std::vector<const QuarterRecord*> quarter_records(int t) const {
        std::vector<const QuarterRecord*> out;
        for (int i = 0; i < institutions(); ++i)
            if (const QuarterRecord* r = record(i, t)) out.push_back(r);
        std::sort(out.begin(), out.end(),
                  [](const QuarterRecord* a, const QuarterRecord* b) { return a->rank < b->rank; });
        return out;
    }

    std::size_t ranked_record_count() const {
        std::size_t n = 0;
        for (const auto& p : presence_) n += p.size();
        return n;
    }

    /// Per-quarter rank vector indexed by institution id (0 = absent).
    std::vector<int> ranks_at(int t) const {
        std::vector<int> out(institutions(), 0);
        for (int i = 0; i < institutions(); ++i) out[i] = rank(i, t);
        return out;
    }

    bool operator==(const Panel& other) const {
        return registry_ == other.registry_ && start_ == other.start_ && T_ == other.T_ &&
               cells_ == other.cells_;
    }

private:
    std::size_t index(int id, int t) const {
        if (id < 0 || id >= institutions() || t < 1 || t > T_)
            throw ValidationError("panel access out of range (id " + std::to_string(id) + ", t " +
                                  std::to_string(t) + ")");
        return static_cast<std::size_t>(id) * T_ + (t - 1);
    }

    void insert(const QuarterRecord& rec) {
        auto& cell = cells_.at(index(rec.institution, rec.quarter));
        if (cell)
            throw ValidationError("duplicate record for '" + name(rec.institution) + "' in " +
                                  quarter_label(rec.quarter).label());
        if (rec.rank < 1) throw ValidationError("panel records must carry rank >= 1");
        cell = rec;
        presence_[rec.institution].push_back(rec.quarter);
    }

    void validate() const {
        for (int t = 1; t <= T_; ++t) {
            std::vector<int> ranks;
            for (int i = 0; i < institutions(); ++i)
                if (const QuarterRecord* r = record(i, t)) ranks.push_back(r->rank);
            if (ranks.size() > 25)
                throw ValidationError("quarter " + quarter_label(t).label() + " has " +
                                      std::to_string(ranks.size()) + " ranked records (max 25)");
            std::sort(ranks.begin(), ranks.end());
            for (std::size_t k = 0; k < ranks.size(); ++k)
                if (ranks[k] != static_cast<int>(k) + 1)
                    throw ValidationError("quarter " + quarter_label(t).label() +
                                          " ranks are not a prefix of 1..25");
        }
    }

    std::vector<std::string> registry_;
    Quarter start_{};
    int T_ = 0;
    std::vector<std::optional<QuarterRecord>> cells_;  // id * T + (t-1)
    std::vector<std::vector<int>> presence_;
};

// ---------------------------------------------------------------------------
// Raw table parsing

namespace detail {

inline std::optional<Currency> parse_currency(const std::string& cell, const char* column, int line_no,
                                              bool* negative) {
    if (cell.empty()) return std::nullopt;
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": column '" + column +
                         "': not a number: '" + cell + "'");
    }
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size())
        throw ParseError("line " + std::to_string(line_no) + ": column '" + column +
                         "': not a number: '" + cell + "'");
    if (v < 0 && negative) *negative = true;
    return static_cast<Currency>(std::llround(v));
}

}  // namespace detail

/// Name with whitespace collapsed and upper-cased, no alias rules applied.
inline std::string normalized_raw_name(const std::string& s) {
    return detail::collapse_whitespace_upper(s);
}

struct RawParseResult {
    std::vector<RawRow> rows;
    std::vector<std::string> recovery;  // one line per skipped/repaired input row
};

/// Reads the 17-column raw table. In tolerant mode structurally broken rows
/// (short rows, unparseable numbers, bad labels, negative currency) are
/// skipped and logged instead of failing the whole file.
inline RawParseResult read_raw_rows(std::istream& in, bool tolerant = false,
                                    const std::string& origin = "<stream>") {
    csv::Table table = csv::read_table(in, origin);
    const auto& schema = raw_schema_columns();
    std::array<int, 17> col{};
    for (std::size_t c = 0; c < schema.size(); ++c) {
        col[c] = table.column(schema[c]);
        if (col[c] < 0)
            throw ValidationError(origin + ": missing required column '" + std::string(schema[c]) + "'");
    }

    RawParseResult out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        int line_no = table.line_numbers[r];
        try {
            if (cells.size() != table.header.size())
                throw ParseError("line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(table.header.size()) + " fields, got " +
                                 std::to_string(cells.size()));
            auto cell = [&](int c) -> const std::string& { return cells[col[c]]; };
            RawRow row;
            row.line_no = line_no;
            row.quarter_label = cell(0);
            Quarter::parse(row.quarter_label);  // label must parse even if range checked later
            row.name = cell(1);
            row.state = cell(2);
            if (!cell(3).empty()) {
                int rank = std::stoi(cell(3));
                if (rank < 1) throw ParseError("line " + std::to_string(line_no) + ": rank must be >= 1");
                row.rank = rank;
            }
            bool negative = false;
            row.total_assets = detail::parse_currency(cell(4), "total_assets", line_no, &negative);
            row.total_derivatives =
                detail::parse_currency(cell(5), "total_derivatives", line_no, &negative);
            for (int k = 0; k < 7; ++k)
                row.derivative_types[k] =
                    detail::parse_currency(cell(6 + k), schema[6 + k], line_no, &negative);
            row.cce = detail::parse_currency(cell(13), "cce", line_no, &negative);
            row.pfe = detail::parse_currency(cell(14), "pfe", line_no, &negative);
            row.tce = detail::parse_currency(cell(15), "tce", line_no, &negative);
            if (!cell(16).empty()) row.tce_to_capital = std::stod(cell(16));
            if (negative)
                throw ParseError("line " + std::to_string(line_no) + ": negative currency value");
            if (!row.total_derivatives)
                throw ParseError("line " + std::to_string(line_no) + ": total_derivatives is required");
            if (normalized_raw_name(row.name).empty())
                throw ParseError("line " + std::to_string(line_no) + ": empty institution name");
            out.rows.push_back(std::move(row));
        } catch (const ParseError& e) {
            if (!tolerant) throw;
            out.recovery.push_back(std::string("skipped row: ") + e.what());
        }
    }
    return out;
}

inline RawParseResult read_raw_rows_file(const std::string& path, bool tolerant = false) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    return read_raw_rows(in, tolerant, path);
}

// ---------------------------------------------------------------------------
// Identity merging

/// A distinct (raw name, state) source feeding one canonical identity.
struct MergeSource {
    std::string raw_name;
    std::string state;
    friend auto operator<=>(const MergeSource&, const MergeSource&) = default;
};

/// Two sources of the same canonical identity present in the same quarter.
/// The merge precondition is the absence of simultaneous appearance, so a
/// co-appearance means the merge would conflate two live institutions.
struct MergeViolation {
    std::string canonical;
    std::string quarter;
    MergeSource a;
    MergeSource b;
    int line_a = 0;
    int line_b = 0;

    std::string describe() const {
        return "merge-safety violation: '" + canonical + "' in " + quarter + ": '" + a.raw_name +
               "' [" + a.state + "] (line " + std::to_string(line_a) + ") co-appears with '" +
               b.raw_name + "' [" + b.state + "] (line " + std::to_string(line_b) + ")";
    }
};

struct MergeReport {
    std::vector<std::string> registry;                        // sorted canonical names
    std::map<std::string, std::set<MergeSource>> sources;     // canonical -> merged sources
    std::vector<MergeViolation> violations;
    std::vector<std::string> notes;                           // one line per actual merge

    bool merged(const std::string& canonical) const {
        auto it = sources.find(canonical);
        return it != sources.end() && it->second.size() > 1;
    }
};

/// Resolves institution identities: same canonical name across states (or
/// name variants) collapses to one identity, with a report of every merge
/// whose sources co-appear within a quarter.
inline MergeReport merge_identities(const std::vector<RawRow>& rows, const AliasTable& aliases) {
    MergeReport report;
    std::map<std::string, std::map<std::string, std::pair<MergeSource, int>>> seen;
    // canonical -> quarter -> first source seen there
    for (const RawRow& row : rows) {
        std::string canonical = normalize_name(row.name, aliases);
        MergeSource src{normalized_raw_name(row.name), row.state};
        report.sources[canonical].insert(src);
        auto& quarter_map = seen[canonical];
        auto it = quarter_map.find(row.quarter_label);
        if (it == quarter_map.end()) {
            quarter_map.emplace(row.quarter_label, std::make_pair(src, row.line_no));
        } else if (it->second.first != src) {
            report.violations.push_back(MergeViolation{canonical, row.quarter_label, it->second.first,
                                                       src, it->second.second, row.line_no});
        }
    }
    for (const auto& [canonical, srcs] : report.sources) {
        report.registry.push_back(canonical);
        if (srcs.size() > 1) {
            std::string line = "merged into '" + canonical + "':";
            for (const auto& s : srcs) line += " '" + s.raw_name + "' [" + s.state + "]";
            report.notes.push_back(line);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Panel assembly

struct BuildOptions {
    bool tolerant = false;
    bool override_merge_safety = false;
    double additive_tolerance = 0.5;  // millions USD
};

struct BuildResult {
    Panel panel;
    std::vector<std::string> recovery_log;  // skipped rows, rank repairs, identity warnings
    std::vector<std::string> merge_log;     // identity merges and violations
};

inline BuildResult build_panel(const std::vector<RawRow>& rows, const AliasTable& aliases,
                               Quarter range_start, Quarter range_end, const BuildOptions& opt = {}) {
    if (range_end < range_start) throw ValidationError("quarter range end precedes start");
    const int T = quarters_between(range_end, range_start) + 1;

    BuildResult result;
    MergeReport merge = merge_identities(rows, aliases);
    for (const auto& note : merge.notes) result.merge_log.push_back(note);
    if (!merge.violations.empty()) {
        for (const auto& v : merge.violations) result.merge_log.push_back(v.describe());
        if (!opt.override_merge_safety)
            throw ValidationError(merge.violations.front().describe() +
                                  (merge.violations.size() > 1
                                       ? " (+" + std::to_string(merge.violations.size() - 1) + " more)"
                                       : ""));
    }

    std::vector<std::string> registry = merge.registry;  // already sorted
    auto id_of = [&](const std::string& canonical) {
        return static_cast<int>(std::lower_bound(registry.begin(), registry.end(), canonical) -
                                registry.begin());
    };

    // Collate rows into provisional per-quarter records.
    struct Provisional {
        QuarterRecord rec;
        std::optional<int> reported_rank;
        int line_no;
    };
    std::map<int, std::vector<Provisional>> by_quarter;
    for (const RawRow& row : rows) {
        int t = quarters_between(Quarter::parse(row.quarter_label), range_start) + 1;
        if (t < 1 || t > T) {
            std::string msg = "row outside quarter range: line " + std::to_string(row.line_no) + " (" +
                              row.quarter_label + ")";
            if (!opt.tolerant) throw ValidationError(msg);
            result.recovery_log.push_back("skipped row: " + msg);
            continue;
        }
        Provisional p;
        p.rec.institution = id_of(normalize_name(row.name, aliases));
        p.rec.quarter = t;
        p.rec.activity = row.total_derivatives.value_or(0);
        p.rec.activity_etd = row.activity_etd();
        p.rec.activity_otc = row.activity_otc();
        p.rec.cce = row.cce;
        p.rec.pfe = row.pfe;
        p.rec.tce = row.tce;
        p.reported_rank = row.rank;
        p.line_no = row.line_no;
        by_quarter[t].push_back(std::move(p));
    }

    std::vector<QuarterRecord> records;
    for (auto& [t, provs] : by_quarter) {
        std::string qlabel = quarter_at(range_start, t - 1).label();

        // Duplicate identities within a quarter: forced merges (override mode)
        // combine the rows; otherwise it is a hard error naming both.
        std::map<int, std::size_t> first_of;
        std::vector<Provisional> merged_rows;
        for (auto& p : provs) {
            auto it = first_of.find(p.rec.institution);
            if (it == first_of.end()) {
                first_of[p.rec.institution] = merged_rows.size();
                merged_rows.push_back(std::move(p));
                continue;
            }
            Provisional& base = merged_rows[it->second];
            if (!opt.override_merge_safety)
                throw ValidationError("duplicate records for '" + registry[p.rec.institution] +
                                      "' in " + qlabel + " (lines " + std::to_string(base.line_no) +
                                      " and " + std::to_string(p.line_no) + ")");
            base.rec.activity += p.rec.activity;
            base.rec.activity_etd += p.rec.activity_etd;
            base.rec.activity_otc += p.rec.activity_otc;
            auto add_opt = [](std::optional<Currency>& a, const std::optional<Currency>& b) {
                if (b) a = a.value_or(0) + *b;
            };
            add_opt(base.rec.cce, p.rec.cce);
            add_opt(base.rec.pfe, p.rec.pfe);
            add_opt(base.rec.tce, p.rec.tce);
            base.reported_rank.reset();  // summed rows force a re-rank below
            result.recovery_log.push_back("forced merge: combined duplicate rows for '" +
                                          registry[base.rec.institution] + "' in " + qlabel +
                                          " (lines " + std::to_string(base.line_no) + ", " +
                                          std::to_string(p.line_no) + ")");
        }

        // Drop rows that cannot hold a rank (zero activity).
        std::vector<Provisional> ranked;
        for (auto& p : merged_rows) {
            if (p.rec.activity == 0) {
                result.recovery_log.push_back("dropped unrankable zero-activity row: '" +
                                              registry[p.rec.institution] + "' in " + qlabel);
                continue;
            }
            ranked.push_back(std::move(p));
        }
        if (ranked.empty()) continue;
        if (ranked.size() > 25)
            throw ValidationError("quarter " + qlabel + " has " + std::to_string(ranked.size()) +
                                  " ranked rows (max 25)");

        // Keep reported ranks when they form a clean 1..k prefix consistent
        // with activity order; otherwise re-rank by activity, ties by name.
        std::vector<std::size_t> order(ranked.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        bool reported_ok = true;
        std::set<int> rank_set;
        for (const auto& p : ranked) {
            if (!p.reported_rank) { reported_ok = false; break; }
            rank_set.insert(*p.reported_rank);
        }
        if (reported_ok) {
            int expect = 1;
            for (int r : rank_set)
                if (r != expect++) { reported_ok = false; break; }
            if (rank_set.size() != ranked.size()) reported_ok = false;
        }
        if (reported_ok) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return *ranked[a].reported_rank < *ranked[b].reported_rank;
            });
            for (std::size_t i = 0; i + 1 < order.size(); ++i)
                if (ranked[order[i]].rec.activity < ranked[order[i + 1]].rec.activity) {
                    reported_ok = false;
                    break;
                }
        }
        if (!reported_ok) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const auto& ra = ranked[a].rec;
                const auto& rb = ranked[b].rec;
                if (ra.activity != rb.activity) return ra.activity > rb.activity;
                return registry[ra.institution] < registry[rb.institution];
            });
            result.recovery_log.push_back("repaired ranks in " + qlabel +
                                          ": re-ranked by activity (name order on ties)");
        }
        for (std::size_t i = 0; i < order.size(); ++i) {
            QuarterRecord rec = ranked[order[i]].rec;
            rec.rank = static_cast<int>(i) + 1;
            for (const auto& v : validate_record(rec, opt.additive_tolerance))
                result.recovery_log.push_back("identity warning: '" + registry[rec.institution] +
                                              "' in " + qlabel + ": " + v.message);
            records.push_back(rec);
        }
    }

    result.panel = Panel(std::move(registry), range_start, T, std::move(records));
    return result;
}

// ---------------------------------------------------------------------------
// Normalized panel serialization

inline void write_panel_csv(const Panel& panel, std::ostream& out) {
    csv::Writer w(out);
    w.field("institution").field("quarter").field("rank").field("activity").field("activity_etd")
        .field("activity_otc").field("cce").field("pfe").field("tce");
    w.endrow();
    for (int t = 1; t <= panel.quarters(); ++t) {
        for (const QuarterRecord* rec : panel.quarter_records(t)) {
            w.field(panel.name(rec->institution));
            w.field(panel.quarter_label(t).label());
            w.field(rec->rank);
            w.field(rec->activity);
            w.field(rec->activity_etd);
            w.field(rec->activity_otc);
            rec->cce ? (void)w.field(*rec->cce) : (void)w.empty();
            rec->pfe ? (void)w.field(*rec->pfe) : (void)w.empty();
            rec->tce ? (void)w.field(*rec->tce) : (void)w.empty();
            w.endrow();
        }
    }
}

/// Rebuilds a Panel from its normalized CSV form. The quarter range is the
/// span of the quarters present unless an explicit range is supplied.
inline Panel load_panel_csv(std::istream& in, const std::string& origin = "<stream>",
                            std::optional<Quarter> range_start = std::nullopt,
                            std::optional<Quarter> range_end = std::nullopt) {
    csv::Table table = csv::read_table(in, origin);
    const char* want[] = {"institution", "quarter", "rank",
                          "activity",    "activity_etd", "activity_otc",
                          "cce",         "pfe",          "tce"};
    std::array<int, 9> col{};
    for (int c = 0; c < 9; ++c) {
        col[c] = table.column(want[c]);
        if (col[c] < 0) throw ValidationError(origin + ": missing required column '" + want[c] + "'");
    }

    struct Row {
        std::string name;
        Quarter quarter;
        QuarterRecord rec;
    };
    std::vector<Row> rows;
    std::set<std::string> names;
    std::optional<Quarter> lo, hi;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        int line_no = table.line_numbers[r];
        if (cells.size() != table.header.size())
            throw ParseError(origin + ":" + std::to_string(line_no) + ": wrong field count");
        auto cell = [&](int c) -> const std::string& { return cells[col[c]]; };
        Row row;
        row.name = cell(0);
        row.quarter = Quarter::parse(cell(1));
        row.rec.rank = std::stoi(cell(2));
        row.rec.activity = std::stoll(cell(3));
        row.rec.activity_etd = std::stoll(cell(4));
        row.rec.activity_otc = std::stoll(cell(5));
        auto opt_cell = [&](int c) -> std::optional<Currency> {
            if (cell(c).empty()) return std::nullopt;
            return std::stoll(cell(c));
        };
        row.rec.cce = opt_cell(6);
        row.rec.pfe = opt_cell(7);
        row.rec.tce = opt_cell(8);
        names.insert(row.name);
        if (!lo || row.quarter < *lo) lo = row.quarter;
        if (!hi || *hi < row.quarter) hi = row.quarter;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(origin + ": no records");
    Quarter start = range_start.value_or(*lo);
    Quarter end = range_end.value_or(*hi);
    std::vector<std::string> registry(names.begin(), names.end());
    std::vector<QuarterRecord> records;
    for (auto& row : rows) {
        row.rec.institution = static_cast<int>(
            std::lower_bound(registry.begin(), registry.end(), row.name) - registry.begin());
        row.rec.quarter = quarters_between(row.quarter, start) + 1;
        if (row.rec.quarter < 1 || row.rec.quarter > quarters_between(end, start) + 1)
            throw ValidationError(origin + ": record outside declared quarter range");
        records.push_back(row.rec);
    }
    return Panel(std::move(registry), start, quarters_between(end, start) + 1, std::move(records));
}

inline Panel load_panel_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open panel file: " + path);
    return load_panel_csv(in, path);
}

}  // namespace otcnet
