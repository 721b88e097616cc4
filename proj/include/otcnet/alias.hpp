#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "otcnet/common.hpp"

namespace otcnet {

namespace detail {

inline std::string collapse_whitespace_upper(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char raw : s) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::toupper(c));
    }
    return out;
}

inline bool ends_with_word(const std::string& s, const std::string& suffix) {
    if (s.size() <= suffix.size()) return false;
    if (s.compare(s.size() - suffix.size(), suffix.size(), suffix) != 0) return false;
    return s[s.size() - suffix.size() - 1] == ' ';
}

}  // namespace detail

/// Entity-resolution rules: explicit rename rules plus trailing legal-form
/// suffixes dropped before matching. Institution names in quarterly filings
/// drift ("NA" vs "NATIONAL ASSN", misspellings, renames after acquisitions),
/// and the table maps every variant to one canonical name.
struct AliasTable {
    /// Ordered (pattern, canonical) pairs; patterns are matched exactly
    /// against the whitespace/suffix-normalized name.
    std::vector<std::pair<std::string, std::string>> rules;
    /// Trailing word sequences removed before rule matching, e.g. "NA".
    std::vector<std::string> suffix_drops;

    /// Whitespace/case/suffix normalization only, no rename rules.
    std::string base_normalize(const std::string& name) const {
        std::string s = detail::collapse_whitespace_upper(name);
        bool changed = true;
        while (changed) {
            changed = false;
            // longest suffix first so "NATIONAL ASSN" wins over "NA"
            for (const auto& suf : suffixes_by_length()) {
                if (detail::ends_with_word(s, suf)) {
                    s.erase(s.size() - suf.size() - 1);
                    changed = true;
                }
            }
        }
        return s;
    }

    const std::string* lookup(const std::string& normalized) const {
        for (const auto& [pattern, canonical] : rules)
            if (pattern == normalized) return &canonical;
        return nullptr;
    }

    /// Fails if a rule's canonical name is itself unstable under
    /// normalization, or two rules send the same pattern to different names.
    void validate() const {
        std::map<std::string, std::string> seen;
        for (const auto& [pattern, canonical] : rules) {
            auto [it, inserted] = seen.emplace(pattern, canonical);
            if (!inserted && it->second != canonical)
                throw ValidationError("alias table: pattern '" + pattern + "' maps to both '" +
                                      it->second + "' and '" + canonical + "'");
            std::string renorm = base_normalize(canonical);
            const std::string* hit = lookup(renorm);
            std::string stable = hit ? *hit : renorm;
            if (stable != canonical)
                throw ValidationError("alias table: canonical name '" + canonical +
                                      "' is not a fixed point (normalizes to '" + stable + "')");
        }
    }

    /// Loads the two-column TSV form: pattern<TAB>canonical. Lines starting
    /// with '#' are comments; "@suffix<TAB>WORDS" declares a suffix drop.
    static AliasTable load_tsv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open alias table: " + path);
        AliasTable table;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ParseError(path + ":" + std::to_string(line_no) + ": expected two tab-separated columns");
            std::string left = line.substr(0, tab);
            std::string right = line.substr(tab + 1);
            if (left == "@suffix") {
                table.suffix_drops.push_back(detail::collapse_whitespace_upper(right));
            } else {
                table.rules.emplace_back(detail::collapse_whitespace_upper(left),
                                         detail::collapse_whitespace_upper(right));
            }
        }
        table.validate();
        return table;
    }

private:
    std::vector<std::string> suffixes_by_length() const {
        std::vector<std::string> s = suffix_drops;
        std::sort(s.begin(), s.end(),
                  [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
        return s;
    }
};

/// Canonical form of an institution name. Unmatched names pass through with
/// whitespace/suffix normalization only; matched names take the canonical
/// spelling from the table. Deterministic and idempotent.
inline std::string normalize_name(const std::string& name, const AliasTable& aliases) {
    std::string s = aliases.base_normalize(name);
    if (s.empty()) throw ValidationError("empty institution name");
    if (const std::string* canonical = aliases.lookup(s)) return *canonical;
    return s;
}

}  // namespace otcnet
