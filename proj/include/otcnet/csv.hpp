#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "otcnet/common.hpp"

namespace otcnet::csv {

/// Splits one CSV line. Handles double-quoted fields with embedded commas
/// and "" escapes; trailing CR is stripped.
inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

/// A parsed CSV file with a named header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // field counts may vary in tolerant flows
    std::vector<int> line_numbers;               // 1-based source line of each row

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline Table read_table(std::istream& in, const std::string& origin = "<stream>") {
    Table t;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!have_header) {
            t.header = split_line(line);
            if (!t.header.empty() && !t.header[0].empty() && (unsigned char)t.header[0][0] == 0xEF) {
                // strip a UTF-8 BOM
                if (t.header[0].size() >= 3) t.header[0].erase(0, 3);
            }
            have_header = true;
            continue;
        }
        if (line.empty() || line == "\r") continue;
        t.rows.push_back(split_line(line));
        t.line_numbers.push_back(line_no);
    }
    if (!have_header) throw ParseError(origin + ": empty file, header row required");
    return t;
}

inline Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    return read_table(in, path);
}

/// Fixed numeric formatting used by every CSV emitter: 9 significant digits
/// keeps golden files stable across platforms.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string format_number(std::int64_t v) { return std::to_string(v); }

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    Writer& field(const std::string& s) {
        sep();
        out_ << quote_field(s);
        return *this;
    }
    Writer& field(const char* s) { return field(std::string(s)); }
    Writer& field(double v) {
        sep();
        out_ << format_number(v);
        return *this;
    }
    Writer& field(std::int64_t v) {
        sep();
        out_ << v;
        return *this;
    }
    Writer& field(int v) { return field(static_cast<std::int64_t>(v)); }
    /// Emits an empty cell (the serialization of an undefined value).
    Writer& empty() {
        sep();
        return *this;
    }
    void endrow() {
        out_ << '\n';
        first_ = true;
    }

private:
    void sep() {
        if (!first_) out_ << ',';
        first_ = false;
    }
    std::ostream& out_;
    bool first_ = true;
};

}  // namespace otcnet::csv
