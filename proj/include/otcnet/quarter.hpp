#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "otcnet/common.hpp"

namespace otcnet {

/// A calendar quarter, e.g. 2008-Q4. Quarters are totally ordered and
/// support integer offsets so a quarter range maps onto indices 1..T.
struct Quarter {
    int year = 0;
    int q = 0;  // 1..4

    friend auto operator<=>(const Quarter&, const Quarter&) = default;

    /// Serial number of the quarter on an absolute axis (year*4 + q - 1).
    int serial() const { return year * 4 + (q - 1); }

    Quarter next() const { return q == 4 ? Quarter{year + 1, 1} : Quarter{year, q + 1}; }

    std::string label() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-Q%d", year, q);
        return buf;
    }

    /// Compact form used in file names: 2008Q4.
    std::string compact_label() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04dQ%d", year, q);
        return buf;
    }

    /// Parses "YYYY-Qn"; '/' or a space are tolerated as separators and the
    /// separator may be omitted ("2008Q4").
    static Quarter parse(const std::string& label) {
        int year = 0, q = 0;
        std::size_t pos = 0;
        while (pos < label.size() && label[pos] >= '0' && label[pos] <= '9') {
            year = year * 10 + (label[pos] - '0');
            ++pos;
        }
        if (pos < 4 || pos > 5) throw ParseError("bad quarter label: '" + label + "'");
        if (pos < label.size() && (label[pos] == '-' || label[pos] == '/' || label[pos] == ' ')) ++pos;
        if (pos >= label.size() || (label[pos] != 'Q' && label[pos] != 'q'))
            throw ParseError("bad quarter label: '" + label + "'");
        ++pos;
        if (pos + 1 != label.size() || label[pos] < '1' || label[pos] > '4')
            throw ParseError("bad quarter label: '" + label + "'");
        q = label[pos] - '0';
        return Quarter{year, q};
    }
};

/// Difference in quarters (a - b).
inline int quarters_between(const Quarter& a, const Quarter& b) { return a.serial() - b.serial(); }

inline Quarter quarter_at(const Quarter& start, int offset) {
    int s = start.serial() + offset;
    return Quarter{s / 4, s % 4 + 1};
}

/// A contiguous, inclusive run of quarter indices within a panel, 1-based.
struct QuarterSpan {
    int first = 1;
    int last = 1;

    int length() const { return last - first + 1; }
    bool contains(int t) const { return t >= first && t <= last; }

    friend bool operator==(const QuarterSpan&, const QuarterSpan&) = default;
};

}  // namespace otcnet
