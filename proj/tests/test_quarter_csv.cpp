#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "otcnet/csv.hpp"
#include "otcnet/quarter.hpp"

using namespace otcnet;

TEST_CASE("quarter labels parse and round-trip") {
    Quarter q = Quarter::parse("2008-Q4");
    CHECK(q.year == 2008);
    CHECK(q.q == 4);
    CHECK(q.label() == "2008-Q4");
    CHECK(q.compact_label() == "2008Q4");

    CHECK(Quarter::parse("1998/Q1") == Quarter{1998, 1});
    CHECK(Quarter::parse("1998 Q1") == Quarter{1998, 1});
    CHECK(Quarter::parse("1998Q1") == Quarter{1998, 1});

    CHECK_THROWS_AS(Quarter::parse("1998-Q5"), ParseError);
    CHECK_THROWS_AS(Quarter::parse("1998-Q0"), ParseError);
    CHECK_THROWS_AS(Quarter::parse("Q4-1998"), ParseError);
    CHECK_THROWS_AS(Quarter::parse("1998"), ParseError);
    CHECK_THROWS_AS(Quarter::parse(""), ParseError);
}

TEST_CASE("quarter arithmetic spans year boundaries") {
    Quarter start{1998, 4};
    CHECK(quarters_between(Quarter{2012, 4}, start) == 56);  // 57 quarters inclusive
    CHECK(quarter_at(start, 0) == start);
    CHECK(quarter_at(start, 1) == Quarter{1999, 1});
    CHECK(quarter_at(start, 56) == Quarter{2012, 4});
    CHECK(start.next() == Quarter{1999, 1});
}

TEST_CASE("csv reader handles quoting and blank lines") {
    std::istringstream in("a,b,c\n1,\"x,y\",3\n\n4,\"he said \"\"hi\"\"\",6\r\n");
    auto table = csv::read_table(in);
    REQUIRE(table.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][1] == "x,y");
    CHECK(table.rows[1][1] == "he said \"hi\"");
    CHECK(table.column("b") == 1);
    CHECK(table.column("missing") == -1);
}

TEST_CASE("csv writer quotes and formats to 9 significant digits") {
    std::ostringstream out;
    csv::Writer w(out);
    w.field("plain").field("with,comma").field(0.123456789123).field(std::int64_t{42});
    w.endrow();
    CHECK(out.str() == "plain,\"with,comma\",0.123456789,42\n");
    CHECK(csv::format_number(2.0 / 57.0) == "0.0350877193");
}
