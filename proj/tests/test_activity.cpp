#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers/fixtures.hpp"
#include "otcnet/activity.hpp"
#include "otcnet/stats.hpp"

using namespace otcnet;
using Catch::Approx;

namespace {
std::vector<std::string> letters(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
    return out;
}
}  // namespace

TEST_CASE("rank_quarter orders by activity with deterministic ties") {
    auto names = letters(3);
    std::vector<Currency> acts{300, 100, 200};
    CHECK(rank_quarter(acts, names) == std::vector<int>{1, 3, 2});

    std::vector<Currency> tied{5, 5};
    auto two = letters(2);
    CHECK(rank_quarter(tied, two) == std::vector<int>{1, 2});

    std::vector<Currency> solo{7};
    auto one = letters(1);
    CHECK(rank_quarter(solo, one) == std::vector<int>{1});

    std::vector<Currency> with_zero{10, 0, 4};
    CHECK(rank_quarter(with_zero, names) == std::vector<int>{1, 0, 2});

    std::vector<Currency> zeros{0, 0};
    CHECK_THROWS_AS(rank_quarter(zeros, two), ValidationError);
}

TEST_CASE("ranks are invariant under positive scaling") {
    std::mt19937_64 eng(42);
    for (int round = 0; round < 50; ++round) {
        std::size_t n = 1 + eng() % 10;
        auto names = letters(n);
        std::vector<Currency> acts(n);
        bool any = false;
        for (auto& a : acts) {
            a = static_cast<Currency>(eng() % 1000);
            any = any || a > 0;
        }
        if (!any) acts[0] = 1;
        std::vector<Currency> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = acts[i] * 7;
        CHECK(rank_quarter(acts, names) == rank_quarter(scaled, names));

        // rank/activity consistency
        auto ranks = rank_quarter(acts, names);
        std::vector<Currency> by_rank;
        for (int r = 1; r <= static_cast<int>(n); ++r)
            for (std::size_t i = 0; i < n; ++i)
                if (ranks[i] == r) by_rank.push_back(acts[i]);
        for (std::size_t k = 0; k + 1 < by_rank.size(); ++k) CHECK(by_rank[k] >= by_rank[k + 1]);
    }
}

TEST_CASE("aggregates equal an independent columnar sum") {
    const Panel p = fixtures::small_panel();
    AggregateRanking agg = aggregate(p);

    CHECK(agg.total[p.id_of("ALPHA BANK")] == 3800);
    CHECK(agg.total[p.id_of("BETA TRUST")] == 1700);
    CHECK(agg.total[p.id_of("KEYBANK")] == 820);
    CHECK(agg.total[p.id_of("MELLON BANK")] == 390);
    CHECK(agg.total[p.id_of("DELTA SAVINGS")] == 130);
    CHECK(agg.total[p.id_of("GAMMA BANK")] == 100);

    for (int i = 0; i < p.institutions(); ++i) {
        Currency direct = 0;
        for (int t = 1; t <= p.quarters(); ++t) direct += p.activity(i, t);
        CHECK(direct == agg.total[i]);
    }

    CHECK(agg.rank[p.id_of("ALPHA BANK")] == 1);
    CHECK(agg.rank[p.id_of("BETA TRUST")] == 2);
    CHECK(agg.rank[p.id_of("KEYBANK")] == 3);
    CHECK(agg.rank[p.id_of("MELLON BANK")] == 4);
    CHECK(agg.rank[p.id_of("DELTA SAVINGS")] == 5);
    CHECK(agg.rank[p.id_of("GAMMA BANK")] == 6);

    // OTC volumes rank KEYBANK above the ETD-heavy BETA TRUST
    CHECK(agg.rank_otc[p.id_of("KEYBANK")] == 2);
    CHECK(agg.rank_otc[p.id_of("BETA TRUST")] == 3);

    // R is a permutation of 1..N
    std::vector<int> sorted = agg.rank;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < p.institutions(); ++i) CHECK(sorted[i] == i + 1);
}

TEST_CASE("constant and single-quarter aggregation identities") {
    std::vector<RawRow> rows;
    for (int t = 0; t < 5; ++t) {
        RawRow r;
        r.quarter_label = Quarter{2001, 1}.label();
        r.quarter_label = quarter_at(Quarter{2001, 1}, t).label();
        r.name = "CONST";
        r.rank = 1;
        r.total_derivatives = 42;
        r.line_no = 2 + t;
        rows.push_back(r);
    }
    AliasTable aliases;
    auto built = build_panel(rows, aliases, Quarter{2001, 1}, Quarter{2002, 1});
    AggregateRanking agg = aggregate(built.panel);
    CHECK(agg.total[0] == 42 * 5);  // c * T over present quarters
}

TEST_CASE("gini matches its textbook cases and the fixture value") {
    std::vector<double> equal{5, 5, 5, 5};
    CHECK(gini(equal) == Approx(0.0).margin(1e-15));
    std::vector<double> concentrated{1, 0, 0, 0};
    CHECK(gini(concentrated) == Approx(0.75).margin(1e-15));
    std::vector<double> single{3.0};
    CHECK(gini(single) == Approx(0.0).margin(1e-15));
    std::vector<double> zeros{0, 0};
    CHECK_THROWS_AS(gini(zeros), ValidationError);

    const Panel p = fixtures::small_panel();
    AggregateRanking agg = aggregate(p);
    std::vector<double> a(agg.total.begin(), agg.total.end());
    CHECK(gini(a) == Approx(0.567723342939).margin(1e-9));
}

TEST_CASE("gini stays in [0,1) on random nonnegative samples") {
    std::mt19937_64 eng(7);
    for (int round = 0; round < 200; ++round) {
        std::size_t n = 1 + eng() % 20;
        std::vector<double> x(n);
        bool positive = false;
        for (auto& v : x) {
            v = static_cast<double>(eng() % 1000);
            positive = positive || v > 0;
        }
        if (!positive) x[0] = 1.0;
        double g = gini(x);
        CHECK(g >= 0.0);
        CHECK(g < 1.0);
    }
}

TEST_CASE("skewness matches hand-computed moments") {
    std::vector<double> symmetric{1, 2, 3};
    CHECK(sample_skewness(symmetric) == Approx(0.0).margin(1e-14));

    // adjusted Fisher-Pearson of {0,0,1}: g1 = 1/sqrt(2), G1 = g1*sqrt(6)/1 = sqrt(3)
    std::vector<double> spike{0, 0, 1};
    CHECK(sample_skewness(spike) == Approx(1.7320508075688772).margin(1e-12));

    std::vector<double> constant{4, 4, 4};
    CHECK_THROWS_AS(sample_skewness(constant), ValidationError);
    std::vector<double> two{1, 2};
    CHECK_THROWS_AS(sample_skewness(two), ValidationError);

    const Panel p = fixtures::small_panel();
    AggregateRanking agg = aggregate(p);
    std::vector<double> a(agg.total.begin(), agg.total.end());
    CHECK(sample_skewness(a) == Approx(1.646037611862).margin(1e-9));
}

TEST_CASE("market share is monotone, exact on the fixture, 1 at k=N") {
    const Panel p = fixtures::small_panel();
    const double expected[] = {0.547550432277, 0.792507204611, 0.910662824207,
                               0.966858789625, 0.985590778098, 1.0};
    double prev = 0.0;
    for (int k = 1; k <= 6; ++k) {
        double share = market_share(p, k, p.full_span());
        CHECK(share == Approx(expected[k - 1]).margin(1e-9));
        CHECK(share >= prev);
        prev = share;
    }
    // single-quarter period restriction
    CHECK(market_share(p, 2, {1, 1}) == Approx(0.8).margin(1e-12));
    CHECK(market_share(p, 6, {1, 1}) == Approx(1.0).margin(1e-15));
}

TEST_CASE("otc ratios divide aggregated splits and flag degenerate cases") {
    const Panel p = fixtures::small_panel();
    AggregateRanking agg = aggregate(p);
    auto ratios = otc_ratio(agg);
    auto find = [&](const char* name) {
        return *std::find_if(ratios.begin(), ratios.end(), [&](const OtcRatio& r) {
            return r.institution == p.id_of(name);
        });
    };
    CHECK(find("ALPHA BANK").ratio == Approx(3.0).margin(1e-12));      // 2850 / 950
    CHECK(find("MELLON BANK").ratio == Approx(9.0).margin(1e-12));     // 351 / 39
    CHECK(find("BETA TRUST").ratio == Approx(510.0 / 1190.0).margin(1e-12));
    CHECK(find("KEYBANK").flag == OtcRatio::Flag::infinite);           // ETD = 0, OTC > 0
    CHECK(find("DELTA SAVINGS").flag == OtcRatio::Flag::infinite);

    AggregateRanking none;
    none.total = {0};
    none.total_otc = {0};
    none.total_etd = {0};
    CHECK(otc_ratio(none)[0].flag == OtcRatio::Flag::undefined);

    // 98 OTC vs 2 ETD
    AggregateRanking simple;
    simple.total = {100};
    simple.total_otc = {98};
    simple.total_etd = {2};
    CHECK(otc_ratio(simple)[0].ratio == Approx(49.0).margin(1e-12));
}

TEST_CASE("ranking comparison reports displacements and band maxima") {
    std::vector<int> a{1, 2, 3};
    std::vector<int> same{1, 2, 3};
    RankComparison cmp = compare_rankings(a, same);
    for (const auto& row : cmp.rows) CHECK(row.displacement == 0);

    std::vector<int> reversed{3, 2, 1};
    cmp = compare_rankings(a, reversed);
    CHECK(cmp.rows[0].displacement == 2);
    CHECK(cmp.rows[1].displacement == 0);
    CHECK(cmp.rows[2].displacement == 2);
    CHECK(cmp.max_displacement_by_band["1-15"] == 2);

    const Panel p = fixtures::small_panel();
    AggregateRanking agg = aggregate(p);
    cmp = compare_rankings(agg.rank, agg.rank_otc);
    for (const auto& row : cmp.rows) {
        int expected = (row.institution == p.id_of("BETA TRUST") ||
                        row.institution == p.id_of("KEYBANK"))
                           ? 1
                           : 0;
        CHECK(row.displacement == expected);
    }

    std::vector<int> partial{1, 0, 2};
    CHECK_THROWS_AS(compare_rankings(a, partial), ValidationError);
}

TEST_CASE("growth trend recovers exponential slopes") {
    std::vector<Currency> series;
    for (int t = 0; t < 12; ++t)
        series.push_back(static_cast<Currency>(std::llround(1e6 * std::exp(0.2 * (t / 4.0)))));
    GrowthTrend trend = growth_trend(series, {1, 12});
    CHECK(trend.slope_per_year == Approx(0.2).margin(1e-5));
    CHECK(trend.yearly_ratio == Approx(std::exp(0.2)).margin(1e-5));
    CHECK(trend.points == 12);
    CHECK(trend.excluded_quarters.empty());

    std::vector<Currency> constant(10, 500);
    trend = growth_trend(constant, {1, 10});
    CHECK(trend.slope_per_year == Approx(0.0).margin(1e-15));
    CHECK(trend.yearly_ratio == Approx(1.0).margin(1e-15));

    // zero quarters are excluded and reported
    std::vector<Currency> gappy = series;
    gappy[3] = 0;
    trend = growth_trend(gappy, {1, 12});
    CHECK(trend.excluded_quarters == std::vector<int>{4});
    CHECK(trend.points == 11);

    std::vector<Currency> short_series(5, 10);
    CHECK_THROWS_AS(growth_trend(short_series, {1, 5}), ValidationError);
}

TEST_CASE("growth trend is scale invariant") {
    std::vector<Currency> series;
    std::mt19937_64 eng(11);
    for (int t = 0; t < 16; ++t) series.push_back(1000 + static_cast<Currency>(eng() % 5000));
    GrowthTrend base = growth_trend(series, {1, 16});
    std::vector<Currency> scaled;
    for (Currency v : series) scaled.push_back(v * 1000);
    GrowthTrend big = growth_trend(scaled, {1, 16});
    CHECK(big.slope_per_year == Approx(base.slope_per_year).margin(1e-9));
}
