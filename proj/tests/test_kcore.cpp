#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers/fixtures.hpp"
#include "helpers/oracles.hpp"
#include "otcnet/kcore.hpp"

using namespace otcnet;
using Catch::Approx;

namespace {
AggregatedGraph graph_from(const SquareMatrix& w) {
    AggregatedGraph g;
    g.mode = LinkMode::rank_weighted;
    g.quarters = 1;
    g.weights = w;
    g.importance.resize(w.size());
    double total = 0;
    for (int i = 0; i < w.size(); ++i) {
        g.importance[i] = w.row_sum(i);
        total += g.importance[i];
    }
    g.normalized_importance.resize(w.size());
    for (int i = 0; i < w.size(); ++i)
        g.normalized_importance[i] = total > 0 ? g.importance[i] / total : 0.0;
    return g;
}

SquareMatrix complete_graph(int n, double weight = 1.0) {
    SquareMatrix w(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) w.set(i, j, weight);
    return w;
}
}  // namespace

TEST_CASE("weighted degree reduces to strength or plain degree at the exponent corners") {
    SquareMatrix w(3);
    w.set(0, 1, 2.0);
    w.set(0, 2, 2.0);
    CHECK(weighted_degree(w, 0, 0.0, 1.0) == Approx(4.0).margin(1e-15));  // strength
    CHECK(weighted_degree(w, 0, 1.0, 0.0) == Approx(2.0).margin(1e-15));  // degree
    CHECK(weighted_degree(w, 0, 1.0, 1.0) == Approx(2.8284271247461903).margin(1e-12));
    CHECK(weighted_degree(w, 1, 0.0, 1.0) == Approx(2.0).margin(1e-15));
    CHECK_THROWS_AS(weighted_degree(w, 0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(weighted_degree(w, 5, 0.0, 1.0), ValidationError);
}

TEST_CASE("classic k-core results hold under the degree exponents") {
    // complete graph on 4 nodes: every node sits in core 3
    CoreDecomposition k4 = decompose(graph_from(complete_graph(4)), 1.0, 0.0);
    for (double c : k4.core) CHECK(c == Approx(3.0).margin(1e-12));

    // star: leaves peel at 1 and drag the hub with them
    SquareMatrix star(6);
    for (int leaf = 1; leaf < 6; ++leaf) star.set(0, leaf, 1.0);
    CoreDecomposition s = decompose(graph_from(star), 1.0, 0.0);
    for (double c : s.core) CHECK(c == Approx(1.0).margin(1e-12));
}

TEST_CASE("integer schedule matches the distinct-value schedule on integer degrees") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        SquareMatrix w = oracles::random_graph(seed);
        for (int i = 0; i < w.size(); ++i)
            for (int j = i + 1; j < w.size(); ++j)
                if (w.at(i, j) > 0) w.set(i, j, 1.0);
        CoreDecomposition a = decompose(graph_from(w), 1.0, 0.0, CoreSchedule::distinct_values);
        CoreDecomposition b = decompose(graph_from(w), 1.0, 0.0, CoreSchedule::integer_steps);
        for (int i = 0; i < w.size(); ++i) {
            // a zero-degree node lands in core 0 on the distinct schedule and
            // core 1 on the integer one; connected nodes agree exactly
            if (a.core[i] > 0) CHECK(a.core[i] == Approx(b.core[i]).margin(1e-12));
        }
    }
}

TEST_CASE("fixture decomposition matches the hand-traced pruning") {
    const Panel p = fixtures::small_panel();
    const int A = p.id_of("ALPHA BANK"), B = p.id_of("BETA TRUST"), D = p.id_of("DELTA SAVINGS"),
              G = p.id_of("GAMMA BANK"), K = p.id_of("KEYBANK"), M = p.id_of("MELLON BANK");

    AggregatedGraph bin = aggregate_links(build_temporal_network(p, LinkMode::binary));
    CoreDecomposition cb = decompose(bin, 0.0, 1.0);
    CHECK(cb.core[G] == Approx(0.75).margin(1e-12));
    CHECK(cb.core[D] == Approx(1.75).margin(1e-12));
    for (int i : {A, B, K, M}) CHECK(cb.core[i] == Approx(2.0).margin(1e-12));

    AggregatedGraph rw = aggregate_links(build_temporal_network(p, LinkMode::rank_weighted));
    CoreDecomposition cr = decompose(rw, 0.0, 1.0);
    CHECK(cr.core[G] == Approx(0.1875).margin(1e-12));
    CHECK(cr.core[D] == Approx(0.3875).margin(1e-12));
    for (int i : {A, B, K, M}) CHECK(cr.core[i] == Approx(13.0 / 24).margin(1e-12));
    CHECK(cr.core_normalized[G] == Approx(0.3461538462).margin(1e-9));
    CHECK(cr.core_normalized[D] == Approx(0.7153846154).margin(1e-9));
    CHECK(cr.core_normalized[A] == Approx(1.0).margin(1e-12));

    // ordering: equal cores fall back to importance, then name
    std::vector<int> topo = topological_ranking(cr, rw, p.registry());
    CHECK(topo == std::vector<int>{A, B, K, M, D, G});
    std::vector<int> topo_bin = topological_ranking(cb, bin, p.registry());
    CHECK(topo_bin == std::vector<int>{A, B, K, M, D, G});
}

TEST_CASE("decomposition agrees with the brute-force oracle on random graphs") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        SquareMatrix w = oracles::random_graph(seed);
        for (auto [alpha, beta] : {std::pair{0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}) {
            CoreDecomposition got = decompose(graph_from(w), alpha, beta);
            std::vector<double> want = oracles::kcore_bruteforce(w, alpha, beta);
            for (int i = 0; i < w.size(); ++i) CHECK(got.core[i] == Approx(want[i]).margin(1e-9));
        }
    }
}

TEST_CASE("adding a link never lowers a core index") {
    std::mt19937_64 eng(31);
    for (int round = 0; round < 40; ++round) {
        SquareMatrix w = oracles::random_graph(eng());
        CoreDecomposition before = decompose(graph_from(w), 0.0, 1.0);
        // add or strengthen one edge
        int i = static_cast<int>(eng() % w.size());
        int j = static_cast<int>(eng() % w.size());
        if (i == j) j = (j + 1) % w.size();
        SquareMatrix w2 = w;
        w2.set(i, j, w.at(i, j) + 0.5);
        CoreDecomposition after = decompose(graph_from(w2), 0.0, 1.0);
        for (int node = 0; node < w.size(); ++node)
            CHECK(after.core[node] >= before.core[node] - 1e-9);
    }
}

TEST_CASE("with strength-only exponents a core never exceeds the initial strength") {
    for (std::uint64_t seed : {101u, 102u, 103u, 104u}) {
        SquareMatrix w = oracles::random_graph(seed);
        AggregatedGraph g = graph_from(w);
        CoreDecomposition d = decompose(g, 0.0, 1.0);
        for (int i = 0; i < w.size(); ++i) CHECK(d.core[i] <= g.importance[i] + 1e-9);
    }
}

TEST_CASE("permuting node labels permutes core indices identically") {
    std::mt19937_64 eng(57);
    for (int round = 0; round < 20; ++round) {
        SquareMatrix w = oracles::random_graph(eng());
        int n = w.size();
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), eng);
        SquareMatrix moved(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (w.at(i, j) > 0) moved.set(perm[i], perm[j], w.at(i, j));
        CoreDecomposition base = decompose(graph_from(w), 0.0, 1.0);
        CoreDecomposition permuted = decompose(graph_from(moved), 0.0, 1.0);
        for (int i = 0; i < n; ++i)
            CHECK(permuted.core[perm[i]] == Approx(base.core[i]).margin(1e-9));
    }
}

TEST_CASE("the removal log replays to the recorded weighted degrees") {
    const Panel p = fixtures::small_panel();
    AggregatedGraph g = aggregate_links(build_temporal_network(p, LinkMode::rank_weighted));
    CoreDecomposition d = decompose(g, 0.0, 1.0);
    REQUIRE(d.removal_log.size() == static_cast<std::size_t>(g.size()));
    std::vector<char> alive(g.size(), 1);
    for (const auto& step : d.removal_log) {
        double khat = detail::weighted_degree_masked(g.weights, alive, step.node, 0.0, 1.0);
        CHECK(khat == Approx(step.weighted_degree).margin(1e-15));
        CHECK(khat <= step.threshold + 1e-12);
        alive[step.node] = 0;
    }
}

TEST_CASE("core-vs-activity join pairs positions and displacements") {
    const Panel p = fixtures::small_panel();
    AggregatedGraph g = aggregate_links(build_temporal_network(p, LinkMode::rank_weighted));
    CoreDecomposition d = decompose(g, 0.0, 1.0);
    std::vector<int> topo = topological_ranking(d, g, p.registry());
    AggregateRanking agg = aggregate(p);
    auto rows = compare_core_vs_activity(topo, d, agg);
    REQUIRE(rows.size() == 6);
    // fixture: topological order equals activity order, so no displacement
    for (const auto& row : rows) {
        CHECK(row.topological_rank == row.activity_rank);
        CHECK(row.displacement == 0);
    }

    // reversed orderings give maximal displacement n-1 at the ends
    AggregateRanking rev;
    rev.rank = {4, 3, 2, 1};
    rev.total = {1, 2, 3, 4};
    rev.total_otc = rev.total;
    rev.total_etd = {0, 0, 0, 0};
    rev.rank_otc = rev.rank;
    CoreDecomposition fake;
    fake.core = {4, 3, 2, 1};
    fake.core_normalized = {1.0, 0.75, 0.5, 0.25};
    std::vector<int> order{0, 1, 2, 3};
    auto rev_rows = compare_core_vs_activity(order, fake, rev);
    CHECK(rev_rows[0].displacement == 3);
    CHECK(rev_rows[3].displacement == 3);

    std::vector<int> bad_order{0, 1};
    CHECK_THROWS_AS(compare_core_vs_activity(bad_order, fake, rev), ValidationError);
}

TEST_CASE("empty and exponent-degenerate graphs are rejected") {
    AggregatedGraph g = graph_from(SquareMatrix(3));
    CHECK_THROWS_AS(decompose(g, 0.0, 0.0), ValidationError);
    AggregatedGraph empty;
    empty.weights = SquareMatrix(0);
    CHECK_THROWS_AS(decompose(empty, 0.0, 1.0), ValidationError);
}
