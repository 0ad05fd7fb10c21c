#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "kfactor/error.hpp"
#include "kfactor/factor.hpp"
#include "kfactor/orchard.hpp"

using namespace kfactor;

namespace {

Graph gnp(int n, double p, uint64_t seed) { return generate_graph({GraphKind::Gnp, n, p, 0, seed, ""}); }

// All tree triples admitting a triangle with one removable from each, by direct enumeration.
std::set<std::vector<int>> brute_edges(const Graph& g, const Orchard& o) {
    std::set<std::vector<int>> out;
    for (int a = 0; a < o.size(); ++a)
        for (int b = a + 1; b < o.size(); ++b)
            for (int c = b + 1; c < o.size(); ++c) {
                bool found = false;
                for (int x : o.tree(a).removable)
                    for (int y : o.tree(b).removable)
                        for (int z : o.tree(c).removable)
                            found = found || (g.adjacent(x, y) && g.adjacent(y, z) && g.adjacent(x, z));
                if (found) out.insert({a, b, c});
            }
    return out;
}

void check_witnesses(const Graph& g, const Orchard& o, const KrHypergraph& h) {
    for (const auto& e : h.edges) {
        CHECK(is_clique(g, VertexSet(e.witness)));
        for (size_t j = 0; j < e.trees.size(); ++j) CHECK(o.tree(e.trees[j]).removables().contains(e.witness[j]));
    }
}

}  // namespace

TEST_CASE("three single vertices forming a triangle give one hyperedge") {
    Graph g = complete_graph(3);
    Orchard o = Orchard::of_vertices({0, 1, 2}, 3);
    auto h = build_kr_hypergraph(g, o);
    REQUIRE(h.edges.size() == 1);
    auto f = matching_to_factor(o, h.edges);
    REQUIRE(f.size() == 1);
    CHECK(f[0] == VertexSet{0, 1, 2});
    CHECK(matching_to_factor(o, {}).empty());
}

TEST_CASE("three single vertices without a triangle give none") {
    Graph g(3, {{0, 1}, {1, 2}});
    CHECK(build_kr_hypergraph(g, Orchard::of_vertices({0, 1, 2}, 3)).edges.empty());
}

TEST_CASE("orchard of 8 order-3 trees: exhaustive hypergraph equals enumeration") {
    Graph g = gnp(100, 0.6, 100);
    Orchard o = grow_orchard(g, VertexSet::range(0, 50), VertexSet::range(50, 100), 3, 8, 3, 2, 4);
    REQUIRE(validate_orchard(g, o).ok);
    CHECK(o.size() == 8);
    CHECK(o.order() == 3);
    auto h = build_kr_hypergraph(g, o);
    std::set<std::vector<int>> got;
    for (const auto& e : h.edges) got.insert(e.trees);
    CHECK(got == brute_edges(g, o));
    check_witnesses(g, o, h);

    // sampled mode never reports an edge the enumeration lacks
    auto s = build_kr_hypergraph(g, o, HypergraphMode::sampled(2, 9));
    for (const auto& e : s.edges) CHECK(got.count(e.trees) == 1);
    check_witnesses(g, o, s);
}

TEST_CASE("property: exhaustive hypergraph matches enumeration on small orchards") {
    for (uint64_t seed = 0; seed < 15; ++seed) {
        Graph g = gnp(60, 0.3 + 0.03 * static_cast<double>(seed), seed);
        int k = 3 + static_cast<int>(seed % 6);
        Orchard o = grow_orchard(g, VertexSet::range(0, 20), {}, 3, k, 1, 1, seed);
        CAPTURE(seed);
        auto h = build_kr_hypergraph(g, o);
        std::set<std::vector<int>> got;
        for (const auto& e : h.edges) got.insert(e.trees);
        CHECK(got == brute_edges(g, o));
    }
}

TEST_CASE("k=9 orchard with a perfect matching gives a factor of V(O)") {
    Graph g = gnp(150, 0.7, 150);
    Orchard o = grow_orchard(g, VertexSet::range(0, 75), VertexSet::range(75, 150), 3, 9, 2, 1, 6);
    REQUIRE(validate_orchard(g, o).ok);
    auto h = build_kr_hypergraph(g, o);
    // exhaustive search for a perfect matching (3 disjoint triples out of 9 trees)
    std::vector<KrEdge> pm;
    std::function<bool(std::vector<char>&)> rec = [&](std::vector<char>& used) {
        int first = -1;
        for (int i = 0; i < 9 && first < 0; ++i)
            if (!used[static_cast<size_t>(i)]) first = i;
        if (first < 0) return true;
        for (const auto& e : h.edges) {
            if (e.trees[0] != first) continue;
            if (used[static_cast<size_t>(e.trees[1])] || used[static_cast<size_t>(e.trees[2])]) continue;
            for (int t : e.trees) used[static_cast<size_t>(t)] = 1;
            pm.push_back(e);
            if (rec(used)) return true;
            pm.pop_back();
            for (int t : e.trees) used[static_cast<size_t>(t)] = 0;
        }
        return false;
    };
    std::vector<char> used(9, 0);
    REQUIRE(rec(used));
    auto f = matching_to_factor(o, pm);
    CHECK(check_factor(g, f, o.vertices(), 3).ok);

    // a partial matching covers exactly the matched trees
    std::vector<KrEdge> one{pm[0]};
    auto part = matching_to_factor(o, one);
    std::vector<int> expect;
    for (int t : pm[0].trees) {
        auto v = o.tree(t).vertices();
        expect.insert(expect.end(), v.begin(), v.end());
    }
    CHECK(check_factor(g, part, VertexSet(expect), 3).ok);

    std::vector<KrEdge> clash{pm[0], pm[0]};
    try {
        matching_to_factor(o, clash);
        FAIL("expected NotAMatching");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotAMatching);
    }
}

TEST_CASE("absorbing an empty orchard") {
    Graph g = complete_graph(10);
    auto res = absorb_orchard(g, Orchard::of_vertices(VertexSet::range(0, 8), 3), Orchard{}, 3, 1);
    CHECK(res.used.empty());
    CHECK(res.factor.empty());
}

TEST_CASE("K16 absorbs two universal vertices") {
    Graph g = complete_graph(18);
    Orchard big = Orchard::of_vertices(VertexSet::range(0, 16), 3);
    Orchard small = Orchard::of_vertices({16, 17}, 3);
    auto res = absorb_orchard(g, big, small, 3, 2);
    CHECK(res.factor.size() == 2);
    CHECK(res.used.size() == 4);
    CHECK(res.bad_set.empty());
    CHECK_FALSE(res.size_constraint);  // 2 > 16/24, reported only
    std::vector<int> target{16, 17};
    for (int i : res.used) target.push_back(i);
    CHECK(check_factor(g, res.factor, VertexSet(target), 3).ok);
}

TEST_CASE("G(150,0.6): 24 order-2 trees absorb 2 order-2 trees") {
    Graph g = gnp(150, 0.6, 1500);
    Orchard big = grow_orchard(g, VertexSet::range(0, 60), VertexSet::range(60, 120), 3, 24, 2, 1, 3);
    REQUIRE(validate_orchard(g, big).ok);
    VertexSet bad = absorption_bad_set(g, big, 2.0 * g.edge_count() / (150.0 * 150.0), 3);
    std::vector<int> rest;
    for (int v = 120; v < 150; ++v)
        if (!bad.contains(v)) rest.push_back(v);
    REQUIRE(rest.size() >= 12);
    VertexSet pool(rest);
    Orchard small = grow_orchard(g, pool.prefix(static_cast<int>(rest.size()) / 2),
                                 pool.minus(pool.prefix(static_cast<int>(rest.size()) / 2)), 3, 2, 2, 1, 5);
    REQUIRE(validate_orchard(g, small).ok);
    auto res = absorb_orchard(g, big, small, 3, 8);
    CHECK(res.avoids_bad_set);
    CHECK(res.bad_set == bad);
    CHECK(res.used.size() == 4);
    std::vector<int> target;
    for (int v : small.vertices()) target.push_back(v);
    for (int i : res.used)
        for (int v : big.tree(i).vertices()) target.push_back(v);
    CHECK(check_factor(g, res.factor, VertexSet(target), 3).ok);
}

TEST_CASE("property: absorption factors across seeds") {
    for (uint64_t seed = 0; seed < 8; ++seed) {
        Graph g = gnp(170, 0.65, 700 + seed);
        Orchard big = grow_orchard(g, VertexSet::range(0, 70), VertexSet::range(70, 140), 3, 30, 2, 1, seed);
        VertexSet bad = absorption_bad_set(g, big, 2.0 * g.edge_count() / (170.0 * 170.0), 3);
        std::vector<int> rest;
        for (int v = 140; v < 170; ++v)
            if (!bad.contains(v)) rest.push_back(v);
        int k = 1 + static_cast<int>(seed % 3);
        Orchard small = Orchard::of_vertices(VertexSet(rest).prefix(k), 3);
        auto res = absorb_orchard(g, big, small, 3, seed);
        CAPTURE(seed);
        CHECK(static_cast<int>(res.used.size()) == 2 * k);
        std::vector<int> target = small.vertices().items();
        for (int i : res.used)
            for (int v : big.tree(i).vertices()) target.push_back(v);
        CHECK(check_factor(g, res.factor, VertexSet(target), 3).ok);
    }
}

TEST_CASE("absorption failure carries the round and index") {
    // vertex 8 has no neighbours, so no triangle can serve it in either round
    std::vector<Edge> edges;
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b) edges.push_back({a, b});
    Graph g(9, edges);
    try {
        absorb_orchard(g, Orchard::of_vertices(VertexSet::range(0, 8), 3), Orchard::of_vertices({8}, 3), 3, 0);
        FAIL("expected Failed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Failed);
        CHECK(e.primary() == 2);
        CHECK(e.secondary() == 0);
    }
}

TEST_CASE("shrinkability: complete hypergraph, q empty") {
    Graph g = complete_graph(10);
    Orchard o = Orchard::of_vertices(VertexSet::range(0, 10), 3);
    auto rep = test_shrinkability(g, o, {}, 0.3, 1, 1);
    REQUIRE(rep.uncovered.size() == 1);
    CHECK(rep.uncovered[0] == 10 % 3);
    CHECK(rep.all_pass);
    CHECK(rep.sampled);
}

TEST_CASE("shrinkability: a single tree") {
    Graph g = complete_graph(3);
    auto rep = test_shrinkability(g, Orchard::of_vertices({0}, 3), {}, 0.3, 1, 1);
    CHECK(rep.threshold == 1);
    CHECK(rep.uncovered[0] == 1);
    CHECK(rep.all_pass);
}

TEST_CASE("shrinkability: dense k=12, gamma=0.3, 20 trials") {
    Graph g = gnp(200, 0.7, 12);
    Orchard o = grow_orchard(g, VertexSet::range(0, 100), VertexSet::range(100, 200), 3, 12, 3, 2, 12);
    REQUIRE(validate_orchard(g, o).ok);
    std::vector<int> q{0, 1, 2, 3};
    auto rep = test_shrinkability(g, o, q, 0.3, 20, 77);
    CHECK(rep.threshold == 6);
    CHECK(rep.uncovered.size() == 20);
    CHECK(rep.all_pass);
    // validate the matchings the same way the report derives them
    auto h = build_kr_hypergraph(g, o);
    for (uint64_t s = 0; s < 5; ++s) {
        std::vector<int> alive{4, 5, 6, 7, 8, 9, 10, 11};
        auto m = shrink_matching(g, o, alive, s);
        std::set<int> seen;
        for (const auto& e : m)
            for (int t : e.trees) {
                CHECK(seen.insert(t).second);
                CHECK(std::find(alive.begin(), alive.end(), t) != alive.end());
            }
        auto f = matching_to_factor(o, m);
        std::vector<int> cover;
        for (const auto& e : m)
            for (int t : e.trees)
                for (int v : o.tree(t).vertices()) cover.push_back(v);
        CHECK(check_factor(g, f, VertexSet(cover), 3).ok);
    }
}

TEST_CASE("orchard json round trip") {
    Graph g = gnp(60, 0.7, 3);
    Orchard o = grow_orchard(g, VertexSet::range(0, 30), VertexSet::range(30, 60), 3, 3, 2, 1, 1);
    Orchard back = orchard_from_json(orchard_to_json(o));
    CHECK(back.trees() == o.trees());
}
