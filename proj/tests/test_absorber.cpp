#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "kfactor/absorber.hpp"
#include "kfactor/error.hpp"

using namespace kfactor;

namespace {

Graph gnp(int n, double p, uint64_t seed) { return generate_graph({GraphKind::Gnp, n, p, 0, seed, ""}); }

// Hall's condition for every t-subset of J2, checked over all subsets of I.
bool hall_template(const Template& tpl) {
    const int t = tpl.t(), is = tpl.i_count();
    std::vector<int> j2;
    for (int j = 2 * t; j < 4 * t; ++j) j2.push_back(j);
    for (int mask = 0; mask < (1 << (2 * t)); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != t) continue;
        std::set<int> removed;
        for (int b = 0; b < 2 * t; ++b)
            if (mask >> b & 1) removed.insert(j2[static_cast<size_t>(b)]);
        for (long long s = 1; s < (1LL << is); ++s) {
            std::set<int> nb;
            for (int i = 0; i < is; ++i)
                if (s >> i & 1)
                    for (int j : tpl.j_neighbors(i))
                        if (!removed.count(j)) nb.insert(j);
            if (static_cast<int>(nb.size()) < __builtin_popcountll(static_cast<unsigned long long>(s))) return false;
        }
    }
    return true;
}

Template random_template(int t, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 3 * t; ++i)
        for (int j = 0; j < 4 * t; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
    return Template(t, edges);
}

// Disjoint r-sets, each a clique, covering exactly `target`.
bool is_factor_of(const Graph& g, const std::vector<VertexSet>& cliques, const VertexSet& target, int r) {
    std::set<int> seen;
    for (const auto& c : cliques) {
        if (c.size() != r) return false;
        for (int a : c) {
            if (!seen.insert(a).second || !target.contains(a)) return false;
            for (int b : c)
                if (a < b && !g.adjacent(a, b)) return false;
        }
    }
    return static_cast<int>(seen.size()) == target.size();
}

// Template edges re-checked by scanning removables directly.
bool witnesses_hold(const Graph& g, const AbsorbingStructure& a) {
    for (auto [i, j] : a.tpl.edges()) {
        bool found = false;
        for (int v : a.j_orchard.tree(j).removable) {
            bool all = true;
            for (int s : a.i_cliques[static_cast<size_t>(i)]) all = all && g.adjacent(s, v);
            found = found || all;
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("flexibility-2 template by brute force has 14 vertices and passes all 6 subsets") {
    Template tpl = build_template(2, 40, 1);
    CHECK(tpl.i_count() + tpl.j_count() == 14);
    auto check = verify_template(tpl);
    CHECK(check.ok);
    CHECK(check.exhaustive);
    CHECK(check.checked == 6);
    CHECK(hall_template(tpl));
    CHECK(tpl.max_degree() <= 40);
}

TEST_CASE("template flexibility below 2 is rejected") {
    CHECK_THROWS_AS(build_template(1, 40, 0), Error);
    try {
        build_template(1, 40, 0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidSpec);
    }
}

TEST_CASE("t=4 seeded template is verified over all 70 subsets") {
    Template tpl = build_template(4, 40, 11);
    auto check = verify_template(tpl);
    CHECK(check.ok);
    CHECK(check.checked == 70);
    CHECK(tpl.max_degree() <= 40);
    CHECK(hall_template(tpl));
}

TEST_CASE("edgeless template fails on the first subset") {
    Template tpl(2, {});
    auto check = verify_template(tpl);
    CHECK_FALSE(check.ok);
    CHECK(check.checked == 1);
    REQUIRE(check.failing_subset.size() == 2);
    for (int j : check.failing_subset) CHECK(tpl.flexible(j));
}

TEST_CASE("complete bipartite template with t=3 verifies") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 12; ++j) edges.emplace_back(i, j);
    Template tpl(3, edges);
    auto check = verify_template(tpl);
    CHECK(check.ok);
    CHECK(check.checked == 20);
}

TEST_CASE("property: verification agrees with Hall's condition on random bipartite graphs") {
    std::mt19937_64 rng(5);
    int agree_ok = 0, agree_fail = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int t = trial % 2 == 0 ? 2 : 3;
        Template tpl = random_template(t, 0.3 + 0.01 * (trial % 30), rng);
        const bool ours = verify_template(tpl).ok;
        CHECK(ours == hall_template(tpl));
        (ours ? agree_ok : agree_fail) += 1;
    }
    CHECK(agree_ok > 0);
    CHECK(agree_fail > 0);
}

TEST_CASE("failing subset really has no perfect matching") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        Template tpl = random_template(3, 0.25, rng);
        auto check = verify_template(tpl);
        if (check.ok) continue;
        CHECK_FALSE(tpl.matching_without(check.failing_subset).has_value());
    }
}

TEST_CASE("sampled verification counts its samples") {
    Template tpl = build_template(3, 40, 2);
    auto check = verify_template(tpl, TemplateVerifyMode::sampled(50, 3));
    CHECK(check.ok);
    CHECK_FALSE(check.exhaustive);
    CHECK(check.checked == 50);
}

TEST_CASE("matching_without uses template edges and skips the removed set") {
    Template tpl = build_template(3, 40, 4);
    std::vector<int> removed{6, 8, 11};
    auto m = tpl.matching_without(removed);
    REQUIRE(m.has_value());
    CHECK(m->size() == 9);
    std::set<std::pair<int, int>> edges(tpl.edges().begin(), tpl.edges().end());
    std::set<int> js;
    for (auto e : *m) {
        CHECK(edges.count(e));
        CHECK(std::find(removed.begin(), removed.end(), e.second) == removed.end());
        js.insert(e.second);
    }
    CHECK(js.size() == 9);
}

TEST_CASE("template json round trip") {
    Template tpl = build_template(3, 40, 8);
    CHECK(template_from_json(template_to_json(tpl)) == tpl);
    CHECK_THROWS_AS(template_from_json("{\"t\":2}"), Error);
    CHECK_THROWS_AS(template_from_json("{\"t\":2,\"edges\":[[0,99]]}"), Error);
}

TEST_CASE("intersecting tree: one target in a complete host") {
    Graph g = complete_graph(30);
    VertexSet w = VertexSet::range(0, 20), target = VertexSet::range(20, 30);
    auto it = build_intersecting_tree(g, w, {target}, 3, 1);
    CHECK(it.hit == std::vector<int>{0});
    CHECK(it.required_hits == 1);
    CHECK(it.enough_hits());
    CHECK(validate_diamond_tree(g, it.tree).ok);
    CHECK(it.tree.removables().subset_of(target));
}

TEST_CASE("intersecting tree: empty target list and overlapping targets") {
    Graph g = complete_graph(20);
    CHECK_THROWS_AS(build_intersecting_tree(g, VertexSet::range(0, 10), {}, 3, 1), Error);
    try {
        build_intersecting_tree(g, VertexSet::range(0, 10), {}, 3, 1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyQuery);
    }
    CHECK_THROWS_AS(build_intersecting_tree(g, VertexSet::range(0, 10), {VertexSet{5, 12}}, 3, 1), Error);
}

TEST_CASE("intersecting tree in G(360,0.5) with 12 targets of size 8") {
    Graph g = gnp(360, 0.5, 21);
    std::vector<VertexSet> targets;
    for (int i = 0; i < 12; ++i) targets.push_back(VertexSet::range(264 + 8 * i, 272 + 8 * i));
    VertexSet w = VertexSet::range(0, 264);
    auto it = build_intersecting_tree(g, w, targets, 3, 4);
    CHECK(validate_diamond_tree(g, it.tree).ok);
    CHECK(it.tree.vertices().minus(it.tree.removables()).subset_of(w));
    int hits = 0;
    VertexSet vs = it.tree.vertices(), rem = it.tree.removables();
    for (size_t i = 0; i < targets.size(); ++i) {
        hits += !rem.disjoint(targets[i]);
        CHECK(it.per_target[i] == vs.intersect(targets[i]).size());
    }
    CHECK(hits == static_cast<int>(it.hit.size()));
    CHECK(hits >= 1);
    CHECK(hits >= 6);
    CHECK(it.within_order_cap());
}

TEST_CASE("absorbing structure in a complete host, t=2, M=2") {
    Graph g = complete_graph(80);
    auto a = build_absorbing_structure(g, g.vertices(), 2, 2, 3);
    auto rep = validate_absorbing_structure(g, a);
    CHECK_MESSAGE(rep.ok, rep.clause << ": " << rep.detail);
    CHECK(a.i_cliques.size() == 6);
    CHECK(a.j_orchard.size() == 8);
    CHECK(witnesses_hold(g, a));
}

TEST_CASE("absorbing structure with w smaller than 7t fails in stage 1") {
    Graph g = complete_graph(40);
    try {
        build_absorbing_structure(g, VertexSet::range(0, 13), 2, 2, 1);
        FAIL("expected StageFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StageFailed);
        CHECK(e.primary() == 1);
    }
}

TEST_CASE("absorbing structure in G(500,0.5), r=3, t=3, M=4") {
    Graph g = gnp(500, 0.5, 7);
    auto a = build_absorbing_structure(g, g.vertices(), 3, 4, 7);
    CHECK(validate_absorbing_structure(g, a).ok);
    CHECK(witnesses_hold(g, a));
    CHECK(a.vertices().size() <= 12 * 3 * 3 * 4);
    for (const auto& d : a.j_orchard.trees()) CHECK(d.order() == 4);
    for (const auto& s : a.i_cliques) CHECK(s.disjoint(a.j_orchard.vertices()));

    SUBCASE("empty leftover: padding covers all t removed trees") {
        auto res = absorb(g, a, Orchard{}, 1);
        CHECK(res.absorbed_into.empty());
        CHECK(res.padding.size() == 3);
        CHECK(is_factor_of(g, res.factor, a.vertices(), 3));
    }
    SUBCASE("one order-4 leftover tree breaks divisibility") {
        VertexSet free = g.vertices().minus(a.vertices());
        Orchard rem = grow_orchard(g, free.prefix(free.size() / 2), free.minus(free.prefix(free.size() / 2)), 3, 1, 4, 3, 5);
        try {
            absorb(g, a, rem, 1);
            FAIL("expected DivisibilityViolation");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DivisibilityViolation);
        }
    }
    SUBCASE("leftover overlapping the structure is rejected") {
        VertexSet some = a.j_orchard.tree(0).removables().prefix(3);
        try {
            absorb(g, a, Orchard::of_vertices(some, 3), 1);
            FAIL("expected InvalidSpec");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidSpec);
        }
    }
}

TEST_CASE("absorb two leftover trees into a t=4 structure") {
    Graph g = gnp(640, 0.5, 13);
    auto a = build_absorbing_structure(g, g.vertices(), 4, 4, 13);
    REQUIRE(validate_absorbing_structure(g, a).ok);
    VertexSet free = g.vertices().minus(a.vertices()).minus(absorbing_bad_set(g, a));
    VertexSet u = free.prefix(free.size() / 2);
    Orchard rem = grow_orchard(g, u, free.minus(u), 3, 2, 2, 2, 17);
    REQUIRE((a.vertices().size() + rem.vertices().size()) % 3 == 0);
    auto res = absorb(g, a, rem, 2);
    CHECK(res.absorbed_into.size() == 4);
    CHECK(res.padding.empty());
    CHECK(res.avoids_bad_set);
    CHECK(is_factor_of(g, res.factor, a.vertices().unite(rem.vertices()), 3));
}

TEST_CASE("validation flags tampered structures") {
    Graph g = complete_graph(80);
    auto a = build_absorbing_structure(g, g.vertices(), 2, 2, 5);
    auto bad = a;
    bad.i_cliques[1] = bad.i_cliques[0];
    CHECK(validate_absorbing_structure(g, bad).clause == "i cliques");
    bad = a;
    bad.i_cliques[0] = VertexSet{bad.j_orchard.tree(0).removable[0], bad.i_cliques[0][1]};
    CHECK_FALSE(validate_absorbing_structure(g, bad).ok);
    bad = a;
    bad.order = 5;
    CHECK(validate_absorbing_structure(g, bad).clause == "order");
}

TEST_CASE("structure json round trip") {
    Graph g = complete_graph(80);
    auto a = build_absorbing_structure(g, g.vertices(), 2, 2, 9);
    auto b = structure_from_json(structure_to_json(a));
    CHECK(b.tpl == a.tpl);
    CHECK(b.i_cliques == a.i_cliques);
    CHECK(b.order == a.order);
    CHECK(b.j_orchard.trees() == a.j_orchard.trees());
    CHECK(validate_absorbing_structure(g, b).ok);
}

TEST_CASE("property: structures in G(500,0.5) validate and absorb an empty leftover") {
    int factors = 0;
    for (uint64_t seed = 0; seed < 6; ++seed) {
        Graph g = gnp(500, 0.5, 300 + seed);
        auto a = build_absorbing_structure(g, g.vertices(), 3, 4, seed);
        CHECK(validate_absorbing_structure(g, a).ok);
        CHECK(witnesses_hold(g, a));
        auto res = absorb(g, a, Orchard{}, seed);
        factors += is_factor_of(g, res.factor, a.vertices(), 3);
    }
    CHECK(factors == 6);
}
