#include "kfactor/diamond.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include <json.hpp>

#include "kfactor/error.hpp"
#include "kfactor/random.hpp"

namespace kfactor {

VertexSet DiamondTree::vertices() const {
    std::vector<int> all = removable;
    for (const auto& s : interior) all.insert(all.end(), s.begin(), s.end());
    return VertexSet(all);
}

std::vector<int> DiamondTree::node_degrees() const {
    std::vector<int> deg(removable.size(), 0);
    for (auto [a, b] : aux_edges) {
        ++deg[static_cast<size_t>(a)];
        ++deg[static_cast<size_t>(b)];
    }
    return deg;
}

VertexSet DiamondTree::non_leaves() const {
    auto deg = node_degrees();
    std::vector<int> out;
    for (size_t i = 0; i < deg.size(); ++i)
        if (deg[i] > 1) out.push_back(removable[i]);
    return VertexSet(out);
}

namespace {

ValidationReport fail(std::string clause, std::string detail = {}) {
    return {false, std::move(clause), std::move(detail)};
}

}  // namespace

ValidationReport validate_diamond_tree(const Graph& g, const DiamondTree& d) {
    const int m = d.order();
    if (d.r < 2) return fail("r", "r must be at least 2");
    if (m < 1) return fail("tree shape", "no nodes");
    if (static_cast<int>(d.aux_edges.size()) != m - 1) return fail("tree shape", "edge count is not m-1");
    if (d.interior.size() != d.aux_edges.size()) return fail("interior map", "one interior clique per tree edge");

    std::vector<int> parent(static_cast<size_t>(m));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
        return x;
    };
    for (auto [a, b] : d.aux_edges) {
        if (a < 0 || b < 0 || a >= m || b >= m || a == b) return fail("tree shape", "edge endpoint out of range");
        int ra = find(a), rb = find(b);
        if (ra == rb) return fail("tree shape", "cycle in auxiliary tree");
        parent[static_cast<size_t>(ra)] = rb;
    }

    for (int v : d.removable)
        if (v < 0 || v >= g.n()) return fail("host vertices", "removable outside host");
    VertexSet removables = d.removables();
    if (removables.size() != m) return fail("removable bijection", "removable vertices repeat");

    std::vector<char> seen(static_cast<size_t>(g.n()), 0);
    for (int v : d.removable) seen[static_cast<size_t>(v)] = 1;
    for (size_t e = 0; e < d.interior.size(); ++e) {
        const VertexSet& s = d.interior[e];
        if (s.size() != d.r - 1) return fail("interior size", "interior clique must have r-1 vertices");
        for (int v : s)
            if (v < 0 || v >= g.n()) return fail("host vertices", "interior vertex outside host");
        if (!is_clique(g, s)) return fail("interior clique", "interior set is not a clique");
        for (int v : s) {
            if (seen[static_cast<size_t>(v)] == 1) return fail("disjointness", "interior meets a removable vertex");
            if (seen[static_cast<size_t>(v)] == 2) return fail("disjointness", "interior cliques share a vertex");
            seen[static_cast<size_t>(v)] = 2;
        }
    }

    for (size_t e = 0; e < d.aux_edges.size(); ++e) {
        auto [a, b] = d.aux_edges[e];
        for (int end : {d.removable[static_cast<size_t>(a)], d.removable[static_cast<size_t>(b)]})
            for (int v : d.interior[e])
                if (!g.adjacent(end, v)) return fail("adjacency", "interior clique not joined to an endpoint");
    }

    if (d.vertices().size() != (m - 1) * d.r + 1) return fail("vertex count", "|V(D)| != (m-1)r+1");
    return {};
}

std::vector<VertexSet> extract_factor_without(const DiamondTree& d, int v) {
    auto it = std::find(d.removable.begin(), d.removable.end(), v);
    if (it == d.removable.end()) throw Error(ErrorKind::NotRemovable, "vertex is not removable in this tree");
    const int m = d.order();
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(m));
    for (size_t e = 0; e < d.aux_edges.size(); ++e) {
        auto [a, b] = d.aux_edges[e];
        adj[static_cast<size_t>(a)].push_back({b, static_cast<int>(e)});
        adj[static_cast<size_t>(b)].push_back({a, static_cast<int>(e)});
    }
    std::vector<VertexSet> out;
    std::vector<char> visited(static_cast<size_t>(m), 0);
    std::vector<int> queue{static_cast<int>(it - d.removable.begin())};
    visited[static_cast<size_t>(queue[0])] = 1;
    for (size_t head = 0; head < queue.size(); ++head) {
        int x = queue[head];
        for (auto [y, e] : adj[static_cast<size_t>(x)]) {
            if (visited[static_cast<size_t>(y)]) continue;
            visited[static_cast<size_t>(y)] = 1;
            queue.push_back(y);
            // y is the endpoint farther from v
            VertexSet clique = d.interior[static_cast<size_t>(e)];
            clique.insert(d.removable[static_cast<size_t>(y)]);
            out.push_back(std::move(clique));
        }
    }
    return out;
}

bool is_scattered(const DiamondTree& d, int delta) {
    for (int deg : d.node_degrees())
        if (deg > 1 && deg < delta) return false;
    return true;
}

DiamondTree restrict_to(const DiamondTree& d, const VertexSet& keep) {
    if (keep.empty()) throw Error(ErrorKind::InvalidSpec, "restriction must keep at least one removable");
    if (!keep.subset_of(d.removables())) throw Error(ErrorKind::InvalidSpec, "kept vertices must be removable");
    const size_t m = static_cast<size_t>(d.order());
    std::vector<char> alive(m, 1), edge_alive(d.aux_edges.size(), 1);
    std::vector<int> deg = d.node_degrees();
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < m; ++i) {
            if (!alive[i] || keep.contains(d.removable[i]) || deg[i] > 1) continue;
            alive[i] = 0;
            changed = true;
            for (size_t e = 0; e < d.aux_edges.size(); ++e) {
                if (!edge_alive[e]) continue;
                auto [a, b] = d.aux_edges[e];
                if (a == static_cast<int>(i) || b == static_cast<int>(i)) {
                    edge_alive[e] = 0;
                    --deg[static_cast<size_t>(a)];
                    --deg[static_cast<size_t>(b)];
                }
            }
        }
    }
    std::vector<int> relabel(m, -1);
    DiamondTree out;
    out.r = d.r;
    for (size_t i = 0; i < m; ++i) {
        if (!alive[i]) continue;
        if (!keep.contains(d.removable[i]))
            throw Error(ErrorKind::InvalidSpec, "kept removables do not span a subtree");
        relabel[i] = out.order();
        out.removable.push_back(d.removable[i]);
    }
    for (size_t e = 0; e < d.aux_edges.size(); ++e) {
        if (!edge_alive[e]) continue;
        auto [a, b] = d.aux_edges[e];
        out.aux_edges.push_back({relabel[static_cast<size_t>(a)], relabel[static_cast<size_t>(b)]});
        out.interior.push_back(d.interior[e]);
    }
    return out;
}

namespace {

struct Star {
    int center = -1;
    std::vector<VertexSet> cliques;
    std::vector<int> leaves;
};

// Matching of popular (r-1)-cliques in u2, each with δ neighbours in u1, grown around a leader
// until some centre candidate sees δ of them. `centers` is in preference order.
std::optional<Star> grow_star(const Graph& g, const std::vector<int>& centers, const VertexSet& u1, VertexSet u2,
                              int r, int delta, Rng& rng, const BuildOptions& opts) {
    if (centers.empty()) return std::nullopt;
    if (delta == 0) return Star{centers.front(), {}, {}};

    std::vector<VertexSet> matching;
    std::vector<std::vector<int>> seen_by(static_cast<size_t>(g.n()));
    std::vector<char> exhausted(static_cast<size_t>(g.n()), 0);
    std::vector<int> rank(static_cast<size_t>(g.n()), 0);
    for (size_t i = 0; i < centers.size(); ++i) rank[static_cast<size_t>(centers[i])] = static_cast<int>(i);

    int center = -1;
    while (center < 0) {
        int leader = -1;
        for (int c : centers) {
            if (exhausted[static_cast<size_t>(c)]) continue;
            if (leader < 0 || seen_by[static_cast<size_t>(c)].size() > seen_by[static_cast<size_t>(leader)].size())
                leader = c;
        }
        if (leader < 0) return std::nullopt;
        VertexSet pool = g.neighborhood(leader).intersect(u2);
        std::optional<Clique> s;
        if (pool.size() >= r - 1) s = try_find_popular_clique(g, pool, {u1}, r - 1, delta, rng(), opts.search);
        if (!s) {
            exhausted[static_cast<size_t>(leader)] = 1;
            continue;
        }
        int idx = static_cast<int>(matching.size());
        matching.push_back(s->vertices());
        u2 = u2.minus(s->vertices());
        Bits common = g.full_mask();
        for (int v : s->vertices()) common &= g.row(v);
        for (int c : centers) {
            if (!common.test(c)) continue;
            auto& list = seen_by[static_cast<size_t>(c)];
            list.push_back(idx);
            if (static_cast<int>(list.size()) >= delta && (center < 0 || rank[static_cast<size_t>(c)] < rank[static_cast<size_t>(center)]))
                center = c;
        }
    }

    Star star{center, {}, {}};
    std::vector<char> used(static_cast<size_t>(g.n()), 0);
    for (int idx : seen_by[static_cast<size_t>(center)]) {
        if (static_cast<int>(star.cliques.size()) == delta) break;
        const VertexSet& s = matching[static_cast<size_t>(idx)];
        auto options = shuffled(common_neighbors(g, s, u1), rng);
        auto pick = std::find_if(options.begin(), options.end(), [&](int u) { return !used[static_cast<size_t>(u)]; });
        if (pick == options.end()) return std::nullopt;  // unreachable: each clique has δ choices
        used[static_cast<size_t>(*pick)] = 1;
        star.cliques.push_back(s);
        star.leaves.push_back(*pick);
    }
    return star;
}

DiamondTree star_tree(int r, const Star& s) {
    DiamondTree d;
    d.r = r;
    d.removable.push_back(s.center);
    for (size_t i = 0; i < s.leaves.size(); ++i) {
        d.removable.push_back(s.leaves[i]);
        d.aux_edges.push_back({0, static_cast<int>(i) + 1});
        d.interior.push_back(s.cliques[i]);
    }
    return d;
}

}  // namespace

DiamondTree build_diamond_star(const Graph& g, const VertexSet& u0, const VertexSet& u1, const VertexSet& u2,
                               int r, int delta, uint64_t seed, const BuildOptions& opts) {
    if (!u0.disjoint(u1) || !u0.disjoint(u2) || !u1.disjoint(u2))
        throw Error(ErrorKind::InvalidSpec, "diamond star sets must be disjoint");
    if (r < 2 || delta < 0) throw Error(ErrorKind::InvalidSpec, "diamond star needs r >= 2 and delta >= 0");
    Rng rng(seed);
    auto star = grow_star(g, u0.items(), u1, u2, r, delta, rng, opts);
    if (!star) throw Error(ErrorKind::ConstructionFailed, "could not grow a diamond star of the requested order");
    return star_tree(r, *star);
}

DiamondTree build_scattered_tree(const Graph& g, const VertexSet& u, const VertexSet& w, int r, int z, int delta,
                                 uint64_t seed, const BuildOptions& opts) {
    if (!u.disjoint(w)) throw Error(ErrorKind::InvalidSpec, "scattered tree needs disjoint u and w");
    if (z < 2 || delta < 1) throw Error(ErrorKind::InvalidSpec, "scattered tree needs z >= 2 and delta >= 1");
    if (u.size() < z) throw Error(ErrorKind::ConstructionFailed, "u is smaller than the target order");
    Rng rng(seed);

    struct Tree {
        DiamondTree d;
        int last_grown = -1;
        bool alive = true;
    };
    const int pool = std::min(u.size(), std::max(z, u.size() / (4 * r)));
    std::vector<Tree> trees;
    std::vector<int> owner(static_cast<size_t>(g.n()), -1);
    std::vector<char> used_w(static_cast<size_t>(g.n()), 0);
    auto order = shuffled(u, rng);
    int pooled = 0;
    for (int i = 0; i < pool; ++i) {
        DiamondTree d;
        d.r = r;
        d.removable = {order[static_cast<size_t>(i)]};
        owner[static_cast<size_t>(order[static_cast<size_t>(i)])] = static_cast<int>(trees.size());
        trees.push_back({std::move(d)});
        ++pooled;
    }

    for (int step = 0; step < opts.max_steps; ++step) {
        std::vector<int> by_size;
        for (size_t t = 0; t < trees.size(); ++t)
            if (trees[t].alive) by_size.push_back(static_cast<int>(t));
        std::stable_sort(by_size.begin(), by_size.end(), [&](int a, int b) {
            return trees[static_cast<size_t>(a)].d.order() > trees[static_cast<size_t>(b)].d.order();
        });
        std::vector<int> centers;
        for (int t : by_size)
            for (int v : trees[static_cast<size_t>(t)].d.removable) centers.push_back(v);

        std::vector<int> free_u, free_w;
        for (int v : u)
            if (owner[static_cast<size_t>(v)] < 0) free_u.push_back(v);
        for (int v : w)
            if (!used_w[static_cast<size_t>(v)]) free_w.push_back(v);

        auto star = grow_star(g, centers, VertexSet(free_u), VertexSet(free_w), r, delta, rng, opts);
        if (!star) throw Error(ErrorKind::ConstructionFailed, "scattered growth: no diamond star available");

        const int t = owner[static_cast<size_t>(star->center)];
        Tree& tree = trees[static_cast<size_t>(t)];
        int center_node = static_cast<int>(std::find(tree.d.removable.begin(), tree.d.removable.end(), star->center) -
                                           tree.d.removable.begin());
        for (size_t i = 0; i < star->leaves.size(); ++i) {
            int leaf = star->leaves[i];
            tree.d.aux_edges.push_back({center_node, tree.d.order()});
            tree.d.removable.push_back(leaf);
            tree.d.interior.push_back(star->cliques[i]);
            owner[static_cast<size_t>(leaf)] = t;
            for (int v : star->cliques[i]) used_w[static_cast<size_t>(v)] = 1;
        }
        pooled += static_cast<int>(star->leaves.size());
        tree.last_grown = step;
        if (tree.d.order() >= z) return tree.d;

        while (pooled > 2 * pool) {
            // least recently grown first; never-grown singletons go before anything else
            int victim = -1;
            for (size_t i = 0; i < trees.size(); ++i)
                if (trees[i].alive && static_cast<int>(i) != t &&
                    (victim < 0 || trees[i].last_grown < trees[static_cast<size_t>(victim)].last_grown))
                    victim = static_cast<int>(i);
            if (victim < 0) break;
            Tree& dead = trees[static_cast<size_t>(victim)];
            dead.alive = false;
            for (int v : dead.d.removable) owner[static_cast<size_t>(v)] = -1;
            for (const auto& s : dead.d.interior)
                for (int v : s) used_w[static_cast<size_t>(v)] = 0;
            pooled -= dead.d.order();
        }
    }
    throw Error(ErrorKind::ConstructionFailed, "scattered growth exceeded its step budget");
}

FlexibleSelection::FlexibleSelection(const Graph& g, DiamondTree base, VertexSet x, VertexSet y)
    : g_(&g), base_(std::move(base)), x_(std::move(x)), y_(std::move(y)) {
    if (!x_.disjoint(y_)) throw Error(ErrorKind::InvalidSpec, "forced and optional removables overlap");
}

DiamondTree FlexibleSelection::build(const VertexSet& y_prime) const {
    if (!y_prime.subset_of(y_)) throw Error(ErrorKind::InvalidSpec, "y_prime must be a subset of y");
    DiamondTree d = restrict_to(base_, x_.unite(y_prime));
    auto report = validate_diamond_tree(*g_, d);
    if (!report) throw Error(ErrorKind::ConstructionFailed, "pruned tree invalid: " + report.clause);
    return d;
}

FlexibleSelection select_flexible_removable(const Graph& g, const VertexSet& u, const VertexSet& w, int r, int z,
                                            int delta, uint64_t seed, const BuildOptions& opts) {
    if (z < 2) throw Error(ErrorKind::InvalidSpec, "flexible selection needs z >= 2");
    if (!u.disjoint(w)) throw Error(ErrorKind::InvalidSpec, "flexible selection needs disjoint u and w");
    auto first_leaves = [](const DiamondTree& d, const VertexSet& x, int count) {
        VertexSet leaves = d.removables().minus(x);
        if (leaves.size() < count) throw Error(ErrorKind::ConstructionFailed, "not enough leaves for y");
        return leaves.prefix(count);
    };
    if (z <= delta) {
        const int half = u.size() / 2;
        VertexSet u0 = u.prefix(half);
        VertexSet u1 = u.minus(u0);
        DiamondTree star = build_diamond_star(g, u0, u1, w, r, delta, seed, opts);
        VertexSet x{star.removable.front()};
        VertexSet y = first_leaves(star, x, z - 1);
        return FlexibleSelection(g, std::move(star), std::move(x), std::move(y));
    }
    DiamondTree tree = build_scattered_tree(g, u, w, r, z, delta, seed, opts);
    VertexSet x = tree.non_leaves();
    VertexSet y = first_leaves(tree, x, z - x.size());
    return FlexibleSelection(g, std::move(tree), std::move(x), std::move(y));
}

std::string diamond_to_json(const DiamondTree& d) {
    nlohmann::json j;
    j["r"] = d.r;
    j["aux_edges"] = nlohmann::json::array();
    for (auto [a, b] : d.aux_edges) j["aux_edges"].push_back({a, b});
    j["removable"] = d.removable;
    j["interior"] = nlohmann::json::array();
    for (const auto& s : d.interior) j["interior"].push_back(s.items());
    return j.dump();
}

DiamondTree diamond_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        DiamondTree d;
        d.r = j.at("r").get<int>();
        for (const auto& e : j.at("aux_edges")) d.aux_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        d.removable = j.at("removable").get<std::vector<int>>();
        for (const auto& s : j.at("interior")) d.interior.emplace_back(s.get<std::vector<int>>());
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad diamond tree json: ") + e.what());
    }
}

}  // namespace kfactor
