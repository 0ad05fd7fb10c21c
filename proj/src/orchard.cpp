#include "kfactor/orchard.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "kfactor/error.hpp"
#include "kfactor/random.hpp"

namespace kfactor {

Orchard Orchard::of_vertices(const VertexSet& vs, int r) {
    std::vector<DiamondTree> trees;
    for (int v : vs) trees.push_back(DiamondTree{r, {}, {v}, {}});
    return Orchard(std::move(trees));
}

int Orchard::order() const {
    int m = 0;
    for (const auto& t : trees_) m = (m == 0) ? t.order() : std::min(m, t.order());
    return m;
}

VertexSet Orchard::vertices() const {
    std::vector<int> all;
    for (const auto& t : trees_) {
        auto v = t.vertices();
        all.insert(all.end(), v.begin(), v.end());
    }
    return VertexSet(all);
}

VertexSet Orchard::removables() const {
    std::vector<int> all;
    for (const auto& t : trees_) all.insert(all.end(), t.removable.begin(), t.removable.end());
    return VertexSet(all);
}

Orchard Orchard::subset(const std::vector<int>& indices) const {
    std::vector<DiamondTree> out;
    for (int i : indices) out.push_back(trees_.at(static_cast<size_t>(i)));
    return Orchard(std::move(out));
}

Orchard Orchard::without(const std::vector<int>& indices) const {
    std::vector<char> drop(trees_.size(), 0);
    for (int i : indices) drop.at(static_cast<size_t>(i)) = 1;
    std::vector<DiamondTree> out;
    for (size_t i = 0; i < trees_.size(); ++i)
        if (!drop[i]) out.push_back(trees_[i]);
    return Orchard(std::move(out));
}

ValidationReport validate_orchard(const Graph& g, const Orchard& o) {
    std::vector<char> seen(static_cast<size_t>(g.n()), 0);
    const int m = o.order();
    for (const auto& t : o.trees()) {
        auto rep = validate_diamond_tree(g, t);
        if (!rep) return rep;
        if (t.order() > 2 * m) return {false, "orchard order", "tree order above twice the minimum"};
        for (int v : t.vertices()) {
            if (seen[static_cast<size_t>(v)]) return {false, "orchard disjointness", "trees share a vertex"};
            seen[static_cast<size_t>(v)] = 1;
        }
    }
    return {};
}

Orchard grow_orchard(const Graph& g, const VertexSet& u, const VertexSet& w, int r, int k, int z, int delta,
                     uint64_t seed, const BuildOptions& opts) {
    if (z < 1 || k < 0) throw Error(ErrorKind::InvalidSpec, "orchard needs z >= 1 and k >= 0");
    if (!u.disjoint(w)) throw Error(ErrorKind::InvalidSpec, "orchard needs disjoint u and w");
    Rng rng(seed);
    VertexSet free_u = u, free_w = w;
    std::vector<DiamondTree> trees;
    for (int i = 0; i < k; ++i) {
        if (z == 1) {
            if (free_u.empty()) throw Error(ErrorKind::ConstructionFailed, "ran out of vertices for the orchard");
            int v = free_u[std::uniform_int_distribution<int>(0, free_u.size() - 1)(rng)];
            trees.push_back(DiamondTree{r, {}, {v}, {}});
            free_u.erase(v);
            continue;
        }
        auto sel = select_flexible_removable(g, free_u, free_w, r, z, std::max(1, delta), rng(), opts);
        DiamondTree d = sel.build(sel.y());
        free_u = free_u.minus(d.removables());
        free_w = free_w.minus(d.vertices());
        trees.push_back(std::move(d));
    }
    return Orchard(std::move(trees));
}

Hypergraph KrHypergraph::as_hypergraph() const {
    std::vector<std::vector<int>> es;
    for (const auto& e : edges) es.push_back(e.trees);
    return Hypergraph(k, r, std::move(es));
}

namespace {

// First clique with one vertex from each tree's removables, by DFS over positions.
bool find_witness(const Graph& g, const std::vector<const Bits*>& sets, std::vector<int>& out) {
    const size_t r = sets.size();
    std::function<bool(size_t, const Bits&)> rec = [&](size_t pos, const Bits& common) {
        if (pos == r) return true;
        Bits cand = common & *sets[pos];
        for (int v : cand.to_set()) {
            out.push_back(v);
            if (rec(pos + 1, common & g.row(v))) return true;
            out.pop_back();
        }
        return false;
    };
    out.clear();
    return rec(0, g.full_mask());
}

void for_each_combination(const std::vector<int>& pool, int r, const std::function<void(const std::vector<int>&)>& f) {
    const int n = static_cast<int>(pool.size());
    if (r > n || r <= 0) return;
    std::vector<int> idx(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) idx[static_cast<size_t>(i)] = i;
    std::vector<int> pick(static_cast<size_t>(r));
    for (;;) {
        for (int i = 0; i < r; ++i) pick[static_cast<size_t>(i)] = pool[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        f(pick);
        int i = r - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - r + i) --i;
        if (i < 0) return;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < r; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

}  // namespace

KrHypergraph build_kr_hypergraph(const Graph& g, const Orchard& o, const HypergraphMode& mode) {
    std::vector<int> all(static_cast<size_t>(o.size()));
    for (int i = 0; i < o.size(); ++i) all[static_cast<size_t>(i)] = i;
    return build_kr_hypergraph(g, o, all, mode);
}

KrHypergraph build_kr_hypergraph(const Graph& g, const Orchard& o, const std::vector<int>& alive,
                                 const HypergraphMode& mode) {
    KrHypergraph h;
    h.k = o.size();
    h.r = o.empty() ? 0 : o.tree(0).r;
    h.exhaustive = mode.exhaustive;
    if (o.empty()) return h;
    std::vector<Bits> masks;
    for (const auto& t : o.trees()) masks.push_back(g.mask(t.removables()));
    std::vector<int> sorted_alive = alive;
    std::sort(sorted_alive.begin(), sorted_alive.end());
    Rng rng(mode.seed);
    SearchOptions sopts;
    sopts.restarts = mode.restarts;
    sopts.node_budget = 0;
    std::vector<int> witness;
    std::vector<const Bits*> sets(static_cast<size_t>(h.r));
    for_each_combination(sorted_alive, h.r, [&](const std::vector<int>& pick) {
        if (mode.exhaustive) {
            for (int j = 0; j < h.r; ++j) sets[static_cast<size_t>(j)] = &masks[static_cast<size_t>(pick[static_cast<size_t>(j)])];
            if (find_witness(g, sets, witness)) h.edges.push_back({pick, witness});
            return;
        }
        TraversalQuery q;
        q.r_star = h.r;
        for (int i : pick) q.sets.push_back(o.tree(i).removables());
        auto c = try_find_traversing_clique(g, q, rng(), sopts);
        if (!c) return;
        std::vector<int> wit;
        for (int i : pick)
            for (int v : c->vertices())
                if (o.tree(i).removables().contains(v)) {
                    wit.push_back(v);
                    break;
                }
        h.edges.push_back({pick, wit});
    });
    return h;
}

std::vector<VertexSet> matching_to_factor(const Orchard& o, const std::vector<KrEdge>& matching) {
    std::vector<char> used(static_cast<size_t>(o.size()), 0);
    std::vector<VertexSet> out;
    for (const auto& e : matching) {
        if (e.trees.size() != e.witness.size()) throw Error(ErrorKind::InvalidSpec, "witness does not match edge");
        for (int i : e.trees) {
            if (i < 0 || i >= o.size()) throw Error(ErrorKind::InvalidSpec, "edge names a tree outside the orchard");
            if (used[static_cast<size_t>(i)]) throw Error(ErrorKind::NotAMatching, "tree used by two edges");
            used[static_cast<size_t>(i)] = 1;
        }
        out.push_back(VertexSet(e.witness));
        for (size_t j = 0; j < e.trees.size(); ++j) {
            auto part = extract_factor_without(o.tree(e.trees[j]), e.witness[j]);
            out.insert(out.end(), part.begin(), part.end());
        }
    }
    return out;
}

VertexSet absorption_bad_set(const Graph& g, const Orchard& big, double p, int r) {
    const int parts = 2 * (r - 1);
    std::vector<std::vector<int>> y(static_cast<size_t>(parts));
    for (int i = 0; i < big.size(); ++i) {
        const auto& rem = big.tree(i).removable;
        auto& part = y[static_cast<size_t>(i % parts)];
        part.insert(part.end(), rem.begin(), rem.end());
    }
    std::vector<Bits> masks;
    for (const auto& part : y) masks.push_back(g.mask(VertexSet(part)));
    VertexSet in_big = big.vertices();
    std::vector<int> bad;
    for (int v = 0; v < g.n(); ++v) {
        if (in_big.contains(v)) continue;
        for (size_t j = 0; j < masks.size(); ++j)
            if (Bits::and_count(g.row(v), masks[j]) < p * static_cast<double>(y[j].size()) / 2.0) {
                bad.push_back(v);
                break;
            }
    }
    return VertexSet(bad);
}

AbsorptionResult absorb_orchard(const Graph& g, const Orchard& big, const Orchard& small, int r, uint64_t seed,
                                const AbsorbParams& params) {
    AbsorptionResult res;
    const double n = g.n();
    const double p = params.p > 0 ? params.p : (n > 0 ? 2.0 * static_cast<double>(g.edge_count()) / (n * n) : 0.0);
    const int parts = 2 * (r - 1);
    const int K = big.size(), k = small.size();
    res.bad_set = absorption_bad_set(g, big, p, r);
    VertexSet small_vertices = small.vertices();
    if (!small_vertices.disjoint(big.vertices()))
        throw Error(ErrorKind::InvalidSpec, "absorbed orchard overlaps the absorbing orchard");
    res.avoids_bad_set = small_vertices.disjoint(res.bad_set);
    res.size_constraint = static_cast<long long>(k) * 8 * r <= K;
    res.order_constraint = static_cast<long long>(k) * big.order() <= static_cast<long long>(small.order()) * K;
    if (small.empty()) return res;

    std::vector<char> taken(static_cast<size_t>(K), 0);
    std::vector<int> owner(static_cast<size_t>(g.n()), -1);
    for (int i = 0; i < K; ++i)
        for (int v : big.tree(i).removable) owner[static_cast<size_t>(v)] = i;

    struct Tuple {
        int small_index;
        std::vector<int> clique;  // q first, then one removable per part
    };
    std::vector<Tuple> served;
    std::vector<int> pending(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) pending[static_cast<size_t>(i)] = i;

    for (int round = 1; round <= 2; ++round) {
        const int first_part = round == 1 ? 0 : r - 1;
        std::vector<int> left;
        for (int idx : pending) {
            TraversalQuery q;
            q.r_star = r;
            q.sets.push_back(small.tree(idx).removables());
            for (int j = 0; j < r - 1; ++j) {
                std::vector<int> z;
                for (int i = first_part + j; i < K; i += parts)
                    if (!taken[static_cast<size_t>(i)])
                        z.insert(z.end(), big.tree(i).removable.begin(), big.tree(i).removable.end());
                q.sets.emplace_back(z);
            }
            auto c = try_find_traversing_clique(g, q, mix_seed(seed, static_cast<uint64_t>(round * 1000003 + idx)),
                                                params.search);
            if (!c) {
                if (round == 2)
                    throw Error(ErrorKind::Failed, "no traversing clique for absorbed tree " + std::to_string(idx), 2,
                                idx);
                left.push_back(idx);
                continue;
            }
            Tuple t{idx, {}};
            for (const auto& set : q.sets)
                for (int v : c->vertices())
                    if (set.contains(v)) {
                        t.clique.push_back(v);
                        break;
                    }
            for (size_t j = 1; j < t.clique.size(); ++j) taken[static_cast<size_t>(owner[static_cast<size_t>(t.clique[j])])] = 1;
            if (round == 2) ++res.served_in_round_two;
            served.push_back(std::move(t));
        }
        pending = std::move(left);
        if (pending.empty()) break;
    }

    for (const auto& t : served) {
        res.factor.push_back(VertexSet(t.clique));
        auto part = extract_factor_without(small.tree(t.small_index), t.clique[0]);
        res.factor.insert(res.factor.end(), part.begin(), part.end());
        for (size_t j = 1; j < t.clique.size(); ++j) {
            int tree = owner[static_cast<size_t>(t.clique[j])];
            res.used.push_back(tree);
            auto more = extract_factor_without(big.tree(tree), t.clique[j]);
            res.factor.insert(res.factor.end(), more.begin(), more.end());
        }
    }
    std::sort(res.used.begin(), res.used.end());
    return res;
}

namespace {

std::vector<KrEdge> match_alive(const KrHypergraph& full, const std::vector<int>& alive, uint64_t seed) {
    std::vector<int> relabel(static_cast<size_t>(full.k), -1);
    for (size_t i = 0; i < alive.size(); ++i) relabel[static_cast<size_t>(alive[i])] = static_cast<int>(i);
    std::vector<int> kept;
    std::vector<std::vector<int>> edges;
    for (size_t e = 0; e < full.edges.size(); ++e) {
        std::vector<int> mapped;
        for (int t : full.edges[e].trees)
            if (relabel[static_cast<size_t>(t)] >= 0) mapped.push_back(relabel[static_cast<size_t>(t)]);
        if (mapped.size() != full.edges[e].trees.size()) continue;
        kept.push_back(static_cast<int>(e));
        edges.push_back(std::move(mapped));
    }
    if (alive.empty() || edges.empty()) return {};
    Hypergraph h(static_cast<int>(alive.size()), full.r, std::move(edges));
    std::vector<int> all(static_cast<size_t>(h.edge_count()));
    for (int i = 0; i < h.edge_count(); ++i) all[static_cast<size_t>(i)] = i;

    Rng rng(seed);
    std::vector<int> best;
    for (int pass = 0; pass < 32; ++pass) {
        auto m = greedy_low_degree_matching(h, all, rng());
        if (m.size() > best.size()) best = std::move(m);
    }
    // The sparsifier route needs a perfect fractional matching; skip it when H is too large to solve quickly.
    if (h.edge_count() <= 20000 && static_cast<int>(best.size()) * h.r() < h.n() - (h.n() % h.r())) {
        try {
            auto fam = greedy_pfm_family(h, 4, default_theta(4), {h.n() <= 30 ? LpMode::Auto : LpMode::Floating});
            auto sparse = sparsified_almost_matching(h, fam, rng());
            if (sparse.edges.size() > best.size()) best = sparse.edges;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Stalled) throw;
        }
    }
    std::vector<KrEdge> out;
    for (int e : best) out.push_back(full.edges[static_cast<size_t>(kept[static_cast<size_t>(e)])]);
    return out;
}

}  // namespace

std::vector<KrEdge> shrink_matching(const Graph& g, const Orchard& o, const std::vector<int>& alive, uint64_t seed,
                                    const HypergraphMode& mode) {
    KrHypergraph h = build_kr_hypergraph(g, o, alive, mode);
    return match_alive(h, alive, seed);
}

ShrinkReport test_shrinkability(const Graph& g, const Orchard& o, const std::vector<int>& q, double gamma,
                                int trials, uint64_t seed, const HypergraphMode& mode) {
    if (gamma <= 0.0 || gamma >= 1.0) throw Error(ErrorKind::InvalidSpec, "gamma must lie in (0, 1)");
    for (int i : q)
        if (i < 0 || i >= o.size()) throw Error(ErrorKind::InvalidSpec, "q must index trees of the orchard");
    ShrinkReport rep;
    const int k = o.size();
    rep.threshold = static_cast<int>(std::ceil(std::pow(static_cast<double>(k), 1.0 - gamma) - 1e-12));
    KrHypergraph full = build_kr_hypergraph(g, o, mode);
    Rng rng(seed);
    std::vector<char> in_q(static_cast<size_t>(k), 0);
    for (int i : q) in_q[static_cast<size_t>(i)] = 1;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<int> alive;
        int removed = 0;
        for (int i = 0; i < k; ++i) {
            if (in_q[static_cast<size_t>(i)] && (rng() & 1)) {
                ++removed;
                continue;
            }
            alive.push_back(i);
        }
        auto m = match_alive(full, alive, rng());
        int uncovered = static_cast<int>(alive.size()) - static_cast<int>(m.size()) * std::max(1, full.r);
        rep.uncovered.push_back(uncovered);
        rep.removed.push_back(removed);
        if (uncovered > rep.threshold) rep.all_pass = false;
    }
    return rep;
}

std::string orchard_to_json(const Orchard& o) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& t : o.trees()) j.push_back(nlohmann::json::parse(diamond_to_json(t)));
    return j.dump();
}

Orchard orchard_from_json(const std::string& text) {
    try {
        std::vector<DiamondTree> trees;
        for (const auto& t : nlohmann::json::parse(text)) trees.push_back(diamond_from_json(t.dump()));
        return Orchard(std::move(trees));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad orchard json: ") + e.what());
    }
}

std::string kr_hypergraph_to_json(const KrHypergraph& h) {
    nlohmann::json j;
    j["k"] = h.k;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : h.edges) j["edges"].push_back(e.trees);
    return j.dump();
}

}  // namespace kfactor
