#include "kfactor/absorber.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "kfactor/bipartite.hpp"
#include "kfactor/error.hpp"
#include "kfactor/factor.hpp"
#include "kfactor/random.hpp"

namespace kfactor {

Template::Template(int t, std::vector<std::pair<int, int>> edges) : t_(t), edges_(std::move(edges)) {
    if (t < 1) throw Error(ErrorKind::InvalidSpec, "template flexibility must be positive");
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    i_adj_.assign(static_cast<size_t>(i_count()), {});
    j_adj_.assign(static_cast<size_t>(j_count()), {});
    for (auto [i, j] : edges_) {
        if (i < 0 || i >= i_count() || j < 0 || j >= j_count())
            throw Error(ErrorKind::InvalidSpec, "template edge out of range");
        i_adj_[static_cast<size_t>(i)].push_back(j);
        j_adj_[static_cast<size_t>(j)].push_back(i);
    }
}

int Template::max_degree() const {
    size_t d = 0;
    for (const auto& a : i_adj_) d = std::max(d, a.size());
    for (const auto& a : j_adj_) d = std::max(d, a.size());
    return static_cast<int>(d);
}

std::optional<std::vector<std::pair<int, int>>> Template::matching_without(const std::vector<int>& removed) const {
    std::vector<int> slot(static_cast<size_t>(j_count()), 0);
    for (int j : removed) slot[static_cast<size_t>(j)] = -1;
    std::vector<int> right;
    for (int j = 0; j < j_count(); ++j)
        if (slot[static_cast<size_t>(j)] == 0) {
            slot[static_cast<size_t>(j)] = static_cast<int>(right.size());
            right.push_back(j);
        }
    if (static_cast<int>(right.size()) != i_count()) return std::nullopt;
    std::vector<std::vector<int>> adj(static_cast<size_t>(i_count()));
    for (int i = 0; i < i_count(); ++i)
        for (int j : i_adj_[static_cast<size_t>(i)])
            if (slot[static_cast<size_t>(j)] >= 0) adj[static_cast<size_t>(i)].push_back(slot[static_cast<size_t>(j)]);
    auto match = max_bipartite_matching(i_count(), static_cast<int>(right.size()), adj);
    if (matching_size(match) != i_count()) return std::nullopt;
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < i_count(); ++i) out.emplace_back(i, right[static_cast<size_t>(match[static_cast<size_t>(i)])]);
    return out;
}

namespace {

bool has_perfect_matching(const std::vector<std::vector<int>>& i_adj, int t, const std::vector<int>& removed) {
    const int js = 4 * t;
    std::vector<int> slot(static_cast<size_t>(js), 0);
    for (int j : removed) slot[static_cast<size_t>(j)] = -1;
    int next = 0;
    for (int j = 0; j < js; ++j)
        if (slot[static_cast<size_t>(j)] == 0) slot[static_cast<size_t>(j)] = next++;
    std::vector<std::vector<int>> adj(i_adj.size());
    for (size_t i = 0; i < i_adj.size(); ++i)
        for (int j : i_adj[i])
            if (slot[static_cast<size_t>(j)] >= 0) adj[i].push_back(slot[static_cast<size_t>(j)]);
    return matching_size(max_bipartite_matching(static_cast<int>(i_adj.size()), next, adj)) ==
           static_cast<int>(i_adj.size());
}

// All t-subsets of J2 = {2t, ..., 4t-1}, lexicographic.
std::vector<std::vector<int>> flexible_subsets(int t) {
    std::vector<std::vector<int>> out;
    std::vector<int> c(static_cast<size_t>(t));
    std::iota(c.begin(), c.end(), 0);
    const int n = 2 * t;
    while (true) {
        std::vector<int> s;
        for (int x : c) s.push_back(2 * t + x);
        out.push_back(std::move(s));
        int i = t - 1;
        while (i >= 0 && c[static_cast<size_t>(i)] == n - t + i) --i;
        if (i < 0) break;
        ++c[static_cast<size_t>(i)];
        for (int k = i + 1; k < t; ++k) c[static_cast<size_t>(k)] = c[static_cast<size_t>(k - 1)] + 1;
    }
    return out;
}

double binomial(int n, int k) {
    double b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

TemplateCheck check_subsets(const std::vector<std::vector<int>>& i_adj, int t,
                            const std::vector<std::vector<int>>& subsets, bool exhaustive) {
    TemplateCheck res;
    res.exhaustive = exhaustive;
    const size_t total = subsets.size();
    std::atomic<size_t> first_fail{total};
    std::atomic<long long> checked{0};
    auto work = [&](size_t lo, size_t hi) {
        for (size_t s = lo; s < hi && s < first_fail.load(); ++s) {
            checked.fetch_add(1);
            if (!has_perfect_matching(i_adj, t, subsets[s])) {
                size_t cur = first_fail.load();
                while (s < cur && !first_fail.compare_exchange_weak(cur, s)) {
                }
                return;
            }
        }
    };
    const size_t threads = total < 512 ? 1 : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    if (threads == 1) {
        work(0, total);
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (total + threads - 1) / threads;
        for (size_t k = 0; k < threads; ++k) pool.emplace_back(work, k * chunk, std::min(total, (k + 1) * chunk));
        for (auto& th : pool) th.join();
    }
    res.checked = checked.load();
    if (first_fail.load() < total) {
        res.ok = false;
        res.failing_subset = subsets[first_fail.load()];
    }
    return res;
}

std::vector<std::vector<int>> adjacency_of(const Template& tpl) {
    std::vector<std::vector<int>> adj;
    for (int i = 0; i < tpl.i_count(); ++i) adj.push_back(tpl.j_neighbors(i));
    return adj;
}

Template from_adjacency(int t, const std::vector<std::vector<int>>& adj) {
    std::vector<std::pair<int, int>> edges;
    for (size_t i = 0; i < adj.size(); ++i)
        for (int j : adj[i]) edges.emplace_back(static_cast<int>(i), j);
    return Template(t, std::move(edges));
}

// DFS over I-neighbourhoods (nondecreasing choice index). Unassigned I vertices act as wildcards
// adjacent to all of J, so a failing partial assignment can never be completed.
std::optional<Template> brute_force_template(int t, int max_deg) {
    const int js = 4 * t, is = 3 * t;
    auto subsets = flexible_subsets(t);
    std::vector<int> all_j(static_cast<size_t>(js));
    std::iota(all_j.begin(), all_j.end(), 0);
    for (int d = 1; d <= std::min(max_deg, js); ++d) {
        std::vector<std::vector<int>> choices;
        for (int size = 1; size <= d; ++size) {
            std::vector<int> c(static_cast<size_t>(size));
            std::iota(c.begin(), c.end(), 0);
            while (true) {
                choices.push_back(c);
                int i = size - 1;
                while (i >= 0 && c[static_cast<size_t>(i)] == js - size + i) --i;
                if (i < 0) break;
                ++c[static_cast<size_t>(i)];
                for (int k = i + 1; k < size; ++k) c[static_cast<size_t>(k)] = c[static_cast<size_t>(k - 1)] + 1;
            }
        }
        std::vector<std::vector<int>> adj(static_cast<size_t>(is), all_j);
        std::vector<int> jdeg(static_cast<size_t>(js), 0);
        auto feasible = [&]() {
            for (const auto& s : subsets)
                if (!has_perfect_matching(adj, t, s)) return false;
            return true;
        };
        std::function<bool(int, size_t)> dfs = [&](int i, size_t from) -> bool {
            if (i == is) return true;
            for (size_t c = from; c < choices.size(); ++c) {
                const auto& ch = choices[c];
                bool over = false;
                for (int j : ch) over |= jdeg[static_cast<size_t>(j)] + 1 > max_deg;
                if (over) continue;
                adj[static_cast<size_t>(i)] = ch;
                for (int j : ch) ++jdeg[static_cast<size_t>(j)];
                if (feasible() && dfs(i + 1, c)) return true;
                for (int j : ch) --jdeg[static_cast<size_t>(j)];
            }
            adj[static_cast<size_t>(i)] = all_j;
            return false;
        };
        if (dfs(0, 0)) return from_adjacency(t, adj);
    }
    return std::nullopt;
}

// Each I vertex takes d of the currently least-loaded J vertices, ties broken at random.
std::vector<std::vector<int>> balanced_random_adjacency(int t, int d, Rng& rng) {
    const int js = 4 * t;
    std::vector<int> load(static_cast<size_t>(js), 0);
    std::vector<std::vector<int>> adj(static_cast<size_t>(3 * t));
    std::vector<int> order(static_cast<size_t>(js));
    for (auto& nb : adj) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return load[static_cast<size_t>(a)] < load[static_cast<size_t>(b)]; });
        nb.assign(order.begin(), order.begin() + std::min(d, js));
        std::sort(nb.begin(), nb.end());
        for (int j : nb) ++load[static_cast<size_t>(j)];
    }
    return adj;
}

}  // namespace

TemplateCheck verify_template(const Template& tpl, const TemplateVerifyMode& mode) {
    const int t = tpl.t();
    auto adj = adjacency_of(tpl);
    if (mode.exhaustive) {
        if (binomial(2 * t, t) > 2e6)
            throw Error(ErrorKind::TooLargeForExhaustive, "too many flexible subsets for exhaustive verification");
        return check_subsets(adj, t, flexible_subsets(t), true);
    }
    Rng rng(mode.seed);
    VertexSet j2 = VertexSet::range(2 * t, 4 * t);
    std::vector<std::vector<int>> subsets;
    for (int s = 0; s < mode.samples; ++s) subsets.push_back(random_subset(j2, t, rng).items());
    return check_subsets(adj, t, subsets, false);
}

Template build_template(int t, int max_deg, uint64_t seed) {
    if (t < 2) throw Error(ErrorKind::InvalidSpec, "templates need flexibility t >= 2");
    if (max_deg < 1) throw Error(ErrorKind::InvalidSpec, "template degree cap must be positive");
    if (t == 2) {
        if (auto tpl = brute_force_template(t, max_deg)) return *tpl;
        throw Error(ErrorKind::SearchExhausted, "no flexibility-2 template within the degree cap");
    }
    const auto mode = t <= 6 ? TemplateVerifyMode::full() : TemplateVerifyMode::sampled(1000, mix_seed(seed, 7));
    Rng rng(seed);
    for (int d = 2; d <= std::min(max_deg, 4 * t); ++d) {
        for (int attempt = 0; attempt < 40; ++attempt) {
            Template tpl = from_adjacency(t, balanced_random_adjacency(t, d, rng));
            if (tpl.max_degree() <= max_deg && verify_template(tpl, mode)) return tpl;
        }
    }
    // I_0..I_{2t-1} paired with J1, the remaining t joined to all of J2; max degree 2t.
    if (2 * t <= max_deg) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < 2 * t; ++i) edges.emplace_back(i, i);
        for (int i = 2 * t; i < 3 * t; ++i)
            for (int j = 2 * t; j < 4 * t; ++j) edges.emplace_back(i, j);
        Template tpl(t, std::move(edges));
        if (verify_template(tpl, mode)) return tpl;
    }
    throw Error(ErrorKind::SearchExhausted, "template search exhausted for t = " + std::to_string(t));
}

std::string template_to_json(const Template& tpl) {
    nlohmann::json j;
    j["t"] = tpl.t();
    j["edges"] = nlohmann::json::array();
    for (auto [i, jj] : tpl.edges()) j["edges"].push_back({i, jj});
    return j.dump();
}

Template template_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        return Template(j.at("t").get<int>(), std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad template json: ") + e.what());
    }
}

IntersectingTree build_intersecting_tree(const Graph& g, const VertexSet& w, const std::vector<VertexSet>& targets,
                                         int r, uint64_t seed, const IntersectOptions& opts) {
    if (targets.empty()) throw Error(ErrorKind::EmptyQuery, "no target sets to intersect");
    VertexSet all;
    std::vector<int> owner(static_cast<size_t>(g.n()), -1);
    for (size_t i = 0; i < targets.size(); ++i) {
        if (!targets[i].disjoint(all) || !targets[i].disjoint(w))
            throw Error(ErrorKind::InvalidSpec, "targets must be disjoint from each other and from w");
        all = all.unite(targets[i]);
        for (int v : targets[i]) owner[static_cast<size_t>(v)] = static_cast<int>(i);
    }
    const double n = g.n();
    const int ell = static_cast<int>(targets.size());
    int z = opts.z > 0 ? opts.z : std::max(2, (all.size() + 4 * r - 1) / (4 * r));
    int delta = opts.delta;
    if (delta <= 0) {
        const double p = g.density();
        delta = std::min(z, std::max(1, static_cast<int>(std::pow(p, r - 1) * w.size() / 8.0)));
    }
    FlexibleSelection sel = select_flexible_removable(g, all, w, r, z, delta, seed, opts.build);

    // Y' keeps the first Y vertex of each target that Y meets.
    std::vector<char> taken(targets.size(), 0);
    std::vector<int> y_prime;
    for (int y : sel.y()) {
        int o = owner[static_cast<size_t>(y)];
        if (!taken[static_cast<size_t>(o)]) {
            taken[static_cast<size_t>(o)] = 1;
            y_prime.push_back(y);
        }
    }
    IntersectingTree out;
    out.tree = sel.build(VertexSet(y_prime));
    out.required_hits = (ell + 4 * r - 1) / (4 * r);
    out.order_cap = opts.order_cap > 0 ? opts.order_cap : static_cast<int>(std::pow(n, 2.0 / 3.0));
    out.per_target_cap = opts.per_target_cap > 0 ? opts.per_target_cap : std::max(1, static_cast<int>(std::pow(n, 1.0 / 6.0)));
    std::vector<char> hit(targets.size(), 0);
    for (int v : out.tree.removable) hit[static_cast<size_t>(owner[static_cast<size_t>(v)])] = 1;
    for (int i = 0; i < ell; ++i)
        if (hit[static_cast<size_t>(i)]) out.hit.push_back(i);
    VertexSet vs = out.tree.vertices();
    for (const auto& target : targets) {
        int c = vs.intersect(target).size();
        out.per_target.push_back(c);
        out.heavy_targets += c > out.per_target_cap;
    }
    return out;
}

VertexSet AbsorbingStructure::vertices() const {
    VertexSet v = j_orchard.vertices();
    for (const auto& s : i_cliques) v = v.unite(s);
    return v;
}

Orchard AbsorbingStructure::flexible() const {
    std::vector<int> idx;
    for (int j = 2 * t(); j < 4 * t(); ++j) idx.push_back(j);
    return j_orchard.subset(idx);
}

namespace {

ValidationReport fail(std::string clause, std::string detail) { return {false, std::move(clause), std::move(detail)}; }

}  // namespace

ValidationReport validate_absorbing_structure(const Graph& g, const AbsorbingStructure& a) {
    const int t = a.t(), r = a.r;
    if (static_cast<int>(a.i_cliques.size()) != 3 * t) return fail("i cliques", "need 3t cliques");
    if (a.j_orchard.size() != 4 * t) return fail("j orchard", "need 4t trees");
    VertexSet seen;
    for (int i = 0; i < 3 * t; ++i) {
        const auto& s = a.i_cliques[static_cast<size_t>(i)];
        if (s.size() != r - 1 || !is_clique(g, s)) return fail("i cliques", "S_" + std::to_string(i) + " is not an (r-1)-clique");
        if (!s.disjoint(seen)) return fail("i cliques", "cliques do not form a matching");
        seen = seen.unite(s);
    }
    if (auto rep = validate_orchard(g, a.j_orchard); !rep) return rep;
    for (int j = 0; j < 4 * t; ++j) {
        const auto& d = a.j_orchard.tree(j);
        if (d.r != r) return fail("j orchard", "tree " + std::to_string(j) + " has the wrong r");
        if (d.order() < a.order || d.order() > 2 * a.order)
            return fail("order", "tree " + std::to_string(j) + " order outside [M, 2M]");
    }
    if (!seen.disjoint(a.j_orchard.vertices())) return fail("disjointness", "an I clique meets a J tree");
    for (auto [i, j] : a.tpl.edges()) {
        VertexSet witness = common_neighbors(g, a.i_cliques[static_cast<size_t>(i)], a.j_orchard.tree(j).removables());
        if (witness.empty())
            return fail("template edge", "no removable of D_" + std::to_string(j) + " completes S_" + std::to_string(i));
    }
    if (static_cast<long long>(a.vertices().size()) > 12LL * r * t * a.order)
        return fail("vertex count", "more than 12rtM vertices");
    return {};
}

VertexSet absorbing_bad_set(const Graph& g, const AbsorbingStructure& a, double p) {
    const double n = g.n();
    if (p <= 0) p = n > 0 ? 2.0 * static_cast<double>(g.edge_count()) / (n * n) : 0.0;
    return absorption_bad_set(g, a.flexible(), p, a.r);
}

namespace {

struct Candidates {
    std::vector<VertexSet> cliques;  // S_h
    std::vector<VertexSet> pools;    // X_h
};

Candidates stage_candidates(const Graph& g, const VertexSet& w, int r, int ell, int pool, uint64_t seed,
                            const SearchOptions& search) {
    Candidates c;
    VertexSet free = w;
    Rng rng(seed);
    const int budget = w.size() / 2;
    int spent = 0;
    for (int h = 0; h < ell && spent + r - 1 + pool <= budget; ++h) {
        auto s = try_find_popular_clique(g, free, {free}, r - 1, pool, mix_seed(seed, static_cast<uint64_t>(h)), search);
        if (!s) break;
        VertexSet x = random_subset(common_neighbors(g, s->vertices(), free.minus(s->vertices())), pool, rng);
        free = free.minus(s->vertices()).minus(x);
        spent += r - 1 + pool;
        c.cliques.push_back(s->vertices());
        c.pools.push_back(std::move(x));
    }
    return c;
}

VertexSet interior_vertices(const DiamondTree& d) { return d.vertices().minus(d.removables()); }

// Glue trees side by side; node ids of later trees are offset.
struct Assembly {
    DiamondTree tree;
    int add(const DiamondTree& d) {
        const int offset = tree.order();
        for (int v : d.removable) tree.removable.push_back(v);
        for (size_t e = 0; e < d.aux_edges.size(); ++e) {
            tree.aux_edges.emplace_back(d.aux_edges[e].first + offset, d.aux_edges[e].second + offset);
            tree.interior.push_back(d.interior[e]);
        }
        return offset;
    }
    int add_vertex(int v) {
        tree.removable.push_back(v);
        return tree.order() - 1;
    }
    void link(int a, int b, const VertexSet& interior) {
        tree.aux_edges.emplace_back(a, b);
        tree.interior.push_back(interior);
    }
};

int node_of(const DiamondTree& d, int v, int offset) {
    auto it = std::find(d.removable.begin(), d.removable.end(), v);
    return offset + static_cast<int>(it - d.removable.begin());
}

struct TreeBuild {
    DiamondTree tree;
    std::vector<int> used_candidates;  // h_s
    int subtrees = 0;
};

// One D_j of order exactly M: intersecting sub-trees C_s, a flexible tree D~, and paths
// x_s - z_s - c_s through the interior cliques S'_s and S_{h_s}.
std::optional<TreeBuild> stage_tree(const Graph& g, VertexSet w_free, const Candidates& cand,
                                    const std::vector<VertexSet>& live_pool, const std::vector<int>& alive, int r,
                                    int order, int cap, double alpha, uint64_t seed, const BuildOptions& build) {
    Rng rng(seed);
    const int ell = static_cast<int>(cand.cliques.size());
    const double n = g.n();
    const int heavy_cap = std::max(1, static_cast<int>(std::pow(n, 1.0 / 6.0)));

    struct Sub {
        DiamondTree tree;
        std::vector<int> hit;    // Γ_s
        std::vector<int> light;  // Γ_s minus Φ_s
    };
    std::vector<Sub> subs;
    std::vector<int> gamma;
    for (int h : alive)
        if (!live_pool[static_cast<size_t>(h)].empty()) gamma.push_back(h);
    int spent = 0;
    while (static_cast<double>(gamma.size()) >= alpha * ell / 2.0 && static_cast<int>(subs.size()) < cap &&
           spent + 4 <= order && !gamma.empty()) {
        std::vector<VertexSet> targets;
        int total = 0;
        for (int h : gamma) {
            targets.push_back(live_pool[static_cast<size_t>(h)]);
            total += targets.back().size();
        }
        IntersectOptions io;
        io.z = std::min(std::max(2, (total + 4 * r - 1) / (4 * r)), order - spent - 2);
        io.per_target_cap = heavy_cap;
        io.build = build;
        if (io.z < 2) break;
        IntersectingTree it;
        try {
            it = build_intersecting_tree(g, w_free, targets, r, mix_seed(seed, subs.size() + 11), io);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ConstructionFailed) throw;
            break;
        }
        if (it.hit.empty()) break;
        Sub s{it.tree, {}, {}};
        std::vector<char> drop(gamma.size(), 0);
        for (int idx : it.hit) {
            drop[static_cast<size_t>(idx)] = 1;
            s.hit.push_back(gamma[static_cast<size_t>(idx)]);
            if (it.per_target[static_cast<size_t>(idx)] <= heavy_cap) s.light.push_back(gamma[static_cast<size_t>(idx)]);
        }
        std::vector<int> rest;
        for (size_t k = 0; k < gamma.size(); ++k)
            if (!drop[k]) rest.push_back(gamma[k]);
        gamma = std::move(rest);
        w_free = w_free.minus(interior_vertices(s.tree));
        spent += s.tree.order() + 1;
        subs.push_back(std::move(s));
    }

    const int z0 = order - spent;
    std::vector<int> pieces = shuffled(w_free, rng);
    const size_t third = pieces.size() / 3;
    VertexSet u0(std::vector<int>(pieces.begin(), pieces.begin() + static_cast<long>(third)));
    VertexSet w0(std::vector<int>(pieces.begin() + static_cast<long>(third), pieces.begin() + static_cast<long>(2 * third)));
    VertexSet z_pool(std::vector<int>(pieces.begin() + static_cast<long>(2 * third), pieces.end()));

    std::optional<FlexibleSelection> sel;
    VertexSet fixed, spare;  // anchors already in D~, and Y vertices still selectable
    int capacity = 1;
    if (z0 >= 2) {
        const double p = g.density();
        int delta = std::min(z0, std::max(2, static_cast<int>(std::pow(p, r - 1) * w0.size() / 8.0)));
        try {
            sel.emplace(select_flexible_removable(g, u0, w0, r, z0, delta, mix_seed(seed, 3), build));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ConstructionFailed) throw;
            return std::nullopt;
        }
        fixed = sel->x();
        spare = sel->y();
        capacity = z0 - sel->x().size();
    } else {
        spare = u0;
    }

    VertexSet in_tree;
    for (const auto& s : subs) in_tree = in_tree.unite(s.tree.vertices());
    struct Link {
        VertexSet connector;
        int x = -1, z = -1, c = -1, h = -1;
    };
    std::vector<Link> links;
    VertexSet chosen;
    for (size_t s = 0; s < subs.size(); ++s) {
        std::vector<int> zs;
        for (int h : subs[s].light)
            for (int v : live_pool[static_cast<size_t>(h)])
                if (!in_tree.contains(v)) zs.push_back(v);
        VertexSet zset(zs);
        if (zset.empty()) return std::nullopt;
        VertexSet anchors = fixed.unite(chosen);
        std::optional<Clique> conn;
        const uint64_t cs = mix_seed(seed, 100 + s);
        if (!anchors.empty()) conn = try_find_popular_clique(g, z_pool, {zset, anchors}, r - 1, 1, cs, build.search);
        if (!conn && capacity > 0) conn = try_find_popular_clique(g, z_pool, {zset, spare}, r - 1, 1, cs + 1, build.search);
        if (!conn) return std::nullopt;
        Link l;
        l.connector = conn->vertices();
        VertexSet xs = common_neighbors(g, l.connector, anchors);
        if (xs.empty()) {
            xs = common_neighbors(g, l.connector, spare);
            l.x = xs.front();
            spare.erase(l.x);
            chosen.insert(l.x);
            --capacity;
        } else {
            l.x = xs.front();
        }
        l.z = common_neighbors(g, l.connector, zset).front();
        for (int h : subs[s].light)
            if (live_pool[static_cast<size_t>(h)].contains(l.z)) l.h = h;
        l.c = subs[s].tree.removables().intersect(cand.pools[static_cast<size_t>(l.h)]).front();
        z_pool = z_pool.minus(l.connector);
        in_tree.insert(l.z);
        links.push_back(std::move(l));
    }

    DiamondTree hub;
    if (sel) {
        std::vector<int> y_prime = chosen.items();
        for (int y : sel->y())
            if (static_cast<int>(y_prime.size()) < capacity + chosen.size() && !chosen.contains(y)) y_prime.push_back(y);
        try {
            hub = sel->build(VertexSet(y_prime));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ConstructionFailed) throw;
            return std::nullopt;
        }
    } else {
        int v = chosen.empty() ? shuffled(u0, rng).front() : chosen.front();
        hub = DiamondTree{r, {}, {v}, {}};
    }

    Assembly asmb;
    asmb.tree.r = r;
    asmb.add(hub);
    TreeBuild out;
    for (size_t s = 0; s < subs.size(); ++s) {
        const int offset = asmb.add(subs[s].tree);
        const Link& l = links[s];
        const int zn = asmb.add_vertex(l.z);
        asmb.link(node_of(hub, l.x, 0), zn, l.connector);
        asmb.link(zn, node_of(subs[s].tree, l.c, offset), cand.cliques[static_cast<size_t>(l.h)]);
        out.used_candidates.push_back(l.h);
    }
    out.tree = std::move(asmb.tree);
    out.subtrees = static_cast<int>(subs.size());
    if (out.tree.order() != order || !validate_diamond_tree(g, out.tree)) return std::nullopt;
    return out;
}

}  // namespace

AbsorbingStructure build_absorbing_structure(const Graph& g, const VertexSet& w, int t, int order, uint64_t seed,
                                             const StructureOptions& opts) {
    const int r = opts.r;
    if (r < 3) throw Error(ErrorKind::InvalidSpec, "absorbing structures need r >= 3");
    if (order < 1) throw Error(ErrorKind::InvalidSpec, "structure order must be positive");
    if (w.size() < 7 * t) throw Error(ErrorKind::StageFailed, "w smaller than 7t", 1);

    AbsorbingStructure a;
    a.r = r;
    a.order = order;
    a.tpl = build_template(t, opts.template_max_degree, mix_seed(seed, 1));

    const int ell = opts.candidates > 0 ? opts.candidates : 12 * t;
    const int pool = opts.pool_size > 0 ? opts.pool_size
                                        : std::max(2, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(w.size())) / 2)));
    Candidates cand = stage_candidates(g, w, r, ell, pool, mix_seed(seed, 2), opts.build.search);
    const int found = static_cast<int>(cand.cliques.size());
    if (found < 3 * t)
        throw Error(ErrorKind::StageFailed, "only " + std::to_string(found) + " candidate cliques found", 1);
    a.stats.candidates = found;

    const double alpha = opts.alpha;
    const int cap = opts.max_subtrees > 0
                        ? opts.max_subtrees
                        : static_cast<int>(std::ceil(std::log(2.0 / alpha) / std::log(4.0 * r / (4.0 * r - 1.0))));
    a.stats.subtree_cap = cap;
    const double n = g.n();
    const double kill_at = 2.0 * cap * std::pow(n, 1.0 / 6.0);

    VertexSet reserved;
    for (int h = 0; h < found; ++h) reserved = reserved.unite(cand.cliques[static_cast<size_t>(h)]).unite(cand.pools[static_cast<size_t>(h)]);
    std::vector<VertexSet> live_pool = cand.pools;
    std::vector<char> alive(static_cast<size_t>(found), 1);
    VertexSet used;
    std::vector<DiamondTree> trees;
    for (int j = 0; j < 4 * t; ++j) {
        std::vector<int> alive_idx;
        for (int h = 0; h < found; ++h)
            if (alive[static_cast<size_t>(h)]) alive_idx.push_back(h);
        std::optional<TreeBuild> tb;
        for (int attempt = 0; attempt < 4 && !tb; ++attempt)
            tb = stage_tree(g, w.minus(reserved).minus(used), cand, live_pool, alive_idx, r, order, cap, alpha,
                            mix_seed(seed, 1000ULL * static_cast<uint64_t>(j + 1) + static_cast<uint64_t>(attempt)),
                            opts.build);
        if (!tb) throw Error(ErrorKind::StageFailed, "could not build tree " + std::to_string(j), 2);
        VertexSet vs = tb->tree.vertices();
        used = used.unite(vs);
        int pools_hit = 0;
        VertexSet rem = tb->tree.removables();
        for (int h = 0; h < found; ++h) {
            live_pool[static_cast<size_t>(h)] = live_pool[static_cast<size_t>(h)].minus(vs);
            pools_hit += !rem.disjoint(cand.pools[static_cast<size_t>(h)]);
            if (!vs.disjoint(cand.cliques[static_cast<size_t>(h)]) ||
                cand.pools[static_cast<size_t>(h)].intersect(vs).size() >= kill_at)
                alive[static_cast<size_t>(h)] = 0;
        }
        a.stats.pools_hit.push_back(pools_hit);
        a.stats.cliques_hit.push_back(static_cast<int>(tb->used_candidates.size()));
        a.stats.subtrees.push_back(tb->subtrees);
        trees.push_back(std::move(tb->tree));
    }
    a.j_orchard = Orchard(std::move(trees));

    // Stage 3: I vertices to candidates untouched by the orchard, via bipartite matching.
    std::vector<int> free_h;
    for (int h = 0; h < found; ++h)
        if (cand.cliques[static_cast<size_t>(h)].disjoint(used)) free_h.push_back(h);
    std::vector<std::vector<int>> adj(static_cast<size_t>(3 * t));
    for (int i = 0; i < 3 * t; ++i)
        for (size_t k = 0; k < free_h.size(); ++k) {
            const auto& s = cand.cliques[static_cast<size_t>(free_h[k])];
            bool ok = true;
            for (int j : a.tpl.j_neighbors(i))
                if (common_neighbors(g, s, a.j_orchard.tree(j).removables()).empty()) {
                    ok = false;
                    break;
                }
            if (ok) adj[static_cast<size_t>(i)].push_back(static_cast<int>(k));
        }
    auto match = max_bipartite_matching(3 * t, static_cast<int>(free_h.size()), adj);
    if (matching_size(match) < 3 * t)
        throw Error(ErrorKind::StageFailed, "only " + std::to_string(matching_size(match)) + " of " +
                                                std::to_string(3 * t) + " I vertices could be placed", 3);
    for (int i = 0; i < 3 * t; ++i)
        a.i_cliques.push_back(cand.cliques[static_cast<size_t>(free_h[static_cast<size_t>(match[static_cast<size_t>(i)])])]);

    if (auto rep = validate_absorbing_structure(g, a); !rep)
        throw Error(ErrorKind::StageFailed, "structure failed validation: " + rep.clause + " (" + rep.detail + ")", 3);
    return a;
}

StructureAbsorption absorb(const Graph& g, const AbsorbingStructure& a, const Orchard& rem, uint64_t seed,
                           const AbsorbParams& params) {
    const int r = a.r, t = a.t();
    VertexSet av = a.vertices(), rv = rem.vertices();
    if ((av.size() + rv.size()) % r != 0)
        throw Error(ErrorKind::DivisibilityViolation,
                    std::to_string(av.size() + rv.size()) + " vertices is not a multiple of " + std::to_string(r));
    if (!av.disjoint(rv)) throw Error(ErrorKind::InvalidSpec, "leftover orchard overlaps the absorbing structure");

    StructureAbsorption out;
    out.size_constraint = static_cast<long long>(rem.size()) * 4 * r <= t;
    Orchard flex = a.flexible();
    std::vector<char> taken(static_cast<size_t>(flex.size()), 0);

    if (!rem.empty()) {
        AbsorptionResult ab;
        try {
            ab = absorb_orchard(g, flex, rem, r, seed, params);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Failed) throw;
            throw Error(ErrorKind::Failed, std::string("absorbing the leftover: ") + e.what(), 1, e.secondary());
        }
        out.avoids_bad_set = ab.avoids_bad_set;
        if (static_cast<int>(ab.used.size()) > t)
            throw Error(ErrorKind::Failed, "leftover needs more than t flexible trees", 1, static_cast<int>(ab.used.size()));
        out.factor = std::move(ab.factor);
        for (int f : ab.used) {
            taken[static_cast<size_t>(f)] = 1;
            out.absorbed_into.push_back(2 * t + f);
        }
    }

    Rng rng(mix_seed(seed, 17));
    int step = 0;
    while (static_cast<int>(out.absorbed_into.size() + out.padding.size()) + r <= t) {
        std::vector<int> open;
        for (int f = 0; f < flex.size(); ++f)
            if (!taken[static_cast<size_t>(f)]) open.push_back(f);
        std::optional<Clique> c;
        std::vector<int> owner(static_cast<size_t>(g.n()), -1);
        for (int attempt = 0; attempt < 8 && !c; ++attempt) {
            std::shuffle(open.begin(), open.end(), rng);
            TraversalQuery q;
            q.r_star = r;
            std::vector<std::vector<int>> parts(static_cast<size_t>(r));
            for (size_t k = 0; k < open.size(); ++k) {
                const auto& d = flex.tree(open[k]);
                auto& part = parts[k % static_cast<size_t>(r)];
                part.insert(part.end(), d.removable.begin(), d.removable.end());
            }
            for (auto& part : parts) q.sets.emplace_back(std::move(part));
            c = try_find_traversing_clique(g, q, mix_seed(seed, 1000ULL + 10ULL * static_cast<uint64_t>(step) + attempt),
                                           params.search);
        }
        if (!c) throw Error(ErrorKind::Failed, "no traversing clique among the flexible trees", 2, step);
        for (int f : open)
            for (int v : flex.tree(f).removable) owner[static_cast<size_t>(v)] = f;
        out.factor.push_back(c->vertices());
        for (int v : c->vertices()) {
            const int f = owner[static_cast<size_t>(v)];
            taken[static_cast<size_t>(f)] = 1;
            out.padding.push_back(2 * t + f);
            auto part = extract_factor_without(flex.tree(f), v);
            out.factor.insert(out.factor.end(), part.begin(), part.end());
        }
        ++step;
    }
    // With r | |V(A) ∪ V(rem)| the leftover count is 0 mod r, hence 0.
    const int leftover = t - static_cast<int>(out.absorbed_into.size() + out.padding.size());
    if (leftover != 0)
        throw Error(ErrorKind::Failed, std::to_string(leftover) + " flexible trees left after padding", 2, leftover);

    std::vector<int> removed = out.absorbed_into;
    removed.insert(removed.end(), out.padding.begin(), out.padding.end());
    auto matching = a.tpl.matching_without(removed);
    if (!matching) throw Error(ErrorKind::Failed, "template has no perfect matching for the removed set", 3, -1);
    for (auto [i, j] : *matching) {
        const auto& s = a.i_cliques[static_cast<size_t>(i)];
        const auto& d = a.j_orchard.tree(j);
        VertexSet witness = common_neighbors(g, s, d.removables());
        if (witness.empty()) throw Error(ErrorKind::Failed, "template edge without a clique witness", 3, i);
        out.factor.push_back(s.unite(VertexSet{witness.front()}));
        auto part = extract_factor_without(d, witness.front());
        out.factor.insert(out.factor.end(), part.begin(), part.end());
    }
    out.matching = std::move(*matching);
    if (auto check = check_factor(g, out.factor, av.unite(rv), r); !check)
        throw Error(ErrorKind::Failed, "assembled factor is invalid: " + check.reason, 4, -1);
    return out;
}

std::string structure_to_json(const AbsorbingStructure& a) {
    nlohmann::json j;
    j["r"] = a.r;
    j["order"] = a.order;
    j["template"] = nlohmann::json::parse(template_to_json(a.tpl));
    j["i_cliques"] = nlohmann::json::array();
    for (const auto& s : a.i_cliques) j["i_cliques"].push_back(s.items());
    j["orchard"] = nlohmann::json::parse(orchard_to_json(a.j_orchard));
    return j.dump();
}

AbsorbingStructure structure_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        AbsorbingStructure a;
        a.r = j.at("r").get<int>();
        a.order = j.at("order").get<int>();
        a.tpl = template_from_json(j.at("template").dump());
        for (const auto& s : j.at("i_cliques")) a.i_cliques.emplace_back(s.get<std::vector<int>>());
        a.j_orchard = orchard_from_json(j.at("orchard").dump());
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad structure json: ") + e.what());
    }
}

}  // namespace kfactor
