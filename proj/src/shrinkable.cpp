#include "kfactor/shrinkable.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>

#include <json.hpp>

#include "kfactor/error.hpp"
#include "kfactor/random.hpp"

namespace kfactor {

namespace {

double measured_density(const Graph& g, double p) { return p >= 0.0 ? p : g.density(); }

std::pair<VertexSet, VertexSet> random_halves(const VertexSet& s, Rng& rng) {
    std::vector<int> v = shuffled(s, rng);
    const size_t half = v.size() / 2;
    VertexSet a(std::vector<int>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half)));
    VertexSet b(std::vector<int>(v.begin() + static_cast<std::ptrdiff_t>(half), v.end()));
    return {a, b};
}

VertexSet union_of(const std::vector<VertexSet>& sets) {
    std::vector<int> all;
    for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
    return VertexSet(std::move(all));
}

// δ large enough that a δ-scattered tree on z removables has at most m/2 non-leaves.
int spread_delta(int z, int m) { return std::max(2, (2 * z + m - 1) / std::max(1, m) + 1); }

// Tries δ from spread_delta(z, m) downwards; dense stars fail in sparse hosts, small δ gives more
// non-leaves. Accepts the first selection whose forced part has at most max_x vertices.
std::optional<FlexibleSelection> spread_selection(const Graph& g, const VertexSet& u, const VertexSet& w, int r, int z,
                                                  int m, int max_x, Rng& rng, const BuildOptions& opts) {
    for (int delta = spread_delta(z, m);; delta = std::max(2, delta * 2 / 3)) {
        try {
            auto sel = select_flexible_removable(g, u, w, r, z, delta, rng(), opts);
            if (sel.x().size() <= max_x) return sel;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ConstructionFailed && e.kind() != ErrorKind::NotFound) throw;
        }
        if (delta == 2) return std::nullopt;
    }
}

// Some clique through v with one vertex in each mask, found by exhaustive DFS.
bool extends_through(const Graph& g, int v, const std::vector<Bits>& masks) {
    std::function<bool(size_t, const Bits&)> rec = [&](size_t pos, const Bits& common) {
        if (pos == masks.size()) return true;
        for (int a : (common & masks[pos]).to_set())
            if (rec(pos + 1, common & g.row(a))) return true;
        return false;
    };
    return rec(0, g.row(v));
}

int interior_clique_index(const DiamondTree& d, int v) {
    auto it = std::find(d.removable.begin(), d.removable.end(), v);
    if (it == d.removable.end()) return -1;
    const int node = static_cast<int>(it - d.removable.begin());
    for (size_t e = 0; e < d.aux_edges.size(); ++e)
        if (d.aux_edges[e].first == node || d.aux_edges[e].second == node) return static_cast<int>(e);
    return -1;
}

HypergraphMode certificate_mode(int k, int r, uint64_t seed) {
    double triples = 1.0;
    for (int i = 0; i < r; ++i) triples *= static_cast<double>(k - i) / (i + 1);
    return triples <= 2e5 ? HypergraphMode::full() : HypergraphMode::sampled(4, seed);
}

int reserved_count(int k, double gamma) { return std::min(k, static_cast<int>(std::ceil(gamma * k - 1e-9))); }

}  // namespace

VertexSet SetSystem::union_all() const { return union_of(sets); }

VertexSet SetSystem::unreserved_union() const {
    std::vector<char> res(sets.size(), 0);
    for (int i : reserved) res[static_cast<size_t>(i)] = 1;
    std::vector<VertexSet> keep;
    for (size_t i = 0; i < sets.size(); ++i)
        if (!res[i]) keep.push_back(sets[i]);
    return union_of(keep);
}

SetSystem SetSystem::of_removables(const Orchard& o) {
    SetSystem s;
    for (const auto& t : o.trees()) s.sets.push_back(t.removables());
    s.m = o.empty() ? 0 : o.order();
    return s;
}

ValidationReport validate_set_system(const SetSystem& lam) {
    std::set<int> seen;
    for (size_t i = 0; i < lam.sets.size(); ++i) {
        if (lam.sets[i].size() < lam.m)
            return {false, "size", "set " + std::to_string(i) + " is smaller than m"};
        for (int v : lam.sets[i])
            if (!seen.insert(v).second) return {false, "disjointness", "vertex " + std::to_string(v) + " repeats"};
    }
    std::set<int> res;
    for (int i : lam.reserved) {
        if (i < 0 || i >= lam.k()) return {false, "reserved", "index out of range"};
        if (!res.insert(i).second) return {false, "reserved", "index repeats"};
    }
    return {};
}

LocalShrinkReport check_local_shrink_conditions(const Graph& g, const SetSystem& lam, double gamma, double alpha,
                                                double deg_cap, double p) {
    LocalShrinkReport rep;
    const double dens = measured_density(g, p);
    rep.degree_floor = alpha * dens * lam.k() * lam.m;
    rep.reserved_large_enough = static_cast<double>(lam.reserved.size()) >= gamma * lam.k() - 1e-9;
    const Bits y = g.mask(lam.unreserved_union());
    std::vector<Bits> masks;
    for (const auto& s : lam.sets) masks.push_back(g.mask(s));
    for (int i = 0; i < lam.k(); ++i) {
        bool typical = false;
        for (int v : lam.sets[static_cast<size_t>(i)])
            typical = typical || Bits::and_count(g.row(v), y) >= rep.degree_floor;
        if (!typical) rep.weak_sets.push_back(i);
    }
    for (int v : lam.union_all())
        for (int j = 0; j < lam.k(); ++j) {
            const int d = Bits::and_count(g.row(v), masks[static_cast<size_t>(j)]);
            if (d > deg_cap) rep.heavy.push_back({v, j, d});
        }
    return rep;
}

CleanupResult cleanup_system(const Graph& g, const SetSystem& lam, double gamma, double alpha, double p) {
    if (gamma <= 0.0 || gamma >= 1.0) throw Error(ErrorKind::InvalidSpec, "gamma must lie in (0, 1)");
    if (auto rep = validate_set_system(lam); !rep) throw Error(ErrorKind::InvalidSpec, "set system: " + rep.detail);
    CleanupResult out;
    const int total = lam.k();
    const int k = static_cast<int>(std::floor(total / (1.0 + gamma) + 1e-9));
    if (k < 1) throw Error(ErrorKind::InvalidSpec, "set system too small for any target k");
    out.target_k = k;
    out.degree_floor = alpha * measured_density(g, p) * k * lam.m;
    const int gamma0 = static_cast<int>(std::floor((1.0 - gamma) * k + 1e-9));

    std::vector<char> alive(static_cast<size_t>(total), 1);
    auto tracked = [&] {
        std::vector<VertexSet> w;
        for (int i = 0; i < gamma0; ++i)
            if (alive[static_cast<size_t>(i)]) w.push_back(lam.sets[static_cast<size_t>(i)]);
        return g.mask(union_of(w));
    };
    Bits w = tracked();
    // With an empty Γ0 there is nothing to measure against (k = 1 at desk scale); nothing is binned.
    for (bool changed = gamma0 > 0; changed;) {
        changed = false;
        for (int i = 0; i < total; ++i) {
            if (!alive[static_cast<size_t>(i)]) continue;
            bool typical = false;
            for (int v : lam.sets[static_cast<size_t>(i)])
                if (Bits::and_count(g.row(v), w) >= out.degree_floor) {
                    typical = true;
                    break;
                }
            if (typical) continue;
            alive[static_cast<size_t>(i)] = 0;
            out.binned.push_back(i);
            if (out.binned.size() > gamma * k + 1e-9)
                throw Error(ErrorKind::TooManyDeleted,
                            "cleanup binned " + std::to_string(out.binned.size()) + " sets, more than gamma k");
            if (i < gamma0) w = tracked();
            changed = true;
        }
    }

    std::vector<int> rest;
    for (int i = 0; i < total; ++i) {
        if (!alive[static_cast<size_t>(i)]) continue;
        (i < gamma0 ? out.kept : rest).push_back(i);
    }
    const int base = static_cast<int>(out.kept.size());
    if (base + static_cast<int>(rest.size()) < k)
        throw Error(ErrorKind::TooManyDeleted, "fewer than k sets survive the cleanup");
    for (size_t i = 0; static_cast<int>(out.kept.size()) < k; ++i) out.kept.push_back(rest[i]);
    out.system.m = lam.m;
    for (int i : out.kept) out.system.sets.push_back(lam.sets[static_cast<size_t>(i)]);
    for (int i = base; i < k; ++i) out.system.reserved.push_back(i);
    return out;
}

LowDegreeTree build_low_degree_tree(const Graph& g, const VertexSet& u, int m, double q_cap, uint64_t seed,
                                    const LowDegreeOptions& opts) {
    if (m < 2) throw Error(ErrorKind::InvalidSpec, "low-degree trees need m >= 2");
    Rng rng(seed);
    auto [u1, w1] = random_halves(u, rng);
    const int r = opts.r;
    int z = opts.z > 0 ? opts.z : std::min(4 * m, 2 * w1.size() / (3 * std::max(1, r - 1)));
    z = std::min(z, u1.size());
    if (z < m + 1) throw Error(ErrorKind::ConstructionFailed, "no room for a selection with m + 1 removables");
    const double over = q_cap * m;

    std::optional<LowDegreeTree> best;
    for (int attempt = 0; attempt < opts.attempts; ++attempt) {
        auto sel = spread_selection(g, u1, w1, r, z, m, m, rng, opts.build);
        if (!sel) continue;
        const VertexSet& y = sel->y();
        if (y.size() < m) continue;
        VertexSet zset = random_subset(y, std::min(y.size(), std::max(z / 2, 2 * m)), rng);
        const Bits zmask = g.mask(zset);

        LowDegreeTree cand;
        std::vector<int> high;
        for (int v = 0; v < g.n(); ++v)
            if (Bits::and_count(g.row(v), zmask) > q_cap * zset.size() / 4.0) high.push_back(v);
        cand.high_degree = VertexSet(std::move(high));

        VertexSet q1 = bernoulli_subset(zset, 2.0 * m / zset.size(), rng);
        if (q1.size() < m) q1 = q1.unite(random_subset(zset.minus(q1), m - q1.size(), rng));
        std::vector<int> deg(static_cast<size_t>(g.n()), 0);
        for (int a : q1)
            for (int v : g.neighbors(a)) ++deg[static_cast<size_t>(v)];
        // Drop the member adjacent to the most over-cap vertices until m remain.
        std::vector<int> pool = shuffled(q1, rng), spare;
        while (static_cast<int>(pool.size()) > m) {
            size_t pick = 0;
            int pick_score = -1;
            for (size_t i = 0; i < pool.size(); ++i) {
                int score = 0;
                for (int v : g.neighbors(pool[i])) score += deg[static_cast<size_t>(v)] > over;
                if (score > pick_score) {
                    pick_score = score;
                    pick = i;
                }
            }
            for (int v : g.neighbors(pool[pick])) --deg[static_cast<size_t>(v)];
            spare.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        auto count_over = [&] {
            return static_cast<int>(std::count_if(deg.begin(), deg.end(), [&](int d) { return d > over; }));
        };
        // Swap pass within Q1: accept any exchange that lowers the outlier count.
        int current = count_over();
        for (bool improved = true; improved && current > 0;) {
            improved = false;
            for (size_t i = 0; i < pool.size() && !improved; ++i)
                for (size_t j = 0; j < spare.size() && !improved; ++j) {
                    for (int v : g.neighbors(pool[i])) --deg[static_cast<size_t>(v)];
                    for (int v : g.neighbors(spare[j])) ++deg[static_cast<size_t>(v)];
                    const int next = count_over();
                    if (next < current) {
                        std::swap(pool[i], spare[j]);
                        current = next;
                        improved = true;
                    } else {
                        for (int v : g.neighbors(spare[j])) --deg[static_cast<size_t>(v)];
                        for (int v : g.neighbors(pool[i])) ++deg[static_cast<size_t>(v)];
                    }
                }
        }
        cand.q = VertexSet(pool);
        cand.outliers = current;
        cand.tree = sel->build(cand.q);
        cand.attempts_used = attempt + 1;
        if (!best || cand.outliers < best->outliers) best = std::move(cand);
        if (best->outliers == 0) break;
    }
    if (!best) throw Error(ErrorKind::ConstructionFailed, "no flexible selection for a low-degree tree");
    return *best;
}

PopularTree build_popular_tree(const Graph& g, const VertexSet& u, int m,
                               const std::vector<std::vector<VertexSet>>& families, uint64_t seed,
                               const PopularTreeOptions& opts) {
    if (m < 1) throw Error(ErrorKind::InvalidSpec, "popular trees need m >= 1");
    if (families.empty()) throw Error(ErrorKind::InvalidSpec, "popular trees need r - 1 >= 1 families");
    const int r = static_cast<int>(families.size()) + 1;
    PopularTree out;
    out.combinations = 1.0;
    for (const auto& f : families) out.combinations *= static_cast<double>(f.size());
    out.within_bound = out.combinations <= std::pow(2.0, m / 4.0);

    Rng rng(seed);
    std::vector<std::vector<int>> combos;
    if (out.combinations > 0.0) {
        if (out.combinations <= opts.max_combinations) {
            std::vector<int> idx(families.size(), 0);
            for (;;) {
                combos.push_back(idx);
                size_t i = 0;
                while (i < idx.size() && ++idx[i] == static_cast<int>(families[i].size())) idx[i++] = 0;
                if (i == idx.size()) break;
            }
        } else {
            out.sampled = true;
            for (int s = 0; s < opts.max_combinations; ++s) {
                std::vector<int> idx;
                for (const auto& f : families)
                    idx.push_back(std::uniform_int_distribution<int>(0, static_cast<int>(f.size()) - 1)(rng));
                combos.push_back(std::move(idx));
            }
        }
    }
    out.tested = static_cast<int>(combos.size());
    std::vector<std::vector<Bits>> masks;
    for (const auto& f : families) {
        masks.emplace_back();
        for (const auto& w : f) masks.back().push_back(g.mask(w));
    }

    auto [u1, w1] = random_halves(u, rng);
    int z = opts.z > 0 ? opts.z : 2 * w1.size() / (3 * (r - 1));
    z = std::min(z, u1.size());
    if (z < std::max(2, m)) throw Error(ErrorKind::ConstructionFailed, "no room for a popular-tree selection");
    std::string why = "no flexible selection";
    for (int attempt = 0; attempt < opts.attempts; ++attempt) {
        auto sel = spread_selection(g, u1, w1, r, z, m, m, rng, opts.build);
        if (!sel) continue;
        const VertexSet& y = sel->y();
        const int x_size = sel->x().size();
        // Y(W): up to |Y|/2 vertices of Y that extend to a K_r traversing W_0..W_{r-2}.
        std::vector<Bits> extendable;
        bool dead = false;
        const int cap = std::max(1, (y.size() + 1) / 2);
        for (const auto& idx : combos) {
            std::vector<Bits> ws;
            for (size_t i = 0; i < idx.size(); ++i) ws.push_back(masks[i][static_cast<size_t>(idx[i])]);
            std::vector<int> hits;
            for (int v : shuffled(y, rng)) {
                if (extends_through(g, v, ws)) hits.push_back(v);
                if (static_cast<int>(hits.size()) >= cap) break;
            }
            if (hits.empty()) {
                dead = true;
                break;
            }
            extendable.push_back(g.mask(VertexSet(hits)));
        }
        if (dead) {
            why = "some family combination has no extendable vertex in Y";
            continue;
        }
        const double keep = std::min(1.0, 5.0 * m / (4.0 * y.size()));
        for (int draw = 0; draw < opts.draws; ++draw) {
            VertexSet q = bernoulli_subset(y, keep, rng);
            const int order = x_size + q.size();
            if (q.empty() || order < m || order > 2 * m) continue;
            const Bits qm = g.mask(q);
            bool all = true;
            for (const auto& e : extendable)
                if (Bits::and_count(qm, e) == 0) {
                    all = false;
                    break;
                }
            if (!all) continue;
            out.q = q;
            out.tree = sel->build(q);
            return out;
        }
        why = "no Q draw met every combination within the order window";
    }
    throw Error(ErrorKind::ConstructionFailed, "popular tree: " + why);
}

VertexSet ReservedBlock::fixed_vertices() const { return z.unite(union_of(pi)); }

VertexSet ReservedBlock::pool_vertices() const { return y.unite(union_of(upsilon)); }

const VertexSet& ReservedBlock::clique_of(int v) const {
    auto it = std::lower_bound(y.begin(), y.end(), v);
    if (it == y.end() || *it != v) throw Error(ErrorKind::InvalidSpec, "vertex is not in the pool");
    return upsilon[static_cast<size_t>(it - y.begin())];
}

FirstRound reserve_first_round(const Graph& g, const VertexSet& u, int r, int m, int groups, int per_group,
                               int pool_size, uint64_t seed, const BuildOptions& opts) {
    if (m < 1 || groups < 1 || per_group < 1 || pool_size < 1)
        throw Error(ErrorKind::InvalidSpec, "first round needs m, groups, per_group, pool_size >= 1");
    Rng rng(seed);
    FirstRound out;
    out.groups = groups;
    out.per_group = per_group;
    out.m = m;
    VertexSet fixed;
    const int z = std::max(2, m + pool_size);
    for (int i = 0; i < groups; ++i) {
        VertexSet group_pool;
        for (int j = 0; j < per_group; ++j) {
            VertexSet avail = u.minus(fixed).minus(group_pool);
            std::optional<FlexibleSelection> sel;
            for (int attempt = 0; attempt < 4 && !sel; ++attempt) {
                auto [u1, w1] = random_halves(avail, rng);
                sel = spread_selection(g, u1, w1, r, z, m, m, rng, opts);
            }
            if (!sel)
                throw Error(ErrorKind::ConstructionFailed, "first round: no selection for block (" +
                                                               std::to_string(i) + ", " + std::to_string(j) + ")");
            const VertexSet& x = sel->x();
            if (x.size() > m) throw Error(ErrorKind::ConstructionFailed, "first round: forced part exceeds m");
            VertexSet extra = random_subset(sel->y(), m - x.size(), rng);
            DiamondTree fixed_tree = sel->build(extra);
            ReservedBlock b{i, j, x.unite(extra), fixed_tree.interior, sel->y().minus(extra), {}, *sel};
            for (int v : b.y) {
                const int e = interior_clique_index(sel->base(), v);
                if (e < 0) throw Error(ErrorKind::ConstructionFailed, "first round: pool vertex without a leaf edge");
                b.upsilon.push_back(sel->base().interior[static_cast<size_t>(e)]);
            }
            fixed = fixed.unite(b.fixed_vertices());
            group_pool = group_pool.unite(b.pool_vertices());
            out.blocks.push_back(std::move(b));
        }
    }
    return out;
}

Orchard complete_second_round(const Graph& g, const FirstRound& first, double q, uint64_t seed) {
    Rng rng(seed);
    VertexSet used;
    for (const auto& b : first.blocks) used = used.unite(b.fixed_vertices());
    std::vector<DiamondTree> trees;
    for (int i = 0; i < first.groups; ++i) {
        const Bits blocked = g.mask(used);
        VertexSet group_vertices;
        for (int j = 0; j < first.per_group; ++j) {
            const auto& b = first.block(i, j);
            std::vector<int> live;
            for (size_t s = 0; s < b.y.items().size(); ++s) {
                const int v = b.y[static_cast<int>(s)];
                if (blocked.test(v)) continue;
                bool clean = true;
                for (int a : b.upsilon[s]) clean = clean && !blocked.test(a);
                if (clean) live.push_back(v);
            }
            const double keep = q > 0.0 ? q : first.m / (2.0 * std::max(1, b.y.size()));
            VertexSet picked = bernoulli_subset(VertexSet(live), keep, rng);
            if (picked.size() > first.m) picked = random_subset(picked, first.m, rng);
            DiamondTree d = b.selection.build(b.z.minus(b.selection.x()).unite(picked));
            group_vertices = group_vertices.unite(d.vertices());
            trees.push_back(std::move(d));
        }
        used = used.unite(group_vertices);
    }
    return Orchard(std::move(trees));
}

const char* to_string(ShrinkPath path) {
    switch (path) {
        case ShrinkPath::Auto: return "auto";
        case ShrinkPath::VerySmall: return "very-small";
        case ShrinkPath::LowDegree: return "low-degree";
        case ShrinkPath::Popular: return "popular";
        case ShrinkPath::TwoRound: return "two-round";
    }
    return "?";
}

namespace {

double default_deg_cap(int n, double p, int r, double gamma, const ShrinkOptions& opts) {
    if (opts.deg_cap >= 0.0) return opts.deg_cap;
    return std::max(1.0, std::pow(p, r - 1) * std::pow(static_cast<double>(n), 1.0 - gamma));
}

ShrinkPath path_from_name(const std::string& s) {
    for (auto p : {ShrinkPath::Auto, ShrinkPath::VerySmall, ShrinkPath::LowDegree, ShrinkPath::Popular,
                   ShrinkPath::TwoRound})
        if (s == to_string(p)) return p;
    throw Error(ErrorKind::InvalidSpec, "unknown shrinkable path: " + s);
}

struct Built {
    Orchard orchard;
    std::vector<int> q;
    int deleted = 0;
};

Built from_cleanup(const std::vector<DiamondTree>& trees, const SetSystem& lam, const Graph& g, double gamma,
                   double alpha, double p) {
    CleanupResult c = cleanup_system(g, lam, gamma, alpha, p);
    std::vector<DiamondTree> kept;
    for (int i : c.kept) kept.push_back(trees[static_cast<size_t>(i)]);
    return {Orchard(std::move(kept)), c.system.reserved, static_cast<int>(c.binned.size())};
}

Built very_small_path(const Graph& g, const VertexSet& u, int r, int m, int k, double alpha, double gamma, double p,
                      Rng& rng, const ShrinkOptions& opts) {
    const int total = static_cast<int>(std::ceil((1.0 + gamma) * k - 1e-9));
    Orchard big;
    if (m == 1) {
        big = grow_orchard(g, u, VertexSet{}, r, total, 1, 1, rng(), opts.build);
    } else {
        auto [u1, w1] = random_halves(u, rng);
        big = grow_orchard(g, u1, w1, r, total, m, opts.delta, rng(), opts.build);
    }
    return from_cleanup(big.trees(), SetSystem::of_removables(big), g, gamma, alpha, p);
}

Built low_degree_path(const Graph& g, const VertexSet& u, int r, int m, int k, double alpha, double gamma, double p,
                      double deg_cap, Rng& rng, const ShrinkOptions& opts) {
    const int need = static_cast<int>(std::ceil((1.0 + gamma) * k - 1e-9));
    std::vector<DiamondTree> trees;
    std::vector<VertexSet> qs;
    VertexSet used;
    LowDegreeOptions lopts;
    lopts.r = r;
    lopts.build = opts.build;
    for (int i = 0; i < 2 * k; ++i) {
        try {
            auto t = build_low_degree_tree(g, u.minus(used), m, deg_cap / m, rng(), lopts);
            used = used.unite(t.tree.vertices());
            qs.push_back(t.q);
            trees.push_back(std::move(t.tree));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ConstructionFailed || static_cast<int>(trees.size()) < need) throw;
            break;
        }
    }
    // B1: vertices too heavy into some distinguished set.
    std::vector<char> heavy(static_cast<size_t>(g.n()), 0);
    for (const auto& q : qs) {
        const Bits qm = g.mask(q);
        for (int v = 0; v < g.n(); ++v)
            if (Bits::and_count(g.row(v), qm) > deg_cap) heavy[static_cast<size_t>(v)] = 1;
    }
    const int half = (m + 1) / 2;
    std::vector<DiamondTree> kept;
    SetSystem lam;
    lam.m = half;
    for (size_t i = 0; i < trees.size() && static_cast<int>(kept.size()) < need; ++i) {
        std::vector<int> light;
        for (int v : qs[i])
            if (!heavy[static_cast<size_t>(v)]) light.push_back(v);
        if (static_cast<int>(light.size()) <= m - half) continue;  // |B1 ∩ Q| >= m/2
        light.resize(static_cast<size_t>(half));
        lam.sets.emplace_back(std::move(light));
        kept.push_back(trees[i]);
    }
    if (static_cast<int>(kept.size()) < need)
        throw Error(ErrorKind::ConstructionFailed, "low-degree path: too many trees dropped for heavy vertices");
    return from_cleanup(kept, lam, g, gamma, alpha, p);
}

Built popular_path(const Graph& g, const VertexSet& u, int r, int m, int k, double gamma, double p, Rng& rng,
                   const ShrinkOptions& opts) {
    std::vector<DiamondTree> trees;
    VertexSet used;
    PopularTreeOptions popts;
    popts.build = opts.build;
    const int mid_size = std::max(1, static_cast<int>(std::ceil(p * k - 1e-9)));
    const int last_size = std::max(1, static_cast<int>(std::ceil(gamma * k - 1e-9)));
    auto sampled_unions = [&](int size) {
        std::vector<VertexSet> out;
        if (static_cast<int>(trees.size()) < size) return out;
        std::vector<int> idx(trees.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        for (int s = 0; s < opts.union_samples; ++s) {
            std::shuffle(idx.begin(), idx.end(), rng);
            std::vector<VertexSet> parts;
            for (int i = 0; i < size; ++i) parts.push_back(trees[static_cast<size_t>(idx[static_cast<size_t>(i)])].removables());
            out.push_back(union_of(parts));
        }
        return out;
    };
    for (int i = 0; i < k; ++i) {
        std::vector<std::vector<VertexSet>> families(static_cast<size_t>(r - 1));
        for (const auto& t : trees) families[0].push_back(t.removables());
        for (int j = 1; j + 1 < r - 1; ++j) families[static_cast<size_t>(j)] = sampled_unions(mid_size);
        if (r - 1 > 1) families.back() = sampled_unions(last_size);
        PopularTree t = build_popular_tree(g, u.minus(used), m, families, rng(), popts);
        used = used.unite(t.tree.vertices());
        trees.push_back(std::move(t.tree));
    }
    Built b{Orchard(std::move(trees)), {}, 0};
    for (int i = k - reserved_count(k, gamma); i < k; ++i) b.q.push_back(i);
    return b;
}

Built two_round_path(const Graph& g, const VertexSet& u, int r, int m, int k, double alpha, double gamma, double p,
                     Rng& rng, const ShrinkOptions& opts) {
    int per_group = opts.per_group > 0
                        ? opts.per_group
                        : std::clamp(static_cast<int>(std::ceil(std::pow(p, 1 - r) / m - 1e-9)), 1, k);
    int groups = opts.groups > 0 ? opts.groups : (k + per_group - 1) / per_group;
    const int total = groups * per_group;
    int pool = opts.pool_size;
    if (pool <= 0) {
        const double natural = std::sqrt(alpha) * g.n() / per_group;
        const double budget = (u.size() - 2.0 * total * m * r) / (4.0 * per_group * r);
        pool = static_cast<int>(std::floor(std::min(natural, budget)));
    }
    if (pool < 1) throw Error(ErrorKind::ConstructionFailed, "two-round path: no vertex budget for the pools");
    FirstRound first = reserve_first_round(g, u, r, m, groups, per_group, pool, rng(), opts.build);
    Built b{complete_second_round(g, first, 0.0, rng()), {}, 0};
    for (int i = total - reserved_count(total, gamma); i < total; ++i) b.q.push_back(i);
    return b;
}

}  // namespace

ShrinkPath choose_shrinkable_path(int n, double p, int r, int m, double gamma, const ShrinkOptions& opts) {
    if (opts.force != ShrinkPath::Auto) return opts.force;
    const double threshold = opts.density_threshold >= 0.0 ? opts.density_threshold
                                                           : std::pow(static_cast<double>(n), -1.0 / (10.0 * r));
    const bool small = p >= threshold || m < std::pow(p, r - 1) * n;
    if (small) return m <= default_deg_cap(n, p, r, gamma, opts) ? ShrinkPath::VerySmall : ShrinkPath::LowDegree;
    return m >= std::pow(p, 1 - r) ? ShrinkPath::Popular : ShrinkPath::TwoRound;
}

ShrinkableCertificate construct_shrinkable_orchard(const Graph& g, const VertexSet& u, int r, int m, double alpha,
                                                   double gamma, uint64_t seed, const ShrinkOptions& opts) {
    if (r < 2 || m < 1) throw Error(ErrorKind::InvalidSpec, "shrinkable orchards need r >= 2 and m >= 1");
    if (alpha <= 0.0 || alpha >= 1.0 || gamma <= 0.0 || gamma >= 1.0)
        throw Error(ErrorKind::InvalidSpec, "alpha and gamma must lie in (0, 1)");
    if (!u.subset_of(g.vertices())) throw Error(ErrorKind::InvalidSpec, "u must be a vertex subset of g");
    const double p = g.density();
    const int k = opts.k > 0 ? opts.k : std::max(1, static_cast<int>(std::ceil(alpha * g.n() / m - 1e-9)));
    if (static_cast<long long>(k) * m > u.size())
        throw Error(ErrorKind::ConstructionFailed, "k m exceeds |u|; alpha n <= k m is not achievable");
    const ShrinkPath path = choose_shrinkable_path(g.n(), p, r, m, gamma, opts);
    const double deg_cap = default_deg_cap(g.n(), p, r, gamma, opts);
    if (path == ShrinkPath::LowDegree && m < 2)
        throw Error(ErrorKind::ConstructionFailed, "low-degree path needs m >= 2");

    Rng rng(seed);
    std::string last = "no attempts";
    bool built_once = false;
    for (int attempt = 0; attempt < std::max(1, opts.attempts); ++attempt) {
        Built b;
        try {
            switch (path) {
                case ShrinkPath::Auto:
                case ShrinkPath::VerySmall: b = very_small_path(g, u, r, m, k, alpha, gamma, p, rng, opts); break;
                case ShrinkPath::LowDegree:
                    b = low_degree_path(g, u, r, m, k, alpha, gamma, p, deg_cap, rng, opts);
                    break;
                case ShrinkPath::Popular: b = popular_path(g, u, r, m, k, gamma, p, rng, opts); break;
                case ShrinkPath::TwoRound: b = two_round_path(g, u, r, m, k, alpha, gamma, p, rng, opts); break;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ConstructionFailed && e.kind() != ErrorKind::TooManyDeleted &&
                e.kind() != ErrorKind::NotFound)
                throw;
            last = e.what();
            continue;
        }
        built_once = true;
        ShrinkableCertificate c;
        c.gamma = gamma;
        c.path = path;
        c.deleted = b.deleted;
        c.q = b.q;
        c.orchard = std::move(b.orchard);
        const uint64_t trial_seed = rng();
        c.trials = test_shrinkability(g, c.orchard, c.q, gamma, opts.trials, trial_seed,
                                      certificate_mode(c.orchard.size(), r, trial_seed));
        if (c.trials.all_pass && static_cast<int>(c.q.size()) >= reserved_count(c.orchard.size(), gamma)) return c;
        last = "shrinkability trials failed";
    }
    const std::string where = std::string(to_string(path)) + " path (n=" + std::to_string(g.n()) +
                              ", m=" + std::to_string(m) + ", k=" + std::to_string(k) + "): " + last;
    if (built_once && last == "shrinkability trials failed") throw Error(ErrorKind::CertificationFailed, where);
    throw Error(ErrorKind::ConstructionFailed, where);
}

std::string certificate_to_json(const ShrinkableCertificate& c) {
    nlohmann::json j;
    j["path"] = to_string(c.path);
    j["gamma"] = c.gamma;
    j["q"] = c.q;
    j["deleted"] = c.deleted;
    j["orchard"] = nlohmann::json::parse(orchard_to_json(c.orchard));
    j["trials"] = {{"threshold", c.trials.threshold},
                   {"uncovered", c.trials.uncovered},
                   {"removed", c.trials.removed},
                   {"all_pass", c.trials.all_pass}};
    return j.dump();
}

ShrinkableCertificate certificate_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        ShrinkableCertificate c;
        c.path = path_from_name(j.at("path").get<std::string>());
        c.gamma = j.at("gamma").get<double>();
        c.q = j.at("q").get<std::vector<int>>();
        c.deleted = j.at("deleted").get<int>();
        c.orchard = orchard_from_json(j.at("orchard").dump());
        const auto& t = j.at("trials");
        c.trials.threshold = t.at("threshold").get<int>();
        c.trials.uncovered = t.at("uncovered").get<std::vector<int>>();
        c.trials.removed = t.at("removed").get<std::vector<int>>();
        c.trials.all_pass = t.at("all_pass").get<bool>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad certificate json: ") + e.what());
    }
}

}  // namespace kfactor
