// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>

#include "kfactor/absorber.hpp"
#include "kfactor/diamond.hpp"
#include "kfactor/error.hpp"
#include "kfactor/fracmatch.hpp"
#include "kfactor/orchard.hpp"
#include "kfactor/pipeline.hpp"
#include "kfactor/spectral.hpp"

using namespace kfactor;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Graph gnp(int n, double p, uint64_t seed) { return generate_graph({GraphKind::Gnp, n, p, 0, seed, ""}); }

// Disjoint r-cliques covering exactly `target`.
bool covers_exactly(const Graph& g, const std::vector<VertexSet>& cliques, const std::vector<int>& target, int r) {
    std::set<int> seen;
    const std::set<int> want(target.begin(), target.end());
    for (const auto& c : cliques) {
        if (c.size() != r) return false;
        for (int a : c) {
            if (!seen.insert(a).second || !want.count(a)) return false;
            for (int b : c)
                if (a < b && !g.adjacent(a, b)) return false;
        }
    }
    return seen == want;
}

// ---- 1. diamond-tree identity

// Host holding exactly the diamond tree of a random auxiliary tree, vertex labels shuffled.
std::pair<Graph, DiamondTree> random_realized_tree(int r, int m, std::mt19937_64& rng) {
    const int n = m + (m - 1) * (r - 1);
    std::vector<int> label(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) label[static_cast<size_t>(i)] = i;
    std::shuffle(label.begin(), label.end(), rng);
    DiamondTree d;
    d.r = r;
    for (int i = 0; i < m; ++i) d.removable.push_back(label[static_cast<size_t>(i)]);
    std::vector<Edge> edges;
    int next = m;
    for (int child = 1; child < m; ++child) {
        int parent = static_cast<int>(rng() % static_cast<uint64_t>(child));
        d.aux_edges.emplace_back(parent, child);
        std::vector<int> inner;
        for (int k = 0; k < r - 1; ++k) inner.push_back(label[static_cast<size_t>(next++)]);
        for (size_t a = 0; a < inner.size(); ++a) {
            edges.emplace_back(inner[a], d.removable[static_cast<size_t>(parent)]);
            edges.emplace_back(inner[a], d.removable[static_cast<size_t>(child)]);
            for (size_t b = a + 1; b < inner.size(); ++b) edges.emplace_back(inner[a], inner[b]);
        }
        d.interior.push_back(VertexSet(inner));
    }
    return {Graph(n, edges), d};
}

bool extraction_sound(const Graph& g, const DiamondTree& d) {
    for (int v : d.removable) {
        std::vector<int> rest;
        for (int x : d.vertices())
            if (x != v) rest.push_back(x);
        auto cliques = extract_factor_without(d, v);
        if (static_cast<int>(cliques.size()) != d.order() - 1 || !covers_exactly(g, cliques, rest, d.r)) return false;
    }
    return true;
}

void diamond_identity() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    int bad = 0, built = 0;
    for (int i = 0; i < 1000; ++i) {
        const int r = 3 + i % 2;
        Graph g;
        DiamondTree d;
        if (i % 10 == 9) {
            // every tenth tree comes from the scattered builder on a random host
            g = gnp(160, 0.7, 9000 + static_cast<uint64_t>(i));
            const int z = 2 + static_cast<int>(rng() % 15);  // order <= z + delta <= 20
            try {
                d = build_scattered_tree(g, VertexSet::range(0, 70), VertexSet::range(70, 160), r, z, 2 + i % 3, rng());
            } catch (const Error&) {
                ++bad;
                continue;
            }
            ++built;
        } else {
            std::tie(g, d) = random_realized_tree(r, 1 + static_cast<int>(rng() % 20), rng);
        }
        const bool ok = validate_diamond_tree(g, d).ok && d.order() <= 20 &&
                        d.vertices().size() == (d.order() - 1) * r + 1 && extraction_sound(g, d);
        bad += !ok;
    }
    double s = since(t0);
    report(1, "diamond-tree identity", bad == 0 && s < 30.0,
           fmt("1000 trees (%d from the builder), %d failures, %.1f s (limit 30 s)", built, bad, s));
}

// ---- 2. scattered leaf bound

void scattered_bound() {
    int bad = 0, errors = 0;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        const int r = 3 + static_cast<int>(seed % 2);
        const int delta = 2 + static_cast<int>(seed % 4);
        const int z = 4 + static_cast<int>(seed % 11);
        Graph g = gnp(140, 0.7, 4000 + seed);
        try {
            DiamondTree d = build_scattered_tree(g, VertexSet::range(0, 60), VertexSet::range(60, 140), r, z, delta, seed);
            const int non_leaves = d.non_leaves().size();
            bad += !(validate_diamond_tree(g, d).ok && non_leaves * (delta - 1) <= d.order() - 2);
        } catch (const Error&) {
            ++errors;
        }
    }
    report(2, "scattered leaf bound", bad == 0 && errors == 0,
           fmt("200 builds, %d bound violations, %d construction errors", bad, errors));
}

// ---- 3. LP duality

// Maximum integral matching by lowest-vertex DP over vertex masks (n <= 12).
int brute_matching(const Hypergraph& h) {
    const int n = h.n();
    std::vector<uint32_t> em;
    for (const auto& e : h.edges()) {
        uint32_t m = 0;
        for (int v : e) m |= 1u << v;
        em.push_back(m);
    }
    std::vector<int> memo(size_t{1} << n, -1);
    std::function<int(uint32_t)> best = [&](uint32_t mask) -> int {
        if (!mask) return 0;
        int& slot = memo[mask];
        if (slot >= 0) return slot;
        const uint32_t low = mask & -mask;
        int b = best(mask ^ low);
        for (uint32_t e : em)
            if ((e & low) && (e & mask) == e) b = std::max(b, 1 + best(mask ^ e));
        return slot = b;
    };
    return best((n == 32 ? 0u : (1u << n)) - 1);
}

Hypergraph random_hypergraph(int n, int r, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::vector<int>> edges;
    const Hypergraph full = complete_hypergraph(n, r);
    for (const auto& e : full.edges())
        if (coin(rng)) edges.push_back(e);
    return Hypergraph(n, r, edges);
}

bool lp_feasible(const Hypergraph& h, const FractionalSolution& s) {
    for (int v = 0; v < h.n(); ++v) {
        double load = 0.0;
        for (int e : h.incident(v)) load += s.matching[static_cast<size_t>(e)];
        if (load > 1.0 + 1e-9) return false;
    }
    for (int e = 0; e < h.edge_count(); ++e) {
        double c = 0.0;
        for (int v : h.edge(e)) c += s.cover[static_cast<size_t>(v)];
        if (c < 1.0 - 1e-9) return false;
    }
    for (double w : s.matching)
        if (w < -1e-12) return false;
    return true;
}

void lp_duality() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(31);
    int bad = 0;
    double worst_gap = 0.0;
    for (int i = 0; i < 500; ++i) {
        const int n = 3 + static_cast<int>(rng() % 10);
        Hypergraph h = random_hypergraph(n, 3, 0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0, rng);
        auto s = solve_fractional(h);
        worst_gap = std::max(worst_gap, std::abs(s.nu_star - s.tau_star));
        bad += !(std::abs(s.nu_star - s.tau_star) <= 1e-9 && s.nu_star <= n / 3.0 + 1e-9 &&
                 s.nu_star >= brute_matching(h) - 1e-9 && lp_feasible(h, s));
    }
    auto fano = solve_fractional(fano_plane(), LpMode::Exact);
    const bool fano_ok = fano.exact && fano.nu_star_exact == "7/3";
    double s = since(t0);
    report(3, "LP duality and Fano plane", bad == 0 && fano_ok && s < 60.0,
           fmt("500 hypergraphs, %d failures, max |nu*-tau*| = %.1e; Fano nu* = %s; %.1f s (limit 60 s)", bad,
               worst_gap, fano.nu_star_exact.c_str(), s));
}

// ---- 4. PFM-family pair cap

void pfm_pair_cap() {
    std::mt19937_64 rng(47);
    int successes = 0, stalled = 0, bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = 9 + static_cast<int>(rng() % 10);
        const int t = 2 + static_cast<int>(rng() % 3);
        Hypergraph h = random_hypergraph(n, 3, 0.8 + 0.2 * static_cast<double>(rng() % 100) / 100.0, rng);
        try {
            auto fam = greedy_pfm_family(h, t, default_theta(t), {LpMode::Floating});
            ++successes;
            // recount pair loads directly from the member weights
            double top = 0.0;
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v) {
                    double load = 0.0;
                    for (const auto& f : fam.members)
                        for (int e : h.incident(u)) {
                            const auto& edge = h.edge(e);
                            if (std::find(edge.begin(), edge.end(), v) != edge.end()) load += f[static_cast<size_t>(e)];
                        }
                    top = std::max(top, load);
                }
            worst = std::max(worst, top);
            bad += top > 2.0 + 1e-6 || std::abs(top - fam.max_pair_load(h)) > 1e-9;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Stalled) throw;
            ++stalled;
        }
    }
    report(4, "PFM-family pair cap", bad == 0 && successes > 0,
           fmt("100 runs, %d successes, %d stalled, max pair load %.6f (cap 2 + 1e-6)", successes, stalled, worst));
}

// ---- 5. sparsified matching coverage

void sparsified_coverage() {
    Hypergraph h = complete_hypergraph(30, 3);
    auto fam = greedy_pfm_family(h, 10, default_theta(10), {LpMode::Floating});
    int good = 0, invalid = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        auto m = sparsified_almost_matching(h, fam, seed);
        std::vector<char> used(30, 0);
        bool disjoint = true;
        for (int e : m.edges)
            for (int v : h.edge(e)) {
                disjoint = disjoint && !used[static_cast<size_t>(v)];
                used[static_cast<size_t>(v)] = 1;
            }
        const int uncovered = static_cast<int>(std::count(used.begin(), used.end(), 0));
        invalid += !disjoint || uncovered != m.uncovered;
        good += disjoint && uncovered <= 3;
    }
    report(5, "sparsified matching coverage", good >= 18 && invalid == 0,
           fmt("%d/20 seeds with <= 3 uncovered (need 18), %d invalid matchings", good, invalid));
}

// ---- 6. template suite

// Kuhn's augmenting paths: does I match perfectly into J minus `removed`?
bool perfect_into(const Template& tpl, const std::vector<char>& removed) {
    const int is = tpl.i_count();
    std::vector<int> owner(static_cast<size_t>(tpl.j_count()), -1);
    std::function<bool(int, std::vector<char>&)> augment = [&](int i, std::vector<char>& seen) {
        for (int j : tpl.j_neighbors(i)) {
            if (removed[static_cast<size_t>(j)] || seen[static_cast<size_t>(j)]) continue;
            seen[static_cast<size_t>(j)] = 1;
            if (owner[static_cast<size_t>(j)] < 0 || augment(owner[static_cast<size_t>(j)], seen)) {
                owner[static_cast<size_t>(j)] = i;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < is; ++i) {
        std::vector<char> seen(static_cast<size_t>(tpl.j_count()), 0);
        if (!augment(i, seen)) return false;
    }
    return true;
}

// Every t-subset of the flexible half J2 = [2t, 4t).
bool all_subsets_match(const Template& tpl, long long& checked) {
    const int t = tpl.t();
    checked = 0;
    for (uint32_t mask = 0; mask < (1u << (2 * t)); ++mask) {
        if (std::popcount(mask) != t) continue;
        std::vector<char> removed(static_cast<size_t>(tpl.j_count()), 0);
        for (int b = 0; b < 2 * t; ++b)
            if (mask >> b & 1) removed[static_cast<size_t>(2 * t + b)] = 1;
        ++checked;
        if (!perfect_into(tpl, removed)) return false;
    }
    return true;
}

long long binom(int n, int k) {
    long long c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

void template_suite() {
    auto t0 = Clock::now();
    std::string detail;
    bool ok = true;
    for (int t = 2; t <= 6; ++t) {
        Template tpl = build_template(t, 40, static_cast<uint64_t>(t));
        auto check = verify_template(tpl);
        long long recount = 0;
        const bool mine = all_subsets_match(tpl, recount);
        const bool good = check.ok && check.exhaustive && check.checked == binom(2 * t, t) && mine &&
                          recount == binom(2 * t, t) && tpl.max_degree() <= 40 &&
                          tpl.i_count() + tpl.j_count() == 7 * t;
        ok = ok && good;
        detail += fmt("t=%d %s (%lld subsets, max degree %d); ", t, good ? "ok" : "FAILED", recount, tpl.max_degree());
    }
    // the smallest case comes from exhaustive search: 14 vertices
    Template small = build_template(2, 40, 1);
    long long c2 = 0;
    const bool small_ok = small.i_count() + small.j_count() == 14 && all_subsets_match(small, c2) && c2 == 6;
    double s = since(t0);
    report(6, "template suite", ok && small_ok && s < 120.0,
           detail + fmt("t=2 brute-force template %s; %.1f s (limit 120 s)", small_ok ? "ok" : "FAILED", s));
}

// ---- 7. absorbing-structure contract

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

// A random leftover orchard avoiding the bad set, with divisibility and k (r-1) <= t.
// Every diamond tree has (m-1) r + 1 vertices, so k trees contribute k mod r.
Orchard admissible_leftover(const Graph& g, const AbsorbingStructure& a, std::mt19937_64& rng, int& k_out) {
    const int r = a.r, t = a.t();
    const int need = (r - a.vertices().size() % r) % r;
    std::vector<int> ks;
    for (int k = 0; k * (r - 1) <= t; ++k)
        if (k % r == need) ks.push_back(k);
    k_out = ks.empty() ? -1 : ks[rng() % ks.size()];
    if (k_out <= 0) return Orchard{};
    VertexSet free = g.vertices().minus(a.vertices()).minus(absorbing_bad_set(g, a));
    const int half = free.size() / 2;
    const int order = 1 + static_cast<int>(rng() % 3);
    return grow_orchard(g, free.prefix(half), free.minus(free.prefix(half)), r, k_out, order, 2, rng());
}

void absorbing_structure() {
    int valid = 0, absorbed = 0, errors = 0;
    std::set<int> ks;
    std::mt19937_64 rng(77);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Graph g = gnp(500, 0.5, 5000 + seed);
        try {
            auto a = build_absorbing_structure(g, g.vertices(), 3, 4, seed);
            const bool ok = validate_absorbing_structure(g, a).ok && witnesses_hold(g, a) &&
                            a.vertices().size() <= 12 * 3 * 3 * 4;
            valid += ok;
            int k = 0;
            Orchard rem = admissible_leftover(g, a, rng, k);
            ks.insert(k);
            auto res = absorb(g, a, rem, seed);
            std::vector<int> target = a.vertices().unite(rem.vertices()).items();
            absorbed += ok && covers_exactly(g, res.factor, target, 3);
        } catch (const Error&) {
            ++errors;
        }
    }
    std::string sizes;
    for (int k : ks) sizes += std::to_string(k) + " ";
    report(7, "absorbing-structure contract", valid == 20 && absorbed >= 16,
           fmt("%d/20 structures validated (|V| <= 12rtM = 432), %d/20 absorbed (need 16), %d errors; "
               "leftover tree counts drawn: %s",
               valid, absorbed, errors, sizes.c_str()));
}

// ---- 8. orchard absorption

void orchard_absorption() {
    int good = 0, errors = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Graph g = gnp(150, 0.6, 1500 + seed);
        try {
            Orchard big = grow_orchard(g, VertexSet::range(0, 60), VertexSet::range(60, 120), 3, 24, 2, 1, seed);
            VertexSet bad = absorption_bad_set(g, big, g.density(), 3);
            std::vector<int> rest;
            for (int v = 120; v < 150; ++v)
                if (!bad.contains(v)) rest.push_back(v);
            VertexSet pool(rest);
            const int half = pool.size() / 2;
            Orchard small = grow_orchard(g, pool.prefix(half), pool.minus(pool.prefix(half)), 3, 2, 2, 1, seed + 100);
            auto res = absorb_orchard(g, big, small, 3, seed);
            std::vector<int> target = small.vertices().items();
            for (int i : res.used)
                for (int v : big.tree(i).vertices()) target.push_back(v);
            good += res.used.size() == 4 && covers_exactly(g, res.factor, target, 3);
        } catch (const Error&) {
            ++errors;
        }
    }
    report(8, "orchard absorption", good >= 18,
           fmt("%d/20 verified factors with |used| = 4 (need 18), %d errors", good, errors));
}

// ---- 9. hypergraph equivalence

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

void hypergraph_equivalence() {
    int bad = 0, edges = 0;
    for (uint64_t seed = 0; seed < 50; ++seed) {
        const int k = 3 + static_cast<int>(seed % 6);
        const int z = 1 + static_cast<int>(seed % 3);
        Graph g = gnp(100, 0.35 + 0.006 * static_cast<double>(seed), 6000 + seed);
        Orchard o = z == 1 ? grow_orchard(g, VertexSet::range(0, 30), {}, 3, k, 1, 1, seed)
                           : grow_orchard(g, VertexSet::range(0, 50), VertexSet::range(50, 100), 3, k, z, 2, seed);
        std::set<std::vector<int>> got;
        for (const auto& e : build_kr_hypergraph(g, o).edges) got.insert(e.trees);
        edges += static_cast<int>(got.size());
        bad += got != brute_edges(g, o);
    }
    report(9, "hypergraph equivalence", bad == 0, fmt("50 orchards, k <= 8, %d hyperedges, %d discrepancies", edges, bad));
}

// ---- 10. end-to-end

void end_to_end() {
    bool ok = true;
    std::string detail;
    for (auto [n, p] : {std::pair{30, 0.6}, std::pair{60, 0.5}, std::pair{99, 0.5}}) {
        int verified = 0;
        double slowest = 0.0;
        for (uint64_t seed = 0; seed < 10; ++seed) {
            Graph g = gnp(n, p, 7000 + 100 * static_cast<uint64_t>(n) + seed);
            ParameterProfile pr = desk_profile(n);
            pr.seed = seed;
            auto t0 = Clock::now();
            try {
                FactorCertificate c = find_clique_factor(g, pr);
                std::vector<int> all = g.vertices().items();
                verified += c.verified && covers_exactly(g, c.cliques, all, 3);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::PhaseFailed) throw;
            }
            slowest = std::max(slowest, since(t0));
        }
        ok = ok && verified >= 8 && slowest < 120.0;
        detail += fmt("G(%d,%.1f) %d/10 (slowest %.2f s); ", n, p, verified, slowest);
    }

    int oracle_yes = 0, missed = 0, overclaimed = 0;
    for (uint64_t seed = 0; seed < 30; ++seed) {
        const int n = 15 + 3 * static_cast<int>(seed % 4);
        const double p = 0.5 + 0.05 * static_cast<double>(seed % 5);
        Graph g = gnp(n, p, 8000 + seed);
        bool exact = true;
        try {
            exact_factor_baseline(g, 3);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Infeasible) throw;
            exact = false;
        }
        ParameterProfile pr = desk_profile(n);
        pr.seed = seed;
        bool ours = true;
        try {
            find_clique_factor(g, pr);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PhaseFailed) throw;
            ours = false;
        }
        overclaimed += ours && !exact;
        if (exact) {
            ++oracle_yes;
            missed += !ours;
        }
    }
    const bool agree = oracle_yes > 0 && overclaimed == 0 && missed * 5 <= oracle_yes;
    report(10, "end-to-end", ok && agree,
           detail + fmt("agreement on n <= 24: missed %d of %d feasible (limit 20%%), %d overclaims", missed,
                        oracle_yes, overclaimed));
}

// ---- 11. spectral sanity

void spectral_sanity() {
    const double pet = spectral_lambda(petersen_graph());
    const double k33 = spectral_lambda(complete_bipartite(3, 3));
    const bool fixed_ok = std::abs(pet - 2.0) <= 1e-8 && k33 == 3.0;

    std::mt19937_64 rng(99);
    std::bernoulli_distribution coin(0.3);
    int within = 0, violations = 0;
    long long pairs = 0;
    double worst = 0.0;
    for (uint64_t s = 0; s < 50; ++s) {
        Graph g = generate_graph({GraphKind::RandomRegular, 200, 0.0, 20, 100 + s, ""});
        const double lam = spectral_lambda(g);
        worst = std::max(worst, lam);
        within += lam <= 3.0 * std::sqrt(20.0);
        for (int i = 0; i < 40; ++i) {
            std::vector<int> a, b;
            for (int v = 0; v < 200; ++v) {
                if (coin(rng)) a.push_back(v);
                if (coin(rng)) b.push_back(v);
            }
            if (a.empty() || b.empty()) continue;
            ++pairs;
            const double sa = static_cast<double>(a.size()), sb = static_cast<double>(b.size());
            const double dev = std::abs(edge_count_between(g, VertexSet(a), VertexSet(b)) - 20.0 / 200.0 * sa * sb);
            violations += dev > lam * std::sqrt(sa * sb) + 1e-6;
        }
    }
    report(11, "spectral sanity", fixed_ok && within >= 48 && violations == 0,
           fmt("Petersen %.12f, K33 %.17g; %d/50 random 20-regular with lambda <= 3 sqrt 20 (max %.3f); "
               "%d mixing violations in %lld pairs",
               pet, k33, within, worst, violations, pairs));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{diamond_identity,   scattered_bound,     lp_duality,
                                                      pfm_pair_cap,       sparsified_coverage, template_suite,
                                                      absorbing_structure, orchard_absorption, hypergraph_equivalence,
                                                      end_to_end,         spectral_sanity};
    for (size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "criterion", false, std::string("unexpected error: ") + e.what());
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
