#include "kfactor/fracmatch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "kfactor/error.hpp"
#include "kfactor/random.hpp"

namespace kfactor {

Hypergraph::Hypergraph(int n, int r, std::vector<std::vector<int>> edges)
    : n_(n), r_(r), edges_(std::move(edges)), incident_(static_cast<size_t>(std::max(n, 0))) {
    if (n < 0 || r < 1) throw Error(ErrorKind::InvalidSpec, "hypergraph needs n >= 0 and r >= 1");
    std::set<std::vector<int>> seen;
    for (size_t i = 0; i < edges_.size(); ++i) {
        auto& e = edges_[i];
        std::sort(e.begin(), e.end());
        if (static_cast<int>(e.size()) != r || std::adjacent_find(e.begin(), e.end()) != e.end())
            throw Error(ErrorKind::InvalidSpec, "hyperedge must have r distinct vertices");
        if (e.front() < 0 || e.back() >= n) throw Error(ErrorKind::InvalidSpec, "hyperedge vertex out of range");
        if (!seen.insert(e).second) throw Error(ErrorKind::InvalidSpec, "duplicate hyperedge");
        for (int v : e) incident_[static_cast<size_t>(v)].push_back(static_cast<int>(i));
    }
}

Hypergraph Hypergraph::induced(const VertexSet& keep) const {
    std::vector<int> relabel(static_cast<size_t>(n_), -1);
    for (int i = 0; i < keep.size(); ++i) relabel[static_cast<size_t>(keep[i])] = i;
    std::vector<std::vector<int>> out;
    for (const auto& e : edges_) {
        std::vector<int> mapped;
        for (int v : e)
            if (relabel[static_cast<size_t>(v)] >= 0) mapped.push_back(relabel[static_cast<size_t>(v)]);
        if (mapped.size() == e.size()) out.push_back(std::move(mapped));
    }
    return Hypergraph(keep.size(), r_, std::move(out));
}

Hypergraph Hypergraph::with_edges(const std::vector<int>& edge_ids) const {
    std::vector<std::vector<int>> out;
    out.reserve(edge_ids.size());
    for (int id : edge_ids) out.push_back(edges_[static_cast<size_t>(id)]);
    return Hypergraph(n_, r_, std::move(out));
}

Hypergraph complete_hypergraph(int n, int r) {
    std::vector<std::vector<int>> edges;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == r) {
            edges.push_back(cur);
            return;
        }
        for (int v = start; v < n; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return Hypergraph(n, r, std::move(edges));
}

Hypergraph fano_plane() {
    return Hypergraph(7, 3, {{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5}, {1, 4, 6}, {2, 3, 6}, {2, 4, 5}});
}

std::string hypergraph_to_json(const Hypergraph& h) {
    nlohmann::json j;
    j["n"] = h.n();
    j["r"] = h.r();
    j["edges"] = h.edges();
    return j.dump();
}

Hypergraph hypergraph_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        return Hypergraph(j.at("n").get<int>(), j.at("r").get<int>(),
                          j.at("edges").get<std::vector<std::vector<int>>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad hypergraph json: ") + e.what());
    }
}

bool FractionalSolution::perfect(int n, int r) const {
    return std::abs(nu_star - static_cast<double>(n) / r) <= 1e-7;
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
bool positive(const T& x) {
    if constexpr (std::is_floating_point_v<T>) return x > kLpTolerance;
    else return x > 0;
}

template <class T>
double to_double(const T& x) {
    if constexpr (std::is_floating_point_v<T>) return x;
    else return x.template convert_to<double>();
}

template <class T>
struct LpResult {
    std::vector<T> x;  // per edge
    std::vector<T> y;  // per vertex
    T objective{};
    int pivots = 0;
};

// Columns: edges (cost 1) then slacks (cost 0); rows: vertices with right-hand side 1.
template <class T>
LpResult<T> revised_simplex(const Hypergraph& h) {
    const int m = h.n(), ne = h.edge_count();
    std::vector<std::vector<T>> binv(static_cast<size_t>(m), std::vector<T>(static_cast<size_t>(m), T(0)));
    std::vector<int> basis(static_cast<size_t>(m));
    std::vector<T> xb(static_cast<size_t>(m), T(1));
    for (int i = 0; i < m; ++i) {
        binv[static_cast<size_t>(i)][static_cast<size_t>(i)] = T(1);
        basis[static_cast<size_t>(i)] = ne + i;
    }
    std::vector<T> y(static_cast<size_t>(m));
    std::vector<T> d(static_cast<size_t>(m));
    int pivots = 0;
    for (;;) {
        std::fill(y.begin(), y.end(), T(0));
        for (int i = 0; i < m; ++i)
            if (basis[static_cast<size_t>(i)] < ne)
                for (int k = 0; k < m; ++k) y[static_cast<size_t>(k)] += binv[static_cast<size_t>(i)][static_cast<size_t>(k)];

        int entering = -1;
        for (int j = 0; j < ne + m && entering < 0; ++j) {
            T reduced;
            if (j < ne) {
                reduced = T(1);
                for (int v : h.edge(j)) reduced -= y[static_cast<size_t>(v)];
            } else {
                reduced = -y[static_cast<size_t>(j - ne)];
            }
            if (positive(reduced)) entering = j;
        }
        if (entering < 0) break;

        for (int i = 0; i < m; ++i) {
            const auto& row = binv[static_cast<size_t>(i)];
            if (entering < ne) {
                T s(0);
                for (int v : h.edge(entering)) s += row[static_cast<size_t>(v)];
                d[static_cast<size_t>(i)] = s;
            } else {
                d[static_cast<size_t>(i)] = row[static_cast<size_t>(entering - ne)];
            }
        }
        int leave = -1;
        T best_ratio{};
        for (int i = 0; i < m; ++i) {
            if (!positive(d[static_cast<size_t>(i)])) continue;
            T ratio = xb[static_cast<size_t>(i)] / d[static_cast<size_t>(i)];
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio && basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) throw Error(ErrorKind::CertificationFailed, "matching LP reported unbounded");

        const size_t l = static_cast<size_t>(leave);
        T piv = d[l];
        for (auto& v : binv[l]) v /= piv;
        xb[l] /= piv;
        for (size_t i = 0; i < static_cast<size_t>(m); ++i) {
            if (i == l || d[i] == T(0)) continue;
            T f = d[i];
            for (size_t k = 0; k < static_cast<size_t>(m); ++k) binv[i][k] -= f * binv[l][k];
            xb[i] -= f * xb[l];
        }
        basis[l] = entering;
        ++pivots;
    }

    LpResult<T> out;
    out.x.assign(static_cast<size_t>(ne), T(0));
    for (int i = 0; i < m; ++i)
        if (basis[static_cast<size_t>(i)] < ne) {
            out.x[static_cast<size_t>(basis[static_cast<size_t>(i)])] = xb[static_cast<size_t>(i)];
            out.objective += xb[static_cast<size_t>(i)];
        }
    out.y = y;
    out.pivots = pivots;
    return out;
}

template <class T>
FractionalSolution finish(const Hypergraph& h, const LpResult<T>& lp, bool exact) {
    FractionalSolution s;
    s.exact = exact;
    s.pivots = lp.pivots;
    T tau(0);
    for (const auto& v : lp.y) tau += v;
    for (const auto& v : lp.x) s.matching.push_back(std::max(0.0, to_double(v)));
    for (const auto& v : lp.y) s.cover.push_back(std::max(0.0, to_double(v)));
    s.nu_star = to_double(lp.objective);
    s.tau_star = to_double(tau);
    if constexpr (!std::is_floating_point_v<T>) {
        s.nu_star_exact = lp.objective.str();
        if (lp.objective != tau) throw Error(ErrorKind::CertificationFailed, "LP duality gap in exact mode");
    } else {
        if (std::abs(s.nu_star - s.tau_star) > kLpTolerance * std::max(1.0, s.nu_star))
            throw Error(ErrorKind::CertificationFailed, "LP duality gap above tolerance");
    }
    if (s.nu_star > static_cast<double>(h.n()) / h.r() + 1e-9)
        throw Error(ErrorKind::CertificationFailed, "fractional matching exceeds N/r");
    return s;
}

}  // namespace

FractionalSolution solve_fractional(const Hypergraph& h, LpMode mode) {
    if (h.n() == 0) throw Error(ErrorKind::InvalidSpec, "fractional matching needs a nonempty vertex set");
    bool exact = mode == LpMode::Exact || (mode == LpMode::Auto && h.n() <= 30);
    if (exact) return finish(h, revised_simplex<Rational>(h), true);
    return finish(h, revised_simplex<double>(h), false);
}

namespace {

// Enumerate k-subsets of `pool` (as bitmasks over at most 64 vertices); stop when visit returns false.
bool for_each_subset(const std::vector<int>& pool, int k, const std::function<bool(uint64_t)>& visit) {
    std::vector<int> idx(static_cast<size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    const int n = static_cast<int>(pool.size());
    if (k > n) return true;
    for (;;) {
        uint64_t mask = 0;
        for (int i : idx) mask |= uint64_t{1} << pool[static_cast<size_t>(i)];
        if (!visit(mask)) return false;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) return true;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

std::vector<int> mask_items(uint64_t m) {
    std::vector<int> out;
    for (int v = 0; m; ++v, m >>= 1)
        if (m & 1) out.push_back(v);
    return out;
}

// Is there an edge with one vertex in w0 and the other r-1 inside w1?
bool reaches(const Hypergraph& h, const std::vector<uint64_t>& masks, uint64_t w0, uint64_t w1) {
    for (int i = 0; i < h.edge_count(); ++i) {
        uint64_t e = masks[static_cast<size_t>(i)];
        uint64_t in0 = e & w0;
        if (std::popcount(in0) == 1 && (e & ~in0 & ~w1) == 0) return true;
    }
    return false;
}

// Largest matching among the (r-1)-sets of the link of v (fan size), capped at `want`.
bool has_fan(const Hypergraph& h, int v, int want) {
    std::vector<std::vector<int>> link;
    for (int e : h.incident(v)) {
        std::vector<int> rest;
        for (int x : h.edge(e))
            if (x != v) rest.push_back(x);
        link.push_back(rest);
    }
    std::vector<char> used(static_cast<size_t>(h.n()), 0);
    std::function<bool(size_t, int)> rec = [&](size_t from, int need) {
        if (need == 0) return true;
        for (size_t i = from; i < link.size(); ++i) {
            bool ok = true;
            for (int x : link[i]) ok = ok && !used[static_cast<size_t>(x)];
            if (!ok) continue;
            for (int x : link[i]) used[static_cast<size_t>(x)] = 1;
            bool found = rec(i + 1, need - 1);
            for (int x : link[i]) used[static_cast<size_t>(x)] = 0;
            if (found) return true;
        }
        return false;
    };
    return rec(0, want);
}

}  // namespace

SufficiencyReport check_pfm_sufficiency(const Hypergraph& h, const FanHypothesis& hyp) {
    const int n = h.n(), r = h.r();
    const double cap = static_cast<double>(n) / (2.0 * r);
    if (hyp.m1 < 1 || hyp.m1 > cap) throw Error(ErrorKind::ParameterRange, "fan size outside [1, N/(2r)]");
    if (hyp.mode == FanMode::TwoStage && (hyp.m2 < hyp.m1 || hyp.m2 > cap))
        throw Error(ErrorKind::ParameterRange, "two-stage sizes need M1 <= M2 <= N/(2r)");

    SufficiencyReport rep;
    rep.exhaustive = n <= 14;
    std::vector<uint64_t> masks;
    const bool small = n <= 64;
    if (small)
        for (const auto& e : h.edges()) {
            uint64_t m = 0;
            for (int v : e) m |= uint64_t{1} << v;
            masks.push_back(m);
        }
    auto reaches_sets = [&](const std::vector<int>& w0, const std::vector<int>& w1) {
        if (small) {
            uint64_t a = 0, b = 0;
            for (int v : w0) a |= uint64_t{1} << v;
            for (int v : w1) b |= uint64_t{1} << v;
            return reaches(h, masks, a, b);
        }
        std::vector<char> in0(static_cast<size_t>(n), 0), in1(static_cast<size_t>(n), 0);
        for (int v : w0) in0[static_cast<size_t>(v)] = 1;
        for (int v : w1) in1[static_cast<size_t>(v)] = 1;
        for (const auto& e : h.edges()) {
            int c0 = 0, c1 = 0;
            for (int v : e) {
                c0 += in0[static_cast<size_t>(v)];
                c1 += in1[static_cast<size_t>(v)];
            }
            if (c0 == 1 && c1 == r - 1) return true;
        }
        return false;
    };
    auto fail = [&](std::vector<int> focus, std::vector<int> set) {
        rep.holds = false;
        rep.counterexample_focus = std::move(focus);
        rep.counterexample_set = std::move(set);
    };

    if (rep.exhaustive) {
        std::vector<int> all(static_cast<size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        if (hyp.mode == FanMode::VertexFans) {
            // W may be taken of size exactly M: the condition is monotone in W.
            for (int v = 0; v < n && rep.holds; ++v) {
                std::vector<int> rest;
                for (int x : all)
                    if (x != v) rest.push_back(x);
                for_each_subset(rest, hyp.m1, [&](uint64_t w) {
                    ++rep.checked;
                    if (reaches(h, masks, uint64_t{1} << v, w)) return true;
                    fail({v}, mask_items(w));
                    return false;
                });
            }
        } else {
            for (int v = 0; v < n && rep.holds; ++v) {
                ++rep.checked;
                if (!has_fan(h, v, hyp.m1)) fail({v}, {});
            }
            if (rep.holds)
                for_each_subset(all, hyp.m1, [&](uint64_t w0) {
                    std::vector<int> rest;
                    for (int x : all)
                        if (!((w0 >> x) & 1)) rest.push_back(x);
                    return for_each_subset(rest, hyp.m2, [&](uint64_t w1) {
                        ++rep.checked;
                        if (reaches(h, masks, w0, w1)) return true;
                        fail(mask_items(w0), mask_items(w1));
                        return false;
                    });
                });
        }
        if (rep.holds) rep.pfm_found = solve_fractional(h).perfect(n, r);
        return rep;
    }

    Rng rng(hyp.seed);
    std::vector<int> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    if (hyp.mode == FanMode::TwoStage)
        for (int v = 0; v < n && rep.holds; ++v) {
            ++rep.checked;
            if (!has_fan(h, v, hyp.m1)) fail({v}, {});
        }
    for (int s = 0; s < hyp.samples && rep.holds; ++s) {
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<int> w0, w1;
        if (hyp.mode == FanMode::VertexFans) {
            w0.assign(all.begin(), all.begin() + 1);
            w1.assign(all.begin() + 1, all.begin() + 1 + hyp.m1);
        } else {
            w0.assign(all.begin(), all.begin() + hyp.m1);
            w1.assign(all.begin() + hyp.m1, all.begin() + hyp.m1 + hyp.m2);
        }
        ++rep.checked;
        if (!reaches_sets(w0, w1)) {
            std::sort(w0.begin(), w0.end());
            std::sort(w1.begin(), w1.end());
            fail(w0, w1);
        }
    }
    return rep;
}

double PfmFamily::pair_load(const Hypergraph& h, int u, int v) const {
    double total = 0.0;
    for (int e : h.incident(u)) {
        const auto& edge = h.edge(e);
        if (!std::binary_search(edge.begin(), edge.end(), v)) continue;
        for (const auto& f : members) total += f[static_cast<size_t>(e)];
    }
    return total;
}

double PfmFamily::max_pair_load(const Hypergraph& h) const {
    std::map<std::pair<int, int>, double> load;
    for (int e = 0; e < h.edge_count(); ++e) {
        double w = 0.0;
        for (const auto& f : members) w += f[static_cast<size_t>(e)];
        if (w == 0.0) continue;
        const auto& edge = h.edge(e);
        for (size_t a = 0; a < edge.size(); ++a)
            for (size_t b = a + 1; b < edge.size(); ++b) load[{edge[a], edge[b]}] += w;
    }
    double best = 0.0;
    for (const auto& [k, w] : load) best = std::max(best, w);
    return best;
}

double PfmFamily::max_perfection_error(const Hypergraph& h) const {
    double worst = 0.0;
    for (const auto& f : members)
        for (int v = 0; v < h.n(); ++v) {
            double s = 0.0;
            for (int e : h.incident(v)) s += f[static_cast<size_t>(e)];
            worst = std::max(worst, std::abs(s - 1.0));
        }
    return worst;
}

PfmFamily greedy_pfm_family(const Hypergraph& h, int t, double theta, const FamilyOptions& opts) {
    if (t < 1 || theta <= 0.0) throw Error(ErrorKind::InvalidSpec, "greedy family needs t >= 1 and theta > 0");
    PfmFamily family;
    std::set<std::pair<int, int>> forbidden;
    for (int step = 1; step <= t; ++step) {
        std::vector<int> allowed;
        for (int e = 0; e < h.edge_count(); ++e) {
            const auto& edge = h.edge(e);
            bool hit = false;
            for (size_t a = 0; a < edge.size() && !hit; ++a)
                for (size_t b = a + 1; b < edge.size() && !hit; ++b) hit = forbidden.count({edge[a], edge[b]}) > 0;
            if (!hit) allowed.push_back(e);
        }
        auto sol = solve_fractional(h.with_edges(allowed), opts.mode);
        if (!sol.perfect(h.n(), h.r())) {
            std::ostringstream msg;
            msg << "no perfect fractional matching at step " << step << " (nu* = " << sol.nu_star << "); J = {";
            bool first = true;
            for (auto [a, b] : forbidden) {
                msg << (first ? "" : ", ") << a << "-" << b;
                first = false;
            }
            msg << "}";
            throw Error(ErrorKind::Stalled, msg.str(), step);
        }
        std::vector<double> f(static_cast<size_t>(h.edge_count()), 0.0);
        for (size_t i = 0; i < allowed.size(); ++i) f[static_cast<size_t>(allowed[i])] = sol.matching[i];
        // pairs carrying at least theta of this member's weight join J
        std::map<std::pair<int, int>, double> step_load;
        for (int e : allowed) {
            double w = f[static_cast<size_t>(e)];
            if (w <= 0.0) continue;
            const auto& edge = h.edge(e);
            for (size_t a = 0; a < edge.size(); ++a)
                for (size_t b = a + 1; b < edge.size(); ++b) step_load[{edge[a], edge[b]}] += w;
        }
        for (const auto& [pair, w] : step_load)
            if (w >= theta - 1e-12) forbidden.insert(pair);
        family.members.push_back(std::move(f));
    }
    family.forbidden_pairs.assign(forbidden.begin(), forbidden.end());
    return family;
}

std::vector<int> greedy_low_degree_matching(const Hypergraph& h, const std::vector<int>& edge_ids, uint64_t rng_seed) {
    Rng rng(rng_seed);
    const size_t n = static_cast<size_t>(h.n());
    std::vector<std::vector<int>> inc(n);
    for (int e : edge_ids)
        for (int v : h.edge(e)) inc[static_cast<size_t>(v)].push_back(e);
    std::vector<char> covered(n, 0), dead(static_cast<size_t>(h.edge_count()), 0);
    std::vector<int> degree(n, 0);
    for (size_t v = 0; v < n; ++v) degree[v] = static_cast<int>(inc[v].size());
    std::vector<uint64_t> tie(n);
    for (auto& x : tie) x = rng();
    // later passes may start from a vertex one above the minimum residual degree
    const int slack = static_cast<int>(rng_seed % 3);

    auto kill = [&](int e) {
        if (dead[static_cast<size_t>(e)]) return;
        dead[static_cast<size_t>(e)] = 1;
        for (int v : h.edge(e)) --degree[static_cast<size_t>(v)];
    };
    std::vector<int> out;
    for (;;) {
        int low = -1;
        for (size_t v = 0; v < n; ++v)
            if (!covered[v] && degree[v] > 0 && (low < 0 || degree[v] < low)) low = degree[v];
        if (low < 0) break;
        int pick = -1;
        for (size_t v = 0; v < n; ++v) {
            if (covered[v] || degree[v] == 0 || degree[v] > low + slack) continue;
            if (pick < 0 || tie[v] < tie[static_cast<size_t>(pick)]) pick = static_cast<int>(v);
        }
        int best = -1;
        long best_cost = 0;
        uint64_t best_tie = 0;
        for (int e : inc[static_cast<size_t>(pick)]) {
            if (dead[static_cast<size_t>(e)]) continue;
            // prefer edges whose other vertices have many alternatives left
            long cost = 0;
            for (int v : h.edge(e)) cost -= degree[static_cast<size_t>(v)];
            uint64_t t = rng();
            if (best < 0 || cost < best_cost || (cost == best_cost && t < best_tie)) {
                best = e;
                best_cost = cost;
                best_tie = t;
            }
        }
        out.push_back(best);
        for (int v : h.edge(best)) {
            covered[static_cast<size_t>(v)] = 1;
            for (int e : inc[static_cast<size_t>(v)]) kill(e);
        }
    }

    // Swap one matched edge for two edges on the freed and uncovered vertices while possible.
    auto fits = [&](int e) {
        for (int v : h.edge(e))
            if (covered[static_cast<size_t>(v)]) return false;
        return true;
    };
    for (bool improved = true; improved;) {
        improved = false;
        for (size_t i = 0; i < out.size() && !improved; ++i) {
            for (int v : h.edge(out[i])) covered[static_cast<size_t>(v)] = 0;
            std::vector<int> cand;
            for (int v : h.edge(out[i]))
                for (int e : inc[static_cast<size_t>(v)])
                    if (e != out[i] && fits(e)) cand.push_back(e);
            for (size_t a = 0; a < cand.size() && !improved; ++a) {
                for (int v : h.edge(cand[a])) covered[static_cast<size_t>(v)] = 1;
                for (int e : edge_ids) {
                    if (!fits(e)) continue;
                    for (int v : h.edge(e)) covered[static_cast<size_t>(v)] = 1;
                    out[i] = cand[a];
                    out.push_back(e);
                    improved = true;
                    break;
                }
                if (!improved)
                    for (int v : h.edge(cand[a])) covered[static_cast<size_t>(v)] = 0;
            }
            if (!improved)
                for (int v : h.edge(out[i])) covered[static_cast<size_t>(v)] = 1;
        }
    }
    return out;
}

AlmostMatching sparsified_almost_matching(const Hypergraph& h, const PfmFamily& family, uint64_t seed,
                                          int greedy_passes) {
    Rng rng(seed);
    AlmostMatching out;
    out.keep_probability.assign(static_cast<size_t>(h.edge_count()), 0.0);
    std::vector<int> kept;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int e = 0; e < h.edge_count(); ++e) {
        double p = 0.0;
        for (const auto& f : family.members) p += f[static_cast<size_t>(e)];
        p = std::clamp(p / 2.0, 0.0, 1.0);
        out.keep_probability[static_cast<size_t>(e)] = p;
        if (p > 0.0 && unit(rng) < p) kept.push_back(e);
    }
    out.sampled_edges = static_cast<int>(kept.size());

    std::vector<int> deg(static_cast<size_t>(h.n()), 0);
    std::map<std::pair<int, int>, int> codeg;
    for (int e : kept) {
        const auto& edge = h.edge(e);
        for (size_t a = 0; a < edge.size(); ++a) {
            ++deg[static_cast<size_t>(edge[a])];
            for (size_t b = a + 1; b < edge.size(); ++b) out.max_codegree = std::max(out.max_codegree, ++codeg[{edge[a], edge[b]}]);
        }
    }
    if (h.n() > 0) {
        out.min_degree = *std::min_element(deg.begin(), deg.end());
        out.max_degree = *std::max_element(deg.begin(), deg.end());
    }

    out.uncovered = h.n() + 1;
    for (int pass = 0; pass < std::max(1, greedy_passes); ++pass) {
        auto m = greedy_low_degree_matching(h, kept, rng());
        int uncovered = h.n() - static_cast<int>(m.size()) * h.r();
        if (uncovered < out.uncovered) {
            out.uncovered = uncovered;
            out.edges = std::move(m);
        }
    }
    return out;
}

}  // namespace kfactor
