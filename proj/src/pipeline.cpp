#include "kfactor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "kfactor/absorber.hpp"
#include "kfactor/cliques.hpp"
#include "kfactor/error.hpp"
#include "kfactor/orchard.hpp"
#include "kfactor/random.hpp"

namespace kfactor {

namespace {

ShrinkPath path_named(const std::string& s) {
    for (ShrinkPath p : {ShrinkPath::Auto, ShrinkPath::VerySmall, ShrinkPath::LowDegree, ShrinkPath::Popular,
                         ShrinkPath::TwoRound})
        if (s == to_string(p)) return p;
    throw Error(ErrorKind::InvalidSpec, "unknown shrink path " + s);
}

}  // namespace

void validate_profile(const ParameterProfile& pr) {
    auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidSpec, "profile: " + what); };
    if (pr.r < 3) bad("r must be at least 3");
    for (auto [name, v] : {std::pair{"gamma", pr.gamma}, {"alpha", pr.alpha}, {"zeta", pr.zeta}, {"eta", pr.eta}})
        if (!(v > 0.0 && v < 1.0)) bad(std::string(name) + " must lie in (0, 1)");
    if (pr.levels < 1 || static_cast<int>(pr.level_orders.size()) != pr.levels)
        bad("levels must be positive and match the number of level orders");
    if (pr.level_orders.front() != 1) bad("the lowest level order must be 1");
    for (size_t i = 1; i < pr.level_orders.size(); ++i)
        if (pr.level_orders[i] <= pr.level_orders[i - 1]) bad("level orders must be strictly increasing");
    if (!pr.level_sizes.empty() && static_cast<int>(pr.level_sizes.size()) != pr.levels)
        bad("level sizes must be empty or one per level");
    for (int k : pr.level_sizes)
        if (k < 0) bad("level sizes must be non-negative");
    if (pr.delta < 2) bad("delta must be at least 2");
    if (pr.absorber_flex < 0 || pr.absorber_flex == 1) bad("absorber flexibility must be 0 or at least 2");
    if (pr.absorber_flex > 0 && pr.absorber_order < 1) bad("absorber order must be positive");
    const Budgets& b = pr.budgets;
    if (b.attempts < 1 || b.y_draws < 1 || b.shrink_draws < 1 || b.construct_attempts < 1 || b.clique_restarts < 1)
        bad("every budget must be positive");
}

ParameterProfile desk_profile(int n, int r) {
    ParameterProfile pr;
    pr.r = r;
    pr.budgets.shrink_draws = 32;
    pr.budgets.attempts = 30;
    if (n >= 300) {
        pr.absorber_flex = 3;
        pr.absorber_order = 4;
        pr.zeta = 0.03;
        pr.level_orders = {1, 3};
        pr.level_sizes = {static_cast<int>(0.15 * n), 2 * r};
    } else if (n >= 90) {
        pr.zeta = 0.06;
        pr.level_orders = {1, 3};
        pr.level_sizes = {static_cast<int>(0.24 * n), r};
    } else if (n >= 45) {
        pr.zeta = 0.06;
        pr.level_orders = {1, 2};
        pr.level_sizes = {static_cast<int>(0.3 * n), r};
    } else {
        // One level; k_0 = r - 1 (mod r) leaves a greedy remainder of r - 1 vertices or fewer.
        pr.zeta = 0.1;
        pr.gamma = 0.5;
        pr.budgets.construct_attempts = 8;
        pr.level_orders = {1};
        pr.level_sizes = {std::max(r - 1, static_cast<int>(0.5 * n) / r * r + r - 1)};
    }
    pr.levels = static_cast<int>(pr.level_orders.size());
    return pr;
}

std::string profile_to_json(const ParameterProfile& pr) {
    nlohmann::json j;
    j["r"] = pr.r;
    j["eps"] = pr.eps;
    j["c"] = pr.c;
    j["alpha"] = pr.alpha;
    j["gamma"] = pr.gamma;
    j["zeta"] = pr.zeta;
    j["eta"] = pr.eta;
    j["lambda_exp"] = pr.lambda_exp;
    j["levels"] = pr.levels;
    j["level_orders"] = pr.level_orders;
    j["level_sizes"] = pr.level_sizes;
    j["delta"] = pr.delta;
    j["level_path"] = to_string(pr.level_path);
    j["seed"] = pr.seed;
    j["budgets"] = {{"attempts", pr.budgets.attempts},
                    {"y_draws", pr.budgets.y_draws},
                    {"shrink_draws", pr.budgets.shrink_draws},
                    {"construct_attempts", pr.budgets.construct_attempts},
                    {"clique_restarts", pr.budgets.clique_restarts}};
    j["absorber"] = {{"t", pr.absorber_flex}, {"order", pr.absorber_order}};
    return j.dump();
}

ParameterProfile profile_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        ParameterProfile pr;
        pr.r = j.value("r", pr.r);
        pr.eps = j.value("eps", pr.eps);
        pr.c = j.value("c", pr.c);
        pr.alpha = j.value("alpha", pr.alpha);
        pr.gamma = j.value("gamma", pr.gamma);
        pr.zeta = j.value("zeta", pr.zeta);
        pr.eta = j.value("eta", pr.eta);
        pr.lambda_exp = j.value("lambda_exp", pr.lambda_exp);
        pr.level_orders = j.value("level_orders", pr.level_orders);
        pr.levels = j.value("levels", static_cast<int>(pr.level_orders.size()));
        pr.level_sizes = j.value("level_sizes", pr.level_sizes);
        pr.delta = j.value("delta", pr.delta);
        if (j.contains("level_path")) pr.level_path = path_named(j["level_path"].get<std::string>());
        pr.seed = j.value("seed", pr.seed);
        if (j.contains("budgets")) {
            const auto& b = j["budgets"];
            pr.budgets.attempts = b.value("attempts", pr.budgets.attempts);
            pr.budgets.y_draws = b.value("y_draws", pr.budgets.y_draws);
            pr.budgets.shrink_draws = b.value("shrink_draws", pr.budgets.shrink_draws);
            pr.budgets.construct_attempts = b.value("construct_attempts", pr.budgets.construct_attempts);
            pr.budgets.clique_restarts = b.value("clique_restarts", pr.budgets.clique_restarts);
        }
        if (j.contains("absorber")) {
            pr.absorber_flex = j["absorber"].value("t", pr.absorber_flex);
            pr.absorber_order = j["absorber"].value("order", pr.absorber_order);
        }
        return pr;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad profile json: ") + e.what());
    }
}

namespace {

struct PhaseError {
    int phase;
    std::string what;
};

[[noreturn]] void phase_fail(int phase, const std::string& what) { throw PhaseError{phase, what}; }

struct Level {
    Orchard orchard;
    std::vector<int> q;
    VertexSet bad;
    bool avoid = false;
};

std::optional<VertexSet> clique_through(const Graph& g, int v, const VertexSet& pool, int r, uint64_t seed,
                                        const SearchOptions& search) {
    VertexSet nb = g.neighborhood(v).intersect(pool);
    if (nb.size() < r - 1) return std::nullopt;
    TraversalQuery q;
    q.r_star = r;
    q.sets.push_back(VertexSet{v});
    for (int i = 1; i < r; ++i) q.sets.push_back(nb);
    auto c = try_find_traversing_clique(g, q, seed, search);
    if (!c) return std::nullopt;
    return c->vertices();
}

struct Draw {
    std::vector<VertexSet> absorbed;  // T_i
    std::vector<VertexSet> shrunk;    // R_i
    std::vector<int> used;            // Q'_i as orchard indices
    std::vector<int> leftover;        // P_i as orchard indices
};

// Absorb `incoming` into Q_i, then match what is left of O_i; the draw with the smallest leftover wins.
std::optional<Draw> cascade_step(const Graph& g, const Level& lvl, const Orchard& incoming, int r, uint64_t seed,
                                 int draws, const SearchOptions& search, std::string& why) {
    std::optional<Draw> best;
    const Orchard q_orchard = lvl.orchard.subset(lvl.q);
    for (int d = 0; d < draws; ++d) {
        Draw dr;
        const uint64_t s = mix_seed(seed, static_cast<uint64_t>(d));
        if (!incoming.empty()) {
            AbsorbParams ap;
            ap.search = search;
            try {
                auto res = absorb_orchard(g, q_orchard, incoming, r, s, ap);
                dr.absorbed = std::move(res.factor);
                for (int u : res.used) dr.used.push_back(lvl.q[static_cast<size_t>(u)]);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Failed) throw;
                why = e.what();
                continue;
            }
        }
        std::sort(dr.used.begin(), dr.used.end());
        std::vector<int> alive;
        for (int i = 0; i < lvl.orchard.size(); ++i)
            if (!std::binary_search(dr.used.begin(), dr.used.end(), i)) alive.push_back(i);
        auto matching = shrink_matching(g, lvl.orchard, alive, mix_seed(s, 7));
        std::vector<char> covered(static_cast<size_t>(lvl.orchard.size()), 0);
        for (const auto& e : matching)
            for (int t : e.trees) covered[static_cast<size_t>(t)] = 1;
        for (int i : alive)
            if (!covered[static_cast<size_t>(i)]) dr.leftover.push_back(i);
        dr.shrunk = matching_to_factor(lvl.orchard, matching);
        if (!best || dr.leftover.size() < best->leftover.size()) best = std::move(dr);
        if (best->leftover.empty()) break;
    }
    return best;
}

FactorCertificate run_once(const Graph& g, const ParameterProfile& pr, uint64_t seed) {
    const int n = g.n(), r = pr.r;
    const double p = g.density();
    const VertexSet all = g.vertices();
    SearchOptions search;
    search.restarts = pr.budgets.clique_restarts;
    Rng rng(seed);
    FactorCertificate cert;
    cert.profile = pr;
    cert.run_seed = seed;

    // Setup: the reserve Y.
    const double y_floor = std::floor(pr.c * pr.alpha * p * n / 2.0);
    VertexSet y;
    bool y_ok = false;
    for (int draw = 0; draw < pr.budgets.y_draws && !y_ok; ++draw) {
        y = bernoulli_subset(all, pr.alpha, rng);
        if (y.size() > 2.0 * pr.alpha * n) continue;
        const Bits ym = g.mask(y);
        y_ok = true;
        for (int v = 0; v < n && y_ok; ++v) y_ok = Bits::and_count(g.row(v), ym) >= y_floor;
    }
    if (!y_ok) phase_fail(0, "no admissible reserve in " + std::to_string(pr.budgets.y_draws) + " draws");
    cert.reserve = y.size();

    // Setup: the absorbing structure A, kept clear of Y.
    std::optional<AbsorbingStructure> absorber;
    VertexSet taken = y;
    if (pr.absorber_flex > 0) {
        StructureOptions so;
        so.r = r;
        so.alpha = pr.alpha;
        so.build.search = search;
        try {
            absorber = build_absorbing_structure(g, all.minus(y), pr.absorber_flex, pr.absorber_order,
                                                 mix_seed(seed, 1), so);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::StageFailed) throw;
            phase_fail(0, std::string("absorbing structure: ") + e.what());
        }
        cert.absorber_vertices = absorber->vertices().size();
        taken = taken.unite(absorber->vertices());
        VertexSet b = absorbing_bad_set(g, *absorber, p);
        if (b.size() <= pr.eta * std::pow(p, 2 * r - 4) * n) taken = taken.unite(b);
    }

    // Setup: level orchards from the top level down, each clear of the bad sets it must avoid.
    std::vector<Level> levels(static_cast<size_t>(pr.levels));
    cert.level_records.resize(static_cast<size_t>(pr.levels));
    VertexSet u = all.minus(taken);
    const double bad_bound = pr.eta * std::pow(p, r - 1) * n;
    for (int i = pr.levels - 1; i >= 0; --i) {
        const int m = pr.level_orders[static_cast<size_t>(i)];
        ShrinkOptions so;
        so.delta = pr.delta;
        so.force = pr.level_path;
        so.attempts = pr.budgets.construct_attempts;
        so.build.search = search;
        if (!pr.level_sizes.empty()) so.k = pr.level_sizes[static_cast<size_t>(i)];
        ShrinkableCertificate sc;
        try {
            sc = construct_shrinkable_orchard(g, u, r, m, pr.alpha, pr.gamma, mix_seed(seed, 100 + i), so);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ConstructionFailed && e.kind() != ErrorKind::CertificationFailed &&
                e.kind() != ErrorKind::TooManyDeleted)
                throw;
            phase_fail(0, "level " + std::to_string(i) + ": " + e.what());
        }
        Level& lvl = levels[static_cast<size_t>(i)];
        lvl.orchard = std::move(sc.orchard);
        lvl.q = sc.q;
        lvl.bad = absorption_bad_set(g, lvl.orchard.subset(lvl.q), p, r);
        lvl.avoid = lvl.bad.size() <= bad_bound;
        u = u.minus(lvl.orchard.vertices());
        if (lvl.avoid) u = u.minus(lvl.bad);
        LevelRecord& rec = cert.level_records[static_cast<size_t>(i)];
        rec.order = m;
        rec.size = lvl.orchard.size();
        rec.reserved = static_cast<int>(lvl.q.size());
        rec.bad_set = lvl.bad.size();
        rec.bad_set_avoided = lvl.avoid;
        rec.path = sc.path;
    }

    VertexSet x = absorber ? absorber->vertices() : VertexSet{};
    for (const auto& lvl : levels) x = x.unite(lvl.orchard.vertices());
    const Level& bottom = levels.front();
    const VertexSet z = bottom.avoid ? bottom.bad.minus(x) : VertexSet{};
    cert.bad_cover = z.size();

    // Phase 1: every vertex of Z joins r-1 reserve vertices.
    std::vector<VertexSet> s1;
    VertexSet yj = y.minus(z);
    for (int b : z) {
        auto c = clique_through(g, b, yj, r, mix_seed(seed, 200000ULL + static_cast<uint64_t>(b)), search);
        if (!c) phase_fail(1, "no clique from bad vertex " + std::to_string(b) + " into the reserve");
        yj = yj.minus(*c);
        s1.push_back(std::move(*c));
    }

    // Phase 2: greedy cliques on the free vertices, those weakly tied to Q_0 first.
    std::vector<VertexSet> s2;
    VertexSet w = all.minus(x);
    for (const auto& c : s1) w = w.minus(c);
    // Weakest link of each vertex into the round-robin parts of Q_0, the quantity behind B_0.
    std::vector<int> q0_link(static_cast<size_t>(n), 0);
    {
        const int parts = 2 * (r - 1);
        std::vector<std::vector<int>> part(static_cast<size_t>(parts));
        for (size_t i = 0; i < bottom.q.size(); ++i) {
            const auto& rem = bottom.orchard.tree(bottom.q[i]).removable;
            auto& dst = part[i % static_cast<size_t>(parts)];
            dst.insert(dst.end(), rem.begin(), rem.end());
        }
        std::vector<Bits> masks;
        for (const auto& pt : part) masks.push_back(g.mask(VertexSet(pt)));
        for (int v = 0; v < n; ++v) {
            int worst = n;
            for (const auto& mk : masks) worst = std::min(worst, Bits::and_count(g.row(v), mk));
            q0_link[static_cast<size_t>(v)] = worst;
        }
    }
    const double stop_below = pr.zeta * n;
    while (w.size() >= stop_below && w.size() > 0) {
        const Bits wm = g.mask(w);
        std::vector<std::tuple<int, int, int>> order;  // (Q_0 link, free degree, vertex)
        for (int v : w) order.emplace_back(q0_link[static_cast<size_t>(v)], Bits::and_count(g.row(v), wm), v);
        std::sort(order.begin(), order.end());
        std::optional<VertexSet> found;
        for (auto [link, deg, v] : order) {
            found = clique_through(g, v, w, r, mix_seed(seed, 300000ULL + s2.size() * 1000ULL + static_cast<uint64_t>(v)),
                                   search);
            if (found) break;
        }
        if (!found)
            phase_fail(2, "no r-clique among " + std::to_string(w.size()) + " free vertices (threshold " +
                              std::to_string(stop_below) + ")");
        w = w.minus(*found);
        s2.push_back(std::move(*found));
    }
    cert.greedy_leftover = w.size();

    // Phase 3: absorb the leftover into Q_i, shrink O_i, pass the unmatched trees up.
    std::vector<VertexSet> s3;
    Orchard pending = Orchard::of_vertices(w, r);
    for (int i = 0; i < pr.levels; ++i) {
        const Level& lvl = levels[static_cast<size_t>(i)];
        std::string why = "no draws";
        auto dr = cascade_step(g, lvl, pending, r, mix_seed(seed, 400 + i), pr.budgets.shrink_draws, search, why);
        if (!dr) phase_fail(3, "level " + std::to_string(i) + " could not absorb " + std::to_string(pending.size()) +
                                   " trees: " + why);
        s3.insert(s3.end(), dr->absorbed.begin(), dr->absorbed.end());
        s3.insert(s3.end(), dr->shrunk.begin(), dr->shrunk.end());
        LevelRecord& rec = cert.level_records[static_cast<size_t>(i)];
        rec.absorbed = static_cast<int>(dr->used.size());
        rec.leftover = static_cast<int>(dr->leftover.size());
        pending = lvl.orchard.subset(dr->leftover);
    }

    // Phase 4: the absorbing structure takes the top-level leftover.
    std::vector<VertexSet> s4;
    if (absorber) {
        AbsorbParams ap;
        ap.search = search;
        try {
            s4 = absorb(g, *absorber, pending, mix_seed(seed, 500), ap).factor;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Failed && e.kind() != ErrorKind::DivisibilityViolation) throw;
            phase_fail(4, e.what());
        }
    } else if (!pending.empty()) {
        phase_fail(4, std::to_string(pending.size()) + " top-level trees left and no absorbing structure");
    }

    cert.phases = {static_cast<int>(s1.size()), static_cast<int>(s2.size()), static_cast<int>(s3.size()),
                   static_cast<int>(s4.size())};
    for (auto* part : {&s1, &s2, &s3, &s4}) cert.cliques.insert(cert.cliques.end(), part->begin(), part->end());
    return cert;
}

}  // namespace

FactorCertificate find_clique_factor(const Graph& g, const ParameterProfile& profile) {
    validate_profile(profile);
    const int r = profile.r;
    if (g.n() % r != 0)
        throw Error(ErrorKind::DivisibilityViolation,
                    std::to_string(g.n()) + " vertices is not a multiple of " + std::to_string(r));
    std::vector<std::string> failures;
    int last_phase = 0;
    for (int attempt = 0; attempt < profile.budgets.attempts; ++attempt) {
        const uint64_t seed = mix_seed(profile.seed, static_cast<uint64_t>(attempt));
        try {
            FactorCertificate cert = run_once(g, profile, seed);
            FactorReport rep = verify_factor(g, cert.cliques);
            if (!rep || (!cert.cliques.empty() && cert.cliques.front().size() != r))
                throw Error(ErrorKind::PhaseFailed, std::string("assembled factor rejected: ") + to_string(rep.violation) +
                                                        " " + rep.detail, 4);
            cert.verified = true;
            cert.attempt = attempt;
            cert.failures = std::move(failures);
            return cert;
        } catch (const PhaseError& e) {
            last_phase = e.phase;
            failures.push_back("attempt " + std::to_string(attempt) + " phase " + std::to_string(e.phase) + ": " + e.what);
        }
    }
    std::string msg = "all " + std::to_string(profile.budgets.attempts) + " attempts failed";
    if (!failures.empty()) msg += "; last: " + failures.back();
    throw Error(ErrorKind::PhaseFailed, msg, last_phase);
}

std::vector<VertexSet> exact_factor_baseline(const Graph& g, int r) {
    const int n = g.n();
    if (r < 1) throw Error(ErrorKind::InvalidSpec, "r must be positive");
    if (n > kExactSizeCap)
        throw Error(ErrorKind::TooLarge, std::to_string(n) + " vertices exceeds the exact cap of " +
                                             std::to_string(kExactSizeCap));
    if (n % r != 0)
        throw Error(ErrorKind::Infeasible, std::to_string(n) + " vertices is not a multiple of " + std::to_string(r));
    std::vector<uint64_t> adj(static_cast<size_t>(n), 0);
    for (auto [a, b] : g.edges()) {
        adj[static_cast<size_t>(a)] |= 1ULL << b;
        adj[static_cast<size_t>(b)] |= 1ULL << a;
    }
    std::unordered_set<uint64_t> dead;
    std::vector<uint64_t> chosen;

    // Grows `clique` by `need` vertices of cand, each pick restricting cand to its neighbours.
    std::function<bool(uint64_t)> solve;
    std::function<bool(uint64_t, uint64_t, uint64_t, int)> extend = [&](uint64_t open, uint64_t clique, uint64_t cand,
                                                                         int need) -> bool {
        if (need == 0) {
            chosen.push_back(clique);
            if (solve(open & ~clique)) return true;
            chosen.pop_back();
            return false;
        }
        while (cand) {
            const int v = __builtin_ctzll(cand);
            cand &= cand - 1;
            if (__builtin_popcountll(cand & adj[static_cast<size_t>(v)]) < need - 1) continue;
            if (extend(open, clique | (1ULL << v), cand & adj[static_cast<size_t>(v)], need - 1)) return true;
        }
        return false;
    };
    solve = [&](uint64_t open) -> bool {
        if (open == 0) return true;
        if (dead.count(open)) return false;
        for (uint64_t rest = open; rest; rest &= rest - 1) {
            const int v = __builtin_ctzll(rest);
            if (__builtin_popcountll(adj[static_cast<size_t>(v)] & open) < r - 1) {
                dead.insert(open);
                return false;
            }
        }
        const int v = __builtin_ctzll(open);
        if (extend(open, 1ULL << v, adj[static_cast<size_t>(v)] & open, r - 1)) return true;
        dead.insert(open);
        return false;
    };
    const uint64_t full = n == 64 ? ~0ULL : (1ULL << n) - 1;
    if (!solve(full)) throw Error(ErrorKind::Infeasible, "no K_" + std::to_string(r) + "-factor exists");
    std::vector<VertexSet> out;
    for (uint64_t c : chosen) {
        std::vector<int> vs;
        for (; c; c &= c - 1) vs.push_back(__builtin_ctzll(c));
        out.emplace_back(std::move(vs));
    }
    return out;
}

const char* to_string(Violation v) {
    switch (v) {
        case Violation::None: return "none";
        case Violation::Size: return "size";
        case Violation::Range: return "range";
        case Violation::Disjointness: return "disjointness";
        case Violation::Adjacency: return "adjacency";
        case Violation::Coverage: return "coverage";
    }
    return "unknown";
}

FactorReport verify_factor(const Graph& g, const std::vector<VertexSet>& cliques) {
    const int n = g.n();
    if (cliques.empty()) {
        if (n == 0) return {};
        return {Violation::Coverage, "no cliques for " + std::to_string(n) + " vertices"};
    }
    const int r = cliques.front().size();
    std::vector<int> owner(static_cast<size_t>(n), -1);
    for (size_t i = 0; i < cliques.size(); ++i) {
        const VertexSet& c = cliques[i];
        if (c.size() != r || r == 0)
            return {Violation::Size, "clique " + std::to_string(i) + " has " + std::to_string(c.size()) + " vertices"};
        for (int v : c) {
            if (v < 0 || v >= n) return {Violation::Range, "vertex " + std::to_string(v) + " is not in the graph"};
            int& o = owner[static_cast<size_t>(v)];
            if (o >= 0)
                return {Violation::Disjointness, "vertex " + std::to_string(v) + " lies in cliques " + std::to_string(o) +
                                                     " and " + std::to_string(i)};
            o = static_cast<int>(i);
        }
        for (int a : c)
            for (int b : c)
                if (a < b && !g.adjacent(a, b))
                    return {Violation::Adjacency, "clique " + std::to_string(i) + " misses edge " + std::to_string(a) +
                                                      "-" + std::to_string(b)};
    }
    for (int v = 0; v < n; ++v)
        if (owner[static_cast<size_t>(v)] < 0) return {Violation::Coverage, "vertex " + std::to_string(v) + " is uncovered"};
    return {};
}

std::string factor_certificate_to_json(const FactorCertificate& c) {
    nlohmann::json j;
    j["verified"] = c.verified;
    j["cliques"] = nlohmann::json::array();
    for (const auto& s : c.cliques) j["cliques"].push_back(s.items());
    j["phases"] = c.phases;
    j["profile"] = nlohmann::json::parse(profile_to_json(c.profile));
    j["attempt"] = c.attempt;
    j["run_seed"] = c.run_seed;
    j["reserve"] = c.reserve;
    j["bad_cover"] = c.bad_cover;
    j["greedy_leftover"] = c.greedy_leftover;
    j["absorber_vertices"] = c.absorber_vertices;
    j["levels"] = nlohmann::json::array();
    for (const auto& l : c.level_records)
        j["levels"].push_back({{"order", l.order},
                               {"size", l.size},
                               {"reserved", l.reserved},
                               {"absorbed", l.absorbed},
                               {"leftover", l.leftover},
                               {"bad_set", l.bad_set},
                               {"bad_set_avoided", l.bad_set_avoided},
                               {"path", to_string(l.path)}});
    j["failures"] = c.failures;
    return j.dump();
}

FactorCertificate factor_certificate_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        FactorCertificate c;
        c.verified = j.at("verified").get<bool>();
        for (const auto& s : j.at("cliques")) c.cliques.emplace_back(s.get<std::vector<int>>());
        c.phases = j.at("phases").get<std::array<int, 4>>();
        c.profile = profile_from_json(j.at("profile").dump());
        c.attempt = j.value("attempt", 0);
        c.run_seed = j.value("run_seed", uint64_t{0});
        c.reserve = j.value("reserve", 0);
        c.bad_cover = j.value("bad_cover", 0);
        c.greedy_leftover = j.value("greedy_leftover", 0);
        c.absorber_vertices = j.value("absorber_vertices", 0);
        for (const auto& l : j.value("levels", nlohmann::json::array())) {
            LevelRecord rec;
            rec.order = l.at("order").get<int>();
            rec.size = l.at("size").get<int>();
            rec.reserved = l.at("reserved").get<int>();
            rec.absorbed = l.at("absorbed").get<int>();
            rec.leftover = l.at("leftover").get<int>();
            rec.bad_set = l.at("bad_set").get<int>();
            rec.bad_set_avoided = l.at("bad_set_avoided").get<bool>();
            rec.path = path_named(l.at("path").get<std::string>());
            c.level_records.push_back(rec);
        }
        c.failures = j.value("failures", std::vector<std::string>{});
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad certificate json: ") + e.what());
    }
}

}  // namespace kfactor
