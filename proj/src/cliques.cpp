#include "kfactor/cliques.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kfactor/bipartite.hpp"
#include "kfactor/error.hpp"
#include "kfactor/random.hpp"

namespace kfactor {

Clique Clique::make(const Graph& g, VertexSet vertices) {
    if (!is_clique(g, vertices)) throw Error(ErrorKind::InvalidSpec, "vertex set is not a clique");
    return Clique(std::move(vertices));
}

bool traverses(const VertexSet& vertices, const std::vector<VertexSet>& sets) {
    if (vertices.size() != static_cast<int>(sets.size())) return false;
    std::vector<std::vector<int>> adj(static_cast<size_t>(vertices.size()));
    for (int i = 0; i < vertices.size(); ++i)
        for (size_t j = 0; j < sets.size(); ++j)
            if (sets[j].contains(vertices[i])) adj[static_cast<size_t>(i)].push_back(static_cast<int>(j));
    return matching_size(max_bipartite_matching(vertices.size(), static_cast<int>(sets.size()), adj)) ==
           vertices.size();
}

namespace {

class Searcher {
public:
    Searcher(const Graph& h, const TraversalQuery& q, const SearchOptions& opts, bool symmetric)
        : h_(h), q_(q), opts_(opts), symmetric_(symmetric) {
        for (const auto& s : q.sets) {
            masks_.push_back(h.mask(s));
            sizes_.push_back(s.size());
        }
        for (const auto& t : q.degree_targets) target_masks_.push_back(h.mask(t.set));
        p_ = opts.p > 0 ? opts.p : std::max(h.density(), 1e-9);
    }

    std::optional<VertexSet> run(Rng& rng) {
        int r = q_.r_star;
        if (r <= 0 || r > static_cast<int>(q_.sets.size())) return std::nullopt;
        if (!targets_ok(h_.full_mask())) return std::nullopt;
        for (int attempt = 0; attempt < opts_.restarts; ++attempt) {
            if (auto s = greedy(rng, attempt)) return s;
        }
        if (opts_.node_budget > 0) {
            nodes_ = 0;
            std::vector<int> chosen;
            if (dfs(h_.full_mask(), chosen, rng)) return VertexSet(chosen);
        }
        return std::nullopt;
    }

private:
    bool targets_ok(const Bits& common) const {
        for (size_t t = 0; t < target_masks_.size(); ++t)
            if (Bits::and_count(common, target_masks_[t]) < q_.degree_targets[t].min_degree) return false;
        return true;
    }

    // Candidates for position `step` given the running common neighbourhood, best first.
    std::vector<std::pair<double, int>> candidates(const Bits& common, int step, int last, bool filter,
                                                   Rng& rng) const {
        Bits pool = common & masks_[static_cast<size_t>(step)];
        std::vector<int> verts = pool.to_set().items();
        if (symmetric_) verts.erase(verts.begin(), std::upper_bound(verts.begin(), verts.end(), last));
        std::shuffle(verts.begin(), verts.end(), rng);
        int depth = step + 1;
        double threshold_scale = std::pow(opts_.filter_fraction * p_, depth);
        std::vector<std::pair<double, int>> out;
        out.reserve(verts.size());
        for (int v : verts) {
            Bits next = common & h_.row(v);
            if (!targets_ok(next)) continue;
            double score = 0.0;
            bool keep = true;
            for (size_t j = static_cast<size_t>(step) + 1; j < masks_.size(); ++j) {
                int c = Bits::and_count(next, masks_[j]);
                if (j < static_cast<size_t>(q_.r_star) && c == 0) { keep = false; break; }
                if (filter && c < threshold_scale * sizes_[j]) { keep = false; break; }
                score += sizes_[j] ? static_cast<double>(c) / sizes_[j] : 0.0;
            }
            if (keep) out.emplace_back(score, v);
        }
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        return out;
    }

    std::optional<VertexSet> greedy(Rng& rng, int attempt) {
        Bits common = h_.full_mask();
        std::vector<int> chosen;
        int last = -1;
        for (int step = 0; step < q_.r_star; ++step) {
            auto cand = candidates(common, step, last, true, rng);
            if (cand.empty()) return std::nullopt;
            size_t pick = 0;
            if (attempt > 0) {
                size_t top = std::max<size_t>(1, cand.size() / 4);
                pick = std::uniform_int_distribution<size_t>(0, top - 1)(rng);
            }
            int v = cand[pick].second;
            chosen.push_back(v);
            common &= h_.row(v);
            last = v;
        }
        return VertexSet(chosen);
    }

    bool dfs(const Bits& common, std::vector<int>& chosen, Rng& rng) {
        int step = static_cast<int>(chosen.size());
        if (step == q_.r_star) return true;
        if (++nodes_ > opts_.node_budget) return false;
        int last = chosen.empty() ? -1 : chosen.back();
        for (auto& [score, v] : candidates(common, step, last, false, rng)) {
            chosen.push_back(v);
            if (dfs(common & h_.row(v), chosen, rng)) return true;
            chosen.pop_back();
            if (nodes_ > opts_.node_budget) return false;
        }
        return false;
    }

    const Graph& h_;
    const TraversalQuery& q_;
    const SearchOptions& opts_;
    bool symmetric_;
    std::vector<Bits> masks_;
    std::vector<int> sizes_;
    std::vector<Bits> target_masks_;
    double p_ = 0.5;
    long long nodes_ = 0;
};

std::optional<Clique> search(const Graph& g, const TraversalQuery& q, uint64_t seed, const SearchOptions& opts,
                             bool symmetric) {
    Rng rng(seed);
    if (q.forbidden.empty()) {
        Searcher s(g, q, opts, symmetric);
        if (auto v = s.run(rng)) return Clique::make(g, *v);
        return std::nullopt;
    }
    Graph h = g.without(q.forbidden);
    Searcher s(h, q, opts, symmetric);
    if (auto v = s.run(rng)) return Clique::make(g, *v);
    return std::nullopt;
}

}  // namespace

std::optional<Clique> try_find_traversing_clique(const Graph& g, const TraversalQuery& q, uint64_t seed,
                                                 const SearchOptions& opts) {
    if (q.r_star > static_cast<int>(q.sets.size()))
        throw Error(ErrorKind::InvalidSpec, "r_star exceeds the number of sets");
    return search(g, q, seed, opts, false);
}

Clique find_traversing_clique(const Graph& g, const TraversalQuery& q, uint64_t seed, const SearchOptions& opts) {
    if (auto c = try_find_traversing_clique(g, q, seed, opts)) return *c;
    throw Error(ErrorKind::NotFound, "no traversing clique within budget");
}

std::optional<Clique> try_find_popular_clique(const Graph& g, const VertexSet& w0,
                                              const std::vector<VertexSet>& targets, int size, int min_deg,
                                              uint64_t seed, const SearchOptions& opts) {
    if (targets.empty()) throw Error(ErrorKind::InvalidSpec, "find_popular_clique needs at least one target");
    TraversalQuery q;
    q.r_star = size;
    q.sets.assign(static_cast<size_t>(size), w0);
    for (const auto& t : targets) {
        q.sets.push_back(t);
        q.degree_targets.push_back({t, min_deg});
    }
    return search(g, q, seed, opts, true);
}

Clique find_popular_clique(const Graph& g, const VertexSet& w0, const std::vector<VertexSet>& targets, int size,
                           int min_deg, uint64_t seed, const SearchOptions& opts) {
    if (auto c = try_find_popular_clique(g, w0, targets, size, min_deg, seed, opts)) return *c;
    throw Error(ErrorKind::NotFound, "no popular clique within budget");
}

}  // namespace kfactor
