#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kfactor/graph.hpp"

namespace kfactor {

// A vertex set verified to be a clique in the graph it was built against.
class Clique {
public:
    static Clique make(const Graph& g, VertexSet vertices);  // throws InvalidSpec if not a clique

    const VertexSet& vertices() const { return vertices_; }
    int size() const { return vertices_.size(); }

private:
    explicit Clique(VertexSet v) : vertices_(std::move(v)) {}
    VertexSet vertices_;
};

struct DegreeTarget {
    VertexSet set;
    int min_degree = 0;
};

// Clique of size r_star with u_i in sets[i] for i < r_star. Sets beyond r_star
// are look-ahead sets: they only steer candidate filtering.
struct TraversalQuery {
    int r_star = 0;
    std::vector<VertexSet> sets;
    std::vector<Edge> forbidden;
    std::vector<DegreeTarget> degree_targets;
};

struct SearchOptions {
    int restarts = 200;
    // Candidates whose common degree into a later set U_j falls below
    // (fraction * p)^i |U_j| are skipped by the greedy passes.
    double filter_fraction = 0.25;
    double p = -1.0;  // density used by the filter; negative means measure it
    long long node_budget = 200000;  // exhaustive fallback; 0 disables it
};

std::optional<Clique> try_find_traversing_clique(const Graph& g, const TraversalQuery& q, uint64_t seed,
                                                 const SearchOptions& opts = {});
// Throws NotFound when the budget is exhausted.
Clique find_traversing_clique(const Graph& g, const TraversalQuery& q, uint64_t seed,
                              const SearchOptions& opts = {});

// A `size`-clique inside w0 whose common neighbourhood meets every target in at least min_deg vertices.
std::optional<Clique> try_find_popular_clique(const Graph& g, const VertexSet& w0,
                                              const std::vector<VertexSet>& targets, int size, int min_deg,
                                              uint64_t seed, const SearchOptions& opts = {});
Clique find_popular_clique(const Graph& g, const VertexSet& w0, const std::vector<VertexSet>& targets, int size,
                           int min_deg, uint64_t seed, const SearchOptions& opts = {});

// True if the vertices can be assigned injectively to the sets with v_i ∈ set_i (bipartite matching).
bool traverses(const VertexSet& vertices, const std::vector<VertexSet>& sets);

}  // namespace kfactor
