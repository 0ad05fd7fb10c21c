#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kfactor/cliques.hpp"
#include "kfactor/graph.hpp"

namespace kfactor {

// Auxiliary tree on nodes 0..m-1; node i is mapped to removable[i], edge e to interior[e].
struct DiamondTree {
    int r = 3;
    std::vector<std::pair<int, int>> aux_edges;
    std::vector<int> removable;
    std::vector<VertexSet> interior;

    int order() const { return static_cast<int>(removable.size()); }
    VertexSet removables() const { return VertexSet(removable); }
    VertexSet vertices() const;
    std::vector<int> node_degrees() const;
    // Removable vertices whose node has degree > 1.
    VertexSet non_leaves() const;
    friend bool operator==(const DiamondTree&, const DiamondTree&) = default;
};

struct ValidationReport {
    bool ok = true;
    std::string clause;  // empty when ok
    std::string detail;
    explicit operator bool() const { return ok; }
};

ValidationReport validate_diamond_tree(const Graph& g, const DiamondTree& d);

// m-1 disjoint r-cliques covering V(d) minus v. Throws NotRemovable.
std::vector<VertexSet> extract_factor_without(const DiamondTree& d, int v);

bool is_scattered(const DiamondTree& d, int delta);

// Keep exactly the removables in `keep`; every dropped node must be a leaf of the current tree
// (repeated peeling is allowed). Throws InvalidSpec if the kept nodes do not span a subtree.
DiamondTree restrict_to(const DiamondTree& d, const VertexSet& keep);

struct BuildOptions {
    SearchOptions search{.restarts = 8, .filter_fraction = 0.25, .p = -1.0, .node_budget = 20000};
    int max_steps = 100000;
};

// Star with δ leaves, centre in u0, leaves in u1, interior cliques a matching in u2.
DiamondTree build_diamond_star(const Graph& g, const VertexSet& u0, const VertexSet& u1, const VertexSet& u2,
                               int r, int delta, uint64_t seed, const BuildOptions& opts = {});

// δ-scattered tree of order in [z, z+δ]; removables in u, interior cliques a matching in w.
DiamondTree build_scattered_tree(const Graph& g, const VertexSet& u, const VertexSet& w, int r, int z, int delta,
                                 uint64_t seed, const BuildOptions& opts = {});

class FlexibleSelection {
public:
    FlexibleSelection(const Graph& g, DiamondTree base, VertexSet x, VertexSet y);

    const VertexSet& x() const { return x_; }
    const VertexSet& y() const { return y_; }
    const DiamondTree& base() const { return base_; }
    // Diamond tree with removables exactly x ∪ y_prime; validated before returning.
    DiamondTree build(const VertexSet& y_prime) const;

private:
    const Graph* g_;
    DiamondTree base_;
    VertexSet x_, y_;
};

FlexibleSelection select_flexible_removable(const Graph& g, const VertexSet& u, const VertexSet& w, int r, int z,
                                            int delta, uint64_t seed, const BuildOptions& opts = {});

std::string diamond_to_json(const DiamondTree& d);
DiamondTree diamond_from_json(const std::string& text);

}  // namespace kfactor
