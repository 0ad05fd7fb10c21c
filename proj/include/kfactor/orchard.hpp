#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kfactor/cliques.hpp"
#include "kfactor/diamond.hpp"
#include "kfactor/fracmatch.hpp"

namespace kfactor {

// Pairwise vertex-disjoint diamond trees. The order m is the minimum tree order; valid orchards
// keep every tree order within [m, 2m].
class Orchard {
public:
    Orchard() = default;
    explicit Orchard(std::vector<DiamondTree> trees) : trees_(std::move(trees)) {}
    // Orchard of single-vertex trees, one per vertex.
    static Orchard of_vertices(const VertexSet& vs, int r);

    int size() const { return static_cast<int>(trees_.size()); }
    bool empty() const { return trees_.empty(); }
    int order() const;
    const std::vector<DiamondTree>& trees() const { return trees_; }
    const DiamondTree& tree(int i) const { return trees_[static_cast<size_t>(i)]; }
    VertexSet vertices() const;
    VertexSet removables() const;
    Orchard subset(const std::vector<int>& indices) const;
    Orchard without(const std::vector<int>& indices) const;

private:
    std::vector<DiamondTree> trees_;
};

ValidationReport validate_orchard(const Graph& g, const Orchard& o);

// k trees of order exactly z, removables drawn from u and interiors from w, disjoint from each other.
// z = 1 gives single vertices. Throws ConstructionFailed.
Orchard grow_orchard(const Graph& g, const VertexSet& u, const VertexSet& w, int r, int k, int z, int delta,
                     uint64_t seed, const BuildOptions& opts = {});

struct KrEdge {
    std::vector<int> trees;    // sorted tree indices
    std::vector<int> witness;  // witness[j] is a removable vertex of trees[j]; together a K_r
};

struct KrHypergraph {
    int k = 0;
    int r = 0;
    std::vector<KrEdge> edges;
    bool exhaustive = true;  // sampled mode may miss edges, never invents them

    Hypergraph as_hypergraph() const;
};

struct HypergraphMode {
    bool exhaustive = true;
    int restarts = 4;  // sampled mode: greedy restarts per r-subset, no exhaustive fallback
    uint64_t seed = 0;
    static HypergraphMode full() { return {}; }
    static HypergraphMode sampled(int restarts, uint64_t seed) { return {false, restarts, seed}; }
};

KrHypergraph build_kr_hypergraph(const Graph& g, const Orchard& o, const HypergraphMode& mode = {});
// Restricted to the trees listed in `alive`; indices in the result still refer to `o`.
KrHypergraph build_kr_hypergraph(const Graph& g, const Orchard& o, const std::vector<int>& alive,
                                 const HypergraphMode& mode = {});

// Witness cliques plus per-tree factors. Throws NotAMatching when two edges share a tree.
std::vector<VertexSet> matching_to_factor(const Orchard& o, const std::vector<KrEdge>& matching);

struct AbsorbParams {
    double p = -1.0;  // negative: 2|E|/n^2
    SearchOptions search{};
};

struct AbsorptionResult {
    std::vector<int> used;  // indices into big, (r-1) per small tree
    std::vector<VertexSet> factor;
    VertexSet bad_set;
    bool avoids_bad_set = true;
    bool size_constraint = true;   // k <= K/(8r)
    bool order_constraint = true;  // kM <= mK
    int served_in_round_two = 0;
};

// Vertices outside V(big) with fewer than p|Y_j|/2 neighbours in some part's removables.
VertexSet absorption_bad_set(const Graph& g, const Orchard& big, double p, int r);

// Two-round service of the small trees against round-robin parts of big. Throws Failed(round, index).
AbsorptionResult absorb_orchard(const Graph& g, const Orchard& big, const Orchard& small, int r, uint64_t seed,
                                const AbsorbParams& params = {});

// Matching in H(o) restricted to `alive`: best of the PFM-family sparsifier and greedy passes.
std::vector<KrEdge> shrink_matching(const Graph& g, const Orchard& o, const std::vector<int>& alive, uint64_t seed,
                                    const HypergraphMode& mode = {});

struct ShrinkReport {
    int threshold = 0;  // ceil(k^(1-gamma))
    std::vector<int> uncovered;
    std::vector<int> removed;  // |Q'| per trial
    bool all_pass = true;
    bool sampled = true;  // random Q' only, never a certificate
};

ShrinkReport test_shrinkability(const Graph& g, const Orchard& o, const std::vector<int>& q, double gamma,
                                int trials, uint64_t seed, const HypergraphMode& mode = {});

std::string orchard_to_json(const Orchard& o);
Orchard orchard_from_json(const std::string& text);
std::string kr_hypergraph_to_json(const KrHypergraph& h);

}  // namespace kfactor
