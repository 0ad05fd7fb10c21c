#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kfactor/diamond.hpp"
#include "kfactor/orchard.hpp"

namespace kfactor {

// Bipartite graph with I = 0..3t-1 on one side and J = 0..4t-1 on the other.
// J1 = 0..2t-1, the flexible half J2 = 2t..4t-1.
class Template {
public:
    Template() = default;
    // Edges are (i, j) pairs; duplicates collapse. Throws InvalidSpec on out-of-range ends.
    Template(int t, std::vector<std::pair<int, int>> edges);

    int t() const { return t_; }
    int i_count() const { return 3 * t_; }
    int j_count() const { return 4 * t_; }
    bool flexible(int j) const { return j >= 2 * t_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& j_neighbors(int i) const { return i_adj_[static_cast<size_t>(i)]; }
    const std::vector<int>& i_neighbors(int j) const { return j_adj_[static_cast<size_t>(j)]; }
    int max_degree() const;

    // Perfect matching of I into J minus `removed` as (i, j) pairs; nullopt when none exists.
    std::optional<std::vector<std::pair<int, int>>> matching_without(const std::vector<int>& removed) const;

    friend bool operator==(const Template& a, const Template& b) { return a.t_ == b.t_ && a.edges_ == b.edges_; }

private:
    int t_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> i_adj_, j_adj_;
};

struct TemplateVerifyMode {
    bool exhaustive = true;
    int samples = 1000;
    uint64_t seed = 0;
    static TemplateVerifyMode full() { return {}; }
    static TemplateVerifyMode sampled(int samples, uint64_t seed) { return {false, samples, seed}; }
};

struct TemplateCheck {
    bool ok = true;
    bool exhaustive = true;
    long long checked = 0;
    std::vector<int> failing_subset;  // J indices (all in J2), empty when ok
    explicit operator bool() const { return ok; }
};

// Every tested t-subset of J2 must leave a perfect matching between I and the rest of J.
TemplateCheck verify_template(const Template& tpl, const TemplateVerifyMode& mode = {});

// Exhaustive check for t <= 6, 1000 sampled subsets above. Throws InvalidSpec for t < 2,
// SearchExhausted when no template within max_deg is found.
Template build_template(int t, int max_deg, uint64_t seed);

std::string template_to_json(const Template& tpl);
Template template_from_json(const std::string& text);

struct IntersectOptions {
    int z = 0;               // removable budget; 0 means ceil(|U|/(4r)), at least 2
    int delta = 0;           // 0 means min(z, max(1, p^(r-1)|w|/8))
    int order_cap = 0;       // 0 means n^(2/3)
    int per_target_cap = 0;  // 0 means n^(1/6)
    BuildOptions build{};
};

struct IntersectingTree {
    DiamondTree tree;
    std::vector<int> hit;             // target indices met by the removables
    std::vector<int> per_target;      // |V(tree) ∩ target| for each target
    int required_hits = 0;            // ceil(|targets|/(4r))
    int order_cap = 0;
    int per_target_cap = 0;
    int heavy_targets = 0;            // targets met in more than per_target_cap vertices
    bool enough_hits() const { return static_cast<int>(hit.size()) >= required_hits; }
    bool within_order_cap() const { return tree.order() <= order_cap; }
};

// Removables inside the union of the targets, interiors a matching in w. The removable set is the
// selection's X plus one Y vertex per target that Y meets. Throws EmptyQuery, InvalidSpec, ConstructionFailed.
IntersectingTree build_intersecting_tree(const Graph& g, const VertexSet& w, const std::vector<VertexSet>& targets,
                                         int r, uint64_t seed, const IntersectOptions& opts = {});

struct StructureOptions {
    int r = 3;
    int candidates = 0;         // 0 means 8t
    int pool_size = 0;          // 0 means ceil(|w|^(1/3))
    double alpha = 0.1;
    int max_subtrees = 0;       // 0 means ceil(log(2/alpha) / log(4r/(4r-1)))
    int template_max_degree = 40;
    BuildOptions build{};
};

struct StructureStats {
    int candidates = 0;
    int subtree_cap = 0;
    std::vector<int> pools_hit;    // per tree: candidate pools X_h met by its removables
    std::vector<int> cliques_hit;  // per tree: candidate cliques S_h it uses
    std::vector<int> subtrees;     // per tree: number of joined sub-trees
};

struct AbsorbingStructure {
    Template tpl;
    int r = 3;
    int order = 0;                     // M
    std::vector<VertexSet> i_cliques;  // S_i for i in I
    Orchard j_orchard;                 // D_j for j in J
    StructureStats stats;

    int t() const { return tpl.t(); }
    VertexSet vertices() const;
    // Trees indexed by J2, in order.
    Orchard flexible() const;
};

ValidationReport validate_absorbing_structure(const Graph& g, const AbsorbingStructure& a);

// Vertices a leftover orchard must avoid: the absorb_orchard filter applied to the flexible half.
VertexSet absorbing_bad_set(const Graph& g, const AbsorbingStructure& a, double p = -1.0);

// Throws StageFailed(1|2|3).
AbsorbingStructure build_absorbing_structure(const Graph& g, const VertexSet& w, int t, int order, uint64_t seed,
                                             const StructureOptions& opts = {});

struct StructureAbsorption {
    std::vector<VertexSet> factor;
    std::vector<int> absorbed_into;  // P1 as J indices
    std::vector<int> padding;        // P2 as J indices
    std::vector<std::pair<int, int>> matching;  // template edges used
    bool avoids_bad_set = true;
    bool size_constraint = true;     // |rem| <= t/(4r)
};

// Factor of V(a) ∪ V(rem). Throws DivisibilityViolation, InvalidSpec (overlap),
// Failed(1|2|3|4, index): absorption, padding, template matching, verification.
StructureAbsorption absorb(const Graph& g, const AbsorbingStructure& a, const Orchard& rem, uint64_t seed,
                           const AbsorbParams& params = {});

std::string structure_to_json(const AbsorbingStructure& a);
AbsorbingStructure structure_from_json(const std::string& text);

}  // namespace kfactor
