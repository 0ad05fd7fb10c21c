#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kfactor/diamond.hpp"
#include "kfactor/orchard.hpp"

namespace kfactor {

// Pairwise disjoint vertex sets, each of size at least m. `reserved` lists the sets forming the
// distinguished subsystem (indices into `sets`).
struct SetSystem {
    std::vector<VertexSet> sets;
    int m = 0;
    std::vector<int> reserved;

    int k() const { return static_cast<int>(sets.size()); }
    VertexSet union_all() const;
    // Union of the sets not listed in `reserved`.
    VertexSet unreserved_union() const;

    static SetSystem of_removables(const Orchard& o);
};

ValidationReport validate_set_system(const SetSystem& lam);

struct HeavyPair {
    int vertex = 0;
    int set = 0;
    int degree = 0;
};

struct LocalShrinkReport {
    double degree_floor = 0.0;   // alpha p k m
    bool reserved_large_enough = true;  // |reserved| >= gamma k
    std::vector<int> weak_sets;  // no vertex reaches the floor into the unreserved union
    std::vector<HeavyPair> heavy;  // cross degrees above deg_cap

    bool condition_one() const { return weak_sets.empty(); }
    bool condition_two() const { return heavy.empty(); }
    bool ok() const { return reserved_large_enough && condition_one() && condition_two(); }
};

// p < 0 means the measured density.
LocalShrinkReport check_local_shrink_conditions(const Graph& g, const SetSystem& lam, double gamma, double alpha,
                                                double deg_cap, double p = -1.0);

struct CleanupResult {
    SetSystem system;         // the k survivors; reserved marks the assembled Γ
    std::vector<int> kept;    // indices into the input, in output order
    std::vector<int> binned;  // indices into the input, in deletion order
    int target_k = 0;
    double degree_floor = 0.0;
};

// Target k = floor(|lam| / (1 + gamma)). Throws TooManyDeleted, InvalidSpec.
CleanupResult cleanup_system(const Graph& g, const SetSystem& lam, double gamma, double alpha, double p = -1.0);

struct LowDegreeOptions {
    int r = 3;
    int z = 0;         // selection size; 0 means min(4m, 2|w'| / (3(r-1)))
    int attempts = 16;  // independent samples, best kept
    BuildOptions build{};
};

struct LowDegreeTree {
    DiamondTree tree;
    VertexSet q;             // |q| = m, q ⊆ removables
    VertexSet high_degree;   // vertices with deg_Z(v) > q_cap |Z| / 4
    int outliers = 0;        // vertices with deg_Q(v) > q_cap m
    int attempts_used = 0;
};

// Throws InvalidSpec (m < 2), ConstructionFailed.
LowDegreeTree build_low_degree_tree(const Graph& g, const VertexSet& u, int m, double q_cap, uint64_t seed,
                                    const LowDegreeOptions& opts = {});

struct PopularTreeOptions {
    int z = 0;                  // 0 means 2|w'| / (3(r-1))
    int attempts = 4;           // fresh selections
    int draws = 200;            // Q samples per selection
    int max_combinations = 1000;
    BuildOptions build{};
};

struct PopularTree {
    DiamondTree tree;
    VertexSet q;
    double combinations = 0.0;  // product of family sizes
    int tested = 0;
    bool sampled = false;
    bool within_bound = true;   // combinations <= 2^(m/4)
};

// families[i] plays the role of W_i, i = 0..r-2, so r = |families| + 1. Throws ConstructionFailed.
PopularTree build_popular_tree(const Graph& g, const VertexSet& u, int m,
                               const std::vector<std::vector<VertexSet>>& families, uint64_t seed,
                               const PopularTreeOptions& opts = {});

// One first-round reservation. upsilon[i] is the interior clique of y[i]'s leaf edge.
struct ReservedBlock {
    int group = 0;
    int index = 0;
    VertexSet z;
    std::vector<VertexSet> pi;
    VertexSet y;
    std::vector<VertexSet> upsilon;
    FlexibleSelection selection;

    VertexSet fixed_vertices() const;  // z ∪ V(pi)
    VertexSet pool_vertices() const;   // y ∪ V(upsilon)
    const VertexSet& clique_of(int v) const;
};

struct FirstRound {
    int groups = 0;
    int per_group = 0;
    int m = 0;
    std::vector<ReservedBlock> blocks;  // lexicographic in (group, index)

    const ReservedBlock& block(int group, int index) const {
        return blocks[static_cast<size_t>(group * per_group + index)];
    }
};

// Throws ConstructionFailed.
FirstRound reserve_first_round(const Graph& g, const VertexSet& u, int r, int m, int groups, int per_group,
                               int pool_size, uint64_t seed, const BuildOptions& opts = {});

// Extends every block by a q-biased sample of its live pool, trimmed to m; q <= 0 means m / (2 |y|).
Orchard complete_second_round(const Graph& g, const FirstRound& first, double q, uint64_t seed);

enum class ShrinkPath { Auto, VerySmall, LowDegree, Popular, TwoRound };

const char* to_string(ShrinkPath path);

struct ShrinkOptions {
    int k = 0;                       // 0 means ceil(alpha n / m)
    double density_threshold = -1.0; // negative: n^(-1/(10r))
    double deg_cap = -1.0;           // negative: max(1, p^(r-1) n^(1-gamma))
    int trials = 20;
    int attempts = 3;
    ShrinkPath force = ShrinkPath::Auto;
    int delta = 3;                   // diamond-star degree for the very-small path
    int groups = 0;                  // two-round: 0 means ceil(k / per_group)
    int per_group = 0;               // two-round: 0 means ceil(p^(1-r) / m), at most k
    int pool_size = 0;               // two-round: 0 derives from sqrt(alpha) n / per_group and the budget
    int union_samples = 4;           // popular path: sampled unions per family
    BuildOptions build{};
};

// Small side when p clears the density threshold or m < p^(r-1) n; then very small when m <= deg_cap.
// Large side: popular when m >= p^(1-r), else two rounds.
ShrinkPath choose_shrinkable_path(int n, double p, int r, int m, double gamma, const ShrinkOptions& opts = {});

struct ShrinkableCertificate {
    Orchard orchard;
    std::vector<int> q;
    double gamma = 0.0;
    ShrinkReport trials;
    ShrinkPath path = ShrinkPath::Auto;
    int deleted = 0;  // sets binned by the cleanup, 0 on the large paths
};

// Throws InvalidSpec, ConstructionFailed, CertificationFailed.
ShrinkableCertificate construct_shrinkable_orchard(const Graph& g, const VertexSet& u, int r, int m, double alpha,
                                                   double gamma, uint64_t seed, const ShrinkOptions& opts = {});

std::string certificate_to_json(const ShrinkableCertificate& c);
ShrinkableCertificate certificate_from_json(const std::string& text);

}  // namespace kfactor
