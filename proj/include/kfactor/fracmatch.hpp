#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kfactor/vertex_set.hpp"

namespace kfactor {

// r-uniform hypergraph on [0, n); edges stored sorted, duplicates rejected.
class Hypergraph {
public:
    Hypergraph(int n, int r, std::vector<std::vector<int>> edges);

    int n() const { return n_; }
    int r() const { return r_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::vector<int>>& edges() const { return edges_; }
    const std::vector<int>& edge(int i) const { return edges_[static_cast<size_t>(i)]; }
    // Edge indices containing v.
    const std::vector<int>& incident(int v) const { return incident_[static_cast<size_t>(v)]; }

    // Sub-hypergraph on `keep` (relabelled keep[i] -> i), edges fully inside keep.
    Hypergraph induced(const VertexSet& keep) const;
    // Same vertex set, only the listed edges (in the given order).
    Hypergraph with_edges(const std::vector<int>& edge_ids) const;

private:
    int n_, r_;
    std::vector<std::vector<int>> edges_;
    std::vector<std::vector<int>> incident_;
};

Hypergraph complete_hypergraph(int n, int r);
Hypergraph fano_plane();

std::string hypergraph_to_json(const Hypergraph& h);
Hypergraph hypergraph_from_json(const std::string& text);

enum class LpMode { Auto, Exact, Floating };

struct FractionalSolution {
    double nu_star = 0.0;
    double tau_star = 0.0;
    std::vector<double> matching;  // per edge
    std::vector<double> cover;     // per vertex
    bool exact = false;
    std::string nu_star_exact;  // "p/q" in exact mode, empty otherwise
    int pivots = 0;

    // ν* = N/r, i.e. the optimal matching is perfect.
    bool perfect(int n, int r) const;
};

// Max Σf(e) subject to Σ_{e∋v} f(e) ≤ 1; revised simplex with Bland's rule.
// Auto picks exact rationals for n ≤ 30 and doubles (1e-9 tolerance) above.
FractionalSolution solve_fractional(const Hypergraph& h, LpMode mode = LpMode::Auto);

constexpr double kLpTolerance = 1e-9;

enum class FanMode { VertexFans, TwoStage };

struct FanHypothesis {
    FanMode mode = FanMode::VertexFans;
    int m1 = 1;  // M for vertex fans
    int m2 = 1;  // two-stage only
    int samples = 2000;
    uint64_t seed = 0;
};

struct SufficiencyReport {
    bool holds = true;
    bool exhaustive = false;
    long long checked = 0;
    // First failure found: focus vertices and the witness set that no edge reaches.
    std::vector<int> counterexample_focus;
    std::vector<int> counterexample_set;
    // Filled when the hypothesis held on an exhaustive check.
    std::optional<bool> pfm_found;
};

// Exhaustive for n ≤ 14, sampled above. Throws ParameterRange when M is outside [1, N/(2r)].
SufficiencyReport check_pfm_sufficiency(const Hypergraph& h, const FanHypothesis& hyp);

struct PfmFamily {
    std::vector<std::vector<double>> members;  // per-edge weights, each a perfect fractional matching
    std::vector<std::pair<int, int>> forbidden_pairs;  // the final J

    double pair_load(const Hypergraph& h, int u, int v) const;
    double max_pair_load(const Hypergraph& h) const;
    // Largest |Σ_{e∋v} f_i(e) - 1| over members and vertices.
    double max_perfection_error(const Hypergraph& h) const;
};

struct FamilyOptions {
    LpMode mode = LpMode::Auto;
};

// Throws Stalled(step) (1-based member index) when H minus the J-edges has no perfect fractional matching.
PfmFamily greedy_pfm_family(const Hypergraph& h, int t, double theta, const FamilyOptions& opts = {});
inline double default_theta(int t) { return 1.0 / (2.0 * t); }

struct AlmostMatching {
    std::vector<int> edges;  // edge ids, pairwise disjoint
    int uncovered = 0;
    int sampled_edges = 0;
    std::vector<double> keep_probability;  // p_e per edge
    // Concentration figures from the sampled subhypergraph.
    int min_degree = 0;
    int max_degree = 0;
    int max_codegree = 0;
};

// Keep e with probability Σ f_i(e)/2, then greedy matching favouring low residual degree.
AlmostMatching sparsified_almost_matching(const Hypergraph& h, const PfmFamily& family, uint64_t seed,
                                          int greedy_passes = 32);

// Greedy low-degree-first matching on the given edge subset; `rng_seed` breaks ties.
std::vector<int> greedy_low_degree_matching(const Hypergraph& h, const std::vector<int>& edge_ids, uint64_t rng_seed);

}  // namespace kfactor
