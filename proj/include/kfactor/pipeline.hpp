#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kfactor/graph.hpp"
#include "kfactor/shrinkable.hpp"

namespace kfactor {

struct Budgets {
    int attempts = 12;           // whole runs, each from a fresh derived seed
    int y_draws = 8;             // resamples of the reserve Y
    int shrink_draws = 8;        // absorb-then-shrink draws per level, best kept
    int construct_attempts = 3;  // passed to the shrinkable construction
    int clique_restarts = 40;    // greedy restarts per clique query
};

struct ParameterProfile {
    int r = 3;
    double eps = 1e-3;   // recorded only
    double c = 0.5;      // Y check: deg_Y(v) >= floor(c alpha p n / 2)
    double alpha = 0.1;  // reserve probability and orchard mass k_i m_i ~ alpha n
    double gamma = 0.7;
    double zeta = 0.08;  // phase 2 stops below zeta n free vertices
    double eta = 0.01;   // bad sets larger than eta p^(r-1) n are recorded, not avoided
    double lambda_exp = 0.25;  // recorded only; desk orders replace n^(i lambda)
    int levels = 2;
    std::vector<int> level_orders{1, 2};
    std::vector<int> level_sizes;  // k_i per level; empty or 0 entries derive from alpha
    int delta = 3;
    ShrinkPath level_path = ShrinkPath::VerySmall;  // construction path for every level; Auto dispatches
    uint64_t seed = 0;
    Budgets budgets{};
    int absorber_flex = 0;   // template t; 0 runs without an absorbing structure
    int absorber_order = 4;  // tree order M of the structure
};

// Throws InvalidSpec naming the first broken invariant.
void validate_profile(const ParameterProfile& profile);

// Levels, sizes and absorber settings sized for an n-vertex host at desk scale.
ParameterProfile desk_profile(int n, int r = 3);

std::string profile_to_json(const ParameterProfile& profile);
// Missing keys keep their defaults. Throws InvalidSpec.
ParameterProfile profile_from_json(const std::string& text);

struct LevelRecord {
    int order = 0;
    int size = 0;       // k_i
    int reserved = 0;   // |Q_i|
    int absorbed = 0;   // |Q'_i|
    int leftover = 0;   // |P_i|
    int bad_set = 0;    // |B_i|
    bool bad_set_avoided = false;
    ShrinkPath path = ShrinkPath::Auto;
};

struct FactorCertificate {
    std::vector<VertexSet> cliques;
    std::array<int, 4> phases{};  // |S1|..|S4|
    ParameterProfile profile;
    bool verified = false;

    int attempt = 0;              // 0-based index of the successful run
    uint64_t run_seed = 0;
    int reserve = 0;              // |Y|
    int bad_cover = 0;            // |Z|
    int greedy_leftover = 0;      // |L|
    int absorber_vertices = 0;    // |V(A)|
    std::vector<LevelRecord> level_records;  // index i is level i
    std::vector<std::string> failures;       // one line per failed run
};

// Throws DivisibilityViolation (r does not divide n), InvalidSpec, PhaseFailed(phase) once the
// attempt budget is spent; phase 0 is the setup.
FactorCertificate find_clique_factor(const Graph& g, const ParameterProfile& profile);

constexpr int kExactSizeCap = 33;

// Exact cover over all r-cliques, branching on the lowest uncovered vertex.
// Throws TooLarge (n > kExactSizeCap), Infeasible (including r not dividing n).
std::vector<VertexSet> exact_factor_baseline(const Graph& g, int r);

enum class Violation { None, Size, Range, Disjointness, Adjacency, Coverage };

const char* to_string(Violation v);

struct FactorReport {
    Violation violation = Violation::None;
    std::string detail;
    bool ok() const { return violation == Violation::None; }
    explicit operator bool() const { return ok(); }
};

// Clique size is taken from the first clique.
FactorReport verify_factor(const Graph& g, const std::vector<VertexSet>& cliques);

std::string factor_certificate_to_json(const FactorCertificate& c);
FactorCertificate factor_certificate_from_json(const std::string& text);

}  // namespace kfactor
