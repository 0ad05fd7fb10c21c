#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kfactor/graph.hpp"

namespace kfactor {

// Eigenvalues of a dense symmetric matrix (row-major n*n), ascending. Cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n, double tol = 1e-12);

std::vector<double> adjacency_spectrum(const Graph& g);

// max(|λ_2|, |λ_n|) of a regular graph. Throws NotRegular.
double spectral_lambda(const Graph& g);

struct AuditStrategy {
    enum class Kind { ExhaustiveSmall, Sampled, Neighborhoods };
    Kind kind = Kind::Sampled;
    int samples = 0;
    uint64_t seed = 0;

    static AuditStrategy exhaustive() { return {Kind::ExhaustiveSmall, 0, 0}; }
    static AuditStrategy sampled(int k, uint64_t seed) { return {Kind::Sampled, k, seed}; }
    static AuditStrategy neighborhoods() { return {Kind::Neighborhoods, 0, 0}; }
};

struct JumbledAudit {
    double p = 0.0;
    long long samples = 0;
    double beta_empirical = 0.0;
    VertexSet worst_a;
    VertexSet worst_b;
    // Same maximum restricted to disjoint pairs.
    double beta_disjoint = 0.0;
    std::optional<double> lambda;              // regular graphs only
    std::optional<bool> consistent_with_mixing;  // beta_empirical <= lambda
};

// Largest |e(A,B) - p|A||B|| / sqrt(|A||B|) over the tested pairs; a lower bound on β.
JumbledAudit jumbledness_audit(const Graph& g, double p, const AuditStrategy& strategy);

std::string audit_to_json(const JumbledAudit& audit);

}  // namespace kfactor
