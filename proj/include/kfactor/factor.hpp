#pragma once

#include <string>
#include <vector>

#include "kfactor/graph.hpp"

namespace kfactor {

struct FactorCheck {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
};

// Cliques of size r, pairwise disjoint, fully adjacent in g, whose union is exactly `target`.
FactorCheck check_factor(const Graph& g, const std::vector<VertexSet>& cliques, const VertexSet& target, int r);

}  // namespace kfactor
