#include "kfactor/factor.hpp"

namespace kfactor {

FactorCheck check_factor(const Graph& g, const std::vector<VertexSet>& cliques, const VertexSet& target, int r) {
    std::vector<char> seen(static_cast<size_t>(g.n()), 0);
    long long covered = 0;
    for (const auto& c : cliques) {
        if (c.size() != r) return {false, "clique of wrong size"};
        for (int v : c) {
            if (v < 0 || v >= g.n()) return {false, "vertex outside host"};
            if (!target.contains(v)) return {false, "clique leaves the target set"};
            if (seen[static_cast<size_t>(v)]) return {false, "cliques overlap"};
            seen[static_cast<size_t>(v)] = 1;
            ++covered;
        }
        if (!is_clique(g, c)) return {false, "missing edge inside a clique"};
    }
    if (covered != target.size()) return {false, "target not fully covered"};
    return {};
}

}  // namespace kfactor
