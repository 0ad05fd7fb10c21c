#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kfactor/bits.hpp"
#include "kfactor/vertex_set.hpp"

namespace kfactor {

using Edge = std::pair<int, int>;

// Simple undirected graph on [0, n). Immutable once built.
class Graph {
public:
    Graph() = default;
    // Self-loops are rejected; repeated edges collapse to one.
    Graph(int n, const std::vector<Edge>& edges);

    int n() const { return n_; }
    long long edge_count() const { return m_; }
    bool adjacent(int u, int v) const { return rows_[u].test(v); }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    const Bits& row(int v) const { return rows_[v]; }
    VertexSet vertices() const { return VertexSet::range(0, n_); }
    VertexSet neighborhood(int v) const { return VertexSet(adj_[v]); }

    // Sorted (u < v) edge list.
    std::vector<Edge> edges() const;
    // 2|E| / (n(n-1)); 0 for n < 2.
    double density() const;
    bool is_regular() const;

    Graph without(const std::vector<Edge>& removed) const;
    Graph induced(const VertexSet& keep) const;  // relabels keep[i] -> i

    Bits mask(const VertexSet& s) const { return Bits(n_, s); }
    Bits full_mask() const;

private:
    int n_ = 0;
    long long m_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<Bits> rows_;
};

enum class GraphKind { Gnp, RandomRegular, Paley, Complete, FromFile };

struct GraphSpec {
    GraphKind kind = GraphKind::Gnp;
    int n = 0;
    double p = 0.5;
    int d = 0;
    uint64_t seed = 0;
    std::string path;  // FromFile only
};

Graph generate_graph(const GraphSpec& spec);

// Ordered-pair count with the double-count convention: an edge inside A∩B counts twice.
long long edge_count_between(const Graph& g, const VertexSet& a, const VertexSet& b);

// (∩_{v∈s} N(v)) ∩ w. Throws EmptyQuery for empty s.
VertexSet common_neighbors(const Graph& g, const VertexSet& s, const VertexSet& w);
int common_degree(const Graph& g, const VertexSet& s, const Bits& w);

bool is_clique(const Graph& g, const VertexSet& s);

std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);
Graph load_graph(const std::string& path);

// A few fixed graphs used by tests and the CLI.
Graph complete_graph(int n);
Graph cycle_graph(int n);
Graph petersen_graph();
Graph complete_bipartite(int a, int b);

}  // namespace kfactor
