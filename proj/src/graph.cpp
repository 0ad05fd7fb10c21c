#include "kfactor/graph.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kfactor/error.hpp"

namespace kfactor {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::GenerationExhausted: return "GenerationExhausted";
        case ErrorKind::EmptyQuery: return "EmptyQuery";
        case ErrorKind::NotRegular: return "NotRegular";
        case ErrorKind::TooLargeForExhaustive: return "TooLargeForExhaustive";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::NotRemovable: return "NotRemovable";
        case ErrorKind::ConstructionFailed: return "ConstructionFailed";
        case ErrorKind::NotAMatching: return "NotAMatching";
        case ErrorKind::Failed: return "Failed";
        case ErrorKind::ParameterRange: return "ParameterRange";
        case ErrorKind::Stalled: return "Stalled";
        case ErrorKind::TooManyDeleted: return "TooManyDeleted";
        case ErrorKind::CertificationFailed: return "CertificationFailed";
        case ErrorKind::SearchExhausted: return "SearchExhausted";
        case ErrorKind::StageFailed: return "StageFailed";
        case ErrorKind::DivisibilityViolation: return "DivisibilityViolation";
        case ErrorKind::PhaseFailed: return "PhaseFailed";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::Infeasible: return "Infeasible";
    }
    return "Unknown";
}

Graph::Graph(int n, const std::vector<Edge>& edges) : n_(n), adj_(static_cast<size_t>(n)) {
    if (n < 0) throw Error(ErrorKind::InvalidSpec, "negative vertex count");
    rows_.assign(static_cast<size_t>(n), Bits(n));
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw Error(ErrorKind::InvalidSpec, "edge endpoint out of range");
        if (u == v) throw Error(ErrorKind::InvalidSpec, "self-loop at " + std::to_string(u));
        if (rows_[u].test(v)) continue;
        rows_[u].set(v);
        rows_[v].set(u);
        ++m_;
    }
    for (int u = 0; u < n; ++u) adj_[u] = rows_[u].to_set().items();
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(static_cast<size_t>(m_));
    for (int u = 0; u < n_; ++u)
        for (int v : adj_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

double Graph::density() const {
    if (n_ < 2) return 0.0;
    return 2.0 * static_cast<double>(m_) / (static_cast<double>(n_) * (n_ - 1));
}

bool Graph::is_regular() const {
    for (int v = 1; v < n_; ++v)
        if (degree(v) != degree(0)) return false;
    return true;
}

Graph Graph::without(const std::vector<Edge>& removed) const {
    std::set<Edge> drop;
    for (auto [u, v] : removed) drop.insert({std::min(u, v), std::max(u, v)});
    std::vector<Edge> keep;
    for (const Edge& e : edges())
        if (!drop.count(e)) keep.push_back(e);
    return Graph(n_, keep);
}

Graph Graph::induced(const VertexSet& keep) const {
    std::vector<int> index(static_cast<size_t>(n_), -1);
    for (int i = 0; i < keep.size(); ++i) index[keep[i]] = i;
    std::vector<Edge> es;
    for (auto [u, v] : edges())
        if (index[u] >= 0 && index[v] >= 0) es.emplace_back(index[u], index[v]);
    return Graph(keep.size(), es);
}

Bits Graph::full_mask() const {
    Bits b(n_);
    for (int v = 0; v < n_; ++v) b.set(v);
    return b;
}

namespace {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Graph gnp(int n, double p, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Edge> es;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (unit(rng) < p) es.emplace_back(u, v);
    return Graph(n, es);
}

Graph paley(int q) {
    std::vector<char> residue(static_cast<size_t>(q), 0);
    for (int x = 1; x < q; ++x) residue[static_cast<size_t>((1LL * x * x) % q)] = 1;
    std::vector<Edge> es;
    for (int u = 0; u < q; ++u)
        for (int v = u + 1; v < q; ++v)
            if (residue[static_cast<size_t>(v - u)]) es.emplace_back(u, v);
    return Graph(q, es);
}

// Pairing model. Points are matched uniformly among the pairs that keep the
// graph simple; when no such pair remains the attempt is thrown away and the
// whole pairing restarts.
Graph random_regular(int n, int d, uint64_t seed) {
    constexpr int kRestartBudget = 10000;
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < kRestartBudget; ++attempt) {
        std::vector<int> points;
        points.reserve(static_cast<size_t>(n) * d);
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < d; ++j) points.push_back(v);
        std::vector<Bits> adj(static_cast<size_t>(n), Bits(n));
        std::vector<Edge> es;
        bool stuck = false;
        while (!points.empty() && !stuck) {
            bool paired = false;
            for (int tries = 0; tries < 64 && !paired; ++tries) {
                std::uniform_int_distribution<size_t> pick(0, points.size() - 1);
                size_t i = pick(rng), j = pick(rng);
                int u = points[i], v = points[j];
                if (i == j || u == v || adj[u].test(v)) continue;
                adj[u].set(v);
                adj[v].set(u);
                es.emplace_back(u, v);
                if (i < j) std::swap(i, j);
                points[i] = points.back();
                points.pop_back();
                points[j] = points.back();
                points.pop_back();
                paired = true;
            }
            if (paired) continue;
            // Random probing failed; check exhaustively whether any legal pair is left.
            std::vector<std::pair<size_t, size_t>> legal;
            for (size_t i = 0; i < points.size(); ++i)
                for (size_t j = i + 1; j < points.size(); ++j)
                    if (points[i] != points[j] && !adj[points[i]].test(points[j])) legal.emplace_back(i, j);
            if (legal.empty()) {
                stuck = true;
                break;
            }
            std::uniform_int_distribution<size_t> pick(0, legal.size() - 1);
            auto [i, j] = legal[pick(rng)];
            int u = points[i], v = points[j];
            adj[u].set(v);
            adj[v].set(u);
            es.emplace_back(u, v);
            points[j] = points.back();
            points.pop_back();
            points[i] = points.back();
            points.pop_back();
        }
        if (!stuck) return Graph(n, es);
    }
    throw Error(ErrorKind::GenerationExhausted, "random-regular restart budget exceeded");
}

}  // namespace

Graph generate_graph(const GraphSpec& spec) {
    if (spec.kind != GraphKind::FromFile && spec.n < 1)
        throw Error(ErrorKind::InvalidSpec, "n must be at least 1");
    switch (spec.kind) {
        case GraphKind::Gnp:
            if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw Error(ErrorKind::InvalidSpec, "p outside [0,1]");
            return gnp(spec.n, spec.p, spec.seed);
        case GraphKind::RandomRegular:
            if ((1LL * spec.n * spec.d) % 2 != 0) throw Error(ErrorKind::InvalidSpec, "n*d is odd");
            if (spec.d < 0 || spec.d >= spec.n) throw Error(ErrorKind::InvalidSpec, "need 0 <= d < n");
            return random_regular(spec.n, spec.d, spec.seed);
        case GraphKind::Paley:
            if (!is_prime(spec.n) || spec.n % 4 != 1)
                throw Error(ErrorKind::InvalidSpec, "paley needs a prime n = 1 mod 4");
            return paley(spec.n);
        case GraphKind::Complete:
            return complete_graph(spec.n);
        case GraphKind::FromFile:
            return load_graph(spec.path);
    }
    throw Error(ErrorKind::InvalidSpec, "unknown graph kind");
}

long long edge_count_between(const Graph& g, const VertexSet& a, const VertexSet& b) {
    if (a.empty() || b.empty()) return 0;
    Bits bm = g.mask(b);
    long long total = 0;
    for (int u : a) total += Bits::and_count(g.row(u), bm);
    return total;
}

VertexSet common_neighbors(const Graph& g, const VertexSet& s, const VertexSet& w) {
    if (s.empty()) throw Error(ErrorKind::EmptyQuery, "common_neighbors needs a nonempty s");
    Bits acc = g.mask(w);
    for (int v : s) acc &= g.row(v);
    return acc.to_set();
}

int common_degree(const Graph& g, const VertexSet& s, const Bits& w) {
    if (s.empty()) throw Error(ErrorKind::EmptyQuery, "common_degree needs a nonempty s");
    Bits acc = w;
    for (int v : s) acc &= g.row(v);
    return acc.count();
}

bool is_clique(const Graph& g, const VertexSet& s) {
    for (int i = 0; i < s.size(); ++i)
        for (int j = i + 1; j < s.size(); ++j)
            if (!g.adjacent(s[i], s[j])) return false;
    return true;
}

std::string graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.n();
    nlohmann::json es = nlohmann::json::array();
    for (auto [u, v] : g.edges()) es.push_back({u, v});
    j["edges"] = es;
    return j.dump();
}

Graph graph_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    std::vector<Edge> es;
    for (const auto& e : j.at("edges")) es.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return Graph(n, es);
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidSpec, "cannot open graph file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return graph_from_json(ss.str());
}

Graph complete_graph(int n) {
    std::vector<Edge> es;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) es.emplace_back(u, v);
    return Graph(n, es);
}

Graph cycle_graph(int n) {
    std::vector<Edge> es;
    for (int v = 0; v < n; ++v) es.emplace_back(v, (v + 1) % n);
    return Graph(n, es);
}

Graph petersen_graph() {
    std::vector<Edge> es;
    for (int i = 0; i < 5; ++i) {
        es.emplace_back(i, (i + 1) % 5);
        es.emplace_back(i, i + 5);
        es.emplace_back(5 + i, 5 + (i + 2) % 5);
    }
    return Graph(10, es);
}

Graph complete_bipartite(int a, int b) {
    std::vector<Edge> es;
    for (int u = 0; u < a; ++u)
        for (int v = 0; v < b; ++v) es.emplace_back(u, a + v);
    return Graph(a + b, es);
}

}  // namespace kfactor
