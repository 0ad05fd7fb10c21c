#include "kfactor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "kfactor/error.hpp"

namespace kfactor {

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n, double tol) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return std::vector<double>(static_cast<size_t>(n), 0.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (std::sqrt(off) <= tol * scale) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<size_t>(i)] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> adjacency_spectrum(const Graph& g) {
    int n = g.n();
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    for (auto [u, v] : g.edges()) {
        a[static_cast<size_t>(u) * n + v] = 1.0;
        a[static_cast<size_t>(v) * n + u] = 1.0;
    }
    return symmetric_eigenvalues(std::move(a), n);
}

double spectral_lambda(const Graph& g) {
    if (g.n() < 2) throw Error(ErrorKind::InvalidSpec, "spectral_lambda needs n >= 2");
    if (!g.is_regular()) throw Error(ErrorKind::NotRegular, "degrees differ");
    auto eig = adjacency_spectrum(g);
    // eig is ascending; the top eigenvalue is d.
    double second = eig[eig.size() - 2];
    double last = eig.front();
    return std::max(std::abs(second), std::abs(last));
}

namespace {

double discrepancy(long long e, double p, long long a, long long b) {
    double ab = static_cast<double>(a) * static_cast<double>(b);
    return std::abs(static_cast<double>(e) - p * ab) / std::sqrt(ab);
}

struct Tracker {
    double best = 0.0;
    double best_disjoint = 0.0;
    VertexSet a, b;
    long long samples = 0;

    void offer(const Graph& g, double p, const VertexSet& x, const VertexSet& y) {
        if (x.empty() || y.empty()) return;
        ++samples;
        double d = discrepancy(edge_count_between(g, x, y), p, x.size(), y.size());
        if (d > best || a.empty()) {
            best = d;
            a = x;
            b = y;
        }
        if (x.disjoint(y)) best_disjoint = std::max(best_disjoint, d);
    }
};

VertexSet mask_to_set(uint32_t mask) {
    std::vector<int> v;
    for (int i = 0; i < 32; ++i)
        if (mask >> i & 1u) v.push_back(i);
    return VertexSet(std::move(v));
}

// All 4^n ordered pairs. For a fixed A, e(A,B) = Σ_{v∈B} deg_A(v), so for each
// |B| = b the extreme sums come from the b largest / smallest deg_A values.
// The disjoint maximum runs the same argument over V∖A.
void exhaustive(const Graph& g, double p, Tracker& tr) {
    int n = g.n();
    uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1u);
    std::vector<uint32_t> nbr(static_cast<size_t>(n), 0);
    for (auto [u, v] : g.edges()) {
        nbr[static_cast<size_t>(u)] |= 1u << v;
        nbr[static_cast<size_t>(v)] |= 1u << u;
    }
    long long nonempty = (1LL << n) - 1;
    tr.samples = nonempty * nonempty;
    bool have = false;
    for (uint32_t am = 1; am <= full && am != 0; ++am) {
        int asz = std::popcount(am);
        std::vector<std::pair<int, int>> w;  // (deg_A(v), v)
        for (int v = 0; v < n; ++v) w.emplace_back(std::popcount(nbr[static_cast<size_t>(v)] & am), v);
        std::sort(w.begin(), w.end());
        auto scan = [&](const std::vector<std::pair<int, int>>& pool, bool disjoint_only) {
            int sz = static_cast<int>(pool.size());
            long long lo = 0, hi = 0;
            for (int b = 1; b <= sz; ++b) {
                lo += pool[static_cast<size_t>(b - 1)].first;
                hi += pool[static_cast<size_t>(sz - b)].first;
                double dlo = discrepancy(lo, p, asz, b);
                double dhi = discrepancy(hi, p, asz, b);
                if (disjoint_only) {
                    tr.best_disjoint = std::max({tr.best_disjoint, dlo, dhi});
                    continue;
                }
                if (!have || dlo > tr.best || dhi > tr.best) {
                    have = true;
                    uint32_t bm = 0;
                    if (dhi >= dlo) {
                        for (int i = 0; i < b; ++i) bm |= 1u << pool[static_cast<size_t>(sz - 1 - i)].second;
                        tr.best = dhi;
                    } else {
                        for (int i = 0; i < b; ++i) bm |= 1u << pool[static_cast<size_t>(i)].second;
                        tr.best = dlo;
                    }
                    tr.a = mask_to_set(am);
                    tr.b = mask_to_set(bm);
                }
            }
        };
        scan(w, false);
        std::vector<std::pair<int, int>> outside;
        for (auto& x : w)
            if (!(am >> x.second & 1u)) outside.push_back(x);
        scan(outside, true);
    }
}

VertexSet random_subset(int n, int size, std::mt19937_64& rng) {
    std::vector<int> all(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<size_t>(size));
    return VertexSet(std::move(all));
}

}  // namespace

JumbledAudit jumbledness_audit(const Graph& g, double p, const AuditStrategy& strategy) {
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidSpec, "p must lie in (0,1]");
    Tracker tr;
    int n = g.n();
    switch (strategy.kind) {
        case AuditStrategy::Kind::ExhaustiveSmall:
            if (n > 16) throw Error(ErrorKind::TooLargeForExhaustive, "exhaustive audit needs n <= 16");
            if (n > 0) exhaustive(g, p, tr);
            break;
        case AuditStrategy::Kind::Sampled: {
            if (strategy.samples <= 0 || n == 0) break;
            std::mt19937_64 rng(strategy.seed);
            int top = std::max(1, n / 2);
            std::uniform_real_distribution<double> logu(0.0, std::log(static_cast<double>(top)));
            for (int s = 0; s < strategy.samples; ++s) {
                int sa = std::clamp(static_cast<int>(std::lround(std::exp(logu(rng)))), 1, top);
                int sb = std::clamp(static_cast<int>(std::lround(std::exp(logu(rng)))), 1, top);
                tr.offer(g, p, random_subset(n, sa, rng), random_subset(n, sb, rng));
            }
            // Neighbourhoods, the usual witnesses of large discrepancy.
            std::uniform_int_distribution<int> pick(0, n - 1);
            for (int v = 0; v < n; ++v) {
                VertexSet nv = g.neighborhood(v);
                tr.offer(g, p, VertexSet{v}, nv);
                tr.offer(g, p, nv, g.neighborhood(pick(rng)));
            }
            break;
        }
        case AuditStrategy::Kind::Neighborhoods: {
            std::vector<VertexSet> nb;
            for (int v = 0; v < n; ++v) nb.push_back(g.neighborhood(v));
            for (int u = 0; u < n; ++u) {
                tr.offer(g, p, VertexSet{u}, nb[static_cast<size_t>(u)]);
                for (int v = u; v < n; ++v) tr.offer(g, p, nb[static_cast<size_t>(u)], nb[static_cast<size_t>(v)]);
            }
            break;
        }
    }
    JumbledAudit out;
    out.p = p;
    out.samples = tr.samples;
    out.beta_empirical = tr.best;
    out.beta_disjoint = tr.best_disjoint;
    out.worst_a = tr.a;
    out.worst_b = tr.b;
    if (n >= 2 && g.is_regular()) {
        out.lambda = spectral_lambda(g);
        out.consistent_with_mixing = out.beta_empirical <= *out.lambda + 1e-9;
    }
    return out;
}

std::string audit_to_json(const JumbledAudit& audit) {
    nlohmann::json j;
    j["p"] = audit.p;
    j["samples"] = audit.samples;
    j["beta_empirical"] = audit.beta_empirical;
    j["beta_disjoint"] = audit.beta_disjoint;
    j["worst_pair"] = {audit.worst_a.items(), audit.worst_b.items()};
    if (audit.lambda) j["lambda"] = *audit.lambda;
    if (audit.consistent_with_mixing) j["consistent_with_mixing"] = *audit.consistent_with_mixing;
    return j.dump(2);
}

}  // namespace kfactor
