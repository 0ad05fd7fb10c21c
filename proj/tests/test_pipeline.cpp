#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <set>

#include "kfactor/error.hpp"
#include "kfactor/pipeline.hpp"

using namespace kfactor;

namespace {

Graph gnp(int n, double p, uint64_t seed) { return generate_graph({GraphKind::Gnp, n, p, 0, seed, ""}); }

// Subset DP over vertex masks: can `mask` be split into triangles of g?
bool triangle_factor_exists(const Graph& g) {
    const int n = g.n();
    REQUIRE(n <= 21);
    std::vector<uint32_t> tri;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                if (g.adjacent(a, b) && g.adjacent(a, c) && g.adjacent(b, c))
                    tri.push_back((1u << a) | (1u << b) | (1u << c));
    std::vector<char> ok(size_t{1} << n, 0);
    ok[0] = 1;
    for (uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) % 3) continue;
        const uint32_t low = mask & -mask;
        for (uint32_t t : tri)
            if ((t & low) && (t & mask) == t && ok[mask ^ t]) {
                ok[mask] = 1;
                break;
            }
    }
    return ok[(1u << n) - 1];
}

bool certificate_sound(const Graph& g, const FactorCertificate& c, int r) {
    std::set<int> seen;
    for (const auto& s : c.cliques) {
        if (s.size() != r) return false;
        for (int a : s) {
            if (!seen.insert(a).second) return false;
            for (int b : s)
                if (a < b && !g.adjacent(a, b)) return false;
        }
    }
    return static_cast<int>(seen.size()) == g.n();
}

int phase_total(const FactorCertificate& c) { return c.phases[0] + c.phases[1] + c.phases[2] + c.phases[3]; }

}  // namespace

TEST_CASE("verify_factor accepts K6 and names each violation") {
    Graph k6 = complete_graph(6);
    CHECK(verify_factor(k6, {VertexSet{0, 1, 2}, VertexSet{3, 4, 5}}).ok());
    CHECK(verify_factor(k6, {VertexSet{0, 1, 2}, VertexSet{2, 3, 4}}).violation == Violation::Disjointness);
    CHECK(verify_factor(k6, {VertexSet{0, 1, 2}, VertexSet{3, 4}}).violation == Violation::Size);
    CHECK(verify_factor(complete_graph(9), {VertexSet{0, 1, 2}, VertexSet{3, 4, 5}}).violation == Violation::Coverage);
    CHECK(verify_factor(k6, {VertexSet{0, 1, 2}, VertexSet{3, 4, 9}}).violation == Violation::Range);
    CHECK(verify_factor(cycle_graph(6), {VertexSet{0, 1, 2}, VertexSet{3, 4, 5}}).violation == Violation::Adjacency);
    CHECK(verify_factor(k6, {}).violation == Violation::Coverage);
    CHECK(std::string(to_string(Violation::Disjointness)) == "disjointness");
}

TEST_CASE("exact baseline on the fixed graphs") {
    auto k6 = exact_factor_baseline(complete_graph(6), 3);
    CHECK(k6.size() == 2);
    CHECK(verify_factor(complete_graph(6), k6).ok());

    auto kind_of = [](const Graph& g, int r) {
        try {
            exact_factor_baseline(g, r);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidSpec;
    };
    CHECK(kind_of(cycle_graph(6), 3) == ErrorKind::Infeasible);
    CHECK(kind_of(petersen_graph(), 3) == ErrorKind::Infeasible);
    CHECK(kind_of(complete_graph(7), 3) == ErrorKind::Infeasible);
    CHECK(kind_of(complete_graph(36), 3) == ErrorKind::TooLarge);

    auto k33 = exact_factor_baseline(complete_graph(33), 3);
    CHECK(k33.size() == 11);
    auto k8 = exact_factor_baseline(complete_graph(8), 4);
    CHECK(k8.size() == 2);
    CHECK(verify_factor(complete_graph(8), k8).ok());
}

TEST_CASE("exact baseline agrees with a subset DP on random graphs") {
    int found = 0, infeasible = 0;
    for (uint64_t seed = 0; seed < 60; ++seed) {
        const int n = 9 + 3 * static_cast<int>(seed % 4);
        Graph g = gnp(n, 0.3 + 0.1 * static_cast<double>(seed % 5), seed);
        const bool truth = triangle_factor_exists(g);
        bool got = true;
        try {
            auto f = exact_factor_baseline(g, 3);
            CHECK(verify_factor(g, f).ok());
            CHECK(static_cast<int>(f.size()) == n / 3);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Infeasible);
            got = false;
        }
        CHECK(got == truth);
        (got ? found : infeasible) += 1;
    }
    CHECK(found > 0);
    CHECK(infeasible > 0);
}

TEST_CASE("exact baseline handles a dense 33-vertex host quickly") {
    Graph g = gnp(33, 0.6, 5);
    auto f = exact_factor_baseline(g, 3);
    CHECK(verify_factor(g, f).ok());
}

TEST_CASE("profile invariants") {
    ParameterProfile ok;
    CHECK_NOTHROW(validate_profile(ok));
    auto rejects = [](auto mutate) {
        ParameterProfile pr;
        mutate(pr);
        try {
            validate_profile(pr);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::InvalidSpec;
        }
        return false;
    };
    CHECK(rejects([](ParameterProfile& p) { p.gamma = 0.0; }));
    CHECK(rejects([](ParameterProfile& p) { p.alpha = 1.0; }));
    CHECK(rejects([](ParameterProfile& p) { p.zeta = -0.1; }));
    CHECK(rejects([](ParameterProfile& p) { p.eta = 1.5; }));
    CHECK(rejects([](ParameterProfile& p) { p.level_orders = {1, 3, 3}; p.levels = 3; }));
    CHECK(rejects([](ParameterProfile& p) { p.level_orders = {2, 3}; }));
    CHECK(rejects([](ParameterProfile& p) { p.levels = 3; }));
    CHECK(rejects([](ParameterProfile& p) { p.level_sizes = {4}; }));
    CHECK(rejects([](ParameterProfile& p) { p.absorber_flex = 1; }));
    CHECK(rejects([](ParameterProfile& p) { p.budgets.attempts = 0; }));
    CHECK(rejects([](ParameterProfile& p) { p.r = 2; }));

    for (int n : {12, 30, 60, 99, 300, 600}) {
        ParameterProfile d = desk_profile(n);
        CHECK_NOTHROW(validate_profile(d));
        CHECK(d.level_orders.front() == 1);
    }
}

TEST_CASE("profile json round trip, missing keys keep defaults") {
    ParameterProfile pr = desk_profile(99);
    pr.seed = 77;
    pr.absorber_flex = 4;
    ParameterProfile back = profile_from_json(profile_to_json(pr));
    CHECK(profile_to_json(back) == profile_to_json(pr));

    ParameterProfile partial = profile_from_json(R"({"gamma": 0.4, "level_orders": [1, 2, 5]})");
    CHECK(partial.gamma == doctest::Approx(0.4));
    CHECK(partial.levels == 3);
    CHECK(partial.alpha == doctest::Approx(ParameterProfile{}.alpha));
    CHECK_THROWS_AS(profile_from_json("{"), Error);
    CHECK_THROWS_AS(profile_from_json(R"({"level_path": "sideways"})"), Error);
}

TEST_CASE("K30 with the default profile gives ten triangles") {
    Graph g = complete_graph(30);
    FactorCertificate c = find_clique_factor(g, ParameterProfile{});
    CHECK(c.verified);
    CHECK(c.cliques.size() == 10);
    CHECK(certificate_sound(g, c, 3));
    CHECK(phase_total(c) * 3 == 30);
}

TEST_CASE("divisibility is checked before any work") {
    CHECK_THROWS_WITH_AS(find_clique_factor(complete_graph(31), ParameterProfile{}),
                         doctest::Contains("not a multiple"), Error);
    try {
        find_clique_factor(complete_graph(31), ParameterProfile{});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DivisibilityViolation);
    }
    ParameterProfile bad;
    bad.gamma = 2.0;
    CHECK_THROWS_AS(find_clique_factor(complete_graph(30), bad), Error);
}

TEST_CASE("desk run on G(99, 0.5) with two levels") {
    Graph g = gnp(99, 0.5, 3);
    ParameterProfile pr = desk_profile(99);
    REQUIRE(pr.levels == 2);
    REQUIRE(pr.level_orders == std::vector<int>{1, 3});
    FactorCertificate c = find_clique_factor(g, pr);
    CHECK(c.verified);
    CHECK(certificate_sound(g, c, 3));
    CHECK(phase_total(c) * 3 == 99);
    CHECK(c.phases[0] == c.bad_cover);
    CHECK(c.greedy_leftover < pr.zeta * 99);
    REQUIRE(c.level_records.size() == 2);
    CHECK(c.level_records[0].order == 1);
    CHECK(c.level_records[1].order == 3);
    CHECK(c.level_records[1].leftover == 0);
    CHECK(c.phases[3] == 0);
}

TEST_CASE("pipeline and exact baseline agree on an induced G(24, 0.6)") {
    Graph host = gnp(60, 0.6, 11);
    Graph g = host.induced(VertexSet::range(0, 24));
    bool exact_found = true;
    try {
        CHECK(verify_factor(g, exact_factor_baseline(g, 3)).ok());
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
        exact_found = false;
    }
    ParameterProfile pr = desk_profile(24);
    pr.seed = 11;
    bool pipeline_found = true;
    try {
        FactorCertificate c = find_clique_factor(g, pr);
        CHECK(certificate_sound(g, c, 3));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PhaseFailed);
        pipeline_found = false;
    }
    CHECK(exact_found);
    CHECK(pipeline_found);
}

TEST_CASE("agreement: the pipeline never beats the oracle and rarely trails it") {
    int oracle_yes = 0, missed = 0;
    for (uint64_t seed = 0; seed < 30; ++seed) {
        const int n = 15 + 3 * static_cast<int>(seed % 4);
        const double p = 0.5 + 0.05 * static_cast<double>(seed % 5);
        Graph g = gnp(n, p, 500 + seed);
        bool exact = true;
        try {
            exact_factor_baseline(g, 3);
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::Infeasible);
            exact = false;
        }
        ParameterProfile pr = desk_profile(n);
        pr.seed = seed;
        bool ours = true;
        try {
            FactorCertificate c = find_clique_factor(g, pr);
            CHECK(certificate_sound(g, c, 3));
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::PhaseFailed);
            CHECK(e.primary() >= 0);
            CHECK(e.primary() <= 4);
            ours = false;
        }
        if (ours) CHECK(exact);
        if (exact) {
            ++oracle_yes;
            if (!ours) ++missed;
        }
    }
    REQUIRE(oracle_yes > 0);
    MESSAGE("pipeline missed " << missed << " of " << oracle_yes);
    CHECK(missed * 5 <= oracle_yes);
}

TEST_CASE("determinism: same profile and seed give the same certificate") {
    Graph g = gnp(60, 0.5, 8);
    ParameterProfile pr = desk_profile(60);
    pr.seed = 4;
    const std::string a = factor_certificate_to_json(find_clique_factor(g, pr));
    const std::string b = factor_certificate_to_json(find_clique_factor(g, pr));
    CHECK(a == b);
    pr.seed = 5;
    FactorCertificate other = find_clique_factor(g, pr);
    CHECK(other.verified);
}

TEST_CASE("phase accounting across settings") {
    for (auto [n, p] : std::vector<std::pair<int, double>>{{30, 0.6}, {45, 0.55}, {60, 0.5}, {90, 0.5}}) {
        for (uint64_t seed = 0; seed < 3; ++seed) {
            Graph g = gnp(n, p, 40 + seed);
            ParameterProfile pr = desk_profile(n);
            pr.seed = seed;
            FactorCertificate c;
            try {
                c = find_clique_factor(g, pr);
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::PhaseFailed);
                continue;
            }
            CHECK(c.verified);
            CHECK(verify_factor(g, c.cliques).ok());
            CHECK(c.phases[0] == c.bad_cover);
            CHECK(phase_total(c) * 3 == n);
            CHECK(static_cast<int>(c.cliques.size()) == phase_total(c));
            CHECK(c.attempt < pr.budgets.attempts);
            CHECK(static_cast<int>(c.failures.size()) == c.attempt);
        }
    }
}

TEST_CASE("the absorbing structure closes the cascade on G(300, 0.5)") {
    Graph g = gnp(300, 0.5, 2);
    ParameterProfile pr = desk_profile(300);
    REQUIRE(pr.absorber_flex > 0);
    auto t0 = std::chrono::steady_clock::now();
    FactorCertificate c = find_clique_factor(g, pr);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 60.0);
    CHECK(c.verified);
    CHECK(certificate_sound(g, c, 3));
    CHECK(c.absorber_vertices > 0);
    CHECK(c.phases[3] * 3 >= c.absorber_vertices);
    CHECK(phase_total(c) * 3 == 300);
}

TEST_CASE("triangle-free host fails with a phase number") {
    ParameterProfile pr;
    pr.budgets.attempts = 2;
    try {
        find_clique_factor(complete_bipartite(15, 15), pr);
        FAIL("expected PhaseFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PhaseFailed);
        CHECK(e.primary() >= 0);
        CHECK(e.primary() <= 4);
        CHECK(std::string(e.what()).find("attempt") != std::string::npos);
    }
}

TEST_CASE("certificate json round trip") {
    Graph g = gnp(45, 0.6, 1);
    FactorCertificate c = find_clique_factor(g, desk_profile(45));
    FactorCertificate back = factor_certificate_from_json(factor_certificate_to_json(c));
    CHECK(back.verified == c.verified);
    CHECK(back.phases == c.phases);
    CHECK(back.cliques.size() == c.cliques.size());
    CHECK(verify_factor(g, back.cliques).ok());
    CHECK(back.level_records.size() == c.level_records.size());
    CHECK(factor_certificate_to_json(back) == factor_certificate_to_json(c));
    CHECK_THROWS_AS(factor_certificate_from_json("[]"), Error);
}
