// kfactor: command-line front end. Exit 0 on success, 2 when the factor pipeline exhausts its
// budget, 1 on bad input.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "kfactor/absorber.hpp"
#include "kfactor/error.hpp"
#include "kfactor/graph.hpp"
#include "kfactor/pipeline.hpp"
#include "kfactor/random.hpp"
#include "kfactor/spectral.hpp"

using namespace kfactor;
using nlohmann::json;

namespace {

struct Common {
    uint64_t seed = 0;
    std::string profile;
    int budget = 0;
    std::string out;
};

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw Error(ErrorKind::InvalidSpec, "cannot write " + out);
    f << text << '\n';
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::InvalidSpec, "cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

GraphKind kind_named(const std::string& s) {
    if (s == "gnp") return GraphKind::Gnp;
    if (s == "regular") return GraphKind::RandomRegular;
    if (s == "paley") return GraphKind::Paley;
    if (s == "complete") return GraphKind::Complete;
    throw Error(ErrorKind::InvalidSpec, "unknown graph kind " + s);
}

ParameterProfile resolve_profile(const Common& c, int n, int r) {
    ParameterProfile pr = c.profile.empty() ? desk_profile(n, r) : profile_from_json(slurp(c.profile));
    pr.seed = c.seed;
    if (c.budget > 0) pr.budgets.attempts = c.budget;
    return pr;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidSpec, "not a number: " + item);
        }
    }
    if (out.empty()) throw Error(ErrorKind::InvalidSpec, "empty list");
    return out;
}

struct BenchRow {
    int n = 0;
    double p = 0.0;
    uint64_t seed = 0;
    bool verified = false;
    int phase = -1;  // failing phase, -1 on success or input error
    int attempts = 0;
    double seconds = 0.0;
};

BenchRow bench_one(int n, double p, uint64_t seed, int r, const Common& c) {
    BenchRow row{n, p, seed};
    Graph g = generate_graph({GraphKind::Gnp, n, p, 0, mix_seed(seed, 0x9e3779b9ULL), ""});
    ParameterProfile pr = resolve_profile(c, n, r);
    pr.seed = seed;
    auto t0 = std::chrono::steady_clock::now();
    try {
        FactorCertificate cert = find_clique_factor(g, pr);
        row.verified = cert.verified;
        row.attempts = cert.attempt + 1;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PhaseFailed) throw;
        row.phase = e.primary();
        row.attempts = pr.budgets.attempts;
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

struct Series {
    int runs = 0;
    int ok = 0;
    double seconds = 0.0;
};

// Two panels: success rate and mean runtime against n, one polyline per p.
std::string render_svg(const std::map<double, std::map<int, Series>>& data) {
    const int w = 420, h = 300, pad = 50;
    int n_lo = INT32_MAX, n_hi = 0;
    double t_hi = 1e-9;
    for (const auto& [p, byn] : data)
        for (const auto& [n, s] : byn) {
            n_lo = std::min(n_lo, n);
            n_hi = std::max(n_hi, n);
            t_hi = std::max(t_hi, s.seconds / s.runs);
        }
    if (n_hi == n_lo) n_hi = n_lo + 1;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream o;
    o << std::fixed << std::setprecision(2);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int panel = 0; panel < 2; ++panel) {
        const int x0 = panel * w + pad, y0 = h - pad, pw = w - 2 * pad, ph = h - 2 * pad;
        const double top = panel == 0 ? 1.0 : t_hi;
        o << "<rect x=\"" << x0 << "\" y=\"" << pad << "\" width=\"" << pw << "\" height=\"" << ph
          << "\" fill=\"none\" stroke=\"#444\"/>\n";
        o << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << pad - 15 << "\" text-anchor=\"middle\">"
          << (panel == 0 ? "success rate" : "mean seconds per run") << "</text>\n";
        o << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">n</text>\n";
        o << "<text x=\"" << x0 - 5 << "\" y=\"" << pad + 4 << "\" text-anchor=\"end\">" << top << "</text>\n";
        o << "<text x=\"" << x0 - 5 << "\" y=\"" << y0 << "\" text-anchor=\"end\">0</text>\n";
        o << "<text x=\"" << x0 << "\" y=\"" << y0 + 14 << "\">" << n_lo << "</text>\n";
        o << "<text x=\"" << x0 + pw << "\" y=\"" << y0 + 14 << "\" text-anchor=\"end\">" << n_hi << "</text>\n";
        int ci = 0;
        for (const auto& [p, byn] : data) {
            const char* col = colors[ci % 6];
            o << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
            for (const auto& [n, s] : byn) {
                double v = panel == 0 ? double(s.ok) / s.runs : s.seconds / s.runs;
                o << x0 + pw * double(n - n_lo) / (n_hi - n_lo) << ',' << y0 - ph * v / top << ' ';
            }
            o << "\"/>\n";
            o << "<text x=\"" << x0 + pw - 5 << "\" y=\"" << pad + 14 + 13 * ci << "\" text-anchor=\"end\" fill=\"" << col
              << "\">p=" << p << "</text>\n";
            ++ci;
        }
    }
    o << "</svg>";
    return o.str();
}

std::map<double, std::map<int, Series>> read_bench_csv(const std::string& text) {
    std::map<double, std::map<int, Series>> data;
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    if (line.rfind("n,p,seed,verified", 0) != 0) throw Error(ErrorKind::InvalidSpec, "not a bench CSV");
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() < 7) throw Error(ErrorKind::InvalidSpec, "short CSV row: " + line);
        Series& s = data[std::stod(f[1])][std::stoi(f[0])];
        ++s.runs;
        s.ok += f[3] == "1";
        s.seconds += std::stod(f[6]);
    }
    if (data.empty()) throw Error(ErrorKind::InvalidSpec, "no rows");
    return data;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clique factors in pseudorandom graphs"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "base seed");
        sub->add_option("--out", c.out, "output file, stdout when omitted");
    };

    std::string kind = "gnp";
    int n = 0, d = 0, r = 3;
    double p = 0.5;
    auto* gen = app.add_subcommand("gen", "generate a graph as JSON");
    gen->add_option("--kind", kind, "gnp | regular | paley | complete");
    gen->add_option("-n", n, "vertices")->required();
    gen->add_option("-p", p, "edge probability (gnp)");
    gen->add_option("-d", d, "degree (regular)");
    add_common(gen);

    std::string graph_path, strategy = "sampled";
    int samples = 2000;
    std::optional<double> audit_p;
    auto* audit = app.add_subcommand("audit", "empirical jumbledness of a graph");
    audit->add_option("graph", graph_path, "graph JSON")->required();
    audit->add_option("-p", audit_p, "reference density, measured when omitted");
    audit->add_option("--strategy", strategy, "exhaustive | sampled | neighborhoods");
    audit->add_option("--samples", samples, "pairs for the sampled strategy");
    add_common(audit);

    auto* spectral = app.add_subcommand("spectral", "second eigenvalue of a graph");
    spectral->add_option("graph", graph_path, "graph JSON")->required();
    add_common(spectral);

    auto* factor = app.add_subcommand("factor", "find and verify a K_r-factor");
    factor->add_option("graph", graph_path, "graph JSON")->required();
    factor->add_option("-r", r, "clique size when no profile is given");
    factor->add_option("--profile", c.profile, "parameter profile JSON");
    factor->add_option("--budget", c.budget, "whole-run attempts");
    add_common(factor);

    int flex = 2, max_deg = 40;
    auto* tmpl = app.add_subcommand("template", "build a robustly matchable template");
    tmpl->add_option("-t", flex, "flexibility")->required();
    tmpl->add_option("--max-degree", max_deg, "degree cap");
    add_common(tmpl);

    std::string ns = "30,60,99", ps = "0.5,0.6";
    int seeds = 10;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto* bench = app.add_subcommand("bench", "success rates and runtimes over a G(n,p) sweep, CSV");
    bench->add_option("--n", ns, "comma-separated vertex counts");
    bench->add_option("--p", ps, "comma-separated densities");
    bench->add_option("--seeds", seeds, "runs per cell");
    bench->add_option("-r", r, "clique size");
    bench->add_option("--threads", threads, "worker threads");
    bench->add_option("--profile", c.profile, "parameter profile JSON, desk profile when omitted");
    bench->add_option("--budget", c.budget, "whole-run attempts");
    add_common(bench);

    std::string csv_path;
    auto* report = app.add_subcommand("report", "SVG plot from a bench CSV");
    report->add_option("csv", csv_path, "bench output")->required();
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            GraphSpec spec{kind_named(kind), n, p, d, c.seed, ""};
            emit(graph_to_json(generate_graph(spec)), c.out);
        } else if (*audit) {
            Graph g = load_graph(graph_path);
            AuditStrategy st = strategy == "exhaustive"      ? AuditStrategy::exhaustive()
                               : strategy == "neighborhoods" ? AuditStrategy::neighborhoods()
                               : strategy == "sampled"       ? AuditStrategy::sampled(samples, c.seed)
                                                             : throw Error(ErrorKind::InvalidSpec, "unknown strategy " + strategy);
            emit(audit_to_json(jumbledness_audit(g, audit_p.value_or(g.density()), st)), c.out);
        } else if (*spectral) {
            Graph g = load_graph(graph_path);
            std::vector<double> ev = adjacency_spectrum(g);
            json j;
            j["n"] = g.n();
            j["regular"] = g.is_regular();
            j["largest"] = ev.back();
            if (g.is_regular()) {
                j["lambda"] = spectral_lambda(g);
            } else if (ev.size() >= 2) {
                j["second_abs"] = std::max(std::abs(ev[ev.size() - 2]), std::abs(ev.front()));
            }
            emit(j.dump(2), c.out);
        } else if (*factor) {
            Graph g = load_graph(graph_path);
            ParameterProfile pr = resolve_profile(c, g.n(), r);
            FactorCertificate cert = find_clique_factor(g, pr);
            emit(factor_certificate_to_json(cert), c.out);
            return cert.verified ? 0 : 2;
        } else if (*tmpl) {
            emit(template_to_json(build_template(flex, max_deg, c.seed)), c.out);
        } else if (*bench) {
            std::vector<std::tuple<int, double, uint64_t>> jobs;
            for (double nv : parse_list(ns))
                for (double pv : parse_list(ps))
                    for (int s = 0; s < seeds; ++s) jobs.emplace_back(int(nv), pv, c.seed + uint64_t(s));
            std::vector<BenchRow> rows(jobs.size());
            std::atomic<size_t> next{0};
            std::mutex err_mu;
            std::exception_ptr err;
            auto worker = [&] {
                for (size_t i; (i = next++) < jobs.size();) {
                    try {
                        auto [jn, jp, js] = jobs[i];
                        rows[i] = bench_one(jn, jp, js, r, c);
                    } catch (...) {
                        std::lock_guard lk(err_mu);
                        if (!err) err = std::current_exception();
                    }
                }
            };
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
            pool.clear();
            if (err) std::rethrow_exception(err);
            std::ostringstream o;
            o << "n,p,seed,verified,phase,attempts,seconds\n";
            for (const BenchRow& row : rows)
                o << row.n << ',' << row.p << ',' << row.seed << ',' << int(row.verified) << ',' << row.phase << ','
                  << row.attempts << ',' << std::setprecision(6) << row.seconds << '\n';
            std::string text = o.str();
            text.pop_back();
            emit(text, c.out);
        } else if (*report) {
            emit(render_svg(read_bench_csv(slurp(csv_path))), c.out);
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return e.kind() == ErrorKind::PhaseFailed ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
