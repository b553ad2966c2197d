// Command-line front end: compute, oracle, verify, euler, trees, count-ff.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or data error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stablemaps/stablemaps.hpp"

namespace sm = stablemaps;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string target = "point";
    int kmax = 0;
    std::vector<int> dmax;
    std::string out;
    std::string format = "json";
    unsigned workers = 1;

    // verify
    std::vector<std::string> suites;
    int n = 1;
    int dmaxff = 2;
    std::vector<int> primes{2, 3, 5};
    int nmax = 4;
    std::string u_val = "4";
    double z_val = 0.01;

    // trees / count-ff
    int vmax = 5;
    int d = 1;
    int p = 2;
};

sm::Degree resolve_dmax(const RunConfig& cfg, const sm::TargetSpace& w) {
    if (cfg.dmax.empty()) return sm::Degree(w.rank(), 0);
    for (int x : cfg.dmax)
        if (x < 0) throw sm::DataError("dmax components must be >= 0");
    if (cfg.dmax.size() == 1) return sm::Degree(w.rank(), cfg.dmax[0]);
    if (cfg.dmax.size() != w.rank()) throw sm::DataError("--dmax has the wrong number of components for the target");
    return cfg.dmax;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw sm::DataError("cannot write " + cfg.out);
    f << text;
}

std::string beta_string(const sm::Degree& d) {
    std::string s = "[";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + "]";
}

int cmd_compute(const RunConfig& cfg) {
    const auto w = sm::parse_target(cfg.target);
    const auto table = sm::compute_classes(w, cfg.kmax, resolve_dmax(cfg, w));
    emit(cfg, cfg.format == "csv" ? sm::to_csv(table) : sm::to_json(table).dump(2) + "\n");
    return 0;
}

int cmd_oracle(const RunConfig& cfg) {
    const auto w = sm::parse_target(cfg.target);
    const auto series = sm::tree_sum_potential(w, cfg.kmax, resolve_dmax(cfg, w), cfg.workers);
    json j = sm::to_json(series);
    j["target"] = w.name();
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int cmd_euler(const RunConfig& cfg) {
    const auto w = sm::parse_target(cfg.target);
    const auto dmax = resolve_dmax(cfg, w);
    const auto chis = sm::chi_table(sm::chi_potential(w, sm::solve_phi0_chi(w, cfg.kmax, dmax)));
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "k,beta,chi\n";
        for (const auto& [key, v] : chis) os << key.k << ",\"" << beta_string(key.beta) << "\"," << v.get_str() << "\n";
        emit(cfg, os.str());
    } else {
        json entries = json::array();
        for (const auto& [key, v] : chis) entries.push_back({{"k", key.k}, {"beta", key.beta}, {"chi", v.get_str()}});
        emit(cfg, json{{"target", w.name()}, {"kmax", cfg.kmax}, {"dmax", dmax}, {"entries", entries}}.dump(2) + "\n");
    }
    return 0;
}

int cmd_trees(const RunConfig& cfg) {
    std::ostringstream os;
    if (cfg.format == "csv") os << "vcount,aut,code\n";
    json rows = json::array();
    for (const auto& tc : sm::enum_trees(cfg.vmax)) {
        if (cfg.format == "csv")
            os << tc.tree.vcount << "," << tc.aut_order << "," << tc.tree.canonical_code << "\n";
        else
            rows.push_back({{"vcount", tc.tree.vcount}, {"aut", tc.aut_order}, {"code", tc.tree.canonical_code}});
    }
    emit(cfg, cfg.format == "csv" ? os.str() : rows.dump(2) + "\n");
    return 0;
}

int cmd_count_ff(const RunConfig& cfg) {
    const auto count = sm::count_maps_bruteforce(cfg.n, cfg.d, cfg.p, cfg.workers);
    emit(cfg, count.get_str() + "\n");
    return 0;
}

struct SuiteResult {
    std::string name;
    bool pass;
    std::string detail;
};

SuiteResult run_suite(const std::string& suite, const RunConfig& cfg) {
    if (suite == "recurrence") {
        const bool ok = sm::verify_recurrence(cfg.n, cfg.dmaxff);
        return {suite, ok, "n=" + std::to_string(cfg.n) + " d<=" + std::to_string(cfg.dmaxff)};
    }
    if (suite == "ffcount") {
        const auto w = sm::projective_space(cfg.n);
        for (int d = 1; d <= cfg.dmaxff; ++d)
            for (int p : cfg.primes) {
                const auto counted = sm::count_maps_bruteforce(cfg.n, d, p, cfg.workers);
                const auto expected = sm::eval_at(w.map_class({d}), p);
                if (sm::BigRat(counted) != expected)
                    return {suite, false,
                            "d=" + std::to_string(d) + " p=" + std::to_string(p) + ": counted " + counted.get_str() +
                                ", expected " + expected.get_str()};
            }
        return {suite, true, "n=" + std::to_string(cfg.n) + " d<=" + std::to_string(cfg.dmaxff)};
    }

    const auto w = sm::parse_target(cfg.target);
    const auto dmax = resolve_dmax(cfg, w);
    if (suite == "ode") {
        const auto r = sm::verify_ode(sm::solve_phi0(w, cfg.kmax, dmax));
        return {suite, r.ok(), r.ok() ? "zero residual" : "nonzero residual: " + sm::to_json(r.phi_form).dump()};
    }
    if (suite == "dt") {
        const auto phi = sm::solve_phi0(w, cfg.kmax, dmax);
        const bool ok = sm::verify_dt(sm::potential(w, phi), phi, w);
        return {suite, ok, ok ? "dPhi/dt = P_W phi0" : "derivative identity fails"};
    }
    if (suite == "oracle") {
        const auto solver = sm::potential(w, sm::solve_phi0(w, cfg.kmax, dmax));
        const auto oracle = sm::tree_sum_potential(w, cfg.kmax, dmax, cfg.workers);
        if (solver == oracle) return {suite, true, "solver equals tree sum"};
        for (int k = 0; k <= cfg.kmax; ++k)
            for (const auto& d : sm::degrees_in_box(dmax))
                if (solver.coeff(k, d) != oracle.coeff(k, d))
                    return {suite, false,
                            "k=" + std::to_string(k) + " beta=" + beta_string(d) + ": solver " +
                                solver.coeff(k, d).to_string() + ", tree sum " + oracle.coeff(k, d).to_string()};
        return {suite, false, "series differ"};
    }
    if (suite == "potential") {
        const bool ok = sm::verify_potential_expansion(w, cfg.nmax, cfg.kmax, dmax);
        return {suite, ok, "nmax=" + std::to_string(cfg.nmax)};
    }
    if (suite == "implicit") {
        const int k = std::max(cfg.kmax, 10);
        const std::vector<double> ts{0.0, 0.005, 0.01};
        const double spread = sm::verify_implicit_numeric(w, sm::parse_rat(cfg.u_val), cfg.z_val, ts, k, dmax);
        std::ostringstream os;
        os << "advisory: relative spread " << spread;
        return {suite, spread <= 1e-5, os.str()};
    }
    if (suite == "chi") {
        const bool ok = sm::crosscheck_chi(w, cfg.kmax, dmax);
        return {suite, ok, ok ? "u -> 1 limit agrees" : "Euler characteristics disagree"};
    }
    throw sm::DataError("unknown suite \"" + suite + "\"");
}

int cmd_verify(const RunConfig& cfg) {
    std::vector<std::string> suites = cfg.suites;
    if (suites.empty() || (suites.size() == 1 && suites[0] == "all"))
        suites = {"ode", "dt", "oracle", "potential", "implicit", "recurrence", "ffcount", "chi"};
    bool all_ok = true;
    json summary = json::array();
    for (const auto& s : suites) {
        const auto r = run_suite(s, cfg);
        all_ok = all_ok && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        summary.push_back({{"suite", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    std::cout << json{{"pass", all_ok}, {"suites", summary}}.dump() << "\n";
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Virtual Poincare polynomials of genus-zero stable map spaces"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;

    app.add_option("--target", cfg.target, "point | pn:N | file:PATH");
    app.add_option("--kmax", cfg.kmax, "largest number of marked points")->check(CLI::NonNegativeNumber);
    app.add_option("--dmax", cfg.dmax, "largest degree, one value per grading component")->delimiter(',');
    app.add_option("--out", cfg.out, "output file (default stdout)");
    app.add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);

    auto* compute = app.add_subcommand("compute", "class table from the functional-equation solver");
    auto* oracle = app.add_subcommand("oracle", "potential as a direct sum over marked trees");
    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", cfg.suites, "ode|dt|oracle|potential|implicit|recurrence|ffcount|chi|all")
        ->delimiter(',');
    verify->add_option("--n", cfg.n, "projective dimension for recurrence/ffcount");
    verify->add_option("--dmaxff", cfg.dmaxff, "largest degree for recurrence/ffcount");
    verify->add_option("--primes", cfg.primes, "primes for ffcount")->delimiter(',');
    verify->add_option("--nmax", cfg.nmax, "phi-degree for the potential expansion");
    verify->add_option("--u", cfg.u_val, "value of u for the implicit check");
    verify->add_option("--zval", cfg.z_val, "value of z for the implicit check");
    auto* euler = app.add_subcommand("euler", "Euler characteristics via the u -> 1 limit");
    auto* trees = app.add_subcommand("trees", "isomorphism classes of trees with |Aut|");
    trees->add_option("--vmax", cfg.vmax, "largest vertex count")->check(CLI::PositiveNumber);
    auto* count = app.add_subcommand("count-ff", "brute-force count of degree-d maps P^1 -> P^n over F_p");
    count->add_option("--n", cfg.n)->required();
    count->add_option("--d", cfg.d)->required();
    count->add_option("--p", cfg.p)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*compute) return cmd_compute(cfg);
        if (*oracle) return cmd_oracle(cfg);
        if (*verify) return cmd_verify(cfg);
        if (*euler) return cmd_euler(cfg);
        if (*trees) return cmd_trees(cfg);
        if (*count) return cmd_count_ff(cfg);
    } catch (const sm::NonPolynomialClass& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sm::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
