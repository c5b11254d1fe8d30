#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "commsim/selfcheck.hpp"
#include "commsim/serialize.hpp"

using namespace commsim;

namespace {

struct SimulateArgs {
    std::string scheme = "lr";
    std::string family = "geometric";
    double param = 0.8;
    int d = 0;
    long long n = 0;
    int b = 2;
    double q = 2.0;
    int trials = 1;
    std::uint64_t seed = 0;
    int threads = 0;
    bool renormalize = false;
};

int cmd_simulate(const SimulateArgs& a) {
    const Scheme scheme = parse_scheme(a.scheme);
    const Distribution p = make_family(a.family, a.param, a.d, a.seed);
    SchemeConfig cfg;
    cfg.n = a.n;
    cfg.d = a.d;
    cfg.b = a.b;
    cfg.q = a.q;
    cfg.seed = a.seed;
    cfg.renormalize = a.renormalize;
    CellSummary cell = monte_carlo(scheme, p, cfg, a.trials, resolve_threads(a.threads));
    cell.family = a.family;
    cell.param = a.param;
    std::cout << json(cell).dump(2) << "\n";
    return 0;
}

struct ComplexityArgs {
    std::string family = "uniform";
    double param = 0.0;
    int d = 0;
    long long n = 0;
    int b = 0;
};

int cmd_complexity(const ComplexityArgs& a) {
    const Distribution p = make_family(a.family, a.param, a.d, 0);
    json j = complexity_profile(p);
    if (a.family == "geometric" || a.family == "uniform") {
        const double closed = a.family == "geometric" ? geometric_half_norm(a.param, a.d) : double(a.d);
        j["closed_form_half_norm"] = closed;
        j["closed_form_abs_diff"] = std::fabs(closed - j.at("half_norm").get<double>());
    }
    if (a.n > 0 || a.b > 0) {
        if (a.n <= 0 || a.b <= 0) throw validation_error("bound evaluation needs both --n and --b");
        j["bounds"] = json{{"n", a.n},
                           {"b", a.b},
                           {"l2_bound", l2_error_bound(p, a.n, a.b)},
                           {"l1_bound", l1_error_bound(p, a.n, a.b)}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct SweepArgs {
    std::string spec_path;
    std::string preset;
    std::string out_path;
    int threads = 0;
};

int cmd_sweep(const SweepArgs& a) {
    SweepSpec spec;
    if (!a.preset.empty()) {
        spec = preset_by_name(a.preset);
    } else {
        std::ifstream is(a.spec_path);
        if (!is) throw validation_error("cannot read sweep spec '" + a.spec_path + "'");
        spec = json::parse(is).get<SweepSpec>();
    }
    const auto rows = run_sweep(spec, resolve_threads(a.threads), &std::cerr);
    emit_csv(rows, a.out_path);
    std::cerr << "wrote " << rows.size() << " rows to " << a.out_path << "\n";
    return 0;
}

int cmd_check(const std::string& suite, int threads) {
    std::vector<CheckResult> results;
    if (suite == "fast") {
        results = run_fast_checks(&std::cerr);
    } else {
        results = run_full_checks(resolve_threads(threads), &std::cerr, ".");
    }
    int failures = 0;
    json report = json::array();
    for (const auto& r : results) {
        std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.index << " " << r.name << ": " << r.details << "\n";
        report.push_back(json{{"index", r.index}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}});
        failures += r.pass ? 0 : 1;
    }
    std::cout << report.dump(2) << "\n";
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-round communication-constrained distribution estimation simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run one Monte Carlo cell and print its JSON summary");
    simulate->add_option("--scheme", sim.scheme, "minimax or lr (localize_refine)");
    simulate->add_option("--family", sim.family, "uniform, geometric, zipf, sparse, or point");
    simulate->add_option("--param", sim.param, "family parameter");
    simulate->add_option("--d", sim.d, "alphabet size")->required();
    simulate->add_option("--n", sim.n, "number of clients")->required();
    simulate->add_option("--b", sim.b, "bits per message");
    simulate->add_option("--q", sim.q, "loss order in [1,2]");
    simulate->add_option("--trials", sim.trials, "Monte Carlo trials");
    simulate->add_option("--seed", sim.seed, "base seed");
    simulate->add_option("--threads", sim.threads, "worker threads (0 = auto)");
    simulate->add_flag("--renormalize", sim.renormalize, "project the reported estimate to the simplex");

    ComplexityArgs cx;
    auto* complexity = app.add_subcommand("complexity", "print the norm/entropy profile of a family member");
    complexity->add_option("--family", cx.family, "family name")->required();
    complexity->add_option("--param", cx.param, "family parameter");
    complexity->add_option("--d", cx.d, "alphabet size")->required();
    complexity->add_option("--n", cx.n, "clients for bound evaluation (with --b)");
    complexity->add_option("--b", cx.b, "bits for bound evaluation (with --n)");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "run a sweep spec or preset and write a CSV table");
    auto* spec_opt = sweep->add_option("--spec", sw.spec_path, "JSON sweep spec path");
    auto* preset_opt = sweep->add_option("--preset", sw.preset, "fig1-left or fig1-right");
    spec_opt->excludes(preset_opt);
    preset_opt->excludes(spec_opt);
    sweep->add_option("--out", sw.out_path, "output CSV path")->required();
    sweep->add_option("--threads", sw.threads, "worker threads (0 = auto)");

    std::string suite = "fast";
    int check_threads = 0;
    auto* check = app.add_subcommand("check", "run the self-check suites");
    check->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    check->add_option("--threads", check_threads, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (complexity->parsed()) return cmd_complexity(cx);
        if (sweep->parsed()) {
            if (sw.spec_path.empty() && sw.preset.empty())
                throw validation_error("sweep needs --spec or --preset");
            return cmd_sweep(sw);
        }
        if (check->parsed()) return cmd_check(suite, check_threads);
    } catch (const protocol_error& e) {
        std::cerr << "protocol violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
