#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "commsim/families.hpp"
#include "commsim/protocol.hpp"

namespace commsim {

// Named family registry used by sweeps and the CLI. param means: geometric
// decay beta, zipf exponent lambda, sparse support size s, point-mass
// position (1-based); uniform ignores it. The seed only matters for the
// randomized sparse family.
inline Distribution make_family(const std::string& name, double param, int d, std::uint64_t seed = 0) {
    try {
        if (name == "uniform") return uniform(d);
        if (name == "geometric") return geometric(param, d);
        if (name == "zipf") return zipf(param, d);
        if (name == "sparse") {
            const int s = (int)param;
            if (s < 1 || (double)s != param)
                throw validation_error("sparse family needs an integer support size >= 1");
            Rng rng = make_rng(seed, 0x5ea5);
            return sparse_random(s, d, rng);
        }
        if (name == "point") {
            const int pos = param < 1 ? 1 : (int)param;
            if (pos > d) throw validation_error("point-mass position exceeds the alphabet");
            std::vector<double> w(d, 0.0);
            w[pos - 1] = 1.0;
            return make_distribution(w);
        }
    } catch (const std::domain_error& e) {
        // Family constructors signal parameter misuse with domain errors;
        // surface them as input-validation failures here.
        throw validation_error(e.what());
    }
    throw validation_error("unknown family '" + name + "' (expected uniform, geometric, zipf, sparse, or point)");
}

// Round-1 concentration radius 3 d log(nd) / (n 2^b); also the tail knob in
// both error bounds.
inline double concentration_radius(long long n, int d, int b) {
    return 3.0 * d * std::log((double)n * d) / ((double)n * (double)(1 << b));
}

// Expected-l2 ceiling for the two-round scheme:
//   3/n + 6 |p|_{1/2} / (n 2^b) + 30 d^3 log(nd) / (n 2^b)^2.
inline double l2_error_bound(const Distribution& p, long long n, int b) {
    const double d = (double)p.d();
    const double nb = (double)n * (double)(1 << b);
    return 3.0 / (double)n + 6.0 * norm_q(p, 0.5) / nb + 30.0 * d * d * d * std::log((double)n * d) / (nb * nb);
}

// Expected-l1 ceiling:
//   2/n + sqrt(2 |p|_{1/2} / n) + sqrt(16 |p|_{1/3} / (n 2^b))
//       + sqrt(48 d^3 eps_n / (n 2^b)).
inline double l1_error_bound(const Distribution& p, long long n, int b) {
    const double d = (double)p.d();
    const double nb = (double)n * (double)(1 << b);
    const double eps = concentration_radius(n, p.d(), b);
    return 2.0 / (double)n + std::sqrt(2.0 * norm_q(p, 0.5) / (double)n) + std::sqrt(16.0 * norm_q(p, 1.0 / 3.0) / nb) +
           std::sqrt(48.0 * d * d * d * eps / nb);
}

struct CellSummary {
    std::string scheme;
    std::string family = "custom";
    double param = 0.0;
    int d = 0;
    long long n = 0;
    int b = 0;
    double q = 2.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double mean_loss = 0.0;
    double stderr_value = 0.0;
    bool single_trial = false;
    bool has_bound = false;
    double theory_bound = 0.0;
    long long contract_violations = 0;
};

inline int resolve_threads(int requested) {
    if (const char* env = std::getenv("COMMSIM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    if (requested >= 1) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? (int)hw : 1;
}

// Mean and stderr of the configured loss over independent seeded trials.
// Trial t always uses the rng stream (cfg.seed, t), so results do not depend
// on the thread count. Budget-contract breaches (messages at or above 2^b,
// bit totals off n*b) are counted, never repaired.
inline CellSummary monte_carlo(Scheme scheme, const Distribution& p, const SchemeConfig& cfg, int trials,
                               int threads = 1) {
    if (trials < 1) throw validation_error("trials must be >= 1");
    std::vector<double> losses((std::size_t)trials);
    std::vector<long long> violations((std::size_t)std::max(1, threads), 0);
    std::exception_ptr failure;
    std::mutex failure_lock;

    const int workers = std::max(1, std::min(threads, trials));
    auto work = [&](int w, int lo, int hi) {
        try {
            for (int t = lo; t < hi; ++t) {
                Rng rng = make_rng(cfg.seed, (std::uint64_t)t);
                EstimationResult r = run_scheme(scheme, p, cfg, rng);
                losses[t] = r.lq;
                const bool ok = r.stats.total_bits == cfg.n * (long long)cfg.b && r.stats.max_message < (1 << cfg.b) &&
                                r.stats.message_count == cfg.n;
                if (!ok) ++violations[w];
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(failure_lock);
            if (!failure) failure = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int lo = w * chunk;
            const int hi = std::min(trials, lo + chunk);
            if (lo < hi) pool.emplace_back(work, w, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    CellSummary cell;
    cell.scheme = scheme_name(scheme);
    cell.d = cfg.d;
    cell.n = cfg.n;
    cell.b = cfg.b;
    cell.q = cfg.q;
    cell.trials = trials;
    cell.seed = cfg.seed;
    long double sum = 0.0L;
    for (double v : losses) sum += v;
    cell.mean_loss = double(sum / trials);
    if (trials == 1) {
        cell.single_trial = true;
        cell.stderr_value = 0.0;
    } else {
        long double ss = 0.0L;
        for (double v : losses) ss += ((long double)v - cell.mean_loss) * ((long double)v - cell.mean_loss);
        cell.stderr_value = double(std::sqrt((double)(ss / (trials - 1))) / std::sqrt((double)trials));
    }
    for (long long v : violations) cell.contract_violations += v;
    if (scheme == Scheme::localize_refine && (cfg.q == 1.0 || cfg.q == 2.0)) {
        cell.has_bound = true;
        cell.theory_bound = cfg.q == 2.0 ? l2_error_bound(p, cfg.n, cfg.b) : l1_error_bound(p, cfg.n, cfg.b);
    }
    return cell;
}

struct SweepSpec {
    std::vector<std::string> schemes = {"minimax", "localize_refine"};
    std::string family;
    double param = 0.0;
    std::vector<long long> n_grid;
    std::vector<int> d_grid;
    std::vector<int> b_grid;
    int trials = 50;
    double q = 2.0;
    std::uint64_t base_seed = 1;
};

inline void validate_sweep(const SweepSpec& spec) {
    if (spec.schemes.empty()) throw validation_error("sweep needs at least one scheme");
    for (const auto& s : spec.schemes) parse_scheme(s);
    if (spec.n_grid.empty()) throw validation_error("sweep n_grid is empty");
    if (spec.d_grid.empty()) throw validation_error("sweep d_grid is empty");
    if (spec.b_grid.empty()) throw validation_error("sweep b_grid is empty");
    if (spec.trials < 1) throw validation_error("sweep trials must be >= 1");
    if (!(spec.q >= 1.0 && spec.q <= 2.0)) throw validation_error("sweep q must lie in [1, 2]");
    make_family(spec.family, spec.param, *std::max_element(spec.d_grid.begin(), spec.d_grid.end()));
}

// Rows come out in spec order (scheme-major, then d, b, n); each row's seed
// is derived from (base_seed, row index), so any execution order or thread
// count reproduces the same table.
inline std::vector<CellSummary> run_sweep(const SweepSpec& spec, int threads = 1, std::ostream* progress = nullptr) {
    validate_sweep(spec);
    std::vector<CellSummary> rows;
    std::uint64_t row_index = 0;
    const std::size_t total =
        spec.schemes.size() * spec.d_grid.size() * spec.b_grid.size() * spec.n_grid.size();
    for (const auto& scheme_str : spec.schemes) {
        const Scheme scheme = parse_scheme(scheme_str);
        for (int d : spec.d_grid) {
            const Distribution p =
                make_family(spec.family, spec.param, d, derive_seed(spec.base_seed, 1000000u + (std::uint64_t)d));
            for (int b : spec.b_grid) {
                for (long long n : spec.n_grid) {
                    SchemeConfig cfg;
                    cfg.n = n;
                    cfg.d = d;
                    cfg.b = b;
                    cfg.q = spec.q;
                    cfg.seed = derive_seed(spec.base_seed, row_index);
                    CellSummary cell = monte_carlo(scheme, p, cfg, spec.trials, threads);
                    cell.family = spec.family;
                    cell.param = spec.param;
                    rows.push_back(std::move(cell));
                    ++row_index;
                    if (progress)
                        (*progress) << "cell " << row_index << "/" << total << ": " << scheme_name(scheme) << " d=" << d
                                    << " b=" << b << " n=" << n << " mean=" << rows.back().mean_loss << "\n";
                }
            }
        }
    }
    return rows;
}

// The two bundled figure presets: error versus n at two alphabet sizes, and
// error versus d at fixed n, both on the geometric(0.8) family at b = 2.
inline SweepSpec preset_error_vs_n() {
    SweepSpec s;
    s.family = "geometric";
    s.param = 0.8;
    s.n_grid = {2000, 5000, 10000, 20000, 50000, 100000};
    s.d_grid = {100, 500};
    s.b_grid = {2};
    s.trials = 50;
    s.q = 2.0;
    s.base_seed = 101;
    return s;
}

inline SweepSpec preset_error_vs_d() {
    SweepSpec s;
    s.family = "geometric";
    s.param = 0.8;
    s.n_grid = {50000};
    s.d_grid = {100, 200, 400, 800};
    s.b_grid = {2};
    s.trials = 50;
    s.q = 2.0;
    s.base_seed = 202;
    return s;
}

inline SweepSpec preset_by_name(const std::string& name) {
    if (name == "fig1-left") return preset_error_vs_n();
    if (name == "fig1-right") return preset_error_vs_d();
    throw validation_error("unknown preset '" + name + "' (expected fig1-left or fig1-right)");
}

namespace detail {

inline std::string csv_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "scheme,family,param,d,n,b,q,trials,seed,mean_loss,stderr,theory_bound";

inline void emit_csv(const std::vector<CellSummary>& rows, std::ostream& os) {
    os << kCsvHeader << "\n";
    for (const auto& r : rows) {
        os << detail::csv_quote(r.scheme) << ',' << detail::csv_quote(r.family) << ',' << detail::csv_real(r.param)
           << ',' << r.d << ',' << r.n << ',' << r.b << ',' << detail::csv_real(r.q) << ',' << r.trials << ','
           << r.seed << ',' << detail::csv_real(r.mean_loss) << ',' << detail::csv_real(r.stderr_value) << ','
           << (r.has_bound ? detail::csv_real(r.theory_bound) : "") << "\n";
    }
}

inline void emit_csv(const std::vector<CellSummary>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw validation_error("cannot open '" + path + "' for writing");
    emit_csv(rows, os);
    if (!os.good()) throw validation_error("failed writing '" + path + "'");
}

}  // namespace commsim
