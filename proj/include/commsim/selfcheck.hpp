#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "commsim/eval.hpp"
#include "commsim/families.hpp"
#include "commsim/protocol.hpp"

namespace commsim {

struct CheckResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string details;
};

namespace detail {

inline std::string g4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline void progress_line(std::ostream* os, const std::string& line) {
    if (os) (*os) << "  " << line << "\n" << std::flush;
}

// The family battery reused by the norm checks: the closed-form suspects
// plus one heavy-tailed and one sparse member.
inline std::vector<std::pair<std::string, Distribution>> norm_battery() {
    std::vector<std::pair<std::string, Distribution>> out;
    for (int d : {2, 10, 1000}) out.emplace_back("uniform d=" + std::to_string(d), uniform(d));
    for (double beta : {0.2, 0.5, 0.8, 0.99})
        for (int d : {10, 100, 1000})
            out.emplace_back("geometric beta=" + g4(beta) + " d=" + std::to_string(d), geometric(beta, d));
    out.emplace_back("zipf lambda=2 d=100", zipf(2.0, 100));
    Rng rng = make_rng(424242, 0);
    out.emplace_back("sparse s=5 d=100", sparse_random(5, 100, rng));
    return out;
}

}  // namespace detail

// Criterion 1: the half-norm identities the rest of the theory leans on.
// Uniform alphabets have half-norm exactly d; truncated geometric matches
// its closed form.
inline CheckResult criterion_norm_identities() {
    double worst = 0.0;
    std::string worst_case = "none";
    for (int d : {2, 10, 1000}) {
        const double err = std::fabs(norm_q(uniform(d), 0.5) - double(d));
        if (err > worst) {
            worst = err;
            worst_case = "uniform d=" + std::to_string(d);
        }
    }
    for (double beta : {0.2, 0.5, 0.8, 0.99}) {
        for (int d : {10, 100, 1000}) {
            const double err = std::fabs(norm_q(geometric(beta, d), 0.5) - geometric_half_norm(beta, d));
            if (err > worst) {
                worst = err;
                worst_case = "geometric beta=" + detail::g4(beta) + " d=" + std::to_string(d);
            }
        }
    }
    CheckResult r;
    r.index = 1;
    r.name = "norm-identities";
    r.pass = worst <= 1e-9;
    r.details = "max deviation " + detail::g4(worst) + " at " + worst_case + " (tolerance 1e-9)";
    return r;
}

// Criterion 2: the norm sandwich. For every distribution in the battery and
// 1000 seeded random ones, |p|_{1/2} >= max_h h^2 p_(h) >= C_delta
// |p|_{(1+delta)/2} for delta in {0.5, 1}. The random battery is checked
// exactly; the closed-form families allow 1e-12 relative slack because the
// uniform case is an exact equality that floating point may tip either way.
inline CheckResult criterion_norm_sandwich() {
    const double deltas[] = {0.5, 1.0};
    long long checked = 0;
    double worst_rel = 0.0;
    auto check_one = [&](const Distribution& p, double slack) {
        const double half = norm_q(p, 0.5);
        const double hstar = complexity_profile(p).h_star_value;
        bool ok = half >= hstar - slack * hstar;
        worst_rel = std::max(worst_rel, (hstar - half) / std::max(hstar, 1e-300));
        for (double delta : deltas) {
            const double c = std::pow(delta / (1.0 + delta), 2.0 / (1.0 + delta));
            const double lower = c * norm_q(p, (1.0 + delta) / 2.0);
            ok = ok && hstar >= lower - slack * lower;
            worst_rel = std::max(worst_rel, (lower - hstar) / std::max(lower, 1e-300));
        }
        ++checked;
        return ok;
    };
    bool pass = true;
    Rng rng = make_rng(20240819, 0);
    for (int t = 0; t < 1000; ++t) {
        const int d = 2 + int(rng() % 199);
        pass = check_one(random_full_support(d, rng), 0.0) && pass;
    }
    for (const auto& [label, p] : detail::norm_battery()) pass = check_one(p, 1e-12) && pass;
    CheckResult r;
    r.index = 2;
    r.name = "norm-sandwich";
    r.pass = pass;
    r.details = std::to_string(checked) + " distributions, worst signed violation " + detail::g4(worst_rel) +
                " (negative or ~1e-16 means slack)";
    return r;
}

// Criterion 3: unbiasedness and variance oracles at (d=8, b=2, n=1024) over
// 10^4 trials, for the coarse round-1 estimate and for the refinement
// estimate conditioned on one frozen plan.
inline CheckResult criterion_estimator_oracles(std::ostream* progress = nullptr) {
    const int d = 8, b = 2, trials = 10000;
    const long long n = 1024;
    const Distribution p = geometric(0.7, d);
    double worst_z = 0.0, worst_var_rel = 0.0;

    auto tally = [&](const std::vector<double>& mean, const std::vector<double>& m2,
                     const std::vector<int>& sizes) {
        for (int j = 0; j < d; ++j) {
            const double mu = mean[j] / trials;
            const double var = (m2[j] - trials * mu * mu) / (trials - 1);
            const double oracle = p.probs[j] * (1 - p.probs[j]) / sizes[j];
            const double z = std::fabs(mu - p.probs[j]) / std::sqrt(oracle / trials);
            worst_z = std::max(worst_z, z);
            worst_var_rel = std::max(worst_var_rel, std::fabs(var - oracle) / oracle);
        }
    };

    {
        std::vector<double> mean(d, 0.0), m2(d, 0.0);
        std::vector<int> sizes;
        for (int t = 0; t < trials; ++t) {
            Rng rng = make_rng(33001, t);
            auto run = run_minimax_baseline(p, n, d, b, rng);
            if (t == 0) sizes = run.estimate.per_symbol_count;
            for (int j = 0; j < d; ++j) {
                mean[j] += run.estimate.p_hat[j];
                m2[j] += run.estimate.p_hat[j] * run.estimate.p_hat[j];
            }
        }
        tally(mean, m2, sizes);
        detail::progress_line(progress, "coarse estimate checked over 10^4 runs");
    }
    {
        SchemeConfig cfg;
        cfg.n = n;
        cfg.d = d;
        cfg.b = b;
        cfg.seed = 33002;
        Rng rng = make_rng(cfg.seed, 0);
        Transcript t0;
        run_localize_refine(p, cfg, rng, &t0);
        auto der = derive_refinement_plan(t0.round1_messages, cfg);
        Sampler sampler(p);
        const int clients = (int)der.plan.memberships.size();
        std::vector<double> mean(d, 0.0), m2(d, 0.0);
        std::vector<Message> msgs(clients);
        for (int t = 0; t < trials; ++t) {
            Rng r = make_rng(33003, t);
            for (int i = 0; i < clients; ++i) msgs[i] = r2_encode(sampler.draw(r), der.plan.memberships[i]);
            auto est = r2_estimate(msgs, der.plan);
            for (int j = 0; j < d; ++j) {
                mean[j] += est[j];
                m2[j] += est[j] * est[j];
            }
        }
        tally(mean, m2, der.group_sizes);
        detail::progress_line(progress, "refined estimate checked against one frozen plan");
    }

    CheckResult r;
    r.index = 3;
    r.name = "estimator-oracles";
    r.pass = worst_z < 3.0 && worst_var_rel < 0.10;
    r.details = "worst mean z-score " + detail::g4(worst_z) + " (limit 3), worst variance deviation " +
                detail::g4(100 * worst_var_rel) + "% (limit 10%)";
    return r;
}

// Criterion 4: protocol contracts. An explicit battery of runs is checked
// message by message (budget, counts, plan derivation, group invariants),
// and every Monte Carlo cell executed by the wider suite feeds its own
// violation counter into `amortized`.
inline CheckResult criterion_protocol_contracts(long long amortized_violations, long long amortized_cells,
                                                std::ostream* progress = nullptr) {
    long long battery_runs = 0, violations = 0;
    for (Scheme scheme : {Scheme::minimax, Scheme::localize_refine}) {
        for (int b : {1, 2, 3, 4}) {
            for (long long n : {101LL, 1024LL}) {
                for (int d : {5, 9, 16}) {
                    const Distribution p = zipf(1.0, d);
                    SchemeConfig cfg;
                    cfg.n = n;
                    cfg.d = d;
                    cfg.b = b;
                    cfg.seed = 44000 + b * 100 + d;
                    Rng rng = make_rng(cfg.seed, 0);
                    Transcript t;
                    EstimationResult res = run_scheme(scheme, p, cfg, rng, &t);
                    ++battery_runs;
                    if (!verify_transcript(t, cfg).empty()) ++violations;
                    if (res.stats.total_bits != n * b) ++violations;
                    if (res.stats.max_message >= (1 << b)) ++violations;
                    if (scheme == Scheme::localize_refine) {
                        auto der = derive_refinement_plan(t.round1_messages, cfg);
                        for (int j = 0; j < d; ++j)
                            if ((int)der.plan.groups[j].size() != der.group_sizes[j]) ++violations;
                        for (const auto& J : der.plan.memberships)
                            if ((int)J.size() > (1 << b) - 1) ++violations;
                    }
                }
            }
        }
    }
    detail::progress_line(progress, std::to_string(battery_runs) + " battery runs verified");
    CheckResult r;
    r.index = 4;
    r.name = "protocol-contracts";
    r.pass = violations == 0 && amortized_violations == 0;
    r.details = std::to_string(battery_runs) + " battery runs + " + std::to_string(amortized_cells) +
                " amortized cells: " + std::to_string(violations + amortized_violations) + " violations";
    return r;
}

namespace detail {

struct EnvelopeOutcome {
    CheckResult result;
    long long violations = 0;
    long long cells = 0;
};

inline EnvelopeOutcome envelope_criterion(int index, const std::string& name, double q, int threads,
                                          std::ostream* progress) {
    std::vector<std::pair<std::string, Distribution>> dists;
    dists.emplace_back("uniform", uniform(100));
    dists.emplace_back("geometric(0.8)", geometric(0.8, 100));
    dists.emplace_back("zipf(2)", zipf(2.0, 100));
    Rng rng = make_rng(424242, 0);
    dists.emplace_back("sparse(s=5)", sparse_random(5, 100, rng));

    EnvelopeOutcome out;
    double worst_ratio = 0.0;
    std::string worst_cell = "none";
    std::uint64_t cell_index = 0;
    for (const auto& [label, p] : dists) {
        for (int b : {1, 2, 3}) {
            SchemeConfig cfg;
            cfg.n = 1000000;
            cfg.d = 100;
            cfg.b = b;
            cfg.q = q;
            cfg.seed = derive_seed(q == 2.0 ? 55001 : 66001, cell_index++);
            CellSummary cell = monte_carlo(Scheme::localize_refine, p, cfg, 50, threads);
            const double bound = q == 2.0 ? l2_error_bound(p, cfg.n, b) : l1_error_bound(p, cfg.n, b);
            const double ratio = cell.mean_loss / bound;
            out.violations += cell.contract_violations;
            ++out.cells;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst_cell = label + " b=" + std::to_string(b);
            }
            progress_line(progress, label + " b=" + std::to_string(b) + ": mean " + g4(cell.mean_loss) +
                                        " vs bound " + g4(bound) + " (ratio " + g4(ratio) + ")");
        }
    }
    out.result.index = index;
    out.result.name = name;
    out.result.pass = worst_ratio <= 1.0;
    out.result.details =
        "12 cells at n=10^6, d=100; worst mean/bound ratio " + g4(worst_ratio) + " at " + worst_cell;
    return out;
}

}  // namespace detail

// Criterion 5: measured l2 error of the two-round scheme stays under its
// expected-loss ceiling on every envelope cell.
inline detail::EnvelopeOutcome criterion_l2_envelope(int threads, std::ostream* progress = nullptr) {
    return detail::envelope_criterion(5, "l2-envelope", 2.0, threads, progress);
}

// Criterion 6: the same grid against the l1 ceiling (cube-root allocation).
inline detail::EnvelopeOutcome criterion_l1_envelope(int threads, std::ostream* progress = nullptr) {
    return detail::envelope_criterion(6, "l1-envelope", 1.0, threads, progress);
}

// Criterion 7: the two bundled figure presets, with three trend gates:
// (a) the two-round scheme beats the baseline at every cell, (b) growing d
// leaves it nearly flat while the baseline scales linearly, (c) at the
// largest n the gap reaches 5x. Writes both CSVs as a side effect.
struct FigureOutcome {
    CheckResult result;
    long long violations = 0;
    long long cells = 0;
    std::vector<CellSummary> left_rows, right_rows;
};

inline FigureOutcome criterion_figure_trends(int threads, const std::string& csv_dir = ".",
                                             std::ostream* progress = nullptr) {
    FigureOutcome out;
    out.left_rows = run_sweep(preset_error_vs_n(), threads, progress);
    out.right_rows = run_sweep(preset_error_vs_d(), threads, progress);
    if (!csv_dir.empty()) {
        emit_csv(out.left_rows, csv_dir + "/fig1-left.csv");
        emit_csv(out.right_rows, csv_dir + "/fig1-right.csv");
    }
    for (const auto& rows : {out.left_rows, out.right_rows}) {
        for (const auto& c : rows) {
            out.violations += c.contract_violations;
            ++out.cells;
        }
    }

    auto mean_of = [](const std::vector<CellSummary>& rows, const std::string& scheme, int d, long long n) {
        for (const auto& c : rows)
            if (c.scheme == scheme && c.d == d && c.n == n) return c.mean_loss;
        throw validation_error("figure sweep is missing a cell");
    };

    const bool shape_ok = out.left_rows.size() == 24 && out.right_rows.size() == 8;

    // (a) strict dominance cell by cell, over both grids.
    int cells_total = 0, cells_won = 0;
    double worst_ratio = 0.0;
    std::string worst_cell;
    auto dominance = [&](const std::vector<CellSummary>& rows) {
        for (const auto& c : rows) {
            if (c.scheme != "localize_refine") continue;
            const double mm = mean_of(rows, "minimax", c.d, c.n);
            ++cells_total;
            if (c.mean_loss < mm) ++cells_won;
            const double ratio = c.mean_loss / mm;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst_cell = "d=" + std::to_string(c.d) + ",n=" + std::to_string(c.n);
            }
        }
    };
    dominance(out.left_rows);
    dominance(out.right_rows);
    const bool dominance_ok = cells_won == cells_total;

    // (b) scaling in d at n = 5*10^4.
    const double mm_ratio = mean_of(out.right_rows, "minimax", 800, 50000) / mean_of(out.right_rows, "minimax", 100, 50000);
    const double lr_ratio = mean_of(out.right_rows, "localize_refine", 800, 50000) /
                            mean_of(out.right_rows, "localize_refine", 100, 50000);
    const bool ratio_ok = mm_ratio >= 4.0 && lr_ratio <= 2.0;

    // (c) gap at the largest n of the left grid.
    double best_gap = 0.0;
    for (int d : {100, 500})
        best_gap = std::max(best_gap, mean_of(out.left_rows, "minimax", d, 100000) /
                                          mean_of(out.left_rows, "localize_refine", d, 100000));
    const bool gap_ok = best_gap >= 5.0;

    out.result.index = 7;
    out.result.name = "figure-trends";
    out.result.pass = shape_ok && dominance_ok && ratio_ok && gap_ok;
    out.result.details = "(a) refined wins " + std::to_string(cells_won) + "/" + std::to_string(cells_total) +
                         " cells, worst refined/baseline ratio " + detail::g4(worst_ratio) + " at " + worst_cell +
                         "; (b) baseline d-scaling " + detail::g4(mm_ratio) + " (need >= 4), refined " +
                         detail::g4(lr_ratio) + " (need <= 2); (c) largest-n gap " + detail::g4(best_gap) +
                         "x (need >= 5)";
    return out;
}

// Criterion 8: dimension-free regime at one bit. With the geometric(0.8)
// family the refined l2 error at d=200 and d=800 should agree within 50%.
struct DimensionFreeOutcome {
    CheckResult result;
    long long violations = 0;
    long long cells = 0;
};

inline DimensionFreeOutcome criterion_dimension_free(int threads, std::ostream* progress = nullptr) {
    DimensionFreeOutcome out;
    const int trials = 400;
    double means[2] = {0, 0};
    const int dims[2] = {200, 800};
    for (int k = 0; k < 2; ++k) {
        SchemeConfig cfg;
        cfg.n = 1000000;
        cfg.d = dims[k];
        cfg.b = 1;
        cfg.seed = derive_seed(88001, (std::uint64_t)k);
        CellSummary cell = monte_carlo(Scheme::localize_refine, geometric(0.8, dims[k]), cfg, trials, threads);
        means[k] = cell.mean_loss;
        out.violations += cell.contract_violations;
        ++out.cells;
        detail::progress_line(progress,
                              "d=" + std::to_string(dims[k]) + ": mean l2 " + detail::g4(cell.mean_loss) +
                                  " (stderr " + detail::g4(cell.stderr_value) + ", " + std::to_string(trials) +
                                  " trials)");
    }
    const double rel = std::max(means[0], means[1]) / std::min(means[0], means[1]) - 1.0;
    out.result.index = 8;
    out.result.name = "dimension-free-regime";
    out.result.pass = rel <= 0.5;
    out.result.details = "mean l2 at d=200: " + detail::g4(means[0]) + ", d=800: " + detail::g4(means[1]) +
                         "; relative spread " + detail::g4(100 * rel) + "% (limit 50%)";
    return out;
}

// Fast suite: the second-scale criteria (1-4). A fresh build must pass all.
inline std::vector<CheckResult> run_fast_checks(std::ostream* progress = nullptr) {
    std::vector<CheckResult> out;
    out.push_back(criterion_norm_identities());
    detail::progress_line(progress, "1/4 done");
    out.push_back(criterion_norm_sandwich());
    detail::progress_line(progress, "2/4 done");
    out.push_back(criterion_estimator_oracles(progress));
    detail::progress_line(progress, "3/4 done");
    out.push_back(criterion_protocol_contracts(0, 0, progress));
    detail::progress_line(progress, "4/4 done");
    return out;
}

// Full suite: all eight criteria. Monte Carlo cells run by criteria 5-8
// feed the amortized side of the protocol-contracts criterion.
inline std::vector<CheckResult> run_full_checks(int threads, std::ostream* progress = nullptr,
                                                const std::string& csv_dir = ".") {
    std::vector<CheckResult> out;
    out.push_back(criterion_norm_identities());
    out.push_back(criterion_norm_sandwich());
    out.push_back(criterion_estimator_oracles(progress));

    auto env2 = criterion_l2_envelope(threads, progress);
    auto env1 = criterion_l1_envelope(threads, progress);
    auto fig = criterion_figure_trends(threads, csv_dir, progress);
    auto dim = criterion_dimension_free(threads, progress);

    const long long amortized_violations =
        env2.violations + env1.violations + fig.violations + dim.violations;
    const long long amortized_cells = env2.cells + env1.cells + fig.cells + dim.cells;
    out.push_back(criterion_protocol_contracts(amortized_violations, amortized_cells, progress));
    out.push_back(env2.result);
    out.push_back(env1.result);
    out.push_back(fig.result);
    out.push_back(dim.result);
    std::sort(out.begin(), out.end(), [](const CheckResult& a, const CheckResult& c) { return a.index < c.index; });
    return out;
}

}  // namespace commsim
