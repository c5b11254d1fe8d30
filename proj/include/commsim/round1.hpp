#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "commsim/distribution.hpp"
#include "commsim/errors.hpp"
#include "commsim/metrics.hpp"
#include "commsim/sampling.hpp"

namespace commsim {

using Message = std::uint16_t;

inline int round1_block_width(int b) { return (1 << b) - 1; }

/// Number of contiguous symbol blocks M = ceil(d / (2^b - 1)).
inline int num_round1_groups(int d, int b) {
    return (d + round1_block_width(b) - 1) / round1_block_width(b);
}

/// Uniform-grouping layout: symbols {1..d} split into contiguous blocks of
/// width 2^b - 1 (the last block may be narrower), clients dealt round-robin
/// over the M blocks. Symbols and groups are 0-based internally.
struct Round1Plan {
    int d = 0;
    int b = 0;
    int width = 0;
    int num_groups = 0;
    long long n_clients = 0;

    int group_of_client(long long i) const { return int(i % num_groups); }
    int group_of_symbol(int j0) const { return j0 / width; }
    int block_begin(int m) const { return m * width; }
    int block_end(int m) const {
        const int e = (m + 1) * width;
        return e < d ? e : d;
    }
    int clients_in_group(int m) const {
        return int(n_clients / num_groups + (m < n_clients % num_groups ? 1 : 0));
    }
};

inline Round1Plan build_round1_plan(long long n_clients, int d, int b) {
    if (d < 1) throw config_error("round1: d must be >= 1");
    if (b < 1 || b > 15) throw config_error("round1: b must lie in [1, 15]");
    if (n_clients > 2000000000LL) throw config_error("round1: client count too large");
    Round1Plan plan;
    plan.d = d;
    plan.b = b;
    plan.width = round1_block_width(b);
    plan.num_groups = num_round1_groups(d, b);
    plan.n_clients = n_clients;
    if (n_clients < plan.num_groups)
        throw config_error("round1: fewer clients (" + std::to_string(n_clients) +
                           ") than groups (" + std::to_string(plan.num_groups) + ")");
    return plan;
}

/// Encodes observation x (1-based) for a client in group m: 0 when x falls
/// outside the group's block, otherwise the 1-based rank of x in the block.
/// Rank lies in [1, 2^b - 1], so 0 stays reserved for "not observed" and the
/// message always fits in b bits.
inline Message r1_encode(int x, int m, const Round1Plan& plan) {
    const int j0 = x - 1;
    if (j0 < plan.block_begin(m) || j0 >= plan.block_end(m)) return 0;
    return static_cast<Message>(j0 - plan.block_begin(m) + 1);
}

/// Coarse frequency estimate. p_hat need not sum to 1; per_symbol_count[j]
/// is the number of clients assigned to the group covering symbol j+1.
struct CoarseEstimate {
    std::vector<double> p_hat;
    std::vector<int> per_symbol_count;
};

inline CoarseEstimate r1_estimate(const std::vector<Message>& messages,
                                  const Round1Plan& plan) {
    if (static_cast<long long>(messages.size()) != plan.n_clients)
        throw protocol_error("round1: message count does not match the plan");
    std::vector<int> hits(plan.d, 0);
    for (long long i = 0; i < plan.n_clients; ++i) {
        const Message y = messages[i];
        if (y == 0) continue;
        const int m = plan.group_of_client(i);
        const int block_width = plan.block_end(m) - plan.block_begin(m);
        if (y >= (1u << plan.b) || static_cast<int>(y) > block_width)
            throw protocol_error("round1: client " + std::to_string(i + 1) +
                                 " sent rank " + std::to_string(y) +
                                 " outside its block");
        ++hits[plan.block_begin(m) + y - 1];
    }
    CoarseEstimate est;
    est.p_hat.resize(plan.d);
    est.per_symbol_count.resize(plan.d);
    for (int j = 0; j < plan.d; ++j) {
        const int c = plan.clients_in_group(plan.group_of_symbol(j));
        est.per_symbol_count[j] = c;
        est.p_hat[j] = c > 0 ? static_cast<double>(hits[j]) / c : 0.0;
    }
    return est;
}

/// One full run of the uniform-grouping scheme with all n clients: the
/// baseline comparator. Optionally captures the raw messages.
struct MinimaxRun {
    CoarseEstimate estimate;
    double l1 = 0.0;
    double l2 = 0.0;
};

inline MinimaxRun run_minimax_baseline(const Distribution& p, long long n, int d, int b,
                                       Rng& rng,
                                       std::vector<Message>* messages_out = nullptr) {
    if (n < 1) throw config_error("minimax baseline: n must be >= 1");
    if (p.d() != d) throw config_error("minimax baseline: distribution size != d");
    const Round1Plan plan = build_round1_plan(n, d, b);
    Sampler sampler(p);
    std::vector<Message> messages((std::size_t)n);
    for (long long i = 0; i < n; ++i)
        messages[i] = r1_encode(sampler.draw(rng), plan.group_of_client(i), plan);
    MinimaxRun run;
    run.estimate = r1_estimate(messages, plan);
    run.l1 = l1_loss(run.estimate.p_hat, p.probs);
    run.l2 = l2_loss(run.estimate.p_hat, p.probs);
    if (messages_out) *messages_out = std::move(messages);
    return run;
}

} // namespace commsim
