#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "commsim/errors.hpp"
#include "commsim/round1.hpp"

namespace commsim {

// Refinement-phase weights: pi_hat_j is proportional to p_hat_j^{q/(q+2)},
// so sqrt for q = 2 and cbrt for q = 1.
struct PiWeights {
    std::vector<double> pi_hat;
    double q = 2.0;
};

inline PiWeights pi_map(const CoarseEstimate& coarse, double q) {
    if (!(q >= 1.0 && q <= 2.0)) throw validation_error("loss order q must lie in [1, 2]");
    const double expo = q / (q + 2.0);
    PiWeights w;
    w.q = q;
    w.pi_hat.resize(coarse.p_hat.size());
    long double sum = 0.0L;
    for (std::size_t j = 0; j < coarse.p_hat.size(); ++j) {
        const double v = coarse.p_hat[j] > 0.0 ? std::pow(coarse.p_hat[j], expo) : 0.0;
        w.pi_hat[j] = v;
        sum += v;
    }
    if (sum <= 0.0L) {
        // Degenerate all-silent round 1: fall back to uniform weights.
        std::fill(w.pi_hat.begin(), w.pi_hat.end(), 1.0 / double(w.pi_hat.size()));
        return w;
    }
    for (double& v : w.pi_hat) v = double((long double)v / sum);
    return w;
}

// Per-symbol refinement sample sizes:
//   n_j = max(1, floor((n/2) min(1, (2^b - 1)(pi_hat_j / 4 + 1 / (4d))))).
// The additive 1/(4d) term keeps every symbol covered even when round 1
// missed it entirely.
inline std::vector<int> allocate(const PiWeights& pi, long long n, int d, int b) {
    if (d <= 0 || (int)pi.pi_hat.size() != d) throw validation_error("weight vector does not match alphabet size");
    if (b < 1 || b > 15) throw validation_error("bits per message must lie in [1, 15]");
    const long long half = n / 2;
    const long double cap = (long double)((1 << b) - 1);
    std::vector<int> sizes(d);
    long long total = 0;
    for (int j = 0; j < d; ++j) {
        const long double frac = std::min<long double>(1.0L, cap * (pi.pi_hat[j] / 4.0L + 1.0L / (4.0L * d)));
        long long nj = (long long)std::floor((long double)half * frac);
        if (nj < 1) nj = 1;
        sizes[j] = (int)nj;
        total += nj;
    }
    for (int j = 0; j < d; ++j) {
        if (sizes[j] > half)
            throw config_error("allocation infeasible: a group needs " + std::to_string(sizes[j]) +
                               " clients but only " + std::to_string(half) +
                               " participate in the refinement round; increase n");
    }
    if (total > half * (long long)cap)
        throw config_error("allocation infeasible: groups need " + std::to_string(total) +
                           " memberships but capacity is " + std::to_string(half * (long long)cap) +
                           "; increase n");
    return sizes;
}

// Overlapping refinement groups plus each client's sorted membership list.
struct GroupPlan {
    std::vector<int> group_sizes;
    std::vector<std::vector<int>> groups;       // client ids per group
    std::vector<std::vector<int>> memberships;  // ascending group indices per client position
    int b = 1;

    int max_membership() const {
        std::size_t m = 0;
        for (const auto& J : memberships) m = std::max(m, J.size());
        return (int)m;
    }
    double capacity_used() const {
        long long total = 0;
        for (int s : group_sizes) total += s;
        const long long cap = (long long)memberships.size() * (long long)((1 << b) - 1);
        return cap > 0 ? double(total) / double(cap) : 0.0;
    }
};

// Deterministic greedy realization of the requested group sizes: each client,
// in id order, joins the up-to-(2^b - 1) groups with the largest remaining
// deficit, ties broken toward the smaller group index. Under the capacity
// preconditions this always fills every group exactly.
inline GroupPlan gen_groups(const std::vector<int>& sizes, const std::vector<int>& client_ids, int b) {
    const int d = (int)sizes.size();
    const long long clients = (long long)client_ids.size();
    const int slots = (1 << b) - 1;
    long long total = 0;
    for (int j = 0; j < d; ++j) {
        if (sizes[j] < 1) throw validation_error("group sizes must be positive");
        if (sizes[j] > clients)
            throw config_error("group of size " + std::to_string(sizes[j]) + " exceeds the " +
                               std::to_string(clients) + " available clients");
        total += sizes[j];
    }
    if (total > clients * slots)
        throw config_error("total group size " + std::to_string(total) + " exceeds capacity " +
                           std::to_string(clients * slots));

    GroupPlan plan;
    plan.b = b;
    plan.group_sizes = sizes;
    plan.groups.resize(d);
    for (int j = 0; j < d; ++j) plan.groups[j].reserve(sizes[j]);
    plan.memberships.resize(client_ids.size());

    // Max-heap on (deficit, d - 1 - group index) so equal deficits pop the
    // smaller index first.
    using Entry = std::pair<int, int>;
    std::priority_queue<Entry> heap;
    for (int j = 0; j < d; ++j) heap.push({sizes[j], d - 1 - j});

    std::vector<Entry> picked;
    picked.reserve(slots);
    for (std::size_t i = 0; i < client_ids.size(); ++i) {
        picked.clear();
        while ((int)picked.size() < slots && !heap.empty() && heap.top().first > 0) {
            picked.push_back(heap.top());
            heap.pop();
        }
        auto& J = plan.memberships[i];
        J.reserve(picked.size());
        for (const auto& [deficit, key] : picked) {
            const int j = d - 1 - key;
            plan.groups[j].push_back(client_ids[i]);
            J.push_back(j);
            heap.push({deficit - 1, key});
        }
        std::sort(J.begin(), J.end());
    }
    for (int j = 0; j < d; ++j) {
        if ((int)plan.groups[j].size() != sizes[j])
            throw config_error("group assignment failed to realize the requested sizes");
    }
    return plan;
}

// Rank of observation x (1-based symbol) within the sender's sorted
// membership list of group indices; 0 when x falls outside it.
inline Message r2_encode(int x, const std::vector<int>& membership) {
    const auto it = std::lower_bound(membership.begin(), membership.end(), x - 1);
    if (it == membership.end() || *it != x - 1) return 0;
    return (Message)(1 + (it - membership.begin()));
}

// Refined estimate: p_check_j = (# clients of G_j observing j) / n_j.
inline std::vector<double> r2_estimate(const std::vector<Message>& messages, const GroupPlan& plan) {
    if (messages.size() != plan.memberships.size())
        throw protocol_error("expected " + std::to_string(plan.memberships.size()) + " refinement messages, got " +
                             std::to_string(messages.size()));
    const int d = (int)plan.group_sizes.size();
    std::vector<long long> count(d, 0);
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const Message y = messages[i];
        if (y == 0) continue;
        const auto& J = plan.memberships[i];
        if (y > J.size())
            throw protocol_error("client " + std::to_string(i) + " sent rank " + std::to_string((int)y) +
                                 " but belongs to only " + std::to_string(J.size()) + " groups");
        ++count[J[y - 1]];
    }
    std::vector<double> p_check(d);
    for (int j = 0; j < d; ++j) p_check[j] = double(count[j]) / double(plan.group_sizes[j]);
    return p_check;
}

}  // namespace commsim
