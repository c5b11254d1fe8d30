#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "commsim/families.hpp"
#include "commsim/round2.hpp"
#include "commsim/sampling.hpp"

using namespace commsim;

namespace {

CoarseEstimate coarse_of(std::vector<double> p_hat) {
    CoarseEstimate c;
    c.p_hat = std::move(p_hat);
    c.per_symbol_count.assign(c.p_hat.size(), 1);
    return c;
}

PiWeights weights_of(std::vector<double> pi, double q = 2.0) {
    PiWeights w;
    w.pi_hat = std::move(pi);
    w.q = q;
    return w;
}

std::vector<int> iota_ids(int n) {
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

void check_plan_invariants(const GroupPlan& plan, int clients, int b) {
    const int slots = (1 << b) - 1;
    for (std::size_t j = 0; j < plan.groups.size(); ++j) {
        REQUIRE((int)plan.groups[j].size() == plan.group_sizes[j]);
        auto sorted = plan.groups[j];
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    }
    long long total = 0;
    for (int i = 0; i < clients; ++i) {
        const auto& J = plan.memberships[i];
        REQUIRE((int)J.size() <= slots);
        REQUIRE(std::is_sorted(J.begin(), J.end()));
        REQUIRE(std::adjacent_find(J.begin(), J.end()) == J.end());
        total += (long long)J.size();
        for (int j : J) {
            const auto& g = plan.groups[j];
            REQUIRE(std::find(g.begin(), g.end(), i) != g.end());
        }
    }
    long long size_sum = std::accumulate(plan.group_sizes.begin(), plan.group_sizes.end(), 0LL);
    REQUIRE(total == size_sum);
    REQUIRE(size_sum <= (long long)clients * slots);
}

}  // namespace

TEST_CASE("pi map takes root-law weights", "[round2]") {
    SECTION("uniform input stays uniform") {
        auto w = pi_map(coarse_of({0.25, 0.25, 0.25, 0.25}), 2.0);
        for (double v : w.pi_hat) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(0.25, 1e-15));
    }
    SECTION("square-root law at q=2") {
        auto w = pi_map(coarse_of({0.81, 0.09, 0.09, 0.01}), 2.0);
        REQUIRE_THAT(w.pi_hat[0], Catch::Matchers::WithinAbs(0.9 / 1.6, 1e-14));
        REQUIRE_THAT(w.pi_hat[1], Catch::Matchers::WithinAbs(0.3 / 1.6, 1e-14));
        REQUIRE_THAT(w.pi_hat[2], Catch::Matchers::WithinAbs(0.3 / 1.6, 1e-14));
        REQUIRE_THAT(w.pi_hat[3], Catch::Matchers::WithinAbs(0.1 / 1.6, 1e-14));
    }
    SECTION("cube-root law at q=1 keeps zeros at zero") {
        auto w = pi_map(coarse_of({0.125, 0.125, 0, 0, 0, 0}), 1.0);
        REQUIRE_THAT(w.pi_hat[0], Catch::Matchers::WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(w.pi_hat[1], Catch::Matchers::WithinAbs(0.5, 1e-14));
        for (int j = 2; j < 6; ++j) REQUIRE(w.pi_hat[j] == 0.0);
    }
    SECTION("all-silent round 1 falls back to uniform") {
        auto w = pi_map(coarse_of({0, 0, 0, 0, 0}), 1.5);
        for (double v : w.pi_hat) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(0.2, 1e-15));
    }
    SECTION("weights sum to one for random inputs") {
        Rng rng = make_rng(41, 0);
        for (int t = 0; t < 200; ++t) {
            const int d = 2 + int(rng() % 40);
            auto p = random_full_support(d, rng);
            for (double q : {1.0, 1.37, 2.0}) {
                auto w = pi_map(coarse_of(p.probs), q);
                long double s = 0;
                for (double v : w.pi_hat) {
                    REQUIRE(v >= 0.0);
                    s += v;
                }
                REQUIRE_THAT((double)s, Catch::Matchers::WithinAbs(1.0, 1e-12));
            }
        }
    }
    SECTION("loss order outside [1,2] rejected") {
        REQUIRE_THROWS_AS(pi_map(coarse_of({1.0}), 0.9), validation_error);
        REQUIRE_THROWS_AS(pi_map(coarse_of({1.0}), 2.1), validation_error);
    }
}

TEST_CASE("allocation follows the damped proportional rule", "[round2]") {
    SECTION("direct plug-in value") {
        std::vector<double> pi(10, 0.5 / 9);
        pi[0] = 0.5;
        auto sizes = allocate(weights_of(pi), 1000, 10, 2);
        REQUIRE(sizes[0] == 225);
    }
    SECTION("zero weight still gets the coverage floor") {
        std::vector<double> pi(10, 0.0);
        pi[0] = 0.5;
        pi[1] = 0.5;
        auto sizes = allocate(weights_of(pi), 1000, 10, 2);
        REQUIRE(sizes[2] == 37);
        REQUIRE(sizes[9] == 37);
    }
    SECTION("large weight is capped at the round-2 cohort") {
        std::vector<double> pi(10, 0.1 / 9);
        pi[0] = 0.9;
        auto sizes = allocate(weights_of(pi), 1000, 10, 3);
        REQUIRE(sizes[0] == 500);
    }
    SECTION("infeasible tiny n is rejected") {
        std::vector<double> pi(10, 0.1);
        REQUIRE_THROWS_AS(allocate(weights_of(pi), 4, 10, 1), config_error);
        REQUIRE_THROWS_AS(allocate(weights_of({1.0}), 1, 1, 1), config_error);
    }
    SECTION("monotone in the weights") {
        Rng rng = make_rng(42, 0);
        for (int t = 0; t < 100; ++t) {
            const int d = 2 + int(rng() % 30);
            auto p = random_full_support(d, rng);
            auto sizes = allocate(pi_map(coarse_of(p.probs), 2.0), 20000, d, 1 + int(rng() % 3));
            auto w = pi_map(coarse_of(p.probs), 2.0);
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    if (w.pi_hat[j] >= w.pi_hat[k]) REQUIRE(sizes[j] >= sizes[k]);
        }
    }
    SECTION("every symbol keeps a Theta(n/d) floor") {
        Rng rng = make_rng(43, 0);
        for (int t = 0; t < 100; ++t) {
            const int b = 1 + int(rng() % 3);
            const int mind = ((1 << b) - 1 + 3) / 4;  // keep 2^b - 1 <= 4d
            const int d = mind + int(rng() % 30);
            const long long n = 4000 + (long long)(rng() % 20000);
            auto p = random_full_support(d, rng);
            auto sizes = allocate(pi_map(coarse_of(p.probs), 1.0), n, d, b);
            const long long floor_j =
                std::max<long long>(1, (long long)(((n / 2) * (long long)((1 << b) - 1)) / (4 * d)));
            for (int j = 0; j < d; ++j) REQUIRE(sizes[j] >= floor_j);
        }
    }
}

TEST_CASE("group generation realizes requested sizes", "[round2]") {
    SECTION("two clients sharing two groups") {
        auto plan = gen_groups({2, 2}, iota_ids(2), 2);
        REQUIRE(plan.groups[0] == std::vector<int>{0, 1});
        REQUIRE(plan.groups[1] == std::vector<int>{0, 1});
        REQUIRE(plan.memberships[0] == std::vector<int>{0, 1});
        REQUIRE(plan.memberships[1] == std::vector<int>{0, 1});
    }
    SECTION("single client carries both groups") {
        auto plan = gen_groups({1, 1}, iota_ids(1), 2);
        REQUIRE(plan.groups[0] == std::vector<int>{0});
        REQUIRE(plan.groups[1] == std::vector<int>{0});
        REQUIRE(plan.memberships[0].size() == 2);
    }
    SECTION("exact capacity forces full membership lists") {
        Rng rng = make_rng(44, 0);
        for (int t = 0; t < 50; ++t) {
            const int b = 1 + int(rng() % 3);
            const int slots = (1 << b) - 1;
            const int clients = 2 + int(rng() % 20);
            // Realizable exact-capacity instances need slots <= d <= clients*slots.
            const int dmax = (int)std::min<long long>(30, (long long)clients * slots);
            const int d = slots + int(rng() % (dmax - slots + 1));
            std::vector<int> sizes(d, 1);
            long long deficit = (long long)clients * slots - d;
            REQUIRE(deficit >= 0);
            while (deficit > 0) {
                const int j = int(rng() % d);
                if (sizes[j] < clients) {
                    ++sizes[j];
                    --deficit;
                }
            }
            auto plan = gen_groups(sizes, iota_ids(clients), b);
            for (const auto& J : plan.memberships) REQUIRE((int)J.size() == slots);
            check_plan_invariants(plan, clients, b);
        }
    }
    SECTION("random feasible instances satisfy every invariant") {
        Rng rng = make_rng(45, 0);
        for (int t = 0; t < 1000; ++t) {
            const int b = 1 + int(rng() % 4);
            const int slots = (1 << b) - 1;
            const int clients = 1 + int(rng() % 50);
            const long long cap = (long long)clients * slots;
            const int d = 1 + int(rng() % (int)std::min<long long>(30, cap));
            std::vector<int> sizes(d);
            long long total = 0;
            for (int j = 0; j < d; ++j) {
                sizes[j] = 1 + int(rng() % clients);
                total += sizes[j];
            }
            while (total > cap) {
                const int j = int(rng() % d);
                if (sizes[j] > 1) {
                    --sizes[j];
                    --total;
                }
            }
            auto plan = gen_groups(sizes, iota_ids(clients), b);
            check_plan_invariants(plan, clients, b);
        }
    }
    SECTION("deterministic across repeated calls") {
        auto a = gen_groups({3, 1, 4, 1, 5}, iota_ids(7), 2);
        auto c = gen_groups({3, 1, 4, 1, 5}, iota_ids(7), 2);
        REQUIRE(a.groups == c.groups);
        REQUIRE(a.memberships == c.memberships);
    }
    SECTION("infeasible requests rejected with the violated bound") {
        REQUIRE_THROWS_AS(gen_groups({3}, iota_ids(2), 2), config_error);
        REQUIRE_THROWS_AS(gen_groups({2, 2, 2}, iota_ids(2), 1), config_error);
        REQUIRE_THROWS_AS(gen_groups({0, 2}, iota_ids(2), 2), validation_error);
    }
}

TEST_CASE("round-2 rank encoding", "[round2]") {
    // Membership over symbols {2, 5, 9}, stored as zero-based group indices.
    const std::vector<int> J = {1, 4, 8};
    REQUIRE(r2_encode(5, J) == 2);
    REQUIRE(r2_encode(2, J) == 1);
    REQUIRE(r2_encode(9, J) == 3);
    REQUIRE(r2_encode(7, J) == 0);
    REQUIRE(r2_encode(1, {}) == 0);
    SECTION("messages fit the bit budget for any feasible membership") {
        Rng rng = make_rng(46, 0);
        for (int t = 0; t < 200; ++t) {
            const int b = 1 + int(rng() % 4);
            const int d = 1 + int(rng() % 20);
            std::vector<int> sub;
            for (int j = 0; j < d && (int)sub.size() < (1 << b) - 1; ++j)
                if (rng() % 2) sub.push_back(j);
            for (int x = 1; x <= d; ++x) REQUIRE(r2_encode(x, sub) < (1 << b));
        }
    }
}

TEST_CASE("refined estimator counts per-group hits", "[round2]") {
    auto plan = gen_groups({2, 4}, iota_ids(4), 2);
    // Group 0 holds the two largest-deficit picks' first two clients; find
    // its members and have both observe symbol 1, one member of group 1
    // observe symbol 2.
    std::vector<Message> msgs(4, 0);
    for (int i = 0; i < 4; ++i) {
        const auto& J = plan.memberships[i];
        if (std::find(J.begin(), J.end(), 0) != J.end()) msgs[i] = r2_encode(1, J);
    }
    int one_reporter = plan.groups[1][0];
    msgs[one_reporter] = r2_encode(2, plan.memberships[one_reporter]);
    auto est = r2_estimate(msgs, plan);
    REQUIRE(est[0] == 0.5);   // one of group 0's two members was reassigned to report symbol 2
    REQUIRE(est[1] == 0.25);  // a single hit in the size-4 group
    SECTION("full agreement yields probability one") {
        std::vector<Message> all(4);
        for (int i = 0; i < 4; ++i) all[i] = r2_encode(2, plan.memberships[i]);
        auto e2 = r2_estimate(all, plan);
        REQUIRE(e2[1] == 1.0);
    }
    SECTION("silence yields the zero vector") {
        auto e3 = r2_estimate(std::vector<Message>(4, 0), plan);
        REQUIRE(e3 == std::vector<double>{0.0, 0.0});
    }
    SECTION("protocol violations rejected") {
        REQUIRE_THROWS_AS(r2_estimate(std::vector<Message>(3, 0), plan), protocol_error);
        std::vector<Message> bad(4, 0);
        bad[0] = 3;  // no client belongs to three groups here
        REQUIRE_THROWS_AS(r2_estimate(bad, plan), protocol_error);
    }
}

TEST_CASE("refined estimator is conditionally unbiased", "[round2]") {
    const int d = 8, b = 2, clients = 512, trials = 10000;
    const auto p = geometric(0.7, d);
    // Freeze one plan from a plausible coarse estimate, then resample.
    auto sizes = allocate(pi_map(coarse_of(p.probs), 2.0), 2 * clients, d, b);
    auto plan = gen_groups(sizes, iota_ids(clients), b);
    Sampler sampler(p);
    std::vector<double> mean(d, 0.0);
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_rng(4242, t);
        std::vector<Message> msgs(clients);
        for (int i = 0; i < clients; ++i) msgs[i] = r2_encode(sampler.draw(rng), plan.memberships[i]);
        auto est = r2_estimate(msgs, plan);
        for (int j = 0; j < d; ++j) mean[j] += est[j];
    }
    for (int j = 0; j < d; ++j) {
        mean[j] /= trials;
        const double se = std::sqrt(p.probs[j] * (1 - p.probs[j]) / (double(sizes[j]) * trials));
        REQUIRE(std::fabs(mean[j] - p.probs[j]) < 3.0 * se);
    }
}
