#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "commsim/families.hpp"
#include "commsim/round1.hpp"

using namespace commsim;

TEST_CASE("round-1 plan layout", "[round1]") {
    SECTION("d=6 b=2 gives two width-3 blocks") {
        auto plan = build_round1_plan(10, 6, 2);
        REQUIRE(plan.num_groups == 2);
        REQUIRE(plan.block_begin(0) == 0);
        REQUIRE(plan.block_end(0) == 3);
        REQUIRE(plan.block_begin(1) == 3);
        REQUIRE(plan.block_end(1) == 6);
    }
    SECTION("d=5 b=2 has a ragged last block") {
        auto plan = build_round1_plan(10, 5, 2);
        REQUIRE(plan.num_groups == 2);
        REQUIRE(plan.block_end(1) - plan.block_begin(1) == 2);
    }
    SECTION("d=3 b=2 collapses to one group") {
        auto plan = build_round1_plan(4, 3, 2);
        REQUIRE(plan.num_groups == 1);
        for (int i = 0; i < 4; ++i) REQUIRE(plan.group_of_client(i) == 0);
    }
    SECTION("round-robin counts differ by at most one") {
        auto plan = build_round1_plan(11, 9, 2);
        REQUIRE(plan.num_groups == 3);
        REQUIRE(plan.clients_in_group(0) == 4);
        REQUIRE(plan.clients_in_group(1) == 4);
        REQUIRE(plan.clients_in_group(2) == 3);
    }
    SECTION("wide b degenerates to a single group") {
        auto plan = build_round1_plan(3, 5, 4);
        REQUIRE(plan.num_groups == 1);
    }
    SECTION("too few clients rejected") {
        REQUIRE_THROWS_AS(build_round1_plan(1, 6, 2), config_error);
        REQUIRE_THROWS_AS(build_round1_plan(0, 1, 1), config_error);
    }
}

TEST_CASE("round-1 rank encoding", "[round1]") {
    auto plan = build_round1_plan(10, 6, 2);
    SECTION("in-block symbols map to their rank") {
        REQUIRE(r1_encode(5, 1, plan) == 2);
        REQUIRE(r1_encode(3, 0, plan) == 3);
        REQUIRE(r1_encode(4, 1, plan) == 1);
    }
    SECTION("out-of-block symbols map to the silent message") {
        REQUIRE(r1_encode(1, 1, plan) == 0);
        REQUIRE(r1_encode(6, 0, plan) == 0);
    }
    SECTION("every message fits the bit budget") {
        for (int x = 1; x <= 6; ++x)
            for (int m = 0; m < 2; ++m) REQUIRE(r1_encode(x, m, plan) < (1 << 2));
    }
}

TEST_CASE("round-1 estimator counts ranks per group", "[round1]") {
    SECTION("direct count example") {
        auto plan = build_round1_plan(4, 3, 2);
        std::vector<Message> msgs;
        for (int x : {1, 1, 2, 3}) msgs.push_back(r1_encode(x, 0, plan));
        auto est = r1_estimate(msgs, plan);
        REQUIRE(est.p_hat == std::vector<double>{0.5, 0.25, 0.25});
        REQUIRE(est.per_symbol_count == std::vector<int>{4, 4, 4});
    }
    SECTION("all silent gives the zero vector") {
        auto plan = build_round1_plan(6, 6, 2);
        auto est = r1_estimate(std::vector<Message>(6, 0), plan);
        for (double v : est.p_hat) REQUIRE(v == 0.0);
    }
    SECTION("malformed messages rejected") {
        auto plan = build_round1_plan(4, 5, 2);
        REQUIRE_THROWS_AS(r1_estimate(std::vector<Message>(3, 0), plan), protocol_error);
        // Group 1 covers {4, 5}: rank 3 exceeds its ragged width.
        std::vector<Message> bad(4, 0);
        bad[1] = 3;
        REQUIRE_THROWS_AS(r1_estimate(bad, plan), protocol_error);
    }
}

TEST_CASE("minimax baseline is unbiased with binomial variance", "[round1]") {
    const auto p = geometric(0.7, 8);
    const int n = 1024, trials = 4000;
    Round1Plan plan = build_round1_plan(n, 8, 2);
    std::vector<double> mean(8, 0.0), m2(8, 0.0);
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_rng(505, t);
        auto run = run_minimax_baseline(p, n, 8, 2, rng);
        for (int j = 0; j < 8; ++j) {
            const double v = run.estimate.p_hat[j];
            mean[j] += v;
            m2[j] += v * v;
        }
    }
    for (int j = 0; j < 8; ++j) {
        mean[j] /= trials;
        const double var = (m2[j] - trials * mean[j] * mean[j]) / (trials - 1);
        const int c = plan.clients_in_group(plan.group_of_symbol(j));
        const double oracle_var = p.probs[j] * (1 - p.probs[j]) / c;
        const double se = std::sqrt(oracle_var / trials);
        REQUIRE(std::fabs(mean[j] - p.probs[j]) < 3.5 * se);
        REQUIRE(std::fabs(var - oracle_var) / oracle_var < 0.10);
    }
}

TEST_CASE("point-mass baseline error stays below d/n", "[round1]") {
    const auto p = make_distribution({0, 0, 1, 0, 0, 0});
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        Rng rng = make_rng(66, t);
        worst = std::max(worst, run_minimax_baseline(p, 3000, 6, 2, rng).l2);
    }
    REQUIRE(worst <= 6.0 / 3000);
}

TEST_CASE("round-1 concentration of root-probability estimates", "[round1]") {
    // Concentration radius 3 d log(nd) / (n 2^b) bounds |sqrt(p_hat) - sqrt(p)|^2
    // outside a vanishing-probability event; at these sizes no trial in a
    // few hundred should violate it, for square or cube roots.
    const int n = 100000, d = 10, b = 2, trials = 400;
    const auto p = geometric(0.6, d);
    const double eps = 3.0 * d * std::log(double(n) * d) / (double(n) * (1 << b));
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_rng(909, t);
        auto run = run_minimax_baseline(p, n, d, b, rng);
        bool bad = false;
        for (int j = 0; j < d; ++j) {
            const double dr2 = std::sqrt(run.estimate.p_hat[j]) - std::sqrt(p.probs[j]);
            const double dr3 = std::cbrt(run.estimate.p_hat[j]) - std::cbrt(p.probs[j]);
            if (dr2 * dr2 > eps || dr3 * dr3 > eps) bad = true;
        }
        violations += bad;
    }
    REQUIRE(violations == 0);
}
