#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "commsim/distribution.hpp"
#include "commsim/errors.hpp"
#include "commsim/metrics.hpp"
#include "commsim/rng.hpp"
#include "commsim/round1.hpp"
#include "commsim/round2.hpp"
#include "commsim/sampling.hpp"

namespace commsim {

enum class Scheme { minimax, localize_refine };

inline std::string scheme_name(Scheme s) {
    return s == Scheme::minimax ? "minimax" : "localize_refine";
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "minimax") return Scheme::minimax;
    if (name == "localize_refine" || name == "lr") return Scheme::localize_refine;
    throw validation_error("unknown scheme '" + name + "' (expected minimax or localize_refine)");
}

struct SchemeConfig {
    long long n = 0;
    int d = 0;
    int b = 1;
    double q = 2.0;
    std::uint64_t seed = 0;
    bool renormalize = false;
};

inline void validate_config(const SchemeConfig& cfg) {
    if (cfg.d < 1) throw validation_error("alphabet size must be positive");
    if (cfg.b < 1 || cfg.b > 15) throw validation_error("bits per message must lie in [1, 15]");
    if (!(cfg.q >= 1.0 && cfg.q <= 2.0)) throw validation_error("loss order q must lie in [1, 2]");
    const int groups = num_round1_groups(cfg.d, cfg.b);
    if (cfg.n < 2LL * groups)
        throw config_error("n = " + std::to_string(cfg.n) + " is below the minimum 2M = " +
                           std::to_string(2LL * groups) + " for d = " + std::to_string(cfg.d) +
                           ", b = " + std::to_string(cfg.b));
}

// Full message record of one run. Round-2 encoders are a function of the
// round-1 messages alone; verify_transcript re-derives them to check it.
struct Transcript {
    Scheme scheme = Scheme::localize_refine;
    std::vector<Message> round1_messages;
    std::vector<int> round1_groups;
    std::vector<Message> round2_messages;
    std::vector<std::vector<int>> memberships;
    int bits_per_message = 1;
};

struct TranscriptStats {
    long long message_count = 0;
    long long total_bits = 0;
    int max_message = 0;
};

struct EstimationResult {
    Scheme scheme = Scheme::localize_refine;
    SchemeConfig config;
    std::vector<double> p_check;
    std::vector<double> p_hat;
    double l1 = 0, l2 = 0, lq = 0;
    TranscriptStats stats;
};

// Everything the server computes between the rounds, from round-1 messages
// alone.
struct RefinementDerivation {
    CoarseEstimate coarse;
    PiWeights pi;
    std::vector<int> group_sizes;
    GroupPlan plan;
};

inline RefinementDerivation derive_refinement_plan(const std::vector<Message>& round1_messages,
                                                   const SchemeConfig& cfg) {
    const long long n1 = cfg.n - cfg.n / 2;
    const Round1Plan plan1 = build_round1_plan(n1, cfg.d, cfg.b);
    RefinementDerivation out;
    out.coarse = r1_estimate(round1_messages, plan1);
    out.pi = pi_map(out.coarse, cfg.q);
    out.group_sizes = allocate(out.pi, cfg.n, cfg.d, cfg.b);
    std::vector<int> ids(cfg.n / 2);
    std::iota(ids.begin(), ids.end(), (int)n1);
    out.plan = gen_groups(out.group_sizes, ids, cfg.b);
    return out;
}

namespace detail {

inline void fill_losses(EstimationResult& r, const std::vector<double>& raw, const Distribution& p, double q) {
    r.l1 = l1_loss(raw, p.probs);
    r.l2 = l2_loss(raw, p.probs);
    r.lq = lq_loss(raw, p.probs, q);
}

inline std::vector<double> renormalized(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    if (s <= 0.0L) return v;
    std::vector<double> out(v);
    for (double& x : out) x = double((long double)x / s);
    return out;
}

}  // namespace detail

inline EstimationResult run_localize_refine(const Distribution& p, const SchemeConfig& cfg, Rng& rng,
                                            Transcript* transcript = nullptr) {
    validate_config(cfg);
    if (p.d() != cfg.d) throw validation_error("distribution dimension does not match the configuration");
    const long long n1 = cfg.n - cfg.n / 2;
    const long long n2 = cfg.n / 2;
    const Round1Plan plan1 = build_round1_plan(n1, cfg.d, cfg.b);
    Sampler sampler(p);

    std::vector<Message> msgs1((std::size_t)n1);
    for (long long i = 0; i < n1; ++i)
        msgs1[i] = r1_encode(sampler.draw(rng), plan1.group_of_client(i), plan1);

    RefinementDerivation der = derive_refinement_plan(msgs1, cfg);

    std::vector<Message> msgs2((std::size_t)n2);
    for (long long k = 0; k < n2; ++k)
        msgs2[k] = r2_encode(sampler.draw(rng), der.plan.memberships[k]);

    EstimationResult out;
    out.scheme = Scheme::localize_refine;
    out.config = cfg;
    out.p_hat = der.coarse.p_hat;
    std::vector<double> raw = r2_estimate(msgs2, der.plan);
    detail::fill_losses(out, raw, p, cfg.q);
    out.p_check = cfg.renormalize ? detail::renormalized(raw) : std::move(raw);
    out.stats.message_count = cfg.n;
    out.stats.total_bits = cfg.n * (long long)cfg.b;
    int mx = 0;
    for (Message m : msgs1) mx = std::max(mx, (int)m);
    for (Message m : msgs2) mx = std::max(mx, (int)m);
    out.stats.max_message = mx;

    if (transcript) {
        transcript->scheme = Scheme::localize_refine;
        transcript->round1_messages = std::move(msgs1);
        transcript->round1_groups.resize((std::size_t)n1);
        for (long long i = 0; i < n1; ++i) transcript->round1_groups[i] = plan1.group_of_client(i);
        transcript->round2_messages = std::move(msgs2);
        transcript->memberships = der.plan.memberships;
        transcript->bits_per_message = cfg.b;
    }
    return out;
}

inline EstimationResult run_minimax_scheme(const Distribution& p, const SchemeConfig& cfg, Rng& rng,
                                           Transcript* transcript = nullptr) {
    validate_config(cfg);
    if (p.d() != cfg.d) throw validation_error("distribution dimension does not match the configuration");
    std::vector<Message> msgs;
    MinimaxRun run = run_minimax_baseline(p, cfg.n, cfg.d, cfg.b, rng, &msgs);
    EstimationResult out;
    out.scheme = Scheme::minimax;
    out.config = cfg;
    out.p_hat = run.estimate.p_hat;
    detail::fill_losses(out, run.estimate.p_hat, p, cfg.q);
    out.p_check = cfg.renormalize ? detail::renormalized(run.estimate.p_hat) : run.estimate.p_hat;
    out.stats.message_count = cfg.n;
    out.stats.total_bits = cfg.n * (long long)cfg.b;
    int mx = 0;
    for (Message m : msgs) mx = std::max(mx, (int)m);
    out.stats.max_message = mx;
    if (transcript) {
        const Round1Plan plan = build_round1_plan(cfg.n, cfg.d, cfg.b);
        transcript->scheme = Scheme::minimax;
        transcript->round1_groups.resize(msgs.size());
        for (std::size_t i = 0; i < msgs.size(); ++i) transcript->round1_groups[i] = plan.group_of_client((long long)i);
        transcript->round1_messages = std::move(msgs);
        transcript->round2_messages.clear();
        transcript->memberships.clear();
        transcript->bits_per_message = cfg.b;
    }
    return out;
}

inline EstimationResult run_scheme(Scheme scheme, const Distribution& p, const SchemeConfig& cfg, Rng& rng,
                                   Transcript* transcript = nullptr) {
    return scheme == Scheme::minimax ? run_minimax_scheme(p, cfg, rng, transcript)
                                     : run_localize_refine(p, cfg, rng, transcript);
}

// Contract checker: bit budget, message counts, and (for localize_refine)
// that the refinement plan is exactly what the round-1 messages dictate.
inline std::vector<std::string> verify_transcript(const Transcript& t, const SchemeConfig& cfg) {
    std::vector<std::string> violations;
    const int limit = 1 << t.bits_per_message;
    if (t.bits_per_message != cfg.b)
        violations.push_back("bit width " + std::to_string(t.bits_per_message) +
                             " differs from configured b = " + std::to_string(cfg.b));
    const long long n1_expected = t.scheme == Scheme::minimax ? cfg.n : cfg.n - cfg.n / 2;
    const long long n2_expected = t.scheme == Scheme::minimax ? 0 : cfg.n / 2;
    if (cfg.n < 1)
        violations.push_back("message count mismatch: configuration has no clients");
    else if ((long long)t.round1_messages.size() != n1_expected || (long long)t.round2_messages.size() != n2_expected)
        violations.push_back("message count mismatch: transcript holds " +
                             std::to_string(t.round1_messages.size()) + " + " +
                             std::to_string(t.round2_messages.size()) + " messages, expected " +
                             std::to_string(n1_expected) + " + " + std::to_string(n2_expected));
    for (std::size_t i = 0; i < t.round1_messages.size(); ++i)
        if (t.round1_messages[i] >= limit)
            violations.push_back("client " + std::to_string(i) + " sent localization message " +
                                 std::to_string((int)t.round1_messages[i]) + " outside [0, 2^b)");
    for (std::size_t i = 0; i < t.round2_messages.size(); ++i)
        if (t.round2_messages[i] >= limit)
            violations.push_back("client " + std::to_string(t.round1_messages.size() + i) +
                                 " sent refinement message " + std::to_string((int)t.round2_messages[i]) +
                                 " outside [0, 2^b)");
    for (std::size_t i = 0; i < t.memberships.size(); ++i)
        if ((int)t.memberships[i].size() > limit - 1)
            violations.push_back("client " + std::to_string(t.round1_messages.size() + i) + " belongs to " +
                                 std::to_string(t.memberships[i].size()) + " groups, above 2^b - 1");
    if (t.scheme == Scheme::localize_refine && violations.empty()) {
        try {
            RefinementDerivation der = derive_refinement_plan(t.round1_messages, cfg);
            if (der.plan.memberships != t.memberships)
                violations.push_back("refinement plan does not derive from the localization messages");
        } catch (const std::exception& e) {
            violations.push_back(std::string("refinement plan underivable: ") + e.what());
        }
    }
    return violations;
}

}  // namespace commsim
