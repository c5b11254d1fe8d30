#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "commsim/errors.hpp"

namespace commsim {

/// Probability vector over the alphabet {1..d}. probs[j-1] is the mass of
/// symbol j. Immutable by convention once built; construct via
/// make_distribution so the invariants (entries >= 0, sum = 1 within 1e-12)
/// always hold.
struct Distribution {
    std::vector<double> probs;

    int d() const { return static_cast<int>(probs.size()); }
};

constexpr double kSumTolerance = 1e-12;

/// Normalizes nonnegative weights into a Distribution.
/// Rejects empty, all-zero, negative, or non-finite input.
inline Distribution make_distribution(const std::vector<double>& weights) {
    if (weights.empty())
        throw validation_error("make_distribution: empty weight vector");
    long double sum = 0.0L;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double w = weights[i];
        if (!std::isfinite(w))
            throw validation_error("make_distribution: non-finite weight at index " +
                                   std::to_string(i + 1));
        if (w < 0.0)
            throw validation_error("make_distribution: negative weight at index " +
                                   std::to_string(i + 1));
        sum += w;
    }
    if (sum <= 0.0L)
        throw validation_error("make_distribution: all weights are zero");

    Distribution p;
    p.probs.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        p.probs[i] = static_cast<double>(static_cast<long double>(weights[i]) / sum);
    return p;
}

/// Checks the Distribution invariants; used by tests and by the self-checks.
inline bool distribution_valid(const Distribution& p) {
    if (p.probs.empty()) return false;
    long double sum = 0.0L;
    for (double v : p.probs) {
        if (!(v >= 0.0) || !std::isfinite(v)) return false;
        sum += v;
    }
    return std::fabs(static_cast<double>(sum - 1.0L)) <= kSumTolerance;
}

/// Probabilities sorted non-increasingly plus the permutation that produced
/// them: sorted_probs[i] = probs[perm[i]]. perm is 0-based into probs.
struct SortedView {
    std::vector<double> sorted_probs;
    std::vector<int> perm;
};

inline SortedView sorted_view(const Distribution& p) {
    SortedView v;
    const int d = p.d();
    v.perm.resize(d);
    std::iota(v.perm.begin(), v.perm.end(), 0);
    std::stable_sort(v.perm.begin(), v.perm.end(),
                     [&](int a, int b) { return p.probs[a] > p.probs[b]; });
    v.sorted_probs.resize(d);
    for (int i = 0; i < d; ++i) v.sorted_probs[i] = p.probs[v.perm[i]];
    return v;
}

/// Generalized q-norm (sum_i p_i^q)^(1/q) for q in (0, 1]. 0^q evaluates
/// to 0 so sparse vectors are fine. For q < 1 this is >= 1 and reaches d
/// at q = 1/2 for the uniform distribution.
inline double norm_q(const Distribution& p, double q) {
    if (!(q > 0.0) || q > 1.0)
        throw std::domain_error("norm_q: q must lie in (0, 1]");
    long double acc = 0.0L;
    for (double v : p.probs) {
        if (v > 0.0) acc += std::pow(static_cast<long double>(v), static_cast<long double>(q));
    }
    return static_cast<double>(std::pow(acc, 1.0L / static_cast<long double>(q)));
}

/// Order-1/2 Renyi entropy, natural log: log ||p||_{1/2}.
inline double renyi_entropy_half(const Distribution& p) {
    return std::log(norm_q(p, 0.5));
}

/// Local-complexity summary of a distribution. h_star maximizes h^2 p_(h)
/// over the sorted probabilities (1-based h, smallest h wins ties);
/// h_star_value is sandwiched between fractional norms.
struct ComplexityProfile {
    double q_norm_half = 0.0;
    double q_norm_third = 0.0;
    double renyi_half = 0.0;
    int h_star = 0;
    double h_star_value = 0.0;
};

inline ComplexityProfile complexity_profile(const Distribution& p) {
    ComplexityProfile c;
    c.q_norm_half = norm_q(p, 0.5);
    c.q_norm_third = norm_q(p, 1.0 / 3.0);
    c.renyi_half = std::log(c.q_norm_half);
    const SortedView v = sorted_view(p);
    c.h_star = 1;
    c.h_star_value = v.sorted_probs[0];
    for (int h = 2; h <= p.d(); ++h) {
        const double val = static_cast<double>(h) * static_cast<double>(h) * v.sorted_probs[h - 1];
        if (val > c.h_star_value) {
            c.h_star_value = val;
            c.h_star = h;
        }
    }
    return c;
}

} // namespace commsim
