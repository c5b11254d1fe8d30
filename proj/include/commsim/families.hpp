#pragma once

#include <cmath>
#include <vector>

#include "commsim/distribution.hpp"
#include "commsim/rng.hpp"

namespace commsim {

inline Distribution uniform(int d) {
    if (d < 1) throw std::domain_error("uniform: d must be >= 1");
    return make_distribution(std::vector<double>(d, 1.0));
}

/// Truncated geometric: mass at k in {1..d} proportional to beta^k.
/// beta = 1 is the uniform limit, handled explicitly because the closed
/// form degenerates to 0/0 there.
inline Distribution geometric(double beta, int d) {
    if (!(beta > 0.0) || beta > 1.0)
        throw std::domain_error("geometric: beta must lie in (0, 1]");
    if (d < 1) throw std::domain_error("geometric: d must be >= 1");
    if (beta == 1.0) return uniform(d);
    std::vector<double> w(d);
    long double cur = beta;
    for (int k = 0; k < d; ++k) {
        w[k] = static_cast<double>(cur);
        cur *= beta;
    }
    return make_distribution(w);
}

/// Closed-form half-norm of the truncated geometric family; the numeric
/// norm_q value must match this to high accuracy (identity test target).
inline double geometric_half_norm(double beta, int d) {
    if (!(beta > 0.0) || beta > 1.0)
        throw std::domain_error("geometric_half_norm: beta must lie in (0, 1]");
    if (beta == 1.0) return static_cast<double>(d);
    const long double r = std::sqrt(static_cast<long double>(beta));
    const long double rd = std::pow(r, static_cast<long double>(d));
    return static_cast<double>((1.0L + r) * (1.0L - rd) / ((1.0L - r) * (1.0L + rd)));
}

/// Zipf with exponent lambda: mass at k proportional to k^(-lambda).
inline Distribution zipf(double lambda, int d) {
    if (!(lambda > 0.0)) throw std::domain_error("zipf: lambda must be > 0");
    if (d < 1) throw std::domain_error("zipf: d must be >= 1");
    std::vector<double> w(d);
    for (int k = 1; k <= d; ++k)
        w[k - 1] = static_cast<double>(std::pow(static_cast<long double>(k),
                                                -static_cast<long double>(lambda)));
    return make_distribution(w);
}

/// s-sparse random distribution: support chosen uniformly, masses i.i.d.
/// standard exponentials normalized. Exactly s entries are nonzero.
inline Distribution sparse_random(int s, int d, Rng& rng) {
    if (s < 1 || s > d) throw std::domain_error("sparse_random: need 1 <= s <= d");
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    for (int i = 0; i < s; ++i) {
        // Fisher-Yates prefix; uses the raw engine so draws stay portable.
        const std::uint64_t r = rng() % static_cast<std::uint64_t>(d - i);
        std::swap(idx[i], idx[i + static_cast<int>(r)]);
    }
    std::vector<double> w(d, 0.0);
    for (int i = 0; i < s; ++i)
        w[idx[i]] = -std::log(uniform01_open(rng));
    return make_distribution(w);
}

/// Flat-Dirichlet random distribution (normalized i.i.d. exponentials);
/// the generator behind the property-test corpus.
inline Distribution random_full_support(int d, Rng& rng) {
    if (d < 1) throw std::domain_error("random_full_support: d must be >= 1");
    std::vector<double> w(d);
    for (int i = 0; i < d; ++i) w[i] = -std::log(uniform01_open(rng));
    return make_distribution(w);
}

} // namespace commsim
