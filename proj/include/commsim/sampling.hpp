#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "commsim/distribution.hpp"
#include "commsim/rng.hpp"

namespace commsim {

/// Inverse-CDF sampler over a precomputed cumulative table. The table is
/// built once (long double accumulation, final entry pinned to 1) and the
/// draw is an upper_bound search, so output depends only on the engine
/// stream and is reproducible across platforms.
class Sampler {
public:
    explicit Sampler(const Distribution& p) : cdf_(p.probs.size()) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < p.probs.size(); ++i) {
            acc += p.probs[i];
            cdf_[i] = static_cast<double>(acc);
        }
        cdf_.back() = 1.0;
    }

    /// One draw; returns a 1-based symbol in {1..d}.
    int draw(Rng& rng) const {
        const double u = uniform01(rng);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<int>(it - cdf_.begin()) + 1;
    }

private:
    std::vector<double> cdf_;
};

/// count i.i.d. draws from p (1-based symbols).
inline std::vector<int> sample(const Distribution& p, int count, Rng& rng) {
    Sampler s(p);
    std::vector<int> out(count > 0 ? count : 0);
    for (auto& x : out) x = s.draw(rng);
    return out;
}

} // namespace commsim
