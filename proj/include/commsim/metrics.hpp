#pragma once

#include <cmath>
#include <vector>

#include "commsim/errors.hpp"

namespace commsim {

/// l1 distance sum |a_i - b_i|.
inline double l1_loss(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw validation_error("l1_loss: size mismatch");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return static_cast<double>(acc);
}

/// Squared l2 distance sum (a_i - b_i)^2; the l2 risk is measured in this
/// squared form throughout.
inline double l2_loss(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw validation_error("l2_loss: size mismatch");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double dlt = a[i] - b[i];
        acc += dlt * dlt;
    }
    return static_cast<double>(acc);
}

/// sum |a_i - b_i|^q for q in [1, 2]; coincides with l1_loss at q=1 and
/// l2_loss at q=2 (short-circuited so those paths stay bit-identical).
inline double lq_loss(const std::vector<double>& a, const std::vector<double>& b, double q) {
    if (!(q >= 1.0) || q > 2.0) throw std::domain_error("lq_loss: q must lie in [1, 2]");
    if (q == 1.0) return l1_loss(a, b);
    if (q == 2.0) return l2_loss(a, b);
    if (a.size() != b.size()) throw validation_error("lq_loss: size mismatch");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::pow(static_cast<long double>(std::fabs(a[i] - b[i])),
                        static_cast<long double>(q));
    return static_cast<double>(acc);
}

} // namespace commsim
