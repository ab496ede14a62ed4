#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqdet {

// Calibrated stopping thresholds. a guards the null-acceptance rule,
// b the alternative-acceptance rule. Immutable once computed.
struct Thresholds {
    double a;
    double b;
};

// Survival function of the Erlang(1, k) distribution,
//   F(x) = e^{-x} * sum_{j=0}^{k-1} x^j / j!
// evaluated in the log domain with a running log-sum-exp so large x and k
// do not overflow the partial sums.
inline double erlang_survival(double x, int k) {
    if (!(x >= 0.0)) throw std::domain_error("erlang_survival: x must be >= 0");
    if (k < 1) throw std::domain_error("erlang_survival: k must be >= 1");
    if (x == 0.0) return 1.0;

    const double lx = std::log(x);
    double max_term = 0.0;  // j = 0 term is log(1) = 0
    double log_sum = 0.0;
    for (int j = 1; j < k; ++j) {
        const double term = j * lx - std::lgamma(j + 1.0);
        max_term = std::max(max_term, term);
    }
    for (int j = 0; j < k; ++j) {
        const double term = j * lx - std::lgamma(j + 1.0);
        log_sum += std::exp(term - max_term);
    }
    const double v = std::exp(-x + max_term + std::log(log_sum));
    return std::min(v, 1.0);
}

// Inverse of erlang_survival in x for fixed k: finds b with F(b) = alpha.
// Bracket-doubling from [0, max(1, |log alpha|)], then bisection on the
// strictly decreasing F down to an absolute width of 1e-12.
inline double invert_erlang_survival(double alpha, int k) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("invert_erlang_survival: alpha must lie in (0,1)");
    if (k < 1) throw std::domain_error("invert_erlang_survival: k must be >= 1");

    double lo = 0.0;
    double hi = std::max(1.0, -std::log(alpha));
    while (erlang_survival(hi, k) > alpha) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("invert_erlang_survival: bracket blew up");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (erlang_survival(mid, k) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// A = |log beta|, B = F^{-1}(alpha) for the Erlang(1, k) survival F.
inline Thresholds calibrate(double alpha, double beta, int k) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("calibrate: beta must lie in (0,1)");
    return Thresholds{std::fabs(std::log(beta)), invert_erlang_survival(alpha, k)};
}

}  // namespace seqdet
