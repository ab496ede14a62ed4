#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <variant>

#include "seqdet/rng.hpp"

namespace seqdet {

// One sample X_t^k. For bernoulli models the value is 0 or 1.
using Observation = double;

struct KlPair {
    double i0;  // E_0[-Z_1], divergence of the null from the alternative
    double i1;  // E_1[Z_1]
};

struct GaussianMeanShift {
    double mu;  // N(0,1) under the null, N(mu,1) under the alternative
};

struct Bernoulli {
    double p0;
    double p1;
};

// Per-sensor density pair with its LLR increment and KL numbers, all in
// closed form. Immutable after construction; safe to share across threads.
class ObservationModel {
  public:
    static ObservationModel gaussian_mean_shift(double mu) {
        if (!(std::isfinite(mu)) || mu == 0.0)
            throw std::invalid_argument("gaussian_mean_shift: mu must be finite and nonzero");
        return ObservationModel(GaussianMeanShift{mu});
    }

    static ObservationModel bernoulli(double p0, double p1) {
        if (!(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0))
            throw std::invalid_argument("bernoulli: p0, p1 must lie in (0,1)");
        if (p0 == p1)
            throw std::invalid_argument("bernoulli: p0 and p1 must differ");
        return ObservationModel(Bernoulli{p0, p1});
    }

    Observation sample(bool under_h1, RandomStream& rng) const {
        if (const auto* g = std::get_if<GaussianMeanShift>(&kind_))
            return rng.normal() + (under_h1 ? g->mu : 0.0);
        const auto& b = std::get<Bernoulli>(kind_);
        return rng.bernoulli(under_h1 ? b.p1 : b.p0) ? 1.0 : 0.0;
    }

    // log(f1(x)/f0(x))
    double llr_increment(Observation x) const {
        if (const auto* g = std::get_if<GaussianMeanShift>(&kind_))
            return g->mu * x - 0.5 * g->mu * g->mu;
        const auto& b = std::get<Bernoulli>(kind_);
        if (x == 1.0) return std::log(b.p1 / b.p0);
        if (x == 0.0) return std::log((1.0 - b.p1) / (1.0 - b.p0));
        throw std::domain_error("bernoulli llr_increment: observation must be 0 or 1");
    }

    KlPair kl_numbers() const {
        if (const auto* g = std::get_if<GaussianMeanShift>(&kind_)) {
            const double i = 0.5 * g->mu * g->mu;
            return {i, i};
        }
        const auto& b = std::get<Bernoulli>(kind_);
        const double l1 = std::log(b.p1 / b.p0);
        const double l0 = std::log((1.0 - b.p1) / (1.0 - b.p0));
        return {-(b.p0 * l1 + (1.0 - b.p0) * l0), b.p1 * l1 + (1.0 - b.p1) * l0};
    }

    // E_1[(Z_1)^2]
    double llr_second_moment() const {
        if (const auto* g = std::get_if<GaussianMeanShift>(&kind_)) {
            const double mu2 = g->mu * g->mu;
            return mu2 + 0.25 * mu2 * mu2;
        }
        const auto& b = std::get<Bernoulli>(kind_);
        const double l1 = std::log(b.p1 / b.p0);
        const double l0 = std::log((1.0 - b.p1) / (1.0 - b.p0));
        return b.p1 * l1 * l1 + (1.0 - b.p1) * l0 * l0;
    }

    bool is_bernoulli() const { return std::holds_alternative<Bernoulli>(kind_); }

    std::string describe() const {
        char buf[96];
        if (const auto* g = std::get_if<GaussianMeanShift>(&kind_)) {
            std::snprintf(buf, sizeof buf, "gaussian_mean_shift(%.9g)", g->mu);
        } else {
            const auto& b = std::get<Bernoulli>(kind_);
            std::snprintf(buf, sizeof buf, "bernoulli(%.9g, %.9g)", b.p0, b.p1);
        }
        return buf;
    }

  private:
    template <class T>
    explicit ObservationModel(T kind) : kind_(kind) {}

    std::variant<GaussianMeanShift, Bernoulli> kind_;
};

}  // namespace seqdet
