#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "seqdet/calibration.hpp"
#include "seqdet/sensor_node.hpp"
#include "seqdet/strategy.hpp"

namespace seqdet {

enum class Decision { accept_h0, accept_h1, censored };

struct Verdict {
    Decision decision;
    long stopping_time;
    long messages_total;
};

struct FusionState {
    long t = 0;
    std::vector<double> hat_z;     // per-sensor surrogate, built from messages
    std::vector<bool> null_alarms;
    int alarm_count = 0;
    std::vector<double> z_exact;   // exact Z^k, for centralized rules and comparators
    long messages_total = 0;

    explicit FusionState(int k)
        : hat_z(k, 0.0), null_alarms(k, false), z_exact(k, 0.0) {}
};

// Apply one uplink message. one_bit credits the sender's delta, full_value
// credits the realized LLR, null_alarm marks the sender. A second alarm
// from the same sensor is a protocol violation.
inline void ingest(FusionState& fstate, const UplinkMessage& msg, double delta_of_sender) {
    const int idx = msg.sensor_id - 1;
    if (idx < 0 || idx >= static_cast<int>(fstate.hat_z.size()))
        throw std::out_of_range("ingest: sensor_id out of range");
    switch (msg.kind) {
        case MessageKind::one_bit:
            fstate.hat_z[idx] += delta_of_sender;
            break;
        case MessageKind::full_value:
            fstate.hat_z[idx] += msg.ell;
            break;
        case MessageKind::null_alarm:
            if (fstate.null_alarms[idx])
                throw std::runtime_error("ingest: duplicate null alarm from sensor " +
                                         std::to_string(msg.sensor_id));
            fstate.null_alarms[idx] = true;
            fstate.alarm_count += 1;
            break;
    }
    fstate.messages_total += 1;
}

// log( sum_B p_B exp(sum_{k in B} z_k) ) over the listed subsets,
// evaluated with a max-shifted log-sum-exp.
inline double mixture_statistic(std::span<const double> z,
                                const std::vector<std::pair<SensorSet, double>>& prior) {
    if (prior.empty()) throw std::invalid_argument("mixture_statistic: empty prior");
    if (z.size() > 20) throw std::length_error("mixture_statistic: K > 20 not supported");

    std::vector<double> exponents;
    exponents.reserve(prior.size());
    for (const auto& [subset, weight] : prior) {
        double zb = 0.0;
        for (int id = 1; id <= static_cast<int>(z.size()); ++id)
            if (set_contains(subset, id)) zb += z[id - 1];
        exponents.push_back(std::log(weight) + zb);
    }
    const double mx = *std::max_element(exponents.begin(), exponents.end());
    double acc = 0.0;
    for (double e : exponents) acc += std::exp(e - mx);
    return mx + std::log(acc);
}

// Uniform prior over all 2^k - 1 non-empty subsets; brute-force comparator
// for small k only.
inline std::vector<std::pair<SensorSet, double>> uniform_power_set_prior(int k) {
    if (k < 1 || k > 20) throw std::length_error("uniform_power_set_prior: need 1 <= k <= 20");
    const SensorSet n = full_set(k);
    std::vector<std::pair<SensorSet, double>> prior;
    prior.reserve(n);
    const double w = 1.0 / static_cast<double>(n);
    for (SensorSet s = 1; s <= n; ++s) prior.emplace_back(s, w);
    return prior;
}

// Classical SPRT step on the known-subset LLR sum.
inline std::optional<Decision> oracle_sprt_step(double z_subset_sum, const Thresholds& thr) {
    if (z_subset_sum >= thr.b) return Decision::accept_h1;
    if (z_subset_sum <= -thr.a) return Decision::accept_h0;
    return std::nullopt;
}

// Global stopping check. T_hat fires when the surrogate sum reaches B;
// T_check fires when every exact LLR sits at or below -A (centralized) or
// when every sensor has raised its one-shot alarm (decentralized). A tie
// resolves to accept_h1, matching d* = 1 when T_hat <= T_check. The
// oracle and mixture comparators run an SPRT on their own statistic.
inline std::optional<Verdict> check_stop(const FusionState& fstate, const Thresholds& thr,
                                         const StrategyKind& strategy, int k_total) {
    const auto verdict = [&](Decision d) {
        return Verdict{d, fstate.t, fstate.messages_total};
    };

    if (const auto* o = std::get_if<OracleSprt>(&strategy)) {
        double zs = 0.0;
        for (int id = 1; id <= k_total; ++id)
            if (set_contains(o->subset, id)) zs += fstate.z_exact[id - 1];
        if (auto d = oracle_sprt_step(zs, thr)) return verdict(*d);
        return std::nullopt;
    }
    if (const auto* m = std::get_if<MixtureBruteForce>(&strategy)) {
        const double stat = mixture_statistic(fstate.z_exact, m->prior);
        if (stat >= thr.b) return verdict(Decision::accept_h1);
        if (stat <= -thr.a) return verdict(Decision::accept_h0);
        return std::nullopt;
    }

    const double hat_sum = std::accumulate(fstate.hat_z.begin(), fstate.hat_z.end(), 0.0);
    const bool t_hat_fires = hat_sum >= thr.b;

    bool t_check_fires;
    if (is_decentralized(strategy)) {
        t_check_fires = fstate.alarm_count == k_total;
    } else {
        const double z_max = *std::max_element(fstate.z_exact.begin(), fstate.z_exact.end());
        t_check_fires = z_max <= -thr.a;
    }

    if (t_hat_fires) return verdict(Decision::accept_h1);
    if (t_check_fires) return verdict(Decision::accept_h0);
    return std::nullopt;
}

}  // namespace seqdet
