#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "seqdet/observation_model.hpp"
#include "seqdet/strategy.hpp"

namespace seqdet {

struct SensorConfig {
    ObservationModel model;
    double delta;        // communication step for the event-triggered recursion
    double a_threshold;  // calibrated A, arms the one-shot null alarm

    SensorConfig(ObservationModel m, double d, double a)
        : model(std::move(m)), delta(d), a_threshold(a) {
        if (!(delta > 0.0)) throw std::invalid_argument("SensorConfig: delta must be > 0");
        if (!(a_threshold > 0.0))
            throw std::invalid_argument("SensorConfig: a_threshold must be > 0");
    }
};

enum class MessageKind { full_value, one_bit, null_alarm };

struct UplinkMessage {
    int sensor_id;
    MessageKind kind;
    double ell;       // realized LLR since the previous communication (full_value only)
    long emitted_at;  // local time t of emission
};

// Running per-sensor statistics. Invariants maintained by observe():
//   m >= z, m >= 0
//   delta * n_comm <= z_last_comm <= m
//   z - z_last_comm < delta between communications
//   overshoot_sum == z_last_comm - delta * n_comm >= 0
struct SensorState {
    long t = 0;
    double z = 0.0;            // Z_t
    double m = 0.0;            // max_{s<=t} Z_s, with M_0 = 0
    long n_comm = 0;           // N_t, messages sent under the recursion
    double z_last_comm = 0.0;  // Z at the most recent communication
    double overshoot_sum = 0.0;
    bool null_alarm_sent = false;
};

// Advance one sensor by one observation. At most one communication per
// tick: the recursion compares Z_t to the value at the previous
// communication time, so a jump past 2*delta produces a single message
// whose overshoot absorbs the excess. The null alarm is one-shot and
// never retracted. Both a communication and the alarm may fire at the
// same t.
inline std::vector<UplinkMessage> observe(SensorState& state, const SensorConfig& config,
                                          int sensor_id, Observation x,
                                          MessageKind comm_kind = MessageKind::full_value) {
    std::vector<UplinkMessage> out;
    state.t += 1;
    state.z += config.model.llr_increment(x);
    state.m = std::max(state.m, state.z);

    const double ell = state.z - state.z_last_comm;
    if (ell >= config.delta) {
        out.push_back(UplinkMessage{sensor_id, comm_kind, ell, state.t});
        state.n_comm += 1;
        state.overshoot_sum += ell - config.delta;
        state.z_last_comm = state.z;
    }
    if (!state.null_alarm_sent && state.z <= -config.a_threshold) {
        out.push_back(UplinkMessage{sensor_id, MessageKind::null_alarm, 0.0, state.t});
        state.null_alarm_sent = true;
    }
    return out;
}

// The surrogate statistic hat Z^k this sensor contributes under the given
// strategy. Only the three T_hat variants use it.
inline double local_hat_z(const SensorState& state, const SensorConfig& config,
                          const StrategyKind& strategy) {
    if (std::holds_alternative<CentralizedPositivePart>(strategy))
        return std::max(state.z, 0.0);
    if (std::holds_alternative<DecentralizedFullValue>(strategy)) return state.z_last_comm;
    if (std::holds_alternative<DecentralizedOneBit>(strategy))
        return config.delta * static_cast<double>(state.n_comm);
    throw std::logic_error("local_hat_z: strategy does not use a surrogate statistic");
}

}  // namespace seqdet
