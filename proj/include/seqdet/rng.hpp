#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace seqdet {

// Mixes (base_seed, stream_id) into an engine seed so that every
// (trial, sensor) pair gets its own reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id) {
    std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// A self-contained random stream. The normal sampler is hand-rolled
// (Marsaglia polar) so draws are pinned to the engine output alone,
// not to a standard-library distribution implementation.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    // uniform in (0, 1)
    double uniform() {
        std::uint64_t u = eng_();
        return (static_cast<double>(u >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace seqdet
