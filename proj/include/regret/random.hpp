#pragma once

#include <cstdint>
#include <random>

namespace regret {

// Per-sample random stream. Seeding from (seed, stream, index) makes any single
// sample replayable without regenerating the ones before it. Draws are built
// from raw engine bits rather than std distributions, whose output is
// implementation-defined.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi].
    int integer(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace regret
