// Per-trajectory random streams keyed by (master seed, trajectory index).

#pragma once

#include <cstdint>
#include <random>

namespace dickesq {

class TrajectoryRng {
public:
    TrajectoryRng(std::uint64_t master_seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                          0x9e3779b9u};
        engine_.seed(seq);
    }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace dickesq
