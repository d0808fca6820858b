#pragma once

#include <cstdint>
#include <random>

namespace sdm {

/**
 * @brief Seeded pseudo-random stream with independent substreams.
 *
 * A stream is identified by (seed, substream). Two streams with the same pair
 * produce identical draws; scenario-parallel code gives every scenario its own
 * substream so results do not depend on scheduling.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t substream = 0);

    /// Uniform on the open interval (0, 1).
    double uniform();
    double standard_normal();
    /// Gamma with the given shape and scale.
    double gamma(double shape, double scale);
    double student_t(double dof);
    double exponential(double rate);
    double weibull(double shape, double scale);
    double poisson(double mean);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace sdm
