#include "sdm/random.hpp"

#include <array>

namespace sdm {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t substream) {
    std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (substream + 1));
    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t v = splitmix64(state);
        words[i] = static_cast<std::uint32_t>(v);
        words[i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t substream)
    : engine_(make_engine(seed, substream)) {}

// Distribution objects are created per draw so no cached state survives
// between calls; the stream position alone determines the next value.

double RandomStream::uniform() {
    double u = 0.0;
    do {
        u = std::generate_canonical<double, 53>(engine_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
}

double RandomStream::standard_normal() {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(engine_);
}

double RandomStream::gamma(double shape, double scale) {
    std::gamma_distribution<double> dist(shape, scale);
    return dist(engine_);
}

double RandomStream::student_t(double dof) {
    std::student_t_distribution<double> dist(dof);
    return dist(engine_);
}

double RandomStream::exponential(double rate) {
    std::exponential_distribution<double> dist(rate);
    return dist(engine_);
}

double RandomStream::weibull(double shape, double scale) {
    std::weibull_distribution<double> dist(shape, scale);
    return dist(engine_);
}

double RandomStream::poisson(double mean) {
    std::poisson_distribution<long long> dist(mean);
    return static_cast<double>(dist(engine_));
}

}  // namespace sdm
