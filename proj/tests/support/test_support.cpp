#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace sdm::testing {

namespace {

double uniform(RandomStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

}  // namespace

Vec random_interior_params(Family family, RandomStream& rng) {
    Vec p(distribution_spec(family).num_params);
    switch (family) {
        case Family::Beta: p << uniform(rng, 0.5, 5), uniform(rng, 0.5, 5); break;
        case Family::BetaLocationScale: {
            const double a = uniform(rng, -2, 0);
            p << a, a + uniform(rng, 1, 3), uniform(rng, 0.8, 5), uniform(rng, 0.8, 5);
            break;
        }
        case Family::Exponential: p << uniform(rng, 0.2, 5); break;
        case Family::Gamma: p << uniform(rng, 0.5, 5), uniform(rng, 0.2, 3); break;
        case Family::LogitNormal:
        case Family::LogNormal: p << uniform(rng, -1, 1), uniform(rng, 0.2, 2); break;
        case Family::NegativeBinomial: p << uniform(rng, 0.5, 10), uniform(rng, 0.1, 0.9); break;
        case Family::Normal: p << uniform(rng, -2, 2), uniform(rng, 0.2, 3); break;
        case Family::Poisson: p << uniform(rng, 0.5, 10); break;
        case Family::TDist: p << uniform(rng, 2.5, 20); break;
        case Family::TDistLocationScale:
            p << uniform(rng, -2, 2), uniform(rng, 0.2, 3), uniform(rng, 2.5, 20);
            break;
        case Family::Weibull: p << uniform(rng, 0.5, 3), uniform(rng, 0.5, 4); break;
    }
    return p;
}

double random_interior_observation(Family family, const Vec& params, RandomStream& rng) {
    const auto& dist = distribution_spec(family);
    for (;;) {
        const double y = sample(dist, params, rng);
        switch (family) {
            case Family::Beta:
            case Family::LogitNormal:
                if (y > 1e-4 && y < 1 - 1e-4) return y;
                break;
            case Family::BetaLocationScale: {
                const double margin = 1e-3 * (params(1) - params(0));
                if (y > params(0) + margin && y < params(1) - margin) return y;
                break;
            }
            case Family::Exponential:
            case Family::Gamma:
            case Family::LogNormal:
            case Family::Weibull:
                if (y > 1e-4) return y;
                break;
            default: return y;
        }
    }
}

Vec reference_params(Family family) {
    Vec p(distribution_spec(family).num_params);
    switch (family) {
        case Family::Beta: p << 2.0, 3.0; break;
        case Family::BetaLocationScale: p << -1.0, 2.0, 2.5, 1.5; break;
        case Family::Exponential: p << 2.0; break;
        case Family::Gamma: p << 2.5, 1.5; break;
        case Family::LogitNormal: p << 0.3, 0.5; break;
        case Family::LogNormal: p << 0.2, 0.4; break;
        case Family::NegativeBinomial: p << 4.0, 0.4; break;
        case Family::Normal: p << 1.0, 2.0; break;
        case Family::Poisson: p << 4.0; break;
        case Family::TDist: p << 8.0; break;
        case Family::TDistLocationScale: p << 0.5, 1.5, 8.0; break;
        case Family::Weibull: p << 1.5, 2.0; break;
    }
    return p;
}

Vec finite_difference_score(const DistributionSpec& dist, const Vec& params, double y, double h) {
    Vec g(params.size());
    for (int i = 0; i < params.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(params(i)));
        Vec up = params;
        Vec down = params;
        up(i) += step;
        down(i) -= step;
        g(i) = (log_pdf(dist, up, y) - log_pdf(dist, down, y)) / (2.0 * step);
    }
    return g;
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("SDM_DATA_DIR")) {
        return env;
    }
    return SDM_TEST_DATA_DIR;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sdm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace sdm::testing
