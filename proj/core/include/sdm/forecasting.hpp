#pragma once

#include "sdm/gas.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace sdm {

struct ForecastOptions {
    std::size_t horizon = 1;
    std::size_t scenarios = 10000;
    std::vector<double> quantiles{0.025, 0.5, 0.975};
    std::uint64_t seed = 123;
    /// Global index of the first scenario; scenario s draws from substream s.
    std::size_t first_scenario = 0;
    /// 0 reads SDM_THREADS or uses hardware parallelism.
    unsigned threads = 0;
    /// Redraws of a diverging scenario before giving up.
    int max_retries = 10;
};

struct Forecast {
    /// H x k mean over scenarios of the natural-space parameters.
    RowMatrix parameter_forecast;
    /// parameter_scenarios[h] is k x S.
    std::vector<Eigen::MatrixXd> parameter_scenarios;
    /// H x S.
    Eigen::MatrixXd observation_scenarios;
    /// Row means of observation_scenarios.
    Eigen::VectorXd observation_forecast;
    std::map<double, Eigen::VectorXd> quantiles;
};

/**
 * @brief Simulation-based H-step forecast.
 *
 * Filters y to obtain f_{T+1}; each scenario then alternates a draw from the
 * conditional density with one recursion step driven by its own draw.
 * Output is identical for any thread count.
 */
Forecast forecast(std::span<const double> y, const ModelSpec& spec, const Coefficients& coef,
                  const InitialParams& init, const ForecastOptions& options);

/// Linear interpolation between closest ranks (h = (n - 1) q).
double empirical_quantile(std::span<const double> samples, double q);

}  // namespace sdm
