#include "sdm/forecasting.hpp"

#include "sdm/errors.hpp"
#include "sdm/threads.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sdm {

namespace {

Vec scenario_params(const ModelSpec& spec, const Vec& f_tilde) {
    if (!f_tilde.allFinite()) {
        throw FilterDivergence("scenario produced a non-finite linked parameter");
    }
    const Vec f = unlink(spec.links(), f_tilde);
    try {
        check_params(spec.dist(), f);
    } catch (const DomainError& e) {
        throw FilterDivergence(std::string("scenario left the parameter domain: ") + e.what());
    }
    return f;
}

struct ScenarioPath {
    Eigen::MatrixXd params;  // k x H
    Eigen::VectorXd y;       // H
};

// One scenario path; throws FilterDivergence if the recursion breaks down.
ScenarioPath run_scenario(const ModelSpec& spec, const Coefficients& coef,
                          std::vector<Vec> f_hist, std::vector<Vec> s_hist, Vec next,
                          std::size_t horizon, RandomStream& rng) {
    const auto H = static_cast<Eigen::Index>(horizon);
    ScenarioPath path{Eigen::MatrixXd(spec.num_params(), H), Eigen::VectorXd(H)};
    const std::size_t keep = static_cast<std::size_t>(spec.max_lag());
    for (Eigen::Index h = 0; h < H; ++h) {
        const Vec f = scenario_params(spec, next);
        const double y = sample(spec.dist(), f, rng);
        Vec s;
        try {
            s = scaled_score(spec.dist(), spec.links(), f, y, spec.scaling());
        } catch (const DomainError& e) {
            throw FilterDivergence(std::string("scenario draw rejected: ") + e.what());
        }
        if (!s.allFinite()) {
            throw FilterDivergence("scenario produced a non-finite score");
        }
        path.params.col(h) = f;
        path.y(h) = y;
        f_hist.push_back(next);
        s_hist.push_back(s);
        if (f_hist.size() > keep) {
            f_hist.erase(f_hist.begin());
            s_hist.erase(s_hist.begin());
        }
        next = update_step(spec, coef, f_hist, s_hist);
    }
    return path;
}

}  // namespace

double empirical_quantile(std::span<const double> samples, double q) {
    if (samples.empty()) {
        throw EmptyInput("quantile of an empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("quantile probability must lie in [0, 1]");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Forecast forecast(std::span<const double> y, const ModelSpec& spec, const Coefficients& coef,
                  const InitialParams& init, const ForecastOptions& options) {
    if (options.horizon < 1) {
        throw InvalidModel("forecast horizon must be at least 1");
    }
    if (options.scenarios < 1) {
        throw InvalidModel("number of scenarios must be at least 1");
    }
    for (double q : options.quantiles) {
        if (!(q >= 0.0 && q <= 1.0)) {
            throw InvalidModel("quantile probabilities must lie in [0, 1]");
        }
    }
    const auto m = static_cast<std::size_t>(spec.max_lag());
    if (y.size() < m) {
        throw InvalidModel("forecasting needs at least " + std::to_string(m) + " observations");
    }
    const FilterResult filtered = filter(spec, coef, y, init);

    // Recursion state at T: the last m linked parameters and scores.
    std::vector<Vec> f_hist;
    std::vector<Vec> s_hist;
    const auto T = static_cast<Eigen::Index>(y.size());
    for (Eigen::Index t = T - static_cast<Eigen::Index>(m); t < T; ++t) {
        f_hist.emplace_back(filtered.f_tilde.row(t).transpose());
        s_hist.emplace_back(filtered.s_tilde.row(t).transpose());
    }

    const auto H = static_cast<Eigen::Index>(options.horizon);
    const auto S = static_cast<Eigen::Index>(options.scenarios);
    const int k = spec.num_params();
    Forecast out;
    out.parameter_scenarios.assign(options.horizon, Eigen::MatrixXd(k, S));
    out.observation_scenarios.resize(H, S);

    parallel_for(options.scenarios, resolve_threads(options.threads),
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t s = begin; s < end; ++s) {
                         RandomStream rng(options.seed, options.first_scenario + s);
                         ScenarioPath path;
                         bool done = false;
                         std::string last_error;
                         for (int attempt = 0; attempt <= options.max_retries && !done; ++attempt) {
                             try {
                                 path = run_scenario(spec, coef, f_hist, s_hist,
                                                     filtered.next_f_tilde, options.horizon, rng);
                                 done = true;
                             } catch (const FilterDivergence& e) {
                                 last_error = e.what();
                             }
                         }
                         if (!done) {
                             throw FilterDivergence("scenario " +
                                                    std::to_string(options.first_scenario + s) +
                                                    " diverged after " +
                                                    std::to_string(options.max_retries) +
                                                    " redraws: " + last_error);
                         }
                         const auto col = static_cast<Eigen::Index>(s);
                         for (Eigen::Index h = 0; h < H; ++h) {
                             out.parameter_scenarios[static_cast<std::size_t>(h)].col(col) =
                                 path.params.col(h);
                         }
                         out.observation_scenarios.col(col) = path.y;
                     }
                 });

    out.parameter_forecast.resize(H, k);
    out.observation_forecast.resize(H);
    std::vector<double> row(options.scenarios);
    for (Eigen::Index h = 0; h < H; ++h) {
        const auto& ps = out.parameter_scenarios[static_cast<std::size_t>(h)];
        for (int i = 0; i < k; ++i) {
            out.parameter_forecast(h, i) = ps.row(i).sum() / static_cast<double>(S);
        }
        out.observation_forecast(h) =
            out.observation_scenarios.row(h).sum() / static_cast<double>(S);
    }
    for (double q : options.quantiles) {
        Eigen::VectorXd v(H);
        for (Eigen::Index h = 0; h < H; ++h) {
            for (Eigen::Index s = 0; s < S; ++s) {
                row[static_cast<std::size_t>(s)] = out.observation_scenarios(h, s);
            }
            v(h) = empirical_quantile(row, q);
        }
        out.quantiles[q] = std::move(v);
    }
    return out;
}

}  // namespace sdm
