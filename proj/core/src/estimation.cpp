#include "sdm/estimation.hpp"

#include "sdm/errors.hpp"
#include "sdm/threads.hpp"

#include <Eigen/LU>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace sdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_fixed(double v, int width, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%*.*f", width, precision, v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// ThetaLayout
// ---------------------------------------------------------------------------

ThetaLayout::ThetaLayout(const ModelSpec& spec) : spec_(spec) {
    using Block = Entry::Block;
    for (int i = 0; i < spec.num_params(); ++i) {
        entries_.push_back({Block::Omega, 0, i});
    }
    for (int lag : spec.score_lags()) {
        for (int i : spec.time_varying()) {
            entries_.push_back({Block::A, lag, i});
        }
    }
    for (int lag : spec.ar_lags()) {
        for (int i : spec.time_varying()) {
            entries_.push_back({Block::B, lag, i});
        }
    }
}

std::vector<std::string> ThetaLayout::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        const std::string idx = std::to_string(e.param + 1);
        switch (e.block) {
            case Entry::Block::Omega: out.push_back("omega_" + idx); break;
            case Entry::Block::A:
                out.push_back("A_" + std::to_string(e.lag) + "_" + idx + idx);
                break;
            case Entry::Block::B:
                out.push_back("B_" + std::to_string(e.lag) + "_" + idx + idx);
                break;
        }
    }
    return out;
}

Coefficients ThetaLayout::to_coefficients(std::span<const double> theta) const {
    if (theta.size() != entries_.size()) {
        throw InvalidModel("theta has " + std::to_string(theta.size()) + " entries, expected " +
                           std::to_string(entries_.size()));
    }
    Coefficients c = Coefficients::unset(spec_);
    for (std::size_t n = 0; n < entries_.size(); ++n) {
        const auto& e = entries_[n];
        switch (e.block) {
            case Entry::Block::Omega: c.omega(e.param) = theta[n]; break;
            case Entry::Block::A: c.A[e.lag](e.param) = theta[n]; break;
            case Entry::Block::B: c.B[e.lag](e.param) = theta[n]; break;
        }
    }
    return c;
}

std::vector<double> ThetaLayout::from_coefficients(const Coefficients& coef) const {
    coef.validate(spec_);
    std::vector<double> theta;
    theta.reserve(entries_.size());
    for (const auto& e : entries_) {
        switch (e.block) {
            case Entry::Block::Omega: theta.push_back(coef.omega(e.param)); break;
            case Entry::Block::A: theta.push_back(coef.A.at(e.lag)(e.param)); break;
            case Entry::Block::B: theta.push_back(coef.B.at(e.lag)(e.param)); break;
        }
    }
    return theta;
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

LikelihoodObjective::LikelihoodObjective(ModelSpec spec, std::vector<double> y,
                                         std::optional<InitialParams> init)
    : spec_(std::move(spec)), y_(std::move(y)), init_(std::move(init)), layout_(spec_) {}

InitialParams LikelihoodObjective::initial_params_for(std::span<const double> theta) const {
    if (init_) {
        return *init_;
    }
    return unconditional_mean_init(spec_, layout_.to_coefficients(theta));
}

double LikelihoodObjective::operator()(std::span<const double> theta) const {
    for (double v : theta) {
        if (!std::isfinite(v)) {
            return kInf;
        }
    }
    try {
        const Coefficients coef = layout_.to_coefficients(theta);
        const InitialParams init = init_ ? *init_ : unconditional_mean_init(spec_, coef);
        const double ll = filter(spec_, coef, y_, init).total_loglik;
        return std::isfinite(ll) ? -ll : kInf;
    } catch (const Error&) {
        // Divergence, nonstationary B or a parameter pushed out of its domain:
        // all mark a bad candidate rather than bad input.
        return kInf;
    }
}

double objective(const ModelSpec& spec, std::span<const double> y,
                 const std::optional<InitialParams>& init, std::span<const double> theta) {
    return LikelihoodObjective(spec, {y.begin(), y.end()}, init)(theta);
}

std::vector<std::vector<double>> random_starts(const ModelSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidModel("number of starts must be positive");
    }
    const std::size_t dim = ThetaLayout(spec).size();
    RandomStream rng(seed, 0);
    std::vector<std::vector<double>> starts(static_cast<std::size_t>(n), std::vector<double>(dim));
    for (auto& s : starts) {
        for (auto& v : s) {
            v = rng.uniform() - 0.5;
        }
    }
    return starts;
}

double two_sided_p_value(double t_stat, double dof) {
    if (std::isnan(t_stat) || !(dof > 0.0)) {
        return kNaN;
    }
    if (std::isinf(t_stat)) {
        return 0.0;
    }
    const boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t_stat)));
}

double aic(double loglik, std::size_t n_params) {
    return 2.0 * static_cast<double>(n_params) - 2.0 * loglik;
}

double bic(double loglik, std::size_t n_params, std::size_t n_obs) {
    return static_cast<double>(n_params) * std::log(static_cast<double>(n_obs)) - 2.0 * loglik;
}

void compute_standard_errors(FitResult& result, const optim::Objective& obj) {
    const std::size_t n = result.theta_hat.size();
    result.std_errors.assign(n, kNaN);
    result.t_stats.assign(n, kNaN);
    result.p_values.assign(n, kNaN);
    const Eigen::MatrixXd H = optim::numerical_hessian(obj, result.theta_hat);
    if (H.allFinite() && n > 0) {
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(0.5 * (H + H.transpose()));
        if (lu.isInvertible()) {
            const Eigen::MatrixXd cov = lu.inverse();
            for (std::size_t i = 0; i < n; ++i) {
                const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
                if (v > 0.0 && std::isfinite(v)) {
                    result.std_errors[i] = std::sqrt(v);
                }
            }
        }
    }
    const auto dof = static_cast<double>(result.n_params);
    for (std::size_t i = 0; i < n; ++i) {
        const double se = result.std_errors[i];
        if (result.theta_hat[i] == 0.0) {
            result.t_stats[i] = 0.0;
            result.p_values[i] = 1.0;
        } else if (!std::isnan(se)) {
            result.t_stats[i] = result.theta_hat[i] / se;
            result.p_values[i] = two_sided_p_value(result.t_stats[i], dof);
        }
    }
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

namespace {

// A random start whose recursion already diverges leaves every simplex vertex
// at +inf. Halving toward theta = 0 (a static model) restores a finite start.
int pull_toward_origin(const optim::Objective& f, std::vector<double>& theta) {
    constexpr int kMaxHalvings = 20;
    int steps = 0;
    while (steps < kMaxHalvings && !std::isfinite(f(theta))) {
        for (double& v : theta) v *= 0.5;
        ++steps;
    }
    return steps;
}

}  // namespace

FitResult fit(const ModelSpec& spec, std::span<const double> y, const FitOptions& options,
              const std::optional<InitialParams>& init) {
    if (y.empty()) {
        throw EmptyInput("cannot fit an empty series");
    }
    validate_series(spec.dist(), y);

    const LikelihoodObjective objective_fn(spec, {y.begin(), y.end()}, init);
    const ThetaLayout& layout = objective_fn.layout();
    const std::size_t dim = layout.size();

    const bool random = options.initial_points.empty();
    std::vector<std::vector<double>> starts = random
                                                  ? random_starts(spec, options.n_starts, options.seed)
                                                  : options.initial_points;
    for (const auto& s : starts) {
        if (s.size() != dim) {
            throw InvalidModel("initial point has " + std::to_string(s.size()) +
                               " entries, expected " + std::to_string(dim));
        }
    }
    if (options.method == OptimizerMethod::InteriorPointBoxed) {
        if ((!options.lower.empty() && options.lower.size() != dim) ||
            (!options.upper.empty() && options.upper.size() != dim)) {
            throw InvalidModel("bounds must have " + std::to_string(dim) + " entries");
        }
        for (std::size_t i = 0; i < options.lower.size() && i < options.upper.size(); ++i) {
            if (!(options.lower[i] < options.upper[i])) {
                throw InvalidModel("lower bound must be below upper bound for " +
                                   layout.names()[i]);
            }
        }
    }

    const optim::Objective f = [&objective_fn](std::span<const double> theta) {
        return objective_fn(theta);
    };

    std::vector<StartLog> logs(starts.size());
    std::vector<optim::Result> results(starts.size());
    std::vector<std::string> traces(starts.size());
    parallel_for(starts.size(), resolve_threads(options.threads),
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t s = begin; s < end; ++s) {
                         std::ostringstream trace;
                         optim::Options opts;
                         opts.tolerance = options.tolerance;
                         opts.max_iterations = options.max_iterations;
                         opts.verbosity = options.verbosity;
                         opts.trace = &trace;
                         StartLog& log = logs[s];
                         if (random) {
                             log.shrink_steps = pull_toward_origin(f, starts[s]);
                         }
                         log.initial_point = starts[s];
                         try {
                             switch (options.method) {
                                 case OptimizerMethod::SimplexSearch:
                                     results[s] = optim::nelder_mead(f, starts[s], opts);
                                     break;
                                 case OptimizerMethod::QuasiNewton:
                                     results[s] = optim::lbfgs(f, starts[s], opts);
                                     break;
                                 case OptimizerMethod::InteriorPointBoxed:
                                     results[s] = optim::interior_point_newton(
                                         f, starts[s], options.lower, options.upper, opts);
                                     break;
                             }
                             const auto& r = results[s];
                             log.theta = r.x;
                             log.loglik = -r.value;
                             log.iterations = r.iterations;
                             log.function_calls = r.function_calls;
                             log.converged = r.converged;
                             log.failed = !std::isfinite(r.value);
                             if (log.failed) {
                                 log.message = "objective is not finite at every point visited";
                             }
                         } catch (const std::exception& e) {
                             log.failed = true;
                             log.loglik = -kInf;
                             log.message = e.what();
                         }
                         traces[s] = trace.str();
                     }
                 });

    std::optional<std::size_t> best;
    for (std::size_t s = 0; s < logs.size(); ++s) {
        if (!logs[s].failed && (!best || logs[s].loglik > logs[*best].loglik)) {
            best = s;
        }
    }

    if (options.verbosity >= 1 && options.log != nullptr) {
        auto& os = *options.log;
        for (std::size_t s = 0; s < logs.size(); ++s) {
            os << traces[s];
            os << "Round " << s + 1 << " of " << logs.size() << " - ";
            if (logs[s].failed) {
                os << "failed: " << logs[s].message << '\n';
            } else {
                os << "Log-likelihood: " << std::setprecision(16) << logs[s].loglik << '\n';
            }
        }
        if (options.verbosity >= 2 && best) {
            const auto& r = results[*best];
            os << "Best round: " << *best + 1 << '\n'
               << " * Algorithm: " << r.algorithm << '\n'
               << " * Minimum: " << std::setprecision(6) << std::scientific << r.value
               << std::defaultfloat << '\n'
               << " * Converged: " << (r.converged ? "true" : "false") << " (" << r.convergence_measure
               << ")\n"
               << " * Iterations: " << r.iterations << '\n'
               << " * Function calls: " << r.function_calls << '\n';
        }
    }

    if (!best) {
        std::string msg = "all " + std::to_string(logs.size()) + " starts failed";
        if (!logs.empty() && !logs.front().message.empty()) {
            msg += " (first: " + logs.front().message + ")";
        }
        throw AllStartsFailed(msg);
    }

    const optim::Result& r = results[*best];
    FitResult out{.spec = spec,
                  .theta_hat = r.x,
                  .names = layout.names(),
                  .coefficients = layout.to_coefficients(r.x),
                  .initial_params = objective_fn.initial_params_for(r.x),
                  .stationary_init = !init.has_value()};
    out.loglik = -r.value;
    out.n_obs = y.size();
    out.n_params = dim;
    out.aic = aic(out.loglik, dim);
    out.bic = bic(out.loglik, dim, out.n_obs);
    out.starts = std::move(logs);
    out.best_start = *best;
    out.algorithm = r.algorithm;
    out.iterations = r.iterations;
    out.function_calls = r.function_calls;
    out.convergence_measure = r.convergence_measure;
    out.converged = r.converged;
    compute_standard_errors(out, f);
    return out;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

std::string fit_stats(const FitResult& result) {
    std::ostringstream os;
    const std::string rule(56, '-');
    auto row = [&](const char* label, const std::string& value) {
        os << std::left << std::setw(30) << label << value << '\n';
    };
    os << rule << '\n';
    row("Distribution:", std::string(result.spec.dist().name));
    row("Number of observations:", std::to_string(result.n_obs));
    row("Number of unknown parameters:", std::to_string(result.n_params));
    row("Log-likelihood:", format_fixed(result.loglik, 0));
    row("AIC:", format_fixed(result.aic, 0));
    row("BIC:", format_fixed(result.bic, 0));
    os << rule << '\n';
    os << "Parameter      Estimate   Std.Error     t stat   p-value\n";
    for (std::size_t i = 0; i < result.theta_hat.size(); ++i) {
        os << std::left << std::setw(12) << result.names[i] << std::right
           << format_fixed(result.theta_hat[i], 11) << format_fixed(result.std_errors[i], 12)
           << format_fixed(result.t_stats[i], 11) << format_fixed(result.p_values[i], 10) << '\n';
    }
    return os.str();
}

}  // namespace sdm
