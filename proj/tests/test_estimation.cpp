#include "sdm/errors.hpp"
#include "sdm/estimation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

using namespace sdm;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// Normal with a log-linked time-varying variance and a constant mean.
ModelSpec volatility_spec() {
    return ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Inverse, {1});
}

Coefficients volatility_truth() {
    Coefficients c;
    c.omega = vec({0.1, -0.02});
    c.A[1] = vec({0.0, 0.15});
    c.B[1] = vec({0.0, 0.9});
    return c;
}

std::vector<double> simulate(const ModelSpec& spec, const Coefficients& c, std::size_t n,
                             std::uint64_t seed) {
    RandomStream rng(seed);
    return simulate_series(spec, c, unconditional_mean_init(spec, c), n, rng).y;
}

// Simpson integration of the Student-t tail after substituting x = |t| + tan(u).
double t_tail_quadrature(double t, double nu) {
    const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) /
                     std::sqrt(nu * std::numbers::pi);
    auto pdf = [&](double x) { return c * std::pow(1 + x * x / nu, -(nu + 1) / 2); };
    const double a = std::abs(t);
    auto g = [&](double u) {
        if (u >= std::numbers::pi / 2) return 0.0;
        const double c2 = std::cos(u);
        return pdf(a + std::tan(u)) / (c2 * c2);
    };
    const int n = 200000;
    const double h = (std::numbers::pi / 2) / n;
    double sum = g(0.0) + g(std::numbers::pi / 2);
    for (int i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * g(i * h);
    return 2.0 * sum * h / 3.0;
}

}  // namespace

TEST(ThetaLayout, NamesAndOrder) {
    const ModelSpec spec(Family::TDistLocationScale, {1, 2}, {1}, Scaling::Identity, {0, 1});
    const ThetaLayout layout(spec);
    EXPECT_EQ(layout.names(),
              (std::vector<std::string>{"omega_1", "omega_2", "omega_3", "A_1_11", "A_1_22",
                                        "A_2_11", "A_2_22", "B_1_11", "B_1_22"}));
}

TEST(ThetaLayout, RoundTrip) {
    const ModelSpec spec = volatility_spec();
    const ThetaLayout layout(spec);
    const std::vector<double> theta = {0.1, -0.02, 0.15, 0.9};
    const Coefficients c = layout.to_coefficients(theta);
    EXPECT_EQ(c.omega(1), -0.02);
    EXPECT_EQ(c.A.at(1)(1), 0.15);
    EXPECT_EQ(c.A.at(1)(0), 0.0);
    EXPECT_EQ(c.B.at(1)(1), 0.9);
    EXPECT_EQ(layout.from_coefficients(c), theta);
    EXPECT_THROW(layout.to_coefficients(std::vector<double>{1.0}), InvalidModel);
}

TEST(Objective, StaticModelMatchesDirectSum) {
    const ModelSpec spec = ModelSpec::with_orders(Family::Gamma, 1, 1, Scaling::Identity);
    RandomStream rng(1);
    std::vector<double> y(100);
    for (auto& v : y) v = sample(spec.dist(), vec({2.0, 1.5}), rng);
    const std::vector<double> theta = {std::log(2.0), std::log(1.5), 0, 0, 0, 0};
    double expected = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) expected -= log_pdf(spec.dist(), vec({2.0, 1.5}), y[t]);
    EXPECT_NEAR(objective(spec, y, std::nullopt, theta), expected, 1e-10);
}

TEST(Objective, DivergenceIsInfiniteAndEvaluationIsDeterministic) {
    const ModelSpec spec = volatility_spec();
    const auto y = simulate(spec, volatility_truth(), 300, 2);
    const std::vector<double> explode = {0.0, 1.0, 50.0, 1e300};
    EXPECT_EQ(objective(spec, y, std::nullopt, explode), std::numeric_limits<double>::infinity());
    const std::vector<double> nonstationary = {0.0, 0.0, 0.1, 1.0};
    EXPECT_EQ(objective(spec, y, std::nullopt, nonstationary),
              std::numeric_limits<double>::infinity());
    const std::vector<double> theta = {0.1, -0.02, 0.15, 0.9};
    EXPECT_EQ(objective(spec, y, std::nullopt, theta), objective(spec, y, std::nullopt, theta));
}

TEST(Statistics, InformationCriteria) {
    EXPECT_DOUBLE_EQ(aic(-100.0, 7), 214.0);
    EXPECT_DOUBLE_EQ(bic(-100.0, 7, 276), 7 * std::log(276.0) + 200.0);
    EXPECT_NEAR(aic(50.0, 3) - aic(50.0, 2), 2.0, 1e-15);
}

TEST(Statistics, PValues) {
    EXPECT_NEAR(two_sided_p_value(1.2016, 7), 0.2686, 5e-5);
    EXPECT_NEAR(two_sided_p_value(6.4380, 7), 0.0004, 5e-5);
    EXPECT_EQ(two_sided_p_value(0.0, 7), 1.0);
    EXPECT_DOUBLE_EQ(two_sided_p_value(-2.0, 5), two_sided_p_value(2.0, 5));
    for (double t : {0.3, 1.2016, 2.5, 6.438}) {
        for (double nu : {3.0, 7.0, 30.0}) {
            EXPECT_NEAR(two_sided_p_value(t, nu), t_tail_quadrature(t, nu), 1e-9);
        }
    }
}

TEST(RandomStarts, DeterministicAndBounded) {
    const ModelSpec spec = volatility_spec();
    const auto a = random_starts(spec, 5, 9);
    const auto b = random_starts(spec, 5, 9);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), 5u);
    for (const auto& x : a) {
        ASSERT_EQ(x.size(), 4u);
        for (double v : x) {
            EXPECT_GE(v, -0.5);
            EXPECT_LT(v, 0.5);
        }
    }
    EXPECT_NE(random_starts(spec, 5, 10), a);
}

TEST(Fit, GradientVanishesAtEstimate) {
    const ModelSpec spec = volatility_spec();
    const auto y = simulate(spec, volatility_truth(), 1500, 3);
    FitOptions opts;
    opts.method = OptimizerMethod::QuasiNewton;
    opts.n_starts = 3;
    opts.tolerance = 1e-7;
    const FitResult r = fit(spec, y, opts);
    const LikelihoodObjective obj(spec, y);
    const optim::Objective f = [&](std::span<const double> t) { return obj(t); };
    const Eigen::VectorXd g = optim::numerical_gradient(f, r.theta_hat);
    EXPECT_LE(g.lpNorm<Eigen::Infinity>(), 1e-3);
    EXPECT_NEAR(r.loglik, -obj(r.theta_hat), 1e-9);
    EXPECT_EQ(r.n_params, 4u);
    EXPECT_EQ(r.n_obs, y.size());
    EXPECT_DOUBLE_EQ(r.aic, aic(r.loglik, 4));
    EXPECT_DOUBLE_EQ(r.bic, bic(r.loglik, 4, y.size()));
}

TEST(Fit, SimulateRecover) {
    const ModelSpec spec = volatility_spec();
    const Coefficients truth = volatility_truth();
    const auto y = simulate(spec, truth, 4000, 4);
    FitOptions opts;
    opts.n_starts = 3;
    opts.tolerance = 1e-9;
    const FitResult r = fit(spec, y, opts);
    const auto expected = ThetaLayout(spec).from_coefficients(truth);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        ASSERT_TRUE(std::isfinite(r.std_errors[i])) << r.names[i];
        EXPECT_NEAR(r.theta_hat[i], expected[i], 4 * r.std_errors[i]) << r.names[i];
        EXPECT_NEAR(r.t_stats[i], r.theta_hat[i] / r.std_errors[i], 1e-12);
    }
}

TEST(Fit, MoreStartsNeverWorse) {
    const ModelSpec spec = volatility_spec();
    const auto y = simulate(spec, volatility_truth(), 500, 5);
    FitOptions opts;
    opts.tolerance = 1e-8;
    double previous = -std::numeric_limits<double>::infinity();
    for (int n : {1, 3, 6}) {
        opts.n_starts = n;
        const FitResult r = fit(spec, y, opts);
        EXPECT_GE(r.loglik, previous - 1e-9);
        EXPECT_EQ(r.starts.size(), static_cast<std::size_t>(n));
        previous = r.loglik;
    }
}

TEST(Fit, BoxedEstimateRespectsBounds) {
    const ModelSpec spec = volatility_spec();
    const auto y = simulate(spec, volatility_truth(), 800, 6);
    FitOptions opts;
    opts.method = OptimizerMethod::InteriorPointBoxed;
    opts.lower = {-1.0, -1.0, 0.0, 0.0};
    opts.upper = {1.0, 1.0, 0.1, 0.99};  // A capped below its true value
    opts.n_starts = 2;
    const FitResult r = fit(spec, y, opts);
    for (std::size_t i = 0; i < r.theta_hat.size(); ++i) {
        EXPECT_GE(r.theta_hat[i], opts.lower[i]);
        EXPECT_LE(r.theta_hat[i], opts.upper[i]);
    }
    EXPECT_GT(r.theta_hat[2], 0.09);
}

TEST(Fit, BoxedGarchConfigurationRecoversSyntheticTruth) {
    // Identity links, inverse scaling, fixed [mean, var] presample row and the
    // published box and start; only the data are synthetic.
    const ModelSpec spec = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Inverse, {1},
                                                  LinkSet{Link::identity(), Link::identity()});
    Coefficients truth;
    truth.omega = vec({-0.006, 0.011});
    truth.A[1] = vec({0.0, 0.153});
    truth.B[1] = vec({0.0, 0.959});
    const auto y = simulate(spec, truth, 1974, 96);
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size() - 1);
    InitialParams init;
    init.values.resize(1, 2);
    init.values << mean, var;

    FitOptions opts;
    opts.method = OptimizerMethod::InteriorPointBoxed;
    opts.lower = {-1.0, 0.0, 0.0, 0.5};
    opts.upper = {1.0, 1.0, 0.5, 1.0};
    opts.initial_points = {{0.0, 0.5, 0.25, 0.75}};
    const FitResult r = fit(spec, y, opts, init);
    EXPECT_FALSE(r.stationary_init);
    const auto expected = ThetaLayout(spec).from_coefficients(truth);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        ASSERT_TRUE(std::isfinite(r.std_errors[i])) << r.names[i];
        EXPECT_NEAR(r.theta_hat[i], expected[i], 3 * r.std_errors[i]) << r.names[i];
        EXPECT_GE(r.theta_hat[i], opts.lower[i]);
        EXPECT_LE(r.theta_hat[i], opts.upper[i]);
    }
    // Agrees with an unconstrained quasi-Newton fit from the same start.
    opts.method = OptimizerMethod::QuasiNewton;
    const FitResult free = fit(spec, y, opts, init);
    EXPECT_NEAR(free.loglik, r.loglik, 1e-4);
}

TEST(Fit, ThreadCountDoesNotChangeResult) {
    const ModelSpec spec = volatility_spec();
    const auto y = simulate(spec, volatility_truth(), 400, 7);
    FitOptions opts;
    opts.n_starts = 4;
    opts.threads = 1;
    const FitResult a = fit(spec, y, opts);
    opts.threads = 4;
    const FitResult b = fit(spec, y, opts);
    EXPECT_EQ(a.theta_hat, b.theta_hat);
    EXPECT_EQ(a.loglik, b.loglik);
}

TEST(Fit, VerboseLogAndReport) {
    const ModelSpec spec = volatility_spec();
    const auto y = simulate(spec, volatility_truth(), 300, 8);
    std::ostringstream log;
    FitOptions opts;
    opts.n_starts = 2;
    opts.verbosity = 1;
    opts.log = &log;
    const FitResult r = fit(spec, y, opts);
    EXPECT_NE(log.str().find("Round 1 of 2 - Log-likelihood: "), std::string::npos);
    EXPECT_NE(log.str().find("Round 2 of 2 - "), std::string::npos);
    const std::string report = fit_stats(r);
    EXPECT_NE(report.find("Parameter      Estimate   Std.Error     t stat   p-value"),
              std::string::npos);
    for (const auto& name : r.names) EXPECT_NE(report.find(name), std::string::npos);
}

TEST(Fit, DivergentRandomStartsAreShrunkTowardZero) {
    // With T = 5000 these Uniform(-0.5, 0.5) starts overflow the variance recursion.
    const ModelSpec spec = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Identity);
    Coefficients truth;
    truth.omega = vec({0.02, 0.05});
    truth.A[1] = vec({0.05, 0.1});
    truth.B[1] = vec({0.8, 0.9});
    const auto y = simulate(spec, truth, 5000, 1000);
    FitOptions opts;
    opts.seed = 500;
    const auto raw = random_starts(spec, opts.n_starts, opts.seed);
    const LikelihoodObjective obj(spec, y);
    int divergent = 0;
    for (const auto& x : raw) divergent += std::isfinite(obj(x)) ? 0 : 1;
    ASSERT_GT(divergent, 0);

    const FitResult r = fit(spec, y, opts);
    for (std::size_t s = 0; s < r.starts.size(); ++s) {
        const StartLog& log = r.starts[s];
        EXPECT_TRUE(std::isfinite(obj(log.initial_point)));
        const double factor = std::ldexp(1.0, -log.shrink_steps);
        for (std::size_t i = 0; i < raw[s].size(); ++i) {
            EXPECT_EQ(log.initial_point[i], raw[s][i] * factor);
        }
    }
}

TEST(Fit, ErrorCases) {
    const ModelSpec spec = ModelSpec::with_orders(Family::Poisson, 1, 1, Scaling::Identity);
    EXPECT_THROW(fit(spec, std::vector<double>{}), EmptyInput);
    EXPECT_THROW(fit(spec, std::vector<double>{1.0, 2.5, 3.0}), DomainError);
    FitOptions opts;
    opts.initial_points = {{0.0, 50.0, 1e300}};
    std::vector<double> y(50, 2.0);
    y[10] = 7.0;
    EXPECT_THROW(fit(spec, y, opts), AllStartsFailed);
}
