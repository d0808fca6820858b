// Acceptance runner: one PASS / FAIL / REPLACED line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run one; exit status 1 only on FAIL

#include "sdm/distributions.hpp"
#include "sdm/errors.hpp"
#include "sdm/estimation.hpp"
#include "sdm/forecasting.hpp"
#include "sdm/gas.hpp"
#include "sdm/optim.hpp"
#include "sdm/parametrization.hpp"
#include "support/test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace sdm;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Replaced };

struct Outcome {
    Status status;
    std::string detail;
};

const char* label(Status s) {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Fail: return "FAIL";
        case Status::Replaced: return "REPLACED";
    }
    return "?";
}

/// Accumulates named sub-checks; the criterion passes only if all do.
class Checklist {
public:
    void check(const std::string& name, bool ok, const std::string& detail = {}) {
        std::cout << "    [" << (ok ? "ok" : "FAILED") << "] " << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << '\n';
        failed_ += ok ? 0 : 1;
        total_ += 1;
    }

    [[nodiscard]] Outcome outcome() const {
        std::ostringstream msg;
        msg << total_ - failed_ << "/" << total_ << " checks passed";
        return {failed_ == 0 ? Status::Pass : Status::Fail, msg.str()};
    }

private:
    int failed_ = 0;
    int total_ = 0;
};

std::string fmt(double x, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::string near_detail(double value, double target, double tol) {
    return fmt(value, 10) + " vs " + fmt(target, 10) + " +/- " + fmt(tol);
}

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

/// First existing file among the candidate names in the data directory.
std::optional<fs::path> find_data(std::initializer_list<const char*> names) {
    for (const char* name : names) {
        const fs::path p = testing::data_dir() / name;
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

std::vector<double> read_column(const fs::path& p) {
    std::ifstream in(p);
    std::vector<double> y;
    std::string line;
    while (std::getline(in, line)) {
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            y.push_back(v);
        } catch (const std::exception&) {
            // header or blank line
        }
    }
    return y;
}

double fitted(const FitResult& r, const std::string& name) {
    const auto it = std::find(r.names.begin(), r.names.end(), name);
    return it == r.names.end() ? std::numeric_limits<double>::quiet_NaN()
                               : r.theta_hat[static_cast<std::size_t>(it - r.names.begin())];
}

// ---------------------------------------------------------------------------
// 1. CPI golden fit
// ---------------------------------------------------------------------------

Outcome criterion_1() {
    const auto path = find_data({"cpichg.csv", "cpi.csv"});
    if (!path) {
        return {Status::Replaced,
                "cpichg series not present in " + testing::data_dir().string() +
                    "; covered by criterion 5"};
    }
    const auto y = read_column(*path);
    const ModelSpec spec =
        ModelSpec::with_orders(Family::TDistLocationScale, 1, 1, Scaling::Identity, {0, 1});
    FitOptions opts;
    opts.n_starts = 3;
    const auto start = std::chrono::steady_clock::now();
    const FitResult r = fit(spec, y, opts);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Checklist c;
    c.check("n_obs = 276", y.size() == 276, std::to_string(y.size()));
    c.check("log-likelihood", within(r.loglik, -178.2065, 0.01), near_detail(r.loglik, -178.2065, 0.01));
    c.check("AIC", within(r.aic, 370.4130, 0.02), near_detail(r.aic, 370.4130, 0.02));
    c.check("BIC", within(r.bic, 395.7558, 0.02), near_detail(r.bic, 395.7558, 0.02));
    const double b11 = fitted(r, "B_1_11"), b22 = fitted(r, "B_1_22");
    c.check("B_1_11", within(b11, 0.9432, 0.02), near_detail(b11, 0.9432, 0.02));
    c.check("B_1_22", within(b22, 0.8556, 0.05), near_detail(b22, 0.8556, 0.05));
    c.check("runtime <= 60 s", seconds <= 60.0, fmt(seconds, 3) + " s");
    return c.outcome();
}

// ---------------------------------------------------------------------------
// 2. BG96 GARCH golden fit
// ---------------------------------------------------------------------------

Outcome criterion_2() {
    const auto path = find_data({"BG96.csv", "bg96.csv"});
    if (!path) {
        return {Status::Fail, "BG96 series not present in " + testing::data_dir().string() +
                                  " (set SDM_DATA_DIR or add tests/data/BG96.csv)"};
    }
    const auto y = read_column(*path);
    const ModelSpec spec = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Inverse, {1},
                                                  LinkSet{Link::identity(), Link::identity()});
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
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
    Checklist c;
    c.check("n_obs = 1974", y.size() == 1974, std::to_string(y.size()));
    c.check("log-likelihood", within(r.loglik, -1106.5984, 0.01),
            near_detail(r.loglik, -1106.5984, 0.01));
    const double a = fitted(r, "A_1_22"), b = fitted(r, "B_1_22");
    c.check("A_1_22", within(a, 0.1534, 0.005), near_detail(a, 0.1534, 0.005));
    c.check("B_1_22", within(b, 0.9593, 0.005), near_detail(b, 0.9593, 0.005));
    c.check("B_1 - A_1", within(b - a, 0.8059, 0.005), near_detail(b - a, 0.8059, 0.005));
    return c.outcome();
}

// ---------------------------------------------------------------------------
// 3. ANE golden fit
// ---------------------------------------------------------------------------

Outcome criterion_3() {
    const auto path = find_data({"ane_northeastern.csv", "ane.csv"});
    if (!path) {
        return {Status::Replaced,
                "ANE series not present in " + testing::data_dir().string() +
                    "; covered by criterion 5"};
    }
    auto y = read_column(*path);
    y.resize(std::min<std::size_t>(y.size(), 400));
    const ModelSpec spec(Family::LogNormal, {1, 2, 11, 12}, {1, 2, 11, 12}, Scaling::Identity, {0});
    const InitialParams init = dynamic_initial_params(y, spec, 12);
    const FitResult r = fit(spec, y, FitOptions{}, init);
    Checklist c;
    c.check("log-likelihood", within(r.loglik, -779.7883, 0.5), near_detail(r.loglik, -779.7883, 0.5));
    const std::vector<std::pair<std::string, double>> reported = {
        {"omega_1", 0.0135},  {"omega_2", -2.8408}, {"A_1_11", -0.0378},  {"A_2_11", 0.0047},
        {"A_11_11", -0.0178}, {"A_12_11", 0.0576},  {"B_1_11", -0.4784},  {"B_2_11", 0.4682},
        {"B_11_11", -0.3055}, {"B_12_11", 1.3088}};
    for (const auto& [name, value] : reported) {
        const double est = fitted(r, name);
        c.check("sign of " + name, std::signbit(est) == std::signbit(value),
                fmt(est, 4) + " vs " + fmt(value, 4));
    }
    return c.outcome();
}

// ---------------------------------------------------------------------------
// 4. Diagnostics arithmetic
// ---------------------------------------------------------------------------

Outcome criterion_4() {
    Checklist c;
    const double ll = -178.2065;
    c.check("AIC = 2k - 2LL", within(aic(ll, 7), 2 * 7 + 2 * 178.2065, 1e-6), fmt(aic(ll, 7), 10));
    c.check("BIC = k ln n - 2LL", within(bic(ll, 7, 276), 7 * std::log(276.0) + 356.413, 1e-6),
            fmt(bic(ll, 7, 276), 10));
    c.check("AIC reproduces 370.4130", within(aic(ll, 7), 370.4130, 1e-6));
    c.check("BIC reproduces 395.7558", within(bic(ll, 7, 276), 395.7558, 5e-5),
            fmt(bic(ll, 7, 276), 10));
    const double p1 = two_sided_p_value(1.2016, 7), p2 = two_sided_p_value(6.4380, 7);
    c.check("p(1.2016; 7) = 0.2686", within(p1, 0.2686, 0.0005), fmt(p1, 6));
    c.check("p(6.4380; 7) = 0.0004", within(p2, 0.0004, 0.0005), fmt(p2, 6));
    c.check("p(0; 7) = 1", two_sided_p_value(0.0, 7) == 1.0);
    return c.outcome();
}

// ---------------------------------------------------------------------------
// 5. Property suite
// ---------------------------------------------------------------------------

void check_scores(Checklist& c) {
    for (Family f : kAllFamilies) {
        const auto& dist = distribution_spec(f);
        RandomStream rng(20240601, static_cast<std::uint64_t>(f));
        double worst = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
            const Vec p = testing::random_interior_params(f, rng);
            const double y = testing::random_interior_observation(f, p, rng);
            const Vec analytic = score(dist, p, y);
            const Vec numeric = testing::finite_difference_score(dist, p, y);
            for (int i = 0; i < p.size(); ++i) {
                worst = std::max(worst, std::abs(analytic(i) - numeric(i)) /
                                            std::max(1.0, std::abs(numeric(i))));
            }
        }
        c.check("5a score vs finite differences: " + std::string(dist.name), worst <= 1e-5,
                "max rel err " + fmt(worst, 3));
    }
}

void check_fisher(Checklist& c) {
    const auto start = std::chrono::steady_clock::now();
    for (Family f : kAllFamilies) {
        const auto& dist = distribution_spec(f);
        if (!dist.supports(Scaling::Inverse)) continue;
        const Vec p = testing::reference_params(f);
        const int k = dist.num_params;
        const Mat info = fisher_information(dist, p);
        RandomStream rng(4242, static_cast<std::uint64_t>(f));
        constexpr int n = 1000000;
        Mat sum = Mat::Zero(k, k), sum_sq = Mat::Zero(k, k);
        for (int i = 0; i < n; ++i) {
            const double y = sample(dist, p, rng);
            Vec g;
            try {
                g = score(dist, p, y);
            } catch (const DomainError&) {
                continue;  // draw rounded onto the support boundary
            }
            const Mat outer = g * g.transpose();
            sum += outer;
            sum_sq += outer.cwiseProduct(outer);
        }
        const Mat mean = sum / n;
        const Mat se = ((sum_sq / n - mean.cwiseProduct(mean)) / n).cwiseSqrt();
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                worst = std::max(worst, std::abs(mean(i, j) - info(i, j)) / se(i, j));
            }
        }
        c.check("5b Fisher vs Monte Carlo: " + std::string(dist.name), worst <= 3.0,
                "max |diff|/SE " + fmt(worst, 3));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.check("5b total time <= 120 s", seconds <= 120.0, fmt(seconds, 3) + " s");
}

void check_links(Checklist& c) {
    RandomStream rng(7);
    double round_trip = 0.0, jacobian = 0.0;
    const std::vector<Link> links = {Link::identity(), Link::log(), Link::log(2.0),
                                     Link::logit(0.0, 1.0), Link::logit(-3.0, 5.0)};
    for (const Link& l : links) {
        for (int rep = 0; rep < 1000; ++rep) {
            const double u = rng.uniform();
            double f = 0.0;
            switch (l.kind) {
                case Link::Kind::Identity: f = 20 * (u - 0.5); break;
                case Link::Kind::Log: f = l.lower + std::exp(10 * (u - 0.5)); break;
                case Link::Kind::Logit: f = l.lower + (l.upper - l.lower) * (0.01 + 0.98 * u); break;
            }
            round_trip = std::max(round_trip, std::abs(l.inverse(l.apply(f)) - f) /
                                                  std::max(1.0, std::abs(f)));
            const double h = 1e-6 * std::max(1.0, std::abs(f - l.lower));
            const double step = l.kind == Link::Kind::Identity ? 1e-6 : std::min(h, 0.5 * (f - l.lower));
            const double fd = (l.apply(f + step) - l.apply(f - step)) / (2 * step);
            jacobian = std::max(jacobian, std::abs(fd - l.derivative(f)) /
                                              std::max(1.0, std::abs(l.derivative(f))));
        }
    }
    c.check("5c link round trips <= 1e-12", round_trip <= 1e-12, fmt(round_trip, 3));
    c.check("5c link Jacobians vs finite differences <= 1e-6", jacobian <= 1e-6, fmt(jacobian, 3));
}

std::vector<double> normal_series(std::size_t n, std::uint64_t seed, double scale) {
    RandomStream rng(seed);
    std::vector<double> y(n);
    for (auto& v : y) v = scale * rng.standard_normal();
    return y;
}

std::vector<double> garch_trace(const std::vector<double>& y, double a0, double a1, double b1,
                                double start) {
    std::vector<double> s(y.size());
    s[0] = start;
    for (std::size_t t = 1; t < y.size(); ++t) s[t] = a0 + a1 * y[t - 1] * y[t - 1] + b1 * s[t - 1];
    return s;
}

Coefficients volatility_coef(double omega, double a, double b) {
    Coefficients c;
    c.omega = vec({0.0, omega});
    c.A[1] = vec({0.0, a});
    c.B[1] = vec({0.0, b});
    return c;
}

void check_garch(Checklist& c) {
    const ModelSpec identity = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Inverse, {1},
                                                      LinkSet{Link::identity(), Link::identity()});
    const auto y = normal_series(200, 11, 0.8);
    const Coefficients coef = volatility_coef(0.05, 0.12, 0.93);
    const FilterResult r = filter(identity, coef, y, unconditional_mean_init(identity, coef));
    const auto reference = garch_trace(y, 0.05, 0.12, 0.93 - 0.12, 0.05 / (1 - 0.93));
    double worst = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        worst = std::max(worst, std::abs(r.f(static_cast<Eigen::Index>(t), 1) - reference[t]));
    }
    c.check("5d GARCH trace equivalence (identity links)", worst <= 1e-12, "max err " + fmt(worst, 3));

    // With the default log link no coefficient triple reproduces a GARCH trace.
    const ModelSpec logged = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Inverse, {1});
    const auto y2 = normal_series(200, 12, 0.8);
    const auto target = garch_trace(y2, 0.1, 0.1, 0.8, 1.0);
    InitialParams init;
    init.values.resize(1, 2);
    init.values << 0.0, 1.0;
    auto residual = [&](std::span<const double> th) {
        try {
            const FilterResult fr = filter(logged, volatility_coef(th[0], th[1], th[2]), y2, init);
            double ss = 0.0;
            for (std::size_t t = 0; t < y2.size(); ++t) {
                ss += std::pow(fr.f(static_cast<Eigen::Index>(t), 1) - target[t], 2);
            }
            return ss;
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_theta;
    for (double w = -0.5; w <= 0.5001; w += 0.05) {
        for (double a = 0.0; a <= 0.5001; a += 0.025) {
            for (double b = 0.0; b <= 0.99001; b += 0.03) {
                const std::vector<double> th = {w, a, b};
                const double v = residual(th);
                if (v < best) {
                    best = v;
                    best_theta = th;
                }
            }
        }
    }
    optim::Options o;
    o.tolerance = 1e-14;
    const double refined = optim::nelder_mead(residual, best_theta, o).value;
    c.check("5d log-link falsification", std::min(best, refined) > 1e-3,
            "best residual sum of squares " + fmt(std::min(best, refined), 4));
}

void check_half_scaling(Checklist& c) {
    RandomStream rng(17);
    double worst = 0.0;
    for (Family family : kAllFamilies) {
        const auto& dist = distribution_spec(family);
        if (!dist.supports(Scaling::InverseSquareRoot)) continue;
        for (int rep = 0; rep < 100; ++rep) {
            const Vec p = testing::random_interior_params(family, rng);
            const Mat info = fisher_information(dist, p);
            const bool diagonal = (info - Mat(info.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0;
            if (!diagonal) break;
            const double y = testing::random_interior_observation(family, p, rng);
            const Vec g = score(dist, p, y);
            const Vec linked = scaled_score(dist, dist.default_links(), p, y, Scaling::InverseSquareRoot);
            for (int i = 0; i < p.size(); ++i) {
                const double s = g(i) / std::sqrt(info(i, i));
                worst = std::max(worst, std::abs(linked(i) - s) / (1 + std::abs(s)));
            }
        }
    }
    c.check("5e d=1/2 diagonal identity", worst <= 1e-14, "max rel err " + fmt(worst, 3));
}

void check_recovery(Checklist& c) {
    const ModelSpec spec = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Identity);
    Coefficients truth;
    // A_mu large enough that the mean recursion is identified at T = 5000; a
    // near-flat omega/B ridge makes Wald intervals unreliable in finite samples.
    truth.omega = vec({0.05, 0.02});
    truth.A[1] = vec({0.2, 0.1});
    truth.B[1] = vec({0.5, 0.9});
    const auto expected = ThetaLayout(spec).from_coefficients(truth);
    int covered = 0;
    constexpr int reps = 10;
    for (int rep = 0; rep < reps; ++rep) {
        RandomStream rng(1000 + static_cast<std::uint64_t>(rep));
        const auto y = simulate_series(spec, truth, unconditional_mean_init(spec, truth), 5000, rng).y;
        FitOptions opts;
        opts.seed = 500 + static_cast<std::uint64_t>(rep);
        bool ok = false;
        try {
            const FitResult r = fit(spec, y, opts);
            ok = true;
            for (std::size_t i = 0; i < expected.size(); ++i) {
                ok = ok && std::isfinite(r.std_errors[i]) &&
                     std::abs(r.theta_hat[i] - expected[i]) <= 3 * r.std_errors[i];
            }
        } catch (const Error&) {
            ok = false;
        }
        covered += ok ? 1 : 0;
    }
    c.check("5f simulate-then-recover within 3 SE in >= 9 of 10", covered >= 9,
            std::to_string(covered) + "/10");
}

void check_forecast_threads(Checklist& c) {
    const ModelSpec spec = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Inverse, {1});
    const Coefficients coef = volatility_coef(-0.02, 0.15, 0.9);
    const InitialParams init = unconditional_mean_init(spec, coef);
    RandomStream rng(77);
    const auto y = simulate_series(spec, coef, init, 500, rng).y;
    ForecastOptions opts;
    opts.horizon = 24;
    opts.scenarios = 2000;
    opts.threads = 1;
    const Forecast a = forecast(y, spec, coef, init, opts);
    opts.threads = 8;
    const Forecast b = forecast(y, spec, coef, init, opts);
    c.check("5g forecast identical for 1 and 8 threads",
            a.observation_scenarios == b.observation_scenarios &&
                a.parameter_forecast == b.parameter_forecast && a.quantiles == b.quantiles);
}

void check_fixed_point(Checklist& c) {
    const ModelSpec spec = ModelSpec::with_orders(Family::Normal, 1, 1, Scaling::Identity);
    Coefficients coef;
    coef.omega = vec({0.3, -0.1});
    coef.A[1] = vec({0.0, 0.0});
    coef.B[1] = vec({0.7, 0.9});
    const auto y = normal_series(500, 16, 1.0);
    const FilterResult r = filter(spec, coef, y, unconditional_mean_init(spec, coef));
    double worst = 0.0;
    for (Eigen::Index t = 0; t < r.f.rows(); ++t) {
        worst = std::max({worst, std::abs(r.f_tilde(t, 0) - 1.0), std::abs(r.f_tilde(t, 1) + 1.0)});
    }
    c.check("5h unconditional-mean fixed point", worst <= 1e-12, "max drift " + fmt(worst, 3));
}

Outcome criterion_5() {
    Checklist c;
    check_scores(c);
    check_fisher(c);
    check_links(c);
    check_garch(c);
    check_half_scaling(c);
    check_recovery(c);
    check_forecast_threads(c);
    check_fixed_point(c);
    return c.outcome();
}

Outcome run_criterion(int n) {
    try {
        switch (n) {
            case 1: return criterion_1();
            case 2: return criterion_2();
            case 3: return criterion_3();
            case 4: return criterion_4();
            case 5: return criterion_5();
            default: return {Status::Fail, "unknown criterion"};
        }
    } catch (const std::exception& e) {
        return {Status::Fail, std::string("exception: ") + e.what()};
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which = {1, 2, 3, 4, 5};
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--criterion" && i + 1 < argc) {
            which = {std::atoi(argv[++i])};
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    bool any_fail = false;
    for (int n : which) {
        std::cout << "criterion " << n << ":\n";
        const Outcome o = run_criterion(n);
        std::cout << label(o.status) << " criterion " << n << " - " << o.detail << std::endl;
        any_fail = any_fail || o.status == Status::Fail;
    }
    return any_fail ? 1 : 0;
}
