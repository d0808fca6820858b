#include "sdm/distributions.hpp"

#include "sdm/errors.hpp"
#include "sdm/optim.hpp"
#include "sdm/parametrization.hpp"
#include "sdm/special_functions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace sdm {

namespace {

using special::digamma;
using special::log_beta;
using special::log_gamma;
using special::trigamma;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kIntegerTolerance = 1e-9;

double logit(double y) { return std::log(y / (1.0 - y)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Mat diagonal(std::initializer_list<double> entries) {
    const auto k = static_cast<int>(entries.size());
    Mat m = Mat::Zero(k, k);
    int i = 0;
    for (double e : entries) {
        m(i, i) = e;
        ++i;
    }
    return m;
}

// Moments of a Normal in the transformed space (used by LogitNormal, which has
// no closed-form mean): E[g(mu + sigma Z)] by composite Simpson on [-12, 12].
template <class G>
double normal_expectation(double mu, double sigma, G&& g) {
    constexpr int kIntervals = 4000;
    constexpr double kLo = -12.0;
    constexpr double kHi = 12.0;
    const double h = (kHi - kLo) / kIntervals;
    double acc = 0.0;
    for (int i = 0; i <= kIntervals; ++i) {
        const double z = kLo + h * i;
        const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * g(mu + sigma * z) * std::exp(-0.5 * z * z);
    }
    return acc * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
}

struct Summary {
    double mean = 0.0;
    double variance = 0.0;  // biased
    double min = 0.0;
    double max = 0.0;
};

template <class Transform>
Summary summarize(std::span<const double> data, Transform&& tr) {
    Summary s;
    s.min = kInf;
    s.max = -kInf;
    double sum = 0.0;
    for (double y : data) {
        const double v = tr(y);
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(data.size());
    double ss = 0.0;
    for (double y : data) {
        const double d = tr(y) - s.mean;
        ss += d * d;
    }
    s.variance = ss / static_cast<double>(data.size());
    return s;
}

Summary summarize(std::span<const double> data) {
    return summarize(data, [](double y) { return y; });
}

void require_spread(const Summary& s, std::string_view name) {
    if (!(s.max > s.min)) {
        throw DegenerateData(std::string(name) + ": data has zero variance");
    }
}

// Numerical static MLE in linked space, starting at `start` (natural space).
Vec numerical_mle(const DistributionSpec& dist, std::span<const double> data, const Vec& start) {
    const LinkSet links = dist.default_links();
    const Vec x0 = link(links, start);
    const auto n = static_cast<double>(data.size());
    optim::Objective objective = [&](std::span<const double> x) {
        Vec xt(static_cast<int>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
            xt(static_cast<int>(i)) = x[i];
        }
        const Vec params = unlink(links, xt);
        double total = 0.0;
        try {
            for (double y : data) {
                total -= log_pdf(dist, params, y);
            }
        } catch (const Error&) {
            return kInf;
        }
        return std::isfinite(total) ? total / n : kInf;
    };
    optim::Options opts;
    opts.tolerance = 1e-12;
    opts.max_iterations = 20000;
    const optim::Result res =
        optim::nelder_mead(objective, std::span<const double>(x0.data(), x0.size()), opts);
    if (!std::isfinite(res.value)) {
        throw DegenerateData(std::string(dist.name) + ": static MLE did not reach a finite likelihood");
    }
    Vec xt(static_cast<int>(res.x.size()));
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        xt(static_cast<int>(i)) = res.x[i];
    }
    return unlink(links, xt);
}

// ---------------------------------------------------------------------------
// Per-distribution formulas. Inputs are validated by the public entry points.
// ---------------------------------------------------------------------------

struct BetaDist {
    static double log_pdf(const Vec& p, double y) {
        const double a = p(0), b = p(1);
        return (a - 1.0) * std::log(y) + (b - 1.0) * std::log1p(-y) - log_beta(a, b);
    }
    static Vec score(const Vec& p, double y) {
        const double a = p(0), b = p(1);
        const double common = digamma(a + b);
        Vec g(2);
        g << std::log(y) + common - digamma(a), std::log1p(-y) + common - digamma(b);
        return g;
    }
    static Mat fisher(const Vec& p) {
        const double a = p(0), b = p(1);
        const double common = trigamma(a + b);
        Mat m(2, 2);
        m << trigamma(a) - common, -common, -common, trigamma(b) - common;
        return m;
    }
    static double sample(const Vec& p, RandomStream& rng) {
        const double x = rng.gamma(p(0), 1.0);
        const double z = rng.gamma(p(1), 1.0);
        return x / (x + z);
    }
    static Moments moments(const Vec& p) {
        const double a = p(0), b = p(1), s = a + b;
        return {a / s, a * b / (s * s * (s + 1.0))};
    }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        const Summary s = summarize(data);
        require_spread(s, dist.name);
        const double common = s.mean * (1.0 - s.mean) / s.variance - 1.0;
        Vec start(2);
        if (common > 0.0) {
            start << s.mean * common, (1.0 - s.mean) * common;
        } else {
            start << 1.0, 1.0;
        }
        return numerical_mle(dist, data, start);
    }
};

struct BetaLocationScaleDist {
    static double log_pdf(const Vec& p, double y) {
        const double a = p(0), c = p(1), al = p(2), be = p(3);
        return (al - 1.0) * std::log(y - a) + (be - 1.0) * std::log(c - y) -
               (al + be - 1.0) * std::log(c - a) - log_beta(al, be);
    }
    static Vec score(const Vec& p, double y) {
        const double a = p(0), c = p(1), al = p(2), be = p(3);
        const double range = c - a;
        const double common = digamma(al + be);
        Vec g(4);
        g << (1.0 - al) / (y - a) + (al + be - 1.0) / range,
            (be - 1.0) / (c - y) - (al + be - 1.0) / range,
            std::log(y - a) - std::log(range) + common - digamma(al),
            std::log(c - y) - std::log(range) + common - digamma(be);
        return g;
    }
    static double sample(const Vec& p, RandomStream& rng) {
        const double x = rng.gamma(p(2), 1.0);
        const double z = rng.gamma(p(3), 1.0);
        return p(0) + (p(1) - p(0)) * (x / (x + z));
    }
    static Moments moments(const Vec& p) {
        const double range = p(1) - p(0);
        const double al = p(2), be = p(3), s = al + be;
        return {p(0) + range * al / s, range * range * al * be / (s * s * (s + 1.0))};
    }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        const Summary s = summarize(data);
        require_spread(s, dist.name);
        const double span = s.max - s.min;
        // a = min - span * e^{u0}, c = max + span * e^{u1}; alpha, beta log-linked.
        auto unpack = [&](std::span<const double> u) {
            Vec p(4);
            p << s.min - span * std::exp(u[0]), s.max + span * std::exp(u[1]), std::exp(u[2]),
                std::exp(u[3]);
            return p;
        };
        const auto n = static_cast<double>(data.size());
        optim::Objective objective = [&](std::span<const double> u) {
            const Vec p = unpack(u);
            if (!(p(2) > 0.0 && p(3) > 0.0 && std::isfinite(p(0)) && std::isfinite(p(1)))) {
                return kInf;
            }
            double total = 0.0;
            for (double y : data) {
                total -= log_pdf(p, y);
            }
            return std::isfinite(total) ? total / n : kInf;
        };
        const double pad = std::log(0.05);
        const double a0 = s.min - 0.05 * span;
        const double c0 = s.max + 0.05 * span;
        const double m = (s.mean - a0) / (c0 - a0);
        const double v = s.variance / ((c0 - a0) * (c0 - a0));
        double common = m * (1.0 - m) / v - 1.0;
        if (!(common > 0.0)) {
            common = 2.0;
        }
        const std::vector<double> u0{pad, pad, std::log(m * common), std::log((1.0 - m) * common)};
        optim::Options opts;
        opts.tolerance = 1e-12;
        const optim::Result res = optim::nelder_mead(objective, u0, opts);
        if (!std::isfinite(res.value)) {
            throw DegenerateData("BetaLocationScale: static MLE did not reach a finite likelihood");
        }
        return unpack(res.x);
    }
};

struct ExponentialDist {
    static double log_pdf(const Vec& p, double y) { return std::log(p(0)) - p(0) * y; }
    static Vec score(const Vec& p, double y) {
        Vec g(1);
        g << 1.0 / p(0) - y;
        return g;
    }
    static Mat fisher(const Vec& p) { return diagonal({1.0 / (p(0) * p(0))}); }
    static double sample(const Vec& p, RandomStream& rng) { return rng.exponential(p(0)); }
    static Moments moments(const Vec& p) { return {1.0 / p(0), 1.0 / (p(0) * p(0))}; }
    static Vec mle(const DistributionSpec&, std::span<const double> data) {
        const Summary s = summarize(data);
        Vec p(1);
        p << 1.0 / s.mean;
        return p;
    }
};

struct GammaDist {
    static double log_pdf(const Vec& p, double y) {
        const double a = p(0), k = p(1);
        return (a - 1.0) * std::log(y) - y / k - log_gamma(a) - a * std::log(k);
    }
    static Vec score(const Vec& p, double y) {
        const double a = p(0), k = p(1);
        Vec g(2);
        g << std::log(y) - digamma(a) - std::log(k), y / (k * k) - a / k;
        return g;
    }
    static Mat fisher(const Vec& p) {
        const double a = p(0), k = p(1);
        Mat m(2, 2);
        m << trigamma(a), 1.0 / k, 1.0 / k, a / (k * k);
        return m;
    }
    static double sample(const Vec& p, RandomStream& rng) { return rng.gamma(p(0), p(1)); }
    static Moments moments(const Vec& p) { return {p(0) * p(1), p(0) * p(1) * p(1)}; }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        const Summary s = summarize(data);
        require_spread(s, dist.name);
        Vec start(2);
        start << s.mean * s.mean / s.variance, s.variance / s.mean;
        return numerical_mle(dist, data, start);
    }
};

// Normal-like families share their formulas in a transformed space z = g(y).
struct NormalDist {
    static double log_pdf(const Vec& p, double y) {
        const double d = y - p(0);
        return -0.5 * (kLog2Pi + std::log(p(1))) - d * d / (2.0 * p(1));
    }
    static Vec score(const Vec& p, double y) {
        const double d = y - p(0);
        const double s2 = p(1);
        Vec g(2);
        g << d / s2, -0.5 / s2 * (1.0 - d * d / s2);
        return g;
    }
    static Mat fisher(const Vec& p) { return diagonal({1.0 / p(1), 0.5 / (p(1) * p(1))}); }
    static double sample(const Vec& p, RandomStream& rng) {
        return p(0) + std::sqrt(p(1)) * rng.standard_normal();
    }
    static Moments moments(const Vec& p) { return {p(0), p(1)}; }
    template <class Transform>
    static Vec closed_form(const DistributionSpec& dist, std::span<const double> data,
                           Transform&& tr) {
        const Summary s = summarize(data, tr);
        require_spread(s, dist.name);
        Vec p(2);
        p << s.mean, s.variance;
        return p;
    }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        return closed_form(dist, data, [](double y) { return y; });
    }
};

struct LogNormalDist {
    static double log_pdf(const Vec& p, double y) {
        return NormalDist::log_pdf(p, std::log(y)) - std::log(y);
    }
    static Vec score(const Vec& p, double y) { return NormalDist::score(p, std::log(y)); }
    static Mat fisher(const Vec& p) { return NormalDist::fisher(p); }
    static double sample(const Vec& p, RandomStream& rng) {
        return std::exp(NormalDist::sample(p, rng));
    }
    static Moments moments(const Vec& p) {
        const double s2 = p(1);
        return {std::exp(p(0) + 0.5 * s2), std::expm1(s2) * std::exp(2.0 * p(0) + s2)};
    }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        return NormalDist::closed_form(dist, data, [](double y) { return std::log(y); });
    }
};

struct LogitNormalDist {
    static double log_pdf(const Vec& p, double y) {
        return NormalDist::log_pdf(p, logit(y)) - std::log(y) - std::log1p(-y);
    }
    static Vec score(const Vec& p, double y) { return NormalDist::score(p, logit(y)); }
    static Mat fisher(const Vec& p) { return NormalDist::fisher(p); }
    static double sample(const Vec& p, RandomStream& rng) {
        return sigmoid(NormalDist::sample(p, rng));
    }
    static Moments moments(const Vec& p) {
        const double sigma = std::sqrt(p(1));
        const double m1 = normal_expectation(p(0), sigma, sigmoid);
        const double m2 =
            normal_expectation(p(0), sigma, [](double x) { return sigmoid(x) * sigmoid(x); });
        return {m1, m2 - m1 * m1};
    }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        return NormalDist::closed_form(dist, data, logit);
    }
};

struct NegativeBinomialDist {
    static double log_pdf(const Vec& p, double y) {
        const double r = p(0), q = p(1);
        return log_gamma(y + r) - log_gamma(y + 1.0) - log_gamma(r) + r * std::log(q) +
               y * std::log1p(-q);
    }
    static Vec score(const Vec& p, double y) {
        const double r = p(0), q = p(1);
        Vec g(2);
        g << digamma(y + r) - digamma(r) + std::log(q), r / q - y / (1.0 - q);
        return g;
    }
    static double sample(const Vec& p, RandomStream& rng) {
        const double rate = rng.gamma(p(0), (1.0 - p(1)) / p(1));
        return rng.poisson(rate);
    }
    static Moments moments(const Vec& p) {
        const double r = p(0), q = p(1);
        return {r * (1.0 - q) / q, r * (1.0 - q) / (q * q)};
    }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        const Summary s = summarize(data);
        if (!(s.max > 0.0)) {
            throw DegenerateData("NegativeBinomial: all observations are zero");
        }
        Vec start(2);
        if (s.variance > s.mean * 1.01) {
            start << s.mean * s.mean / (s.variance - s.mean), s.mean / s.variance;
        } else {
            start << 100.0 * s.mean, 100.0 / 101.0;
        }
        return numerical_mle(dist, data, start);
    }
};

struct PoissonDist {
    static double log_pdf(const Vec& p, double y) {
        return -p(0) + y * std::log(p(0)) - log_gamma(y + 1.0);
    }
    static Vec score(const Vec& p, double y) {
        Vec g(1);
        g << (y - p(0)) / p(0);
        return g;
    }
    static Mat fisher(const Vec& p) { return diagonal({1.0 / p(0)}); }
    static double sample(const Vec& p, RandomStream& rng) { return rng.poisson(p(0)); }
    static Moments moments(const Vec& p) { return {p(0), p(0)}; }
    static Vec mle(const DistributionSpec&, std::span<const double> data) {
        const Summary s = summarize(data);
        if (!(s.mean > 0.0)) {
            throw DegenerateData("Poisson: all observations are zero");
        }
        Vec p(1);
        p << s.mean;
        return p;
    }
};

double t_dof_information(double nu) {
    return 0.25 * (trigamma(0.5 * nu) - trigamma(0.5 * (nu + 1.0))) -
           (nu + 5.0) / (2.0 * nu * (nu + 1.0) * (nu + 3.0));
}

Moments t_moments(double location, double scale2, double nu) {
    const double mean = nu > 1.0 ? location : std::numeric_limits<double>::quiet_NaN();
    double var = std::numeric_limits<double>::quiet_NaN();
    if (nu > 2.0) {
        var = scale2 * nu / (nu - 2.0);
    } else if (nu > 1.0) {
        var = kInf;
    }
    return {mean, var};
}

struct TDistLocationScaleDist {
    static double log_pdf(const Vec& p, double y) {
        const double mu = p(0), s2 = p(1), nu = p(2);
        const double d = y - mu;
        return -0.5 * std::log(nu * s2) - log_beta(0.5, 0.5 * nu) -
               0.5 * (nu + 1.0) * std::log1p(d * d / (s2 * nu));
    }
    static Vec score(const Vec& p, double y) {
        const double mu = p(0), s2 = p(1), nu = p(2);
        const double d = y - mu;
        const double d2 = d * d;
        Vec g(3);
        g << (nu + 1.0) * d / (d2 + s2 * nu),
            -nu * (s2 - d2) / (2.0 * s2 * (nu * s2 + d2)),
            0.5 * ((nu + 1.0) * d2 / (nu * d2 + s2 * nu * nu) - 1.0 / nu -
                   std::log1p(d2 / (s2 * nu))) +
                0.5 * (digamma(0.5 * (nu + 1.0)) - digamma(0.5 * nu));
        return g;
    }
    static Mat fisher(const Vec& p) {
        const double s2 = p(1), nu = p(2);
        Mat m = Mat::Zero(3, 3);
        m(0, 0) = (nu + 1.0) / ((nu + 3.0) * s2);
        m(1, 1) = nu / (2.0 * (nu + 3.0) * s2 * s2);
        m(1, 2) = m(2, 1) = -1.0 / ((nu + 1.0) * (nu + 3.0) * s2);
        m(2, 2) = t_dof_information(nu);
        return m;
    }
    static double sample(const Vec& p, RandomStream& rng) {
        return p(0) + std::sqrt(p(1)) * rng.student_t(p(2));
    }
    static Moments moments(const Vec& p) { return t_moments(p(0), p(1), p(2)); }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        const Summary s = summarize(data);
        require_spread(s, dist.name);
        Vec start(3);
        start << s.mean, 0.6 * s.variance, 5.0;
        return numerical_mle(dist, data, start);
    }
};

struct TDistDist {
    static Vec as_location_scale(const Vec& p) {
        Vec q(3);
        q << 0.0, 1.0, p(0);
        return q;
    }
    static double log_pdf(const Vec& p, double y) {
        return TDistLocationScaleDist::log_pdf(as_location_scale(p), y);
    }
    static Vec score(const Vec& p, double y) {
        Vec g(1);
        g << TDistLocationScaleDist::score(as_location_scale(p), y)(2);
        return g;
    }
    static Mat fisher(const Vec& p) { return diagonal({t_dof_information(p(0))}); }
    static double sample(const Vec& p, RandomStream& rng) { return rng.student_t(p(0)); }
    static Moments moments(const Vec& p) { return t_moments(0.0, 1.0, p(0)); }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        Vec start(1);
        start << 5.0;
        return numerical_mle(dist, data, start);
    }
};

struct WeibullDist {
    static double log_pdf(const Vec& p, double y) {
        const double lambda = p(0), k = p(1);
        const double ratio = y / lambda;
        return std::log(k) - std::log(lambda) + (k - 1.0) * std::log(ratio) - std::pow(ratio, k);
    }
    static Vec score(const Vec& p, double y) {
        const double lambda = p(0), k = p(1);
        const double ratio = y / lambda;
        const double rk = std::pow(ratio, k);
        Vec g(2);
        g << k / lambda * (rk - 1.0), 1.0 / k + std::log(ratio) * (1.0 - rk);
        return g;
    }
    static double sample(const Vec& p, RandomStream& rng) { return rng.weibull(p(1), p(0)); }
    static Moments moments(const Vec& p) {
        const double lambda = p(0), k = p(1);
        const double g1 = std::exp(log_gamma(1.0 + 1.0 / k));
        const double g2 = std::exp(log_gamma(1.0 + 2.0 / k));
        return {lambda * g1, lambda * lambda * (g2 - g1 * g1)};
    }
    static Vec mle(const DistributionSpec& dist, std::span<const double> data) {
        const Summary s = summarize(data);
        require_spread(s, dist.name);
        const double cv = std::sqrt(s.variance) / s.mean;
        Vec start(2);
        start << s.mean, std::clamp(1.2 / cv, 0.2, 50.0);
        return numerical_mle(dist, data, start);
    }
};

template <class Fn>
decltype(auto) dispatch(Family family, Fn&& fn) {
    switch (family) {
        case Family::Beta: return fn(BetaDist{});
        case Family::BetaLocationScale: return fn(BetaLocationScaleDist{});
        case Family::Exponential: return fn(ExponentialDist{});
        case Family::Gamma: return fn(GammaDist{});
        case Family::LogitNormal: return fn(LogitNormalDist{});
        case Family::LogNormal: return fn(LogNormalDist{});
        case Family::NegativeBinomial: return fn(NegativeBinomialDist{});
        case Family::Normal: return fn(NormalDist{});
        case Family::Poisson: return fn(PoissonDist{});
        case Family::TDist: return fn(TDistDist{});
        case Family::TDistLocationScale: return fn(TDistLocationScaleDist{});
        case Family::Weibull: return fn(WeibullDist{});
    }
    throw std::logic_error("unknown distribution family");
}

template <class D>
concept HasFisher = requires(const Vec& p) { D::fisher(p); };

const std::vector<Scaling> kAllScalings = {Scaling::Identity, Scaling::InverseSquareRoot,
                                           Scaling::Inverse};
const std::vector<Scaling> kIdentityOnly = {Scaling::Identity};

std::vector<DistributionSpec> build_specs() {
    const auto pos = ParamDomain::half_line(0.0);
    const auto real = ParamDomain::real();
    const auto unit = ParamDomain::interval(0.0, 1.0);
    return {
        {Family::Beta, "Beta", 2, {pos, pos}, {"alpha", "beta"}, kAllScalings},
        {Family::BetaLocationScale, "BetaLocationScale", 4, {real, real, pos, pos},
         {"a", "c", "alpha", "beta"}, kIdentityOnly},
        {Family::Exponential, "Exponential", 1, {pos}, {"lambda"}, kAllScalings},
        {Family::Gamma, "Gamma", 2, {pos, pos}, {"alpha", "k"}, kAllScalings},
        {Family::LogitNormal, "LogitNormal", 2, {real, pos}, {"mu", "sigma2"}, kAllScalings},
        {Family::LogNormal, "LogNormal", 2, {real, pos}, {"mu", "sigma2"}, kAllScalings},
        {Family::NegativeBinomial, "NegativeBinomial", 2, {pos, unit}, {"r", "p"}, kIdentityOnly},
        {Family::Normal, "Normal", 2, {real, pos}, {"mu", "sigma2"}, kAllScalings},
        {Family::Poisson, "Poisson", 1, {pos}, {"lambda"}, kAllScalings},
        {Family::TDist, "TDist", 1, {pos}, {"nu"}, kAllScalings},
        {Family::TDistLocationScale, "TDistLocationScale", 3, {real, pos, pos},
         {"mu", "sigma2", "nu"}, kAllScalings},
        {Family::Weibull, "Weibull", 2, {pos, pos}, {"lambda", "k"}, kIdentityOnly},
    };
}

std::string format_vec(const Vec& v) {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < v.size(); ++i) {
        os << (i ? ", " : "") << v(i);
    }
    os << ')';
    return os.str();
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

double scaling_exponent(Scaling d) noexcept {
    switch (d) {
        case Scaling::Identity: return 0.0;
        case Scaling::InverseSquareRoot: return 0.5;
        case Scaling::Inverse: return 1.0;
    }
    return 0.0;
}

Scaling scaling_from_exponent(double d) {
    if (d == 0.0) return Scaling::Identity;
    if (d == 0.5) return Scaling::InverseSquareRoot;
    if (d == 1.0) return Scaling::Inverse;
    throw InvalidModel("scaling must be 0, 0.5 or 1");
}

bool ParamDomain::contains(double x) const noexcept {
    if (!std::isfinite(x)) {
        return false;
    }
    switch (kind) {
        case Kind::OpenReal: return true;
        case Kind::HalfLine: return x > lower;
        case Kind::Interval: return x > lower && x < upper;
    }
    return false;
}

bool DistributionSpec::supports(Scaling d) const noexcept {
    return std::find(supported_scalings.begin(), supported_scalings.end(), d) !=
           supported_scalings.end();
}

std::vector<Link> DistributionSpec::default_links() const {
    std::vector<Link> links;
    links.reserve(param_domains.size());
    for (const auto& dom : param_domains) {
        switch (dom.kind) {
            case ParamDomain::Kind::OpenReal: links.push_back(Link::identity()); break;
            case ParamDomain::Kind::HalfLine: links.push_back(Link::log(dom.lower)); break;
            case ParamDomain::Kind::Interval:
                links.push_back(Link::logit(dom.lower, dom.upper));
                break;
        }
    }
    return links;
}

bool DistributionSpec::is_discrete() const noexcept {
    return family == Family::Poisson || family == Family::NegativeBinomial;
}

const DistributionSpec& distribution_spec(Family family) {
    static const std::vector<DistributionSpec> specs = build_specs();
    return specs.at(static_cast<std::size_t>(family));
}

std::string_view family_key(Family family) noexcept {
    switch (family) {
        case Family::Beta: return "beta";
        case Family::BetaLocationScale: return "beta-ls";
        case Family::Exponential: return "exponential";
        case Family::Gamma: return "gamma";
        case Family::LogitNormal: return "logit-normal";
        case Family::LogNormal: return "lognormal";
        case Family::NegativeBinomial: return "negbin";
        case Family::Normal: return "normal";
        case Family::Poisson: return "poisson";
        case Family::TDist: return "tdist";
        case Family::TDistLocationScale: return "tdist-ls";
        case Family::Weibull: return "weibull";
    }
    return "";
}

std::optional<Family> parse_family(std::string_view text) {
    const std::string key = lower(text);
    for (Family f : kAllFamilies) {
        if (key == family_key(f) || key == lower(distribution_spec(f).name)) {
            return f;
        }
    }
    if (key == "negative-binomial") return Family::NegativeBinomial;
    if (key == "t" || key == "student-t") return Family::TDist;
    return std::nullopt;
}

void check_params(const DistributionSpec& dist, const Vec& params) {
    if (params.size() != dist.num_params) {
        throw DomainError(std::string(dist.name) + ": expected " +
                          std::to_string(dist.num_params) + " parameters, got " +
                          std::to_string(params.size()));
    }
    for (int i = 0; i < dist.num_params; ++i) {
        if (!dist.param_domains[static_cast<std::size_t>(i)].contains(params(i))) {
            throw DomainError(std::string(dist.name) + ": parameter " +
                              std::string(dist.param_names[static_cast<std::size_t>(i)]) +
                              " out of domain in " + format_vec(params));
        }
    }
    if (dist.family == Family::BetaLocationScale && !(params(0) < params(1))) {
        throw DomainError("BetaLocationScale: requires a < c, got " + format_vec(params));
    }
}

void check_observation(const DistributionSpec& dist, const Vec& params, double y) {
    auto fail = [&](const char* what) {
        std::ostringstream os;
        os << dist.name << ": observation " << y << ' ' << what;
        throw DomainError(os.str());
    };
    if (!std::isfinite(y)) {
        fail("is not finite");
    }
    switch (dist.family) {
        case Family::Beta:
        case Family::LogitNormal:
            if (!(y > 0.0 && y < 1.0)) fail("outside (0, 1)");
            break;
        case Family::BetaLocationScale:
            if (!(y > params(0) && y < params(1))) fail("outside (a, c)");
            break;
        case Family::Exponential:
        case Family::Gamma:
        case Family::LogNormal:
        case Family::Weibull:
            if (!(y > 0.0)) fail("is not positive");
            break;
        case Family::Poisson:
        case Family::NegativeBinomial:
            if (y < 0.0 || std::abs(y - std::round(y)) > kIntegerTolerance) {
                fail("is not a nonnegative integer");
            }
            break;
        case Family::Normal:
        case Family::TDist:
        case Family::TDistLocationScale: break;
    }
}

namespace {

double checked_value(const DistributionSpec& dist, const Vec& params, double y) {
    check_params(dist, params);
    check_observation(dist, params, y);
    return dist.is_discrete() ? std::round(y) : y;
}

}  // namespace

double log_pdf(const DistributionSpec& dist, const Vec& params, double y) {
    const double v = checked_value(dist, params, y);
    return dispatch(dist.family, [&](auto d) { return decltype(d)::log_pdf(params, v); });
}

Vec score(const DistributionSpec& dist, const Vec& params, double y) {
    const double v = checked_value(dist, params, y);
    return dispatch(dist.family, [&](auto d) { return decltype(d)::score(params, v); });
}

Mat fisher_information(const DistributionSpec& dist, const Vec& params) {
    if (!dist.supports(Scaling::Inverse)) {
        throw UnsupportedScaling(std::string(dist.name) +
                                 ": Fisher information is only available for distributions "
                                 "supporting inverse scalings");
    }
    check_params(dist, params);
    return dispatch(dist.family, [&](auto d) -> Mat {
        using D = decltype(d);
        if constexpr (HasFisher<D>) {
            return D::fisher(params);
        } else {
            throw std::logic_error("missing Fisher information");
        }
    });
}

double sample(const DistributionSpec& dist, const Vec& params, RandomStream& rng) {
    check_params(dist, params);
    return dispatch(dist.family, [&](auto d) { return decltype(d)::sample(params, rng); });
}

Moments moments(const DistributionSpec& dist, const Vec& params) {
    check_params(dist, params);
    return dispatch(dist.family, [&](auto d) { return decltype(d)::moments(params); });
}

Vec static_mle(const DistributionSpec& dist, std::span<const double> data) {
    if (data.empty()) {
        throw EmptyInput(std::string(dist.name) + ": static MLE needs at least one observation");
    }
    // Support checks that do not depend on the parameters.
    Vec probe(dist.num_params);
    for (int i = 0; i < dist.num_params; ++i) {
        const auto& dom = dist.param_domains[static_cast<std::size_t>(i)];
        probe(i) = dom.kind == ParamDomain::Kind::Interval ? 0.5 * (dom.lower + dom.upper)
                   : dom.kind == ParamDomain::Kind::HalfLine ? dom.lower + 1.0
                                                             : 0.0;
    }
    if (dist.family == Family::BetaLocationScale) {
        probe(0) = -kInf;
        probe(1) = kInf;
    }
    for (double y : data) {
        check_observation(dist, probe, y);
    }
    return dispatch(dist.family, [&](auto d) { return decltype(d)::mle(dist, data); });
}

}  // namespace sdm
