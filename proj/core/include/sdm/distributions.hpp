#pragma once

#include "sdm/random.hpp"
#include "sdm/types.hpp"

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdm {

enum class Family {
    Beta,
    BetaLocationScale,
    Exponential,
    Gamma,
    LogitNormal,
    LogNormal,
    NegativeBinomial,
    Normal,
    Poisson,
    TDist,
    TDistLocationScale,
    Weibull,
};

inline constexpr std::array<Family, 12> kAllFamilies = {
    Family::Beta,        Family::BetaLocationScale, Family::Exponential,
    Family::Gamma,       Family::LogitNormal,       Family::LogNormal,
    Family::NegativeBinomial, Family::Normal,       Family::Poisson,
    Family::TDist,       Family::TDistLocationScale, Family::Weibull,
};

/// Score scaling exponent d in s = I^{-d} * score.
enum class Scaling {
    Identity,            // d = 0
    InverseSquareRoot,   // d = 1/2
    Inverse,             // d = 1
};

double scaling_exponent(Scaling d) noexcept;
/// Accepts 0, 0.5 and 1; throws InvalidModel otherwise.
Scaling scaling_from_exponent(double d);

/// Admissible set of one distribution parameter.
struct ParamDomain {
    enum class Kind { OpenReal, HalfLine, Interval };

    Kind kind = Kind::OpenReal;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    static ParamDomain real() { return {}; }
    static ParamDomain half_line(double a) { return {Kind::HalfLine, a}; }
    static ParamDomain interval(double a, double b) { return {Kind::Interval, a, b}; }

    /// Strict interior membership; boundaries are excluded.
    [[nodiscard]] bool contains(double x) const noexcept;
};

/// Link kinds mirror the three parameter domains; see parametrization.hpp.
struct Link;

/**
 * @brief Static description of a conditional density.
 *
 * Parameter order (also the order used by time-varying masks, links and
 * score vectors):
 *
 *   Beta                (alpha, beta)
 *   BetaLocationScale   (a, c, alpha, beta)      support (a, c)
 *   Exponential         (lambda)                 rate
 *   Gamma               (alpha, k)               shape, scale
 *   LogitNormal         (mu, sigma2)
 *   LogNormal           (mu, sigma2)
 *   NegativeBinomial    (r, p)
 *   Normal              (mu, sigma2)
 *   Poisson             (lambda)
 *   TDist               (nu)
 *   TDistLocationScale  (mu, sigma2, nu)
 *   Weibull             (lambda, k)              scale, shape
 */
struct DistributionSpec {
    Family family;
    std::string_view name;
    int num_params;
    std::vector<ParamDomain> param_domains;
    std::vector<std::string_view> param_names;
    std::vector<Scaling> supported_scalings;

    [[nodiscard]] bool supports(Scaling d) const noexcept;
    /// Identity / Log / Logit chosen from each parameter's domain.
    [[nodiscard]] std::vector<Link> default_links() const;
    [[nodiscard]] bool is_discrete() const noexcept;
};

const DistributionSpec& distribution_spec(Family family);

/// Canonical short name used by the CLI and model files, e.g. "tdist-ls".
std::string_view family_key(Family family) noexcept;
/// Parses canonical keys and the CamelCase names, case-insensitively.
std::optional<Family> parse_family(std::string_view text);

/// Throws DomainError unless params has the right length and every entry is interior.
void check_params(const DistributionSpec& dist, const Vec& params);
/// Throws DomainError if y is outside the support implied by params.
void check_observation(const DistributionSpec& dist, const Vec& params, double y);

/// ln p(y | params).
double log_pdf(const DistributionSpec& dist, const Vec& params, double y);

/// Analytic gradient of ln p(y | params) with respect to params.
Vec score(const DistributionSpec& dist, const Vec& params, double y);

/**
 * @brief Expected information E[score * score^T].
 *
 * Only defined for distributions that support the inverse scalings; throws
 * UnsupportedScaling for BetaLocationScale, NegativeBinomial and Weibull.
 */
Mat fisher_information(const DistributionSpec& dist, const Vec& params);

double sample(const DistributionSpec& dist, const Vec& params, RandomStream& rng);

/// Conditional mean and variance; variance is +inf where it does not exist.
struct Moments {
    double mean;
    double variance;
};
Moments moments(const DistributionSpec& dist, const Vec& params);

/**
 * @brief Maximum-likelihood fit of constant parameters to i.i.d. data.
 *
 * Closed form for Normal, LogNormal, LogitNormal, Exponential and Poisson;
 * otherwise a Nelder-Mead search in linked space started at moment estimates.
 * Throws DegenerateData when the data cannot identify a scale or shape.
 */
Vec static_mle(const DistributionSpec& dist, std::span<const double> data);

}  // namespace sdm
