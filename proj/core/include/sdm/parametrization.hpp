#pragma once

#include "sdm/distributions.hpp"
#include "sdm/types.hpp"

#include <vector>

namespace sdm {

/**
 * @brief Bijection between a parameter domain and the real line.
 *
 *   Identity   f~ = f
 *   Log(a)     f~ = ln(f - a)               f in (a, inf)
 *   Logit(a,b) f~ = ln((f - a) / (b - f))   f in (a, b)
 */
struct Link {
    enum class Kind { Identity, Log, Logit };

    Kind kind = Kind::Identity;
    double lower = 0.0;
    double upper = 1.0;

    static Link identity() { return {Kind::Identity, 0.0, 0.0}; }
    static Link log(double a = 0.0) { return {Kind::Log, a, 0.0}; }
    /// Throws InvalidModel unless a < b.
    static Link logit(double a, double b);

    [[nodiscard]] bool in_domain(double f) const noexcept;
    /// h(f); throws DomainError on or outside the domain boundary.
    [[nodiscard]] double apply(double f) const;
    /// h^{-1}(f~); total on the reals.
    [[nodiscard]] double inverse(double f_tilde) const noexcept;
    /// dh/df; throws DomainError on or outside the domain boundary.
    [[nodiscard]] double derivative(double f) const;

    friend bool operator==(const Link&, const Link&) = default;
};

using LinkSet = std::vector<Link>;

Vec link(const LinkSet& links, const Vec& f);
Vec unlink(const LinkSet& links, const Vec& f_tilde);
/// Diagonal of the link Jacobian.
Vec jacobian_link(const LinkSet& links, const Vec& f);

/// Lower-triangular J with J * J^T = I^{-1}.
Mat inverse_information_factor(const DistributionSpec& dist, const Vec& f);

/**
 * @brief Linked scaled score s~ for scaling d.
 *
 *   d = 0    s~ = hdot^{-1} * score
 *   d = 1/2  s~ = J * score
 *   d = 1    s~ = hdot * I^{-1} * score
 *
 * Throws UnsupportedScaling, SingularInformation when cond(I) > 1e12, and
 * FilterDivergence when any |hdot_i| exceeds 1e12 (f is pinned to a boundary).
 */
Vec scaled_score(const DistributionSpec& dist, const LinkSet& links, const Vec& f, double y,
                 Scaling d);

/// Throws InvalidModel if links.size() differs from the parameter count.
void check_links(const DistributionSpec& dist, const LinkSet& links);

}  // namespace sdm
