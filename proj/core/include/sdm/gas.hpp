#pragma once

#include "sdm/distributions.hpp"
#include "sdm/parametrization.hpp"
#include "sdm/random.hpp"
#include "sdm/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace sdm {

/// Sorted, duplicate-free set of positive lags.
using LagSet = std::vector<int>;

/// {1, ..., p}.
LagSet lags_up_to(int p);

/**
 * @brief Definition of a GAS model.
 *
 * The recursion in linked space is
 *
 *   f~_{t+1} = omega + sum_i A_i s~_{t-i+1} + sum_j B_j f~_{t-j+1}
 *
 * with diagonal A_i (i in score_lags) and B_j (j in ar_lags). Parameters not
 * listed in time_varying stay at their omega entry.
 */
class ModelSpec {
public:
    /// time_varying holds zero-based parameter indices; empty means all.
    /// links defaults to the distribution's domain-derived links.
    ModelSpec(Family family, LagSet score_lags, LagSet ar_lags, Scaling scaling,
              std::vector<int> time_varying = {}, std::optional<LinkSet> links = std::nullopt);

    /// GAS(p, q): every lag from 1 to p and from 1 to q.
    static ModelSpec with_orders(Family family, int p, int q, Scaling scaling,
                                 std::vector<int> time_varying = {},
                                 std::optional<LinkSet> links = std::nullopt);

    [[nodiscard]] const DistributionSpec& dist() const noexcept { return *dist_; }
    [[nodiscard]] Family family() const noexcept { return dist_->family; }
    [[nodiscard]] int num_params() const noexcept { return dist_->num_params; }
    [[nodiscard]] const LagSet& score_lags() const noexcept { return score_lags_; }
    [[nodiscard]] const LagSet& ar_lags() const noexcept { return ar_lags_; }
    [[nodiscard]] Scaling scaling() const noexcept { return scaling_; }
    [[nodiscard]] const std::vector<int>& time_varying() const noexcept { return time_varying_; }
    [[nodiscard]] const LinkSet& links() const noexcept { return links_; }
    [[nodiscard]] bool is_time_varying(int param) const noexcept;
    /// Largest lag m; the first m periods are presample.
    [[nodiscard]] int max_lag() const noexcept;

    friend bool operator==(const ModelSpec& a, const ModelSpec& b);

private:
    const DistributionSpec* dist_;
    LagSet score_lags_;
    LagSet ar_lags_;
    Scaling scaling_;
    std::vector<int> time_varying_;
    LinkSet links_;
};

/**
 * @brief omega plus the diagonals of A_i and B_j keyed by lag.
 *
 * Entries still to be estimated are NaN; rows of constant parameters are
 * structurally zero.
 */
struct Coefficients {
    Vec omega;
    std::map<int, Vec> A;
    std::map<int, Vec> B;

    /// NaN for every unknown, zero for structural zeros.
    static Coefficients unset(const ModelSpec& spec);
    [[nodiscard]] bool has_unset() const;
    /// Throws InvalidModel on shape mismatch or non-zero entries of constant parameters.
    void validate(const ModelSpec& spec) const;

    friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

/**
 * @brief Natural-space parameter rows seeding the presample periods.
 *
 * Period t (zero-based, t < max_lag) uses row t mod rows(), so a single row
 * seeds every presample period and seasonal rows are consumed by phase.
 */
struct InitialParams {
    RowMatrix values;

    [[nodiscard]] Eigen::Index rows() const noexcept { return values.rows(); }
    [[nodiscard]] Vec row(Eigen::Index t) const;
};

struct FilterResult {
    RowMatrix f;
    RowMatrix f_tilde;
    RowMatrix s_tilde;
    Eigen::VectorXd loglik_contributions;
    /// Sum of contributions after the presample periods.
    double total_loglik = 0.0;
    /// Number of leading presample periods excluded from total_loglik.
    int presample = 0;
    /// One-step-ahead linked parameters f~_{T+1}.
    Vec next_f_tilde;
};

/**
 * @brief One step of the linked recursion.
 *
 * The histories are ordered oldest first; the last element is period t.
 * Score lags reaching before the start of s_tilde_history contribute zero;
 * f_tilde_history must cover every autoregressive lag.
 */
Vec update_step(const ModelSpec& spec, const Coefficients& coef,
                std::span<const Vec> f_tilde_history, std::span<const Vec> s_tilde_history);

/// Throws DomainError if any observation lies outside the distribution's support.
/// BetaLocationScale only requires finite values; its support moves with (a, c).
void validate_series(const DistributionSpec& dist, std::span<const double> y);

/**
 * @brief Runs the recursion over y and evaluates the log-likelihood.
 *
 * Throws DomainError if an observation is outside the support, and
 * FilterDivergence if the recursion produces a non-finite or out-of-domain
 * parameter.
 */
FilterResult filter(const ModelSpec& spec, const Coefficients& coef, std::span<const double> y,
                    const InitialParams& init);

/// Every presample row set to unlink(omega (I - sum B_j)^{-1}).
InitialParams unconditional_mean_init(const ModelSpec& spec, const Coefficients& coef);

/// Row r is the static MLE of the subseries y_r, y_{r+period}, ...
InitialParams dynamic_initial_params(std::span<const double> y, const ModelSpec& spec, int period);

struct Simulation {
    std::vector<double> y;
    FilterResult filtered;
};

Simulation simulate_series(const ModelSpec& spec, const Coefficients& coef,
                           const InitialParams& init, std::size_t length, RandomStream& rng);

}  // namespace sdm
