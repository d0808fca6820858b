#pragma once

#include "sdm/gas.hpp"
#include "sdm/optim.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdm {

/**
 * @brief Flat ordering of the unknown hyperparameters.
 *
 * omega for every parameter first, then A diagonals by ascending lag, then B
 * diagonals by ascending lag; A and B only carry time-varying indices.
 * Names follow "omega_i", "A_lag_ii", "B_lag_ii" with one-based indices.
 */
class ThetaLayout {
public:
    explicit ThetaLayout(const ModelSpec& spec);

    struct Entry {
        enum class Block { Omega, A, B };
        Block block;
        int lag;    // 0 for omega
        int param;  // zero-based parameter index
    };

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::vector<std::string> names() const;

    [[nodiscard]] Coefficients to_coefficients(std::span<const double> theta) const;
    [[nodiscard]] std::vector<double> from_coefficients(const Coefficients& coef) const;

private:
    ModelSpec spec_;
    std::vector<Entry> entries_;
};

enum class OptimizerMethod { SimplexSearch, QuasiNewton, InteriorPointBoxed };

struct FitOptions {
    OptimizerMethod method = OptimizerMethod::SimplexSearch;
    int n_starts = 3;
    /// Explicit starting points; replaces the random starts when non-empty.
    /// Random starts with a non-finite objective are halved toward zero until
    /// finite; explicit points are used as given.
    std::vector<std::vector<double>> initial_points;
    /// Box bounds in theta space; only used by InteriorPointBoxed.
    std::vector<double> lower;
    std::vector<double> upper;
    double tolerance = 1e-6;
    int max_iterations = 20000;
    std::uint64_t seed = 123;
    /// 0 silent, 1 per-start log-likelihood, 2 adds the best-start summary,
    /// 3 adds per-iteration objective values.
    int verbosity = 0;
    std::ostream* log = nullptr;
    /// Worker threads for independent starts; 0 reads SDM_THREADS or uses hardware parallelism.
    unsigned threads = 0;
};

struct StartLog {
    /// Point the optimizer started from, after any shrinking.
    std::vector<double> initial_point;
    /// Halvings toward the origin applied to a random start with a non-finite objective.
    int shrink_steps = 0;
    std::vector<double> theta;
    double loglik = 0.0;
    int iterations = 0;
    int function_calls = 0;
    bool converged = false;
    bool failed = false;
    std::string message;
};

struct FitResult {
    ModelSpec spec;
    std::vector<double> theta_hat;
    std::vector<std::string> names;
    Coefficients coefficients;
    InitialParams initial_params;
    /// True when initial_params were derived from theta_hat (unconditional mean).
    bool stationary_init = true;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    /// NaN when the Hessian at theta_hat is singular or indefinite.
    std::vector<double> std_errors{};
    std::vector<double> t_stats{};
    std::vector<double> p_values{};
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
    std::vector<StartLog> starts{};
    std::size_t best_start = 0;
    std::string algorithm{};
    int iterations = 0;
    int function_calls = 0;
    std::string convergence_measure{};
    bool converged = false;
};

/**
 * @brief Negative log-likelihood of theta for fixed data.
 *
 * Without explicit initial params the presample is seeded at each candidate's
 * unconditional mean. Any recursion failure evaluates to +inf.
 */
class LikelihoodObjective {
public:
    LikelihoodObjective(ModelSpec spec, std::vector<double> y,
                        std::optional<InitialParams> init = std::nullopt);

    double operator()(std::span<const double> theta) const;

    [[nodiscard]] const ThetaLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const ModelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] InitialParams initial_params_for(std::span<const double> theta) const;

private:
    ModelSpec spec_;
    std::vector<double> y_;
    std::optional<InitialParams> init_;
    ThetaLayout layout_;
};

double objective(const ModelSpec& spec, std::span<const double> y,
                 const std::optional<InitialParams>& init, std::span<const double> theta);

/// Each unknown drawn i.i.d. Uniform(-0.5, 0.5); deterministic in seed.
std::vector<std::vector<double>> random_starts(const ModelSpec& spec, int n, std::uint64_t seed);

/// Throws AllStartsFailed if no start reaches a finite objective.
FitResult fit(const ModelSpec& spec, std::span<const double> y, const FitOptions& options = {},
              const std::optional<InitialParams>& init = std::nullopt);

/// Two-sided Student-t tail probability with the given degrees of freedom.
double two_sided_p_value(double t_stat, double dof);

double aic(double loglik, std::size_t n_params);
double bic(double loglik, std::size_t n_params, std::size_t n_obs);

/// Fills std_errors, t_stats and p_values from the Hessian of obj at theta_hat.
void compute_standard_errors(FitResult& result, const optim::Objective& obj);

/// Dashed fit report: header block followed by the parameter table.
std::string fit_stats(const FitResult& result);

}  // namespace sdm
