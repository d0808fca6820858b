#pragma once

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

// Derivative-free and numerical-derivative minimizers used for likelihood
// maximization. Objectives may return +inf to reject a point; every method
// treats that as "worse than anything finite" and retreats.

namespace sdm::optim {

using Objective = std::function<double(std::span<const double>)>;

struct Options {
    /// Nelder-Mead: standard deviation of simplex values.
    /// L-BFGS: infinity norm of the gradient.
    /// Interior point: final barrier weight and gradient norm.
    double tolerance = 1e-6;
    int max_iterations = 20000;
    /// Writes one line per iteration to trace when >= 3.
    int verbosity = 0;
    std::ostream* trace = nullptr;
};

struct Result {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int function_calls = 0;
    bool converged = false;
    std::string algorithm;
    std::string convergence_measure;
};

/// Adaptive Nelder-Mead with an affine initial simplex; restarts at the best
/// vertex until a restart no longer improves the value.
Result nelder_mead(const Objective& f, std::span<const double> x0, const Options& options = {});

/// Limited-memory BFGS with central-difference gradients and a strong-Wolfe line search.
Result lbfgs(const Objective& f, std::span<const double> x0, const Options& options = {});

/**
 * @brief Primal log-barrier Newton method for box constraints lb < x < ub.
 *
 * Infinite bounds are allowed. x0 is nudged strictly inside the box. Hessians
 * are central-difference approximations, regularized until positive definite.
 */
Result interior_point_newton(const Objective& f, std::span<const double> x0,
                             std::span<const double> lower, std::span<const double> upper,
                             const Options& options = {});

/// Central differences with step 1e-7 * (1 + |x_i|).
Eigen::VectorXd numerical_gradient(const Objective& f, std::span<const double> x,
                                   int* function_calls = nullptr);

/// Central-difference Hessian with step 1e-4 * (1 + |x_i|).
Eigen::MatrixXd numerical_hessian(const Objective& f, std::span<const double> x,
                                  int* function_calls = nullptr);

}  // namespace sdm::optim
