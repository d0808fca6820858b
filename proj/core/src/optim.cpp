#include "sdm/optim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace sdm::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::span<const double> view(const VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd to_eigen(std::span<const double> x) {
    VectorXd v(static_cast<Eigen::Index>(x.size()));
    std::copy(x.begin(), x.end(), v.data());
    return v;
}

std::string describe(const char* what, double value) {
    std::ostringstream os;
    os.precision(3);
    os << what << " = " << std::scientific << value;
    return os.str();
}

// Counts calls and maps NaN to +inf so comparisons stay total.
class Counted {
public:
    explicit Counted(const Objective& f) : f_(f) {}
    double operator()(std::span<const double> x) {
        ++calls;
        const double v = f_(x);
        return std::isnan(v) ? kInf : v;
    }
    double operator()(const VectorXd& x) { return (*this)(view(x)); }
    int calls = 0;

private:
    const Objective& f_;
};

void trace_line(const Options& opts, const char* algo, int iter, double value) {
    if (opts.verbosity >= 3 && opts.trace != nullptr) {
        *opts.trace << algo << " iter " << iter << "  f = " << value << '\n';
    }
}

// Central-difference gradient with per-coordinate steps; falls back to a
// one-sided difference when one neighbour is rejected.
VectorXd gradient_with_steps(Counted& f, const VectorXd& x, double fx, const VectorXd& steps) {
    const auto n = x.size();
    VectorXd g(n);
    VectorXd xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = steps(i);
        xp(i) = x(i) + h;
        const double fp = f(xp);
        xp(i) = x(i) - h;
        const double fm = f(xp);
        xp(i) = x(i);
        if (std::isfinite(fp) && std::isfinite(fm)) {
            g(i) = (fp - fm) / (2.0 * h);
        } else if (std::isfinite(fp) && std::isfinite(fx)) {
            g(i) = (fp - fx) / h;
        } else if (std::isfinite(fm) && std::isfinite(fx)) {
            g(i) = (fx - fm) / h;
        } else {
            g(i) = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return g;
}

MatrixXd hessian_with_steps(Counted& f, const VectorXd& x, double fx, const VectorXd& steps) {
    const auto n = x.size();
    MatrixXd H(n, n);
    VectorXd xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = steps(i);
        xp(i) = x(i) + hi;
        const double fp = f(xp);
        xp(i) = x(i) - hi;
        const double fm = f(xp);
        xp(i) = x(i);
        H(i, i) = (fp - 2.0 * fx + fm) / (hi * hi);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double hj = steps(j);
            auto eval = [&](double si, double sj) {
                xp(i) = x(i) + si * hi;
                xp(j) = x(j) + sj * hj;
                const double v = f(xp);
                xp(i) = x(i);
                xp(j) = x(j);
                return v;
            };
            const double v = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * hi * hj);
            H(i, j) = v;
            H(j, i) = v;
        }
    }
    return H;
}

VectorXd relative_steps(const VectorXd& x, double scale) {
    return (scale * (1.0 + x.array().abs())).matrix();
}

// ---------------------------------------------------------------------------
// Nelder-Mead
// ---------------------------------------------------------------------------

struct SimplexRun {
    VectorXd best;
    double value;
    int iterations;
    bool converged;
    double spread;
};

SimplexRun simplex_search(Counted& f, const VectorXd& x0, const Options& opts, int max_iterations,
                          int iteration_offset) {
    const auto n = x0.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 1.0 / (2.0 * dn);
    const double delta = 1.0 - 1.0 / dn;

    std::vector<VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> vals(static_cast<std::size_t>(n + 1));
    for (Eigen::Index j = 0; j < n; ++j) {
        auto& p = pts[static_cast<std::size_t>(j + 1)];
        p(j) = 1.5 * p(j) + 0.025;
    }
    for (std::size_t j = 0; j < pts.size(); ++j) {
        vals[j] = f(pts[j]);
    }

    std::vector<std::size_t> order(pts.size());
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    };
    auto spread = [&] {
        const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
        double ss = 0.0;
        for (double v : vals) {
            ss += (v - mean) * (v - mean);
        }
        return std::sqrt(ss / vals.size());
    };

    int iter = 0;
    bool converged = false;
    double sd = spread();
    sort_simplex();
    if (!std::isfinite(vals[order[0]])) {
        return {pts[order[0]], vals[order[0]], 0, false, kInf};
    }
    while (iter < max_iterations) {
        sd = spread();
        if (sd <= opts.tolerance) {
            converged = true;
            break;
        }
        ++iter;
        const std::size_t worst = order[static_cast<std::size_t>(n)];
        const std::size_t second = order[static_cast<std::size_t>(n - 1)];
        const std::size_t best = order[0];
        VectorXd centroid = VectorXd::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            centroid += pts[order[static_cast<std::size_t>(j)]];
        }
        centroid /= dn;

        const VectorXd xr = centroid + alpha * (centroid - pts[worst]);
        const double fr = f(xr);
        bool shrink = false;
        if (fr < vals[best]) {
            const VectorXd xe = centroid + beta * (xr - centroid);
            const double fe = f(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
        } else if (fr < vals[worst]) {
            const VectorXd xc = centroid + gamma * (xr - centroid);
            const double fc = f(xc);
            if (fc <= fr) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                shrink = true;
            }
        } else {
            const VectorXd xc = centroid + gamma * (pts[worst] - centroid);
            const double fc = f(xc);
            if (fc < vals[worst]) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t j = 1; j < order.size(); ++j) {
                auto& p = pts[order[j]];
                p = pts[best] + delta * (p - pts[best]);
                vals[order[j]] = f(p);
            }
        }
        sort_simplex();
        trace_line(opts, "nelder-mead", iteration_offset + iter, vals[order[0]]);
    }
    return {pts[order[0]], vals[order[0]], iter, converged, sd};
}

// ---------------------------------------------------------------------------
// Strong-Wolfe line search (Nocedal & Wright, algorithms 3.5 and 3.6)
// ---------------------------------------------------------------------------

struct LinePoint {
    double step;
    double value;
    double slope;
};

struct LineSearchResult {
    bool ok;
    double step;
    double value;
    VectorXd gradient;
};

class WolfeSearch {
public:
    WolfeSearch(Counted& f, const VectorXd& x, const VectorXd& d, double f0, double slope0)
        : f_(f), x_(x), d_(d), f0_(f0), slope0_(slope0) {}

    LineSearchResult run(double initial_step) {
        LinePoint prev{0.0, f0_, slope0_};
        double step = initial_step;
        for (int i = 0; i < 30; ++i) {
            LinePoint cur = evaluate(step);
            if (!std::isfinite(cur.value)) {
                // Rejected region: back off towards the last accepted step.
                step = prev.step + 0.25 * (step - prev.step);
                continue;
            }
            if (cur.value > f0_ + kC1 * step * slope0_ || (i > 0 && cur.value >= prev.value)) {
                return zoom(prev, cur);
            }
            if (std::abs(cur.slope) <= -kC2 * slope0_) {
                return accept(cur);
            }
            if (cur.slope >= 0.0) {
                return zoom(cur, prev);
            }
            prev = cur;
            step *= 2.0;
        }
        return {false, 0.0, f0_, {}};
    }

private:
    static constexpr double kC1 = 1e-4;
    static constexpr double kC2 = 0.9;

    LinePoint evaluate(double step) {
        last_x_ = x_ + step * d_;
        const double v = f_(last_x_);
        if (!std::isfinite(v)) {
            return {step, v, std::numeric_limits<double>::quiet_NaN()};
        }
        last_g_ = gradient_with_steps(f_, last_x_, v, relative_steps(last_x_, 1e-7));
        last_step_ = step;
        return {step, v, last_g_.dot(d_)};
    }

    LineSearchResult accept(const LinePoint& p) {
        if (last_step_ != p.step) {
            evaluate(p.step);
        }
        if (!last_g_.allFinite()) {
            return {false, 0.0, f0_, {}};
        }
        return {true, p.step, p.value, last_g_};
    }

    LineSearchResult zoom(LinePoint lo, LinePoint hi) {
        for (int i = 0; i < 40; ++i) {
            double step = 0.5 * (lo.step + hi.step);
            if (std::isfinite(hi.value) && std::isfinite(lo.slope)) {
                // Quadratic interpolation from lo's value/slope and hi's value.
                const double dx = hi.step - lo.step;
                const double denom = 2.0 * (hi.value - lo.value - lo.slope * dx);
                if (denom > 0.0) {
                    const double cand = lo.step - lo.slope * dx * dx / denom;
                    const double a = std::min(lo.step, hi.step);
                    const double b = std::max(lo.step, hi.step);
                    if (cand > a + 0.1 * (b - a) && cand < b - 0.1 * (b - a)) {
                        step = cand;
                    }
                }
            }
            LinePoint cur = evaluate(step);
            if (!std::isfinite(cur.value) || cur.value > f0_ + kC1 * step * slope0_ ||
                cur.value >= lo.value) {
                hi = cur;
            } else {
                if (std::abs(cur.slope) <= -kC2 * slope0_) {
                    return accept(cur);
                }
                if (cur.slope * (hi.step - lo.step) >= 0.0) {
                    hi = lo;
                }
                lo = cur;
            }
            if (std::abs(hi.step - lo.step) < 1e-16 * (1.0 + std::abs(lo.step))) {
                break;
            }
        }
        // Sufficient decrease without curvature is still progress.
        if (lo.step > 0.0 && lo.value < f0_) {
            return accept(lo);
        }
        return {false, 0.0, f0_, {}};
    }

    Counted& f_;
    const VectorXd& x_;
    const VectorXd& d_;
    double f0_;
    double slope0_;
    VectorXd last_x_;
    VectorXd last_g_;
    double last_step_ = -1.0;
};

// ---------------------------------------------------------------------------
// Interior point helpers
// ---------------------------------------------------------------------------

VectorXd nudge_inside(const VectorXd& x, const VectorXd& lo, const VectorXd& hi) {
    VectorXd out = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const bool has_lo = std::isfinite(lo(i));
        const bool has_hi = std::isfinite(hi(i));
        if (has_lo && has_hi) {
            const double margin = 0.01 * (hi(i) - lo(i));
            out(i) = std::clamp(out(i), lo(i) + margin, hi(i) - margin);
        } else if (has_lo) {
            out(i) = std::max(out(i), lo(i) + 0.01 * (1.0 + std::abs(lo(i))));
        } else if (has_hi) {
            out(i) = std::min(out(i), hi(i) - 0.01 * (1.0 + std::abs(hi(i))));
        }
    }
    return out;
}

double barrier(const VectorXd& x, const VectorXd& lo, const VectorXd& hi) {
    double b = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::isfinite(lo(i))) b -= std::log(x(i) - lo(i));
        if (std::isfinite(hi(i))) b -= std::log(hi(i) - x(i));
    }
    return b;
}

}  // namespace

Eigen::VectorXd numerical_gradient(const Objective& f, std::span<const double> x,
                                   int* function_calls) {
    Counted counted(f);
    const VectorXd xv = to_eigen(x);
    const double fx = counted(xv);
    VectorXd g = gradient_with_steps(counted, xv, fx, relative_steps(xv, 1e-7));
    if (function_calls != nullptr) {
        *function_calls += counted.calls;
    }
    return g;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, std::span<const double> x,
                                  int* function_calls) {
    Counted counted(f);
    const VectorXd xv = to_eigen(x);
    const double fx = counted(xv);
    MatrixXd H = hessian_with_steps(counted, xv, fx, relative_steps(xv, 1e-4));
    if (function_calls != nullptr) {
        *function_calls += counted.calls;
    }
    return H;
}

Result nelder_mead(const Objective& f, std::span<const double> x0, const Options& options) {
    Counted counted(f);
    Result res;
    res.algorithm = "Nelder-Mead";
    VectorXd start = to_eigen(x0);
    if (start.size() == 0) {
        res.value = counted(start);
        res.converged = true;
        res.convergence_measure = "no free parameters";
        res.function_calls = counted.calls;
        return res;
    }
    int total_iterations = 0;
    SimplexRun run = simplex_search(counted, start, options, options.max_iterations, 0);
    total_iterations += run.iterations;
    // Restart from the best vertex with a fresh simplex; a collapsed simplex
    // can stop short of a minimum.
    for (int restart = 0; restart < 5 && run.converged && std::isfinite(run.value); ++restart) {
        const int remaining = options.max_iterations - total_iterations;
        if (remaining <= 0) {
            break;
        }
        SimplexRun next = simplex_search(counted, run.best, options, remaining, total_iterations);
        total_iterations += next.iterations;
        const bool improved = next.value < run.value - options.tolerance;
        if (next.value < run.value) {
            run = next;
        } else {
            run.converged = next.converged;
        }
        if (!improved) {
            break;
        }
    }
    res.x = to_std(run.best);
    res.value = run.value;
    res.iterations = total_iterations;
    res.function_calls = counted.calls;
    res.converged = run.converged;
    res.convergence_measure = describe("std(simplex values)", run.spread);
    return res;
}

Result lbfgs(const Objective& f, std::span<const double> x0, const Options& options) {
    constexpr std::size_t kMemory = 10;
    Counted counted(f);
    Result res;
    res.algorithm = "L-BFGS";
    VectorXd x = to_eigen(x0);
    double fx = counted(x);
    VectorXd g = gradient_with_steps(counted, x, fx, relative_steps(x, 1e-7));
    std::deque<VectorXd> s_hist;
    std::deque<VectorXd> y_hist;
    int iter = 0;
    double gnorm = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
    bool converged = std::isfinite(fx) && gnorm <= options.tolerance;

    while (!converged && iter < options.max_iterations && std::isfinite(fx) && g.allFinite()) {
        ++iter;
        // Two-loop recursion.
        VectorXd q = g;
        std::vector<double> alphas(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
            alphas[k] = rho * s_hist[k].dot(q);
            q -= alphas[k] * y_hist[k];
        }
        if (!s_hist.empty()) {
            q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
            const double b = rho * y_hist[k].dot(q);
            q += (alphas[k] - b) * s_hist[k];
        }
        VectorXd d = -q;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            d = -g;
            slope = g.dot(d);
            s_hist.clear();
            y_hist.clear();
        }
        const double initial = s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
        WolfeSearch search(counted, x, d, fx, slope);
        LineSearchResult ls = search.run(initial);
        if (!ls.ok) {
            if (!s_hist.empty()) {
                s_hist.clear();
                y_hist.clear();
                continue;
            }
            break;
        }
        const VectorXd x_new = x + ls.step * d;
        const VectorXd s = x_new - x;
        const VectorXd y = ls.gradient - g;
        if (y.dot(s) > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            if (s_hist.size() > kMemory) {
                s_hist.pop_front();
                y_hist.pop_front();
            }
        }
        const double f_prev = fx;
        x = x_new;
        fx = ls.value;
        g = ls.gradient;
        gnorm = g.lpNorm<Eigen::Infinity>();
        trace_line(options, "l-bfgs", iter, fx);
        converged = gnorm <= options.tolerance;
        if (!converged && std::abs(f_prev - fx) <= 1e-15 * (1.0 + std::abs(fx)) &&
            s.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
            break;
        }
    }
    res.x = to_std(x);
    res.value = fx;
    res.iterations = iter;
    res.function_calls = counted.calls;
    res.converged = converged;
    res.convergence_measure = describe("|g|_inf", gnorm);
    return res;
}

Result interior_point_newton(const Objective& f, std::span<const double> x0,
                             std::span<const double> lower, std::span<const double> upper,
                             const Options& options) {
    Counted counted(f);
    Result res;
    res.algorithm = "Interior point Newton";
    const auto n = static_cast<Eigen::Index>(x0.size());
    VectorXd lo = VectorXd::Constant(n, -kInf);
    VectorXd hi = VectorXd::Constant(n, kInf);
    if (!lower.empty()) lo = to_eigen(lower);
    if (!upper.empty()) hi = to_eigen(upper);
    if (lo.size() != n || hi.size() != n) {
        throw std::invalid_argument("bounds must match the dimension of x0");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(lo(i) < hi(i))) {
            throw std::invalid_argument("lower bound must be below upper bound");
        }
    }
    VectorXd x = nudge_inside(to_eigen(x0), lo, hi);

    // Steps limited so difference stencils stay inside the box.
    auto steps = [&](const VectorXd& at, double scale) {
        VectorXd h = relative_steps(at, scale);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double room = std::min(at(i) - lo(i), hi(i) - at(i));
            h(i) = std::min(h(i), 0.5 * room);
        }
        return h;
    };

    double fx = counted(x);
    int iter = 0;
    double mu = 0.1;
    double measure = kInf;
    bool converged = false;
    while (std::isfinite(fx) && iter < options.max_iterations) {
        bool inner_done = false;
        for (int inner = 0; inner < 100 && iter < options.max_iterations; ++inner) {
            ++iter;
            VectorXd g = gradient_with_steps(counted, x, fx, steps(x, 1e-7));
            MatrixXd H = hessian_with_steps(counted, x, fx, steps(x, 1e-4));
            for (Eigen::Index i = 0; i < n; ++i) {
                if (std::isfinite(lo(i))) {
                    const double r = x(i) - lo(i);
                    g(i) -= mu / r;
                    H(i, i) += mu / (r * r);
                }
                if (std::isfinite(hi(i))) {
                    const double r = hi(i) - x(i);
                    g(i) += mu / r;
                    H(i, i) += mu / (r * r);
                }
            }
            if (!g.allFinite() || !H.allFinite()) {
                break;
            }
            measure = g.lpNorm<Eigen::Infinity>();
            if (measure <= std::max(options.tolerance, mu)) {
                inner_done = true;
                break;
            }
            // Regularize until positive definite.
            H = 0.5 * (H + H.transpose());
            double tau = 0.0;
            const double scale = std::max(1e-8, H.diagonal().cwiseAbs().maxCoeff());
            VectorXd d;
            for (int attempt = 0; attempt < 60; ++attempt) {
                Eigen::LLT<MatrixXd> llt(H + tau * MatrixXd::Identity(n, n));
                if (llt.info() == Eigen::Success) {
                    d = -llt.solve(g);
                    break;
                }
                tau = tau == 0.0 ? 1e-8 * scale : tau * 10.0;
            }
            if (d.size() == 0) {
                break;
            }
            double step = 1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (d(i) < 0.0 && std::isfinite(lo(i))) {
                    step = std::min(step, 0.995 * (x(i) - lo(i)) / -d(i));
                } else if (d(i) > 0.0 && std::isfinite(hi(i))) {
                    step = std::min(step, 0.995 * (hi(i) - x(i)) / d(i));
                }
            }
            const double phi = fx + mu * barrier(x, lo, hi);
            const double slope = g.dot(d);
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt) {
                const VectorXd xt = x + step * d;
                const double ft = counted(xt);
                const double pt = ft + mu * barrier(xt, lo, hi);
                if (std::isfinite(pt) && pt <= phi + 1e-4 * step * slope) {
                    x = xt;
                    fx = ft;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            trace_line(options, "ip-newton", iter, fx);
            if (!moved) {
                inner_done = true;
                break;
            }
        }
        if (mu < 1e-10) {
            converged = inner_done;
            break;
        }
        mu *= 0.2;
    }
    res.x = to_std(x);
    res.value = fx;
    res.iterations = iter;
    res.function_calls = counted.calls;
    res.converged = converged && std::isfinite(fx);
    res.convergence_measure = describe("|grad barrier|_inf", measure);
    return res;
}

}  // namespace sdm::optim
