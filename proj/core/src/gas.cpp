#include "sdm/gas.hpp"

#include "sdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sdm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxCondition = 1e12;

LagSet normalize_lags(LagSet lags, const char* what) {
    if (lags.empty()) {
        throw InvalidModel(std::string(what) + " lag set must not be empty");
    }
    std::sort(lags.begin(), lags.end());
    if (lags.front() < 1) {
        throw InvalidModel(std::string(what) + " lags must be positive");
    }
    if (std::adjacent_find(lags.begin(), lags.end()) != lags.end()) {
        throw InvalidModel(std::string(what) + " lags must not repeat");
    }
    return lags;
}

std::vector<int> normalize_mask(std::vector<int> mask, int k) {
    if (mask.empty()) {
        mask.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            mask[static_cast<std::size_t>(i)] = i;
        }
        return mask;
    }
    std::sort(mask.begin(), mask.end());
    mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
    if (mask.front() < 0 || mask.back() >= k) {
        throw InvalidModel("time-varying index out of range for a " + std::to_string(k) +
                           "-parameter distribution");
    }
    return mask;
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

void validate_series(const DistributionSpec& dist, std::span<const double> y) {
    if (dist.family == Family::BetaLocationScale) {
        for (double v : y) {
            if (!std::isfinite(v)) {
                throw DomainError("BetaLocationScale: observation is not finite");
            }
        }
        return;
    }
    Vec probe(dist.num_params);
    for (int i = 0; i < dist.num_params; ++i) {
        probe(i) = 0.0;
    }
    for (double v : y) {
        check_observation(dist, probe, v);
    }
}

namespace {

void check_init(const ModelSpec& spec, const InitialParams& init) {
    if (init.rows() < 1 || init.values.cols() != spec.num_params()) {
        throw InvalidModel("initial parameters need at least one row of " +
                           std::to_string(spec.num_params()) + " values");
    }
    for (Eigen::Index r = 0; r < init.rows(); ++r) {
        check_params(spec.dist(), init.row(r));
    }
}

// Natural-space parameters for a post-presample period.
Vec natural_params(const ModelSpec& spec, const Vec& f_tilde) {
    if (!all_finite(f_tilde)) {
        throw FilterDivergence("recursion produced a non-finite linked parameter");
    }
    const Vec f = unlink(spec.links(), f_tilde);
    for (int i = 0; i < f.size(); ++i) {
        if (!spec.dist().param_domains[static_cast<std::size_t>(i)].contains(f(i)) ||
            !spec.links()[static_cast<std::size_t>(i)].in_domain(f(i))) {
            throw FilterDivergence("recursion left the parameter domain");
        }
    }
    if (spec.family() == Family::BetaLocationScale && !(f(0) < f(1))) {
        throw FilterDivergence("recursion produced a >= c");
    }
    return f;
}

Vec checked_scaled_score(const ModelSpec& spec, const Vec& f, double y) {
    Vec s = scaled_score(spec.dist(), spec.links(), f, y, spec.scaling());
    if (!all_finite(s)) {
        throw FilterDivergence("scaled score is not finite");
    }
    return s;
}

double period_loglik(const ModelSpec& spec, const Vec& f, double y) {
    if (spec.family() == Family::BetaLocationScale && !(y > f(0) && y < f(1))) {
        throw FilterDivergence("observation outside the filtered support (a, c)");
    }
    return log_pdf(spec.dist(), f, y);
}

}  // namespace

LagSet lags_up_to(int p) {
    if (p < 1) {
        throw InvalidModel("lag order must be positive");
    }
    LagSet lags(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        lags[static_cast<std::size_t>(i)] = i + 1;
    }
    return lags;
}

ModelSpec::ModelSpec(Family family, LagSet score_lags, LagSet ar_lags, Scaling scaling,
                     std::vector<int> time_varying, std::optional<LinkSet> links)
    : dist_(&distribution_spec(family)),
      score_lags_(normalize_lags(std::move(score_lags), "score")),
      ar_lags_(normalize_lags(std::move(ar_lags), "autoregressive")),
      scaling_(scaling),
      time_varying_(normalize_mask(std::move(time_varying), dist_->num_params)),
      links_(links ? std::move(*links) : dist_->default_links()) {
    if (!dist_->supports(scaling_)) {
        throw UnsupportedScaling(std::string(dist_->name) + " does not support scaling d = " +
                                 std::to_string(scaling_exponent(scaling_)));
    }
    check_links(*dist_, links_);
}

ModelSpec ModelSpec::with_orders(Family family, int p, int q, Scaling scaling,
                                 std::vector<int> time_varying, std::optional<LinkSet> links) {
    return {family, lags_up_to(p), lags_up_to(q), scaling, std::move(time_varying),
            std::move(links)};
}

bool ModelSpec::is_time_varying(int param) const noexcept {
    return std::binary_search(time_varying_.begin(), time_varying_.end(), param);
}

int ModelSpec::max_lag() const noexcept {
    return std::max(score_lags_.back(), ar_lags_.back());
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.dist_->family == b.dist_->family && a.score_lags_ == b.score_lags_ &&
           a.ar_lags_ == b.ar_lags_ && a.scaling_ == b.scaling_ &&
           a.time_varying_ == b.time_varying_ && a.links_ == b.links_;
}

Coefficients Coefficients::unset(const ModelSpec& spec) {
    const int k = spec.num_params();
    Coefficients c;
    c.omega = Vec::Constant(k, kNaN);
    Vec diag(k);
    for (int i = 0; i < k; ++i) {
        diag(i) = spec.is_time_varying(i) ? kNaN : 0.0;
    }
    for (int lag : spec.score_lags()) c.A[lag] = diag;
    for (int lag : spec.ar_lags()) c.B[lag] = diag;
    return c;
}

bool Coefficients::has_unset() const {
    if (omega.hasNaN()) return true;
    for (const auto& [lag, v] : A) {
        if (v.hasNaN()) return true;
    }
    for (const auto& [lag, v] : B) {
        if (v.hasNaN()) return true;
    }
    return false;
}

void Coefficients::validate(const ModelSpec& spec) const {
    const int k = spec.num_params();
    if (omega.size() != k) {
        throw InvalidModel("omega must have " + std::to_string(k) + " entries");
    }
    auto check_block = [&](const std::map<int, Vec>& block, const LagSet& lags, const char* name) {
        if (block.size() != lags.size()) {
            throw InvalidModel(std::string(name) + " lags do not match the model");
        }
        for (int lag : lags) {
            const auto it = block.find(lag);
            if (it == block.end()) {
                throw InvalidModel(std::string(name) + " is missing lag " + std::to_string(lag));
            }
            if (it->second.size() != k) {
                throw InvalidModel(std::string(name) + " lag " + std::to_string(lag) +
                                   " must have " + std::to_string(k) + " entries");
            }
            for (int i = 0; i < k; ++i) {
                if (!spec.is_time_varying(i) && it->second(i) != 0.0) {
                    throw InvalidModel(std::string(name) + " lag " + std::to_string(lag) +
                                       " is non-zero for constant parameter " +
                                       std::to_string(i + 1));
                }
            }
        }
    };
    check_block(A, spec.score_lags(), "A");
    check_block(B, spec.ar_lags(), "B");
}

Vec InitialParams::row(Eigen::Index t) const {
    const Eigen::Index r = t % values.rows();
    Vec v(values.cols());
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        v(j) = values(r, j);
    }
    return v;
}

Vec update_step(const ModelSpec& spec, const Coefficients& coef,
                std::span<const Vec> f_tilde_history, std::span<const Vec> s_tilde_history) {
    const auto nf = static_cast<int>(f_tilde_history.size());
    const auto ns = static_cast<int>(s_tilde_history.size());
    if (nf < spec.ar_lags().back()) {
        throw InvalidModel("linked parameter history does not cover every autoregressive lag");
    }
    Vec next = coef.omega;
    // Only time-varying rows are touched, so constant parameters reproduce
    // omega exactly even when a score is extreme.
    for (int i : spec.time_varying()) {
        double acc = coef.omega(i);
        for (const auto& [lag, a] : coef.A) {
            if (lag <= ns) {
                acc += a(i) * s_tilde_history[static_cast<std::size_t>(ns - lag)](i);
            }
        }
        for (const auto& [lag, b] : coef.B) {
            acc += b(i) * f_tilde_history[static_cast<std::size_t>(nf - lag)](i);
        }
        next(i) = acc;
    }
    return next;
}

FilterResult filter(const ModelSpec& spec, const Coefficients& coef, std::span<const double> y,
                    const InitialParams& init) {
    if (y.empty()) {
        throw EmptyInput("cannot filter an empty series");
    }
    coef.validate(spec);
    if (coef.has_unset()) {
        throw InvalidModel("coefficients contain unset entries");
    }
    check_init(spec, init);
    validate_series(spec.dist(), y);

    const auto T = static_cast<Eigen::Index>(y.size());
    const int k = spec.num_params();
    const int m = spec.max_lag();
    FilterResult out;
    out.f.resize(T, k);
    out.f_tilde.resize(T, k);
    out.s_tilde.resize(T, k);
    out.loglik_contributions.resize(T);
    out.presample = static_cast<int>(std::min<Eigen::Index>(m, T));

    std::vector<Vec> ft;
    std::vector<Vec> st;
    ft.reserve(y.size() + 1);
    st.reserve(y.size());
    for (Eigen::Index t = 0; t < T; ++t) {
        Vec f;
        if (t < m) {
            f = init.row(t);
            ft.push_back(link(spec.links(), f));
        } else {
            const std::size_t begin = static_cast<std::size_t>(t - m);
            ft.push_back(update_step(spec, coef, std::span<const Vec>(ft).subspan(begin),
                                     std::span<const Vec>(st).subspan(begin)));
            f = natural_params(spec, ft.back());
        }
        const double yt = y[static_cast<std::size_t>(t)];
        const double ll = period_loglik(spec, f, yt);
        st.push_back(checked_scaled_score(spec, f, yt));
        out.f.row(t) = f.transpose();
        out.f_tilde.row(t) = ft.back().transpose();
        out.s_tilde.row(t) = st.back().transpose();
        out.loglik_contributions(t) = ll;
    }
    const std::size_t begin = y.size() >= static_cast<std::size_t>(m) ? y.size() - m : 0;
    if (y.size() >= static_cast<std::size_t>(spec.ar_lags().back())) {
        out.next_f_tilde = update_step(spec, coef, std::span<const Vec>(ft).subspan(begin),
                                       std::span<const Vec>(st).subspan(begin));
    } else {
        // Too short to reach the recursion: continue the presample rows.
        out.next_f_tilde = link(spec.links(), init.row(T));
    }
    out.total_loglik = out.loglik_contributions.tail(T - out.presample).sum();
    if (!std::isfinite(out.total_loglik)) {
        throw FilterDivergence("log-likelihood is not finite");
    }
    return out;
}

InitialParams unconditional_mean_init(const ModelSpec& spec, const Coefficients& coef) {
    coef.validate(spec);
    const int k = spec.num_params();
    Vec denom = Vec::Ones(k);
    for (const auto& [lag, b] : coef.B) {
        denom -= b;
    }
    const double hi = denom.cwiseAbs().maxCoeff();
    const double lo = denom.cwiseAbs().minCoeff();
    if (!(lo > 0.0) || !(hi / lo <= kMaxCondition)) {
        throw NonstationaryB("I - sum(B) is singular; the unconditional mean does not exist");
    }
    const Vec mean_tilde = coef.omega.cwiseQuotient(denom);
    const Vec f = unlink(spec.links(), mean_tilde);
    for (int i = 0; i < k; ++i) {
        if (!spec.dist().param_domains[static_cast<std::size_t>(i)].contains(f(i))) {
            throw NonstationaryB("unconditional mean maps outside the parameter domain");
        }
    }
    if (spec.family() == Family::BetaLocationScale && !(f(0) < f(1))) {
        throw NonstationaryB("unconditional mean has a >= c");
    }
    InitialParams init;
    init.values.resize(spec.max_lag(), k);
    for (int r = 0; r < spec.max_lag(); ++r) {
        init.values.row(r) = f.transpose();
    }
    return init;
}

InitialParams dynamic_initial_params(std::span<const double> y, const ModelSpec& spec,
                                     int period) {
    if (period < 1) {
        throw InvalidModel("seasonal period must be positive");
    }
    if (period < spec.max_lag()) {
        throw InvalidModel("seasonal period must be at least the largest lag");
    }
    if (y.size() < 2 * static_cast<std::size_t>(period)) {
        throw InvalidModel("seasonal initialization needs at least two full periods");
    }
    InitialParams init;
    init.values.resize(period, spec.num_params());
    std::vector<double> sub;
    for (int r = 0; r < period; ++r) {
        sub.clear();
        for (std::size_t t = static_cast<std::size_t>(r); t < y.size(); t += period) {
            sub.push_back(y[t]);
        }
        init.values.row(r) = static_mle(spec.dist(), sub).transpose();
    }
    return init;
}

Simulation simulate_series(const ModelSpec& spec, const Coefficients& coef,
                           const InitialParams& init, std::size_t length, RandomStream& rng) {
    if (length == 0) {
        throw EmptyInput("simulation length must be positive");
    }
    coef.validate(spec);
    if (coef.has_unset()) {
        throw InvalidModel("coefficients contain unset entries");
    }
    check_init(spec, init);
    const int m = spec.max_lag();
    std::vector<Vec> ft;
    std::vector<Vec> st;
    Simulation sim;
    sim.y.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
        Vec f;
        if (t < static_cast<std::size_t>(m)) {
            f = init.row(static_cast<Eigen::Index>(t));
            ft.push_back(link(spec.links(), f));
        } else {
            const std::size_t begin = t - static_cast<std::size_t>(m);
            ft.push_back(update_step(spec, coef, std::span<const Vec>(ft).subspan(begin),
                                     std::span<const Vec>(st).subspan(begin)));
            f = natural_params(spec, ft.back());
        }
        const double yt = sample(spec.dist(), f, rng);
        sim.y.push_back(yt);
        st.push_back(checked_scaled_score(spec, f, yt));
    }
    sim.filtered = filter(spec, coef, sim.y, init);
    return sim;
}

}  // namespace sdm
