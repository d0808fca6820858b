#include "sdm_cli/commands.hpp"

#include "sdm/errors.hpp"
#include "sdm/estimation.hpp"
#include "sdm/forecasting.hpp"
#include "sdm_cli/csv.hpp"
#include "sdm_cli/model_file.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sdm::cli {

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct FitArgs {
    std::string data;
    std::string dist;
    int p = 0;
    std::vector<int> p_lags;
    int q = 0;
    std::vector<int> q_lags;
    double scaling = 0.0;
    std::vector<int> time_varying;
    std::vector<std::string> links;
    std::string init = "stationary";
    std::string method = "nm";
    int starts = 3;
    std::vector<double> lb;
    std::vector<double> ub;
    std::vector<double> x0;
    std::uint64_t seed = 123;
    int verbose = 1;
    double tolerance = 1e-6;
    unsigned threads = 0;
    std::string out;
};

struct ForecastArgs {
    std::string data;
    std::string model;
    std::size_t horizon = 1;
    std::size_t scenarios = 10000;
    std::vector<double> quantiles{0.025, 0.5, 0.975};
    std::uint64_t seed = 123;
    unsigned threads = 0;
    std::string out_prefix;
};

struct SimulateArgs {
    std::string model;
    std::size_t length = 0;
    std::uint64_t seed = 123;
    std::string out;
};

LagSet resolve_lags(int order, const std::vector<int>& lags, const char* order_flag,
                    const char* lags_flag) {
    if (!lags.empty() && order != 0) {
        throw InvalidModel(std::string(order_flag) + " and " + lags_flag + " are exclusive");
    }
    if (!lags.empty()) {
        return lags;
    }
    if (order < 1) {
        throw InvalidModel(std::string("one of ") + order_flag + " or " + lags_flag +
                           " is required");
    }
    return lags_up_to(order);
}

ModelSpec build_spec(const FitArgs& a) {
    const auto family = parse_family(a.dist);
    if (!family) {
        throw InvalidModel("unknown distribution '" + a.dist + "'");
    }
    const DistributionSpec& dist = distribution_spec(*family);
    const Scaling scaling = scaling_from_exponent(a.scaling);
    if (!dist.supports(scaling)) {
        std::ostringstream msg;
        msg << "scaling d = " << a.scaling << " is not supported for " << dist.name
            << "; supported values:";
        for (Scaling s : dist.supported_scalings) msg << ' ' << scaling_exponent(s);
        throw UnsupportedScaling(msg.str());
    }
    std::vector<int> mask;
    for (int i : a.time_varying) {
        if (i < 1 || i > dist.num_params) {
            throw InvalidModel("--time-varying index " + std::to_string(i) + " outside 1.." +
                               std::to_string(dist.num_params));
        }
        mask.push_back(i - 1);
    }
    LinkSet links = dist.default_links();
    if (!a.links.empty()) {
        links.clear();
        if (static_cast<int>(a.links.size()) != dist.num_params) {
            throw InvalidModel("--links needs one token per parameter (" +
                               std::to_string(dist.num_params) + ")");
        }
        const auto defaults = dist.default_links();
        for (std::size_t i = 0; i < a.links.size(); ++i) {
            links.push_back(a.links[i] == "default" ? defaults[i] : parse_link_token(a.links[i]));
        }
    }
    return ModelSpec(*family, resolve_lags(a.p, a.p_lags, "--p", "--p-lags"),
                     resolve_lags(a.q, a.q_lags, "--q", "--q-lags"), scaling, mask, links);
}

OptimizerMethod parse_method(const std::string& m) {
    if (m == "nm") return OptimizerMethod::SimplexSearch;
    if (m == "lbfgs") return OptimizerMethod::QuasiNewton;
    if (m == "ipnewton") return OptimizerMethod::InteriorPointBoxed;
    throw InvalidModel("unknown method '" + m + "' (expected nm, lbfgs or ipnewton)");
}

std::optional<InitialParams> fixed_init(const InitMode& mode, const ModelSpec& spec,
                                        const std::vector<double>& y) {
    switch (mode.kind) {
        case InitMode::Kind::Stationary: return std::nullopt;
        case InitMode::Kind::Seasonal: return dynamic_initial_params(y, spec, mode.period);
        case InitMode::Kind::Static: {
            InitialParams init;
            const Vec mle = static_mle(spec.dist(), y);
            init.values = mle.transpose().replicate(spec.max_lag(), 1);
            return init;
        }
    }
    return std::nullopt;
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const ModelSpec spec = build_spec(a);
    const std::vector<double> y = read_series(a.data);
    const InitMode mode = InitMode::parse(a.init);

    FitOptions opts;
    opts.method = parse_method(a.method);
    opts.n_starts = a.starts;
    opts.seed = a.seed;
    opts.verbosity = a.verbose;
    opts.log = &err;
    opts.tolerance = a.tolerance;
    opts.threads = a.threads;
    opts.lower = a.lb;
    opts.upper = a.ub;
    if (!a.x0.empty()) {
        opts.initial_points = {a.x0};
    }
    const std::size_t n_theta = ThetaLayout(spec).size();
    if (opts.method == OptimizerMethod::InteriorPointBoxed) {
        if (opts.lower.empty()) opts.lower.assign(n_theta, -INFINITY);
        if (opts.upper.empty()) opts.upper.assign(n_theta, INFINITY);
    } else if (!a.lb.empty() || !a.ub.empty()) {
        throw InvalidModel("--lb/--ub require --method ipnewton");
    }
    const std::initializer_list<const std::vector<double>*> sized = {&opts.lower, &opts.upper,
                                                                     &a.x0};
    for (const auto* v : sized) {
        if (!v->empty() && v->size() != n_theta) {
            std::string order;
            for (const auto& n : ThetaLayout(spec).names()) order += (order.empty() ? "" : ",") + n;
            throw InvalidModel("bounds and --x0 need " + std::to_string(n_theta) +
                               " values in the order " + order);
        }
    }

    const auto init = fixed_init(mode, spec, y);
    const FitResult r = fit(spec, y, opts, init);
    out << fit_stats(r);

    ModelFile model{spec, r.coefficients, mode, r.initial_params,
                    FitMetadata{r.loglik, r.aic, r.bic, r.n_obs, a.seed, kToolVersion}};
    save_model(a.out, model);
    return kExitOk;
}

std::vector<std::string> indexed(const std::string& stem, std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
    return out;
}

int cmd_forecast(const ForecastArgs& a, std::ostream& out) {
    const ModelFile model = load_model(a.model);
    const std::vector<double> y = read_series(a.data);
    ForecastOptions opts;
    opts.horizon = a.horizon;
    opts.scenarios = a.scenarios;
    opts.quantiles = a.quantiles;
    opts.seed = a.seed;
    opts.threads = a.threads;
    const Forecast f = forecast(y, model.spec, model.coefficients, model.initial_params, opts);

    std::vector<std::string> names;
    for (auto n : model.spec.dist().param_names) names.emplace_back(n);
    write_table(a.out_prefix + ".parameters.csv", names, f.parameter_forecast);
    write_table(a.out_prefix + ".scenarios.csv", indexed("scenario_", a.scenarios),
                f.observation_scenarios);

    Eigen::MatrixXd q(static_cast<Eigen::Index>(a.horizon),
                      static_cast<Eigen::Index>(f.quantiles.size() + 1));
    std::vector<std::string> header{"point"};
    q.col(0) = f.observation_forecast;
    Eigen::Index col = 1;
    for (const auto& [level, values] : f.quantiles) {
        header.push_back("q" + format_label(level));
        q.col(col++) = values;
    }
    write_table(a.out_prefix + ".quantiles.csv", header, q);
    out << "Wrote " << a.out_prefix << ".{parameters,scenarios,quantiles}.csv (" << a.horizon
        << " steps, " << a.scenarios << " scenarios)\n";
    return kExitOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const ModelFile model = load_model(a.model);
    RandomStream rng(a.seed);
    const Simulation sim =
        simulate_series(model.spec, model.coefficients, model.initial_params, a.length, rng);
    write_series(a.out, sim.y);
    out << "Wrote " << a.length << " observations to " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Score-driven time-series models: fit, forecast and simulate", "sdm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Estimate a model by maximum likelihood");
    fit_cmd->add_option("--data", fa.data, "CSV file with one numeric column")->required();
    fit_cmd->add_option("--dist", fa.dist, "Distribution name, e.g. normal, tdist-ls")->required();
    auto* p_opt = fit_cmd->add_option("--p", fa.p, "Score lags 1..p");
    fit_cmd->add_option("--p-lags", fa.p_lags, "Explicit score lags")->delimiter(',')->excludes(p_opt);
    auto* q_opt = fit_cmd->add_option("--q", fa.q, "Autoregressive lags 1..q");
    fit_cmd->add_option("--q-lags", fa.q_lags, "Explicit autoregressive lags")
        ->delimiter(',')
        ->excludes(q_opt);
    fit_cmd->add_option("--scaling", fa.scaling, "Information scaling exponent: 0, 0.5 or 1")
        ->required();
    fit_cmd->add_option("--time-varying", fa.time_varying, "1-based time-varying parameters")
        ->delimiter(',');
    fit_cmd->add_option("--links", fa.links, "Per-parameter links: id, log, log:a, logit:a:b, default")
        ->delimiter(',');
    fit_cmd->add_option("--init", fa.init, "stationary, static or seasonal:<period>");
    fit_cmd->add_option("--method", fa.method, "nm, lbfgs or ipnewton");
    fit_cmd->add_option("--starts", fa.starts, "Number of random starts")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--lb", fa.lb, "Lower bounds in parameter order (ipnewton)")->delimiter(',');
    fit_cmd->add_option("--ub", fa.ub, "Upper bounds in parameter order (ipnewton)")->delimiter(',');
    fit_cmd->add_option("--x0", fa.x0, "Single explicit starting point")->delimiter(',');
    fit_cmd->add_option("--seed", fa.seed, "Seed for the random starts");
    fit_cmd->add_option("--verbose", fa.verbose, "0 silent .. 3 per-iteration")->check(CLI::Range(0, 3));
    fit_cmd->add_option("--tol", fa.tolerance, "Optimizer tolerance");
    fit_cmd->add_option("--threads", fa.threads, "Worker threads (0 = SDM_THREADS or all cores)");
    fit_cmd->add_option("--out", fa.out, "Model file to write")->required();

    ForecastArgs ca;
    auto* fc_cmd = app.add_subcommand("forecast", "Simulation-based forecast from a fitted model");
    fc_cmd->add_option("--data", ca.data, "CSV series to condition on")->required();
    fc_cmd->add_option("--model", ca.model, "Model file")->required();
    fc_cmd->add_option("--horizon", ca.horizon, "Forecast horizon")->required()->check(CLI::PositiveNumber);
    fc_cmd->add_option("--scenarios", ca.scenarios, "Number of scenarios")->check(CLI::PositiveNumber);
    fc_cmd->add_option("--quantiles", ca.quantiles, "Quantile levels")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    fc_cmd->add_option("--seed", ca.seed, "Scenario seed");
    fc_cmd->add_option("--threads", ca.threads, "Worker threads (0 = SDM_THREADS or all cores)");
    fc_cmd->add_option("--out-prefix", ca.out_prefix, "Prefix for the three output files")->required();

    SimulateArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a series from a model file");
    sim_cmd->add_option("--model", sa.model, "Model file")->required();
    sim_cmd->add_option("--length", sa.length, "Number of observations")->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sa.seed, "Simulation seed");
    sim_cmd->add_option("--out", sa.out, "CSV file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUserError;
    }

    try {
        if (*fit_cmd) return cmd_fit(fa, out, err);
        if (*fc_cmd) return cmd_forecast(ca, out);
        if (*sim_cmd) return cmd_simulate(sa, out);
    } catch (const sdm::Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
    return kExitInternalError;
}

}  // namespace sdm::cli
