#include "sdm/estimation.hpp"
#include "sdm/forecasting.hpp"
#include "sdm/gas.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

using namespace sdm;

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

struct Setup {
    ModelSpec spec;
    Coefficients coef;
    InitialParams init;
    std::vector<double> y;
};

Setup tdist_setup(std::size_t n) {
    Setup s{ModelSpec::with_orders(Family::TDistLocationScale, 1, 1, Scaling::Identity, {0, 1}),
            {}, {}, {}};
    s.coef.omega = vec({0.01, -0.05, std::log(6.0)});
    s.coef.A[1] = vec({0.05, 0.1, 0.0});
    s.coef.B[1] = vec({0.9, 0.9, 0.0});
    s.init = unconditional_mean_init(s.spec, s.coef);
    RandomStream rng(1);
    s.y = simulate_series(s.spec, s.coef, s.init, n, rng).y;
    return s;
}

void BM_Filter(benchmark::State& state) {
    const Setup s = tdist_setup(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(filter(s.spec, s.coef, s.y, s.init).total_loglik);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Filter)->Arg(276)->Arg(2000)->Arg(20000);

void BM_Objective(benchmark::State& state) {
    const Setup s = tdist_setup(static_cast<std::size_t>(state.range(0)));
    const LikelihoodObjective obj(s.spec, s.y);
    const auto theta = obj.layout().from_coefficients(s.coef);
    for (auto _ : state) {
        benchmark::DoNotOptimize(obj(theta));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Objective)->Arg(276)->Arg(2000);

void BM_Forecast(benchmark::State& state) {
    const Setup s = tdist_setup(500);
    ForecastOptions opts;
    opts.horizon = 12;
    opts.scenarios = static_cast<std::size_t>(state.range(0));
    opts.threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(forecast(s.y, s.spec, s.coef, s.init, opts).observation_forecast);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 12);
}
BENCHMARK(BM_Forecast)->Args({1000, 1})->Args({10000, 1})->Args({10000, 4});

}  // namespace

BENCHMARK_MAIN();
