#include <benchmark/benchmark.h>

#include "mfvi/cavi.hpp"
#include "mfvi/evidence.hpp"
#include "mfvi/models/gmm.hpp"
#include "mfvi/models/probit.hpp"
#include "mfvi/models/sbm.hpp"
#include "mfvi/selection.hpp"
#include "mfvi/special.hpp"
#include "mfvi/synthetic.hpp"

namespace {

using namespace mfvi;

void BM_LogSumExp(benchmark::State& state) {
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = std::sin(static_cast<double>(i)) * 30.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_sum_exp(values));
    }
}
BENCHMARK(BM_LogSumExp)->Arg(8)->Arg(64)->Arg(1024);

void BM_GmmSweep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::VectorXd data = generate_gmm_data(GmmDesign{3.0, 3, n}, 1);
    GmmModel model(data, 3, 10.0);
    MeanFieldState mf = model.make_init_state(1);
    for (auto _ : state) {
        mf = step_parallel(model, mf, 1.0);
        benchmark::DoNotOptimize(mf);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GmmSweep)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ProbitBlockSweep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ProbitData data = generate_probit_data(ProbitDesign{n, 10, 0.8, 0.8, 5}, 2);
    ProbitModel model(data.design, data.responses, 100.0 * Eigen::MatrixXd::Identity(10, 10),
                      ProbitFactorization::block);
    MeanFieldState mf = model.make_init_state(2);
    for (auto _ : state) {
        mf = step_parallel(model, mf, 1.0);
        benchmark::DoNotOptimize(mf);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ProbitBlockSweep)->Arg(100)->Arg(1000);

void BM_SbmSweep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SbmSample sample = generate_sbm_data(SbmDesign{n, 5, 0.6, 0.4}, 3);
    SbmModel model(sample.adjacency, 5, uniform_sbm_prior(n, 5));
    MeanFieldState mf = model.make_init_state(3);
    for (auto _ : state) {
        mf = step_parallel(model, mf, 1.0);
        benchmark::DoNotOptimize(mf);
    }
}
BENCHMARK(BM_SbmSweep)->Arg(100)->Arg(300);

void BM_SbmElbo(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SbmSample sample = generate_sbm_data(SbmDesign{n, 5, 0.6, 0.4}, 4);
    SbmModel model(sample.adjacency, 5, uniform_sbm_prior(n, 5));
    const MeanFieldState mf = model.make_init_state(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.elbo(mf));
    }
}
BENCHMARK(BM_SbmElbo)->Arg(100)->Arg(300);

void BM_EvidenceNormal(benchmark::State& state) {
    const Eigen::VectorXd data = generate_normal_data(NormalDesign{100.0, 100.0, 10}, 5);
    NormalModel model(data, NormalPrior{0.0, 10000.0, 0.01, 0.01});
    for (auto _ : state) {
        benchmark::DoNotOptimize(mc_evidence(model, state.range(0), 7));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvidenceNormal)->Arg(10000)->Arg(100000);

void BM_ContractionRates(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    FisherBundle bundle;
    bundle.V = probit_sigma_ar1(d, 0.8);
    bundle.V_s = 0.5 * Eigen::MatrixXd::Identity(d, d);
    bundle.V_c = bundle.V + bundle.V_s;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            contraction_rates(bundle, 0.7, ScheduleKind::sequential_randomized, true, d));
    }
}
BENCHMARK(BM_ContractionRates)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
