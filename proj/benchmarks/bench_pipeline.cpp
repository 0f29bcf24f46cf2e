#include <benchmark/benchmark.h>

#include "ccr/dgp.hpp"
#include "ccr/estimators.hpp"

namespace {

ccr::DgpConfig bench_config(Eigen::Index n) {
    ccr::DgpConfig cfg;
    cfg.n = n;
    cfg.base_seed = 99;
    return cfg;
}

void BM_GenerateDataset(benchmark::State& state) {
    const ccr::DgpConfig cfg = bench_config(state.range(0));
    std::uint64_t rep = 0;
    for (auto _ : state) {
        const ccr::Dataset ds = ccr::generate_dataset(cfg, rep++);
        benchmark::DoNotOptimize(ds.y.data());
    }
}
BENCHMARK(BM_GenerateDataset)->Arg(300)->Arg(500);

void BM_FirstStageAndFit(benchmark::State& state) {
    const ccr::DgpConfig cfg = bench_config(state.range(0));
    const ccr::Dataset ds = ccr::generate_dataset(cfg, 0);
    ccr::EstimatorSpec spec;
    spec.kind = ccr::EstimatorKind::Cca2Sls;
    spec.k = cfg.k;
    spec.ell = cfg.ell;
    for (auto _ : state) {
        const ccr::FirstStage fs = ccr::build_first_stage(ds.z_x, ds.z_w, spec);
        const ccr::CcrFit fit = ccr::ccr_fit(ds.y, fs);
        benchmark::DoNotOptimize(fit.beta.data());
    }
}
BENCHMARK(BM_FirstStageAndFit)->Arg(300)->Arg(500);

void BM_SharedSvdAllEstimators(benchmark::State& state) {
    const ccr::DgpConfig cfg = bench_config(state.range(0));
    const ccr::Dataset ds = ccr::generate_dataset(cfg, 0);
    for (auto _ : state) {
        const ccr::ThinSvd zx = ccr::thin_svd(ds.z_x);
        const ccr::ThinSvd zw = ccr::thin_svd(ds.z_w);
        for (const auto kind :
             {ccr::EstimatorKind::Naive2Sls, ccr::EstimatorKind::Pca2Sls,
              ccr::EstimatorKind::Whiten2Sls, ccr::EstimatorKind::Cca2Sls}) {
            ccr::EstimatorSpec spec;
            spec.kind = kind;
            spec.k = cfg.k;
            spec.ell = cfg.ell;
            const ccr::FirstStage fs = ccr::build_first_stage(zx, zw, spec);
            const ccr::CcrFit fit = ccr::ccr_fit(ds.y, fs);
            benchmark::DoNotOptimize(fit.beta.data());
        }
    }
}
BENCHMARK(BM_SharedSvdAllEstimators)->Arg(300);

}  // namespace
