#include <benchmark/benchmark.h>

#include "ccr/rng.hpp"
#include "ccr/speclin.hpp"

namespace {

Eigen::MatrixXd bench_matrix(Eigen::Index n, Eigen::Index d) {
    ccr::Rng rng = ccr::RngKey(13).with("bench").with(n).with(d).stream();
    return rng.gaussian_matrix(n, d);
}

void BM_ThinSvd(benchmark::State& state) {
    const Eigen::MatrixXd a = bench_matrix(state.range(0), state.range(1));
    for (auto _ : state) {
        const ccr::ThinSvd svd = ccr::thin_svd(a);
        benchmark::DoNotOptimize(svd.singular.data());
    }
}
BENCHMARK(BM_ThinSvd)->Args({300, 150})->Args({500, 250})->Args({1000, 500});

void BM_MinNormSolve(benchmark::State& state) {
    const Eigen::MatrixXd a = bench_matrix(state.range(0), state.range(0) / 2);
    ccr::Rng rng = ccr::RngKey(14).with("rhs").stream();
    const Eigen::VectorXd y = rng.gaussian_vector(state.range(0));
    for (auto _ : state) {
        const Eigen::VectorXd x = ccr::min_norm_solve(a, y);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_MinNormSolve)->Arg(200)->Arg(400);

void BM_Orthonormalize(benchmark::State& state) {
    const Eigen::MatrixXd g = bench_matrix(state.range(0), 16);
    for (auto _ : state) {
        const Eigen::MatrixXd q = ccr::orthonormalize(g);
        benchmark::DoNotOptimize(q.data());
    }
}
BENCHMARK(BM_Orthonormalize)->Arg(300)->Arg(1000);

}  // namespace
