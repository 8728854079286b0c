#include <benchmark/benchmark.h>

#include "facets/dual.hpp"
#include "facets/regions.hpp"
#include "facets/rng.hpp"
#include "facets/trainer.hpp"

using namespace facets;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(-1, 1);
    return m;
}

void BM_matmul_dense_layer(benchmark::State& state) {
    const Matrix a = random_matrix(128, 784, 1);
    const Matrix b = random_matrix(784, 128, 2);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_matmul_dense_layer);

void BM_least_squares_rank_deficient(benchmark::State& state) {
    const std::size_t p = std::size_t(state.range(0));
    const Matrix u = random_matrix(p, 32, 3);
    const Matrix v = random_matrix(32, 128, 4);
    const Matrix a = matmul(u, v);
    const Matrix b = random_matrix(p, 128, 5);
    for (auto _ : state) benchmark::DoNotOptimize(least_squares(a, b));
}
BENCHMARK(BM_least_squares_rank_deficient)->Arg(512)->Arg(2048);

void BM_forward_dense(benchmark::State& state) {
    const Mlp net = init_net({784, 128, 10}, 7);
    Rng rng(8);
    Vector x(784);
    for (double& v : x) v = rng.uniform(0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(forward(net, x));
}
BENCHMARK(BM_forward_dense);

void BM_local_affine_dense(benchmark::State& state) {
    const Mlp net = init_net({784, 128, 10}, 7);
    Rng rng(8);
    Vector x(784);
    for (double& v : x) v = rng.uniform(0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(local_affine(net, x));
}
BENCHMARK(BM_local_affine_dense);

void BM_enumerate_regions(benchmark::State& state) {
    const Mlp net = init_net({2, 8, 8, 1}, 11);
    const BBox box{-2, -2, 2, 2};
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_regions_2d(net, box));
}
BENCHMARK(BM_enumerate_regions);

void BM_pattern_grid_census(benchmark::State& state) {
    const Mlp net = init_net({2, 8, 8, 1}, 11);
    const BBox box{-2, -2, 2, 2};
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_patterns_grid(net, box, 501));
}
BENCHMARK(BM_pattern_grid_census);

void BM_feasibility_solve(benchmark::State& state) {
    const Mlp net = init_net({2, 8, 8, 1}, 11);
    Rng rng(12);
    std::vector<Polytope> polys;
    for (int i = 0; i < 32; ++i)
        polys.push_back(region_inequalities(net, {rng.uniform(-2, 2), rng.uniform(-2, 2)}));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_empty(polys[i]));
        i = (i + 1) % polys.size();
    }
}
BENCHMARK(BM_feasibility_solve);

void BM_kmeans_facet_rows(benchmark::State& state) {
    const Mlp net = init_net({2, 8, 8, 4}, 13);
    const Matrix samples = make_grid2d(BBox{-1, -1, 1, 1}, 71).inputs;
    const CMatrix c = build_c_matrix(net, samples, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(kmeans_fit(c.rows, std::size_t(state.range(0)), 5));
}
BENCHMARK(BM_kmeans_facet_rows)->Arg(10)->Arg(100);

void BM_train_epoch_toy(benchmark::State& state) {
    const Dataset d = make_circle_annulus(CircleParams{}, 21);
    const Mlp net = init_net({2, 8, 8, 1}, 21);
    TrainConfig cfg;
    cfg.lr = 0.02;
    cfg.momentum = 0.5;
    cfg.batch_size = 32;
    cfg.epochs = 1;
    cfg.loss = Loss::mse;
    for (auto _ : state) benchmark::DoNotOptimize(train(net, d, cfg));
}
BENCHMARK(BM_train_epoch_toy);

} // namespace

BENCHMARK_MAIN();
