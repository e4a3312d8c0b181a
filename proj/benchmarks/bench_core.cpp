#include <benchmark/benchmark.h>

#include <random>

#include "sympl/core.hpp"

using namespace sympl;

namespace {

Mat random_sym(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
    return 0.5 * (A + A.transpose());
}

void BM_RandomSymplectic(benchmark::State& st) {
    int n = int(st.range(0));
    std::uint64_t seed = 0;
    for (auto _ : st) benchmark::DoNotOptimize(random_symplectic(n, ++seed, 1.5));
}
BENCHMARK(BM_RandomSymplectic)->Arg(2)->Arg(8)->Arg(32);

void BM_ExpMap(benchmark::State& st) {
    int n = int(st.range(0));
    Mat H = random_sym(2 * n, 1);
    for (auto _ : st) benchmark::DoNotOptimize(exp_map(H, 0.5));
}
BENCHMARK(BM_ExpMap)->Arg(2)->Arg(8)->Arg(32);

void BM_Cayley(benchmark::State& st) {
    int n = int(st.range(0));
    Mat M = omega_matrix(n) * random_sym(2 * n, 2);
    for (auto _ : st) benchmark::DoNotOptimize(cayley(M));
}
BENCHMARK(BM_Cayley)->Arg(2)->Arg(8)->Arg(32);

void BM_Euler(benchmark::State& st) {
    Mat S = random_symplectic(int(st.range(0)), 3, 1.5);
    for (auto _ : st) benchmark::DoNotOptimize(euler_decompose(S));
}
BENCHMARK(BM_Euler)->Arg(2)->Arg(8)->Arg(32);

void BM_Williamson(benchmark::State& st) {
    int n = int(st.range(0));
    Mat S = random_symplectic(n, 4, 1.5);
    Mat V = S * S.transpose() * 1.5;
    for (auto _ : st) benchmark::DoNotOptimize(williamson(V));
}
BENCHMARK(BM_Williamson)->Arg(2)->Arg(8)->Arg(32);

}  // namespace
