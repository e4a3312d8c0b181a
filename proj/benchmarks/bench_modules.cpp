#include <benchmark/benchmark.h>

#include <random>

#include "sympl/channels.hpp"
#include "sympl/control.hpp"
#include "sympl/discrete.hpp"
#include "sympl/sensing.hpp"
#include "sympl/transduction.hpp"

using namespace sympl;

namespace {

void BM_SolvePhi(benchmark::State& st) {
    int n = int(st.range(0));
    Mat S = random_symplectic(n, 5, 1.5);
    Mat V = 2.0 * S * S.transpose();
    Mat dV = Mat::Identity(2 * n, 2 * n);
    for (auto _ : st) benchmark::DoNotOptimize(sensing::solve_phi(V, dV));
}
BENCHMARK(BM_SolvePhi)->Arg(1)->Arg(4)->Arg(8);

void BM_TeleportTransform(benchmark::State& st) {
    int n = int(st.range(0));
    Mat S = random_symplectic(n, 6, 1.5);
    auto p = transduction::default_partition(n);
    for (auto _ : st) benchmark::DoNotOptimize(transduction::teleport_transform(S, p));
}
BENCHMARK(BM_TeleportTransform)->Arg(2)->Arg(4)->Arg(8);

void BM_Dilate(benchmark::State& st) {
    auto c = channels::random_cp_channel(int(st.range(0)), 7);
    for (auto _ : st) benchmark::DoNotOptimize(channels::dilate(c));
}
BENCHMARK(BM_Dilate)->Arg(1)->Arg(4)->Arg(8);

void BM_SandwichSwap(benchmark::State& st) {
    std::vector<Mat> v(16, random_symplectic(int(st.range(0)), 8, 1.5));
    for (auto _ : st) benchmark::DoNotOptimize(control::sandwich_swap(v));
}
BENCHMARK(BM_SandwichSwap)->Arg(3)->Arg(6);

void BM_Stabilize(benchmark::State& st) {
    Mat S = random_symplectic(int(st.range(0)), 9, 1.5);
    for (auto _ : st) benchmark::DoNotOptimize(control::stabilize(S));
}
BENCHMARK(BM_Stabilize)->Arg(3)->Arg(8);

void BM_CircuitCompose(benchmark::State& st) {
    using namespace discrete;
    int n = int(st.range(0));
    std::vector<Gate> gates;
    for (int k = 0; k < 4 * n; ++k) {
        gates.push_back(hadamard(k % n));
        gates.push_back(cnot(k % n, (k + 1) % n));
        gates.push_back(phase((k + 2) % n));
    }
    for (auto _ : st) benchmark::DoNotOptimize(circuit_compose(gates, n, 5));
}
BENCHMARK(BM_CircuitCompose)->Arg(3)->Arg(8);

void BM_DVSymplecticCheck(benchmark::State& st) {
    using namespace discrete;
    IMat S = circuit_compose(teleportation_circuit(), 3, 2);
    Int d = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(is_dv_symplectic(S, d));
}
BENCHMARK(BM_DVSymplecticCheck)->Arg(2)->Arg(6)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
