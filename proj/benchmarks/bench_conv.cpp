#include <benchmark/benchmark.h>

#include "cartogan/nets.hpp"
#include "cartogan/ops.hpp"

using namespace cartogan;

static void ConvForward(benchmark::State& state) {
    int c = int(state.range(0));
    Rng rng(1);
    auto in = ag::Tensor<float>::zeros({1, c, 32, 32});
    for (auto& v : in.data()) v = float(rng.normal());
    auto w = ag::Tensor<float>::zeros({2 * c, c, 4, 4});
    for (auto& v : w.data()) v = float(rng.normal()) * 0.05f;
    auto b = ag::Tensor<float>::zeros({1, 2 * c, 1, 1});
    for (auto _ : state) {
        ag::Tape<float> tape;
        auto out = ag::conv2d(tape, in, w, b, 2, 1);
        benchmark::DoNotOptimize(out.data().data());
    }
    state.SetItemsProcessed(state.iterations() * 16 * 16 * 2 * c * c * 16);
}
BENCHMARK(ConvForward)->Arg(32)->Arg(64)->Arg(128);

static void GeneratorStep(benchmark::State& state) {
    Rng rng(2);
    auto g = gan::GeneratorNet::make(64, int(state.range(0)), rng);
    auto x = ag::Tensor<float>::zeros({1, 3, 64, 64});
    for (auto& v : x.data()) v = float(rng.uniform(-1, 1));
    Rng drop(3);
    for (auto _ : state) {
        ag::Tape<float> tape;
        auto y = g.forward(tape, x, true, drop);
        auto loss = ag::l1_loss(tape, y, x);
        tape.backward(loss);
        benchmark::DoNotOptimize(loss.scalar());
    }
}
BENCHMARK(GeneratorStep)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
