#include <benchmark/benchmark.h>

#include <vector>

#include "robqunn/ansatz.hpp"
#include "robqunn/attacks.hpp"
#include "robqunn/classical.hpp"
#include "robqunn/model.hpp"
#include "robqunn/qsim.hpp"
#include "robqunn/quanv.hpp"
#include "robqunn/rng.hpp"

namespace {

using namespace robqunn;

Image bench_image() {
  Rng rng(1);
  PixelGrid g(kImageSide, kImageSide);
  for (auto& v : g.values) v = uniform01(rng);
  return Image(std::move(g), 3);
}

void BM_RunProgram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto ansatz = build_ansatz(AnsatzKind::ZZFull, n, 7);
  for (auto _ : state) {
    auto s = qsim::run_program(qsim::init_zero(n), ansatz.gates());
    benchmark::DoNotOptimize(s.amps().data());
  }
}
BENCHMARK(BM_RunProgram)->Arg(4)->Arg(8)->Arg(12);

void BM_ShiftDerivativeAll(benchmark::State& state) {
  const auto ansatz = build_ansatz(AnsatzKind::ZZFull, 4, 7);
  std::vector<qsim::Gate> program{qsim::Gate::ry(0, 0.3), qsim::Gate::ry(1, 0.9), qsim::Gate::ry(2, 1.4),
                                  qsim::Gate::ry(3, 2.0)};
  program.insert(program.end(), ansatz.gates().begin(), ansatz.gates().end());
  const auto zero = qsim::init_zero(4);
  for (auto _ : state) benchmark::DoNotOptimize(qsim::shift_derivative_all(zero, program, 0, 0));
}
BENCHMARK(BM_ShiftDerivativeAll);

void BM_QuanvForward(benchmark::State& state) {
  const auto image = bench_image();
  const auto ansatz = build_ansatz(static_cast<AnsatzKind>(state.range(0)), 4, 7);
  for (auto _ : state) benchmark::DoNotOptimize(quanv_forward(image, ansatz));
}
BENCHMARK(BM_QuanvForward)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

void BM_QuanvInputGradient(benchmark::State& state) {
  const auto image = bench_image();
  const auto ansatz = build_ansatz(AnsatzKind::ZZFull, 4, 7);
  const FeatureMap upstream(14, 14, 4, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(quanv_input_gradient(image, ansatz, upstream));
}
BENCHMARK(BM_QuanvInputGradient)->Unit(benchmark::kMicrosecond);

void BM_ConvForward(benchmark::State& state) {
  const auto image = bench_image();
  const auto layer = ConvLayer::random(7);
  for (auto _ : state) benchmark::DoNotOptimize(conv_forward(image, layer));
}
BENCHMARK(BM_ConvForward);

void BM_DenseForward(benchmark::State& state) {
  const auto features = conv_forward(bench_image(), ConvLayer::random(7));
  const auto head = DenseHead::random(7);
  for (auto _ : state) benchmark::DoNotOptimize(dense_forward(features.data(), head));
}
BENCHMARK(BM_DenseForward);

void BM_FgsmQuantum(benchmark::State& state) {
  const Model model(Extractor(build_ansatz(AnsatzKind::ZZFull, 4, 7)), DenseHead::random(7));
  const auto image = bench_image();
  for (auto _ : state) benchmark::DoNotOptimize(fgsm(model, image, AttackSpec::fgsm(0.1)));
}
BENCHMARK(BM_FgsmQuantum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
