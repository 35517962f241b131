#include <random>

#include <benchmark/benchmark.h>

#include "restorebench/degrade.hpp"
#include "restorebench/enhance.hpp"

namespace rb = restorebench;

namespace {

// Smooth random texture: white noise box-filtered twice, rescaled to [0.1, 0.9].
rb::Image texture(int side, int channels = 1) {
  std::mt19937_64 rng(side);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rb::Image img(side, side, channels);
  for (double& v : img.data()) v = u(rng);
  img = rb::convolve(rb::convolve(img, rb::Kernel::uniform(5)), rb::Kernel::uniform(5));
  for (double& v : img.data()) v = 0.1 + 0.8 * v;
  return img;
}

void BM_ConvolveMotion(benchmark::State& state) {
  const auto img = texture(static_cast<int>(state.range(0)));
  const auto k = rb::motion_blur_kernel(7.0, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(rb::convolve(img, k));
  state.SetItemsProcessed(state.iterations() * img.size());
}
BENCHMARK(BM_ConvolveMotion)->Arg(128)->Arg(512);

void BM_RichardsonLucy(benchmark::State& state) {
  const auto k = rb::motion_blur_kernel(7.0, 0.0);
  const auto blurred = rb::convolve(texture(128), k);
  for (auto _ : state) benchmark::DoNotOptimize(rb::richardson_lucy(blurred, k, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RichardsonLucy)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_BlindDeconvolve(benchmark::State& state) {
  const auto blurred = rb::convolve(texture(128), rb::Kernel::uniform(3));
  for (auto _ : state) benchmark::DoNotOptimize(rb::blind_deconvolve(blurred, rb::kDefaultBlindIterations));
}
BENCHMARK(BM_BlindDeconvolve)->Unit(benchmark::kMillisecond);

void BM_DetectInterlacing(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto img = rb::simulate_interlacing(texture(side), 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(rb::detect_interlacing(img));
}
BENCHMARK(BM_DetectInterlacing)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SuppressPeriodic(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto img = rb::inject_periodic(texture(side), 2.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(rb::suppress_periodic(img));
}
BENCHMARK(BM_SuppressPeriodic)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Clahe(benchmark::State& state) {
  const auto img = texture(512, 3);
  for (auto _ : state) benchmark::DoNotOptimize(rb::clahe(img));
}
BENCHMARK(BM_Clahe)->Unit(benchmark::kMillisecond);

void BM_TiledUpscale(benchmark::State& state) {
  const auto img = texture(256);
  rb::TileOptions options;
  options.scale = 2;
  options.jobs = static_cast<int>(state.range(0));
  const rb::PatchEnhancer up = [](const rb::Image& p) { return rb::upscale(p, 2, rb::Interpolation::kBicubic); };
  for (auto _ : state) benchmark::DoNotOptimize(rb::tile_process(img, up, options));
}
BENCHMARK(BM_TiledUpscale)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
