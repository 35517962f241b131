#include <random>
#include <set>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "restorebench/metrics.hpp"

namespace rb = restorebench;

namespace {

void BM_HitRules(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> synset(0, 999);
  std::vector<std::set<std::string>> labels(1000);
  std::vector<std::vector<std::string>> tops(1000);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    while (labels[i].size() < 1 + i % 8) labels[i].insert("n" + std::to_string(synset(rng)));
    for (int k = 0; k < 5; ++k) tops[i].push_back("n" + std::to_string(synset(rng)));
  }
  for (auto _ : state) {
    long hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += rb::m1_hit(labels[i], tops[i]) + rb::m2_hit(labels[i], tops[i]);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * labels.size());
}
BENCHMARK(BM_HitRules);

void BM_AggregateRates(benchmark::State& state) {
  const int crops = static_cast<int>(state.range(0));
  std::map<std::string, std::set<std::string>> entries;
  for (int c = 0; c < 20; ++c)
    for (int s = 0; s < 1 + c % 6; ++s) entries["class" + std::to_string(c)].insert("n" + std::to_string(c * 10 + s));
  const rb::SuperClassMap map(entries);
  rb::Manifest manifest;
  std::vector<rb::PredictionRecord> predictions;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> synset(0, 199);
  for (int i = 0; i < crops; ++i) {
    rb::CropRecord crop;
    crop.crop_id = "crop" + std::to_string(i);
    crop.collection = i % 3 == 0 ? "uav" : (i % 3 == 1 ? "glider" : "ground");
    crop.label = "class" + std::to_string(i % 20);
    manifest.crops.push_back(crop);
    for (const char* net : {"vgg16", "resnet", "mobilenet"}) {
      rb::PredictionRecord p{crop.crop_id, net, {}};
      std::set<std::string> used;
      for (int k = 0; k < 5; ++k) {
        std::string s;
        do s = "n" + std::to_string(synset(rng));
        while (!used.insert(s).second);
        p.top5[k] = {s, 0.5 - 0.1 * k};
      }
      predictions.push_back(p);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(rb::aggregate_rates(predictions, manifest, map));
  state.SetItemsProcessed(state.iterations() * predictions.size());
}
BENCHMARK(BM_AggregateRates)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
