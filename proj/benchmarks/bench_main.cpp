#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cae/analysis/embedding_store.hpp"
#include "cae/analysis/kmeans.hpp"
#include "cae/analysis/similarity.hpp"
#include "cae/autoencoder.hpp"
#include "cae/cle.hpp"
#include "cae/nn/layers.hpp"
#include "cae/random.hpp"
#include "cae/synthetic.hpp"
#include "cae/training.hpp"

using namespace cae;

namespace {

std::vector<corpus::Table> sample_tables() {
  synthetic::Options o;
  o.tables = 20;
  o.seed = 1;
  return synthetic::make_corpus(o);
}

std::vector<const corpus::Column*> columns_of(const std::vector<corpus::Table>& tables) {
  std::vector<const corpus::Column*> out;
  for (const auto& t : tables)
    for (const auto& c : t.columns) out.push_back(&c);
  return out;
}

nn::Tensor random_batch(std::size_t n, std::size_t width, std::uint64_t seed) {
  Rng rng(seed);
  nn::Tensor t({n, width});
  for (auto& v : t.values()) v = static_cast<float>(rng.uniform01());
  return t;
}

void BM_CleEncode(benchmark::State& state) {
  const auto tables = sample_tables();
  const auto cols = columns_of(tables);
  const cle::EncodingConfig cfg{250, static_cast<cle::Mode>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(cle::encode_columns(cols, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cols.size()));
}
BENCHMARK(BM_CleEncode)->Arg(0)->Arg(1)->ArgNames({"alternative"});

void BM_LinearForwardBackward(benchmark::State& state) {
  ModelConfig m;
  m.architecture = Architecture::Linear;
  auto model = build_autoencoder(m, 1);
  const auto batch = random_batch(64, m.input_size(), 2);
  Rng rng(3);
  for (auto _ : state) {
    model.zero_grad();
    const auto y = model.forward(batch, nn::Mode::Train, &rng);
    model.backward(y);
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_LinearForwardBackward)->Unit(benchmark::kMillisecond);

void BM_ConvForwardBackward(benchmark::State& state) {
  ModelConfig m;
  auto model = build_autoencoder(m, 1);
  const auto batch = random_batch(static_cast<std::size_t>(state.range(0)), m.input_size(), 2);
  for (auto _ : state) {
    model.zero_grad();
    const auto y = model.forward(batch, nn::Mode::Train, nullptr);
    model.backward(y);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConvForwardBackward)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ConvEncode(benchmark::State& state) {
  auto model = build_autoencoder(ModelConfig{}, 1);
  const auto batch = random_batch(64, ModelConfig{}.input_size(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.encode_batch(batch));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ConvEncode)->Unit(benchmark::kMillisecond);

analysis::EmbeddingStore random_store(std::size_t n, std::size_t dim) {
  Rng rng(9);
  analysis::EmbeddingStore store(dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    store.add("c" + std::to_string(i), std::move(v));
  }
  return store;
}

void BM_TopkQuery(benchmark::State& state) {
  const auto store = random_store(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::topk_query(store, "c0", 5));
}
BENCHMARK(BM_TopkQuery)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_KMeans(benchmark::State& state) {
  const auto store = random_store(2000, 100);
  analysis::KMeansOptions opt;
  opt.seed = 1;
  opt.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(analysis::kmeans(store, static_cast<std::size_t>(state.range(0)), opt));
}
BENCHMARK(BM_KMeans)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
