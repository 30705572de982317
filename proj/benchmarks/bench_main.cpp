#include <benchmark/benchmark.h>

#include <vector>

#include "hrsn/encoder.hpp"
#include "hrsn/lstm.hpp"
#include "hrsn/optim.hpp"
#include "hrsn/rng.hpp"
#include "hrsn/train.hpp"

namespace {

using namespace hrsn;

EncodedDocument random_document(std::size_t sentences, std::size_t words, std::size_t dim,
                                Rng& rng) {
  EncodedDocument doc(sentences, words, dim);
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<Vector> ws;
    for (std::size_t t = 0; t < words; ++t) ws.push_back(uniform_init(dim, -1.0, 1.0, rng));
    std::vector<std::span<const double>> views;
    for (const auto& w : ws) views.push_back(w.values());
    doc.add_sentence(views);
  }
  return doc;
}

// Args: input dim, output dim.
void BM_LstmStep(benchmark::State& state) {
  const auto in = static_cast<std::size_t>(state.range(0));
  const auto out = static_cast<std::size_t>(state.range(1));
  Rng rng(1);
  const auto params = LstmParams::uniform(in, out, -0.05, 0.05, rng);
  const auto x = uniform_init(in, -1.0, 1.0, rng);
  auto s = LstmState::zeros(out);
  for (auto _ : state) {
    s = lstm_step(params, x, s);
    benchmark::DoNotOptimize(s.h.raw().data());
  }
}
BENCHMARK(BM_LstmStep)->Args({20, 10})->Args({300, 150})->Args({150, 75});

// Args: word dim, sentence dim, document dim, sentences, words.
void BM_EncodeDocument(benchmark::State& state) {
  const EncoderDims dims{static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(1)),
                         static_cast<std::size_t>(state.range(2))};
  Rng rng(2);
  const auto params = EncoderParams::uniform(dims, -0.05, 0.05, rng);
  const auto doc = random_document(static_cast<std::size_t>(state.range(3)),
                                   static_cast<std::size_t>(state.range(4)), dims.word, rng);
  for (auto _ : state) benchmark::DoNotOptimize(encode_document(params, doc));
}
BENCHMARK(BM_EncodeDocument)
    ->Args({20, 10, 5, 15, 12})
    ->Args({300, 150, 75, 20, 20})
    ->Unit(benchmark::kMillisecond);

// One clipped Adadelta step on a batch of 32 synthetic-size pairs.
void BM_TrainStep(benchmark::State& state) {
  TrainConfig config;
  config.dims = {20, 10, 5};
  config.max_words = 12;
  config.max_sentences = 15;
  Rng rng(3);
  auto params = EncoderParams::uniform(config.dims, -0.05, 0.05, rng);
  std::vector<EncodedPair> batch;
  for (std::size_t k = 0; k < config.batch_size; ++k) {
    batch.push_back({random_document(10, 8, 20, rng), random_document(10, 8, 20, rng),
                     static_cast<int>(k % 2)});
  }
  AdadeltaState optimizer(params.tensors());
  for (auto _ : state) benchmark::DoNotOptimize(train_step(params, optimizer, batch, config, rng));
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
