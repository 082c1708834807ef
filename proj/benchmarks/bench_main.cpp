#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "hanzi/corpus.hpp"
#include "hanzi/models.hpp"
#include "hanzi/similarity.hpp"
#include "hanzi/utf8.hpp"

using namespace hanzi;

namespace {

constexpr std::size_t kVocab = 1000;
constexpr std::size_t kComponents = 300;

struct StepFixture {
  ModelConfig config;
  EmbeddingTables tables;
  std::vector<ComponentId> components;
  TrainingExample example;
  DiscreteSampler tokens;
  DiscreteSampler comps;
  Rng rng{1};

  StepFixture(ModelVariant variant, Gram gram) {
    config.variant = variant;
    config.gram = gram;
    tables = EmbeddingTables::create(config, kVocab, kComponents, rng);
    const std::size_t lc = config.components_per_token();
    components.resize(config.context_slots() * lc);
    for (auto& c : components) c = static_cast<ComponentId>(rng.below(kComponents));
    example.center = 3;
    example.context.resize(config.context_slots());
    for (std::size_t s = 0; s < example.context.size(); ++s) {
      example.context[s] = ContextSlot{static_cast<TokenId>(10 + s),
                                       std::span<const ComponentId>(components).subspan(s * lc, lc)};
    }
    std::vector<std::uint64_t> counts(kVocab, 1), comp_counts(kComponents, 1);
    tokens = DiscreteSampler::from_counts(counts, 0.75);
    comps = DiscreteSampler::from_counts(comp_counts, 0.75);
  }
};

void BM_TrainStep(benchmark::State& state) {
  StepFixture f(static_cast<ModelVariant>(state.range(0)), static_cast<Gram>(state.range(1)));
  const NegativeSamplers samplers{&f.tokens, &f.comps};
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_step(f.example, f.tables, f.config, 1e-4, samplers, f.rng));
  }
  state.SetLabel(std::string(to_string(f.config.variant)) + "-" +
                 std::string(to_string(f.config.gram)));
}
BENCHMARK(BM_TrainStep)->ArgsProduct({{0, 1, 2, 3}, {0, 1}});

void BM_Spearman(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> xs(static_cast<std::size_t>(state.range(0))), ys(xs.size());
  for (auto& x : xs) x = rng.uniform();
  for (auto& y : ys) y = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(spearman(xs, ys));
}
BENCHMARK(BM_Spearman)->Arg(50)->Arg(1000)->Arg(20000);

void BM_Preprocess(benchmark::State& state) {
  Rng rng(3);
  std::string text;
  for (int i = 0; i < 100000; ++i) {
    if (i % 20 == 19) {
      text += "。";
    } else {
      utf8::append(text, static_cast<char32_t>(0x4E00 + rng.below(3000)));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Preprocess);

}  // namespace

BENCHMARK_MAIN();
