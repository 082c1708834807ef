#include "hanzi/trainer.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "hanzi/error.hpp"

namespace hanzi {
namespace {

struct WorkerTotals {
  double loss = 0.0;
  std::uint64_t examples = 0;
};

// Word2vec-style keep probability for a token with relative frequency f.
double keep_probability(double f, double t) {
  return std::min(1.0, (std::sqrt(f / t) + 1.0) * t / f);
}

class TrainingRun {
 public:
  TrainingRun(const TokenStream& stream, const Vocabulary& vocab,
              const ComponentIndex* components, const TrainConfig& cfg,
              EmbeddingTables& tables)
      : stream_(stream),
        components_(components),
        cfg_(cfg),
        tables_(tables),
        total_positions_(static_cast<std::uint64_t>(cfg.epochs) * stream.token_count()) {
    if (cfg.subsample_t > 0.0) {
      keep_.resize(vocab.size());
      const double total = static_cast<double>(vocab.total_count());
      for (TokenId t = 0; t < vocab.size(); ++t) {
        keep_[t] = keep_probability(static_cast<double>(vocab.count(t)) / total, cfg.subsample_t);
      }
    }
    samplers_.tokens = &vocab.negative_distribution();
    if (components != nullptr) samplers_.components = &components->negative_distribution();
    for (std::size_t w = 0; w < cfg.workers; ++w) {
      sampling_rngs_.push_back(Rng::stream(cfg.seed, "sampling", w));
      subsample_rngs_.push_back(Rng::stream(cfg.seed, "subsample", w));
    }
  }

  double run_epoch() {
    std::vector<WorkerTotals> totals(cfg_.workers);
    if (cfg_.workers == 1) {
      totals[0] = run_shard(0);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(cfg_.workers);
      for (std::size_t w = 0; w < cfg_.workers; ++w) {
        threads.emplace_back([this, w, &totals] { totals[w] = run_shard(w); });
      }
    }
    if (failed_.load()) throw Error("non-finite loss during training");
    WorkerTotals sum;
    for (const auto& t : totals) {
      sum.loss += t.loss;
      sum.examples += t.examples;
    }
    return sum.examples == 0 ? 0.0 : sum.loss / static_cast<double>(sum.examples);
  }

  double current_rate() const {
    return learning_rate(cfg_, position_.load(std::memory_order_relaxed), total_positions_);
  }

 private:
  WorkerTotals run_shard(std::size_t worker) {
    WorkerTotals totals;
    auto& rng = sampling_rngs_[worker];
    auto& sub_rng = subsample_rngs_[worker];
    TrainingExample example;
    std::vector<TokenId> kept;
    for (std::size_t i = worker; i < stream_.sentences.size(); i += cfg_.workers) {
      if (failed_.load(std::memory_order_relaxed)) break;
      const auto& sentence = stream_.sentences[i];
      std::span<const TokenId> tokens = sentence;
      if (!keep_.empty()) {
        kept.clear();
        for (auto t : sentence) {
          if (sub_rng.uniform() < keep_[t]) kept.push_back(t);
        }
        tokens = kept;
      }
      for (std::size_t p = 0; p < tokens.size(); ++p) {
        const auto pos = position_.fetch_add(1, std::memory_order_relaxed);
        const double lr = learning_rate(cfg_, pos, total_positions_);
        build_example(tokens, p, cfg_.model, components_, example);
        if (example.present_slots() == 0) continue;
        const double loss = train_step(example, tables_, cfg_.model, lr, samplers_, rng);
        if (!std::isfinite(loss)) {
          failed_.store(true);
          return totals;
        }
        totals.loss += loss;
        ++totals.examples;
      }
      // Positions dropped by subsampling still advance the schedule.
      position_.fetch_add(sentence.size() - tokens.size(), std::memory_order_relaxed);
    }
    return totals;
  }

  const TokenStream& stream_;
  const ComponentIndex* components_;
  const TrainConfig& cfg_;
  EmbeddingTables& tables_;
  NegativeSamplers samplers_;
  std::vector<double> keep_;
  std::vector<Rng> sampling_rngs_;
  std::vector<Rng> subsample_rngs_;
  std::uint64_t total_positions_;
  std::atomic<std::uint64_t> position_{0};
  std::atomic<bool> failed_{false};
};

const char* first_non_finite(const EmbeddingTables& t) {
  if (!t.char_in.all_finite()) return "token input table";
  if (!t.comp_in.all_finite()) return "component input table";
  if (!t.char_out.all_finite()) return "token output table";
  if (!t.comp_out.all_finite()) return "component output table";
  return nullptr;
}

TrainedEmbeddings snapshot(const EmbeddingTables& tables, const Vocabulary& vocab,
                           const ComponentIndex* components, const TrainConfig& cfg) {
  TrainedEmbeddings out;
  out.tokens = EmbeddingSet(vocab.tokens(), tables.char_in);
  if (components != nullptr) {
    const auto& m = cfg.model.variant == ModelVariant::charcbow ? tables.comp_in : tables.comp_out;
    out.components = EmbeddingSet(components->names(), m);
  }
  out.config = cfg;
  return out;
}

}  // namespace

TrainConfig TrainConfig::defaults(ModelVariant variant, Gram gram) {
  TrainConfig cfg;
  cfg.model.variant = variant;
  cfg.model.gram = gram;
  cfg.lr_start = default_lr_start(variant);
  cfg.lr_min = cfg.lr_start * 1e-4;
  return cfg;
}

double TrainConfig::default_lr_start(ModelVariant variant) {
  return variant == ModelVariant::cbow || variant == ModelVariant::charcbow ? 0.05 : 0.025;
}

void TrainConfig::validate() const {
  model.validate();
  if (epochs < 1) throw Error("epochs must be at least 1");
  if (!(lr_start > lr_min) || !(lr_min >= 0.0)) {
    throw Error("learning rates must satisfy lr_start > lr_min >= 0");
  }
  if (workers < 1) throw Error("workers must be at least 1");
  if (min_count < 1) throw Error("min_count must be at least 1");
  if (subsample_t < 0.0) throw Error("subsample threshold must be non-negative");
}

double learning_rate(const TrainConfig& config, std::uint64_t position,
                     std::uint64_t total_positions) {
  if (total_positions == 0) return config.lr_start;
  const double frac = static_cast<double>(position) / static_cast<double>(total_positions);
  const double lr = config.lr_start + (config.lr_min - config.lr_start) * frac;
  return std::max(lr, config.lr_min);
}

TrainedEmbeddings train(const TokenStream& stream, const Vocabulary& vocab,
                        const ComponentLexicon* lexicon, const TrainConfig& cfg,
                        const ProgressCallback& progress) {
  cfg.validate();
  if (stream.token_count() == 0) throw Error("training stream is empty");
  if (vocab.empty()) throw Error("vocabulary is empty");
  if (stream.gram != cfg.model.gram) throw Error("stream gram does not match model gram");
  for (const auto& s : stream.sentences) {
    for (auto t : s) {
      if (t >= vocab.size()) throw Error("stream token id outside the vocabulary");
    }
  }

  std::optional<ComponentIndex> components;
  if (uses_components(cfg.model.variant)) {
    if (lexicon == nullptr) {
      throw Error(std::string(to_string(cfg.model.variant)) + " requires a component lexicon");
    }
    components = ComponentIndex::build(vocab, cfg.model.gram, *lexicon, cfg.model.components,
                                       cfg.ns_power);
  }
  const ComponentIndex* index = components ? &*components : nullptr;

  auto init_rng = Rng::stream(cfg.seed, "init");
  auto tables = EmbeddingTables::create(cfg.model, vocab.size(),
                                        index != nullptr ? index->size() : 0, init_rng);

  TrainingRun run(stream, vocab, index, cfg, tables);
  std::vector<double> epoch_losses;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double mean_loss = run.run_epoch();
    if (const char* bad = first_non_finite(tables)) {
      throw Error(std::string("non-finite value in ") + bad + " after epoch " +
                  std::to_string(epoch));
    }
    epoch_losses.push_back(mean_loss);
    if (progress) progress({epoch, mean_loss, run.current_rate()});
    if (!cfg.checkpoint_dir.empty()) {
      std::filesystem::create_directories(cfg.checkpoint_dir);
      save_embeddings(snapshot(tables, vocab, index, cfg),
                      cfg.checkpoint_dir / ("epoch-" + std::to_string(epoch) + ".vec"));
    }
  }
  auto out = snapshot(tables, vocab, index, cfg);
  out.epoch_losses = std::move(epoch_losses);
  return out;
}

void save_embeddings(const TrainedEmbeddings& emb, const std::filesystem::path& path) {
  save_embedding_set(emb.tokens, path);
  if (emb.components) save_embedding_set(*emb.components, component_file_for(path));
}

TrainedEmbeddings load_embeddings(const std::filesystem::path& path) {
  TrainedEmbeddings out;
  out.tokens = load_embedding_set(path);
  const auto comp_path = component_file_for(path);
  if (std::filesystem::exists(comp_path)) out.components = load_embedding_set(comp_path);
  out.config.model.dim = out.tokens.dim();
  return out;
}

}  // namespace hanzi
